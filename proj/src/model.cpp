#include "herd/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace herd {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 7> kFamilyNames = {{
    {Family::SymbHerd, "SymbHerd"},
    {Family::PPPackIndiv, "PP_PackIndiv"},
    {Family::PPPackHerd, "PP_PackHerd"},
    {Family::CompHerd, "CompHerd"},
    {Family::SymbClassic, "SymbClassic"},
    {Family::PPClassic, "PPClassic"},
    {Family::CompClassic, "CompClassic"},
}};

double root(double v) { return std::sqrt(std::max(v, 0.0)); }

void require_nonnegative(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0) {
        throw DomainError(std::string("parameter '") + name + "' must be finite and >= 0");
    }
}

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw DomainError(std::string("parameter '") + name + "' must be finite and > 0");
    }
}

void require_state(const State& s, Representation rep) {
    if (s.rep != rep) {
        throw UsageError(rep == Representation::Dimensional
                             ? "expected a dimensional state"
                             : "expected a nondimensional state");
    }
    if (!(s.first >= 0.0) || !(s.second >= 0.0)) {
        throw DomainError("population components must be >= 0");
    }
}

void require_herd(Family f) {
    if (!is_herd(f)) {
        throw UsageError("operation is defined for herd families only, got " +
                         std::string(to_string(f)));
    }
}

}  // namespace

std::string_view to_string(Family family) {
    for (const auto& [f, name] : kFamilyNames) {
        if (f == family) return name;
    }
    return "unknown";
}

std::optional<Family> family_from_string(std::string_view name) {
    for (const auto& [f, n] : kFamilyNames) {
        if (n == name) return f;
    }
    return std::nullopt;
}

Family classical_counterpart(Family herd_family) {
    switch (herd_family) {
    case Family::SymbHerd: return Family::SymbClassic;
    case Family::PPPackIndiv:
    case Family::PPPackHerd: return Family::PPClassic;
    case Family::CompHerd: return Family::CompClassic;
    default: throw UsageError("no classical counterpart for " + std::string(to_string(herd_family)));
    }
}

std::vector<std::string> DimParams::validate() const {
    require_nonnegative(r, "r");
    require_nonnegative(m, "m");
    require_nonnegative(p, "p");
    require_nonnegative(q, "q");
    require_positive(k_q, is_predator_prey(family) ? "K" : "K_Q");
    if (uses_k_p()) require_positive(k_p, "K_P");

    std::vector<std::string> warnings;
    if (is_predator_prey(family) && !(p < q)) {
        warnings.emplace_back("p >= q: predators gain at least as much as the prey lose");
    }
    return warnings;
}

void NondimParams::validate() const {
    require_herd(family);
    require_nonnegative(a, "a");
    require_nonnegative(b, "b");
    require_nonnegative(c, "c");
    require_nonnegative(e, "e");
    require_nonnegative(f, "f");
}

Family family_of(const ModelSpec& spec) {
    return std::visit([](const auto& p) { return p.family; }, spec);
}

// --- vector fields -------------------------------------------------------------

namespace detail {

Derivative dimensional_field(const DimParams& k, double q, double p) {
    const double logistic_q = k.r * (1.0 - q / k.k_q) * q;
    switch (k.family) {
    case Family::SymbHerd: {
        const double edge = root(p) * root(q);
        return {logistic_q + k.q * edge, k.m * (1.0 - p / k.k_p) * p + k.p * edge};
    }
    case Family::CompHerd: {
        const double edge = root(p) * root(q);
        return {logistic_q - k.q * edge, k.m * (1.0 - p / k.k_p) * p - k.p * edge};
    }
    case Family::PPPackIndiv:
        return {logistic_q - k.q * root(p) * q, -k.m * p + k.p * root(p) * q};
    case Family::PPPackHerd: {
        const double edge = root(p) * root(q);
        return {logistic_q - k.q * edge, -k.m * p + k.p * edge};
    }
    case Family::SymbClassic:
        return {logistic_q + k.q * p * q, k.m * (1.0 - p / k.k_p) * p + k.p * p * q};
    case Family::PPClassic:
        return {logistic_q - k.q * p * q, -k.m * p + k.p * p * q};
    case Family::CompClassic:
        return {logistic_q - k.q * p * q, k.m * (1.0 - p / k.k_p) * p - k.p * p * q};
    }
    return {};
}

Derivative nondim_field(const NondimParams& k, double x, double y) {
    switch (k.family) {
    case Family::SymbHerd:
        return {k.b * (1.0 - x * x) * x + y, k.c * (1.0 - y * y) * y + k.a * x};
    case Family::CompHerd:
        return {k.b * (1.0 - x * x) * x - y, k.c * (1.0 - y * y) * y - k.a * x};
    case Family::PPPackIndiv:
        return {k.b * (1.0 - x) * x - x * y, -0.5 * y + k.c * x};
    case Family::PPPackHerd:
        return {k.e * (1.0 - x * x) * x - y, -0.5 * y + k.f * x};
    default:
        throw UsageError("no nondimensional form for " + std::string(to_string(k.family)));
    }
}

}  // namespace detail

Derivative rhs_dimensional(const DimParams& params, const State& s) {
    require_state(s, Representation::Dimensional);
    return detail::dimensional_field(params, s.first, s.second);
}

Derivative rhs_nondim(const NondimParams& params, const State& s) {
    require_herd(params.family);
    require_state(s, Representation::Nondimensional);
    return detail::nondim_field(params, s.first, s.second);
}

Matrix2 jacobian_nondim(const NondimParams& k, const State& s) {
    require_herd(k.family);
    require_state(s, Representation::Nondimensional);
    const double x = s.first;
    const double y = s.second;
    Matrix2 j;
    switch (k.family) {
    case Family::SymbHerd:
        j.v = {{{k.b * (1.0 - 3.0 * x * x), 1.0}, {k.a, k.c * (1.0 - 3.0 * y * y)}}};
        break;
    case Family::CompHerd:
        j.v = {{{k.b * (1.0 - 3.0 * x * x), -1.0}, {-k.a, k.c * (1.0 - 3.0 * y * y)}}};
        break;
    case Family::PPPackIndiv:
        j.v = {{{k.b - 2.0 * k.b * x - y, -x}, {k.c, -0.5}}};
        break;
    case Family::PPPackHerd:
        j.v = {{{k.e * (1.0 - 3.0 * x * x), -1.0}, {k.f, -0.5}}};
        break;
    default: break;
    }
    return j;
}

Matrix2 jacobian_dimensional(const DimParams& k, const State& s) {
    require_state(s, Representation::Dimensional);
    const double q = s.first;
    const double p = s.second;
    if (is_herd(k.family) && (q <= 0.0 || p <= 0.0)) {
        throw DomainError("herd Jacobian is singular on the axes");
    }
    const double dlog_q = k.r * (1.0 - 2.0 * q / k.k_q);
    Matrix2 j;
    switch (k.family) {
    case Family::SymbHerd:
    case Family::CompHerd: {
        const double sign = k.family == Family::SymbHerd ? 1.0 : -1.0;
        const double dq = std::sqrt(p) / (2.0 * std::sqrt(q));  // d sqrt(PQ) / dQ
        const double dp = std::sqrt(q) / (2.0 * std::sqrt(p));  // d sqrt(PQ) / dP
        const double dlog_p = k.m * (1.0 - 2.0 * p / k.k_p);
        j.v = {{{dlog_q + sign * k.q * dq, sign * k.q * dp},
                {sign * k.p * dq, dlog_p + sign * k.p * dp}}};
        break;
    }
    case Family::PPPackIndiv:
        j.v = {{{dlog_q - k.q * std::sqrt(p), -k.q * q / (2.0 * std::sqrt(p))},
                {k.p * std::sqrt(p), -k.m + k.p * q / (2.0 * std::sqrt(p))}}};
        break;
    case Family::PPPackHerd: {
        const double dq = std::sqrt(p) / (2.0 * std::sqrt(q));
        const double dp = std::sqrt(q) / (2.0 * std::sqrt(p));
        j.v = {{{dlog_q - k.q * dq, -k.q * dp}, {k.p * dq, -k.m + k.p * dp}}};
        break;
    }
    case Family::SymbClassic:
        j.v = {{{dlog_q + k.q * p, k.q * q}, {k.p * p, k.m * (1.0 - 2.0 * p / k.k_p) + k.p * q}}};
        break;
    case Family::PPClassic:
        j.v = {{{dlog_q - k.q * p, -k.q * q}, {k.p * p, -k.m + k.p * q}}};
        break;
    case Family::CompClassic:
        j.v = {{{dlog_q - k.q * p, -k.q * q}, {-k.p * p, k.m * (1.0 - 2.0 * p / k.k_p) - k.p * q}}};
        break;
    }
    return j;
}

// --- rescaling ---------------------------------------------------------------------

ScaleMap scale_map(const DimParams& k) {
    require_herd(k.family);
    switch (k.family) {
    case Family::SymbHerd:
    case Family::CompHerd:
        if (k.q <= 0.0) throw DomainError("rescaling undefined: q must be > 0");
        return {k.k_q, 0.5, k.k_p, 0.5, k.q * std::sqrt(k.k_p) / (2.0 * std::sqrt(k.k_q))};
    case Family::PPPackIndiv:
        if (k.q <= 0.0) throw DomainError("rescaling undefined: q must be > 0");
        if (k.m <= 0.0) throw DomainError("rescaling undefined: m must be > 0");
        // X = Q/K has no square root here, unlike the other three families.
        return {k.k(), 1.0, (k.m * k.m) / (k.q * k.q), 0.5, k.m};
    case Family::PPPackHerd:
        if (k.q <= 0.0) throw DomainError("rescaling undefined: q must be > 0");
        if (k.m <= 0.0) throw DomainError("rescaling undefined: m must be > 0");
        return {k.k(), 0.5, 4.0 * k.m * k.m * k.k() / (k.q * k.q), 0.5, k.m};
    default: break;
    }
    return {};
}

Rescaled to_nondim(const DimParams& k) {
    const ScaleMap map = scale_map(k);
    NondimParams n;
    switch (k.family) {
    case Family::SymbHerd:
    case Family::CompHerd: {
        const double ratio = std::sqrt(k.k_q) / (k.q * std::sqrt(k.k_p));
        n = k.family == Family::SymbHerd ? NondimParams::symbiosis(0, 0, 0)
                                         : NondimParams::competition(0, 0, 0);
        n.a = (k.k_q / k.k_p) * (k.p / k.q);
        n.b = k.r * ratio;
        n.c = k.m * ratio;
        break;
    }
    case Family::PPPackIndiv:
        n = NondimParams::pack_individual(k.r / k.m, k.p * k.q * k.k() / (2.0 * k.m * k.m));
        break;
    case Family::PPPackHerd:
        n = NondimParams::pack_herd(k.r / (2.0 * k.m), k.p * k.q / (4.0 * k.m * k.m));
        break;
    default: break;
    }
    return {n, map};
}

DimParams from_nondim(const NondimParams& n, const RescaleConvention& conv) {
    n.validate();
    DimParams k;
    k.family = n.family;
    k.m = conv.m;
    k.k_q = conv.k_q;
    k.k_p = conv.k_p;
    switch (n.family) {
    case Family::SymbHerd:
    case Family::CompHerd: {
        if (n.c <= 0.0) throw DomainError("cannot recover q from c = 0");
        k.q = conv.m * std::sqrt(conv.k_q) / (n.c * std::sqrt(conv.k_p));
        k.r = n.b * k.q * std::sqrt(conv.k_p) / std::sqrt(conv.k_q);
        k.p = n.a * k.q * conv.k_p / conv.k_q;
        break;
    }
    case Family::PPPackIndiv:
        k.q = conv.q;
        k.r = n.b * conv.m;
        k.p = 2.0 * n.c * conv.m * conv.m / (conv.q * conv.k_q);
        break;
    case Family::PPPackHerd:
        k.q = conv.q;
        k.r = 2.0 * n.e * conv.m;
        k.p = 4.0 * n.f * conv.m * conv.m / conv.q;
        break;
    default: break;
    }
    return k;
}

namespace {

double forward(double value, double unit, double exponent) {
    const double ratio = value / unit;
    if (exponent == 0.5) return std::sqrt(ratio);
    if (exponent == 1.0) return ratio;
    return std::pow(ratio, exponent);
}

double backward(double value, double unit, double exponent) {
    if (exponent == 0.5) return unit * value * value;
    if (exponent == 1.0) return unit * value;
    return unit * std::pow(value, 1.0 / exponent);
}

}  // namespace

State map_state(const ScaleMap& map, const State& s, MapDirection direction) {
    if (direction == MapDirection::ToNondim) {
        require_state(s, Representation::Dimensional);
        return State::nondim(forward(s.first, map.q_unit, map.q_exponent),
                             forward(s.second, map.p_unit, map.p_exponent));
    }
    require_state(s, Representation::Nondimensional);
    return State::dimensional(backward(s.first, map.q_unit, map.q_exponent),
                              backward(s.second, map.p_unit, map.p_exponent));
}

double map_time(const ScaleMap& map, double time, MapDirection direction) {
    return direction == MapDirection::ToNondim ? time * map.time_scale : time / map.time_scale;
}

}  // namespace herd
