#include "herd/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace herd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be > 0");
    }
}

Equilibrium make(State location, EquilibriumKind kind, const StabilityInfo& info, bool feasible = true) {
    Equilibrium eq;
    eq.location = location;
    eq.kind = kind;
    eq.eigenvalues = info.eigenvalues;
    eq.classification = info.classification;
    eq.feasible = feasible;
    return eq;
}

Equilibrium infeasible(State location, EquilibriumKind kind) {
    StabilityInfo info;
    info.eigenvalues = {std::complex<double>(kNaN, 0.0), std::complex<double>(kNaN, 0.0)};
    return make(location, kind, info, false);
}

/// Axis point of a herd family: `along` is the logistic eigenvalue along
/// the axis; the absent population's edge term decides the transverse
/// direction. With zero coupling the field is smooth there and
/// `smooth_transverse` is used instead.
StabilityInfo axis_stability(double along, double coupling, double smooth_transverse) {
    const double transverse = coupling > 0.0 ? kInf : coupling < 0.0 ? -kInf : smooth_transverse;
    StabilityInfo info;
    info.eigenvalues = {std::complex<double>(along, 0.0), std::complex<double>(transverse, 0.0)};
    if (along < 0.0 && transverse < 0.0) {
        info.classification = Classification::StableNode;
    } else if (along > 0.0 && transverse > 0.0) {
        info.classification = Classification::UnstableNode;
    } else if (along == 0.0 || transverse == 0.0) {
        info.classification = Classification::Degenerate;
    } else {
        info.classification = Classification::Saddle;
    }
    return info;
}

// Jacobian of dQ = r(1-Q/K)Q - q sqrt(Q) P, dP = -mP + p sqrt(Q) P.
Matrix2 herd_prey_jacobian(const DimParams& k, double q, double p) {
    const double sq = std::sqrt(q);
    Matrix2 j;
    j.v = {{{k.r * (1.0 - 2.0 * q / k.k()) - k.q * p / (2.0 * sq), -k.q * sq},
            {k.p * p / (2.0 * sq), -k.m + k.p * sq}}};
    return j;
}

}  // namespace

std::string_view to_string(EquilibriumKind kind) {
    switch (kind) {
    case EquilibriumKind::Origin: return "Origin";
    case EquilibriumKind::AxisQ: return "AxisQ";
    case EquilibriumKind::AxisP: return "AxisP";
    case EquilibriumKind::Coexistence: return "Coexistence";
    }
    return "unknown";
}

std::string_view to_string(Classification c) {
    switch (c) {
    case Classification::StableNode: return "StableNode";
    case Classification::StableFocus: return "StableFocus";
    case Classification::UnstableNode: return "UnstableNode";
    case Classification::UnstableFocus: return "UnstableFocus";
    case Classification::Saddle: return "Saddle";
    case Classification::Center: return "Center";
    case Classification::Degenerate: return "Degenerate";
    }
    return "unknown";
}

bool is_stable(Classification c) {
    return c == Classification::StableNode || c == Classification::StableFocus;
}

StabilityInfo classify(const Matrix2& j, double tol) {
    const double tr = j.trace();
    const double det = j.det();
    const double disc = tr * tr - 4.0 * det;
    StabilityInfo info;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // Avoid cancellation in the smaller root.
        const double big = tr >= 0.0 ? 0.5 * (tr + s) : 0.5 * (tr - s);
        const double small = big != 0.0 ? det / big : 0.5 * (tr >= 0.0 ? tr - s : tr + s);
        info.eigenvalues = {std::complex<double>(std::max(big, small), 0.0),
                            std::complex<double>(std::min(big, small), 0.0)};
    } else {
        const double im = 0.5 * std::sqrt(-disc);
        info.eigenvalues = {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
    }

    const double re0 = info.eigenvalues[0].real();
    const double re1 = info.eigenvalues[1].real();
    if (std::abs(re0) <= tol || std::abs(re1) <= tol) {
        info.classification = Classification::Degenerate;
    } else if (det < 0.0) {
        info.classification = Classification::Saddle;
    } else if (disc < 0.0) {
        info.classification = tr < 0.0 ? Classification::StableFocus : Classification::UnstableFocus;
    } else {
        info.classification = tr < 0.0 ? Classification::StableNode : Classification::UnstableNode;
    }
    return info;
}

// --- boundary ------------------------------------------------------------------------

std::vector<Equilibrium> boundary_equilibria(const NondimParams& k) {
    k.validate();
    std::vector<Equilibrium> out;
    const State origin = State::nondim(0.0, 0.0);
    out.push_back(make(origin, EquilibriumKind::Origin, classify(jacobian_nondim(k, origin))));

    const State x_axis = State::nondim(1.0, 0.0);
    switch (k.family) {
    case Family::SymbHerd:
        out.push_back(make(x_axis, EquilibriumKind::AxisQ, axis_stability(-2.0 * k.b, k.a, k.c)));
        out.push_back(make(State::nondim(0.0, 1.0), EquilibriumKind::AxisP,
                           axis_stability(-2.0 * k.c, 1.0, k.b)));
        break;
    case Family::CompHerd:
        out.push_back(make(x_axis, EquilibriumKind::AxisQ, axis_stability(-2.0 * k.b, -k.a, k.c)));
        out.push_back(make(State::nondim(0.0, 1.0), EquilibriumKind::AxisP,
                           axis_stability(-2.0 * k.c, -1.0, k.b)));
        break;
    case Family::PPPackIndiv:
        out.push_back(make(x_axis, EquilibriumKind::AxisQ, axis_stability(-k.b, k.c, -0.5)));
        break;
    case Family::PPPackHerd:
        out.push_back(make(x_axis, EquilibriumKind::AxisQ, axis_stability(-2.0 * k.e, k.f, -0.5)));
        break;
    default: break;
    }
    return out;
}

std::vector<Equilibrium> boundary_equilibria(const DimParams& k) {
    k.validate();
    if (is_herd(k.family)) return boundary_equilibria(to_nondim(k).params);

    std::vector<Equilibrium> out;
    auto add = [&](State s, EquilibriumKind kind) {
        out.push_back(make(s, kind, classify(jacobian_dimensional(k, s))));
    };
    add(State::dimensional(0.0, 0.0), EquilibriumKind::Origin);
    add(State::dimensional(k.k_q, 0.0), EquilibriumKind::AxisQ);
    if (k.family != Family::PPClassic) add(State::dimensional(0.0, k.k_p), EquilibriumKind::AxisP);
    return out;
}

// --- coexistence ------------------------------------------------------------------------

Equilibrium symb_coexistence(double a, double b, double c) {
    require_positive(a, "a");
    require_positive(b, "b");
    require_positive(c, "c");
    // On X > 1 the X-nullcline gives Y = b(X^2 - 1)X > 0; the remaining
    // condition is X = (c/a)(Y^2 - 1)Y.
    auto y_of = [&](double x) { return b * (x * x - 1.0) * x; };
    auto residual = [&](double x) {
        const double y = y_of(x);
        return (c / a) * (y * y - 1.0) * y - x;
    };
    double lo = 1.0;
    double hi = 2.0;
    int expansions = 0;
    while (residual(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 200) throw std::runtime_error("symbiosis bracket expansion failed");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (residual(mid) > 0.0 ? hi : lo) = mid;
    }
    const double x = 0.5 * (lo + hi);
    const NondimParams k = NondimParams::symbiosis(a, b, c);
    const State s = State::nondim(x, y_of(x));
    return make(s, EquilibriumKind::Coexistence, classify(jacobian_nondim(k, s)));
}

Equilibrium pp1_coexistence(double b, double c) {
    require_positive(b, "b");
    if (!(c >= 0.0)) throw DomainError("c must be >= 0");
    const double denom = b + 2.0 * c;
    const State s = State::nondim(b / denom, 2.0 * b * c / denom);
    return make(s, EquilibriumKind::Coexistence,
                classify(jacobian_nondim(NondimParams::pack_individual(b, c), s)));
}

Equilibrium pp2_coexistence(double e, double f) {
    require_positive(e, "e");
    if (!(f >= 0.0)) throw DomainError("f must be >= 0");
    if (e < 2.0 * f) return infeasible(State::nondim(kNaN, kNaN), EquilibriumKind::Coexistence);
    const double x = std::sqrt((e - 2.0 * f) / e);
    const State s = State::nondim(x, 2.0 * f * x);
    return make(s, EquilibriumKind::Coexistence,
                classify(jacobian_nondim(NondimParams::pack_herd(e, f), s)));
}

std::array<double, 9> competition_polynomial(double a, double b, double c) {
    const double cb3 = c * b * b * b;
    return {cb3, 0.0, -3.0 * cb3, 0.0, 3.0 * cb3, 0.0, -c * b * (b * b + 1.0), 0.0, c * b - a};
}

double eval_competition_polynomial(double a, double b, double c, double x) {
    double acc = 0.0;
    for (const double coef : competition_polynomial(a, b, c)) acc = acc * x + coef;
    return acc;
}

CompetitionRoots comp_coexistence(double a, double b, double c) {
    require_positive(a, "a");
    require_positive(b, "b");
    require_positive(c, "c");
    CompetitionRoots out;
    const double bc = b * c;
    if (std::abs(a - bc) <= 1e-12 * std::max(a, bc)) {
        out.on_boundary = true;
        return out;
    }
    if (a > bc) return out;

    auto poly = [&](double x) { return eval_competition_polynomial(a, b, c, x); };
    auto bisect = [&](double lo, double hi) {
        double plo = poly(lo);
        for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double pm = poly(mid);
            if (pm == 0.0) return mid;
            if ((pm > 0.0) == (plo > 0.0)) {
                lo = mid;
                plo = pm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    constexpr int kGrid = 10000;
    std::vector<double> xs(kGrid + 1), ps(kGrid + 1);
    for (int i = 0; i <= kGrid; ++i) {
        xs[i] = static_cast<double>(i) / kGrid;
        ps[i] = poly(xs[i]);
    }
    const double scale = std::max(1.0, std::abs(c * b * b * b));
    // Roots with the merged flag for double roots found by minimization.
    std::vector<std::pair<double, bool>> roots;
    for (int i = 0; i < kGrid; ++i) {
        if (ps[i] == 0.0 && i > 0) {
            roots.emplace_back(xs[i], false);
        } else if ((ps[i] > 0.0) != (ps[i + 1] > 0.0) && ps[i + 1] != 0.0) {
            roots.emplace_back(bisect(xs[i], xs[i + 1]), false);
        } else if (i > 0 && std::abs(ps[i]) <= std::abs(ps[i - 1]) &&
                   std::abs(ps[i]) <= std::abs(ps[i + 1]) && (ps[i] > 0.0) == (ps[i - 1] > 0.0) &&
                   (ps[i] > 0.0) == (ps[i + 1] > 0.0)) {
            // |P| dips without a sign change on the grid: look for a pair of
            // close roots or a tangency inside [x_{i-1}, x_{i+1}].
            const double sign = ps[i] > 0.0 ? 1.0 : -1.0;
            double lo = xs[i - 1], hi = xs[i + 1];
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            double f1 = sign * poly(x1), f2 = sign * poly(x2);
            for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
                if (f1 < f2) {
                    hi = x2; x2 = x1; f2 = f1;
                    x1 = hi - g * (hi - lo); f1 = sign * poly(x1);
                } else {
                    lo = x1; x1 = x2; f1 = f2;
                    x2 = lo + g * (hi - lo); f2 = sign * poly(x2);
                }
            }
            const double xm = 0.5 * (lo + hi);
            const double fm = sign * poly(xm);
            if (fm < 0.0) {
                roots.emplace_back(bisect(xs[i - 1], xm), false);
                roots.emplace_back(bisect(xm, xs[i + 1]), false);
            } else if (fm <= 1e-12 * scale) {
                roots.emplace_back(xm, true);
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    for (const auto& r : roots) out.raw_roots.push_back(r.first);

    // Merge roots closer than 1e-6: the nullclines are (nearly) tangent.
    std::vector<std::pair<double, int>> merged;  // (abscissa, multiplicity)
    for (const auto& [x, is_double] : roots) {
        const int mult = is_double ? 2 : 1;
        if (!merged.empty() && x - merged.back().first < 1e-6) {
            auto& last = merged.back();
            last.first = 0.5 * (last.first + x);
            last.second += mult;
        } else {
            merged.emplace_back(x, mult);
        }
    }

    const NondimParams k = NondimParams::competition(a, b, c);
    int count = 0;
    for (const auto& [x, mult] : merged) {
        const double y = b * (1.0 - x * x) * x;
        if (!(y > 0.0 && y < 1.0)) continue;
        if (std::abs(c * (1.0 - y * y) * y - a * x) >= 1e-9) continue;
        const State s = State::nondim(x, y);
        Equilibrium eq = make(s, EquilibriumKind::Coexistence, classify(jacobian_nondim(k, s)));
        if (mult > 1) {
            eq.merged = true;
            eq.classification = Classification::Degenerate;
        }
        out.equilibria.push_back(eq);
        count += mult;
    }
    if (count != 1 && count != 3) {
        throw ConsistencyError("competition root count " + std::to_string(count) +
                                   " violates the 1-or-3 law",
                               out.raw_roots);
    }
    return out;
}

Equilibrium classical_coexistence(const DimParams& k) {
    k.validate();
    auto finish = [&](double q, double p, bool feasible) {
        const State s = State::dimensional(q, p);
        if (!feasible || !(q >= 0.0) || !(p >= 0.0)) {
            Equilibrium eq = infeasible(State::dimensional(q, p), EquilibriumKind::Coexistence);
            return eq;
        }
        return make(s, EquilibriumKind::Coexistence, classify(jacobian_dimensional(k, s)));
    };
    switch (k.family) {
    case Family::SymbClassic: {
        // From the straight nullclines r(1 - Q/K_Q) + qP = 0 and
        // m(1 - P/K_P) + pQ = 0.
        const double denom = k.r * k.m - k.p * k.q * k.k_p * k.k_q;
        if (denom == 0.0) return finish(kInf, kInf, false);
        const double q = k.k_q * k.m * (k.r + k.q * k.k_p) / denom;
        const double p = k.k_p * k.r * (k.m + k.p * k.k_q) / denom;
        return finish(q, p, denom > 0.0);
    }
    case Family::PPClassic: {
        if (k.p <= 0.0 || k.q <= 0.0) return finish(kNaN, kNaN, false);
        const double q = k.m / k.p;
        const double p = (k.r / k.q) * (1.0 - k.m / (k.p * k.k()));
        return finish(q, p, k.p * k.k() > k.m);
    }
    case Family::CompClassic: {
        // (r/K_Q) Q + q P = r,  p Q + (m/K_P) P = m
        const double det = (k.r / k.k_q) * (k.m / k.k_p) - k.p * k.q;
        if (det == 0.0) return finish(kNaN, kNaN, false);
        const double q = (k.r * k.m / k.k_p - k.q * k.m) / det;
        const double p = (k.r / k.k_q * k.m - k.p * k.r) / det;
        return finish(q, p, q > 0.0 && p > 0.0);
    }
    default:
        throw UsageError("classical_coexistence needs a classical family, got " +
                         std::string(to_string(k.family)));
    }
}

Equilibrium herd_prey_individual_predator_equilibrium(const DimParams& k) {
    require_positive(k.p, "p");
    require_positive(k.q, "q");
    require_positive(k.k(), "K");
    const double ratio = k.m / k.p;
    const double q = ratio * ratio;
    const double p = (k.m * k.r / (k.p * k.q)) * (1.0 - q / k.k());
    const bool feasible = q < k.k();
    if (!feasible || q <= 0.0) {
        Equilibrium eq = infeasible(State::dimensional(q, p), EquilibriumKind::Coexistence);
        return eq;
    }
    return make(State::dimensional(q, p), EquilibriumKind::Coexistence,
                classify(herd_prey_jacobian(k, q, p)));
}

State pack_coexistence_dimensional(const DimParams& k) {
    switch (k.family) {
    case Family::PPPackIndiv: {
        const double frac = k.m * k.r / (k.m * k.r + k.p * k.q * k.k());
        const double gain = k.p / k.m;
        return {k.k() * frac, gain * gain * k.k() * k.k() * frac * frac, Representation::Dimensional};
    }
    case Family::PPPackHerd: {
        const double frac = 1.0 - k.p * k.q / (k.m * k.r);
        const double gain = k.p / k.m;
        return {k.k() * frac, gain * gain * k.k() * frac, Representation::Dimensional};
    }
    default:
        throw UsageError("pack_coexistence_dimensional needs a pack-hunting family");
    }
}

std::vector<Equilibrium> coexistence_equilibria(const NondimParams& k) {
    k.validate();
    switch (k.family) {
    case Family::SymbHerd: return {symb_coexistence(k.a, k.b, k.c)};
    case Family::PPPackIndiv: return {pp1_coexistence(k.b, k.c)};
    case Family::PPPackHerd: {
        Equilibrium eq = pp2_coexistence(k.e, k.f);
        if (!eq.feasible) return {};
        return {eq};
    }
    case Family::CompHerd: return comp_coexistence(k.a, k.b, k.c).equilibria;
    default: return {};
    }
}

std::vector<Equilibrium> all_equilibria(const ModelSpec& model) {
    std::vector<Equilibrium> out;
    if (const auto* dim = std::get_if<DimParams>(&model); dim && !is_herd(dim->family)) {
        out = boundary_equilibria(*dim);
        out.push_back(classical_coexistence(*dim));
        return out;
    }
    const NondimParams k = std::holds_alternative<DimParams>(model)
                               ? to_nondim(std::get<DimParams>(model)).params
                               : std::get<NondimParams>(model);
    out = boundary_equilibria(k);
    if (k.family == Family::PPPackHerd) {
        out.push_back(pp2_coexistence(k.e, k.f));
    } else {
        for (auto& eq : coexistence_equilibria(k)) out.push_back(eq);
    }
    return out;
}

}  // namespace herd
