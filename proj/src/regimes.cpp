#include "herd/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "herd/equilibria.hpp"

namespace herd {

namespace {

bool near(double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

// A coexistence point on an axis (e.g. f = 0) does not count.
bool interior_stable(const Equilibrium& eq) {
    return eq.feasible && eq.location.first > 0.0 && eq.location.second > 0.0 &&
           is_stable(eq.classification);
}

bool any_stable(const std::vector<Equilibrium>& eqs) {
    return std::any_of(eqs.begin(), eqs.end(),
                       [](const Equilibrium& eq) { return interior_stable(eq); });
}

}  // namespace

std::string_view to_string(Regime regime) {
    switch (regime) {
    case Regime::OriginStable_CoexistInfeasible: return "OriginStable_CoexistInfeasible";
    case Regime::TranscriticalPoint: return "TranscriticalPoint";
    case Regime::CoexistStable_LowE: return "CoexistStable_LowE";
    case Regime::CoexistStable_HighE: return "CoexistStable_HighE";
    case Regime::HopfPoint: return "HopfPoint";
    case Regime::CoexistUnstable_Band: return "CoexistUnstable_Band";
    case Regime::CoexistInfeasible_OriginUnstable: return "CoexistInfeasible_OriginUnstable";
    case Regime::CompNoCoexistence: return "CompNoCoexistence";
    case Regime::CompBoundary: return "CompBoundary";
    case Regime::CompSingle: return "CompSingle";
    case Regime::CompTriple: return "CompTriple";
    case Regime::CoexistGloballyStable: return "CoexistGloballyStable";
    }
    return "unknown";
}

std::string_view to_string(BifurcationKind kind) {
    switch (kind) {
    case BifurcationKind::Transcritical: return "Transcritical";
    case BifurcationKind::Hopf: return "Hopf";
    case BifurcationKind::Pitchfork: return "Pitchfork";
    }
    return "unknown";
}

std::string_view to_string(SweepMode mode) {
    return mode == SweepMode::Analytic ? "analytic" : "numeric";
}

std::string_view to_string(NumericOutcome outcome) {
    switch (outcome) {
    case NumericOutcome::Coexistence: return "Coexistence";
    case NumericOutcome::Oscillation: return "Oscillation";
    case NumericOutcome::Collapse: return "Collapse";
    case NumericOutcome::Undecided: return "Undecided";
    }
    return "unknown";
}

std::optional<Bifurcation> RegimeReport::find(BifurcationKind kind) const {
    for (const auto& b : bifurcations) {
        if (b.kind == kind) return b;
    }
    return std::nullopt;
}

RegimeReport pp2_regime(double e, double f) {
    RegimeReport report;
    report.params = NondimParams::pack_herd(e, f);
    report.params.validate();

    const double e_star = 2.0 * f;
    const double e_dag = 3.0 * f - 0.25;
    const bool has_hopf = f > 0.25 && !near(f, 0.25);
    report.bifurcations.push_back({BifurcationKind::Transcritical, e_star, e - e_star});
    if (has_hopf) report.bifurcations.push_back({BifurcationKind::Hopf, e_dag, e - e_dag});

    if (near(e, e_star)) {
        report.regime = Regime::TranscriticalPoint;
        report.notes.emplace_back("coexistence point coincides with the origin");
        return report;
    }
    if (e < e_star) {
        if (e < 0.5 && !near(e, 0.5)) {
            report.regime = Regime::OriginStable_CoexistInfeasible;
        } else {
            report.regime = Regime::CoexistInfeasible_OriginUnstable;
            if (near(e, 0.5)) report.notes.emplace_back("origin has a zero-trace linearization");
        }
        return report;
    }

    if (has_hopf && std::abs(e - e_dag) < kHopfBand) {
        report.regime = Regime::HopfPoint;
    } else if (has_hopf && e < e_dag) {
        report.regime = Regime::CoexistUnstable_Band;
    } else if (e < 0.5) {
        report.regime = Regime::CoexistStable_LowE;
    } else {
        report.regime = Regime::CoexistStable_HighE;
    }
    if (e > 0.0) report.stable_coexistence = interior_stable(pp2_coexistence(e, f));
    return report;
}

RegimeReport classify_regime(const NondimParams& params) {
    params.validate();
    if (params.family == Family::PPPackHerd) return pp2_regime(params.e, params.f);

    RegimeReport report;
    report.params = params;
    if (params.family == Family::CompHerd) {
        const double bc = params.b * params.c;
        report.bifurcations.push_back({BifurcationKind::Transcritical, bc, bc - params.a});
        if (near(params.a, bc)) {
            report.regime = Regime::CompBoundary;
            report.notes.emplace_back("a = bc treated as infeasible");
            return report;
        }
        if (params.a > bc) {
            report.regime = Regime::CompNoCoexistence;
            return report;
        }
        const CompetitionRoots roots = comp_coexistence(params.a, params.b, params.c);
        std::size_t count = 0;
        for (const auto& eq : roots.equilibria) count += eq.merged ? 2 : 1;
        report.regime = count == 1 ? Regime::CompSingle : Regime::CompTriple;
        report.stable_coexistence = any_stable(roots.equilibria);
        return report;
    }

    report.regime = Regime::CoexistGloballyStable;
    report.stable_coexistence = any_stable(coexistence_equilibria(params));
    return report;
}

bool origin_collapse_predicate(const DimParams& k, const State& s) {
    if (s.rep != Representation::Dimensional) throw UsageError("origin_collapse_predicate needs a dimensional state");
    if (!(s.first > 0.0) || !(s.second > 0.0)) return false;
    const double ratio = std::sqrt(s.first / s.second);
    const double prey_side = k.m / k.p;     // +inf when p = 0
    const double predator_side = k.q / k.r; // +inf when r = 0
    switch (k.family) {
    case Family::CompHerd: return prey_side < ratio && ratio < predator_side;
    case Family::PPPackHerd: return ratio < std::min(prey_side, predator_side);
    default: return false;
    }
}

ExtinctionVerdict extinction_set(const DimParams& k, const State& s0) {
    if (k.family != Family::PPPackHerd) throw UsageError("extinction_set applies to PP_PackHerd only");
    if (s0.rep != Representation::Dimensional) throw UsageError("extinction_set needs a dimensional state");
    if (!(s0.first > 0.0) || !(s0.second > 0.0)) throw DomainError("Q0 and P0 must be > 0");
    if (!(k.q > 0.0)) throw DomainError("q must be > 0");
    ExtinctionVerdict verdict;
    const double rate = k.m + k.r;
    verdict.in_xi = s0.second > s0.first * rate * rate / (k.q * k.q);
    if (verdict.in_xi) {
        verdict.tau_star = -(2.0 / rate) * std::log(1.0 - rate * std::sqrt(s0.first) / (k.q * std::sqrt(s0.second)));
    }
    return verdict;
}

// --- sweeps ------------------------------------------------------------------

std::vector<double> SweepAxis::values() const {
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
    }
    return out;
}

void set_parameter(NondimParams& params, std::string_view name, double value) {
    const bool abc = params.family == Family::SymbHerd || params.family == Family::CompHerd;
    const bool bc_only = params.family == Family::PPPackIndiv;
    if (name == "a" && abc) params.a = value;
    else if (name == "b" && (abc || bc_only)) params.b = value;
    else if (name == "c" && (abc || bc_only)) params.c = value;
    else if (name == "e" && params.family == Family::PPPackHerd) params.e = value;
    else if (name == "f" && params.family == Family::PPPackHerd) params.f = value;
    else {
        throw UsageError("unknown parameter '" + std::string(name) + "' for family " +
                         std::string(to_string(params.family)));
    }
}

void SweepSpec::validate() const {
    base.validate();
    for (const SweepAxis* axis : {&axis1, &axis2}) {
        NondimParams probe = base;
        set_parameter(probe, axis->parameter, axis->lo);
        if (!(axis->lo >= 0.0) || !(axis->hi > axis->lo)) {
            throw DomainError("sweep range for '" + axis->parameter + "' must satisfy 0 <= lo < hi");
        }
        if (axis->steps < 2) throw DomainError("sweep steps for '" + axis->parameter + "' must be >= 2");
    }
    if (axis1.parameter == axis2.parameter) throw UsageError("sweep axes must differ");
    if (!(start_x > 0.0) || !(start_y > 0.0)) throw DomainError("sweep start must be interior");
    integrator.validate();
}

NumericOutcome numeric_outcome(const NondimParams& params, const State& s0, const IntegratorConfig& cfg) {
    SettleResult result;
    try {
        result = settle(params, s0, cfg);
    } catch (const IntegrationError&) {
        return NumericOutcome::Undecided;
    }
    if (result.state.first == 0.0 || result.state.second == 0.0) return NumericOutcome::Collapse;
    if (result.settled) return NumericOutcome::Coexistence;
    switch (detect_oscillation(result.trajectory).kind) {
    case OscillationKind::Sustained: return NumericOutcome::Oscillation;
    case OscillationKind::Damped: return NumericOutcome::Coexistence;
    case OscillationKind::None: break;
    }
    return NumericOutcome::Undecided;
}

SweepResult sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    result.spec = spec;
    const auto v1 = spec.axis1.values();
    const auto v2 = spec.axis2.values();
    result.cells.reserve(v1.size() * v2.size());
    for (std::size_t i = 0; i < v1.size(); ++i) {
        for (std::size_t j = 0; j < v2.size(); ++j) {
            NondimParams params = spec.base;
            set_parameter(params, spec.axis1.parameter, v1[i]);
            set_parameter(params, spec.axis2.parameter, v2[j]);
            SweepCell cell;
            cell.i1 = i;
            cell.i2 = j;
            cell.v1 = v1[i];
            cell.v2 = v2[j];
            cell.report = classify_regime(params);
            if (spec.mode == SweepMode::Numeric) {
                cell.outcome =
                    numeric_outcome(params, State::nondim(spec.start_x, spec.start_y), spec.integrator);
            }
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

const SweepCell& SweepResult::at(std::size_t i1, std::size_t i2) const {
    return cells.at(i1 * static_cast<std::size_t>(spec.axis2.steps) + i2);
}

Agreement cross_mode_agreement(const SweepResult& numeric) {
    if (numeric.spec.mode != SweepMode::Numeric) throw UsageError("cross_mode_agreement needs a numeric sweep");
    Agreement agreement;
    const auto n1 = static_cast<std::ptrdiff_t>(numeric.spec.axis1.steps);
    const auto n2 = static_cast<std::ptrdiff_t>(numeric.spec.axis2.steps);
    for (const auto& cell : numeric.cells) {
        bool near_threshold = false;
        for (std::ptrdiff_t di = -1; di <= 1 && !near_threshold; ++di) {
            for (std::ptrdiff_t dj = -1; dj <= 1; ++dj) {
                const auto i = static_cast<std::ptrdiff_t>(cell.i1) + di;
                const auto j = static_cast<std::ptrdiff_t>(cell.i2) + dj;
                if (i < 0 || j < 0 || i >= n1 || j >= n2) continue;
                const auto& other = numeric.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                if (other.report.regime != cell.report.regime ||
                    other.report.stable_coexistence != cell.report.stable_coexistence) {
                    near_threshold = true;
                    break;
                }
            }
        }
        if (near_threshold || cell.report.regime == Regime::HopfPoint ||
            cell.report.regime == Regime::TranscriticalPoint) {
            ++agreement.excluded;
            continue;
        }
        ++agreement.compared;
        const bool numeric_stable = cell.outcome == NumericOutcome::Coexistence;
        if (numeric_stable == cell.report.stable_coexistence &&
            cell.outcome != NumericOutcome::Undecided) {
            ++agreement.agreed;
        }
    }
    return agreement;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    auto number = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    out << "axis1,axis2,regime,dist_transcritical,dist_hopf\n";
    for (const auto& cell : result.cells) {
        const auto tc = cell.report.find(BifurcationKind::Transcritical);
        const auto hopf = cell.report.find(BifurcationKind::Hopf);
        out << number(cell.v1) << ',' << number(cell.v2) << ','
            << (cell.outcome ? to_string(*cell.outcome) : to_string(cell.report.regime)) << ','
            << (tc ? number(tc->distance) : std::string()) << ','
            << (hopf ? number(hopf->distance) : std::string()) << '\n';
    }
}

}  // namespace herd
