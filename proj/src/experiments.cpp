#include "herd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace herd {

// --- basins ------------------------------------------------------------------

std::string_view to_string(BasinLabel label) {
    switch (label) {
    case BasinLabel::AxisQ: return "AxisQ";
    case BasinLabel::AxisP: return "AxisP";
    case BasinLabel::Coexistence: return "Coexistence";
    case BasinLabel::Origin: return "Origin";
    case BasinLabel::Undecided: return "Undecided";
    }
    return "unknown";
}

BasinGrid BasinGrid::refined(int factor) const {
    BasinGrid out = *this;
    out.nq *= factor;
    out.np *= factor;
    return out;
}

void BasinGrid::validate() const {
    if (!(q_lo >= 0.0) || !(p_lo >= 0.0)) throw DomainError("basin grid must lie in the first quadrant");
    if (!(q_hi > q_lo) || !(p_hi > p_lo)) throw DomainError("basin grid ranges must be nonempty");
    if (nq < 1 || np < 1) throw DomainError("basin grid resolution must be >= 1");
}

BasinGrid default_basin_grid(const DimParams& params) {
    BasinGrid grid;
    grid.q_hi = 1.2 * params.k_q;
    grid.p_hi = 1.2 * (params.uses_k_p() ? params.k_p : params.k_q);
    return grid;
}

std::size_t BasinMap::count(BasinLabel label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::size_t BasinMap::non_origin_labels() const {
    std::size_t n = 0;
    for (const BasinLabel label : {BasinLabel::AxisQ, BasinLabel::AxisP, BasinLabel::Coexistence}) {
        if (count(label) > 0) ++n;
    }
    return n;
}

BasinMap basin_map(const DimParams& params, const BasinGrid& grid, const BasinOptions& options) {
    params.validate();
    grid.validate();
    if (!is_herd(params.family)) throw UsageError("basin_map needs a herd family");
    options.integrator.validate();

    const Rescaled rescaled = to_nondim(params);
    const NondimParams& nd = rescaled.params;

    // Candidate attractors: stable boundary points, stable coexistence
    // points, and the origin.
    std::vector<Attractor> candidates;
    for (const auto& eq : boundary_equilibria(nd)) {
        if (eq.kind == EquilibriumKind::Origin) continue;
        if (!is_stable(eq.classification)) continue;
        candidates.push_back({eq.kind == EquilibriumKind::AxisQ ? BasinLabel::AxisQ : BasinLabel::AxisP, eq});
    }
    for (const auto& eq : coexistence_equilibria(nd)) {
        if (eq.feasible && is_stable(eq.classification)) candidates.push_back({BasinLabel::Coexistence, eq});
    }
    candidates.push_back({BasinLabel::Origin, boundary_equilibria(nd).front()});

    BasinMap map;
    map.params = params;
    map.grid = grid;
    map.labels.resize(static_cast<std::size_t>(grid.nq) * static_cast<std::size_t>(grid.np));
    std::vector<bool> used(candidates.size(), false);

    for (int i = 0; i < grid.nq; ++i) {
        for (int j = 0; j < grid.np; ++j) {
            const State s0 = map_state(rescaled.map, State::dimensional(grid.q_center(i), grid.p_center(j)),
                                       MapDirection::ToNondim);
            BasinLabel label = BasinLabel::Undecided;
            try {
                const SettleResult settled = settle(nd, s0, options.integrator);
                double best = options.match_radius;
                for (std::size_t c = 0; c < candidates.size(); ++c) {
                    const State& at = candidates[c].equilibrium.location;
                    const double d = std::hypot(settled.state.first - at.first, settled.state.second - at.second);
                    if (d < best) {
                        best = d;
                        label = candidates[c].label;
                    }
                }
                for (std::size_t c = 0; c < candidates.size(); ++c) {
                    if (candidates[c].label == label && label != BasinLabel::Undecided) used[c] = true;
                }
            } catch (const IntegrationError&) {
                label = BasinLabel::Undecided;
            }
            map.labels[static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.np) + static_cast<std::size_t>(j)] =
                label;
        }
    }
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (used[c]) map.attractors.push_back(candidates[c]);
    }
    return map;
}

RefinementReport compare_refinement(const BasinMap& coarse, const BasinMap& fine, int factor) {
    if (fine.grid.nq != coarse.grid.nq * factor || fine.grid.np != coarse.grid.np * factor) {
        throw UsageError("fine grid is not a refinement of the coarse grid");
    }
    RefinementReport report;
    const int nq = coarse.grid.nq;
    const int np = coarse.grid.np;
    for (int i = 0; i < nq; ++i) {
        for (int j = 0; j < np; ++j) {
            const BasinLabel label = coarse.at(i, j);
            bool boundary = false;
            for (int di = -1; di <= 1 && !boundary; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    const int a = i + di;
                    const int b = j + dj;
                    if (a < 0 || b < 0 || a >= nq || b >= np) continue;
                    if (coarse.at(a, b) != label) {
                        boundary = true;
                        break;
                    }
                }
            }
            if (boundary) {
                ++report.excluded;
                continue;
            }
            for (int a = 0; a < factor; ++a) {
                for (int b = 0; b < factor; ++b) {
                    ++report.compared;
                    if (fine.at(i * factor + a, j * factor + b) == label) ++report.agreed;
                }
            }
        }
    }
    return report;
}

void write_basin_csv(std::ostream& out, const BasinMap& map) {
    out << "Q0,P0,label\n";
    char buf[64];
    for (int i = 0; i < map.grid.nq; ++i) {
        for (int j = 0; j < map.grid.np; ++j) {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,", map.grid.q_center(i), map.grid.p_center(j));
            out << buf << to_string(map.at(i, j)) << '\n';
        }
    }
}

// --- comparisons -------------------------------------------------------------

std::string_view to_string(Scenario scenario) {
    switch (scenario) {
    case Scenario::SymbFig2: return "SymbFig2";
    case Scenario::CompFig11: return "CompFig11";
    case Scenario::PP_vs_classic: return "PP_vs_classic";
    }
    return "unknown";
}

Scenario scenario_from_string(std::string_view name) {
    for (const Scenario s : {Scenario::SymbFig2, Scenario::CompFig11, Scenario::PP_vs_classic}) {
        if (to_string(s) == name) return s;
    }
    throw UsageError("unknown scenario '" + std::string(name) + "'");
}

std::array<Family, 2> scenario_families(Scenario scenario) {
    switch (scenario) {
    case Scenario::SymbFig2: return {Family::SymbHerd, Family::SymbClassic};
    case Scenario::CompFig11: return {Family::CompHerd, Family::CompClassic};
    case Scenario::PP_vs_classic: return {Family::PPPackHerd, Family::PPClassic};
    }
    throw UsageError("unknown scenario");
}

std::string_view to_string(Ordering ordering) {
    switch (ordering) {
    case Ordering::HerdHigher: return "herd higher";
    case Ordering::ClassicalHigher: return "classical higher";
    case Ordering::Tie: return "tie";
    case Ordering::ClassicalUnbounded: return "classical unbounded";
    }
    return "unknown";
}

State default_initial_state(const DimParams& params) {
    return State::dimensional(0.1 * params.k_q, 0.1 * (params.uses_k_p() ? params.k_p : params.k_q));
}

namespace {

ComparisonRun run_variant(const DimParams& params, const State& s0, const IntegratorConfig& cfg) {
    ComparisonRun run;
    run.params = params;
    try {
        SettleResult result = settle(params, s0, cfg);
        run.trajectory = std::move(result.trajectory);
        run.terminal = result.state;
        run.settled = result.settled;
    } catch (const IntegrationError& err) {
        if (err.kind() != IntegrationError::Kind::Unbounded) throw;
        run.trajectory = err.partial();
        run.terminal = run.trajectory.terminal();
        run.unbounded = true;
    }
    return run;
}

Ordering order(double herd, double classical) {
    if (std::abs(herd - classical) <= 1e-6 * std::max({1.0, std::abs(herd), std::abs(classical)})) {
        return Ordering::Tie;
    }
    return herd > classical ? Ordering::HerdHigher : Ordering::ClassicalHigher;
}

}  // namespace

ComparisonResult compare_models(Scenario scenario, const DimParams& params, std::optional<State> s0,
                                const IntegratorConfig& cfg) {
    const auto families = scenario_families(scenario);
    DimParams herd = params;
    herd.family = families[0];
    DimParams classical = params;
    classical.family = families[1];
    if (is_predator_prey(herd.family)) {
        herd.k_p = 0.0;
        classical.k_p = 0.0;
    }
    herd.validate();
    classical.validate();

    ComparisonResult result;
    result.scenario = scenario;
    result.initial = s0.value_or(default_initial_state(herd));
    result.horizon = cfg.t_max;
    result.herd = run_variant(herd, result.initial, cfg);
    result.classical = run_variant(classical, result.initial, cfg);
    if (result.herd.unbounded) throw IntegrationError(IntegrationError::Kind::Unbounded, "herd run unbounded",
                                                      result.herd.trajectory);
    if (result.classical.unbounded) {
        result.verdict = {Ordering::ClassicalUnbounded, Ordering::ClassicalUnbounded};
    } else {
        result.verdict = {order(result.herd.terminal.first, result.classical.terminal.first),
                          order(result.herd.terminal.second, result.classical.terminal.second)};
    }
    return result;
}

// --- limit cycles ------------------------------------------------------------

LimitCycleResult limit_cycle_experiment(const DimParams& params, const State& s0, double horizon,
                                        const IntegratorConfig& cfg) {
    if (params.family != Family::PPPackHerd) throw UsageError("limit_cycle_experiment needs PP_PackHerd");
    params.validate();
    LimitCycleResult result;
    result.params = params;
    result.initial = s0;
    const Rescaled rescaled = to_nondim(params);
    result.nondim = rescaled.params;
    result.regime = pp2_regime(result.nondim.e, result.nondim.f);
    result.coexistence = pp2_coexistence(result.nondim.e, result.nondim.f);

    IntegratorConfig run_cfg = cfg;
    run_cfg.t_max = horizon;
    result.trajectory = integrate(params, s0, run_cfg);
    result.oscillation = detect_oscillation(result.trajectory);

    const bool near_hopf = result.regime.regime == Regime::HopfPoint;
    const State& end = result.trajectory.terminal();
    const bool alive = end.first > 0.0 && end.second > 0.0;
    if (alive && (result.oscillation.kind == OscillationKind::Sustained || near_hopf)) {
        double period = result.oscillation.period;
        if (!(period > 0.0) && result.coexistence.feasible) {
            const double im = std::abs(result.coexistence.eigenvalues[0].imag());
            if (im > 0.0) period = map_time(rescaled.map, 2.0 * std::numbers::pi / im, MapDirection::ToDimensional);
        }
        if (period > 0.0) {
            const double from = result.trajectory.end_time() - period;
            for (const auto& sample : result.trajectory.samples) {
                if (sample.time >= from) result.cycle.push_back(sample);
            }
        }
    }
    return result;
}

}  // namespace herd
