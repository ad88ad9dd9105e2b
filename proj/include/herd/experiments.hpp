#pragma once

// Figure-level experiments: herd versus classical comparisons, basin of
// attraction maps, and the limit-cycle run of the pack-hunting / herding
// prey model.

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "herd/equilibria.hpp"
#include "herd/integrator.hpp"
#include "herd/model.hpp"
#include "herd/regimes.hpp"

namespace herd {

// --- basins ------------------------------------------------------------------

enum class BasinLabel { AxisQ, AxisP, Coexistence, Origin, Undecided };

[[nodiscard]] std::string_view to_string(BasinLabel label);

/// Cell-centered grid of dimensional initial states.
struct BasinGrid {
    double q_lo = 0.0;
    double q_hi = 1.0;
    double p_lo = 0.0;
    double p_hi = 1.0;
    int nq = 200;
    int np = 200;

    [[nodiscard]] double q_center(int i) const { return q_lo + (q_hi - q_lo) * (i + 0.5) / nq; }
    [[nodiscard]] double p_center(int j) const { return p_lo + (p_hi - p_lo) * (j + 0.5) / np; }
    [[nodiscard]] BasinGrid refined(int factor = 2) const;
    void validate() const;
};

/// [0, 1.2 K_Q] x [0, 1.2 K_P] at 200 x 200.
[[nodiscard]] BasinGrid default_basin_grid(const DimParams& params);

struct BasinOptions {
    IntegratorConfig integrator{};
    /// Nondimensional distance for matching a terminal state to an attractor.
    double match_radius = 1e-3;
};

struct Attractor {
    BasinLabel label = BasinLabel::Undecided;
    Equilibrium equilibrium;  // nondimensional
};

struct BasinMap {
    DimParams params;
    BasinGrid grid;
    /// Index i * np + j, with i along Q and j along P.
    std::vector<BasinLabel> labels;
    /// Attractors that label at least one cell.
    std::vector<Attractor> attractors;

    [[nodiscard]] BasinLabel at(int i, int j) const {
        return labels[static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.np) + static_cast<std::size_t>(j)];
    }
    [[nodiscard]] std::size_t count(BasinLabel label) const;
    /// Distinct labels other than Origin and Undecided.
    [[nodiscard]] std::size_t non_origin_labels() const;
};

/// Settle every grid cell of a herd-family model and label it by the
/// attractor it reaches: the stable axis points and stable coexistence
/// points, or the origin.
[[nodiscard]] BasinMap basin_map(const DimParams& params, const BasinGrid& grid,
                                 const BasinOptions& options = {});

struct RefinementReport {
    std::size_t compared = 0;
    std::size_t agreed = 0;
    std::size_t excluded = 0;

    [[nodiscard]] double fraction() const {
        return compared == 0 ? 1.0 : static_cast<double>(agreed) / static_cast<double>(compared);
    }
};

/// Compare a map with one on a grid refined by `factor`. Coarse cells next to
/// a differently labeled cell are excluded.
[[nodiscard]] RefinementReport compare_refinement(const BasinMap& coarse, const BasinMap& fine, int factor = 2);

/// CSV `Q0,P0,label`.
void write_basin_csv(std::ostream& out, const BasinMap& map);

// --- comparisons -------------------------------------------------------------

enum class Scenario { SymbFig2, CompFig11, PP_vs_classic };

[[nodiscard]] std::string_view to_string(Scenario scenario);
[[nodiscard]] Scenario scenario_from_string(std::string_view name);
/// Herd and classical families compared by a scenario.
[[nodiscard]] std::array<Family, 2> scenario_families(Scenario scenario);

enum class Ordering { HerdHigher, ClassicalHigher, Tie, ClassicalUnbounded };

[[nodiscard]] std::string_view to_string(Ordering ordering);

struct ComparisonRun {
    DimParams params;
    Trajectory trajectory;
    State terminal;
    bool settled = false;
    bool unbounded = false;
};

struct ComparisonResult {
    Scenario scenario = Scenario::SymbFig2;
    State initial;
    double horizon = 0.0;
    ComparisonRun herd;
    ComparisonRun classical;
    /// Per component (Q, P).
    std::array<Ordering, 2> verdict{};
};

/// Initial state used when none is given: (0.1 K_Q, 0.1 K_P).
[[nodiscard]] State default_initial_state(const DimParams& params);

/// Run the herd and classical variants of `params` (the family field is
/// ignored) from the same state to steady state, with the same horizon.
[[nodiscard]] ComparisonResult compare_models(Scenario scenario, const DimParams& params,
                                              std::optional<State> s0 = std::nullopt,
                                              const IntegratorConfig& cfg = {});

// --- limit cycles ------------------------------------------------------------

struct LimitCycleResult {
    DimParams params;
    NondimParams nondim;
    State initial;
    Trajectory trajectory;
    OscillationReport oscillation;
    /// Analytic classification of the coexistence point.
    Equilibrium coexistence;
    RegimeReport regime;
    /// One period of the tail, when the run is Sustained or the parameters
    /// sit in the near-Hopf band.
    std::vector<Sample> cycle;
};

/// Integrate a dimensional PP_PackHerd model over [0, horizon] and
/// characterize its oscillation.
[[nodiscard]] LimitCycleResult limit_cycle_experiment(const DimParams& params, const State& s0, double horizon,
                                                      const IntegratorConfig& cfg = {});

}  // namespace herd
