#pragma once

// Regime classification, bifurcation thresholds, origin-collapse
// directions, the finite-time prey extinction set, and parameter sweeps.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "herd/integrator.hpp"
#include "herd/model.hpp"

namespace herd {

enum class Regime {
    // Pack-hunting predators / herding prey, one value per table row.
    OriginStable_CoexistInfeasible,
    TranscriticalPoint,
    CoexistStable_LowE,
    CoexistStable_HighE,
    HopfPoint,
    CoexistUnstable_Band,
    CoexistInfeasible_OriginUnstable,
    // Competition.
    CompNoCoexistence,
    CompBoundary,
    CompSingle,
    CompTriple,
    // Symbiosis and pack-hunting / individual prey.
    CoexistGloballyStable,
};

[[nodiscard]] std::string_view to_string(Regime regime);

enum class BifurcationKind { Transcritical, Hopf, Pitchfork };

[[nodiscard]] std::string_view to_string(BifurcationKind kind);

struct Bifurcation {
    BifurcationKind kind = BifurcationKind::Transcritical;
    double threshold = 0.0;
    /// Parameter minus threshold; for competition, bc - a.
    double distance = 0.0;
};

struct RegimeReport {
    NondimParams params;
    Regime regime = Regime::CoexistGloballyStable;
    std::vector<Bifurcation> bifurcations;
    /// Some feasible interior equilibrium is locally asymptotically stable.
    bool stable_coexistence = false;
    std::vector<std::string> notes;

    [[nodiscard]] std::optional<Bifurcation> find(BifurcationKind kind) const;
};

/// Half-width of the band around e† labeled HopfPoint.
inline constexpr double kHopfBand = 0.02;

/// Table classification of the pack-hunting / herding-prey model. Thresholds
/// e* = 2f and, for f > 1/4, e† = 3f - 1/4 are attached.
[[nodiscard]] RegimeReport pp2_regime(double e, double f);

/// Regime of any herd family.
[[nodiscard]] RegimeReport classify_regime(const NondimParams& params);

/// Whether the linearized flow near the origin points inward along the ray
/// through s (dimensional). CompHerd: m/p < sqrt(Q/P) < q/r. PP_PackHerd:
/// sqrt(Q/P) < min(m/p, q/r). Other families, or a state on an axis: false.
[[nodiscard]] bool origin_collapse_predicate(const DimParams& params, const State& s);

struct ExtinctionVerdict {
    bool in_xi = false;
    std::optional<double> tau_star;
};

/// Membership of s0 in the set P > Q (m + r)^2 / q^2 from which prey die out
/// in finite time, with the upper bound on the extinction time.
[[nodiscard]] ExtinctionVerdict extinction_set(const DimParams& params, const State& s0);

// --- sweeps ------------------------------------------------------------------

struct SweepAxis {
    std::string parameter;
    double lo = 0.0;
    double hi = 1.0;
    int steps = 2;

    /// Evenly spaced values including both ends.
    [[nodiscard]] std::vector<double> values() const;
};

enum class SweepMode { Analytic, Numeric };

enum class NumericOutcome { Coexistence, Oscillation, Collapse, Undecided };

[[nodiscard]] std::string_view to_string(SweepMode mode);
[[nodiscard]] std::string_view to_string(NumericOutcome outcome);

struct SweepSpec {
    /// Family and the parameters not being swept.
    NondimParams base;
    SweepAxis axis1;
    SweepAxis axis2;
    SweepMode mode = SweepMode::Analytic;
    IntegratorConfig integrator{};
    /// Nondimensional start of every numeric cell.
    double start_x = 0.5;
    double start_y = 0.5;

    void validate() const;
};

struct SweepCell {
    std::size_t i1 = 0;
    std::size_t i2 = 0;
    double v1 = 0.0;
    double v2 = 0.0;
    RegimeReport report;
    std::optional<NumericOutcome> outcome;
};

struct SweepResult {
    SweepSpec spec;
    /// Row-major: index = i1 * axis2.steps + i2.
    std::vector<SweepCell> cells;

    [[nodiscard]] const SweepCell& at(std::size_t i1, std::size_t i2) const;
};

/// Set a named nondimensional parameter (a, b, c, e or f) valid for the
/// family. Throws UsageError for unknown names.
void set_parameter(NondimParams& params, std::string_view name, double value);

/// Numeric outcome of one parameter point: settled inside the quadrant,
/// sustained oscillation, or a population reaching zero.
[[nodiscard]] NumericOutcome numeric_outcome(const NondimParams& params, const State& s0,
                                             const IntegratorConfig& cfg);

[[nodiscard]] SweepResult sweep(const SweepSpec& spec);

struct Agreement {
    std::size_t compared = 0;
    std::size_t agreed = 0;
    std::size_t excluded = 0;

    [[nodiscard]] double fraction() const {
        return compared == 0 ? 1.0 : static_cast<double>(agreed) / static_cast<double>(compared);
    }
};

/// Compare analytic stability of coexistence with the numeric outcome of a
/// numeric sweep. Cells with a threshold between them and a neighbor are
/// excluded.
[[nodiscard]] Agreement cross_mode_agreement(const SweepResult& numeric);

/// CSV `axis1,axis2,regime,dist_transcritical,dist_hopf`. The regime column
/// holds the numeric outcome for numeric sweeps; missing distances are empty.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace herd
