#pragma once

// Adaptive Dormand-Prince 5(4) integration of the model families with
// absorbing-axis handling. The square-root fields are not Lipschitz on the
// axes, so a component that drops below the extinction threshold while
// moving outward is pinned to zero and the reduced one-population dynamics
// take over from there.

#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "herd/model.hpp"

namespace herd {

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_step = 0.5;
    double min_step = 1e-13;
    /// Nondimensional threshold. Dimensional runs scale it by the
    /// carrying capacity of each component.
    double extinction_eps = 1e-9;
    double t_max = 500.0;
    /// Any component above blowup_factor times its scale aborts the run.
    double blowup_factor = 1e10;

    void validate() const;
};

enum class EventKind { ExtinctQ, ExtinctP, ExtinctBoth, SteadyState, HorizonReached };

[[nodiscard]] std::string_view to_string(EventKind kind);

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::HorizonReached;
};

struct Sample {
    double time = 0.0;
    State state;
};

struct Trajectory {
    Representation rep = Representation::Dimensional;
    std::vector<Sample> samples;
    std::vector<Event> events;

    [[nodiscard]] const State& terminal() const { return samples.back().state; }
    [[nodiscard]] double end_time() const { return samples.back().time; }
    [[nodiscard]] std::optional<double> first_event(EventKind kind) const;
    [[nodiscard]] bool has_event(EventKind kind) const { return first_event(kind).has_value(); }
};

class IntegrationError : public std::runtime_error {
public:
    enum class Kind { StepUnderflow, Unbounded };

    IntegrationError(Kind kind, const std::string& what, Trajectory partial)
        : std::runtime_error(what), kind_(kind), partial_(std::move(partial)) {}

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] const Trajectory& partial() const { return partial_; }

private:
    Kind kind_;
    Trajectory partial_;
};

/// Integrate from s0 over [0, cfg.t_max]. Records every accepted step.
[[nodiscard]] Trajectory integrate(const ModelSpec& model, const State& s0,
                                   const IntegratorConfig& cfg = {});

/// Integrate and report the state exactly at each of the given (increasing,
/// nonnegative) times. Steps are clipped to land on them.
[[nodiscard]] Trajectory integrate_at(const ModelSpec& model, const State& s0,
                                      std::span<const double> times,
                                      const IntegratorConfig& cfg = {});

struct SettleResult {
    State state;
    bool settled = false;
    double time = 0.0;
    Trajectory trajectory;
};

/// Integrate until the (reduced) field is small and the state moved by less
/// than rel_tol * |state| + abs_tol over the last 10% of elapsed time, or
/// until t_max. "Small" means a field norm below abs_tol or a Newton step to
/// the nearby equilibrium below rel_tol * |state| + abs_tol * scale; the
/// latter covers stiff equilibria where the explicit stepper stalls at its
/// stability limit.
[[nodiscard]] SettleResult settle(const ModelSpec& model, const State& s0,
                                  const IntegratorConfig& cfg = {});

enum class OscillationKind { Damped, Sustained, None };

[[nodiscard]] std::string_view to_string(OscillationKind kind);

struct OscillationReport {
    OscillationKind kind = OscillationKind::None;
    double period = 0.0;
    double amplitude = 0.0;   // half peak-to-peak of the last swing
    double peak_ratio = 0.0;  // median ratio of successive swings
    std::size_t extrema = 0;
};

/// Classify the oscillation of the first component over the second half of
/// the trajectory. Needs at least ten extrema above the noise floor.
[[nodiscard]] OscillationReport detect_oscillation(const Trajectory& traj, double delta = 0.02);

/// Reduced field at a state: extinct (zero) components stay at zero.
[[nodiscard]] Derivative reduced_rhs(const ModelSpec& model, const State& s);

}  // namespace herd
