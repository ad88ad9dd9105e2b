#include "herd/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace herd {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("tolerances must be > 0");
    if (!(min_step > 0.0) || !(min_step <= max_step)) {
        throw DomainError("need 0 < min_step <= max_step");
    }
    if (!(extinction_eps > 0.0)) throw DomainError("extinction_eps must be > 0");
    if (!(t_max > 0.0)) throw DomainError("t_max must be > 0");
    if (!(blowup_factor > 1.0)) throw DomainError("blowup_factor must be > 1");
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::ExtinctQ: return "ExtinctQ";
    case EventKind::ExtinctP: return "ExtinctP";
    case EventKind::ExtinctBoth: return "ExtinctBoth";
    case EventKind::SteadyState: return "SteadyState";
    case EventKind::HorizonReached: return "HorizonReached";
    }
    return "unknown";
}

std::string_view to_string(OscillationKind kind) {
    switch (kind) {
    case OscillationKind::Damped: return "Damped";
    case OscillationKind::Sustained: return "Sustained";
    case OscillationKind::None: return "None";
    }
    return "unknown";
}

std::optional<double> Trajectory::first_event(EventKind kind) const {
    for (const auto& ev : events) {
        if (ev.kind == kind) return ev.time;
    }
    return std::nullopt;
}

Derivative reduced_rhs(const ModelSpec& model, const State& s) {
    Derivative d = std::visit(
        [&](const auto& params) -> Derivative {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, DimParams>) {
                return detail::dimensional_field(params, s.first, s.second);
            } else {
                return detail::nondim_field(params, s.first, s.second);
            }
        },
        model);
    if (s.first == 0.0) d.first = 0.0;
    if (s.second == 0.0) d.second = 0.0;
    return d;
}

namespace {

using Vec = std::array<double, 2>;

// Dormand-Prince 5(4) tableau. The fields are autonomous, so the nodes c_i
// are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat (error weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

enum class StopRule { Horizon, Steady };

class Stepper {
public:
    Stepper(const ModelSpec& model, const State& s0, const IntegratorConfig& cfg)
        : model_(model), cfg_(cfg), rep_(s0.rep), y_{s0.first, s0.second} {
        cfg_.validate();
        const bool dimensional = std::holds_alternative<DimParams>(model);
        if (dimensional != (s0.rep == Representation::Dimensional)) {
            throw UsageError("state representation does not match the model");
        }
        if (!(s0.first >= 0.0) || !(s0.second >= 0.0)) {
            throw DomainError("initial populations must be >= 0");
        }
        if (dimensional) {
            const auto& k = std::get<DimParams>(model);
            k.validate();
            scale_ = {k.k_q, k.uses_k_p() ? k.k_p : k.k_q};
        } else {
            std::get<NondimParams>(model).validate();
        }
        eps_ = {cfg.extinction_eps * scale_[0], cfg.extinction_eps * scale_[1]};
        dead_ = {s0.first == 0.0, s0.second == 0.0};
        traj_.rep = rep_;
        traj_.samples.push_back({0.0, state()});
        check_extinction(0.0, {false, false});
    }

    [[nodiscard]] State state() const { return {y_[0], y_[1], rep_}; }
    [[nodiscard]] double time() const { return t_; }
    [[nodiscard]] Trajectory& trajectory() { return traj_; }

    /// Advance to t_end (exactly). Returns false when stopped early by the
    /// steady-state rule.
    bool advance_to(double t_end, StopRule rule) {
        if (h_ <= 0.0) h_ = initial_step(t_end - t_);
        int boundary_retries = 0;
        while (t_ < t_end) {
            const double remaining = t_end - t_;
            double h = std::min({h_, cfg_.max_step, remaining});
            const bool clipped = h == remaining;

            Vec y_new;
            const double err = trial_step(h, y_new);
            if (!std::isfinite(err)) {
                shrink(0.1, "non-finite error estimate");
                continue;
            }
            if (err > 1.0) {
                h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h_ < cfg_.min_step) underflow();
                continue;
            }

            // A component stepping well below zero overshot its extinction
            // point: retry with a step aimed at the linear crossing.
            double theta = 1.0;
            for (std::size_t i = 0; i < 2; ++i) {
                if (!dead_[i] && y_new[i] < -eps_[i]) {
                    theta = std::min(theta, y_[i] / (y_[i] - y_new[i]));
                }
            }
            if (theta < 1.0) {
                if (++boundary_retries > 200) underflow();
                h_ = h * std::clamp(theta, 1e-3, 0.999);
                if (h_ < cfg_.min_step) underflow();
                continue;
            }
            boundary_retries = 0;

            t_ = clipped ? t_end : t_ + h;
            y_ = y_new;
            std::array<bool, 2> crossed{};
            for (std::size_t i = 0; i < 2; ++i) {
                if (dead_[i]) {
                    y_[i] = 0.0;
                } else if (y_[i] < 0.0) {
                    crossed[i] = true;
                }
            }
            check_extinction(t_, crossed);
            check_bounds();

            const double factor =
                std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.14) * std::pow(err_prev_, 0.08),
                           0.2, 5.0);
            err_prev_ = std::max(err, 1e-4);
            if (!clipped) h_ = h * factor;
            else h_ = std::max(h_, h * factor);

            traj_.samples.push_back({t_, state()});
            if (rule == StopRule::Steady && is_steady()) return false;
        }
        return true;
    }

    [[nodiscard]] bool is_steady() const {
        const State s = state();
        const Derivative d = reduced_rhs(model_, s);
        const double tol = cfg_.rel_tol * std::hypot(s.first, s.second) +
                           cfg_.abs_tol * std::max(scale_[0], scale_[1]);
        if (std::hypot(d.first, d.second) >= cfg_.abs_tol && newton_distance({d.first, d.second}) >= tol) {
            return false;
        }
        // Drift over the last 10% of elapsed time.
        const double t_ref = 0.9 * t_;
        const auto& samples = traj_.samples;
        auto it = std::lower_bound(samples.begin(), samples.end(), t_ref,
                                   [](const Sample& smp, double t) { return smp.time < t; });
        if (it == samples.end()) return false;
        const double drift = std::hypot(it->state.first - s.first, it->state.second - s.second);
        return drift < cfg_.rel_tol * std::hypot(s.first, s.second) + cfg_.abs_tol;
    }

private:
    // Length of the Newton step |J^-1 f| over the live components, with a
    // forward-difference Jacobian. Infinite when J is (nearly) singular.
    double newton_distance(const Vec& f) const {
        constexpr double kInfDist = std::numeric_limits<double>::infinity();
        Vec jac[2] = {{0.0, 0.0}, {0.0, 0.0}};  // jac[j] = column j
        for (std::size_t j = 0; j < 2; ++j) {
            if (dead_[j]) continue;
            const double dh = 1e-7 * std::max(std::abs(y_[j]), scale_[j]);
            Vec y = y_;
            y[j] += dh;
            const Vec fp = field(y);
            jac[j] = {(fp[0] - f[0]) / dh, (fp[1] - f[1]) / dh};
        }
        if (dead_[0] && dead_[1]) return 0.0;
        if (dead_[0] || dead_[1]) {
            const std::size_t i = dead_[0] ? 1 : 0;
            const double jii = jac[i][i];
            return jii != 0.0 ? std::abs(f[i] / jii) : kInfDist;
        }
        const double a = jac[0][0], b = jac[1][0], c = jac[0][1], d = jac[1][1];
        const double det = a * d - b * c;
        const double norm = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
        if (std::abs(det) <= 1e-12 * norm * norm) return kInfDist;
        const double dx = (d * f[0] - b * f[1]) / det;
        const double dy = (a * f[1] - c * f[0]) / det;
        return std::hypot(dx, dy);
    }

    Vec field(const Vec& y) const {
        const Derivative d = std::visit(
            [&](const auto& params) -> Derivative {
                using T = std::decay_t<decltype(params)>;
                if constexpr (std::is_same_v<T, DimParams>) {
                    return detail::dimensional_field(params, y[0], y[1]);
                } else {
                    return detail::nondim_field(params, std::max(y[0], 0.0), std::max(y[1], 0.0));
                }
            },
            model_);
        return {dead_[0] ? 0.0 : d.first, dead_[1] ? 0.0 : d.second};
    }

    double trial_step(double h, Vec& y_new) const {
        auto axpy = [&](std::initializer_list<std::pair<double, const Vec*>> terms) {
            Vec out = y_;
            for (const auto& [coef, k] : terms) {
                out[0] += h * coef * (*k)[0];
                out[1] += h * coef * (*k)[1];
            }
            return out;
        };
        const Vec k1 = field(y_);
        const Vec k2 = field(axpy({{a21, &k1}}));
        const Vec k3 = field(axpy({{a31, &k1}, {a32, &k2}}));
        const Vec k4 = field(axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec k5 = field(axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec k6 = field(axpy({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        y_new = axpy({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const Vec k7 = field(y_new);

        double err = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                  e7 * k7[i]);
            const double sc =
                cfg_.abs_tol * scale_[i] + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        return err;
    }

    double initial_step(double span) const {
        const Vec f0 = field(y_);
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double sc = cfg_.abs_tol * scale_[i] + cfg_.rel_tol * std::abs(y_[i]);
            d0 = std::max(d0, std::abs(y_[i]) / sc);
            d1 = std::max(d1, std::abs(f0[i]) / sc);
        }
        double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        return std::clamp(h, cfg_.min_step, std::min(cfg_.max_step, std::max(span, cfg_.min_step)));
    }

    void check_extinction(double t, std::array<bool, 2> crossed) {
        const Vec f = field(y_);
        bool newly[2] = {false, false};
        for (std::size_t i = 0; i < 2; ++i) {
            if (dead_[i]) continue;
            if (crossed[i] || (y_[i] < eps_[i] && f[i] < 0.0)) {
                y_[i] = 0.0;
                dead_[i] = true;
                newly[i] = true;
            }
        }
        if (newly[0]) traj_.events.push_back({t, EventKind::ExtinctQ});
        if (newly[1]) traj_.events.push_back({t, EventKind::ExtinctP});
        if ((newly[0] || newly[1]) && dead_[0] && dead_[1]) {
            traj_.events.push_back({t, EventKind::ExtinctBoth});
        }
    }

    void check_bounds() {
        for (std::size_t i = 0; i < 2; ++i) {
            if (!std::isfinite(y_[i]) || y_[i] > cfg_.blowup_factor * scale_[i]) {
                traj_.samples.push_back({t_, state()});
                throw IntegrationError(IntegrationError::Kind::Unbounded,
                                       "trajectory unbounded at t=" + std::to_string(t_), traj_);
            }
        }
    }

    void shrink(double factor, const char* why) {
        h_ *= factor;
        if (h_ < cfg_.min_step) {
            throw IntegrationError(IntegrationError::Kind::StepUnderflow,
                                   std::string("step size underflow: ") + why, traj_);
        }
    }

    [[noreturn]] void underflow() {
        throw IntegrationError(IntegrationError::Kind::StepUnderflow,
                               "step size underflow at t=" + std::to_string(t_), traj_);
    }

    const ModelSpec& model_;
    IntegratorConfig cfg_;
    Representation rep_;
    Vec y_;
    Vec scale_{1.0, 1.0};
    Vec eps_{};
    std::array<bool, 2> dead_{};
    double t_ = 0.0;
    double h_ = 0.0;
    double err_prev_ = 1e-4;
    Trajectory traj_;
};

}  // namespace

Trajectory integrate(const ModelSpec& model, const State& s0, const IntegratorConfig& cfg) {
    Stepper stepper(model, s0, cfg);
    stepper.advance_to(cfg.t_max, StopRule::Horizon);
    Trajectory traj = std::move(stepper.trajectory());
    traj.events.push_back({traj.end_time(), EventKind::HorizonReached});
    return traj;
}

Trajectory integrate_at(const ModelSpec& model, const State& s0, std::span<const double> times,
                        const IntegratorConfig& cfg) {
    Stepper stepper(model, s0, cfg);
    Trajectory out;
    out.rep = s0.rep;
    for (const double t : times) {
        if (t < stepper.time()) throw UsageError("sample times must be increasing");
        if (t > stepper.time()) stepper.advance_to(t, StopRule::Horizon);
        out.samples.push_back({t, stepper.state()});
    }
    out.events = stepper.trajectory().events;
    return out;
}

SettleResult settle(const ModelSpec& model, const State& s0, const IntegratorConfig& cfg) {
    Stepper stepper(model, s0, cfg);
    SettleResult result;
    if (stepper.is_steady()) {
        result.settled = true;
    } else {
        result.settled = !stepper.advance_to(cfg.t_max, StopRule::Steady);
    }
    result.state = stepper.state();
    result.time = stepper.time();
    result.trajectory = std::move(stepper.trajectory());
    result.trajectory.events.push_back(
        {result.time, result.settled ? EventKind::SteadyState : EventKind::HorizonReached});
    return result;
}

OscillationReport detect_oscillation(const Trajectory& traj, double delta) {
    OscillationReport report;
    if (traj.samples.size() < 3) return report;
    const double t_half = 0.5 * traj.end_time();

    std::vector<Sample> window;
    for (const auto& s : traj.samples) {
        if (s.time >= t_half) window.push_back(s);
    }
    if (window.size() < 3) return report;

    double scale = 0.0;
    for (const auto& s : window) scale = std::max(scale, std::abs(s.state.first));
    const double floor = 1e-8 * scale + 1e-14;

    // Local extrema of the first component, refined by a parabola through
    // the three bracketing samples.
    struct Extremum {
        double time;
        double value;
        bool is_max;
    };
    std::vector<Extremum> extrema;
    for (std::size_t i = 1; i + 1 < window.size(); ++i) {
        const double x0 = window[i - 1].state.first;
        const double x1 = window[i].state.first;
        const double x2 = window[i + 1].state.first;
        const bool is_max = x1 > x0 && x1 >= x2;
        const bool is_min = x1 < x0 && x1 <= x2;
        if (!is_max && !is_min) continue;
        const double t0 = window[i - 1].time, t1 = window[i].time, t2 = window[i + 1].time;
        const double d01 = (x1 - x0) / (t1 - t0);
        const double d12 = (x2 - x1) / (t2 - t1);
        const double curvature = (d12 - d01) / (t2 - t0);
        double tv = t1, xv = x1;
        if (curvature != 0.0) {
            // Vertex of the interpolating parabola.
            const double slope_at_t1 = d01 + curvature * (t1 - t0);
            const double shift = -slope_at_t1 / (2.0 * curvature);
            if (std::abs(shift) < (t2 - t0)) {
                tv = t1 + shift;
                xv = x1 + slope_at_t1 * shift + curvature * shift * shift;
            }
        }
        if (!extrema.empty() && extrema.back().is_max == is_max) {
            // Keep alternation: retain the more extreme of two same-kind points.
            auto& last = extrema.back();
            if ((is_max && xv > last.value) || (!is_max && xv < last.value)) last = {tv, xv, is_max};
            continue;
        }
        extrema.push_back({tv, xv, is_max});
    }

    std::vector<double> swings;
    std::vector<Extremum> used{};
    for (std::size_t i = 1; i < extrema.size(); ++i) {
        const double swing = std::abs(extrema[i].value - extrema[i - 1].value);
        if (swing < floor) break;
        swings.push_back(swing);
        if (used.empty()) used.push_back(extrema[i - 1]);
        used.push_back(extrema[i]);
    }
    report.extrema = used.size();
    if (used.size() < 10) return report;

    std::vector<double> ratios;
    for (std::size_t i = 1; i < swings.size(); ++i) ratios.push_back(swings[i] / swings[i - 1]);
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    report.peak_ratio = ratios[ratios.size() / 2];
    report.amplitude = 0.5 * swings.back();

    double first_max = -1.0, last_max = -1.0;
    std::size_t maxima = 0;
    for (const auto& e : used) {
        if (!e.is_max) continue;
        if (first_max < 0.0) first_max = e.time;
        last_max = e.time;
        ++maxima;
    }
    if (maxima >= 2) report.period = (last_max - first_max) / static_cast<double>(maxima - 1);

    if (std::abs(report.peak_ratio - 1.0) <= delta) {
        report.kind = OscillationKind::Sustained;
    } else if (report.peak_ratio < 1.0 - delta) {
        report.kind = OscillationKind::Damped;
    }
    return report;
}

}  // namespace herd
