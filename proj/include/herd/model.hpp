#pragma once

// Two-population interaction models with square-root (group perimeter)
// coupling, their classical mass-action counterparts, and the rescalings
// that map the herd models onto their nondimensional forms.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace herd {

enum class Family {
    SymbHerd,     // symbiosis, both populations gather
    PPPackIndiv,  // pack-hunting predator, individualistic prey
    PPPackHerd,   // pack-hunting predator, herding prey
    CompHerd,     // competition, both populations gather
    SymbClassic,
    PPClassic,    // Lotka-Volterra with logistic prey
    CompClassic,
};

inline constexpr std::array<Family, 7> kAllFamilies = {
    Family::SymbHerd,    Family::PPPackIndiv, Family::PPPackHerd, Family::CompHerd,
    Family::SymbClassic, Family::PPClassic,   Family::CompClassic};

inline constexpr std::array<Family, 4> kHerdFamilies = {
    Family::SymbHerd, Family::PPPackIndiv, Family::PPPackHerd, Family::CompHerd};

[[nodiscard]] std::string_view to_string(Family family);
/// Accepts the names produced by to_string ("SymbHerd", "PP_PackIndiv", ...).
[[nodiscard]] std::optional<Family> family_from_string(std::string_view name);

[[nodiscard]] constexpr bool is_herd(Family f) {
    return f == Family::SymbHerd || f == Family::PPPackIndiv || f == Family::PPPackHerd ||
           f == Family::CompHerd;
}
[[nodiscard]] constexpr bool is_predator_prey(Family f) {
    return f == Family::PPPackIndiv || f == Family::PPPackHerd || f == Family::PPClassic;
}
/// The classical model each herd family is compared against.
[[nodiscard]] Family classical_counterpart(Family herd_family);

/// Raised for parameter sets or states outside a model's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when an operation is applied to the wrong representation or family.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Dimensional parameters. Predator-prey families have a single carrying
/// capacity K, stored in k_q; k_p is unused for them.
struct DimParams {
    Family family = Family::SymbHerd;
    double r = 0.0;    // growth rate of Q
    double m = 0.0;    // growth rate of P, or predator mortality
    double p = 0.0;    // interaction rate felt by P
    double q = 0.0;    // interaction rate felt by Q
    double k_q = 1.0;  // carrying capacity of Q (K for predator-prey)
    double k_p = 1.0;  // carrying capacity of P

    [[nodiscard]] double k() const { return k_q; }
    [[nodiscard]] bool uses_k_p() const { return !is_predator_prey(family); }

    /// Throws DomainError on negative rates or non-positive carrying
    /// capacities. Returns soft warnings (p >= q for predator-prey).
    std::vector<std::string> validate() const;
};

/// Rescaled parameters. Symbiosis and competition use {a, b, c}; the
/// pack/individual predator-prey model uses {b, c}; the pack/herd model
/// uses {e, f}. Unused entries stay zero.
struct NondimParams {
    Family family = Family::SymbHerd;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double e = 0.0;
    double f = 0.0;

    static NondimParams symbiosis(double a, double b, double c) {
        return {Family::SymbHerd, a, b, c, 0.0, 0.0};
    }
    static NondimParams competition(double a, double b, double c) {
        return {Family::CompHerd, a, b, c, 0.0, 0.0};
    }
    static NondimParams pack_individual(double b, double c) {
        return {Family::PPPackIndiv, 0.0, b, c, 0.0, 0.0};
    }
    static NondimParams pack_herd(double e, double f) {
        return {Family::PPPackHerd, 0.0, 0.0, 0.0, e, f};
    }

    void validate() const;
};

enum class Representation { Dimensional, Nondimensional };

/// Population pair. `first` is Q (or X), `second` is P (or Y).
struct State {
    double first = 0.0;
    double second = 0.0;
    Representation rep = Representation::Dimensional;

    static State dimensional(double q, double p) { return {q, p, Representation::Dimensional}; }
    static State nondim(double x, double y) { return {x, y, Representation::Nondimensional}; }
};

struct Derivative {
    double first = 0.0;
    double second = 0.0;
};

/// Coordinate change between (Q, P, tau) and (X, Y, t):
///   X = (Q / q_unit)^q_exponent,  Y = (P / p_unit)^p_exponent,  t = time_scale * tau.
struct ScaleMap {
    double q_unit = 1.0;
    double q_exponent = 1.0;
    double p_unit = 1.0;
    double p_exponent = 1.0;
    double time_scale = 1.0;
};

enum class MapDirection { ToNondim, ToDimensional };

struct Rescaled {
    NondimParams params;
    ScaleMap map;
};

/// Free dimensional quantities that from_nondim cannot recover. Carrying
/// capacities and m are always taken from here; q is also fixed for the
/// predator-prey families, where only the product pq is determined.
struct RescaleConvention {
    double k_q = 1.0;
    double k_p = 1.0;
    double m = 1.0;
    double q = 1.0;
};

/// Either representation of a concrete model.
using ModelSpec = std::variant<DimParams, NondimParams>;

[[nodiscard]] Family family_of(const ModelSpec& spec);

struct Matrix2 {
    std::array<std::array<double, 2>, 2> v{};

    [[nodiscard]] double trace() const { return v[0][0] + v[1][1]; }
    [[nodiscard]] double det() const { return v[0][0] * v[1][1] - v[0][1] * v[1][0]; }
    double* operator[](std::size_t i) { return v[i].data(); }
    const double* operator[](std::size_t i) const { return v[i].data(); }
};

// --- vector fields -----------------------------------------------------------

/// Dimensional right-hand side (dQ/dtau, dP/dtau) for any of the seven
/// families. Throws DomainError on a negative component or wrong tag.
[[nodiscard]] Derivative rhs_dimensional(const DimParams& params, const State& s);

/// Nondimensional right-hand side (dX/dt, dY/dt) for the four herd families.
[[nodiscard]] Derivative rhs_nondim(const NondimParams& params, const State& s);

/// Analytic Jacobian of the nondimensional field.
[[nodiscard]] Matrix2 jacobian_nondim(const NondimParams& params, const State& s);

/// Analytic Jacobian of the dimensional field. Herd families are singular
/// on the axes; callers must pass an interior state for those.
[[nodiscard]] Matrix2 jacobian_dimensional(const DimParams& params, const State& s);

namespace detail {
// Unchecked evaluations used inside the integrator, where Runge-Kutta stages
// can dip marginally below zero. Square roots see max(value, 0).
Derivative dimensional_field(const DimParams& params, double q, double p);
Derivative nondim_field(const NondimParams& params, double x, double y);
}  // namespace detail

// --- rescaling -----------------------------------------------------------------

/// Nondimensionalize a herd family. Throws DomainError when a scale
/// denominator (q or m) vanishes, UsageError for classical families.
[[nodiscard]] Rescaled to_nondim(const DimParams& params);

/// Scale map alone (same preconditions as to_nondim).
[[nodiscard]] ScaleMap scale_map(const DimParams& params);

/// Reconstruct one dimensional parameter set that rescales to `params`.
[[nodiscard]] DimParams from_nondim(const NondimParams& params, const RescaleConvention& conv = {});

/// Change coordinates of a state. Throws UsageError when the state's
/// representation does not match the direction.
[[nodiscard]] State map_state(const ScaleMap& map, const State& s, MapDirection direction);

[[nodiscard]] double map_time(const ScaleMap& map, double time, MapDirection direction);

}  // namespace herd
