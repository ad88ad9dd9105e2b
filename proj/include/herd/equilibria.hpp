#pragma once

// Boundary and coexistence equilibria for all seven families, with local
// stability from the trace/determinant of the Jacobian.
//
// Herd-family equilibria are reported in nondimensional coordinates and
// classical ones in dimensional coordinates. Axis points of the herd
// families are equilibria of the reduced (one-population) dynamics only;
// the missing population either invades or is driven to zero in finite
// time, which shows up as a transverse eigenvalue of +inf or -inf.

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "herd/model.hpp"

namespace herd {

enum class EquilibriumKind { Origin, AxisQ, AxisP, Coexistence };

enum class Classification {
    StableNode,
    StableFocus,
    UnstableNode,
    UnstableFocus,
    Saddle,
    Center,
    Degenerate,
};

[[nodiscard]] std::string_view to_string(EquilibriumKind kind);
[[nodiscard]] std::string_view to_string(Classification c);
[[nodiscard]] bool is_stable(Classification c);

struct Equilibrium {
    State location;
    EquilibriumKind kind = EquilibriumKind::Coexistence;
    std::array<std::complex<double>, 2> eigenvalues{};
    Classification classification = Classification::Degenerate;
    bool feasible = true;
    /// Two coexistence roots closer than 1e-6 (tangent nullclines).
    bool merged = false;
};

struct StabilityInfo {
    std::array<std::complex<double>, 2> eigenvalues{};
    Classification classification = Classification::Degenerate;
};

/// Trace/determinant classification of a planar Jacobian. Real parts within
/// `tol` of zero give Degenerate.
[[nodiscard]] StabilityInfo classify(const Matrix2& j, double tol = 1e-9);

/// Origin plus carrying-capacity points on the axes.
[[nodiscard]] std::vector<Equilibrium> boundary_equilibria(const NondimParams& params);
/// Classical families are handled in dimensional units; herd families are
/// rescaled first and reported nondimensionally.
[[nodiscard]] std::vector<Equilibrium> boundary_equilibria(const DimParams& params);

/// Unique first-quadrant coexistence point of the symbiosis model. Both
/// coordinates exceed 1.
[[nodiscard]] Equilibrium symb_coexistence(double a, double b, double c);

/// Closed-form coexistence of the pack-hunting / individual-prey model.
[[nodiscard]] Equilibrium pp1_coexistence(double b, double c);

/// Closed-form coexistence of the pack-hunting / herding-prey model;
/// infeasible for e < 2f.
[[nodiscard]] Equilibrium pp2_coexistence(double e, double f);

struct CompetitionRoots {
    std::vector<Equilibrium> equilibria;  // sorted by abscissa
    /// a == bc within 1e-12 relative; treated as infeasible.
    bool on_boundary = false;
    /// Roots of the degree-8 polynomial on (0, 1) before nullcline filtering.
    std::vector<double> raw_roots;
};

/// Raised when the competition root count violates the 1-or-3 law.
class ConsistencyError : public std::runtime_error {
public:
    ConsistencyError(const std::string& what, std::vector<double> raw)
        : std::runtime_error(what), raw_roots(std::move(raw)) {}
    std::vector<double> raw_roots;
};

/// Coefficients (highest degree first) of the degree-8 polynomial in X whose
/// roots are the abscissae of competition coexistence points.
[[nodiscard]] std::array<double, 9> competition_polynomial(double a, double b, double c);
[[nodiscard]] double eval_competition_polynomial(double a, double b, double c, double x);

[[nodiscard]] CompetitionRoots comp_coexistence(double a, double b, double c);

/// Coexistence of a classical family in dimensional units.
[[nodiscard]] Equilibrium classical_coexistence(const DimParams& params);

/// Coexistence of the herding-prey / individualistic-predator model,
/// (m^2/p^2, (m r / p q)(1 - m^2 / (p^2 K))), used for dimensional comparisons.
[[nodiscard]] Equilibrium herd_prey_individual_predator_equilibrium(const DimParams& params);

/// Dimensional closed forms of the two pack-hunting coexistence points.
[[nodiscard]] State pack_coexistence_dimensional(const DimParams& params);

/// Every feasible coexistence equilibrium of a herd family (nondimensional).
[[nodiscard]] std::vector<Equilibrium> coexistence_equilibria(const NondimParams& params);

/// Boundary and coexistence equilibria in one list.
[[nodiscard]] std::vector<Equilibrium> all_equilibria(const ModelSpec& model);

}  // namespace herd
