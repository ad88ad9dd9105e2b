#include "doctest.h"

#include <cmath>
#include <random>

#include "herd/equilibria.hpp"

using namespace herd;

namespace {

Matrix2 mat(double a, double b, double c, double d) {
    Matrix2 m;
    m[0][0] = a;
    m[0][1] = b;
    m[1][0] = c;
    m[1][1] = d;
    return m;
}

double norm(const Derivative& d) { return std::hypot(d.first, d.second); }

// Number of sign changes of the composed symbiosis residual on a dense grid
// over X > 1, independent of the library's bracketing.
int symbiosis_crossings(double a, double b, double c) {
    auto residual = [&](double x) {
        const double y = b * (x * x - 1.0) * x;
        return (c / a) * (y * y - 1.0) * y - x;
    };
    int count = 0;
    double prev = residual(1.0 + 1e-9);
    for (int i = 1; i <= 200000; ++i) {
        const double x = 1.0 + 1e-9 + 4.0 * i / 200000.0;
        const double cur = residual(x);
        if ((prev < 0.0) != (cur < 0.0)) ++count;
        prev = cur;
    }
    return count;
}

}  // namespace

TEST_CASE("classification by trace and determinant") {
    CHECK(classify(mat(-1, 0, 0, -2)).classification == Classification::StableNode);
    CHECK(classify(mat(1, 0, 0, 2)).classification == Classification::UnstableNode);
    CHECK(classify(mat(-1, 0, 0, 2)).classification == Classification::Saddle);
    CHECK(classify(mat(-0.1, -1, 1, -0.1)).classification == Classification::StableFocus);
    CHECK(classify(mat(0.1, -1, 1, 0.1)).classification == Classification::UnstableFocus);
    CHECK(classify(mat(0, -1, 1, 0)).classification == Classification::Degenerate);
    const auto info = classify(mat(-0.1, -1, 1, -0.1));
    CHECK(info.eigenvalues[0].real() == doctest::Approx(-0.1));
    CHECK(std::abs(info.eigenvalues[0].imag()) == doctest::Approx(1.0));
    // Tiny eigenvalue next to a large one.
    const auto stiff = classify(mat(-1e8, 0, 0, -1e-3));
    CHECK(stiff.classification == Classification::StableNode);
    const double small = std::max(stiff.eigenvalues[0].real(), stiff.eigenvalues[1].real());
    CHECK(small == doctest::Approx(-1e-3).epsilon(1e-9));
}

TEST_CASE("boundary equilibria") {
    const auto symb = boundary_equilibria(NondimParams::symbiosis(1.4286, 9.2582, 9.2582));
    REQUIRE(!symb.empty());
    CHECK(symb.front().kind == EquilibriumKind::Origin);
    CHECK(!is_stable(symb.front().classification));

    // Classical Lotka-Volterra: (K, 0) is stable iff pK < m.
    DimParams lv{Family::PPClassic, 1.0, 0.5, 0.04, 0.1, 10, 0};
    auto axis_stable = [&](const DimParams& k) {
        for (const auto& eq : boundary_equilibria(k)) {
            if (eq.kind == EquilibriumKind::AxisQ) return is_stable(eq.classification);
        }
        return false;
    };
    CHECK(axis_stable(lv));  // pK = 0.4 < 0.5
    lv.p = 0.06;
    CHECK(!axis_stable(lv));  // pK = 0.6 > 0.5
    lv.p = 0.05;
    CHECK(classical_coexistence(lv).location.first == doctest::Approx(10.0));
    CHECK(std::abs(classical_coexistence(lv).location.second) < 1e-12);

    const DimParams comp{Family::CompClassic, 0.8, 0.5, 0.05, 0.07, 7, 10};
    CHECK(boundary_equilibria(comp).size() == 3);
}

TEST_CASE("symbiosis coexistence") {
    SUBCASE("reported levels") {
        const DimParams k{Family::SymbHerd, 3, 3, 0.5, 0.3, 6, 7};
        const Rescaled res = to_nondim(k);
        const Equilibrium eq = symb_coexistence(res.params.a, res.params.b, res.params.c);
        const State dim = map_state(res.map, eq.location, MapDirection::ToDimensional);
        CHECK(dim.first == doctest::Approx(6.66).epsilon(0.01));
        CHECK(dim.second == doctest::Approx(8.06).epsilon(0.01));
    }
    SUBCASE("symmetric parameters") {
        const Equilibrium eq = symb_coexistence(1, 1, 1);
        CHECK(eq.location.first == doctest::Approx(eq.location.second));
        // X = (X^2 - 1) X gives X = sqrt(2).
        CHECK(eq.location.first == doctest::Approx(std::sqrt(2.0)));
    }
    SUBCASE("random parameters: unique, stable, on both nullclines") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> par(0.1, 10.0);
        for (int trial = 0; trial < 100; ++trial) {
            const double a = par(rng), b = par(rng), c = par(rng);
            const NondimParams n = NondimParams::symbiosis(a, b, c);
            const Equilibrium eq = symb_coexistence(a, b, c);
            CHECK(eq.location.first > 1.0);
            CHECK(eq.location.second > 1.0);
            CHECK(norm(rhs_nondim(n, eq.location)) < 1e-9);
            CHECK(is_stable(eq.classification));
            CHECK(symbiosis_crossings(a, b, c) == 1);
        }
    }
}

TEST_CASE("pack-hunting coexistence points") {
    const Equilibrium e2 = pp1_coexistence(2.0, 0.3);
    CHECK(e2.location.first == doctest::Approx(0.76923).epsilon(1e-5));
    CHECK(e2.location.second == doctest::Approx(0.46154).epsilon(1e-5));
    CHECK(is_stable(e2.classification));
    const Equilibrium same = pp1_coexistence(1.7, 1.7);
    CHECK(same.location.first == doctest::Approx(1.0 / 3.0));
    CHECK(same.location.second == doctest::Approx(2.0 * 1.7 / 3.0));

    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> par(0.01, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double b = par(rng), c = par(rng);
        const Equilibrium eq = pp1_coexistence(b, c);
        const Matrix2 j = jacobian_nondim(NondimParams::pack_individual(b, c), eq.location);
        CHECK(j.det() == doctest::Approx(b / 2.0));
        CHECK(j.trace() == doctest::Approx(-(2 * b * b + 2 * c + b) / (2 * (b + 2 * c))));
        CHECK(is_stable(eq.classification));
    }

    const Equilibrium hat = pp2_coexistence(2.0, 0.2);
    CHECK(hat.feasible);
    CHECK(hat.location.first == doctest::Approx(0.89443).epsilon(1e-5));
    CHECK(hat.location.second == doctest::Approx(0.35777).epsilon(1e-5));
    CHECK(is_stable(hat.classification));

    const Equilibrium band = pp2_coexistence(1.15, 0.5011);
    CHECK(band.feasible);
    CHECK(!is_stable(band.classification));
    const Matrix2 jb = jacobian_nondim(NondimParams::pack_herd(1.15, 0.5011), band.location);
    CHECK(jb.trace() == doctest::Approx(0.2066).epsilon(1e-4));

    CHECK(!pp2_coexistence(0.9, 0.5).feasible);
    const Equilibrium tc = pp2_coexistence(1.0, 0.5);
    CHECK(std::abs(tc.location.first) < 1e-12);
    CHECK(std::abs(tc.location.second) < 1e-12);

    const double f = 0.5011;
    const Equilibrium hopf = pp2_coexistence(3 * f - 0.25, f);
    CHECK(hopf.classification == Classification::Degenerate);
}

TEST_CASE("competition polynomial matches the composed nullclines") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> par(0.1, 10.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = par(rng), b = par(rng), c = par(rng), x = unit(rng);
        const double u = 1.0 - x * x;
        const double want = c * b * u * (1.0 - b * b * x * x * u * u) - a;
        const double got = eval_competition_polynomial(a, b, c, x);
        CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("competition coexistence structure") {
    CHECK(comp_coexistence(3, 3, 6).equilibria.size() == 1);

    const auto three = comp_coexistence(3, 3, 10);
    REQUIRE(three.equilibria.size() == 3);
    CHECK(three.equilibria[0].location.first < three.equilibria[1].location.first);
    CHECK(three.equilibria[1].location.first < three.equilibria[2].location.first);
    CHECK(!is_stable(three.equilibria[0].classification));
    CHECK(is_stable(three.equilibria[1].classification));
    CHECK(!is_stable(three.equilibria[2].classification));

    const auto tri = comp_coexistence(0.8993, 3.4567, 3.4523);
    REQUIRE(tri.equilibria.size() == 3);
    CHECK(is_stable(tri.equilibria[1].classification));

    CHECK(comp_coexistence(3.01, 3, 1).equilibria.empty());
    const auto edge = comp_coexistence(3, 3, 1);
    CHECK(edge.equilibria.empty());
    CHECK(edge.on_boundary);
}

TEST_CASE("competition root-count law and stability of the roots") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> par(0.1, 10.0);
    const double r3 = std::sqrt(3.0) / 3.0;
    const double corner = 1.5 * std::sqrt(3.0);
    int tested = 0;
    while (tested < 300) {
        const double a = par(rng), b = par(rng), c = par(rng);
        if (a >= b * c) continue;
        ++tested;
        const auto roots = comp_coexistence(a, b, c);
        const auto n = roots.equilibria.size();
        CHECK((n == 1 || n == 3));
        if (b > corner && c > corner * a) CHECK(n == 3);
        const NondimParams params = NondimParams::competition(a, b, c);
        for (const auto& eq : roots.equilibria) {
            CHECK(norm(rhs_nondim(params, eq.location)) < 1e-9);
            if (eq.merged) continue;
            // A coordinate below sqrt(3)/3 makes a diagonal entry positive and
            // the point unstable. The converse does not hold for the flanks.
            if (eq.location.first < r3 || eq.location.second < r3) CHECK(!is_stable(eq.classification));
        }
        if (n == 3 && !roots.equilibria[1].merged) {
            CHECK(is_stable(roots.equilibria[1].classification));
            CHECK(roots.equilibria[1].location.first > r3);
            CHECK(roots.equilibria[1].location.second > r3);
            CHECK(!is_stable(roots.equilibria[0].classification));
            CHECK(!is_stable(roots.equilibria[2].classification));
        }
    }
}

TEST_CASE("classical coexistence points") {
    const DimParams symb{Family::SymbClassic, 3, 3, 0.5, 0.3, 6, 7};
    const Equilibrium s = classical_coexistence(symb);
    CHECK(s.feasible);
    CHECK(s.location.first == doctest::Approx(33.99).epsilon(0.005));
    CHECK(s.location.second == doctest::Approx(46.69).epsilon(0.005));
    const auto ds = rhs_dimensional(symb, s.location);
    CHECK(std::abs(ds.first) < 1e-9);
    CHECK(std::abs(ds.second) < 1e-9);

    const DimParams comp{Family::CompClassic, 0.8, 0.5, 0.05, 0.07, 7, 10};
    const Equilibrium c = classical_coexistence(comp);
    CHECK(c.location.first == doctest::Approx(2.26).epsilon(0.005));
    CHECK(c.location.second == doctest::Approx(7.74).epsilon(0.005));

    DimParams unbounded = symb;
    unbounded.p = 5.0;
    CHECK(!classical_coexistence(unbounded).feasible);
}

TEST_CASE("herding prey with individualistic predators") {
    const DimParams eq_one{Family::PPPackIndiv, 2.0, 1.0, 1.0, 0.5, 4.0, 0};
    const Equilibrium one = herd_prey_individual_predator_equilibrium(eq_one);
    CHECK(one.location.first == doctest::Approx(1.0));
    CHECK(one.location.second == doctest::Approx((2.0 / 0.5) * 0.75));

    const DimParams quarter{Family::PPPackIndiv, 0.6, 1.0, 2.0, 0.3, 1.0, 0};
    const Equilibrium q = herd_prey_individual_predator_equilibrium(quarter);
    CHECK(q.location.first == doctest::Approx(0.25));
    CHECK(q.location.second == doctest::Approx(0.6 / (2 * 0.3) * 0.75));

    const DimParams edge{Family::PPPackIndiv, 0.6, 2.0, 1.0, 0.3, 4.0, 0};
    CHECK(std::abs(herd_prey_individual_predator_equilibrium(edge).location.second) < 1e-12);
}

TEST_CASE("no trace-zero point with positive determinant") {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> par(0.1, 10.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = par(rng), b = par(rng), c = par(rng);
        const Equilibrium s = symb_coexistence(a, b, c);
        const Matrix2 js = jacobian_nondim(NondimParams::symbiosis(a, b, c), s.location);
        CHECK(!(std::abs(js.trace()) < 1e-8 && js.det() > 0.0));
        if (a >= b * c) continue;
        for (const auto& eq : comp_coexistence(a, b, c).equilibria) {
            const Matrix2 jc = jacobian_nondim(NondimParams::competition(a, b, c), eq.location);
            CHECK(!(std::abs(jc.trace()) < 1e-8 && jc.det() > 0.0));
        }
    }
}
