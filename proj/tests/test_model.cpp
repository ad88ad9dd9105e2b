#include "doctest.h"

#include <cmath>
#include <random>

#include "herd/model.hpp"

using namespace herd;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

DimParams random_dim(Family family, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> rate(0.1, 3.0);
    std::uniform_real_distribution<double> cap(1.0, 20.0);
    DimParams k;
    k.family = family;
    k.r = rate(rng);
    k.m = rate(rng);
    k.q = rate(rng);
    k.p = rate(rng) * (is_predator_prey(family) ? 0.3 * k.q / 3.0 : 1.0);
    k.k_q = cap(rng);
    k.k_p = is_predator_prey(family) ? 0.0 : cap(rng);
    return k;
}

}  // namespace

TEST_CASE("rescaled parameters of reference settings") {
    SUBCASE("symbiosis") {
        const DimParams k{Family::SymbHerd, 3, 3, 0.5, 0.3, 6, 7};
        const auto n = to_nondim(k).params;
        CHECK(n.a == doctest::Approx(1.4286).epsilon(1e-4));
        CHECK(n.b == doctest::Approx(9.2582).epsilon(1e-4));
        CHECK(n.c == doctest::Approx(9.2582).epsilon(1e-4));
    }
    SUBCASE("pack-hunting, herding prey") {
        const DimParams k{Family::PPPackHerd, 0.76, 0.2999, 0.297, 0.607, 12, 0};
        const auto n = to_nondim(k).params;
        CHECK(std::abs(n.e - 1.2671) < 1e-3);
        CHECK(std::abs(n.f - 0.5011) < 1e-3);
    }
    SUBCASE("competition") {
        const DimParams k{Family::CompHerd, 0.8, 0.5, 0.05, 0.07, 7, 10};
        const auto n = to_nondim(k).params;
        CHECK(std::abs(n.a - 0.5) < 1e-3);
        CHECK(std::abs(n.b - 9.5618) < 1e-3);
        CHECK(std::abs(n.c - 5.9761) < 1e-3);
    }
    SUBCASE("pack-hunting, individual prey") {
        const DimParams k{Family::PPPackIndiv, 0.6, 0.3, 0.0072, 1.5, 5, 0};
        const auto n = to_nondim(k).params;
        CHECK(n.b == doctest::Approx(2.0));
        CHECK(n.c == doctest::Approx(0.3));
    }
    SUBCASE("pack-hunting, herding prey, second setting") {
        const DimParams k{Family::PPPackHerd, 0.5, 0.125, 0.5, 0.025, 10, 0};
        const auto n = to_nondim(k).params;
        CHECK(n.e == doctest::Approx(2.0));
        CHECK(n.f == doctest::Approx(0.2));
    }
}

TEST_CASE("rhs examples") {
    const DimParams symb{Family::SymbHerd, 1, 1, 0, 0, 1, 1};
    const auto d = rhs_dimensional(symb, State::dimensional(1, 1));
    CHECK(d.first == 0.0);
    CHECK(d.second == 0.0);

    const auto n = rhs_nondim(NondimParams::symbiosis(1, 1, 1), State::nondim(1, 1));
    CHECK(n.first == 1.0);
    CHECK(n.second == 1.0);

    const double b = 2.0, c = 0.3;
    const auto e2 = rhs_nondim(NondimParams::pack_individual(b, c), State::nondim(b / (b + 2 * c), 2 * b * c / (b + 2 * c)));
    CHECK(std::abs(e2.first) < 1e-9);
    CHECK(std::abs(e2.second) < 1e-9);

    // An empty herd leaves the other population logistic.
    const DimParams comp{Family::CompHerd, 0.8, 0.5, 0.05, 0.07, 7, 10};
    const auto axis = rhs_dimensional(comp, State::dimensional(0, 4));
    CHECK(axis.first == 0.0);
    CHECK(axis.second == doctest::Approx(0.5 * (1 - 0.4) * 4));
}

TEST_CASE("rhs vanishes at the reported herding-prey coexistence point") {
    const DimParams k{Family::PPPackHerd, 0.76, 0.2999, 0.297, 0.607, 12, 0};
    const double ratio = (k.m / k.p) * (k.m / k.p);  // Q / P on the P nullcline
    // On the P nullcline sqrt(Q/P) = m/p, so the Q nullcline gives
    // r (1 - Q/K) Q = q Q p/m, hence Q = K (1 - q p / (r m)).
    const double q_eq = k.k_q * (1.0 - k.q * k.p / (k.r * k.m));
    const double p_eq = q_eq / ratio;
    CHECK(std::abs(q_eq - 2.5085) < 1e-3);
    CHECK(std::abs(p_eq - 2.4602) < 1e-3);
    const auto d = rhs_dimensional(k, State::dimensional(q_eq, p_eq));
    CHECK(std::abs(d.first) < 1e-12);
    CHECK(std::abs(d.second) < 1e-12);
    // The four-digit rounding of that point is an equilibrium to within its rounding.
    const auto rounded = rhs_dimensional(k, State::dimensional(2.5085, 2.4602));
    CHECK(std::abs(rounded.first) < 1e-4);
    CHECK(std::abs(rounded.second) < 1e-4);
}

TEST_CASE("dimensional field maps onto the nondimensional field") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> frac(0.05, 1.5);
    for (const Family family : kHerdFamilies) {
        for (int trial = 0; trial < 100; ++trial) {
            const DimParams k = random_dim(family, rng);
            const Rescaled res = to_nondim(k);
            const double kp = k.uses_k_p() ? k.k_p : k.k_q;
            const State dim = State::dimensional(frac(rng) * k.k_q, frac(rng) * kp);
            const State nd = map_state(res.map, dim, MapDirection::ToNondim);
            const auto dd = rhs_dimensional(k, dim);
            const auto nn = rhs_nondim(res.params, nd);
            // d/dt (Q/u)^alpha = alpha X / Q * dQ/dtau / time_scale.
            const double dx = res.map.q_exponent * nd.first / dim.first * dd.first / res.map.time_scale;
            const double dy = res.map.p_exponent * nd.second / dim.second * dd.second / res.map.time_scale;
            CHECK(std::abs(dx - nn.first) < 1e-9 * std::max(1.0, std::abs(nn.first)));
            CHECK(std::abs(dy - nn.second) < 1e-9 * std::max(1.0, std::abs(nn.second)));
        }
    }
}

TEST_CASE("analytic Jacobians match central differences") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> par(0.1, 5.0);
    std::uniform_real_distribution<double> pos(0.05, 2.0);
    const double h = 1e-5;
    for (const Family family : kHerdFamilies) {
        for (int trial = 0; trial < 100; ++trial) {
            NondimParams n{family, par(rng), par(rng), par(rng), par(rng), par(rng)};
            const double x = pos(rng), y = pos(rng);
            const Matrix2 j = jacobian_nondim(n, State::nondim(x, y));
            const auto fxp = rhs_nondim(n, State::nondim(x + h, y));
            const auto fxm = rhs_nondim(n, State::nondim(x - h, y));
            const auto fyp = rhs_nondim(n, State::nondim(x, y + h));
            const auto fym = rhs_nondim(n, State::nondim(x, y - h));
            const double scale = 1.0 + std::abs(j[0][0]) + std::abs(j[1][1]);
            CHECK(std::abs(j[0][0] - (fxp.first - fxm.first) / (2 * h)) < 1e-6 * scale);
            CHECK(std::abs(j[1][0] - (fxp.second - fxm.second) / (2 * h)) < 1e-6 * scale);
            CHECK(std::abs(j[0][1] - (fyp.first - fym.first) / (2 * h)) < 1e-6 * scale);
            CHECK(std::abs(j[1][1] - (fyp.second - fym.second) / (2 * h)) < 1e-6 * scale);
        }
    }
}

TEST_CASE("Jacobian examples") {
    const auto j0 = jacobian_nondim(NondimParams::symbiosis(0.7, 2.0, 3.0), State::nondim(0, 0));
    CHECK(j0[0][0] == 2.0);
    CHECK(j0[0][1] == 1.0);
    CHECK(j0[1][0] == 0.7);
    CHECK(j0[1][1] == 3.0);

    const double e = 2.0, f = 0.2;
    const double x = std::sqrt((e - 2 * f) / e);
    const auto jp = jacobian_nondim(NondimParams::pack_herd(e, f), State::nondim(x, 2 * f * x));
    CHECK(std::abs(jp.trace() - (-2 * e + 6 * f - 0.5)) < 1e-9);

    const double r3 = std::sqrt(3.0) / 3.0;
    const auto jc = jacobian_nondim(NondimParams::competition(1.3, 2.0, 4.0), State::nondim(r3, r3));
    CHECK(std::abs(jc[0][0]) < 1e-15);
    CHECK(std::abs(jc[1][1]) < 1e-15);
}

TEST_CASE("state maps") {
    const DimParams symb{Family::SymbHerd, 3, 3, 0.5, 0.3, 6, 7};
    const State one = map_state(scale_map(symb), State::dimensional(6, 7), MapDirection::ToNondim);
    CHECK(one.first == doctest::Approx(1.0));
    CHECK(one.second == doctest::Approx(1.0));

    const DimParams pp1{Family::PPPackIndiv, 0.6, 0.3, 0.0072, 1.5, 5, 0};
    const double p_unit = (pp1.m / pp1.q) * (pp1.m / pp1.q);
    const State s = map_state(scale_map(pp1), State::dimensional(5, p_unit), MapDirection::ToNondim);
    CHECK(s.first == doctest::Approx(1.0));
    CHECK(s.second == doctest::Approx(1.0));

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> pos(0.0, 50.0);
    for (const Family family : kHerdFamilies) {
        const DimParams k = random_dim(family, rng);
        const ScaleMap map = scale_map(k);
        for (int trial = 0; trial < 200; ++trial) {
            const State d = State::dimensional(pos(rng), pos(rng));
            const State back = map_state(map, map_state(map, d, MapDirection::ToNondim), MapDirection::ToDimensional);
            CHECK(rel(back.first, d.first) < 1e-12);
            CHECK(rel(back.second, d.second) < 1e-12);
        }
        CHECK(map_time(map, map_time(map, 3.7, MapDirection::ToNondim), MapDirection::ToDimensional) ==
              doctest::Approx(3.7));
    }
}

TEST_CASE("from_nondim reconstructs a preimage") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> par(0.1, 5.0);
    for (const Family family : kHerdFamilies) {
        for (int trial = 0; trial < 50; ++trial) {
            const NondimParams n{family, par(rng), par(rng), par(rng), par(rng), par(rng)};
            const RescaleConvention conv{par(rng), par(rng), par(rng), par(rng)};
            NondimParams want = n;
            if (family == Family::PPPackIndiv) want = NondimParams::pack_individual(n.b, n.c);
            if (family == Family::PPPackHerd) want = NondimParams::pack_herd(n.e, n.f);
            if (family == Family::SymbHerd) want = NondimParams::symbiosis(n.a, n.b, n.c);
            if (family == Family::CompHerd) want = NondimParams::competition(n.a, n.b, n.c);
            const DimParams k = from_nondim(want, conv);
            CHECK(k.m == conv.m);
            CHECK(k.k_q == conv.k_q);
            const NondimParams got = to_nondim(k).params;
            CHECK(rel(got.a, want.a) < 1e-12);
            CHECK(rel(got.b, want.b) < 1e-12);
            CHECK(rel(got.c, want.c) < 1e-12);
            CHECK(rel(got.e, want.e) < 1e-12);
            CHECK(rel(got.f, want.f) < 1e-12);
        }
    }
}

TEST_CASE("symbiosis points outward near the origin") {
    const DimParams k{Family::SymbHerd, 3, 3, 0.5, 0.3, 6, 7};
    const auto d = rhs_dimensional(k, State::dimensional(1e-6, 1e-6));
    CHECK(d.first > 0.0);
    CHECK(d.second > 0.0);
}

TEST_CASE("errors") {
    const DimParams k{Family::SymbHerd, 3, 3, 0.5, 0.3, 6, 7};
    CHECK_THROWS_AS((void)rhs_dimensional(k, State::dimensional(-1, 1)), DomainError);
    CHECK_THROWS_AS((void)rhs_dimensional(k, State::nondim(1, 1)), UsageError);
    CHECK_THROWS_AS((void)rhs_nondim(NondimParams::symbiosis(1, 1, 1), State::dimensional(1, 1)), UsageError);

    DimParams zero_q = k;
    zero_q.q = 0.0;
    CHECK_THROWS_AS((void)to_nondim(zero_q), DomainError);

    DimParams negative = k;
    negative.r = -1.0;
    CHECK_THROWS_AS((void)negative.validate(), DomainError);

    DimParams classic = k;
    classic.family = Family::SymbClassic;
    CHECK_THROWS_AS((void)to_nondim(classic), UsageError);

    // p >= q is allowed with a warning for the predator-prey families.
    const DimParams pp{Family::PPPackHerd, 0.5, 0.125, 0.5, 0.025, 10, 0};
    CHECK(pp.validate().size() == 1);
}

TEST_CASE("family names") {
    for (const Family f : kAllFamilies) CHECK(family_from_string(to_string(f)) == f);
    CHECK(!family_from_string("Nope").has_value());
}
