#include "hashalloc/econ.hpp"
#include "hashalloc/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace hashalloc;
using doctest::Approx;

namespace {

// Per-chain HAR from first principles: V_X / (T_X * w_X * H).
double har_direct(double V, double T, double w, double H) { return V / (T * w * H); }

double rand_in(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

} // namespace

TEST_CASE("regularize") {
    CHECK(regularize(100, 5, 5) == 100);
    CHECK(regularize(100, 10, 5) == 200);
    CHECK(regularize(7e18, 3.2e13, 8.0e12) == Approx(2.8e19).epsilon(1e-12));
    CHECK(regularize(0, 1, 2) == 0);
    CHECK_THROWS_AS(regularize(1, 0, 1), DomainError);
    CHECK_THROWS_AS(regularize(1, 1, -1), DomainError);
    CHECK_THROWS_AS(regularize(-1, 1, 1), DomainError);
}

TEST_CASE("relative_security") {
    auto k = relative_security(1, 1);
    CHECK(k.K_A == 0.5);
    CHECK(k.K_B == 0.5);
    k = relative_security(3, 1);
    CHECK(k.K_A == 0.75);
    CHECK(k.K_B == 0.25);
    k = relative_security(26.5, 1.0);
    CHECK(k.K_A == Approx(0.96364).epsilon(1e-5));
    CHECK(k.K_B == Approx(0.03636).epsilon(1e-4));
    // alpha / (1 + alpha) with alpha = 400 / 11000 is the same share.
    const double alpha = 400.0 / 11000.0;
    CHECK(relative_security(1.0, alpha).K_B == Approx(alpha / (1 + alpha)));
    CHECK_THROWS_AS(relative_security(0, 0), DomainError);
    CHECK_THROWS_AS(relative_security(-1, 2), DomainError);
}

TEST_CASE("har") {
    CHECK(har(600, 600, 1) == 1);
    CHECK(har(125000, 600, 5e19) == Approx(4.1667e-18).epsilon(1e-4));
    CHECK(har(0, 600, 1e18) == 0);
    CHECK_THROWS_AS(har(1, 0, 1), DomainError);
    CHECK_THROWS_AS(har(1, 600, 0), DomainError);
}

TEST_CASE("har_vector_at_rest examples with two-path check") {
    SUBCASE("equal chains at x = y = 1") {
        const auto pi = har_vector_at_rest(100, 100, 1, 600, 600, 1, 1);
        CHECK(pi.pi_A == Approx(1.0 / 3));
        CHECK(pi.pi_B == Approx(1.0 / 3));
    }
    SUBCASE("V ratio 3:1, allocation (0.9, 0.1)") {
        // The constraint gives w = (xR, y(1-R)) = (0.9, 0.1), so the direct
        // path is 300 / (600 * 0.9) and 100 / (600 * 0.1).
        const auto pi = har_vector_at_rest(300, 100, 1, 600, 600, 1.2, 0.4);
        CHECK(pi.pi_A == Approx(har_direct(300, 600, 0.9, 1)));
        CHECK(pi.pi_B == Approx(har_direct(100, 600, 0.1, 1)));
        CHECK(pi.pi_A == Approx(400.0 / 720));
        CHECK(pi.pi_B == Approx(200.0 / 120));
    }
    SUBCASE("different block times, H = 2") {
        const auto pi = har_vector_at_rest(100, 100, 2, 600, 15, 1, 1);
        CHECK(pi.pi_A == Approx(har_direct(100, 600, 0.5, 2)));
        CHECK(pi.pi_B == Approx(har_direct(100, 15, 0.5, 2)));
        CHECK(pi.pi_A == Approx(1.0 / 6));
        CHECK(pi.pi_B == Approx(20.0 / 3));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(har_vector_at_rest(100, 100, 1, 600, 600, 1, 0.9), PreconditionError);
        CHECK_THROWS_AS(har_vector_at_rest(100, 0, 1, 600, 600, 1, 0), DomainError);
        CHECK_THROWS_AS(har_vector_at_rest(0, 100, 1, 600, 600, 0, 1), DomainError);
        CHECK_THROWS_AS(har_vector_at_rest(100, 100, 0, 600, 600, 1, 1), DomainError);
    }
}

TEST_CASE("equilibrium_allocation examples") {
    CHECK(equilibrium_allocation(600, 600, 0.5) == Allocation{0.5, 0.5});
    const auto w = equilibrium_allocation(600, 600, 1 / (1 + 0.036));
    CHECK(w.w_A == Approx(0.9653).epsilon(1e-4));
    CHECK(w.w_B == Approx(0.0347).epsilon(1e-3));
    const auto w2 = equilibrium_allocation(600, 15, 0.9);
    CHECK(w2.w_A == Approx(13.5 / 73.5));
    CHECK(w2.w_B == Approx(60.0 / 73.5));
    // Homogeneous HAR at x_e, y_e.
    const auto s = equilibrium_scales(600, 15, 0.9);
    const auto pi = har_vector_at_rest(900, 100, 1, 600, 15, s.x, s.y);
    CHECK(pi.pi_A == Approx(pi.pi_B).epsilon(1e-12));
    CHECK(s.x * 0.9 == Approx(w2.w_A));

    CHECK(equilibrium_allocation(600, 15, 0) == Allocation{0, 1});
    CHECK(equilibrium_allocation(600, 15, 1) == Allocation{1, 0});
    CHECK_THROWS_AS(equilibrium_allocation(600, 600, -0.1), DomainError);
    CHECK_THROWS_AS(equilibrium_allocation(600, 600, 1.1), DomainError);
    CHECK_THROWS_AS(equilibrium_allocation(0, 600, 0.5), DomainError);
}

TEST_CASE("allocation_distance") {
    CHECK(allocation_distance({0.5, 0.5}, {0.5, 0.5}) == 0);
    CHECK(allocation_distance({1, 0}, {0, 1}) == 2);
    CHECK(allocation_distance({0.4, 0.6}, {0.45, 0.55}) == Approx(0.1));
    CHECK(allocation_distance({0.45, 0.55}, {0.4, 0.6}) ==
          allocation_distance({0.4, 0.6}, {0.45, 0.55}));
}

TEST_CASE("pos_cost_rate and car") {
    PosChainSpec s{1e8, 6, 15, 10, 0};
    CHECK(pos_cost_rate(s) == 0);
    s.risk_free_rate_per_s = 1e-9;
    const double cost = pos_cost_rate(s);
    CHECK(cost == Approx(15));
    CHECK(car(100, 100) == 1);
    CHECK(car(60, 15) == 4);
    const double P_GAS = 2;
    CHECK(car(6 * P_GAS, cost) == Approx(0.8));
    CHECK_THROWS_AS(car(1, 0), DomainError);
    s.round_time_s = 0;
    CHECK_THROWS(pos_cost_rate(s));
}

TEST_CASE("market state") {
    ChainSpec a{"A", 600, 12.5, 1};
    ChainSpec b{"B", 600, 12.5, 1};
    MarketState m{11000, 400};
    CHECK(m.coinbase_value_A(a) == 137500);
    CHECK(m.relative_reward(a, b) == Approx(11000.0 / 11400));
    CHECK_THROWS_AS((MarketState{0, 0}.relative_reward(a, b)), DomainError);
}

TEST_CASE("property: simplex closure, equal-T reduction and monotonicity") {
    std::mt19937_64 g(11);
    for (int i = 0; i < 20000; ++i) {
        const double T_A = rand_in(g, 1e-3, 1e6);
        const double T_B = rand_in(g, 1e-3, 1e6);
        const double R = rand_in(g, 0, 1);
        const auto w = equilibrium_allocation(T_A, T_B, R);
        REQUIRE(w.w_A >= 0);
        REQUIRE(w.w_A <= 1);
        REQUIRE(w.w_B >= 0);
        REQUIRE(w.w_B <= 1);
        REQUIRE(std::abs(w.w_A + w.w_B - 1) <= 1e-12);

        const auto e = equilibrium_allocation(T_A, T_A, R);
        REQUIRE(e.w_A == R);
        REQUIRE(e.w_B == 1 - R);

        const double R2 = std::nextafter(R, 2.0) + rand_in(g, 1e-9, 1e-3);
        if (R2 <= 1) {
            REQUIRE(equilibrium_allocation(T_A, T_B, R2).w_A >
                    equilibrium_allocation(T_A, T_B, R).w_A);
        }
    }
}

TEST_CASE("property: homogeneity at equilibrium and uniqueness") {
    std::mt19937_64 g(12);
    for (int i = 0; i < 5000; ++i) {
        const double V_A = rand_in(g, 1, 1e6);
        const double V_B = rand_in(g, 1, 1e6);
        const double H = rand_in(g, 1e-3, 1e20);
        const double T_A = rand_in(g, 1, 1e4);
        const double T_B = rand_in(g, 1, 1e4);
        const double R = V_A / (V_A + V_B);
        const auto s = equilibrium_scales(T_A, T_B, R);
        const auto pi = har_vector_at_rest(V_A, V_B, H, T_A, T_B, s.x, s.y);
        REQUIRE(std::abs(pi.pi_A - pi.pi_B) <= 1e-9 * (pi.pi_A + pi.pi_B));

        // Any other feasible x gives an inhomogeneous vector, with the larger
        // HAR on the under-allocated chain.
        const double x = rand_in(g, 1e-6, 1 / R * (1 - 1e-6));
        if (std::abs(x - s.x) > 1e-6 * s.x) {
            const double y = (1 - x * R) / (1 - R);
            const auto p = har_vector_at_rest(V_A, V_B, H, T_A, T_B, x, y);
            REQUIRE(std::abs(p.pi_A - p.pi_B) > 1e-9 * (p.pi_A + p.pi_B));
            REQUIRE((x < s.x) == (p.pi_A > p.pi_B));
        }
    }
}

TEST_CASE("property: regularization consistency") {
    std::mt19937_64 g(13);
    for (int i = 0; i < 5000; ++i) {
        const double nA = rand_in(g, 1e10, 1e20);
        const double nB = rand_in(g, 1e10, 1e20);
        const double sA = rand_in(g, 1e6, 1e14);
        const double sB = rand_in(g, 1e6, 1e14);
        const auto reg = relative_security(nA, regularize(nB, sA, sB));
        // Fiat value of work on each chain, normalized.
        const double fA = nA / sA;
        const double fB = nB / sB;
        REQUIRE(std::abs(reg.K_A - fA / (fA + fB)) <= 1e-12);
        const auto nat = relative_security_native(nA, sA, nB, sB);
        REQUIRE(std::abs(reg.K_A - nat.K_A) <= 1e-12);
        REQUIRE(std::abs(reg.K_B - nat.K_B) <= 1e-12);
    }
}

TEST_CASE("validation of spec types") {
    CHECK_THROWS_AS((ChainSpec{"x", 0, 1, 1}.validate()), DomainError);
    CHECK_THROWS_AS((ChainSpec{"x", 600, -1, 1}.validate()), DomainError);
    CHECK_THROWS_AS((ChainSpec{"x", 600, 1, 0}.validate()), DomainError);
    CHECK_NOTHROW((ChainSpec{"x", 600, 0, 1}.validate()));
}
