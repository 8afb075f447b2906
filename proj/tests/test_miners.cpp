#include "hashalloc/econ.hpp"
#include "hashalloc/errors.hpp"
#include "hashalloc/miners.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace hashalloc;
using doctest::Approx;

namespace {

MinerPopulation population(double loyal_A, double loyal_B, double split, double eps = 1e-3,
                           PolicyKind policy = PolicyKind::eps_greedy) {
    MinerPopulation p;
    p.loyal_A_weight = loyal_A;
    p.loyal_B_weight = loyal_B;
    p.nonloyal_weight = 1 - loyal_A - loyal_B;
    p.nonloyal_split = split;
    p.epsilon = eps;
    p.policy = policy;
    return p;
}

// HAR vector of at-rest chains (T_A = T_B = T) under allocation w, computed
// per chain as V_X / (T * w_X * H).
HarVector at_rest_har(double V_A, double V_B, const Allocation& w, double T = 600, double H = 1) {
    return {V_A / (T * w.w_A * H), V_B / (T * w.w_B * H)};
}

double rand_in(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

} // namespace

TEST_CASE("greedy_choice") {
    CHECK(greedy_choice({2, 1}) == GreedyChoice::A);
    CHECK(greedy_choice({0.25, 0.25}) == GreedyChoice::none);
    CHECK(greedy_choice({0.2778, 1.6667}) == GreedyChoice::B);
    CHECK(greedy_choice({1.0, 1.0 + 1e-14}) == GreedyChoice::none);
    CHECK(greedy_choice({1.0, 1.0 + 1e-10}) == GreedyChoice::B);
    CHECK(greedy_choice({std::numeric_limits<double>::infinity(), 1}) == GreedyChoice::A);
    CHECK_THROWS_AS(greedy_choice({std::nan(""), 1}), DomainError);
}

TEST_CASE("aggregate_allocation") {
    auto w = aggregate_allocation(population(0.05, 0.05, 0.5));
    CHECK(w.w_A == Approx(0.5));
    CHECK(w.w_B == Approx(0.5));
    w = aggregate_allocation(population(0.05, 0.05, 1));
    CHECK(w.w_A == Approx(0.95));
    CHECK(w.w_B == Approx(0.05));
    const double alpha = 0.036;
    const double split = equilibrium_allocation(600, 600, 1 / (1 + alpha)).w_A;
    w = aggregate_allocation(population(0, 0, split));
    CHECK(w.w_A == Approx(0.9653).epsilon(1e-4));
    CHECK(w.w_B == Approx(0.0347).epsilon(1e-3));
}

TEST_CASE("eps_greedy_step") {
    SUBCASE("moves eps/2 per component") {
        const auto p = eps_greedy_step(population(0, 0, 0.4, 0.1), {2, 1});
        const auto w = aggregate_allocation(p);
        CHECK(w.w_A == Approx(0.45));
        CHECK(w.w_B == Approx(0.55));
    }
    SUBCASE("with loyal miners the shift is still eps/2 of the total") {
        const auto p = eps_greedy_step(population(0.05, 0.05, 0.5, 0.1), {1, 2});
        CHECK(aggregate_allocation(p).w_B == Approx(0.55));
    }
    SUBCASE("clamped at the boundary") {
        const auto before = population(0.05, 0.05, 1, 0.1);
        CHECK(eps_greedy_step(before, {2, 1}).nonloyal_split == 1);
    }
    SUBCASE("no-op at equilibrium") {
        const auto before = population(0.05, 0.05, 0.3, 0.1);
        CHECK(eps_greedy_step(before, {0.5, 0.5}).nonloyal_split == 0.3);
    }
}

TEST_CASE("extreme_greedy_step") {
    const auto p = population(0.05, 0.05, 0.4, 1e-3, PolicyKind::extreme_greedy);
    auto w = aggregate_allocation(extreme_greedy_step(p, {2, 1}));
    CHECK(w.w_A == Approx(0.95));
    CHECK(w.w_B == Approx(0.05));
    w = aggregate_allocation(extreme_greedy_step(p, {1, 2}));
    CHECK(w.w_A == Approx(0.05));
    CHECK(w.w_B == Approx(0.95));
    CHECK(extreme_greedy_step(p, {1, 1}).nonloyal_split == 0.4);
    CHECK(policy_step(p, {2, 1}).nonloyal_split == 1);
}

TEST_CASE("population validation and parsing") {
    CHECK_THROWS(population(0.5, 0.6, 0.5).validate());
    auto p = population(0.05, 0.05, 0.5);
    p.epsilon = 0;
    CHECK_THROWS(p.validate());
    p = population(0.05, 0.05, 1.5);
    CHECK_THROWS(p.validate());
    CHECK(parse_policy_kind("eps_greedy") == PolicyKind::eps_greedy);
    CHECK(parse_policy_kind("extreme_greedy") == PolicyKind::extreme_greedy);
    CHECK_THROWS_AS(parse_policy_kind("lazy"), InputError);
}

TEST_CASE("split_for_allocation") {
    const auto p = population(0.05, 0.05, 0.5);
    CHECK(aggregate_allocation({0.05, 0.05, 0.9, PolicyKind::eps_greedy, 1e-3,
                                split_for_allocation(p, 0.7)})
              .w_A == Approx(0.7));
    CHECK(split_for_allocation(p, 0.01) == 0);
    CHECK(split_for_allocation(p, 0.99) == 1);
}

TEST_CASE("property: contraction by exactly eps") {
    std::mt19937_64 g(31);
    int checked = 0;
    for (int i = 0; i < 20000; ++i) {
        const double V_A = rand_in(g, 1, 100);
        const double V_B = rand_in(g, 1, 100);
        const Allocation w_e = equilibrium_allocation(600, 600, V_A / (V_A + V_B));
        const double loyal_A = rand_in(g, 0, w_e.w_A);
        const double loyal_B = rand_in(g, 0, std::min(w_e.w_B, 1 - loyal_A));
        auto p = population(loyal_A, loyal_B, rand_in(g, 0, 1));
        const Allocation w = aggregate_allocation(p);
        const double d = allocation_distance(w, w_e);
        if (d < 1e-6) {
            continue;
        }
        const double eps = rand_in(g, 1e-7, d * (1 - 1e-9));
        const auto next = greedy_step(p, at_rest_har(V_A, V_B, w), eps);
        const double d2 = allocation_distance(aggregate_allocation(next), w_e);
        REQUIRE(d - d2 == Approx(eps).epsilon(1e-6).scale(1e-9));
        ++checked;
    }
    CHECK(checked > 10000);
}

TEST_CASE("property: overshoot grows the distance by eps") {
    std::mt19937_64 g(32);
    for (int i = 0; i < 20000; ++i) {
        const double V_A = rand_in(g, 1, 100);
        const double V_B = rand_in(g, 1, 100);
        const Allocation w_e = equilibrium_allocation(600, 600, V_A / (V_A + V_B));
        const auto p = population(0, 0, rand_in(g, 0, 1));
        const Allocation w = aggregate_allocation(p);
        const double delta = allocation_distance(w, w_e);
        if (delta < 1e-6) {
            continue;
        }
        // The overshoot must stay on the simplex: the step moves each
        // component by delta + eps/2 past the current value.
        const double room = w.w_A < w_e.w_A ? w.w_B : w.w_A;
        const double max_eps = 2 * (room - delta);
        if (max_eps <= 1e-6) {
            continue;
        }
        const double eps = rand_in(g, 1e-7, max_eps);
        const auto next = greedy_step(p, at_rest_har(V_A, V_B, w), 2 * delta + eps);
        const double d2 = allocation_distance(aggregate_allocation(next), w_e);
        REQUIRE(d2 - delta == Approx(eps).epsilon(1e-6).scale(1e-9));
    }
}

TEST_CASE("property: loyal bounds under any step sequence") {
    std::mt19937_64 g(33);
    for (int trial = 0; trial < 200; ++trial) {
        const double loyal_A = rand_in(g, 0, 0.5);
        const double loyal_B = rand_in(g, 0, 1 - loyal_A);
        auto p = population(loyal_A, loyal_B, rand_in(g, 0, 1), rand_in(g, 1e-4, 0.5),
                            g() % 2 ? PolicyKind::eps_greedy : PolicyKind::extreme_greedy);
        for (int step = 0; step < 500; ++step) {
            p = policy_step(p, {rand_in(g, 0, 1), rand_in(g, 0, 1)});
            const Allocation w = aggregate_allocation(p);
            REQUIRE(w.w_A >= loyal_A - 1e-12);
            REQUIRE(w.w_A <= 1 - loyal_B + 1e-12);
            REQUIRE(std::abs(w.w_A + w.w_B - 1) <= 1e-12);
        }
    }
}

TEST_CASE("property: direction correctness at rest") {
    std::mt19937_64 g(34);
    for (int i = 0; i < 20000; ++i) {
        const double V_A = rand_in(g, 1, 100);
        const double V_B = rand_in(g, 1, 100);
        const double T_A = rand_in(g, 1, 1000);
        const double T_B = rand_in(g, 1, 1000);
        const double R = V_A / (V_A + V_B);
        const Allocation w_e = equilibrium_allocation(T_A, T_B, R);
        const double w_A = rand_in(g, 1e-6, 1 - 1e-6);
        const HarVector pi{V_A / (T_A * w_A), V_B / (T_B * (1 - w_A))};
        const auto choice = greedy_choice(pi);
        if (choice == GreedyChoice::A) {
            REQUIRE(w_A < w_e.w_A);
        } else if (choice == GreedyChoice::B) {
            REQUIRE(w_A > w_e.w_A);
        }
    }
}
