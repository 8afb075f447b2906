#pragma once

// Miner population and allocation policies. Non-loyal miners are modeled as a
// single mass whose split between the chains is the only mutable state.

#include "hashalloc/econ.hpp"

#include <string_view>

namespace hashalloc {

// Relative tie tolerance for the greedy choice.
inline constexpr double kGreedyTieTol = 1e-12;

enum class ChainId { A, B };
enum class GreedyChoice { A, B, none };

enum class PolicyKind { eps_greedy, extreme_greedy };

struct MinerPopulation {
    double loyal_A_weight = 0.05;
    double loyal_B_weight = 0.05;
    double nonloyal_weight = 0.9;
    PolicyKind policy = PolicyKind::eps_greedy;
    double epsilon = 1e-3;
    // Fraction of the non-loyal weight currently mining chain A.
    double nonloyal_split = 0.5;

    void validate() const;
};

// Chain offering the larger HAR; none when equal within kGreedyTieTol
// (relative). Infinite components are allowed, NaN is a DomainError.
GreedyChoice greedy_choice(const HarVector& pi);

Allocation aggregate_allocation(const MinerPopulation& population);

// Moves the aggregate allocation eps/2 per component toward the greedy chain
// by shifting non-loyal weight; the split is clamped to [0, 1].
MinerPopulation eps_greedy_step(const MinerPopulation& population, const HarVector& pi);

// Same as eps_greedy_step with an explicit step size instead of the
// population's epsilon.
MinerPopulation greedy_step(const MinerPopulation& population, const HarVector& pi,
                            double step);

// Sends all non-loyal weight to the greedy chain.
MinerPopulation extreme_greedy_step(const MinerPopulation& population, const HarVector& pi);

// Dispatches on population.policy.
MinerPopulation policy_step(const MinerPopulation& population, const HarVector& pi);

// Nonloyal split that realizes aggregate w_A as closely as the loyal bounds
// allow.
double split_for_allocation(const MinerPopulation& population, double w_A);

const char* to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view text);

} // namespace hashalloc
