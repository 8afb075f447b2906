#include "hashalloc/miners.hpp"

#include "hashalloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hashalloc {

void MinerPopulation::validate() const {
    if (loyal_A_weight < 0.0 || loyal_B_weight < 0.0 || nonloyal_weight < 0.0) {
        throw PreconditionError("miner weights must be non-negative");
    }
    if (std::abs(loyal_A_weight + loyal_B_weight + nonloyal_weight - 1.0) > kSimplexTol) {
        throw PreconditionError("miner weights must sum to 1");
    }
    if (policy == PolicyKind::eps_greedy && !(epsilon > 0.0)) {
        throw PreconditionError("epsilon must be positive");
    }
    if (!(nonloyal_split >= 0.0 && nonloyal_split <= 1.0)) {
        throw PreconditionError("nonloyal_split must lie in [0, 1]");
    }
}

GreedyChoice greedy_choice(const HarVector& pi) {
    if (std::isnan(pi.pi_A) || std::isnan(pi.pi_B)) {
        throw DomainError("HAR component is NaN");
    }
    if (pi.pi_A == pi.pi_B) {
        return GreedyChoice::none;
    }
    if (std::isfinite(pi.pi_A) && std::isfinite(pi.pi_B)) {
        const double scale = std::max(std::abs(pi.pi_A), std::abs(pi.pi_B));
        if (std::abs(pi.pi_A - pi.pi_B) <= kGreedyTieTol * scale) {
            return GreedyChoice::none;
        }
    }
    return pi.pi_A > pi.pi_B ? GreedyChoice::A : GreedyChoice::B;
}

Allocation aggregate_allocation(const MinerPopulation& p) {
    const double w_A = p.loyal_A_weight + p.nonloyal_weight * p.nonloyal_split;
    const double w_B = p.loyal_B_weight + p.nonloyal_weight * (1.0 - p.nonloyal_split);
    return {w_A, w_B};
}

MinerPopulation greedy_step(const MinerPopulation& population, const HarVector& pi, double step) {
    MinerPopulation next = population;
    const GreedyChoice choice = greedy_choice(pi);
    if (choice == GreedyChoice::none || population.nonloyal_weight <= 0.0) {
        return next;
    }
    const double delta = 0.5 * step / population.nonloyal_weight;
    const double moved =
        choice == GreedyChoice::A ? population.nonloyal_split + delta : population.nonloyal_split - delta;
    next.nonloyal_split = std::clamp(moved, 0.0, 1.0);
    return next;
}

MinerPopulation eps_greedy_step(const MinerPopulation& population, const HarVector& pi) {
    return greedy_step(population, pi, population.epsilon);
}

MinerPopulation extreme_greedy_step(const MinerPopulation& population, const HarVector& pi) {
    MinerPopulation next = population;
    switch (greedy_choice(pi)) {
    case GreedyChoice::A:
        next.nonloyal_split = 1.0;
        break;
    case GreedyChoice::B:
        next.nonloyal_split = 0.0;
        break;
    case GreedyChoice::none:
        break;
    }
    return next;
}

MinerPopulation policy_step(const MinerPopulation& population, const HarVector& pi) {
    return population.policy == PolicyKind::eps_greedy ? eps_greedy_step(population, pi)
                                                       : extreme_greedy_step(population, pi);
}

double split_for_allocation(const MinerPopulation& population, double w_A) {
    if (population.nonloyal_weight <= 0.0) {
        return population.nonloyal_split;
    }
    return std::clamp((w_A - population.loyal_A_weight) / population.nonloyal_weight, 0.0, 1.0);
}

const char* to_string(PolicyKind kind) {
    return kind == PolicyKind::eps_greedy ? "eps_greedy" : "extreme_greedy";
}

PolicyKind parse_policy_kind(std::string_view text) {
    if (text == "eps_greedy") {
        return PolicyKind::eps_greedy;
    }
    if (text == "extreme_greedy") {
        return PolicyKind::extreme_greedy;
    }
    throw InputError("unknown policy '" + std::string(text) + "'");
}

} // namespace hashalloc
