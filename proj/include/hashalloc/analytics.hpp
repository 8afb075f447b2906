#pragma once

// Closed-form economics on top of the equilibrium: miner utility and
// opportunity cost, the cost of loyal mining beyond equilibrium, the cost of a
// reorganization attack by miners diverted from the majority chain, and the
// equilibrium shift produced by changing chain B's issuance.
//
// All costs are in abstract fiat units.

#include "hashalloc/econ.hpp"

#include <string>
#include <vector>

namespace hashalloc {

// Per-miner hash rate split as fractions of the total regularized hash rate H.
// Components are non-negative and sum to at most 1.
struct MinerShare {
    double phi_A = 0.0;
    double phi_B = 0.0;

    double total() const { return phi_A + phi_B; }
};

// A fiat quantity broken down by chain.
struct PerChain {
    double A = 0.0;
    double B = 0.0;

    double total() const { return A + B; }
};

// U = H * phi (componentwise) * pi, fiat per second on each chain.
PerChain utility(const MinerShare& phi, const HarVector& pi, double H);

// U(phi, pi) - U(phi', pi').
PerChain opportunity_cost(const MinerShare& phi, const HarVector& pi, const MinerShare& phi_prime,
                          const HarVector& pi_prime, double H);

struct SimilarChainCost {
    double per_block = 0.0;  // T * kappa
    double per_second = 0.0; // kappa
};

// Opportunity cost of mining with phi' (at scale factors x', y') instead of
// spreading phi_total at equilibrium, between chains sharing T, spot hash price
// and coins per block c. Requires x'R + y'(1-R) = 1 with R = P_A / (P_A + P_B).
SimilarChainCost similar_chain_opp_cost(const MinerShare& phi_prime, double x_prime,
                                        double y_prime, double c, double P_A, double P_B, double T,
                                        double phi_total);

// Inputs to similar_chain_opp_cost for a group loyal to chain B that holds
// k times chain B's equilibrium share and mines only chain B while greedy
// miners abandon it.
struct LoyalBoostSetup {
    MinerShare phi_prime;
    double x_prime = 1.0;
    double y_prime = 1.0;
    double phi_total = 0.0;
};
LoyalBoostSetup loyal_boost_setup(double alpha, double k);

// Closed form of the loyal boost cost per block: c * (k - 1) * P_B.
double loyal_boost_cost(double k, double c, double P_B);

struct AttackScenario {
    double alpha = 0.0; // P_B / P_A
    double beta = 0.0;  // share left on chain A, in units of chain B's equilibrium share
    double gamma = 1.0; // share diverted to the fork of chain B, same units
    double c = 0.0;
    double price_A = 0.0;
    double price_B = 0.0;
    int reorg_depth_z = 1;

    void validate() const;
};

struct AttackCost {
    double per_block = 0.0;
    // Allocation while the attack runs: (1 - alpha*gamma, alpha*gamma).
    Allocation during_attack;
    // Attacker's share of the total hash rate: (beta + gamma) * alpha / (1 + alpha).
    double attacker_share = 0.0;

    double for_depth(int z) const { return per_block * z; }
};

AttackCost reorg_attack_cost(const AttackScenario& scenario);

struct AttackCurveRow {
    double budget = 0.0; // beta + gamma
    double gamma = 0.0;
    double beta = 0.0;
    double attacker_share = 0.0;
    double cost_per_block = 0.0;
};

struct AttackCurve {
    std::vector<AttackCurveRow> rows;
    // One message per skipped grid point.
    std::vector<std::string> warnings;
};

// Tabulates reorg_attack_cost over every (budget, gamma) pair with
// beta = budget - gamma. Points violating the scenario invariants are skipped.
AttackCurve attack_cost_curve(double alpha, double c, double P_A, double P_B,
                              const std::vector<double>& budgets,
                              const std::vector<double>& gamma_grid);

struct IssuancePlan {
    double alpha = 0.0;
    double k = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double market_cap_B = 0.0;
    double issued_coins = 0.0;
};

// Change in coin price when issued supply grows from I to I + delta at fixed
// market cap: -(m / I) * delta / (I + delta).
double issuance_price_impact(double market_cap, double issued, double delta);

// Equilibrium after chain B multiplies its per-block issuance by k while
// cumulative issuance grows by beta on A and gamma on B:
// (1 / (1 + k*alpha*beta/gamma), alpha / (alpha + gamma/(k*beta))).
Allocation issuance_equilibrium(double k, double alpha, double beta, double gamma);

// Issuance for chain B (coins per block) that equalizes coinbase values,
// c_A / alpha, and the resulting equilibrium.
struct ParityIssuance {
    double coins_per_block_B = 0.0;
    Allocation equilibrium;
};
ParityIssuance parity_issuance(double c_A, double alpha, double T);

} // namespace hashalloc
