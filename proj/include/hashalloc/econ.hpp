#pragma once

// Static two-chain mining economics: hash rate regularization, relative
// security, hash adjusted reward (HAR), relative reward and the unique
// allocation equilibrium, plus the proof-of-stake cost adapter.
//
// Chain A is the reference chain: all regularized hash rates are expressed in
// chain-A native hashes per second.

#include <string>

namespace hashalloc {

// Relative tolerance on the simplex constraint x*R + y*(1-R) = 1.
inline constexpr double kScaleConstraintTol = 1e-9;
// Absolute tolerance on w_A + w_B = 1 for aggregate allocations.
inline constexpr double kSimplexTol = 1e-12;

struct ChainSpec {
    std::string label;
    double target_block_time_s = 600.0;
    double coins_per_block = 0.0;
    // Hashes per second purchasable for one fiat unit.
    double spot_hash_price = 1.0;

    void validate() const;
};

struct MarketState {
    double price_A = 0.0;
    double price_B = 0.0;

    double coinbase_value_A(const ChainSpec& a) const { return a.coins_per_block * price_A; }
    double coinbase_value_B(const ChainSpec& b) const { return b.coins_per_block * price_B; }
    // V_A / (V_A + V_B). Throws DomainError when both coinbase values are zero.
    double relative_reward(const ChainSpec& a, const ChainSpec& b) const;
};

struct Allocation {
    double w_A = 0.5;
    double w_B = 0.5;

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct HarVector {
    double pi_A = 0.0;
    double pi_B = 0.0;
};

struct RelativeSecurity {
    double K_A = 0.0;
    double K_B = 0.0;
};

struct PosChainSpec {
    double staked_coins = 0.0;
    double reward_per_round = 0.0;
    double round_time_s = 1.0;
    double coin_price = 0.0;
    double risk_free_rate_per_s = 0.0;

    void validate() const;
};

// Converts a native hash rate on chain X into chain-A units: rate * S_A / S_X.
double regularize(double native_rate, double spot_A, double spot_X);

// Fraction of total fiat value of work applied to each chain, from regularized
// hash rates.
RelativeSecurity relative_security(double H_A, double H_B);

// Same quantity computed directly from native rates and spot prices, i.e. the
// fiat value of work (H/S) normalized across chains.
RelativeSecurity relative_security_native(double native_A, double spot_A, double native_B,
                                          double spot_B);

// Expected fiat value of one regularized hash: V / (T * H).
double har(double coinbase_value, double inter_block_time_s, double reg_hash_rate);

// HAR vector of a pair of at-rest chains whose allocation is (x*R, y*(1-R)).
// Requires x*R + y*(1-R) = 1 to within kScaleConstraintTol.
HarVector har_vector_at_rest(double V_A, double V_B, double H, double T_A, double T_B,
                             double x, double y);

// Scale factors (x_e, y_e) that make the at-rest HAR vector homogeneous.
struct EquilibriumScales {
    double x = 1.0;
    double y = 1.0;
};
EquilibriumScales equilibrium_scales(double T_A, double T_B, double R);

// Unique allocation at which the at-rest HAR vector is homogeneous.
Allocation equilibrium_allocation(double T_A, double T_B, double R);

// L1 distance between two allocations.
double allocation_distance(const Allocation& w1, const Allocation& w2);

// Opportunity cost of staking for one validation round, r * k * T * P, in fiat.
double pos_cost_rate(const PosChainSpec& spec);

// Cost adjusted reward: fiat reward per unit of regularized cost.
double car(double reward_value, double cost);

} // namespace hashalloc
