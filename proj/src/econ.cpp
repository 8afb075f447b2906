#include "hashalloc/econ.hpp"

#include "hashalloc/errors.hpp"

#include <cmath>
#include <string>

namespace hashalloc {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

void require_non_negative(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be non-negative and finite");
    }
}

} // namespace

void ChainSpec::validate() const {
    require_positive(target_block_time_s, "target_block_time_s");
    require_non_negative(coins_per_block, "coins_per_block");
    require_positive(spot_hash_price, "spot_hash_price");
}

double MarketState::relative_reward(const ChainSpec& a, const ChainSpec& b) const {
    require_non_negative(price_A, "price_A");
    require_non_negative(price_B, "price_B");
    const double va = coinbase_value_A(a);
    const double vb = coinbase_value_B(b);
    if (va + vb <= 0.0) {
        throw DomainError("relative reward undefined when both coinbase values are zero");
    }
    return va / (va + vb);
}

void PosChainSpec::validate() const {
    require_non_negative(staked_coins, "staked_coins");
    require_non_negative(reward_per_round, "reward_per_round");
    require_positive(round_time_s, "round_time_s");
    require_non_negative(coin_price, "coin_price");
    require_non_negative(risk_free_rate_per_s, "risk_free_rate_per_s");
}

double regularize(double native_rate, double spot_A, double spot_X) {
    require_positive(spot_A, "spot_A");
    require_positive(spot_X, "spot_X");
    require_non_negative(native_rate, "native_rate");
    if (spot_A == spot_X) {
        return native_rate;
    }
    return native_rate * spot_A / spot_X;
}

RelativeSecurity relative_security(double H_A, double H_B) {
    require_non_negative(H_A, "H_A");
    require_non_negative(H_B, "H_B");
    const double total = H_A + H_B;
    if (total <= 0.0) {
        throw DomainError("relative security undefined when both hash rates are zero");
    }
    return {H_A / total, H_B / total};
}

RelativeSecurity relative_security_native(double native_A, double spot_A, double native_B,
                                          double spot_B) {
    require_positive(spot_A, "spot_A");
    require_positive(spot_B, "spot_B");
    require_non_negative(native_A, "native_A");
    require_non_negative(native_B, "native_B");
    const double fiat_A = native_A / spot_A;
    const double fiat_B = native_B / spot_B;
    const double total = fiat_A + fiat_B;
    if (total <= 0.0) {
        throw DomainError("relative security undefined when both hash rates are zero");
    }
    return {fiat_A / total, fiat_B / total};
}

double har(double coinbase_value, double inter_block_time_s, double reg_hash_rate) {
    require_positive(inter_block_time_s, "inter_block_time_s");
    require_positive(reg_hash_rate, "reg_hash_rate");
    require_non_negative(coinbase_value, "coinbase_value");
    return coinbase_value / (inter_block_time_s * reg_hash_rate);
}

HarVector har_vector_at_rest(double V_A, double V_B, double H, double T_A, double T_B, double x,
                             double y) {
    require_non_negative(V_A, "V_A");
    require_non_negative(V_B, "V_B");
    require_positive(H, "H");
    require_positive(T_A, "T_A");
    require_positive(T_B, "T_B");
    require_non_negative(x, "x");
    require_non_negative(y, "y");
    const double total = V_A + V_B;
    if (total <= 0.0) {
        throw DomainError("HAR undefined when both coinbase values are zero");
    }
    const double R = V_A / total;
    const double lhs = x * R + y * (1.0 - R);
    if (std::abs(lhs - 1.0) > kScaleConstraintTol) {
        throw PreconditionError("scale factors violate x*R + y*(1-R) = 1");
    }
    if (x == 0.0) {
        throw DomainError("pi_A undefined: x = 0 (no hash rate on chain A)");
    }
    if (y == 0.0) {
        throw DomainError("pi_B undefined: y = 0 (no hash rate on chain B)");
    }
    const double scale = total / H;
    return {scale / (x * T_A), scale / (y * T_B)};
}

EquilibriumScales equilibrium_scales(double T_A, double T_B, double R) {
    require_positive(T_A, "T_A");
    require_positive(T_B, "T_B");
    if (!(R >= 0.0 && R <= 1.0)) {
        throw DomainError("relative reward must lie in [0, 1]");
    }
    const double denom = T_B * R - T_A * R + T_A;
    return {T_B / denom, T_A / denom};
}

Allocation equilibrium_allocation(double T_A, double T_B, double R) {
    require_positive(T_A, "T_A");
    require_positive(T_B, "T_B");
    if (!(R >= 0.0 && R <= 1.0)) {
        throw DomainError("relative reward must lie in [0, 1]");
    }
    if (T_A == T_B) {
        return {R, 1.0 - R};
    }
    // Convex combination of T_A and T_B, so strictly positive.
    const double denom = T_B * R - T_A * R + T_A;
    return {T_B * R / denom, T_A * (1.0 - R) / denom};
}

double allocation_distance(const Allocation& w1, const Allocation& w2) {
    return std::abs(w1.w_A - w2.w_A) + std::abs(w1.w_B - w2.w_B);
}

double pos_cost_rate(const PosChainSpec& spec) {
    spec.validate();
    return spec.risk_free_rate_per_s * spec.staked_coins * spec.round_time_s * spec.coin_price;
}

double car(double reward_value, double cost) {
    require_positive(cost, "cost");
    return reward_value / cost;
}

} // namespace hashalloc
