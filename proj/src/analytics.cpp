#include "hashalloc/analytics.hpp"

#include "hashalloc/errors.hpp"

#include <cmath>
#include <sstream>

namespace hashalloc {

namespace {

void require_share(const MinerShare& phi) {
    if (!(phi.phi_A >= 0.0) || !(phi.phi_B >= 0.0) || phi.total() > 1.0 + kSimplexTol) {
        throw PreconditionError("miner share components must be >= 0 and sum to at most 1");
    }
}

// phi / x with the convention 0 / 0 = 0: a chain the miner does not mine
// contributes nothing even if its scale factor is zero.
double share_over_scale(double phi, double scale) {
    if (phi == 0.0) {
        return 0.0;
    }
    if (!(scale > 0.0)) {
        throw DomainError("scale factor must be positive where the miner has hash rate");
    }
    return phi / scale;
}

} // namespace

PerChain utility(const MinerShare& phi, const HarVector& pi, double H) {
    require_share(phi);
    return {H * phi.phi_A * pi.pi_A, H * phi.phi_B * pi.pi_B};
}

PerChain opportunity_cost(const MinerShare& phi, const HarVector& pi, const MinerShare& phi_prime,
                          const HarVector& pi_prime, double H) {
    const PerChain u = utility(phi, pi, H);
    const PerChain u_prime = utility(phi_prime, pi_prime, H);
    return {u.A - u_prime.A, u.B - u_prime.B};
}

SimilarChainCost similar_chain_opp_cost(const MinerShare& phi_prime, double x_prime,
                                        double y_prime, double c, double P_A, double P_B, double T,
                                        double phi_total) {
    if (!(T > 0.0)) {
        throw DomainError("T must be positive");
    }
    if (!(P_A >= 0.0) || !(P_B >= 0.0) || !(P_A + P_B > 0.0)) {
        throw DomainError("prices must be non-negative and not both zero");
    }
    if (!(x_prime >= 0.0) || !(y_prime >= 0.0)) {
        throw PreconditionError("scale factors must be non-negative");
    }
    const double R = P_A / (P_A + P_B);
    if (std::abs(x_prime * R + y_prime * (1.0 - R) - 1.0) > kScaleConstraintTol) {
        throw PreconditionError("scale factors violate x'R + y'(1-R) = 1");
    }
    const double captured =
        share_over_scale(phi_prime.phi_A, x_prime) + share_over_scale(phi_prime.phi_B, y_prime);
    const double per_block = c * (P_A + P_B) * (phi_total - captured);
    return {per_block, per_block / T};
}

LoyalBoostSetup loyal_boost_setup(double alpha, double k) {
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive");
    }
    if (!(k >= 1.0)) {
        throw DomainError("boost factor k must be >= 1");
    }
    const double boosted = k * alpha / (1.0 + alpha);
    if (!(boosted < 1.0)) {
        throw DomainError("boosted chain-B share k*alpha/(1+alpha) must stay below 1");
    }
    const double R = 1.0 / (1.0 + alpha);
    LoyalBoostSetup setup;
    setup.phi_prime = {0.0, boosted};
    setup.x_prime = (1.0 - boosted) / R;
    setup.y_prime = boosted / (1.0 - R);
    setup.phi_total = boosted;
    return setup;
}

double loyal_boost_cost(double k, double c, double P_B) {
    if (!(k >= 1.0)) {
        throw PreconditionError("boost factor k must be >= 1");
    }
    return c * (k - 1.0) * P_B;
}

void AttackScenario::validate() const {
    if (!(alpha > 0.0)) {
        throw PreconditionError("alpha must be positive");
    }
    if (alpha * gamma >= 1.0) {
        throw DomainError("alpha * gamma >= 1: diverted hash rate exceeds the total");
    }
    if (!(gamma >= 1.0)) {
        throw PreconditionError("gamma must be >= 1");
    }
    if (!(beta >= 0.0)) {
        throw PreconditionError("beta must be non-negative");
    }
    if (!(beta + gamma < 1.0 / alpha)) {
        throw PreconditionError("beta + gamma must be below 1 / alpha");
    }
    if (!(price_A >= 0.0) || !(price_B >= 0.0) || !(c >= 0.0)) {
        throw PreconditionError("prices and coins per block must be non-negative");
    }
    if (reorg_depth_z < 0) {
        throw PreconditionError("reorg depth must be non-negative");
    }
}

AttackCost reorg_attack_cost(const AttackScenario& s) {
    s.validate();
    const double a = s.alpha;
    const double kept = a * s.beta / ((1.0 + a) * (1.0 - a * s.gamma));
    const double honest_B = a / (1.0 + a);
    AttackCost out;
    out.per_block = s.c * (s.price_A + s.price_B) * (a * (s.beta + s.gamma) - kept - honest_B);
    out.during_attack = {1.0 - a * s.gamma, a * s.gamma};
    out.attacker_share = (s.beta + s.gamma) * a / (1.0 + a);
    return out;
}

AttackCurve attack_cost_curve(double alpha, double c, double P_A, double P_B,
                              const std::vector<double>& budgets,
                              const std::vector<double>& gamma_grid) {
    AttackCurve curve;
    for (const double budget : budgets) {
        for (const double gamma : gamma_grid) {
            AttackScenario s{alpha, budget - gamma, gamma, c, P_A, P_B, 1};
            try {
                const AttackCost cost = reorg_attack_cost(s);
                curve.rows.push_back({budget, gamma, s.beta, cost.attacker_share, cost.per_block});
            } catch (const std::logic_error& e) {
                std::ostringstream msg;
                msg << "skipped budget=" << budget << " gamma=" << gamma << ": " << e.what();
                curve.warnings.push_back(msg.str());
            }
        }
    }
    return curve;
}

double issuance_price_impact(double market_cap, double issued, double delta) {
    if (!(issued > 0.0)) {
        throw DomainError("issued supply must be positive");
    }
    if (!(delta >= 0.0) || !(market_cap >= 0.0)) {
        throw DomainError("market cap and issuance increase must be non-negative");
    }
    return -(market_cap / issued) * delta / (issued + delta);
}

Allocation issuance_equilibrium(double k, double alpha, double beta, double gamma) {
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive");
    }
    if (!(k >= 1.0) || !(beta >= 1.0) || !(gamma >= beta)) {
        throw PreconditionError("require k >= 1 and gamma >= beta >= 1");
    }
    const double w_A = 1.0 / (1.0 + k * alpha * beta / gamma);
    const double w_B = alpha / (alpha + gamma / (k * beta));
    return {w_A, w_B};
}

ParityIssuance parity_issuance(double c_A, double alpha, double T) {
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive");
    }
    if (!(c_A > 0.0)) {
        throw DomainError("c_A must be positive");
    }
    ParityIssuance out;
    out.coins_per_block_B = c_A / alpha;
    // P_A = 1, P_B = alpha.
    const double V_A = c_A;
    const double V_B = out.coins_per_block_B * alpha;
    out.equilibrium = equilibrium_allocation(T, T, V_A / (V_A + V_B));
    return out;
}

} // namespace hashalloc
