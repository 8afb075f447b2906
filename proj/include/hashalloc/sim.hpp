#pragma once

// Discrete-event two-chain block race. Each event is one block on either
// chain; prices walk, the winning chain's SAA retargets, miners observe the
// HAR vector and take one policy step.

#include "hashalloc/econ.hpp"
#include "hashalloc/miners.hpp"
#include "hashalloc/rng.hpp"
#include "hashalloc/saa.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hashalloc {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kPriceRatioFloor = 1e-4;

// How miners measure the HAR of a chain at an event.
enum class HarObservation {
    // V / current expected hashes per block: the reward per hash at the
    // present difficulty. Equals V / (T * H_X) once the SAA is at rest.
    difficulty,
    // V / (mean inter-block time over the SAA window * current hash rate)
    windowed_time,
    // V / (last realized inter-block time * current hash rate)
    last_gap,
};

struct SimChain {
    ChainSpec spec;
    SaaConfig saa;
};

struct ScenarioConfig {
    std::string name = "custom";
    SimChain chain_A;
    SimChain chain_B;
    MinerPopulation population;
    // Start the non-loyal split at the equilibrium for the initial prices
    // instead of population.nonloyal_split.
    bool start_at_equilibrium = false;
    double total_hash_rate = 1e18;
    double price_A = 1.0;
    double initial_price_ratio = 0.5;
    double walk_sigma = 5e-3;
    double duration_days = 450.0;
    double warmup_days = 90.0;
    std::uint64_t rng_seed = 1;
    HarObservation har_observation = HarObservation::difficulty;

    void validate() const;
};

struct TraceRow {
    std::int64_t tau = 0;
    double time_s = 0.0;
    ChainId chain = ChainId::A;
    std::int64_t height = 0;
    double expected_hashes = 0.0;
    double dt_s = 0.0;
    double w_A = 0.0;
    double w_eA = 0.0;
    double price_ratio = 0.0;
    double pi_A = 0.0;
    double pi_B = 0.0;

    double w_B() const { return 1.0 - w_A; }
    double w_eB() const { return 1.0 - w_eA; }
};

struct SimTrace {
    std::vector<TraceRow> rows;
};

// One Gaussian step of the price ratio, reflected at kPriceRatioFloor.
double price_step(double ratio, double sigma, Rng& rng);

struct BlockRace {
    ChainId winner = ChainId::A;
    double elapsed_s = 0.0;
};

// Samples exponential solve times for both chains at rates
// (w_X * H in native units) / expected_hashes_X and returns the first.
// Chains with zero allocation never win.
BlockRace next_block(double expected_hashes_A, double expected_hashes_B, const Allocation& w,
                     double H, Rng& rng);

// Same, with per-chain native hash rates already resolved.
BlockRace next_block_native(double expected_hashes_A, double expected_hashes_B,
                            double native_rate_A, double native_rate_B, Rng& rng);

// Chains with an ideal SAA are retargeted after every event to the hash rate
// of the post-step allocation; rolling-window chains retarget only when they
// win a block.
SimTrace run(const ScenarioConfig& config);

struct ConvergenceMetrics {
    double mean_abs_dev = 0.0;
    double max_abs_dev = 0.0;
    double fraction_within = 0.0;
    std::size_t events = 0;
};

struct OscillationMetrics {
    double amplitude = 0.0;
    double min_w_B = 0.0;
    double max_w_B = 0.0;
    std::size_t crossing_count = 0;
    // Mean number of events between sign changes of (w_B - w_eB), doubled to
    // a full period; zero with fewer than two crossings.
    double dominant_period_events = 0.0;
    std::size_t events = 0;

    double crossings_per(double events_window) const {
        return events == 0 ? 0.0 : crossing_count * events_window / static_cast<double>(events);
    }
};

// Statistics of |w_B - w_eB| over rows with time_s >= warmup_s.
ConvergenceMetrics convergence_metrics(const SimTrace& trace, double warmup_s,
                                       double within = 0.05);

OscillationMetrics oscillation_metrics(const SimTrace& trace, double warmup_s);

const char* to_string(HarObservation mode);
HarObservation parse_har_observation(std::string_view text);

} // namespace hashalloc
