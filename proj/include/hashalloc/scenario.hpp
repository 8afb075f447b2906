#pragma once

// Scenario files, trace CSV and the multi-seed batch runner.
//
// Scenario file format: one `key = value` per line, '#' starts a comment.
// Keys (all optional, defaults as in ScenarioConfig):
//
//   name
//   chain_A.target_block_time_s   chain_B.target_block_time_s
//   chain_A.coins_per_block       chain_B.coins_per_block
//   chain_A.spot_hash_price       chain_B.spot_hash_price
//   chain_A.saa                   chain_B.saa          ideal | rolling_window
//   chain_A.window_blocks         chain_B.window_blocks
//   chain_A.genesis_expected_hashes  (0 = derive from the initial allocation)
//   population.loyal_A_weight  population.loyal_B_weight  population.nonloyal_weight
//   population.policy          eps_greedy | extreme_greedy
//   population.epsilon
//   population.nonloyal_split
//   start_at_equilibrium       true | false
//   total_hash_rate  price_A  initial_price_ratio  walk_sigma
//   duration_days    warmup_days  rng_seed
//   har_observation  difficulty | windowed_time | last_gap

#include "hashalloc/sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hashalloc {

ScenarioConfig parse_scenario(std::istream& in);
void write_scenario(std::ostream& out, const ScenarioConfig& config);

// Built-in named scenarios: paper_eps1e-3, paper_eps5e-3, paper_eps1e-2,
// paper_extreme_w144 and paper_extreme_w36.
std::optional<ScenarioConfig> builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

// A built-in name, or else a path to a scenario file.
ScenarioConfig load_scenario(const std::string& name_or_path);

// Columns: tau,time_s,chain,height,expected_hashes,dt_s,w_A,w_eA,price_ratio,
// pi_A,pi_B. Floats carry 12 significant digits.
void write_trace_csv(std::ostream& out, const SimTrace& trace);
SimTrace read_trace_csv(std::istream& in);

// Rounds every float of a trace to 12 significant digits, i.e. what
// read_trace_csv(write_trace_csv(trace)) returns.
SimTrace round_trip(const SimTrace& trace);

struct SeedResult {
    std::uint64_t seed = 0;
    ConvergenceMetrics convergence;
    OscillationMetrics oscillation;
    SimTrace trace; // empty unless requested
};

// Runs config once per seed, up to `threads` at a time (0 = hardware
// concurrency). Results are returned in seed order.
std::vector<SeedResult> run_seeds(const ScenarioConfig& config,
                                  const std::vector<std::uint64_t>& seeds, unsigned threads = 0,
                                  bool keep_traces = false);

} // namespace hashalloc
