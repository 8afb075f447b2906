#pragma once

// Security adjustment algorithms (SAAs): rules mapping a chain's block history
// to the expected number of hashes required for its next block.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace hashalloc {

struct BlockRecord {
    std::int64_t height = 0;
    double timestamp_s = 0.0;
    // Difficulty proxy, in chain-native expected hashes per block.
    double expected_hashes = 0.0;
    // True hash rate on the chain when the block was solved. Simulation-only;
    // SAAs never read it.
    double solver_hash_rate = 0.0;
};

enum class SaaKind { ideal, rolling_window };

struct SaaConfig {
    SaaKind kind = SaaKind::rolling_window;
    int window_blocks = 144;
    double target_time_s = 600.0;
    // Returned by the rolling rule on an empty history.
    double genesis_expected_hashes = 0.0;

    void validate() const;
};

// The first record of a history is treated as the anchor: the window over n
// blocks spans the last n+1 timestamps, so a history of size L has L-1
// measurable intervals.
std::size_t usable_intervals(const SaaConfig& config, std::span<const BlockRecord> history);

// Mean inter-block time over the last usable_intervals() blocks, or nullopt
// when the history holds fewer than two records.
std::optional<double> windowed_mean_block_time(const SaaConfig& config,
                                               std::span<const BlockRecord> history);

// Rolling window: target_time * (sum of work over the window) / (elapsed
// window time). A window with zero elapsed time carries the last value
// forward. Ideal: observed_hash_rate * target_time, which puts the chain at
// rest immediately; the observation is mandatory for that kind.
double next_expected_hashes(const SaaConfig& config, std::span<const BlockRecord> history,
                            std::optional<double> observed_hash_rate = std::nullopt);

// True iff the windowed mean inter-block time is within tolerance * T of T.
// Rolling requires a full window of intervals, ideal at least one.
bool is_at_rest(const SaaConfig& config, std::span<const BlockRecord> history, double tolerance);

const char* to_string(SaaKind kind);
SaaKind parse_saa_kind(std::string_view text);

} // namespace hashalloc
