#include "hashalloc/saa.hpp"

#include "hashalloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hashalloc {

void SaaConfig::validate() const {
    if (window_blocks < 1) {
        throw PreconditionError("SAA window_blocks must be >= 1");
    }
    if (!(target_time_s > 0.0) || !std::isfinite(target_time_s)) {
        throw PreconditionError("SAA target_time_s must be positive");
    }
    if (genesis_expected_hashes < 0.0 || !std::isfinite(genesis_expected_hashes)) {
        throw PreconditionError("SAA genesis_expected_hashes must be non-negative");
    }
}

std::size_t usable_intervals(const SaaConfig& config, std::span<const BlockRecord> history) {
    if (history.size() < 2) {
        return 0;
    }
    return std::min<std::size_t>(static_cast<std::size_t>(config.window_blocks),
                                 history.size() - 1);
}

std::optional<double> windowed_mean_block_time(const SaaConfig& config,
                                               std::span<const BlockRecord> history) {
    const std::size_t n = usable_intervals(config, history);
    if (n == 0) {
        return std::nullopt;
    }
    const std::size_t last = history.size() - 1;
    return (history[last].timestamp_s - history[last - n].timestamp_s) / static_cast<double>(n);
}

double next_expected_hashes(const SaaConfig& config, std::span<const BlockRecord> history,
                            std::optional<double> observed_hash_rate) {
    config.validate();
    if (config.kind == SaaKind::ideal) {
        if (!observed_hash_rate || !(*observed_hash_rate > 0.0)) {
            throw PreconditionError("ideal SAA requires a positive observed hash rate");
        }
        return *observed_hash_rate * config.target_time_s;
    }

    if (history.empty()) {
        if (!(config.genesis_expected_hashes > 0.0)) {
            throw PreconditionError("empty history and no genesis expected hashes configured");
        }
        return config.genesis_expected_hashes;
    }
    const std::size_t n = usable_intervals(config, history);
    if (n == 0) {
        return history.back().expected_hashes;
    }
    const std::size_t last = history.size() - 1;
    double work = 0.0;
    for (std::size_t i = last + 1 - n; i <= last; ++i) {
        work += history[i].expected_hashes;
    }
    const double elapsed = history[last].timestamp_s - history[last - n].timestamp_s;
    if (!(elapsed > 0.0)) {
        return history.back().expected_hashes;
    }
    return config.target_time_s * work / elapsed;
}

bool is_at_rest(const SaaConfig& config, std::span<const BlockRecord> history, double tolerance) {
    config.validate();
    const std::size_t needed =
        config.kind == SaaKind::rolling_window ? static_cast<std::size_t>(config.window_blocks) : 1;
    const std::size_t n = usable_intervals(config, history);
    if (n < needed) {
        throw PreconditionError("insufficient history to judge whether the SAA is at rest");
    }
    const double mean = *windowed_mean_block_time(config, history);
    return std::abs(mean - config.target_time_s) <= tolerance * config.target_time_s;
}

const char* to_string(SaaKind kind) {
    return kind == SaaKind::ideal ? "ideal" : "rolling_window";
}

SaaKind parse_saa_kind(std::string_view text) {
    if (text == "ideal") {
        return SaaKind::ideal;
    }
    if (text == "rolling_window" || text == "rolling") {
        return SaaKind::rolling_window;
    }
    throw InputError("unknown SAA kind '" + std::string(text) + "'");
}

} // namespace hashalloc
