#pragma once

// Historical-data path: parse price and difficulty CSVs, resample them onto a
// common cadence, and compare the actual hash rate allocation against the
// equilibrium implied by prices.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace hashalloc::ingest {

struct PriceRow {
    std::int64_t timestamp = 0;
    double price_A = 0.0;
    double price_B = 0.0;
};

// Either difficulty may be absent on a row (per-block series of two chains
// interleaved in one file).
struct DifficultyRow {
    std::int64_t timestamp = 0;
    std::optional<double> difficulty_A;
    std::optional<double> difficulty_B;
};

struct HistoryRow {
    std::int64_t timestamp = 0;
    double price_A = 0.0;
    double price_B = 0.0;
    double hash_rate_A = 0.0;
    double hash_rate_B = 0.0;
};

// Header row required: timestamp,price_A,price_B (any column order).
std::vector<PriceRow> parse_prices_csv(std::istream& in);
// Header row required: timestamp,difficulty_A,difficulty_B.
std::vector<DifficultyRow> parse_difficulty_csv(std::istream& in);
// Header row required: timestamp,price_A,price_B,hash_rate_A,hash_rate_B.
std::vector<HistoryRow> parse_history_csv(std::istream& in);

struct JoinOptions {
    std::int64_t cadence_s = 3600;
    double target_block_time_A = 600.0;
    double target_block_time_B = 600.0;
};

// Resamples both series to t0, t0 + cadence, ... using the latest observation
// at or before each grid time (last observation carried forward). t0 is the
// first time at which a price and both difficulties are known; the grid ends
// at the earlier of the two series' last timestamps. Difficulties become hash
// rates via 2^32 * D / T.
std::vector<HistoryRow> join_history(const std::vector<PriceRow>& prices,
                                     const std::vector<DifficultyRow>& difficulties,
                                     const JoinOptions& options);

void validate_history(const std::vector<HistoryRow>& rows);

struct ComparisonRow {
    std::int64_t timestamp = 0;
    double w_A_actual = 0.0;
    double w_eA = 0.0;
    double deviation = 0.0;
    bool flagged = false;
};

struct CompareOptions {
    double T_A = 600.0;
    double T_B = 600.0;
    double c_A = 1.0;
    double c_B = 1.0;
    // Rows whose deviation exceeds this are flagged as disturbances.
    double flag_threshold = 0.05;
};

std::vector<ComparisonRow> compare_allocation(const std::vector<HistoryRow>& rows,
                                              const CompareOptions& options);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& rows);

} // namespace hashalloc::ingest
