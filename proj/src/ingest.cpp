#include "hashalloc/ingest.hpp"

#include "csv.hpp"
#include "hashalloc/econ.hpp"
#include "hashalloc/errors.hpp"
#include "hashalloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace hashalloc::ingest {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void require_increasing(std::int64_t prev, std::int64_t ts, bool first, int line_no) {
    if (!first && ts <= prev) {
        throw InputError(csv::row_error(line_no, "timestamps must be strictly increasing"));
    }
}

double require_positive(double v, int line_no, const char* column) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InputError(csv::row_error(line_no, std::string(column) + " must be positive"));
    }
    return v;
}

double require_nonnegative(double v, int line_no, const char* column) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InputError(csv::row_error(line_no, std::string(column) + " must be non-negative"));
    }
    return v;
}

} // namespace

std::vector<PriceRow> parse_prices_csv(std::istream& in) {
    csv::Reader reader(in);
    const auto c_ts = reader.column("timestamp");
    const auto c_a = reader.column("price_A");
    const auto c_b = reader.column("price_B");
    std::vector<PriceRow> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const int ln = reader.line_no();
        PriceRow r;
        r.timestamp = csv::parse_int(f[c_ts], ln, "timestamp");
        r.price_A = require_nonnegative(csv::parse_double(f[c_a], ln, "price_A"), ln, "price_A");
        r.price_B = require_nonnegative(csv::parse_double(f[c_b], ln, "price_B"), ln, "price_B");
        if (r.price_A + r.price_B == 0.0) {
            throw InputError(csv::row_error(ln, "prices must not both be zero"));
        }
        require_increasing(rows.empty() ? 0 : rows.back().timestamp, r.timestamp, rows.empty(), ln);
        rows.push_back(r);
    }
    return rows;
}

std::vector<DifficultyRow> parse_difficulty_csv(std::istream& in) {
    csv::Reader reader(in);
    const auto c_ts = reader.column("timestamp");
    const auto c_a = reader.column("difficulty_A");
    const auto c_b = reader.column("difficulty_B");
    std::vector<DifficultyRow> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const int ln = reader.line_no();
        DifficultyRow r;
        r.timestamp = csv::parse_int(f[c_ts], ln, "timestamp");
        if (!f[c_a].empty()) {
            r.difficulty_A =
                require_positive(csv::parse_double(f[c_a], ln, "difficulty_A"), ln, "difficulty_A");
        }
        if (!f[c_b].empty()) {
            r.difficulty_B =
                require_positive(csv::parse_double(f[c_b], ln, "difficulty_B"), ln, "difficulty_B");
        }
        if (!r.difficulty_A && !r.difficulty_B) {
            throw InputError(csv::row_error(ln, "row carries no difficulty"));
        }
        require_increasing(rows.empty() ? 0 : rows.back().timestamp, r.timestamp, rows.empty(), ln);
        rows.push_back(r);
    }
    return rows;
}

std::vector<HistoryRow> parse_history_csv(std::istream& in) {
    csv::Reader reader(in);
    const auto c_ts = reader.column("timestamp");
    const auto c_pa = reader.column("price_A");
    const auto c_pb = reader.column("price_B");
    const auto c_ha = reader.column("hash_rate_A");
    const auto c_hb = reader.column("hash_rate_B");
    std::vector<HistoryRow> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const int ln = reader.line_no();
        HistoryRow r;
        r.timestamp = csv::parse_int(f[c_ts], ln, "timestamp");
        r.price_A = require_nonnegative(csv::parse_double(f[c_pa], ln, "price_A"), ln, "price_A");
        r.price_B = require_nonnegative(csv::parse_double(f[c_pb], ln, "price_B"), ln, "price_B");
        r.hash_rate_A =
            require_nonnegative(csv::parse_double(f[c_ha], ln, "hash_rate_A"), ln, "hash_rate_A");
        r.hash_rate_B =
            require_nonnegative(csv::parse_double(f[c_hb], ln, "hash_rate_B"), ln, "hash_rate_B");
        require_increasing(rows.empty() ? 0 : rows.back().timestamp, r.timestamp, rows.empty(), ln);
        rows.push_back(r);
    }
    validate_history(rows);
    return rows;
}

void validate_history(const std::vector<HistoryRow>& rows) {
    if (rows.empty()) {
        throw InputError("history is empty");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const HistoryRow& r = rows[i];
        if (r.price_A + r.price_B <= 0.0 || r.hash_rate_A + r.hash_rate_B <= 0.0) {
            throw InputError("history row " + std::to_string(i + 1) +
                             ": prices and hash rates must not both be zero");
        }
    }
}

std::vector<HistoryRow> join_history(const std::vector<PriceRow>& prices,
                                     const std::vector<DifficultyRow>& difficulties,
                                     const JoinOptions& options) {
    if (options.cadence_s <= 0) {
        throw PreconditionError("cadence must be positive");
    }
    if (prices.empty() || difficulties.empty()) {
        throw InputError("price and difficulty series must both be non-empty");
    }

    // First time at which both difficulties are known.
    std::optional<std::int64_t> seen_A;
    std::optional<std::int64_t> seen_B;
    std::int64_t diff_start = 0;
    bool diff_ready = false;
    for (const auto& d : difficulties) {
        if (d.difficulty_A && !seen_A) {
            seen_A = d.timestamp;
        }
        if (d.difficulty_B && !seen_B) {
            seen_B = d.timestamp;
        }
        if (seen_A && seen_B) {
            diff_start = std::max(*seen_A, *seen_B);
            diff_ready = true;
            break;
        }
    }
    if (!diff_ready) {
        throw InputError("difficulty series never reports both chains");
    }

    const std::int64_t start = std::max(prices.front().timestamp, diff_start);
    const std::int64_t end = std::min(prices.back().timestamp, difficulties.back().timestamp);
    if (start > end) {
        throw InputError("price and difficulty series do not overlap in time");
    }

    std::vector<HistoryRow> out;
    std::size_t ip = 0;
    std::size_t id = 0;
    double d_A = 0.0;
    double d_B = 0.0;
    for (std::int64_t t = start; t <= end; t += options.cadence_s) {
        while (ip + 1 < prices.size() && prices[ip + 1].timestamp <= t) {
            ++ip;
        }
        while (id < difficulties.size() && difficulties[id].timestamp <= t) {
            if (difficulties[id].difficulty_A) {
                d_A = *difficulties[id].difficulty_A;
            }
            if (difficulties[id].difficulty_B) {
                d_B = *difficulties[id].difficulty_B;
            }
            ++id;
        }
        HistoryRow r;
        r.timestamp = t;
        r.price_A = prices[ip].price_A;
        r.price_B = prices[ip].price_B;
        r.hash_rate_A = oracle::hash_rate_from_difficulty(d_A, options.target_block_time_A);
        r.hash_rate_B = oracle::hash_rate_from_difficulty(d_B, options.target_block_time_B);
        out.push_back(r);
    }
    return out;
}

std::vector<ComparisonRow> compare_allocation(const std::vector<HistoryRow>& rows,
                                              const CompareOptions& options) {
    validate_history(rows);
    if (!(options.c_A > 0.0) || !(options.c_B > 0.0)) {
        throw DomainError("coins per block must be positive");
    }
    std::vector<ComparisonRow> out;
    out.reserve(rows.size());
    for (const HistoryRow& r : rows) {
        const double V_A = options.c_A * r.price_A;
        const double V_B = options.c_B * r.price_B;
        const double R = V_A / (V_A + V_B);
        const Allocation w_e = equilibrium_allocation(options.T_A, options.T_B, R);
        ComparisonRow c;
        c.timestamp = r.timestamp;
        c.w_A_actual = r.hash_rate_A / (r.hash_rate_A + r.hash_rate_B);
        c.w_eA = w_e.w_A;
        c.deviation = std::abs(c.w_A_actual - c.w_eA);
        c.flagged = c.deviation > options.flag_threshold;
        out.push_back(c);
    }
    return out;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << "timestamp,w_A_actual,w_eA,deviation,flagged\n";
    for (const auto& r : rows) {
        out << r.timestamp << ',' << fmt(r.w_A_actual) << ',' << fmt(r.w_eA) << ','
            << fmt(r.deviation) << ',' << (r.flagged ? 1 : 0) << '\n';
    }
}

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& rows) {
    out << "timestamp,price_A,price_B,hash_rate_A,hash_rate_B\n";
    for (const auto& r : rows) {
        out << r.timestamp << ',' << fmt(r.price_A) << ',' << fmt(r.price_B) << ','
            << fmt(r.hash_rate_A) << ',' << fmt(r.hash_rate_B) << '\n';
    }
}

} // namespace hashalloc::ingest
