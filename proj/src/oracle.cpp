#include "hashalloc/oracle.hpp"

#include "hashalloc/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace hashalloc::oracle {

namespace mp = boost::multiprecision;

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::HeightGap:
        return "HeightGap";
    case ErrorCode::LinkMismatch:
        return "LinkMismatch";
    case ErrorCode::DigestMismatch:
        return "DigestMismatch";
    case ErrorCode::InsufficientWork:
        return "InsufficientWork";
    case ErrorCode::UnknownHeader:
        return "UnknownHeader";
    case ErrorCode::FutureBlock:
        return "FutureBlock";
    case ErrorCode::NonpositiveRate:
        return "NonpositiveRate";
    }
    return "Unknown";
}

OracleError::OracleError(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

namespace {

void put_le(std::vector<std::uint8_t>& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

mp::cpp_int to_integer(const Digest& d) {
    mp::cpp_int value;
    mp::import_bits(value, d.begin(), d.end(), 8, true);
    return value;
}

mp::cpp_int target_for(double difficulty) {
    int exp = 0;
    const double frac = std::frexp(difficulty, &exp);
    // difficulty = mantissa * 2^(exp - 53), mantissa a 53-bit integer.
    const auto mantissa = static_cast<std::uint64_t>(std::ldexp(frac, 53));
    const int shift = 224 - (exp - 53);
    if (shift < 0) {
        return 0;
    }
    mp::cpp_int numerator = 1;
    numerator <<= shift;
    return numerator / mantissa;
}

} // namespace

Digest header_digest(const Header& h) {
    std::vector<std::uint8_t> buf;
    buf.reserve(8 + 32 + 8 + 8 + 8);
    put_le(buf, static_cast<std::uint64_t>(h.height));
    buf.insert(buf.end(), h.prev_hash.begin(), h.prev_hash.end());
    put_le(buf, std::bit_cast<std::uint64_t>(h.difficulty));
    put_le(buf, static_cast<std::uint64_t>(h.timestamp_s));
    put_le(buf, h.nonce);

    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(buf.data(), buf.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    return out;
}

bool meets_target(const Digest& digest, double difficulty) {
    if (!(difficulty > 0.0) || !std::isfinite(difficulty)) {
        return false;
    }
    return to_integer(digest) <= target_for(difficulty);
}

double hash_rate_from_difficulty(double difficulty, double target_block_time_s) {
    if (!(difficulty > 0.0)) {
        throw DomainError("difficulty must be positive");
    }
    if (!(target_block_time_s > 0.0)) {
        throw DomainError("target block time must be positive");
    }
    return std::ldexp(difficulty, 32) / target_block_time_s;
}

void validate_successor(const Header& tip, const Header& h) {
    if (h.height != tip.height + 1) {
        throw OracleError(ErrorCode::HeightGap, "expected height " + std::to_string(tip.height + 1) +
                                                    ", got " + std::to_string(h.height));
    }
    if (h.prev_hash != tip.self_hash) {
        throw OracleError(ErrorCode::LinkMismatch,
                          "header " + std::to_string(h.height) + " does not link to the tip");
    }
    if (header_digest(h) != h.self_hash) {
        throw OracleError(ErrorCode::DigestMismatch,
                          "header " + std::to_string(h.height) + " hash does not match its contents");
    }
    if (!meets_target(h.self_hash, h.difficulty)) {
        throw OracleError(ErrorCode::InsufficientWork,
                          "header " + std::to_string(h.height) + " hash is above its target");
    }
}

HeaderChain::HeaderChain(Header genesis) {
    if (header_digest(genesis) != genesis.self_hash) {
        throw OracleError(ErrorCode::DigestMismatch, "genesis hash does not match its contents");
    }
    if (!meets_target(genesis.self_hash, genesis.difficulty)) {
        throw OracleError(ErrorCode::InsufficientWork, "genesis hash is above its target");
    }
    headers_.push_back(genesis);
}

void HeaderChain::update(const Header& h) {
    validate_successor(headers_.back(), h);
    headers_.push_back(h);
}

bool HeaderChain::contains(std::int64_t height) const {
    return height >= genesis_height() && height <= tip_height();
}

const Header& HeaderChain::at(std::int64_t height) const {
    if (!contains(height)) {
        throw OracleError(ErrorCode::UnknownHeader,
                          "no stored header at height " + std::to_string(height));
    }
    return headers_[static_cast<std::size_t>(height - genesis_height())];
}

double estimate_price_ratio(double H_A, double H_B, const ChainParams& a, const ChainParams& b) {
    if (!(H_A > 0.0) || !(H_B >= 0.0)) {
        throw OracleError(ErrorCode::NonpositiveRate, "hash rate of chain A must be positive");
    }
    if (!(a.coins_per_block > 0.0) || !(b.coins_per_block > 0.0) ||
        !(a.target_block_time_s > 0.0) || !(b.target_block_time_s > 0.0)) {
        throw DomainError("coins per block and target block times must be positive");
    }
    const double c_ratio = a.coins_per_block / b.coins_per_block;
    const double T_A = a.target_block_time_s;
    const double T_B = b.target_block_time_s;
    return c_ratio / T_A * (T_B * (H_A + H_B) / H_A - T_B + T_A) - c_ratio;
}

PriceRatioOracle::PriceRatioOracle(ChainParams a, ChainParams b, HeaderChain chain_A,
                                   HeaderChain chain_B)
    : params_A_(a), params_B_(b), chain_A_(std::move(chain_A)), chain_B_(std::move(chain_B)) {}

double PriceRatioOracle::query(std::int64_t height_A, std::int64_t height_B) const {
    if (height_A > chain_A_.tip_height()) {
        throw OracleError(ErrorCode::FutureBlock,
                          "chain A has not reached height " + std::to_string(height_A));
    }
    const Header& hA = chain_A_.at(height_A);
    const Header& hB = chain_B_.at(height_B);
    const double H_A = hash_rate_from_difficulty(hA.difficulty, params_A_.target_block_time_s);
    const double H_B = hash_rate_from_difficulty(hB.difficulty, params_B_.target_block_time_s);
    return estimate_price_ratio(H_A, H_B, params_A_, params_B_);
}

Header mine_header(std::int64_t height, const Digest& prev_hash, double difficulty,
                   std::int64_t timestamp_s, std::uint64_t start_nonce) {
    Header h{height, prev_hash, {}, difficulty, timestamp_s, start_nonce};
    for (;; ++h.nonce) {
        h.self_hash = header_digest(h);
        if (meets_target(h.self_hash, difficulty)) {
            return h;
        }
    }
}

Header mine_failing_header(std::int64_t height, const Digest& prev_hash, double difficulty,
                           std::int64_t timestamp_s, std::uint64_t start_nonce) {
    Header h{height, prev_hash, {}, difficulty, timestamp_s, start_nonce};
    for (;; ++h.nonce) {
        h.self_hash = header_digest(h);
        if (!meets_target(h.self_hash, difficulty)) {
            return h;
        }
    }
}

std::vector<Header> mine_chain(std::int64_t genesis_height, std::size_t count,
                               const std::vector<double>& difficulties, std::int64_t start_time,
                               std::int64_t spacing_s) {
    if (difficulties.empty()) {
        throw PreconditionError("at least one difficulty is required");
    }
    std::vector<Header> chain;
    chain.reserve(count);
    Digest prev{};
    for (std::size_t i = 0; i < count; ++i) {
        const double d = difficulties[std::min(i, difficulties.size() - 1)];
        chain.push_back(mine_header(genesis_height + static_cast<std::int64_t>(i), prev, d,
                                    start_time + static_cast<std::int64_t>(i) * spacing_s));
        prev = chain.back().self_hash;
    }
    return chain;
}

std::string to_hex(const Digest& d) {
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (const auto byte : d) {
        out << std::setw(2) << static_cast<int>(byte);
    }
    return out.str();
}

Digest digest_from_hex(const std::string& hex) {
    if (hex.size() != 64) {
        throw InputError("digest must be 64 hex characters");
    }
    Digest d{};
    for (std::size_t i = 0; i < 32; ++i) {
        unsigned value = 0;
        const auto byte = hex.substr(2 * i, 2);
        std::istringstream in(byte);
        if (!(in >> std::hex >> value) || !std::isxdigit(byte[0]) || !std::isxdigit(byte[1])) {
            throw InputError("invalid hex digit in digest");
        }
        d[i] = static_cast<std::uint8_t>(value);
    }
    return d;
}

std::vector<Header> parse_fixture(std::istream& in) {
    std::vector<Header> headers;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        Header h;
        std::string prev;
        std::string self;
        if (!(fields >> h.height >> prev >> self >> h.difficulty >> h.timestamp_s >> h.nonce)) {
            throw InputError("fixture line " + std::to_string(line_no) + ": expected 6 fields");
        }
        std::string extra;
        if (fields >> extra) {
            throw InputError("fixture line " + std::to_string(line_no) + ": trailing field");
        }
        try {
            h.prev_hash = digest_from_hex(prev);
            h.self_hash = digest_from_hex(self);
        } catch (const InputError& e) {
            throw InputError("fixture line " + std::to_string(line_no) + ": " + e.what());
        }
        headers.push_back(h);
    }
    return headers;
}

void write_fixture(std::ostream& out, std::span<const Header> headers) {
    out << "# height prev_hash self_hash difficulty timestamp nonce\n";
    for (const Header& h : headers) {
        out << h.height << ' ' << to_hex(h.prev_hash) << ' ' << to_hex(h.self_hash) << ' '
            << std::setprecision(17) << h.difficulty << ' ' << h.timestamp_s << ' ' << h.nonce
            << '\n';
    }
}

} // namespace hashalloc::oracle
