#pragma once

// Price-ratio oracle: a light client for chain B's header chain plus the
// estimator that inverts the allocation equilibrium to recover P_B / P_A from
// the two chains' difficulties.
//
// Digests are SHA-256 over a fixed little-endian header serialization and are
// compared to the target as 256-bit big-endian integers (byte 0 is the most
// significant). Hex strings list bytes in that same order.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hashalloc::oracle {

using Digest = std::array<std::uint8_t, 32>;

enum class ErrorCode {
    HeightGap,
    LinkMismatch,
    DigestMismatch,
    InsufficientWork,
    UnknownHeader,
    FutureBlock,
    NonpositiveRate,
};

const char* to_string(ErrorCode code);

class OracleError : public std::runtime_error {
public:
    OracleError(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct Header {
    std::int64_t height = 0;
    Digest prev_hash{};
    Digest self_hash{};
    double difficulty = 1.0;
    std::int64_t timestamp_s = 0;
    std::uint64_t nonce = 0;
};

// Digest of every field except self_hash.
Digest header_digest(const Header& h);

// floor(2^256 / (2^32 * difficulty)), i.e. floor(2^224 / difficulty).
bool meets_target(const Digest& digest, double difficulty);

// Expected hashes per block are 2^32 * D, so the rate is 2^32 * D / T.
double hash_rate_from_difficulty(double difficulty, double target_block_time_s);

// Stored headers from a trusted genesis. The genesis header must carry a
// correct digest meeting its own target; its link is not checked.
class HeaderChain {
public:
    explicit HeaderChain(Header genesis);

    // Appends h iff it extends the tip: height = tip + 1, prev_hash = tip's
    // hash, self_hash is h's digest, and the digest meets h's difficulty
    // target. Throws OracleError naming the first violated condition.
    void update(const Header& h);

    const Header& tip() const { return headers_.back(); }
    std::int64_t genesis_height() const { return headers_.front().height; }
    std::int64_t tip_height() const { return headers_.back().height; }
    bool contains(std::int64_t height) const;
    // Throws OracleError(UnknownHeader) for heights outside the chain.
    const Header& at(std::int64_t height) const;
    std::span<const Header> headers() const { return headers_; }

private:
    std::vector<Header> headers_;
};

// Validation applied by HeaderChain::update, exposed for callers that only
// need the verdict.
void validate_successor(const Header& tip, const Header& h);

struct ChainParams {
    double coins_per_block = 1.0;
    double target_block_time_s = 600.0;
};

// Equilibrium inversion:
// (c_A / (c_B T_A)) * (T_B (H_A + H_B) / H_A - T_B + T_A) - c_A / c_B.
double estimate_price_ratio(double H_A, double H_B, const ChainParams& a, const ChainParams& b);

// Light client for chain B running alongside chain A's own headers.
class PriceRatioOracle {
public:
    PriceRatioOracle(ChainParams a, ChainParams b, HeaderChain chain_A, HeaderChain chain_B);

    // New header on chain A (the oracle's native chain).
    void observe_local(const Header& h) { chain_A_.update(h); }
    void update(const Header& h_B) { chain_B_.update(h_B); }

    // Estimated P_B / P_A when chain A was at height_A and chain B at
    // height_B. Throws FutureBlock if height_A has not been mined yet,
    // UnknownHeader if height_B is not stored.
    double query(std::int64_t height_A, std::int64_t height_B) const;

    const HeaderChain& chain_A() const { return chain_A_; }
    const HeaderChain& chain_B() const { return chain_B_; }

private:
    ChainParams params_A_;
    ChainParams params_B_;
    HeaderChain chain_A_;
    HeaderChain chain_B_;
};

// Fixture support: a toy proof of work over the nonce field.
Header mine_header(std::int64_t height, const Digest& prev_hash, double difficulty,
                   std::int64_t timestamp_s, std::uint64_t start_nonce = 0);
// Header with a correct digest that does NOT meet its target.
Header mine_failing_header(std::int64_t height, const Digest& prev_hash, double difficulty,
                           std::int64_t timestamp_s, std::uint64_t start_nonce = 0);
std::vector<Header> mine_chain(std::int64_t genesis_height, std::size_t count,
                               const std::vector<double>& difficulties, std::int64_t start_time,
                               std::int64_t spacing_s);

std::string to_hex(const Digest& d);
Digest digest_from_hex(const std::string& hex);

// One header per line: height prev_hash self_hash difficulty timestamp nonce.
// Blank lines and lines starting with '#' are ignored.
std::vector<Header> parse_fixture(std::istream& in);
void write_fixture(std::ostream& out, std::span<const Header> headers);

} // namespace hashalloc::oracle
