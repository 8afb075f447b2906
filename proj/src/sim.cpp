#include "hashalloc/sim.hpp"

#include "hashalloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hashalloc {

void ScenarioConfig::validate() const {
    chain_A.spec.validate();
    chain_B.spec.validate();
    chain_A.saa.validate();
    chain_B.saa.validate();
    population.validate();
    if (!(total_hash_rate > 0.0)) {
        throw PreconditionError("total_hash_rate must be positive");
    }
    if (!(price_A > 0.0)) {
        throw PreconditionError("price_A must be positive");
    }
    if (!(initial_price_ratio > 0.0)) {
        throw PreconditionError("initial_price_ratio must be positive");
    }
    if (!(walk_sigma >= 0.0)) {
        throw PreconditionError("walk_sigma must be non-negative");
    }
    if (!(warmup_days >= 0.0) || !(duration_days > warmup_days)) {
        throw PreconditionError("require duration_days > warmup_days >= 0");
    }
}

double price_step(double ratio, double sigma, Rng& rng) {
    if (!(ratio > 0.0)) {
        throw DomainError("price ratio must be positive");
    }
    if (sigma == 0.0) {
        return ratio;
    }
    double next = ratio + sigma * rng.normal();
    if (next < kPriceRatioFloor) {
        next = 2.0 * kPriceRatioFloor - next;
    }
    return next;
}

BlockRace next_block_native(double expected_hashes_A, double expected_hashes_B,
                            double native_rate_A, double native_rate_B, Rng& rng) {
    if (!(native_rate_A > 0.0) && !(native_rate_B > 0.0)) {
        throw DomainError("no hash rate on either chain");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    // Both draws are always taken so the random stream does not depend on the
    // allocation being degenerate.
    const double tA = rng.exponential(1.0);
    const double tB = rng.exponential(1.0);
    const double solveA = native_rate_A > 0.0 ? tA * expected_hashes_A / native_rate_A : inf;
    const double solveB = native_rate_B > 0.0 ? tB * expected_hashes_B / native_rate_B : inf;
    if (solveA <= solveB) {
        return {ChainId::A, solveA};
    }
    return {ChainId::B, solveB};
}

BlockRace next_block(double expected_hashes_A, double expected_hashes_B, const Allocation& w,
                     double H, Rng& rng) {
    return next_block_native(expected_hashes_A, expected_hashes_B, w.w_A * H, w.w_B * H, rng);
}

namespace {

struct ChainState {
    const SimChain* chain = nullptr;
    std::vector<BlockRecord> history;
    double expected_hashes = 0.0;
};

// Regularized (chain-A) hash rate to native hash rate on chain X.
double to_native(double regularized, const ChainSpec& reference, const ChainSpec& x) {
    return regularized * x.spot_hash_price / reference.spot_hash_price;
}

double observed_har(const ChainState& state, const ChainSpec& reference, double coinbase_value,
                    double regularized_rate, HarObservation mode) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const ChainSpec& spec = state.chain->spec;
    if (mode == HarObservation::difficulty) {
        // Expected hashes are native; convert to regularized hashes per block.
        const double reg_hashes =
            state.expected_hashes * reference.spot_hash_price / spec.spot_hash_price;
        return coinbase_value / reg_hashes;
    }
    if (!(regularized_rate > 0.0)) {
        return coinbase_value > 0.0 ? inf : 0.0;
    }
    double mean_time = spec.target_block_time_s;
    const auto& h = state.history;
    if (mode == HarObservation::last_gap) {
        if (h.size() >= 2) {
            mean_time = h.back().timestamp_s - h[h.size() - 2].timestamp_s;
        }
    } else {
        mean_time = windowed_mean_block_time(state.chain->saa, h).value_or(mean_time);
    }
    if (!(mean_time > 0.0)) {
        return coinbase_value > 0.0 ? inf : 0.0;
    }
    return coinbase_value / (mean_time * regularized_rate);
}

} // namespace

SimTrace run(const ScenarioConfig& config) {
    config.validate();
    // Separate streams so runs that differ only in SAA or policy see the same
    // price path event by event.
    Rng rng(config.rng_seed);
    Rng price_rng(derive_seed(config.rng_seed, 0x7072696365ULL));
    const ChainSpec& ref = config.chain_A.spec;
    const double H = config.total_hash_rate;
    const double duration_s = config.duration_days * kSecondsPerDay;

    double ratio = config.initial_price_ratio;
    auto relative_reward = [&](double r) {
        const MarketState market{config.price_A, config.price_A * r};
        return market.relative_reward(config.chain_A.spec, config.chain_B.spec);
    };
    auto equilibrium = [&](double r) {
        return equilibrium_allocation(config.chain_A.spec.target_block_time_s,
                                      config.chain_B.spec.target_block_time_s,
                                      relative_reward(r));
    };

    MinerPopulation population = config.population;
    if (config.start_at_equilibrium) {
        population.nonloyal_split = split_for_allocation(population, equilibrium(ratio).w_A);
    }

    ChainState states[2];
    states[0].chain = &config.chain_A;
    states[1].chain = &config.chain_B;
    {
        const Allocation w0 = aggregate_allocation(population);
        const double reg[2] = {w0.w_A * H, w0.w_B * H};
        for (int i = 0; i < 2; ++i) {
            const SimChain& c = *states[i].chain;
            const double native = to_native(reg[i], ref, c.spec);
            double genesis = c.saa.kind == SaaKind::ideal ? 0.0 : c.saa.genesis_expected_hashes;
            if (!(genesis > 0.0)) {
                genesis = native * c.saa.target_time_s;
            }
            if (!(genesis > 0.0)) {
                // A chain starting with no hash rate still needs a finite
                // difficulty; use the whole network's rate.
                genesis = to_native(H, ref, c.spec) * c.saa.target_time_s;
            }
            states[i].expected_hashes = genesis;
            states[i].history.reserve(
                static_cast<std::size_t>(duration_s / c.saa.target_time_s * 1.2) + 16);
            states[i].history.push_back({0, 0.0, genesis, native});
        }
    }

    SimTrace trace;
    double t = 0.0;
    for (std::int64_t tau = 0;; ++tau) {
        ratio = price_step(ratio, config.walk_sigma, price_rng);

        const Allocation w = aggregate_allocation(population);
        const double native_A = to_native(w.w_A * H, ref, config.chain_A.spec);
        const double native_B = to_native(w.w_B * H, ref, config.chain_B.spec);
        const BlockRace race = next_block_native(states[0].expected_hashes,
                                                 states[1].expected_hashes, native_A, native_B, rng);
        t += race.elapsed_s;
        if (t > duration_s) {
            break;
        }

        const int idx = race.winner == ChainId::A ? 0 : 1;
        ChainState& win = states[idx];
        const double solved_hashes = win.expected_hashes;
        const double native_win = idx == 0 ? native_A : native_B;
        const BlockRecord& prev = win.history.back();
        const double dt = t - prev.timestamp_s;
        win.history.push_back({prev.height + 1, t, solved_hashes, native_win});
        win.expected_hashes = next_expected_hashes(win.chain->saa, win.history, native_win);

        const double V_A = config.chain_A.spec.coins_per_block * config.price_A;
        const double V_B = config.chain_B.spec.coins_per_block * config.price_A * ratio;
        const HarVector pi{
            observed_har(states[0], ref, V_A, w.w_A * H, config.har_observation),
            observed_har(states[1], ref, V_B, w.w_B * H, config.har_observation)};
        population = policy_step(population, pi);

        const Allocation w_next = aggregate_allocation(population);
        // An ideal SAA knows the true rate at all times, so both chains are at
        // rest for the allocation the next race runs under.
        const double native_next[2] = {to_native(w_next.w_A * H, ref, config.chain_A.spec),
                                       to_native(w_next.w_B * H, ref, config.chain_B.spec)};
        for (int i = 0; i < 2; ++i) {
            if (states[i].chain->saa.kind == SaaKind::ideal && native_next[i] > 0.0) {
                states[i].expected_hashes =
                    next_expected_hashes(states[i].chain->saa, states[i].history, native_next[i]);
            }
        }
        const Allocation w_e = equilibrium(ratio);
        trace.rows.push_back({tau, t, race.winner, win.history.back().height, solved_hashes, dt,
                              w_next.w_A, w_e.w_A, ratio, pi.pi_A, pi.pi_B});
    }
    return trace;
}

namespace {

std::size_t first_post_warmup(const SimTrace& trace, double warmup_s) {
    const auto it = std::lower_bound(
        trace.rows.begin(), trace.rows.end(), warmup_s,
        [](const TraceRow& row, double value) { return row.time_s < value; });
    const auto first = static_cast<std::size_t>(it - trace.rows.begin());
    if (first >= trace.rows.size()) {
        throw PreconditionError("no trace events after the warmup window");
    }
    return first;
}

} // namespace

ConvergenceMetrics convergence_metrics(const SimTrace& trace, double warmup_s, double within) {
    const std::size_t first = first_post_warmup(trace, warmup_s);
    ConvergenceMetrics m;
    double sum = 0.0;
    std::size_t inside = 0;
    for (std::size_t i = first; i < trace.rows.size(); ++i) {
        const double dev = std::abs(trace.rows[i].w_B() - trace.rows[i].w_eB());
        sum += dev;
        m.max_abs_dev = std::max(m.max_abs_dev, dev);
        if (dev <= within) {
            ++inside;
        }
    }
    m.events = trace.rows.size() - first;
    m.mean_abs_dev = sum / static_cast<double>(m.events);
    m.fraction_within = static_cast<double>(inside) / static_cast<double>(m.events);
    return m;
}

OscillationMetrics oscillation_metrics(const SimTrace& trace, double warmup_s) {
    const std::size_t first = first_post_warmup(trace, warmup_s);
    OscillationMetrics m;
    m.min_w_B = std::numeric_limits<double>::infinity();
    m.max_w_B = -std::numeric_limits<double>::infinity();
    int last_sign = 0;
    std::size_t first_crossing = 0;
    std::size_t last_crossing = 0;
    for (std::size_t i = first; i < trace.rows.size(); ++i) {
        const TraceRow& row = trace.rows[i];
        m.min_w_B = std::min(m.min_w_B, row.w_B());
        m.max_w_B = std::max(m.max_w_B, row.w_B());
        const double d = row.w_B() - row.w_eB();
        const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (sign == 0) {
            continue;
        }
        if (last_sign != 0 && sign != last_sign) {
            if (m.crossing_count == 0) {
                first_crossing = i;
            }
            last_crossing = i;
            ++m.crossing_count;
        }
        last_sign = sign;
    }
    m.events = trace.rows.size() - first;
    m.amplitude = m.max_w_B - m.min_w_B;
    if (m.crossing_count >= 2) {
        m.dominant_period_events = 2.0 * static_cast<double>(last_crossing - first_crossing) /
                                   static_cast<double>(m.crossing_count - 1);
    }
    return m;
}

const char* to_string(HarObservation mode) {
    switch (mode) {
    case HarObservation::windowed_time:
        return "windowed_time";
    case HarObservation::last_gap:
        return "last_gap";
    case HarObservation::difficulty:
        break;
    }
    return "difficulty";
}

HarObservation parse_har_observation(std::string_view text) {
    if (text == "windowed_time") {
        return HarObservation::windowed_time;
    }
    if (text == "last_gap") {
        return HarObservation::last_gap;
    }
    if (text == "difficulty") {
        return HarObservation::difficulty;
    }
    throw InputError("unknown HAR observation mode '" + std::string(text) + "'");
}

} // namespace hashalloc
