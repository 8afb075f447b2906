#include "hashalloc/scenario.hpp"

#include "csv.hpp"
#include "hashalloc/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace hashalloc {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Shortest text that parses back to the same double.
std::string fmt_exact(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& v, int line_no) {
    try {
        return csv::parse_double(v, line_no, key.c_str());
    } catch (const InputError&) {
        throw InputError("scenario line " + std::to_string(line_no) + ": '" + key +
                         "' expects a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v, int line_no) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw InputError("scenario line " + std::to_string(line_no) + ": '" + key +
                     "' expects true or false, got '" + v + "'");
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&, int)>;

void add_chain_keys(std::map<std::string, Setter>& keys, const std::string& prefix,
                    SimChain ScenarioConfig::*chain) {
    keys[prefix + ".target_block_time_s"] = [chain](ScenarioConfig& c, const std::string& k,
                                                    const std::string& v, int ln) {
        const double T = to_double(k, v, ln);
        (c.*chain).spec.target_block_time_s = T;
        (c.*chain).saa.target_time_s = T;
    };
    keys[prefix + ".coins_per_block"] = [chain](ScenarioConfig& c, const std::string& k,
                                                const std::string& v, int ln) {
        (c.*chain).spec.coins_per_block = to_double(k, v, ln);
    };
    keys[prefix + ".spot_hash_price"] = [chain](ScenarioConfig& c, const std::string& k,
                                                const std::string& v, int ln) {
        (c.*chain).spec.spot_hash_price = to_double(k, v, ln);
    };
    keys[prefix + ".saa"] = [chain](ScenarioConfig& c, const std::string&, const std::string& v,
                                    int) { (c.*chain).saa.kind = parse_saa_kind(v); };
    keys[prefix + ".window_blocks"] = [chain](ScenarioConfig& c, const std::string& k,
                                              const std::string& v, int ln) {
        const double w = to_double(k, v, ln);
        if (w < 1.0 || w != static_cast<double>(static_cast<int>(w))) {
            throw InputError("scenario line " + std::to_string(ln) +
                             ": window_blocks must be a positive integer");
        }
        (c.*chain).saa.window_blocks = static_cast<int>(w);
    };
    keys[prefix + ".genesis_expected_hashes"] = [chain](ScenarioConfig& c, const std::string& k,
                                                        const std::string& v, int ln) {
        (c.*chain).saa.genesis_expected_hashes = to_double(k, v, ln);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> keys;
        keys["name"] = [](ScenarioConfig& c, const std::string&, const std::string& v, int) {
            c.name = v;
        };
        add_chain_keys(keys, "chain_A", &ScenarioConfig::chain_A);
        add_chain_keys(keys, "chain_B", &ScenarioConfig::chain_B);
        keys["population.loyal_A_weight"] = [](ScenarioConfig& c, const std::string& k,
                                               const std::string& v, int ln) {
            c.population.loyal_A_weight = to_double(k, v, ln);
        };
        keys["population.loyal_B_weight"] = [](ScenarioConfig& c, const std::string& k,
                                               const std::string& v, int ln) {
            c.population.loyal_B_weight = to_double(k, v, ln);
        };
        keys["population.nonloyal_weight"] = [](ScenarioConfig& c, const std::string& k,
                                                const std::string& v, int ln) {
            c.population.nonloyal_weight = to_double(k, v, ln);
        };
        keys["population.policy"] = [](ScenarioConfig& c, const std::string&,
                                       const std::string& v, int) {
            c.population.policy = parse_policy_kind(v);
        };
        keys["population.epsilon"] = [](ScenarioConfig& c, const std::string& k,
                                        const std::string& v, int ln) {
            c.population.epsilon = to_double(k, v, ln);
        };
        keys["population.nonloyal_split"] = [](ScenarioConfig& c, const std::string& k,
                                               const std::string& v, int ln) {
            c.population.nonloyal_split = to_double(k, v, ln);
        };
        keys["start_at_equilibrium"] = [](ScenarioConfig& c, const std::string& k,
                                          const std::string& v, int ln) {
            c.start_at_equilibrium = to_bool(k, v, ln);
        };
        keys["total_hash_rate"] = [](ScenarioConfig& c, const std::string& k,
                                     const std::string& v, int ln) {
            c.total_hash_rate = to_double(k, v, ln);
        };
        keys["price_A"] = [](ScenarioConfig& c, const std::string& k, const std::string& v,
                             int ln) { c.price_A = to_double(k, v, ln); };
        keys["initial_price_ratio"] = [](ScenarioConfig& c, const std::string& k,
                                         const std::string& v, int ln) {
            c.initial_price_ratio = to_double(k, v, ln);
        };
        keys["walk_sigma"] = [](ScenarioConfig& c, const std::string& k, const std::string& v,
                                int ln) { c.walk_sigma = to_double(k, v, ln); };
        keys["duration_days"] = [](ScenarioConfig& c, const std::string& k, const std::string& v,
                                   int ln) { c.duration_days = to_double(k, v, ln); };
        keys["warmup_days"] = [](ScenarioConfig& c, const std::string& k, const std::string& v,
                                 int ln) { c.warmup_days = to_double(k, v, ln); };
        keys["rng_seed"] = [](ScenarioConfig& c, const std::string& k, const std::string& v,
                              int ln) {
            std::uint64_t seed = 0;
            const auto* end = v.data() + v.size();
            const auto [ptr, ec] = std::from_chars(v.data(), end, seed);
            if (v.empty() || ec != std::errc() || ptr != end) {
                throw InputError("scenario line " + std::to_string(ln) + ": '" + k +
                                 "' expects a non-negative integer, got '" + v + "'");
            }
            c.rng_seed = seed;
        };
        keys["har_observation"] = [](ScenarioConfig& c, const std::string&, const std::string& v,
                                     int) { c.har_observation = parse_har_observation(v); };
        return keys;
    }();
    return table;
}

ScenarioConfig reference_base() {
    ScenarioConfig c;
    for (SimChain* chain : {&c.chain_A, &c.chain_B}) {
        chain->spec.target_block_time_s = 600.0;
        chain->spec.coins_per_block = 12.5;
        chain->spec.spot_hash_price = 1.0;
        chain->saa.kind = SaaKind::rolling_window;
        chain->saa.window_blocks = 144;
        chain->saa.target_time_s = 600.0;
    }
    c.chain_A.spec.label = "A";
    c.chain_B.spec.label = "B";
    c.population.loyal_A_weight = 0.05;
    c.population.loyal_B_weight = 0.05;
    c.population.nonloyal_weight = 0.9;
    c.population.policy = PolicyKind::eps_greedy;
    c.start_at_equilibrium = true;
    c.total_hash_rate = 1e18;
    c.price_A = 1.0;
    c.initial_price_ratio = 0.5;
    c.walk_sigma = 5e-3;
    c.duration_days = 450.0;
    c.warmup_days = 90.0;
    c.rng_seed = 1;
    c.har_observation = HarObservation::difficulty;
    return c;
}

} // namespace

ScenarioConfig parse_scenario(std::istream& in) {
    ScenarioConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body(csv::trim(std::string_view(line).substr(0, hash)));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw InputError("scenario line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(csv::trim(std::string_view(body).substr(0, eq)));
        const std::string value(csv::trim(std::string_view(body).substr(eq + 1)));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw InputError("scenario line " + std::to_string(line_no) + ": unknown key '" + key +
                             "'");
        }
        try {
            it->second(config, key, value, line_no);
        } catch (const std::exception& e) {
            const std::string prefix = "scenario line " + std::to_string(line_no);
            if (std::string_view(e.what()).starts_with(prefix)) {
                throw;
            }
            throw InputError(prefix + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

void write_scenario(std::ostream& out, const ScenarioConfig& c) {
    out << "name = " << c.name << '\n';
    const std::pair<const char*, const SimChain*> chains[] = {{"chain_A", &c.chain_A},
                                                              {"chain_B", &c.chain_B}};
    for (const auto& [prefix, chain] : chains) {
        out << prefix << ".target_block_time_s = " << fmt_exact(chain->spec.target_block_time_s)
            << '\n'
            << prefix << ".coins_per_block = " << fmt_exact(chain->spec.coins_per_block) << '\n'
            << prefix << ".spot_hash_price = " << fmt_exact(chain->spec.spot_hash_price) << '\n'
            << prefix << ".saa = " << to_string(chain->saa.kind) << '\n'
            << prefix << ".window_blocks = " << chain->saa.window_blocks << '\n'
            << prefix << ".genesis_expected_hashes = "
            << fmt_exact(chain->saa.genesis_expected_hashes) << '\n';
    }
    const MinerPopulation& p = c.population;
    out << "population.loyal_A_weight = " << fmt_exact(p.loyal_A_weight) << '\n'
        << "population.loyal_B_weight = " << fmt_exact(p.loyal_B_weight) << '\n'
        << "population.nonloyal_weight = " << fmt_exact(p.nonloyal_weight) << '\n'
        << "population.policy = " << to_string(p.policy) << '\n'
        << "population.epsilon = " << fmt_exact(p.epsilon) << '\n'
        << "population.nonloyal_split = " << fmt_exact(p.nonloyal_split) << '\n'
        << "start_at_equilibrium = " << (c.start_at_equilibrium ? "true" : "false") << '\n'
        << "total_hash_rate = " << fmt_exact(c.total_hash_rate) << '\n'
        << "price_A = " << fmt_exact(c.price_A) << '\n'
        << "initial_price_ratio = " << fmt_exact(c.initial_price_ratio) << '\n'
        << "walk_sigma = " << fmt_exact(c.walk_sigma) << '\n'
        << "duration_days = " << fmt_exact(c.duration_days) << '\n'
        << "warmup_days = " << fmt_exact(c.warmup_days) << '\n'
        << "rng_seed = " << c.rng_seed << '\n'
        << "har_observation = " << to_string(c.har_observation) << '\n';
}

std::optional<ScenarioConfig> builtin_scenario(const std::string& name) {
    ScenarioConfig c = reference_base();
    c.name = name;
    if (name == "paper_eps1e-3") {
        c.population.epsilon = 1e-3;
    } else if (name == "paper_eps5e-3") {
        c.population.epsilon = 5e-3;
    } else if (name == "paper_eps1e-2") {
        c.population.epsilon = 1e-2;
    } else if (name == "paper_extreme_w144" || name == "paper_extreme_w36") {
        // Constant price ratio, so the only difference between the two is
        // how fast the SAA comes to rest.
        c.population.policy = PolicyKind::extreme_greedy;
        c.walk_sigma = 0.0;
        const int window = name == "paper_extreme_w36" ? 36 : 144;
        c.chain_A.saa.window_blocks = window;
        c.chain_B.saa.window_blocks = window;
    } else {
        return std::nullopt;
    }
    return c;
}

std::vector<std::string> builtin_scenario_names() {
    return {"paper_eps1e-3", "paper_eps5e-3", "paper_eps1e-2", "paper_extreme_w144",
            "paper_extreme_w36"};
}

ScenarioConfig load_scenario(const std::string& name_or_path) {
    if (auto builtin = builtin_scenario(name_or_path)) {
        return *builtin;
    }
    std::ifstream in(name_or_path);
    if (!in) {
        throw InputError("'" + name_or_path + "' is neither a built-in scenario nor a readable file");
    }
    return parse_scenario(in);
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << "tau,time_s,chain,height,expected_hashes,dt_s,w_A,w_eA,price_ratio,pi_A,pi_B\n";
    for (const TraceRow& r : trace.rows) {
        out << r.tau << ',' << fmt(r.time_s) << ',' << (r.chain == ChainId::A ? 'A' : 'B') << ','
            << r.height << ',' << fmt(r.expected_hashes) << ',' << fmt(r.dt_s) << ','
            << fmt(r.w_A) << ',' << fmt(r.w_eA) << ',' << fmt(r.price_ratio) << ','
            << fmt(r.pi_A) << ',' << fmt(r.pi_B) << '\n';
    }
}

SimTrace read_trace_csv(std::istream& in) {
    csv::Reader reader(in);
    const auto c_tau = reader.column("tau");
    const auto c_time = reader.column("time_s");
    const auto c_chain = reader.column("chain");
    const auto c_height = reader.column("height");
    const auto c_eh = reader.column("expected_hashes");
    const auto c_dt = reader.column("dt_s");
    const auto c_wa = reader.column("w_A");
    const auto c_wea = reader.column("w_eA");
    const auto c_ratio = reader.column("price_ratio");
    const auto c_pa = reader.column("pi_A");
    const auto c_pb = reader.column("pi_B");
    SimTrace trace;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const int ln = reader.line_no();
        TraceRow r;
        r.tau = csv::parse_int(f[c_tau], ln, "tau");
        r.time_s = csv::parse_double(f[c_time], ln, "time_s");
        if (f[c_chain] == "A") {
            r.chain = ChainId::A;
        } else if (f[c_chain] == "B") {
            r.chain = ChainId::B;
        } else {
            throw InputError(csv::row_error(ln, "chain must be A or B"));
        }
        r.height = csv::parse_int(f[c_height], ln, "height");
        r.expected_hashes = csv::parse_double(f[c_eh], ln, "expected_hashes");
        r.dt_s = csv::parse_double(f[c_dt], ln, "dt_s");
        r.w_A = csv::parse_double(f[c_wa], ln, "w_A");
        r.w_eA = csv::parse_double(f[c_wea], ln, "w_eA");
        r.price_ratio = csv::parse_double(f[c_ratio], ln, "price_ratio");
        r.pi_A = csv::parse_double(f[c_pa], ln, "pi_A");
        r.pi_B = csv::parse_double(f[c_pb], ln, "pi_B");
        trace.rows.push_back(r);
    }
    return trace;
}

SimTrace round_trip(const SimTrace& trace) {
    std::stringstream buf;
    write_trace_csv(buf, trace);
    return read_trace_csv(buf);
}

std::vector<SeedResult> run_seeds(const ScenarioConfig& config,
                                  const std::vector<std::uint64_t>& seeds, unsigned threads,
                                  bool keep_traces) {
    config.validate();
    std::vector<SeedResult> results(seeds.size());
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, seeds.size())));

    const double warmup_s = config.warmup_days * kSecondsPerDay;
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(seeds.size());
    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                ScenarioConfig c = config;
                c.rng_seed = seeds[i];
                SimTrace trace = run(c);
                SeedResult& r = results[i];
                r.seed = seeds[i];
                r.convergence = convergence_metrics(trace, warmup_s);
                r.oscillation = oscillation_metrics(trace, warmup_s);
                if (keep_traces) {
                    r.trace = std::move(trace);
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

} // namespace hashalloc
