// hashalloc: command-line front end for the simulator, the closed-form
// analytics, the price-ratio oracle and the historical comparison.
//
// Exit codes: 0 success, 1 usage, 2 input data error, 3 domain or
// precondition error.

#include "hashalloc/analytics.hpp"
#include "hashalloc/econ.hpp"
#include "hashalloc/errors.hpp"
#include "hashalloc/ingest.hpp"
#include "hashalloc/oracle.hpp"
#include "hashalloc/scenario.hpp"
#include "hashalloc/sim.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace hashalloc;

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;

void log(const std::string& msg) { std::cerr << "hashalloc: " << msg << '\n'; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Output sink: a file, or standard output for "" and "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw InputError("cannot open '" + path + "' for writing");
            }
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

class Input {
public:
    explicit Input(const std::string& path) {
        if (path != "-") {
            file_ = std::make_unique<std::ifstream>(path);
            if (!*file_) {
                throw InputError("cannot open '" + path + "'");
            }
        }
    }
    std::istream& stream() { return file_ ? *file_ : std::cin; }

private:
    std::unique_ptr<std::ifstream> file_;
};

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
    std::vector<std::uint64_t> seeds;
    std::string out;
    unsigned threads = 0;
    bool summary_only = false;
    bool print_scenario = false;
};

std::string trace_path(const std::string& pattern, std::uint64_t seed) {
    const auto pos = pattern.find("{seed}");
    if (pos == std::string::npos) {
        return pattern;
    }
    std::string path = pattern;
    path.replace(pos, 6, std::to_string(seed));
    return path;
}

void write_summary(std::ostream& out, const std::vector<SeedResult>& results) {
    out << "seed,events,mean_abs_dev,max_abs_dev,fraction_within,amplitude,min_w_B,max_w_B,"
           "crossing_count,crossings_per_1e4,dominant_period_events\n";
    for (const auto& r : results) {
        out << r.seed << ',' << r.convergence.events << ',' << fmt(r.convergence.mean_abs_dev)
            << ',' << fmt(r.convergence.max_abs_dev) << ',' << fmt(r.convergence.fraction_within)
            << ',' << fmt(r.oscillation.amplitude) << ',' << fmt(r.oscillation.min_w_B) << ','
            << fmt(r.oscillation.max_w_B) << ',' << r.oscillation.crossing_count << ','
            << fmt(r.oscillation.crossings_per(1e4)) << ','
            << fmt(r.oscillation.dominant_period_events) << '\n';
    }
}

int do_simulate(const SimulateArgs& a) {
    ScenarioConfig config = load_scenario(a.scenario);
    if (a.print_scenario) {
        write_scenario(std::cout, config);
        return 0;
    }
    std::vector<std::uint64_t> seeds = a.seeds;
    if (seeds.empty()) {
        seeds.push_back(config.rng_seed);
    }
    if (a.summary_only) {
        log("running " + std::to_string(seeds.size()) + " seed(s) of " + config.name);
        write_summary(std::cout, run_seeds(config, seeds, a.threads));
        return 0;
    }
    if (seeds.size() > 1 && a.out.find("{seed}") == std::string::npos) {
        throw CLI::ValidationError("--out",
                                   "several seeds need an --out pattern containing {seed}");
    }
    log("running " + std::to_string(seeds.size()) + " seed(s) of " + config.name);
    auto results = run_seeds(config, seeds, a.threads, true);
    for (auto& r : results) {
        Output out(trace_path(a.out, r.seed));
        write_trace_csv(out.stream(), r.trace);
        if (!a.out.empty() && a.out != "-") {
            log("seed " + std::to_string(r.seed) + ": " + std::to_string(r.trace.rows.size()) +
                " events -> " + trace_path(a.out, r.seed));
        }
    }
    if (!a.out.empty() && a.out != "-") {
        write_summary(std::cout, results);
    }
    return 0;
}

// ---- metrics --------------------------------------------------------------

struct MetricsArgs {
    std::string trace = "-";
    double warmup_days = 90.0;
    double within = 0.05;
};

int do_metrics(const MetricsArgs& a) {
    Input in(a.trace);
    const SimTrace trace = read_trace_csv(in.stream());
    const double warmup_s = a.warmup_days * kSecondsPerDay;
    const auto c = convergence_metrics(trace, warmup_s, a.within);
    const auto o = oscillation_metrics(trace, warmup_s);
    std::cout << "events,mean_abs_dev,max_abs_dev,fraction_within,amplitude,min_w_B,max_w_B,"
                 "crossing_count,crossings_per_1e4,dominant_period_events\n"
              << c.events << ',' << fmt(c.mean_abs_dev) << ',' << fmt(c.max_abs_dev) << ','
              << fmt(c.fraction_within) << ',' << fmt(o.amplitude) << ',' << fmt(o.min_w_B) << ','
              << fmt(o.max_w_B) << ',' << o.crossing_count << ',' << fmt(o.crossings_per(1e4))
              << ',' << fmt(o.dominant_period_events) << '\n';
    return 0;
}

// ---- equilibrium ----------------------------------------------------------

struct EquilibriumArgs {
    double T_A = 600.0;
    double T_B = 600.0;
    std::optional<double> R;
    std::optional<double> P_A;
    std::optional<double> P_B;
    double c_A = 1.0;
    double c_B = 1.0;
};

int do_equilibrium(const EquilibriumArgs& a) {
    double R = 0.0;
    if (a.R) {
        R = *a.R;
    } else if (a.P_A && a.P_B) {
        R = MarketState{*a.P_A, *a.P_B}.relative_reward(
            ChainSpec{"A", a.T_A, a.c_A, 1.0}, ChainSpec{"B", a.T_B, a.c_B, 1.0});
    } else {
        throw CLI::ValidationError("equilibrium", "give either --r or both --pa and --pb");
    }
    const Allocation w = equilibrium_allocation(a.T_A, a.T_B, R);
    std::cout << "w_A,w_B\n" << fmt(w.w_A) << ',' << fmt(w.w_B) << '\n';
    return 0;
}

// ---- attack-cost ----------------------------------------------------------

struct AttackArgs {
    double alpha = 0.0;
    double c = 0.0;
    double P_A = 0.0;
    double P_B = 0.0;
    std::optional<double> gamma;
    std::optional<double> beta;
    int z = 1;
    std::vector<double> budgets;
    std::vector<double> gammas;
};

int do_attack(const AttackArgs& a) {
    if (a.gamma && a.beta) {
        const AttackCost cost = reorg_attack_cost({a.alpha, *a.beta, *a.gamma, a.c, a.P_A, a.P_B, a.z});
        std::cout << "alpha,beta,gamma,attacker_share,w_A_attack,w_B_attack,cost_per_block,z,"
                     "cost_total\n"
                  << fmt(a.alpha) << ',' << fmt(*a.beta) << ',' << fmt(*a.gamma) << ','
                  << fmt(cost.attacker_share) << ',' << fmt(cost.during_attack.w_A) << ','
                  << fmt(cost.during_attack.w_B) << ',' << fmt(cost.per_block) << ',' << a.z
                  << ',' << fmt(cost.for_depth(a.z)) << '\n';
        return 0;
    }
    if (a.budgets.empty() || a.gammas.empty()) {
        throw CLI::ValidationError("attack-cost",
                                   "give --gamma and --beta, or --budgets and --gammas");
    }
    const AttackCurve curve = attack_cost_curve(a.alpha, a.c, a.P_A, a.P_B, a.budgets, a.gammas);
    for (const auto& w : curve.warnings) {
        log(w);
    }
    std::cout << "budget,gamma,beta,attacker_share,cost_per_block\n";
    for (const auto& r : curve.rows) {
        std::cout << fmt(r.budget) << ',' << fmt(r.gamma) << ',' << fmt(r.beta) << ','
                  << fmt(r.attacker_share) << ',' << fmt(r.cost_per_block) << '\n';
    }
    return 0;
}

// ---- issuance -------------------------------------------------------------

struct IssuanceArgs {
    std::optional<double> market_cap;
    std::optional<double> issued;
    std::optional<double> delta;
    std::optional<double> k;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> gamma;
    std::optional<double> c_A;
    double T = 600.0;
};

int do_issuance(const IssuanceArgs& a) {
    bool any = false;
    std::cout << "quantity,value\n";
    if (a.market_cap && a.issued && a.delta) {
        std::cout << "price_change," << fmt(issuance_price_impact(*a.market_cap, *a.issued, *a.delta))
                  << '\n';
        any = true;
    }
    if (a.k && a.alpha && a.beta && a.gamma) {
        const Allocation w = issuance_equilibrium(*a.k, *a.alpha, *a.beta, *a.gamma);
        std::cout << "w_A," << fmt(w.w_A) << "\nw_B," << fmt(w.w_B) << '\n';
        any = true;
    }
    if (a.c_A && a.alpha) {
        const ParityIssuance p = parity_issuance(*a.c_A, *a.alpha, a.T);
        std::cout << "parity_coins_per_block_B," << fmt(p.coins_per_block_B) << "\nparity_w_A,"
                  << fmt(p.equilibrium.w_A) << "\nparity_w_B," << fmt(p.equilibrium.w_B) << '\n';
        any = true;
    }
    if (!any) {
        throw CLI::ValidationError(
            "issuance",
            "give --market-cap/--issued/--delta, --k/--alpha/--beta/--gamma, or --ca/--alpha");
    }
    return 0;
}

// ---- oracle-verify --------------------------------------------------------

struct OracleArgs {
    std::string fixture_A;
    std::string fixture_B;
    double c_A = 1.0;
    double c_B = 1.0;
    double T_A = 600.0;
    double T_B = 600.0;
    std::optional<std::int64_t> height_A;
    std::optional<std::int64_t> height_B;
};

oracle::HeaderChain replay(const std::string& path) {
    Input in(path);
    const auto headers = oracle::parse_fixture(in.stream());
    if (headers.empty()) {
        throw InputError("fixture '" + path + "' holds no headers");
    }
    oracle::HeaderChain chain(headers.front());
    for (std::size_t i = 1; i < headers.size(); ++i) {
        chain.update(headers[i]);
    }
    log(path + ": accepted " + std::to_string(headers.size()) + " headers");
    return chain;
}

int do_oracle(const OracleArgs& a) {
    oracle::PriceRatioOracle o({a.c_A, a.T_A}, {a.c_B, a.T_B}, replay(a.fixture_A),
                               replay(a.fixture_B));
    const std::int64_t hA = a.height_A.value_or(o.chain_A().tip_height());
    const std::int64_t hB = a.height_B.value_or(o.chain_B().tip_height());
    const double ratio = o.query(hA, hB);
    std::cout << "height_A,height_B,price_ratio\n" << hA << ',' << hB << ',' << fmt(ratio) << '\n';
    return 0;
}

// ---- ingest-compare -------------------------------------------------------

struct IngestArgs {
    std::string prices;
    std::string difficulty;
    std::string history;
    std::int64_t cadence_s = 3600;
    double T_A = 600.0;
    double T_B = 600.0;
    double c_A = 1.0;
    double c_B = 1.0;
    double threshold = 0.05;
    std::string out;
    std::string joined_out;
};

int do_ingest(const IngestArgs& a) {
    std::vector<ingest::HistoryRow> rows;
    std::string meta;
    if (!a.history.empty()) {
        Input in(a.history);
        rows = ingest::parse_history_csv(in.stream());
        meta = "# source=history";
    } else if (!a.prices.empty() && !a.difficulty.empty()) {
        Input p(a.prices);
        Input d(a.difficulty);
        const auto prices = ingest::parse_prices_csv(p.stream());
        const auto diffs = ingest::parse_difficulty_csv(d.stream());
        rows = ingest::join_history(prices, diffs, {a.cadence_s, a.T_A, a.T_B});
        meta = "# resample=locf cadence_s=" + std::to_string(a.cadence_s);
        if (!a.joined_out.empty()) {
            Output j(a.joined_out);
            ingest::write_history_csv(j.stream(), rows);
        }
    } else {
        throw CLI::ValidationError("ingest-compare", "give --history, or --prices and --difficulty");
    }
    const auto cmp = ingest::compare_allocation(rows, {a.T_A, a.T_B, a.c_A, a.c_B, a.threshold});
    std::size_t flagged = 0;
    for (const auto& r : cmp) {
        flagged += r.flagged ? 1 : 0;
    }
    log(std::to_string(cmp.size()) + " rows, " + std::to_string(flagged) + " flagged above " +
        fmt(a.threshold));
    Output out(a.out);
    out.stream() << meta << '\n';
    ingest::write_comparison_csv(out.stream(), cmp);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hash rate allocation between two proof-of-work chains"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Run the block-race simulator and write trace CSV");
    s->add_option("--scenario", sim.scenario,
                  "Built-in scenario (paper_eps1e-3, paper_eps5e-3, paper_eps1e-2, "
                  "paper_extreme_w144, paper_extreme_w36) or scenario file")
        ->required();
    s->add_option("--seed", sim.seeds, "One or more seeds (default: the scenario's rng_seed)");
    s->add_option("--out", sim.out,
                  "Trace CSV path (default stdout); with several seeds it must contain {seed}");
    s->add_option("--threads", sim.threads, "Parallel runs (0 = hardware concurrency)");
    s->add_flag("--summary-only", sim.summary_only,
                "Print per-seed metrics CSV instead of writing traces");
    s->add_flag("--print-scenario", sim.print_scenario, "Print the resolved scenario file and exit");

    MetricsArgs met;
    auto* m = app.add_subcommand("metrics", "Convergence and oscillation metrics of a trace CSV");
    m->add_option("--trace", met.trace, "Trace CSV path, or - for stdin")->capture_default_str();
    m->add_option("--warmup-days", met.warmup_days, "Discarded prefix")->capture_default_str();
    m->add_option("--within", met.within, "Band for fraction_within")->capture_default_str();

    EquilibriumArgs eq;
    auto* e = app.add_subcommand("equilibrium", "Equilibrium allocation (w_A, w_B)");
    e->add_option("--ta", eq.T_A, "Target block time of chain A (s)")->capture_default_str();
    e->add_option("--tb", eq.T_B, "Target block time of chain B (s)")->capture_default_str();
    e->add_option("--r", eq.R, "Relative reward V_A / (V_A + V_B)");
    e->add_option("--pa", eq.P_A, "Coin price of chain A");
    e->add_option("--pb", eq.P_B, "Coin price of chain B");
    e->add_option("--ca", eq.c_A, "Coins per block on chain A")->capture_default_str();
    e->add_option("--cb", eq.c_B, "Coins per block on chain B")->capture_default_str();

    AttackArgs at;
    auto* ac = app.add_subcommand(
        "attack-cost",
        "Per-block cost of a reorg attack by miners diverted from chain A. Single point: "
        "--gamma/--beta; curve CSV (budget,gamma,beta,attacker_share,cost_per_block): "
        "--budgets/--gammas");
    ac->add_option("--alpha", at.alpha, "Price ratio P_B / P_A")->required();
    ac->add_option("--c", at.c, "Coins per block (both chains)")->required();
    ac->add_option("--pa", at.P_A, "Coin price of chain A")->required();
    ac->add_option("--pb", at.P_B, "Coin price of chain B")->required();
    ac->add_option("--gamma", at.gamma, "Diverted share in units of chain B's equilibrium share");
    ac->add_option("--beta", at.beta, "Share left on chain A, same units");
    ac->add_option("--z", at.z, "Reorg depth in blocks")->capture_default_str();
    ac->add_option("--budgets", at.budgets, "Values of beta + gamma for the curve");
    ac->add_option("--gammas", at.gammas, "Gamma grid for the curve");

    IssuanceArgs is;
    auto* i = app.add_subcommand(
        "issuance", "Issuance effects; output CSV quantity,value (price_change, w_A, w_B, parity_*)");
    i->add_option("--market-cap", is.market_cap, "Market cap of chain B");
    i->add_option("--issued", is.issued, "Coins issued so far on chain B");
    i->add_option("--delta", is.delta, "Additional coins issued");
    i->add_option("--k", is.k, "Multiplier on chain B's coins per block");
    i->add_option("--alpha", is.alpha, "Price ratio P_B / P_A");
    i->add_option("--beta", is.beta, "Cumulative issuance growth on chain A");
    i->add_option("--gamma", is.gamma, "Cumulative issuance growth on chain B");
    i->add_option("--ca", is.c_A, "Coins per block on chain A (parity issuance)");
    i->add_option("--t", is.T, "Common target block time for parity issuance")
        ->capture_default_str();

    OracleArgs orc;
    auto* o = app.add_subcommand("oracle-verify",
                                 "Replay two header fixtures and estimate P_B / P_A");
    o->add_option("--fixture-a", orc.fixture_A, "Header fixture of chain A")->required();
    o->add_option("--fixture-b", orc.fixture_B, "Header fixture of chain B")->required();
    o->add_option("--ca", orc.c_A, "Coins per block on chain A")->capture_default_str();
    o->add_option("--cb", orc.c_B, "Coins per block on chain B")->capture_default_str();
    o->add_option("--ta", orc.T_A, "Target block time of chain A")->capture_default_str();
    o->add_option("--tb", orc.T_B, "Target block time of chain B")->capture_default_str();
    o->add_option("--height-a", orc.height_A, "Query height on chain A (default tip)");
    o->add_option("--height-b", orc.height_B, "Query height on chain B (default tip)");

    IngestArgs ing;
    auto* g = app.add_subcommand(
        "ingest-compare",
        "Actual vs equilibrium allocation from historical CSVs; output "
        "timestamp,w_A_actual,w_eA,deviation,flagged");
    g->add_option("--prices", ing.prices, "CSV timestamp,price_A,price_B");
    g->add_option("--difficulty", ing.difficulty, "CSV timestamp,difficulty_A,difficulty_B");
    g->add_option("--history", ing.history,
                  "Pre-joined CSV timestamp,price_A,price_B,hash_rate_A,hash_rate_B");
    g->add_option("--cadence", ing.cadence_s, "Resampling cadence (s)")->capture_default_str();
    g->add_option("--ta", ing.T_A, "Target block time of chain A")->capture_default_str();
    g->add_option("--tb", ing.T_B, "Target block time of chain B")->capture_default_str();
    g->add_option("--ca", ing.c_A, "Coins per block on chain A")->capture_default_str();
    g->add_option("--cb", ing.c_B, "Coins per block on chain B")->capture_default_str();
    g->add_option("--threshold", ing.threshold, "Deviation that flags a row")
        ->capture_default_str();
    g->add_option("--out", ing.out, "Output CSV (default stdout)");
    g->add_option("--joined-out", ing.joined_out, "Also write the resampled history CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (s->parsed()) {
            return do_simulate(sim);
        }
        if (m->parsed()) {
            return do_metrics(met);
        }
        if (e->parsed()) {
            return do_equilibrium(eq);
        }
        if (ac->parsed()) {
            return do_attack(at);
        }
        if (i->parsed()) {
            return do_issuance(is);
        }
        if (o->parsed()) {
            return do_oracle(orc);
        }
        if (g->parsed()) {
            return do_ingest(ing);
        }
    } catch (const CLI::ValidationError& err) {
        log(err.what());
        return kExitUsage;
    } catch (const oracle::OracleError& err) {
        log(err.what());
        return err.code() == oracle::ErrorCode::NonpositiveRate ? kExitDomain : kExitInput;
    } catch (const InputError& err) {
        log(err.what());
        return kExitInput;
    } catch (const std::logic_error& err) {
        // DomainError and PreconditionError.
        log(err.what());
        return kExitDomain;
    } catch (const std::exception& err) {
        log(err.what());
        return kExitInput;
    }
    return kExitUsage;
}
