// Command-line driver: schedules, Monte Carlo, exact solving, sweeps and checks.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "crw/analysis.hpp"
#include "crw/exact.hpp"
#include "crw/monte_carlo.hpp"
#include "crw/report_json.hpp"
#include "crw/schedule.hpp"
#include "crw/strategies.hpp"

namespace {

using nlohmann::json;

enum Exit : int { kOk = 0, kCheckFailed = 1, kBadInput = 2, kOverBudget = 3 };

struct BadInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* kCsvColumns =
    "CSV columns (simulate --format csv, sweep):\n"
    "  cell       row index in the sweep (0 for simulate)\n"
    "  strategy   strategy name\n"
    "  delayed    1 if Stand was replaced by the delayed step\n"
    "  d,n,m      dimension, horizon, stand-still parameter\n"
    "  eta        windowed_1d exponent\n"
    "  epsilon    windowed_2d exponent\n"
    "  theta      windowed_2d window exponent (blank unless set or resolved)\n"
    "  kappa      windowed_2d stage exponent (blank unless set or resolved)\n"
    "  seed       master seed\n"
    "  trials     number of trials\n"
    "  successes  trials ending at the origin\n"
    "  p_hat      successes / trials\n"
    "  wilson_lo  lower end of the 95% Wilson interval\n"
    "  wilson_hi  upper end of the 95% Wilson interval\n"
    "  error      per-cell error message, empty on success\n";

const char* kExitCodes = "Exit codes: 0 ok, 1 check failed, 2 bad input, 3 over budget.\n";

struct ProblemFlags {
    int d = 1;
    std::int64_t n = 0;
    std::int64_t m = 1;

    crw::Problem problem() const {
        crw::Problem p{d, n, m};
        p.validate();
        return p;
    }
};

void add_problem_options(CLI::App* sub, ProblemFlags& f) {
    sub->add_option("--d", f.d, "dimension (1 or 2)")->check(CLI::IsMember({1, 2}))->capture_default_str();
    sub->add_option("--n", f.n, "horizon")->required();
    sub->add_option("--m", f.m, "stand-still parameter")->required();
}

struct StrategyFlags {
    std::string name;
    bool delayed = false;
    double eta = 0.5;
    double epsilon = 0.5;
    std::optional<double> theta;
    std::optional<double> kappa;
    int stage_cap = 16;
    std::string schedule_path;

    crw::StrategySpec spec() const {
        crw::StrategySpec s;
        s.name = name;
        s.delayed = delayed;
        s.eta = eta;
        s.epsilon = epsilon;
        s.theta = theta;
        s.kappa = kappa;
        s.stage_cap = stage_cap;
        if (!schedule_path.empty()) {
            std::ifstream in(schedule_path);
            if (!in) throw BadInput("cannot read schedule file " + schedule_path);
            s.schedule = crw::schedule_from_json(json::parse(in));
        }
        return s;
    }
};

void add_strategy_tuning(CLI::App* sub, StrategyFlags& f) {
    sub->add_flag("--delayed", f.delayed, "replace Stand by the delayed step (moves with probability 1/m)");
    sub->add_option("--eta", f.eta, "windowed_1d exponent")->capture_default_str();
    sub->add_option("--epsilon", f.epsilon, "windowed_2d exponent")->capture_default_str();
    sub->add_option("--theta", f.theta, "windowed_2d window exponent (default: chosen from epsilon)");
    sub->add_option("--kappa", f.kappa, "windowed_2d stage exponent (default: half the supremum)");
    sub->add_option("--stage-cap", f.stage_cap, "largest accepted 2d stage count")->capture_default_str();
    sub->add_option("--schedule", f.schedule_path, "schedule JSON (as printed by `schedule`) for windowed strategies");
}

const std::vector<std::string> kStrategies = {"always_step", "lazy_max", "lazy_then_sprint", "windowed_1d",
                                              "windowed_2d"};

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw BadInput("cannot write " + path);
    out << text;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot read " + path);
    return json::parse(in);
}

// ---------------------------------------------------------------------------

int run_schedule(const ProblemFlags& pf, const StrategyFlags& sf, const std::string& out) {
    json j;
    if (pf.d == 1) {
        const crw::ScheduleParams1D params{pf.n, pf.m, sf.eta};
        j = crw::to_json(crw::build_schedule_1d(params));
        j["regime"] = crw::to_json(crw::validate_regime(params));
    } else {
        crw::StrategySpec spec = sf.spec();
        spec.name = "windowed_2d";
        const bool defaulted = !spec.theta;
        spec = crw::resolve_spec(spec);
        j = crw::to_json(crw::build_schedule_2d({pf.n, pf.m, spec.epsilon, *spec.theta, *spec.kappa, spec.stage_cap}));
        j["theta_kappa_defaulted"] = defaulted;
        const double th = *spec.theta;
        j["constraint"] = {{"theta_low", (1.0 - spec.epsilon) / 2.0},
                           {"ratio", (1.0 - 2.0 * th) / (1.0 - 2.0 * *spec.kappa * th)},
                           {"epsilon", spec.epsilon}};
    }
    emit(j.dump(2) + "\n", out);
    return kOk;
}

int run_simulate(const ProblemFlags& pf, const StrategyFlags& sf, std::int64_t trials, std::uint64_t seed,
                 int threads, bool per_window, const std::string& format, bool no_timing, int keep_failures,
                 bool progress, const std::string& out) {
    crw::McConfig c;
    c.problem = pf.problem();
    c.strategy = sf.spec();
    c.trials = trials;
    c.seed = seed;
    c.threads = threads;
    c.per_window = per_window;
    c.keep_failures = keep_failures;
    c.progress = progress;
    const crw::EstimateReport rep = crw::estimate_success(c);
    if (format == "csv") {
        crw::SweepRow row;
        row.spec = {c.problem, crw::resolve_spec(c.strategy), seed, trials};
        row.trials = rep.trials;
        row.successes = rep.successes;
        row.p_hat = rep.p_hat;
        row.wilson = rep.wilson;
        emit(crw::sweep_csv_header() + "\n" + crw::sweep_csv_row(row) + "\n", out);
    } else {
        emit(crw::to_json(rep, !no_timing).dump(2) + "\n", out);
    }
    return kOk;
}

int run_exact(const ProblemFlags& pf, const StrategyFlags& sf, const std::string& policy_out, bool rational,
              double max_ops, double max_mb, const std::string& out) {
    const crw::Problem p = pf.problem();
    const crw::Budget budget{max_ops, max_mb * 1e6};
    json j = {{"schema_version", crw::kSchemaVersion}, {"problem", crw::to_json(p)}};
    if (!sf.name.empty()) {
        if (!policy_out.empty()) throw BadInput("--policy-out applies to the optimal value, not to --eval");
        const crw::StrategySpec spec = crw::resolve_spec(sf.spec());
        const crw::StrategyPtr s = crw::make_strategy(spec, p);
        const crw::ExactEvaluation ev = crw::evaluate_strategy_exact(*s, p, {true, budget});
        j["mode"] = "eval";
        j["strategy"] = crw::to_json(spec);
        j["value"] = ev.probability;
        j["pruned_mass"] = ev.final_distribution.dead_mass;
    } else {
        crw::DpOptions opt;
        opt.budget = budget;
        opt.keep_values = opt.keep_policy = !policy_out.empty();
        const crw::ValueTable<double> table = crw::optimal_value<double>(p, opt);
        j["mode"] = "optimal";
        j["value"] = table.value;
        if (rational) {
            if (p.d * p.n > 60) throw BadInput("--rational supports d*n <= 60");
            const crw::Rational r = crw::optimal_value<crw::Rational>(p).value;
            j["value_rational"] = std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
        }
        if (!policy_out.empty()) {
            emit(crw::value_table_csv(table), policy_out);
            j["policy_out"] = policy_out;
        }
    }
    emit(j.dump(2) + "\n", out);
    return kOk;
}

std::vector<crw::CheckReport> run_suite(const std::string& suite, int threads) {
    std::vector<crw::CheckReport> reports;
    const bool all = suite == "all";
    if (all || suite == "bruteforce") reports.push_back(crw::check_bruteforce(6, 3));
    if (all || suite == "reflection") reports.push_back(crw::check_reflection(20, 400));
    if (all || suite == "normal") reports.push_back(crw::check_normal_approx());
    if (all || suite == "dominance") reports.push_back(crw::check_dominance());
    if (all || suite == "localtime") {
        reports.push_back(crw::check_local_time_ratio({1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14}));
    }
    if (all || suite == "hoeffding") {
        crw::HoeffdingConfig h1;
        h1.problem = {1, 1000000, 10000};
        h1.strategy.name = "windowed_1d";
        h1.trials = 2000;
        h1.threads = threads;
        crw::CheckReport r1 = crw::check_hoeffding(h1);
        r1.name = "hoeffding_1d";
        reports.push_back(std::move(r1));
        crw::HoeffdingConfig h2;
        h2.problem = {2, 100000, 316};
        h2.strategy.name = "windowed_2d";
        h2.trials = 1000;
        h2.threads = threads;
        crw::CheckReport r2 = crw::check_hoeffding(h2);
        r2.name = "hoeffding_2d";
        reports.push_back(std::move(r2));
    }
    return reports;
}

int run_verify(const std::string& suite, int threads, bool as_json, const std::string& out) {
    const std::vector<crw::CheckReport> reports = run_suite(suite, threads);
    bool ok = true;
    std::ostringstream text;
    json j = {{"schema_version", crw::kSchemaVersion}, {"suite", suite}, {"checks", json::array()}};
    for (const crw::CheckReport& r : reports) {
        // Insufficient data is reported but does not fail the suite.
        if (r.status == crw::CheckStatus::Fail) ok = false;
        j["checks"].push_back(crw::to_json(r));
        text << (r.status == crw::CheckStatus::Fail ? "FAIL " : r.passed() ? "PASS " : "SKIP ") << r.name << "  "
             << r.summary.dump() << "\n";
        for (const std::string& m : r.messages) text << "    " << m << "\n";
    }
    j["passed"] = ok;
    emit(as_json ? j.dump(2) + "\n" : text.str(), out);
    return ok ? kOk : kCheckFailed;
}

int run_sweep(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<int> threads,
              std::optional<std::string> marker_dir, const std::string& format, const std::string& out) {
    json raw = parse_file(config_path);
    if (seed) raw["seed"] = *seed;
    if (!raw.contains("seed")) throw BadInput("sweep needs a seed (config \"seed\" or --seed)");
    crw::SweepConfig c = crw::sweep_config_from_json(raw);
    if (threads) c.threads = *threads;
    if (marker_dir) c.marker_dir = *marker_dir;

    std::ostringstream csv;
    if (format == "csv") csv << crw::sweep_csv_header() << "\n";
    json rows = json::array();
    const auto rows_done = crw::sweep(c, [&](const crw::SweepRow& row) {
        std::cerr << "cell " << row.cell << (row.resumed ? " (resumed)" : "") << ": p_hat=" << row.p_hat
                  << (row.error.empty() ? "" : " error: " + row.error) << "\n";
    });
    for (const crw::SweepRow& row : rows_done) {
        if (format == "csv") {
            csv << crw::sweep_csv_row(row) << "\n";
        } else {
            rows.push_back(crw::to_json(row));
        }
    }
    if (format == "csv") {
        emit(csv.str(), out);
    } else {
        emit(json{{"schema_version", crw::kSchemaVersion}, {"rows", rows}}.dump(2) + "\n", out);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Controlled simple random walk with a stand-still option: simulation, exact control, checks"};
    app.footer(kExitCodes);
    app.require_subcommand(1);

    ProblemFlags pf;
    StrategyFlags sf;
    std::string out;
    int threads = 1;

    auto* sched = app.add_subcommand("schedule", "print the window schedule and regime diagnostics as JSON");
    sched->add_option("--d", pf.d, "dimension (1 or 2)")->check(CLI::IsMember({1, 2}))->capture_default_str();
    sched->add_option("--n", pf.n, "horizon")->required();
    sched->add_option("--m", pf.m, "stand-still parameter")->required();
    add_strategy_tuning(sched, sf);
    sched->add_option("-o,--out", out, "output file (default stdout)");

    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    bool per_window = false;
    std::string format = "json";
    bool no_timing = false;
    int keep_failures = 0;
    bool progress = false;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of P(W_n = 0) for a strategy");
    add_problem_options(sim, pf);
    sim->add_option("--strategy", sf.name, "strategy name")->required()->check(CLI::IsMember(kStrategies));
    add_strategy_tuning(sim, sf);
    sim->add_option("--trials", trials, "number of trials")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "master seed (mandatory)")->required();
    sim->add_option("--threads", threads, "worker threads; results do not depend on it")->capture_default_str();
    sim->add_flag("--per-window", per_window, "add per-stage window statistics (windowed strategies)");
    sim->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sim->add_flag("--no-timing", no_timing, "omit wall_time_s from the JSON report");
    sim->add_option("--keep-failures", keep_failures, "report the indices of the first K failed trials");
    sim->add_flag("--progress", progress, "progress on standard error");
    sim->add_option("-o,--out", out, "output file (default stdout)");
    sim->footer(std::string(kCsvColumns) + kExitCodes);

    std::string policy_out;
    bool rational = false;
    double max_ops = 4e9;
    double max_mb = 2000;
    auto* ex = app.add_subcommand("exact", "optimal value by dynamic programming, or exact value of a strategy");
    add_problem_options(ex, pf);
    ex->add_option("--eval", sf.name, "evaluate this strategy exactly instead of optimizing")
        ->check(CLI::IsMember(kStrategies));
    add_strategy_tuning(ex, sf);
    ex->add_option("--policy-out", policy_out, "write the value/policy table as CSV (i,x,[y,]j,V,policy)");
    ex->add_flag("--rational", rational, "also compute the optimum in exact rational arithmetic (small n)");
    ex->add_option("--max-ops", max_ops, "state-update budget")->capture_default_str();
    ex->add_option("--max-mb", max_mb, "memory budget in MB")->capture_default_str();
    ex->add_option("-o,--out", out, "output file (default stdout)");

    std::string suite = "all";
    bool as_json = false;
    auto* ver = app.add_subcommand("verify", "run property suites at pinned parameters");
    ver->add_option("--suite", suite, "suite to run")
        ->check(CLI::IsMember({"reflection", "normal", "hoeffding", "localtime", "dominance", "bruteforce", "all"}))
        ->capture_default_str();
    ver->add_option("--threads", threads, "worker threads for the Monte Carlo suites")->capture_default_str();
    ver->add_flag("--json", as_json, "JSON report instead of text");
    ver->add_option("-o,--out", out, "output file (default stdout)");

    std::string config_path;
    std::optional<std::uint64_t> sweep_seed;
    std::optional<int> sweep_threads;
    std::optional<std::string> marker_dir;
    std::string sweep_format = "csv";
    auto* sw = app.add_subcommand("sweep", "run estimate_success over a grid from a JSON config");
    sw->add_option("config", config_path, "config file")->required();
    sw->add_option("--seed", sweep_seed, "master seed (overrides the config)");
    sw->add_option("--threads", sweep_threads, "worker threads (overrides the config)");
    sw->add_option("--markers", marker_dir, "directory of per-cell markers for resuming");
    sw->add_option("--format", sweep_format, "csv or json")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sw->add_option("-o,--out", out, "output file (default stdout)");
    sw->footer(std::string(
                   "Config: {\"seed\": S, \"trials\": T, \"threads\": K, \"marker_dir\": DIR,\n"
                   "         \"cells\": [{\"d\":1,\"n\":N,\"m\":M,\"strategy\":\"lazy_max\"}, ...]}\n"
                   "   or    \"grid\": {\"d\": [..], \"n\": [..], \"m\": [..] | \"m_power\": [..], \"strategy\": [..]}\n"
                   "A strategy is a name or {\"name\":..., \"delayed\":..., \"eta\":..., \"epsilon\":..., ...}.\n\n") +
               kCsvColumns + kExitCodes);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    try {
        if (*sched) return run_schedule(pf, sf, out);
        if (*sim) {
            return run_simulate(pf, sf, trials, seed, threads, per_window, format, no_timing, keep_failures, progress,
                                out);
        }
        if (*ex) return run_exact(pf, sf, policy_out, rational, max_ops, max_mb, out);
        if (*ver) return run_verify(suite, threads, as_json, out);
        if (*sw) return run_sweep(config_path, sweep_seed, sweep_threads, marker_dir, sweep_format, out);
    } catch (const crw::BudgetExceeded& e) {
        std::cerr << "over budget: " << e.what() << "\n";
        return kOverBudget;
    } catch (const crw::AdmissibilityError& e) {
        std::cerr << "admissibility violation: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const crw::ScheduleError& e) {
        std::cerr << "schedule error: " << e.what() << "\n";
        return kBadInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "malformed JSON: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return kBadInput;
    } catch (const BadInput& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return kBadInput;
    }
    return kOk;
}
