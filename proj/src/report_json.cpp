#include "crw/report_json.hpp"

#include <cmath>
#include <stdexcept>

namespace crw {

using nlohmann::json;

json to_json(const Problem& p) { return {{"d", p.d}, {"n", p.n}, {"m", p.m}}; }

Problem problem_from_json(const json& j) {
    Problem p{j.at("d").get<int>(), j.at("n").get<std::int64_t>(), j.at("m").get<std::int64_t>()};
    p.validate();
    return p;
}

json to_json(const Schedule& s) {
    json j = {{"schema_version", kSchemaVersion},
              {"d", s.d},
              {"n", s.n},
              {"m", s.m},
              {"u_n", s.stage_count},
              {"u", s.windows},
              {"times", s.times},
              {"half_widths", s.half_widths}};
    if (s.d == 1) {
        j["eta"] = s.eta;
        j["eps_m"] = s.eps_m;
    } else {
        j["epsilon"] = s.epsilon;
        j["theta"] = s.theta;
        j["kappa"] = s.kappa;
    }
    return j;
}

Schedule schedule_from_json(const json& j) {
    Schedule s;
    try {
        s.d = j.at("d").get<int>();
        s.n = j.at("n").get<std::int64_t>();
        s.m = j.at("m").get<std::int64_t>();
        s.stage_count = j.value("u_n", 0);
        s.windows = j.at("u").get<int>();
        s.times = j.at("times").get<std::vector<std::int64_t>>();
        s.half_widths = j.at("half_widths").get<std::vector<std::int64_t>>();
        if (s.d == 1) {
            s.eta = j.value("eta", 0.0);
            s.eps_m = j.value("eps_m", 0.0);
        } else {
            s.epsilon = j.value("epsilon", 0.0);
            s.theta = j.value("theta", 0.0);
            s.kappa = j.value("kappa", 0.0);
        }
    } catch (const json::exception& e) {
        throw ScheduleError(std::string("malformed schedule JSON: ") + e.what());
    }
    if (s.d != 1 && s.d != 2) throw ScheduleError("schedule d must be 1 or 2");
    if (s.windows < 1 || s.times.size() != static_cast<std::size_t>(s.windows) + 2) {
        throw ScheduleError("schedule needs u >= 1 and u+2 times");
    }
    if (s.half_widths.size() != s.times.size()) throw ScheduleError("half_widths and times differ in length");
    if (s.times.front() != 0 || s.times.back() != s.n) throw ScheduleError("times must run from 0 to n");
    for (std::size_t k = 1; k < s.times.size(); ++k) {
        if (s.times[k] <= s.times[k - 1]) throw ScheduleError("times must increase strictly");
    }
    for (std::int64_t h : s.half_widths) {
        if (h < 0) throw ScheduleError("half-widths must be nonnegative");
    }
    if (s.half_widths.front() != 0 || s.half_widths.back() != 0) {
        throw ScheduleError("first and terminal windows must be {0}");
    }
    return s;
}

json to_json(const RegimeReport& r) {
    return {{"u_n", r.u_n},
            {"eps_m", r.eps_m},
            {"eps_m_u_n_squared", r.eps_u2},
            {"u_n_over_root", r.u_over_root},
            {"hypothesis_ratio", r.hypothesis_ratio},
            {"flagged", r.flagged},
            {"weak_hypothesis", r.weak_hypothesis},
            {"notes", r.notes}};
}

json to_json(const StrategySpec& s) {
    json j = {{"name", s.name}, {"delayed", s.delayed}};
    if (s.name == "windowed_1d") j["eta"] = s.eta;
    if (s.name == "windowed_2d") {
        j["epsilon"] = s.epsilon;
        j["stage_cap"] = s.stage_cap;
        if (s.theta) j["theta"] = *s.theta;
        if (s.kappa) j["kappa"] = *s.kappa;
    }
    if (s.schedule) j["schedule"] = to_json(*s.schedule);
    return j;
}

StrategySpec strategy_spec_from_json(const json& j) {
    StrategySpec s;
    if (j.is_string()) {
        s.name = j.get<std::string>();
        return s;
    }
    s.name = j.at("name").get<std::string>();
    s.delayed = j.value("delayed", false);
    s.eta = j.value("eta", s.eta);
    s.epsilon = j.value("epsilon", s.epsilon);
    s.stage_cap = j.value("stage_cap", s.stage_cap);
    if (j.contains("theta")) s.theta = j.at("theta").get<double>();
    if (j.contains("kappa")) s.kappa = j.at("kappa").get<double>();
    if (j.contains("schedule")) s.schedule = schedule_from_json(j.at("schedule"));
    return s;
}

json to_json(const Interval& ci) { return json::array({ci.lo, ci.hi}); }

json to_json(const WindowReport& w) {
    json stages = json::array();
    for (const StageEstimate& e : w.stages) {
        json s = {{"stage", e.stage},
                  {"conditioned", e.counts.conditioned},
                  {"inside", e.counts.inside},
                  {"no_hit", e.counts.no_hit},
                  {"overshoot", e.counts.overshoot},
                  {"active_hits", e.counts.active_hits},
                  {"active_overshoot", e.counts.active_overshoot}};
        if (e.insufficient) {
            s["status"] = "insufficient data";
        } else {
            s["p_inside"] = e.p_inside;
            s["wilson95"] = to_json(e.ci);
            s["p_no_hit"] = e.p_no_hit;
            s["p_overshoot"] = e.p_overshoot;
        }
        stages.push_back(s);
    }
    return {{"stages", stages}, {"product", w.product}};
}

json to_json(const EstimateReport& r, bool include_timing) {
    json j = {{"schema_version", kSchemaVersion},
              {"strategy", r.strategy},
              {"spec", to_json(resolve_spec(r.spec))},
              {"problem", to_json(r.problem)},
              {"seed", r.seed},
              {"trials", r.trials},
              {"successes", r.successes},
              {"p_hat", r.p_hat},
              {"standard_error", r.standard_error()},
              {"wilson95", to_json(r.wilson)},
              {"stage_failures", r.stage_failures}};
    if (r.schedule) j["schedule"] = to_json(*r.schedule);
    if (r.windows) j["windows"] = to_json(*r.windows);
    if (!r.failed_trials.empty()) j["failed_trials"] = r.failed_trials;
    if (include_timing) j["wall_time_s"] = r.wall_time_s;
    return j;
}

json to_json(const SweepRow& row) {
    json j = {{"schema_version", kSchemaVersion},
              {"cell", row.cell},
              {"problem", to_json(row.spec.problem)},
              {"strategy", to_json(row.spec.strategy)},
              {"trials", row.trials},
              {"successes", row.successes},
              {"p_hat", row.p_hat},
              {"wilson95", to_json(row.wilson)},
              {"error", row.error}};
    if (row.spec.seed) j["seed"] = *row.spec.seed;
    return j;
}

SweepRow sweep_row_from_json(const json& j) {
    SweepRow row;
    row.cell = j.at("cell").get<std::size_t>();
    const json& p = j.at("problem");
    row.spec.problem = Problem{p.at("d").get<int>(), p.at("n").get<std::int64_t>(), p.at("m").get<std::int64_t>()};
    row.spec.strategy = strategy_spec_from_json(j.at("strategy"));
    if (j.contains("seed")) row.spec.seed = j.at("seed").get<std::uint64_t>();
    row.trials = j.at("trials").get<std::int64_t>();
    row.successes = j.at("successes").get<std::int64_t>();
    row.p_hat = j.at("p_hat").get<double>();
    row.wilson = {j.at("wilson95").at(0).get<double>(), j.at("wilson95").at(1).get<double>()};
    row.error = j.value("error", "");
    return row;
}

namespace {

template <class T>
std::vector<T> as_list(const json& j) {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
}

}  // namespace

SweepConfig sweep_config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("sweep config must be a JSON object");
    SweepConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.trials = j.value("trials", c.trials);
    c.threads = j.value("threads", c.threads);
    c.marker_dir = j.value("marker_dir", std::string{});
    if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");

    if (j.contains("cells")) {
        for (const json& cell : j.at("cells")) {
            SweepCell sc;
            sc.problem = Problem{cell.at("d").get<int>(), cell.at("n").get<std::int64_t>(),
                                 cell.at("m").get<std::int64_t>()};
            sc.strategy = strategy_spec_from_json(cell.at("strategy"));
            if (cell.contains("delayed")) sc.strategy.delayed = cell.at("delayed").get<bool>();
            if (cell.contains("seed")) sc.seed = cell.at("seed").get<std::uint64_t>();
            if (cell.contains("trials")) sc.trials = cell.at("trials").get<std::int64_t>();
            c.cells.push_back(std::move(sc));
        }
    } else if (j.contains("grid")) {
        const json& g = j.at("grid");
        const auto ds = as_list<int>(g.value("d", json(1)));
        const auto ns = as_list<std::int64_t>(g.at("n"));
        std::vector<json> strategies;
        for (const json& s : (g.at("strategy").is_array() ? g.at("strategy") : json::array({g.at("strategy")}))) {
            strategies.push_back(s);
        }
        const bool by_power = g.contains("m_power");
        if (by_power == g.contains("m")) throw std::invalid_argument("grid needs exactly one of m and m_power");
        for (int d : ds) {
            for (std::int64_t n : ns) {
                std::vector<std::int64_t> ms;
                if (by_power) {
                    for (double e : as_list<double>(g.at("m_power"))) {
                        ms.push_back(std::llround(std::pow(static_cast<double>(n), e)));
                    }
                } else {
                    ms = as_list<std::int64_t>(g.at("m"));
                }
                for (std::int64_t m : ms) {
                    for (const json& s : strategies) {
                        SweepCell sc;
                        sc.problem = Problem{d, n, m};
                        sc.strategy = strategy_spec_from_json(s);
                        c.cells.push_back(std::move(sc));
                    }
                }
            }
        }
    } else {
        throw std::invalid_argument("sweep config needs \"cells\" or \"grid\"");
    }
    if (c.cells.empty()) throw std::invalid_argument("sweep config has no cells");
    return c;
}

json to_json(const CheckReport& r) {
    return {{"schema_version", kSchemaVersion},
            {"check", r.name},
            {"status", to_string(r.status)},
            {"messages", r.messages},
            {"summary", r.summary},
            {"rows", r.rows}};
}

}  // namespace crw
