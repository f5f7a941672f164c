#include "crw/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "crw/report_json.hpp"
#include "crw/trajectory.hpp"

namespace crw {

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    const double nn = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    // Guard the ordering lo <= p <= hi against rounding at p in {0, 1}.
    ci.lo = std::min(ci.lo, p);
    ci.hi = std::max(ci.hi, p);
    return ci;
}

StageCounts& StageCounts::operator+=(const StageCounts& o) {
    conditioned += o.conditioned;
    inside += o.inside;
    no_hit += o.no_hit;
    overshoot += o.overshoot;
    active_hits += o.active_hits;
    active_overshoot += o.active_overshoot;
    return *this;
}

double EstimateReport::standard_error() const {
    if (trials == 0) return 0.0;
    return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

namespace {

constexpr std::int64_t kBlock = 2048;

struct BlockResult {
    std::int64_t successes = 0;
    std::vector<std::int64_t> stage_failures;
    std::vector<StageCounts> stage_counts;
    std::vector<std::int64_t> failed_trials;
    bool error = false;
    std::int64_t error_trial = 0;
    std::int64_t error_time = 0;
    std::string error_what;
};

void record_windows(const WindowTracker& tracker, const Schedule& schedule, std::vector<StageCounts>& counts) {
    const auto& obs = tracker.stages();
    bool prev_inside = true;  // W_0 = 0 lies in I_0 = {0}
    for (int k = 1; k <= schedule.stages(); ++k) {
        const StageObservation& o = obs[static_cast<std::size_t>(k)];
        const bool inside = schedule.inside(k, o.position.x, o.position.y);
        StageCounts& c = counts[static_cast<std::size_t>(k - 1)];
        if (prev_inside) {
            ++c.conditioned;
            if (inside) ++c.inside;
            if (!o.hit) ++c.no_hit;
            if (o.hit && !inside) ++c.overshoot;
        }
        if (o.active && o.hit) {
            ++c.active_hits;
            if (!inside) ++c.active_overshoot;
        }
        prev_inside = inside;
    }
}

}  // namespace

WindowReport summarize_windows(const std::vector<StageCounts>& counts) {
    WindowReport r;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        StageEstimate e;
        e.stage = static_cast<int>(k) + 1;
        e.counts = counts[k];
        const auto& c = counts[k];
        if (c.conditioned == 0) {
            e.insufficient = true;
        } else {
            const double nn = static_cast<double>(c.conditioned);
            e.p_inside = static_cast<double>(c.inside) / nn;
            e.ci = wilson_interval(c.inside, c.conditioned);
            e.p_no_hit = static_cast<double>(c.no_hit) / nn;
            e.p_overshoot = static_cast<double>(c.overshoot) / nn;
            r.product *= e.p_inside;
        }
        r.stages.push_back(e);
    }
    return r;
}

EstimateReport estimate_success(const McConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
    config.problem.validate();
    const StrategyPtr strategy = make_strategy(config.strategy, config.problem);
    std::optional<Schedule> schedule;
    if (is_windowed(config.strategy)) schedule = schedule_for(config.strategy, config.problem);
    if (config.per_window && !schedule) {
        throw std::invalid_argument("per-window statistics need a windowed strategy");
    }
    const int stages = strategy->stages();

    const std::int64_t blocks = (config.trials + kBlock - 1) / kBlock;
    std::vector<BlockResult> results(static_cast<std::size_t>(blocks));
    std::atomic<std::int64_t> next_block{0};
    std::atomic<std::int64_t> done_blocks{0};
    std::atomic<bool> abort{false};
    std::mutex progress_mutex;

    auto worker = [&]() {
        std::optional<WindowTracker> tracker;
        if (config.per_window) tracker.emplace(*schedule);
        for (;;) {
            const std::int64_t b = next_block.fetch_add(1);
            if (b >= blocks || abort.load()) return;
            BlockResult& res = results[static_cast<std::size_t>(b)];
            res.stage_failures.assign(static_cast<std::size_t>(stages), 0);
            if (config.per_window) res.stage_counts.assign(static_cast<std::size_t>(schedule->stages()), {});
            const std::int64_t first = b * kBlock;
            const std::int64_t last = std::min(config.trials, first + kBlock);
            for (std::int64_t t = first; t < last; ++t) {
                RandomSource rng = RandomSource::for_trial(config.seed, static_cast<std::uint64_t>(t));
                SimResult sim;
                try {
                    sim = simulate(*strategy, config.problem, rng, {nullptr, tracker ? &*tracker : nullptr});
                } catch (const AdmissibilityError& e) {
                    res.error = true;
                    res.error_trial = t;
                    res.error_time = e.time_step();
                    res.error_what = e.what();
                    abort.store(true);
                    return;
                }
                if (sim.success) {
                    ++res.successes;
                } else if (static_cast<int>(res.failed_trials.size()) < config.keep_failures) {
                    res.failed_trials.push_back(t);
                }
                if (stages > 0 && strategy->failed(sim.phase)) {
                    ++res.stage_failures[static_cast<std::size_t>(strategy->stage_of(sim.phase) - 1)];
                }
                if (tracker) record_windows(*tracker, *schedule, res.stage_counts);
            }
            const std::int64_t done = done_blocks.fetch_add(1) + 1;
            if (config.progress && (done % std::max<std::int64_t>(1, blocks / 20) == 0 || done == blocks)) {
                std::lock_guard lock(progress_mutex);
                std::cerr << "[" << strategy->name() << "] " << done << "/" << blocks << " blocks\n";
            }
        }
    };

    const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(blocks)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    }

    EstimateReport rep;
    rep.strategy = strategy->name();
    rep.problem = config.problem;
    rep.spec = config.strategy;
    rep.schedule = schedule;
    rep.trials = config.trials;
    rep.seed = config.seed;
    rep.stage_failures.assign(static_cast<std::size_t>(stages), 0);
    std::vector<StageCounts> counts(schedule && config.per_window ? static_cast<std::size_t>(schedule->stages()) : 0);

    for (const BlockResult& res : results) {
        if (res.error) {
            std::ostringstream msg;
            msg << "trial " << res.error_trial << ": " << res.error_what;
            throw AdmissibilityError(res.error_time, msg.str());
        }
    }
    for (const BlockResult& res : results) {
        rep.successes += res.successes;
        for (std::size_t k = 0; k < res.stage_failures.size(); ++k) rep.stage_failures[k] += res.stage_failures[k];
        for (std::size_t k = 0; k < res.stage_counts.size(); ++k) counts[k] += res.stage_counts[k];
        for (std::int64_t t : res.failed_trials) {
            if (static_cast<int>(rep.failed_trials.size()) < config.keep_failures) rep.failed_trials.push_back(t);
        }
    }
    rep.p_hat = static_cast<double>(rep.successes) / static_cast<double>(rep.trials);
    rep.wilson = wilson_interval(rep.successes, rep.trials);
    if (config.per_window) rep.windows = summarize_windows(counts);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

WindowReport window_conditionals(const McConfig& config, const Schedule& schedule) {
    McConfig c = config;
    c.per_window = true;
    c.strategy.schedule = schedule;
    return *estimate_success(c).windows;
}

// ---------------------------------------------------------------------------

std::vector<SweepRow> sweep(const SweepConfig& config, const std::function<void(const SweepRow&)>& on_row) {
    namespace fs = std::filesystem;
    if (!config.marker_dir.empty()) fs::create_directories(config.marker_dir);
    std::vector<SweepRow> rows;
    for (std::size_t c = 0; c < config.cells.size(); ++c) {
        const SweepCell& cell = config.cells[c];
        const fs::path marker = config.marker_dir.empty()
                                    ? fs::path{}
                                    : fs::path(config.marker_dir) / ("cell_" + std::to_string(c) + ".json");
        SweepRow row;
        if (!marker.empty() && fs::exists(marker)) {
            std::ifstream in(marker);
            row = sweep_row_from_json(nlohmann::json::parse(in));
            row.resumed = true;
        } else {
            row.cell = c;
            row.spec = cell;
            row.spec.strategy = resolve_spec(cell.strategy);
            row.spec.seed = cell.seed.value_or(config.seed);
            row.trials = cell.trials.value_or(config.trials);
            try {
                McConfig mc;
                mc.problem = cell.problem;
                mc.strategy = row.spec.strategy;
                mc.trials = row.trials;
                mc.seed = *row.spec.seed;
                mc.threads = config.threads;
                const EstimateReport rep = estimate_success(mc);
                row.successes = rep.successes;
                row.p_hat = rep.p_hat;
                row.wilson = rep.wilson;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            if (!marker.empty()) {
                const fs::path tmp = marker.string() + ".tmp";
                {
                    std::ofstream out(tmp);
                    out << to_json(row).dump() << '\n';
                }
                fs::rename(tmp, marker);
            }
        }
        if (on_row) on_row(row);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_csv_header() {
    return "cell,strategy,delayed,d,n,m,eta,epsilon,theta,kappa,seed,trials,successes,p_hat,wilson_lo,wilson_hi,error";
}

std::string sweep_csv_row(const SweepRow& r) {
    std::ostringstream out;
    out.precision(12);
    const StrategySpec& s = r.spec.strategy;
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.cell << ',' << s.name << ',' << (s.delayed ? 1 : 0) << ',' << r.spec.problem.d << ','
        << r.spec.problem.n << ',' << r.spec.problem.m << ',' << s.eta << ',' << s.epsilon << ','
        << (s.theta ? std::to_string(*s.theta) : "") << ',' << (s.kappa ? std::to_string(*s.kappa) : "") << ','
        << r.spec.seed.value_or(0) << ',' << r.trials << ',' << r.successes << ',' << r.p_hat << ','
        << r.wilson.lo << ',' << r.wilson.hi << ',' << err;
    return out.str();
}

}  // namespace crw
