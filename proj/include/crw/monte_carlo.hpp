#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crw/core_walk.hpp"
#include "crw/schedule.hpp"
#include "crw/strategies.hpp"

namespace crw {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval; z = 1.96 gives 95% coverage.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

struct McConfig {
    Problem problem;
    StrategySpec strategy;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    int threads = 1;
    bool per_window = false;
    /// Keep the trial indices of the first K failures (replay with run_trajectory).
    int keep_failures = 0;
    bool progress = false;
};

/// Per-stage counts for P(W_{t_k} in I_k | W_{t_{k-1}} in I_{k-1}).
struct StageCounts {
    std::int64_t conditioned = 0;  ///< W_{t_{k-1}} in I_{k-1}
    std::int64_t inside = 0;       ///< ... and W_{t_k} in I_k
    std::int64_t no_hit = 0;       ///< ... and tau_0 > t_k
    std::int64_t overshoot = 0;    ///< ... and tau_0 <= t_k, W_{t_k} outside I_k
    std::int64_t active_hits = 0;      ///< strategy not failed at t_{k-1}, tau_0 <= t_k
    std::int64_t active_overshoot = 0; ///< ... and W_{t_k} outside I_k

    StageCounts& operator+=(const StageCounts& o);
};

struct StageEstimate {
    int stage = 0;
    StageCounts counts;
    bool insufficient = false;
    double p_inside = 0.0;
    Interval ci{};
    double p_no_hit = 0.0;
    double p_overshoot = 0.0;
};

struct WindowReport {
    std::vector<StageEstimate> stages;
    double product = 1.0;  ///< product of the stage estimates
};

struct EstimateReport {
    std::string strategy;
    Problem problem;
    StrategySpec spec;
    std::optional<Schedule> schedule;
    std::int64_t trials = 0;
    std::int64_t successes = 0;
    double p_hat = 0.0;
    Interval wilson{};
    std::vector<std::int64_t> stage_failures;  ///< index k-1: runs that failed at stage k
    std::optional<WindowReport> windows;
    std::vector<std::int64_t> failed_trials;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;

    double standard_error() const;
};

/// Runs independent trials with per-trial streams derive_seed(seed, t).
/// The report does not depend on the thread count. An admissibility
/// violation aborts with an AdmissibilityError naming the trial.
EstimateReport estimate_success(const McConfig& config);

/// estimate_success with per-window statistics for a windowed strategy.
WindowReport window_conditionals(const McConfig& config, const Schedule& schedule);

WindowReport summarize_windows(const std::vector<StageCounts>& counts);

// ---------------------------------------------------------------------------

struct SweepCell {
    Problem problem;
    StrategySpec strategy;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
};

struct SweepConfig {
    std::vector<SweepCell> cells;
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    /// Directory of per-cell result markers; completed cells are skipped on rerun.
    std::string marker_dir;
};

struct SweepRow {
    std::size_t cell = 0;
    SweepCell spec;
    std::int64_t trials = 0;
    std::int64_t successes = 0;
    double p_hat = 0.0;
    Interval wilson{};
    std::string error;
    bool resumed = false;
};

std::vector<SweepRow> sweep(const SweepConfig& config,
                            const std::function<void(const SweepRow&)>& on_row = {});

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

}  // namespace crw
