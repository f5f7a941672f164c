#pragma once

#include "json.hpp"

#include "crw/analysis.hpp"
#include "crw/monte_carlo.hpp"
#include "crw/schedule.hpp"
#include "crw/strategies.hpp"

namespace crw {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const Problem& p);
Problem problem_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Schedule& s);
/// Inverse of to_json(Schedule); validates the invariants.
Schedule schedule_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RegimeReport& r);

nlohmann::json to_json(const StrategySpec& s);
StrategySpec strategy_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Interval& ci);
nlohmann::json to_json(const WindowReport& w);

/// wall_time_s is written only when include_timing is set, so that reports
/// from identical runs compare byte for byte.
nlohmann::json to_json(const EstimateReport& r, bool include_timing = true);

nlohmann::json to_json(const SweepRow& row);
SweepRow sweep_row_from_json(const nlohmann::json& j);

/// Either {"cells": [...]} or {"grid": {"d": [...], "n": [...], "m": [...],
/// "strategy": [...]}} plus optional seed, trials, threads, marker_dir.
SweepConfig sweep_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CheckReport& r);

}  // namespace crw
