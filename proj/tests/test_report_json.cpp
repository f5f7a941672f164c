#include "doctest.h"

#include "crw/report_json.hpp"

using namespace crw;
using nlohmann::json;

TEST_CASE("schedule JSON round-trips") {
    for (const Schedule& s : {build_schedule_1d({1000000, 100, 0.5}), build_schedule_2d({1000000, 1000, 0.5, 0.375, 1.0 / 3.0})}) {
        const json j = to_json(s);
        CHECK(j["schema_version"] == kSchemaVersion);
        CHECK(j.contains("times"));
        CHECK(j.contains("half_widths"));
        CHECK(j.contains("u"));
        const Schedule back = schedule_from_json(json::parse(j.dump()));
        CHECK(to_json(back).dump() == j.dump());
        CHECK(back.times == s.times);
        CHECK(back.half_widths == s.half_widths);
    }
    const json j1 = to_json(build_schedule_1d({1000000, 100, 0.5}));
    CHECK(j1.contains("eps_m"));
    CHECK(j1.contains("eta"));
}

TEST_CASE("schedule JSON is validated") {
    json j = to_json(build_schedule_1d({1000000, 100, 0.5}));
    json bad = j;
    bad["times"][2] = 10;
    CHECK_THROWS_AS(schedule_from_json(bad), ScheduleError);
    bad = j;
    bad["half_widths"].back() = 3;
    CHECK_THROWS_AS(schedule_from_json(bad), ScheduleError);
    bad = j;
    bad.erase("times");
    CHECK_THROWS_AS(schedule_from_json(bad), ScheduleError);
}

TEST_CASE("schedule from JSON drives the same strategy") {
    const Problem p{1, 10000, 100};
    StrategySpec a;
    a.name = "windowed_1d";
    StrategySpec b = a;
    b.schedule = schedule_from_json(json::parse(to_json(schedule_for(a, p)).dump()));
    McConfig ca;
    ca.problem = p;
    ca.strategy = a;
    ca.trials = 3000;
    ca.seed = 4;
    McConfig cb = ca;
    cb.strategy = b;
    CHECK(estimate_success(ca).successes == estimate_success(cb).successes);
}

TEST_CASE("strategy specs round-trip and resolve defaults") {
    StrategySpec s;
    s.name = "windowed_2d";
    const json j = to_json(resolve_spec(s));
    CHECK(j["theta"].get<double>() == doctest::Approx(0.375));
    CHECK(j["kappa"].get<double>() == doctest::Approx(1.0 / 3.0));
    const StrategySpec back = strategy_spec_from_json(j);
    CHECK(back.name == "windowed_2d");
    CHECK(*back.theta == doctest::Approx(0.375));
    CHECK(strategy_spec_from_json(json("lazy_max")).name == "lazy_max");
}

TEST_CASE("estimate report JSON") {
    McConfig c;
    c.problem = {1, 100, 10};
    c.strategy.name = "lazy_max";
    c.trials = 100;
    c.seed = 1;
    const EstimateReport r = estimate_success(c);
    const json with = to_json(r, true);
    const json without = to_json(r, false);
    CHECK(with.contains("wall_time_s"));
    CHECK_FALSE(without.contains("wall_time_s"));
    CHECK(without["schema_version"] == kSchemaVersion);
    CHECK(without["wilson95"].size() == 2);
}

TEST_CASE("sweep config parsing") {
    const json cells = json::parse(R"({"seed": 3, "trials": 50,
        "cells": [{"d": 1, "n": 100, "m": 10, "strategy": "lazy_max"},
                  {"d": 1, "n": 100, "m": 10, "strategy": {"name": "always_step"}, "trials": 7, "delayed": true}]})");
    const SweepConfig a = sweep_config_from_json(cells);
    CHECK(a.cells.size() == 2);
    CHECK(a.cells[1].trials == 7);
    CHECK(a.cells[1].strategy.delayed);
    const json grid = json::parse(R"({"seed": 3, "grid": {"d": [1, 2], "n": [10000, 1000000], "m_power": [0.5],
        "strategy": ["lazy_max", "always_step"]}})");
    const SweepConfig b = sweep_config_from_json(grid);
    CHECK(b.cells.size() == 8);
    CHECK(b.cells[0].problem.m == 100);
    CHECK(b.cells[2].problem.m == 1000);
    CHECK_THROWS(sweep_config_from_json(json::parse(R"({"grid": {"n": [10], "m": [2], "strategy": "lazy_max"}})")));
    CHECK_THROWS(sweep_config_from_json(json::parse(R"({"seed": 1})")));
    CHECK_THROWS(sweep_config_from_json(json::parse(R"({"seed": 1, "grid": {"n": [10], "strategy": "x"}})")));
}

TEST_CASE("sweep rows round-trip") {
    SweepRow row;
    row.cell = 3;
    row.spec.problem = {2, 1000, 31};
    row.spec.strategy.name = "lazy_max";
    row.spec.seed = 5;
    row.trials = 10;
    row.successes = 4;
    row.p_hat = 0.4;
    row.wilson = wilson_interval(4, 10);
    const json j = to_json(row);
    CHECK(to_json(sweep_row_from_json(json::parse(j.dump()))).dump() == j.dump());
}

TEST_CASE("check reports serialize") {
    CheckReport r;
    r.name = "x";
    r.fail("broken");
    const json j = to_json(r);
    CHECK(j["status"] == "fail");
    CHECK(j["messages"][0] == "broken");
}
