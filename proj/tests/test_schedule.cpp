#include <cmath>

#include "doctest.h"

#include "crw/schedule.hpp"
#include "oracles.hpp"

using namespace crw;

TEST_CASE("stage_count examples") {
    CHECK(stage_count(1000000, 100, 0.5) == 4);
    CHECK(stage_count(10, 10, 1.0) == 0);
    CHECK(stage_count(1000000, 10, 1.0) == 5);
    CHECK(stage_count(10, 100, 0.5) == 0);
}

TEST_CASE("stage_count agrees with exact integer powers") {
    const std::pair<int, int> lambdas[] = {{1, 2}, {1, 1}, {1, 3}, {2, 3}, {1, 4}};
    for (std::int64_t n : {10, 100, 999, 1000, 4096, 100000, 1000000, 999999, 1000001}) {
        for (std::int64_t m : {2, 3, 4, 10, 16, 31, 32, 100, 1000}) {
            for (auto [p, q] : lambdas) {
                INFO("n=" << n << " m=" << m << " lambda=" << p << "/" << q);
                CHECK(stage_count(n, m, double(p) / q) == oracle::stage_count_exact(n, m, p, q));
            }
        }
    }
}

TEST_CASE("stage_count monotonicity") {
    for (std::int64_t m : {2, 5, 10, 50}) {
        int prev = 0;
        for (std::int64_t n = 1; n <= 200000; n = n * 3 + 1) {
            const int u = stage_count(n, m, 0.5);
            CHECK(u >= prev);
            prev = u;
        }
    }
    for (std::int64_t n : {1000, 1000000}) {
        int prev = 1 << 30;
        for (std::int64_t m = 2; m < 1000; m = m * 2 + 1) {
            const int u = stage_count(n, m, 0.5);
            CHECK(u <= prev);
            prev = u;
        }
        prev = 1 << 30;
        for (double lambda : {0.1, 0.25, 0.5, 1.0, 2.0}) {
            const int u = stage_count(n, 10, lambda);
            CHECK(u <= prev);
            prev = u;
        }
    }
}

TEST_CASE("1d schedule at n=1e6, m=100") {
    const Schedule s = build_schedule_1d({1000000, 100, 0.5});
    CHECK(s.stage_count == 4);
    CHECK(s.windows == 4);
    CHECK(s.times == std::vector<std::int64_t>{0, 495000, 990000, 999000, 999900, 1000000});
    CHECK(s.eps_m == doctest::Approx(std::log(100.0) / 10.0).epsilon(1e-12));
    CHECK(s.eps_m == doctest::Approx(0.46052).epsilon(1e-4));
    CHECK(s.half_widths[2] == 64);
    CHECK(s.length(3) == 9000);
    CHECK(s.half_widths.front() == 0);
    CHECK(s.half_widths.back() == 0);
    CHECK(s.times[static_cast<std::size_t>(s.windows)] == s.n - s.m);
    for (int k = 1; k <= s.windows; ++k) {
        const double expect = std::sqrt(s.eps_m * static_cast<double>(s.length(k + 1)));
        CHECK(s.half_widths[static_cast<std::size_t>(k)] == static_cast<std::int64_t>(std::floor(expect)));
    }
}

TEST_CASE("1d schedule with a single stage keeps two windows") {
    const Schedule s = build_schedule_1d({1000, 100, 0.5});
    CHECK(s.times == std::vector<std::int64_t>{0, 450, 900, 1000});
    const Schedule t = build_schedule_1d({1000000, 10000, 0.5});
    CHECK(t.times == std::vector<std::int64_t>{0, 495000, 990000, 1000000});
    CHECK(t.half_widths == std::vector<std::int64_t>{0, 213, 30, 0});
}

TEST_CASE("schedule invariants over a grid") {
    for (std::int64_t n : {1000, 20000, 1000000}) {
        for (std::int64_t m : {4, 10, 100, 500}) {
            if (m >= n) continue;
            const Schedule s = build_schedule_1d({n, m, 0.5});
            std::int64_t total = 0;
            for (int k = 1; k <= s.stages(); ++k) {
                CHECK(s.length(k) > 0);
                total += s.length(k);
            }
            CHECK(total == n);
            CHECK(s.times[1] == s.times[2] / 2);
            for (int k = 3; k < s.windows; ++k) {
                // N_{k+1} / N_k = m^{-eta} up to the floor of each t_k.
                const double ratio_target = std::pow(static_cast<double>(m), -0.5);
                CHECK(std::abs(static_cast<double>(s.length(k + 1)) - ratio_target * s.length(k)) <= 2.0 + 2.0);
            }
            for (auto h : s.half_widths) CHECK(h >= 0);
        }
    }
}

TEST_CASE("schedule construction errors") {
    CHECK_THROWS_AS(build_schedule_1d({100, 100, 0.5}), ScheduleError);
    CHECK_THROWS_AS(build_schedule_1d({100, 200, 0.5}), ScheduleError);
    CHECK_THROWS_AS(build_schedule_1d({1000, 100, 1.5}), ScheduleError);
    CHECK_THROWS_AS(build_schedule_1d({1000, 1, 0.5}), ScheduleError);
    CHECK_THROWS_AS(build_schedule_2d({1000000, 1000, 0.5, 0.2, 0.3}), ScheduleError);  // theta too small
    CHECK_THROWS_AS(build_schedule_2d({1000000, 1000, 0.5, 0.375, 0.9}), ScheduleError);  // ratio >= eps
    CHECK_THROWS_AS(build_schedule_2d({1000000, 10, 0.5, 0.375, 1.0 / 3.0, 2}), ScheduleError);  // stage cap
}

TEST_CASE("choose_theta_kappa") {
    for (double eps = 0.05; eps < 1.0; eps += 0.05) {
        const ThetaKappa tk = choose_theta_kappa(eps);
        CHECK(tk.theta > (1 - eps) / 2);
        CHECK(tk.theta < 0.5);
        CHECK(tk.kappa > 0.0);
        CHECK(tk.kappa < 1.0);
        const double ratio = (1 - 2 * tk.theta) / (1 - 2 * tk.kappa * tk.theta);
        CHECK(ratio > 0.0);
        CHECK(ratio < eps);
    }
    const ThetaKappa a = choose_theta_kappa(0.9);
    CHECK(a.theta == doctest::Approx(0.275));
    CHECK(a.kappa == doctest::Approx((1 - 0.45 / 0.9) / 0.55 / 2));
    const ThetaKappa b = choose_theta_kappa(0.5);
    CHECK(b.theta == doctest::Approx(0.375));
    CHECK(b.kappa == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("2d schedules") {
    const Schedule s = build_schedule_2d({1000000, 1000, 0.5, 0.45, 0.444});
    CHECK(s.stage_count == 2);
    CHECK(s.half_widths.back() == 0);
    for (int k = 1; k <= s.windows; ++k) {
        CHECK(s.half_widths[static_cast<std::size_t>(k)] < 1000);
        CHECK(s.half_widths[static_cast<std::size_t>(k)] ==
              static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(s.length(k + 1)), 0.45) + 1e-9)));
    }
    const Schedule d = build_schedule_2d({1000000, 1000, 0.5, 0.375, 1.0 / 3.0});
    CHECK(d.times == std::vector<std::int64_t>{0, 495000, 990000, 999000, 1000000});
    CHECK(d.half_widths == std::vector<std::int64_t>{0, 136, 30, 13, 0});
    CHECK(d.inside(1, 136, -136));
    CHECK_FALSE(d.inside(1, 137, 0));
    CHECK(d.inside(4, 0, 0));
    CHECK_FALSE(d.inside(4, 1, 0));
}

TEST_CASE("validate_regime") {
    const RegimeReport a = validate_regime({1000000, 100, 0.5});
    CHECK(a.eps_u2 == doctest::Approx(0.46052 * 16).epsilon(1e-4));
    CHECK(a.flagged);
    const RegimeReport b = validate_regime({1000000, 10000, 0.5});
    CHECK(b.u_n == 1);
    CHECK(b.eps_m == doctest::Approx(0.0921).epsilon(1e-3));
    CHECK_FALSE(b.flagged);
    double prev = 1e9;
    for (std::int64_t m : {100, 1000, 10000, 100000}) {
        const double r = validate_regime({1000000000000, m, 0.5}).u_over_root;
        CHECK(r < prev);
        prev = r;
    }
}
