#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "json.hpp"

#include "crw/core_walk.hpp"
#include "crw/schedule.hpp"
#include "crw/strategies.hpp"

namespace crw {

enum class CheckStatus { Pass, Fail, Insufficient };

const char* to_string(CheckStatus s);

struct CheckReport {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    std::vector<std::string> messages;
    nlohmann::json rows = nlohmann::json::array();
    nlohmann::json summary = nlohmann::json::object();

    bool passed() const { return status == CheckStatus::Pass; }
    void fail(std::string message);
};

using Rational = boost::rational<std::int64_t>;

/// Exhaustive maximum of P(W_n = 0) over all admissible decision trees,
/// enumerating full histories. Admissibility is recomputed from the history,
/// independently of the walk module. Feasible for n <= 8 or so.
Rational exhaustive_optimum(const Problem& problem);

/// DP optimum against exhaustive_optimum over d=1, 1 <= n <= nmax, 1 <= m <= mmax.
CheckReport check_bruteforce(std::int64_t nmax = 6, std::int64_t mmax = 3);

/// Hitting tails against the reflection identity for 1 <= x <= xmax, l <= lmax.
CheckReport check_reflection(std::int64_t xmax = 20, std::int64_t lmax = 400, double tolerance = 1e-12);

/// Tails at l = round(y x^2) against 2 (Phi(1/sqrt y) - 1/2).
CheckReport check_normal_approx(const std::vector<std::int64_t>& xs = {10, 50, 200},
                                const std::vector<double>& ys = {0.25, 0.5, 1, 2, 4, 8, 16});

double normal_tail_limit(double y);

/// exp(-m h_k^2 / 2 N_k) in d=1 and 4 exp(-m h_k^2 / 2 N_k) in d=2, for
/// stages k = 1 .. windows. Index k-1.
std::vector<double> hoeffding_bounds(const Schedule& schedule);
/// The exponents m h_k^2 / 2 N_k behind hoeffding_bounds.
std::vector<double> hoeffding_exponents(const Schedule& schedule);

struct HoeffdingConfig {
    Problem problem;
    StrategySpec strategy;
    std::int64_t trials = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Empirical overshoot (W_{t_k} outside the window after a hit of 0 in the
/// stage) against the analytic bound plus three binomial standard errors.
CheckReport check_hoeffding(const HoeffdingConfig& config);

/// E(L | x) / E(L | 0) over horizons N with |x| = floor(N^x_exponent) along an axis.
CheckReport check_local_time_ratio(const std::vector<std::int64_t>& horizons, double x_exponent = 0.4,
                                   double min_ratio = 0.05, double stability = 0.10);

/// Same ratio for each stage of a 2d schedule with N_k <= max_horizon, from
/// the corner of the previous window.
CheckReport check_local_time_schedule(const Schedule& schedule, std::int64_t max_horizon = 1 << 16);

/// evaluate_strategy_exact of every strategy against the DP optimum.
CheckReport check_dominance(const std::vector<std::int64_t>& ns = {64, 256, 1024},
                            const std::vector<std::int64_t>& ms = {4, 16, 64}, double tolerance = 1e-10);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    std::vector<double> residuals;
};

/// Least squares of log p against log x. Needs at least 4 points, positive
/// values and a span of at least one decade in x.
ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& p);

/// (C(n, n/2) 2^{-n})^2 for even n, 0 for odd n: P(2d SSRW at 0 at time n).
double ssrw_return_2d(std::int64_t n);

}  // namespace crw
