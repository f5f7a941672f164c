#include "crw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "crw/exact.hpp"
#include "crw/monte_carlo.hpp"

namespace crw {

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Insufficient: return "insufficient-data";
    }
    return "?";
}

void CheckReport::fail(std::string message) {
    status = CheckStatus::Fail;
    messages.push_back(std::move(message));
}

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

std::string fmt(const Rational& r) {
    std::ostringstream out;
    out << r.numerator() << '/' << r.denominator();
    return out.str();
}

Rational explore(const Problem& p, std::vector<int>& decisions, Point w) {
    const auto i = static_cast<std::int64_t>(decisions.size());
    if (i == p.n) return w.is_origin() ? Rational(1) : Rational(0);

    std::int64_t trailing_stands = 0;
    for (auto it = decisions.rbegin(); it != decisions.rend() && *it == 0; ++it) ++trailing_stands;

    static constexpr Point moves[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    const int count = 2 * p.d;
    Rational step(0);
    decisions.push_back(1);
    for (int k = 0; k < count; ++k) step += explore(p, decisions, w + moves[k]);
    decisions.pop_back();
    step /= count;

    Rational best = step;
    if (trailing_stands + 1 <= p.m - 1) {
        decisions.push_back(0);
        best = std::max(best, explore(p, decisions, w));
        decisions.pop_back();
    }
    return best;
}

double normal_tail_limit_impl(double y) { return std::erf(1.0 / std::sqrt(2.0 * y)); }

std::int64_t floor_power(std::int64_t n, double e) {
    return static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(n), e) + 1e-9));
}

}  // namespace

Rational exhaustive_optimum(const Problem& problem) {
    problem.validate();
    std::vector<int> decisions;
    decisions.reserve(static_cast<std::size_t>(problem.n));
    return explore(problem, decisions, Point{});
}

CheckReport check_bruteforce(std::int64_t nmax, std::int64_t mmax) {
    CheckReport r;
    r.name = "bruteforce";
    for (std::int64_t n = 1; n <= nmax; ++n) {
        Rational previous(-1);
        for (std::int64_t m = 1; m <= mmax; ++m) {
            const Problem p{1, n, m};
            const Rational dp = optimal_value<Rational>(p).value;
            const Rational oracle = exhaustive_optimum(p);
            r.rows.push_back({{"n", n}, {"m", m}, {"dp", fmt(dp)}, {"enumeration", fmt(oracle)}});
            if (dp != oracle) {
                r.fail("n=" + std::to_string(n) + " m=" + std::to_string(m) + ": DP " + fmt(dp) +
                       " != enumeration " + fmt(oracle));
            }
            if (dp < previous) r.fail("optimal value decreases in m at n=" + std::to_string(n));
            if (m == 1 && n % 2 == 1 && dp != Rational(0)) r.fail("m=1, odd n must give 0");
            previous = dp;
        }
    }
    r.summary = {{"nmax", nmax}, {"mmax", mmax}, {"problems", r.rows.size()}};
    return r;
}

CheckReport check_reflection(std::int64_t xmax, std::int64_t lmax, double tolerance) {
    CheckReport r;
    r.name = "reflection";
    const auto table = hitting_tail_table_1d(xmax, lmax);
    std::int64_t compared = 0;
    std::int64_t excluded = 0;
    double max_error = 0.0;
    nlohmann::json excluded_samples = nlohmann::json::array();
    for (std::int64_t x = 1; x <= xmax; ++x) {
        for (std::int64_t l = 0; l <= lmax; ++l) {
            const double exact = table[static_cast<std::size_t>(x)][static_cast<std::size_t>(l)];
            if (!reflection_applicable(x, l)) {
                ++excluded;
                if (excluded_samples.size() < 8) {
                    excluded_samples.push_back(
                        {{"x", x}, {"l", l}, {"exact", exact}, {"reflection", reflection_tail_1d(x, l)}});
                }
                continue;
            }
            ++compared;
            const double err = std::abs(exact - reflection_tail_1d(x, l));
            max_error = std::max(max_error, err);
            if (err > tolerance && r.messages.size() < 10) {
                r.fail("x=" + std::to_string(x) + " l=" + std::to_string(l) + ": |diff| = " + fmt(err));
            }
        }
    }
    r.rows = excluded_samples;
    r.summary = {{"xmax", xmax},        {"lmax", lmax},           {"compared", compared},
                 {"parity_excluded", excluded}, {"max_error", max_error}, {"tolerance", tolerance}};
    return r;
}

double normal_tail_limit(double y) { return normal_tail_limit_impl(y); }

CheckReport check_normal_approx(const std::vector<std::int64_t>& xs, const std::vector<double>& ys) {
    CheckReport r;
    r.name = "normal";
    if (xs.empty() || ys.empty()) throw std::invalid_argument("empty x or y grid");
    std::vector<double> worst;
    for (std::int64_t x : xs) {
        double dev = 0.0;
        for (double y : ys) {
            const auto l = static_cast<std::int64_t>(std::llround(y * static_cast<double>(x) * static_cast<double>(x)));
            const double exact = hitting_tail_closed_form(x, l);
            const double gauss = normal_tail_limit_impl(y);
            const double rel = std::abs(exact - gauss) / gauss;
            dev = std::max(dev, rel);
            r.rows.push_back({{"x", x}, {"y", y}, {"l", l}, {"exact", exact}, {"gaussian", gauss}, {"rel_dev", rel}});
        }
        worst.push_back(dev);
    }
    for (std::size_t k = 1; k < worst.size(); ++k) {
        if (!(worst[k] < worst[k - 1] * 1.05)) {
            r.fail("max deviation does not shrink from x=" + std::to_string(xs[k - 1]) + " (" + fmt(worst[k - 1]) +
                   ") to x=" + std::to_string(xs[k]) + " (" + fmt(worst[k]) + ")");
        }
    }
    // The tail is nondecreasing in |x| at fixed l.
    const auto table = hitting_tail_table_1d(20, 400);
    std::int64_t violations = 0;
    for (std::size_t x = 2; x < table.size(); ++x) {
        for (std::size_t l = 0; l < table[x].size(); ++l) {
            if (table[x][l] + 1e-15 < table[x - 1][l]) ++violations;
        }
    }
    if (violations > 0) r.fail(std::to_string(violations) + " tail values decrease in |x|");
    r.summary = {{"max_rel_dev_by_x", worst}, {"x", xs}, {"monotone_violations", violations}};
    return r;
}

std::vector<double> hoeffding_exponents(const Schedule& s) {
    std::vector<double> out;
    for (int k = 1; k <= s.windows; ++k) {
        const double h = static_cast<double>(s.half_widths[static_cast<std::size_t>(k)]);
        out.push_back(static_cast<double>(s.m) * h * h / (2.0 * static_cast<double>(s.length(k))));
    }
    return out;
}

std::vector<double> hoeffding_bounds(const Schedule& s) {
    std::vector<double> out;
    const double factor = s.d == 1 ? 1.0 : 4.0;
    for (double e : hoeffding_exponents(s)) out.push_back(std::min(1.0, factor * std::exp(-e)));
    return out;
}

CheckReport check_hoeffding(const HoeffdingConfig& config) {
    CheckReport r;
    r.name = "hoeffding";
    const Schedule schedule = schedule_for(config.strategy, config.problem);
    McConfig mc;
    mc.problem = config.problem;
    mc.strategy = config.strategy;
    mc.trials = config.trials;
    mc.seed = config.seed;
    mc.threads = config.threads;
    const WindowReport windows = window_conditionals(mc, schedule);
    const std::vector<double> bounds = hoeffding_bounds(schedule);
    const std::vector<double> exponents = hoeffding_exponents(schedule);

    bool any_data = false;
    for (int k = 1; k <= schedule.stages(); ++k) {
        const StageCounts& c = windows.stages[static_cast<std::size_t>(k - 1)].counts;
        nlohmann::json row = {{"stage", k},
                              {"t_k", schedule.times[static_cast<std::size_t>(k)]},
                              {"N_k", schedule.length(k)},
                              {"half_width", schedule.half_widths[static_cast<std::size_t>(k)]},
                              {"hits", c.active_hits},
                              {"overshoot", c.active_overshoot}};
        if (c.active_hits == 0) {
            row["status"] = to_string(CheckStatus::Insufficient);
            r.rows.push_back(row);
            continue;
        }
        any_data = true;
        const double nn = static_cast<double>(c.active_hits);
        const double freq = static_cast<double>(c.active_overshoot) / nn;
        const double se = std::sqrt(freq * (1.0 - freq) / nn);
        row["frequency"] = freq;
        row["se"] = se;
        if (k <= schedule.windows) {
            const double bound = bounds[static_cast<std::size_t>(k - 1)];
            row["bound"] = bound;
            row["exponent"] = exponents[static_cast<std::size_t>(k - 1)];
            if (freq > bound + 3.0 * se) {
                r.fail("stage " + std::to_string(k) + ": overshoot " + fmt(freq) + " > bound " + fmt(bound) +
                       " + 3 SE");
            }
        } else {
            // Terminal stage: after hitting 0 fewer than m steps remain, all standing.
            row["bound"] = 0.0;
            if (c.active_overshoot != 0) r.fail("terminal stage overshoot must be 0");
        }
        row["status"] = to_string(freq <= (row["bound"].get<double>() + 3.0 * se) ? CheckStatus::Pass
                                                                                 : CheckStatus::Fail);
        r.rows.push_back(row);
    }
    if (!any_data && r.status == CheckStatus::Pass) r.status = CheckStatus::Insufficient;
    r.summary = {{"d", config.problem.d},       {"n", config.problem.n}, {"m", config.problem.m},
                 {"trials", config.trials},      {"seed", config.seed},   {"exponents", exponents},
                 {"window_product", windows.product}};
    return r;
}

CheckReport check_local_time_ratio(const std::vector<std::int64_t>& horizons, double x_exponent, double min_ratio,
                                   double stability) {
    CheckReport r;
    r.name = "localtime";
    if (horizons.empty()) throw std::invalid_argument("empty horizon grid");
    double lo_ratio = 1.0;
    double lo_norm = 0.0;
    double hi_norm = 0.0;
    for (std::int64_t N : horizons) {
        const std::int64_t x = floor_power(N, x_exponent);
        const double num = expected_local_time({x, 0}, N);
        const double den = expected_local_time({0, 0}, N);
        const double ratio = num / den;
        const double norm = den / std::log(static_cast<double>(N));
        r.rows.push_back({{"N", N}, {"x", x}, {"numerator", num}, {"denominator", den}, {"ratio", ratio},
                          {"denominator_over_log_N", norm}});
        if (!(ratio > 0.0)) r.fail("ratio not positive at N=" + std::to_string(N));
        lo_ratio = std::min(lo_ratio, ratio);
        lo_norm = lo_norm == 0.0 ? norm : std::min(lo_norm, norm);
        hi_norm = std::max(hi_norm, norm);
    }
    if (!(lo_ratio > min_ratio)) r.fail("min ratio " + fmt(lo_ratio) + " <= " + fmt(min_ratio));
    const double spread = (hi_norm - lo_norm) / lo_norm;
    if (spread > stability) r.fail("E(L|0)/ln N varies by " + fmt(spread));

    // Farther starts along an axis hit less often.
    const std::int64_t N = horizons.back();
    const double den = expected_local_time({0, 0}, N);
    double previous = 1.0;
    nlohmann::json axis = nlohmann::json::array();
    for (std::int64_t x : {1, 2, 4, 8}) {
        const double ratio = expected_local_time({x, 0}, N) / den;
        axis.push_back({{"x", x}, {"ratio", ratio}});
        if (ratio > previous) r.fail("ratio increases with |x| at x=" + std::to_string(x));
        previous = ratio;
    }
    r.summary = {{"min_ratio", lo_ratio},  {"threshold", min_ratio}, {"log_normalized_spread", spread},
                 {"stability", stability}, {"axis_ratios", axis}};
    return r;
}

CheckReport check_local_time_schedule(const Schedule& schedule, std::int64_t max_horizon) {
    CheckReport r;
    r.name = "localtime_schedule";
    if (schedule.d != 2) throw std::invalid_argument("local-time check needs a 2d schedule");
    bool any = false;
    for (int k = 1; k <= schedule.stages(); ++k) {
        const std::int64_t N = schedule.length(k);
        const std::int64_t h = schedule.half_widths[static_cast<std::size_t>(k - 1)];
        if (N > max_horizon) {
            r.rows.push_back({{"stage", k}, {"N_k", N}, {"status", to_string(CheckStatus::Insufficient)}});
            continue;
        }
        any = true;
        const double ratio = expected_local_time({h, h}, N) / expected_local_time({0, 0}, N);
        r.rows.push_back({{"stage", k}, {"N_k", N}, {"start", {h, h}}, {"ratio", ratio}});
        if (!(ratio > 0.0)) r.fail("ratio not positive at stage " + std::to_string(k));
    }
    if (!any) r.status = CheckStatus::Insufficient;
    return r;
}

CheckReport check_dominance(const std::vector<std::int64_t>& ns, const std::vector<std::int64_t>& ms,
                            double tolerance) {
    CheckReport r;
    r.name = "dominance";
    const char* names[] = {"always_step", "lazy_max", "lazy_then_sprint", "windowed_1d"};
    std::int64_t evaluated = 0;
    double worst_gap = -1.0;
    for (std::int64_t n : ns) {
        double previous = -1.0;
        for (std::int64_t m : ms) {
            const Problem p{1, n, m};
            const double opt = optimal_value<double>(p).value;
            if (opt + 1e-12 < previous) r.fail("optimal value decreases in m at n=" + std::to_string(n));
            previous = opt;
            for (const char* name : names) {
                StrategySpec spec;
                spec.name = name;
                nlohmann::json row = {{"n", n}, {"m", m}, {"strategy", name}, {"optimal", opt}};
                try {
                    const StrategyPtr s = make_strategy(spec, p);
                    const double v = evaluate_strategy_exact(*s, p).probability;
                    ++evaluated;
                    row["value"] = v;
                    worst_gap = std::max(worst_gap, v - opt);
                    if (v > opt + tolerance) {
                        r.fail(std::string(name) + " n=" + std::to_string(n) + " m=" + std::to_string(m) + ": " +
                               fmt(v) + " > optimum " + fmt(opt));
                    }
                } catch (const ScheduleError& e) {
                    row["skipped"] = e.what();
                }
                r.rows.push_back(row);
            }
        }
    }
    r.summary = {{"evaluated", evaluated}, {"max_excess", worst_gap}, {"tolerance", tolerance}};
    return r;
}

ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& p) {
    if (x.size() != p.size()) throw std::invalid_argument("fit_scaling: size mismatch");
    if (x.size() < 4) throw std::invalid_argument("fit_scaling: needs at least 4 points");
    std::vector<double> lx;
    std::vector<double> lp;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(p[k] > 0.0)) throw std::invalid_argument("fit_scaling: values must be positive");
        lx.push_back(std::log(x[k]));
        lp.push_back(std::log(p[k]));
    }
    const auto [mn, mx] = std::minmax_element(lx.begin(), lx.end());
    if (*mx - *mn < std::log(10.0) - 1e-12) throw std::invalid_argument("fit_scaling: grid spans less than a decade");

    const double nn = static_cast<double>(lx.size());
    double sx = 0, sy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sx += lx[k];
        sy += lp[k];
    }
    const double mxv = sx / nn;
    const double myv = sy / nn;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mxv) * (lx[k] - mxv);
        sxy += (lx[k] - mxv) * (lp[k] - myv);
    }
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = myv - fit.slope * mxv;
    double sse = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double res = lp[k] - (fit.intercept + fit.slope * lx[k]);
        fit.residuals.push_back(res);
        sse += res * res;
    }
    fit.slope_se = std::sqrt(sse / (nn - 2.0) / sxx);
    return fit;
}

double ssrw_return_2d(std::int64_t n) {
    if (n < 0 || n % 2 != 0) return 0.0;
    const double q = ssrw_pmf_1d(n, 0);
    return q * q;
}

}  // namespace crw
