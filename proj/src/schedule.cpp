#include "crw/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace crw {

namespace {

// floor(v) for a value that is mathematically an integer up to rounding noise
std::int64_t stable_floor(double v) {
    const double r = std::nearbyint(v);
    if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(v));
}

std::int64_t floor_pow(double base, double exponent) {
    return stable_floor(std::pow(base, exponent));
}

struct SmallRational {
    bool ok = false;
    std::int64_t num = 0;
    std::int64_t den = 1;
};

SmallRational as_small_rational(double lambda) {
    for (std::int64_t q = 1; q <= 64; ++q) {
        const double scaled = lambda * static_cast<double>(q);
        const double r = std::nearbyint(scaled);
        if (r > 0 && std::abs(scaled - r) < 1e-12 * std::max(1.0, scaled)) {
            return {true, static_cast<std::int64_t>(r), q};
        }
    }
    return {};
}

// m^{1 + k lambda} <= n
bool fits(std::int64_t n, std::int64_t m, double lambda, const SmallRational& rat, std::int64_t k) {
    if (rat.ok) {
        using boost::multiprecision::cpp_int;
        const auto lhs_exp = static_cast<unsigned>(rat.den + k * rat.num);
        const cpp_int lhs = boost::multiprecision::pow(cpp_int(m), lhs_exp);
        const cpp_int rhs = boost::multiprecision::pow(cpp_int(n), static_cast<unsigned>(rat.den));
        return lhs <= rhs;
    }
    const double lhs = (1.0 + static_cast<double>(k) * lambda) * std::log(static_cast<double>(m));
    const double rhs = std::log(static_cast<double>(n));
    return lhs <= rhs + 1e-12 * std::abs(rhs);
}

void check_times(const Schedule& s) {
    for (std::size_t k = 1; k < s.times.size(); ++k) {
        if (s.times[k] <= s.times[k - 1]) {
            std::ostringstream msg;
            msg << "window times not strictly increasing after rounding (t_" << k - 1 << " = "
                << s.times[k - 1] << ", t_" << k << " = " << s.times[k]
                << "); n and m are outside the usable regime";
            throw ScheduleError(msg.str());
        }
    }
}

std::vector<std::int64_t> window_times(std::int64_t n, std::int64_t m, double lambda, int windows) {
    std::vector<std::int64_t> t(static_cast<std::size_t>(windows) + 2, 0);
    for (int k = 2; k <= windows; ++k) {
        t[k] = n - floor_pow(static_cast<double>(m), 1.0 + lambda * (windows - k));
    }
    t[1] = t[2] / 2;
    t[windows + 1] = n;
    return t;
}

}  // namespace

bool Schedule::inside(int k, std::int64_t x, std::int64_t y) const {
    const std::int64_t h = half_widths.at(k);
    const std::int64_t ax = x < 0 ? -x : x;
    const std::int64_t ay = y < 0 ? -y : y;
    return ax <= h && ay <= h;
}

int stage_count(std::int64_t n, std::int64_t m, double lambda) {
    if (n < 1 || m < 2 || !(lambda > 0.0)) {
        throw std::invalid_argument("stage_count requires n >= 1, m >= 2, lambda > 0");
    }
    if (m > n) return 0;
    const SmallRational rat = as_small_rational(lambda);
    const double est = (std::log(static_cast<double>(n)) / std::log(static_cast<double>(m)) - 1.0) / lambda;
    std::int64_t k = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(est)));
    while (k > 0 && !fits(n, m, lambda, rat, k)) --k;
    while (fits(n, m, lambda, rat, k + 1)) ++k;
    return static_cast<int>(k);
}

Schedule build_schedule_1d(const ScheduleParams1D& p) {
    if (!(p.eta > 0.0 && p.eta < 1.0)) throw ScheduleError("eta must lie in (0, 1)");
    if (p.m < 2) throw ScheduleError("windowed schedule needs m >= 2");
    if (p.m >= p.n) throw ScheduleError("windowed schedule needs m < n (no room for windows)");

    Schedule s;
    s.d = 1;
    s.n = p.n;
    s.m = p.m;
    s.eta = p.eta;
    s.stage_count = stage_count(p.n, p.m, p.eta);
    s.windows = std::max(s.stage_count, 2);
    s.times = window_times(p.n, p.m, p.eta, s.windows);
    check_times(s);

    const double log_m = std::log(static_cast<double>(p.m));
    s.eps_m = log_m / std::pow(static_cast<double>(p.m), 1.0 - p.eta);
    s.half_widths.assign(s.times.size(), 0);
    for (int k = 1; k <= s.windows; ++k) {
        s.half_widths[k] = stable_floor(std::sqrt(s.eps_m * static_cast<double>(s.length(k + 1))));
    }
    return s;
}

Schedule build_schedule_2d(const ScheduleParams2D& p) {
    const double eps = p.epsilon;
    if (!(eps > 0.0 && eps < 1.0)) throw ScheduleError("epsilon must lie in (0, 1)");
    if (!(p.theta > (1.0 - eps) / 2.0 && p.theta < 0.5)) {
        throw ScheduleError("theta must lie in ((1-epsilon)/2, 1/2)");
    }
    if (!(p.kappa > 0.0 && p.kappa < 1.0)) throw ScheduleError("kappa must lie in (0, 1)");
    const double q = (1.0 - 2.0 * p.theta) / (1.0 - 2.0 * p.kappa * p.theta);
    if (!(q > 0.0 && q < eps)) {
        throw ScheduleError("(1-2 theta)/(1-2 kappa theta) must lie in (0, epsilon)");
    }
    if (p.m < 2) throw ScheduleError("windowed schedule needs m >= 2");
    if (p.m >= p.n) throw ScheduleError("windowed schedule needs m < n (no room for windows)");

    Schedule s;
    s.d = 2;
    s.n = p.n;
    s.m = p.m;
    s.epsilon = eps;
    s.theta = p.theta;
    s.kappa = p.kappa;
    s.stage_count = stage_count(p.n, p.m, p.kappa);
    if (s.stage_count > p.stage_cap) {
        std::ostringstream msg;
        msg << "stage count " << s.stage_count << " exceeds the configured cap " << p.stage_cap;
        throw ScheduleError(msg.str());
    }
    s.windows = std::max(s.stage_count, 2);
    s.times = window_times(p.n, p.m, p.kappa, s.windows);
    check_times(s);

    s.half_widths.assign(s.times.size(), 0);
    for (int k = 1; k <= s.windows; ++k) {
        s.half_widths[k] = floor_pow(static_cast<double>(s.length(k + 1)), p.theta);
    }
    return s;
}

ThetaKappa choose_theta_kappa(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    double theta = (2.0 - epsilon) / 4.0;
    auto kappa_sup = [epsilon](double th) { return (1.0 - (1.0 - 2.0 * th) / epsilon) / (2.0 * th); };
    double ks = kappa_sup(theta);
    for (int it = 0; it < 60 && !(ks > 0.0); ++it) {
        theta = (theta + 0.5) / 2.0;
        ks = kappa_sup(theta);
    }
    const double kappa = std::min(ks, 1.0) / 2.0;
    const double q = (1.0 - 2.0 * theta) / (1.0 - 2.0 * kappa * theta);
    if (!(theta < 0.5 && theta > (1.0 - epsilon) / 2.0 && q > 0.0 && q < epsilon && kappa > 0.0)) {
        throw std::logic_error("theta/kappa selection violated its constraints");
    }
    return {theta, kappa};
}

RegimeReport validate_regime(const ScheduleParams1D& p) {
    RegimeReport r;
    const double m = static_cast<double>(p.m);
    const double n = static_cast<double>(p.n);
    r.u_n = stage_count(p.n, p.m, p.eta);
    r.eps_m = std::log(m) / std::pow(m, 1.0 - p.eta);
    r.eps_u2 = r.eps_m * r.u_n * r.u_n;
    r.u_over_root = r.u_n / std::sqrt(std::pow(m, 1.0 - p.eta) / std::log(m));
    const double log_n = std::log(n);
    r.hypothesis_ratio = std::pow(m, 1.0 - p.eta) * std::log(m) / (log_n * log_n);
    r.flagged = r.eps_u2 > 0.1;
    r.weak_hypothesis = r.hypothesis_ratio < 10.0;
    if (r.flagged) r.notes.emplace_back("eps_m * u_n^2 > 0.1: regime not yet asymptotic");
    if (r.weak_hypothesis) {
        r.notes.emplace_back("m^{1-eta} log m / (log n)^2 < 10: growth hypothesis only weakly satisfied");
    }
    if (r.u_n < 2) r.notes.emplace_back("u_n < 2: schedule uses the minimal two windows");
    return r;
}

}  // namespace crw
