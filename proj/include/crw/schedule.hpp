#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace crw {

class ScheduleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScheduleParams1D {
    std::int64_t n = 0;
    std::int64_t m = 0;
    double eta = 0.5;
};

struct ScheduleParams2D {
    std::int64_t n = 0;
    std::int64_t m = 0;
    double epsilon = 0.5;
    double theta = 0.0;
    double kappa = 0.0;
    /// Largest stage count accepted; stands in for "u_n stays bounded".
    int stage_cap = 16;
};

/// Space-time windows {t_k} x (I_k or Q_k) threaded by the staged strategies.
///
/// times has windows+2 entries t_0 = 0 < t_1 < ... < t_{windows+1} = n and
/// half_widths the matching window half-widths, with half_widths[0] and
/// half_widths.back() equal to 0 (the singleton {0}). In d=2 a half-width h
/// describes the square [-h, h]^2.
struct Schedule {
    int d = 1;
    std::int64_t n = 0;
    std::int64_t m = 0;
    int stage_count = 0;  ///< u_n as defined by stage_count()
    int windows = 0;      ///< number of intermediate windows, max(u_n, 2)
    std::vector<std::int64_t> times;
    std::vector<std::int64_t> half_widths;

    double eta = 0.0;      // d=1
    double eps_m = 0.0;    // d=1
    double epsilon = 0.0;  // d=2
    double theta = 0.0;    // d=2
    double kappa = 0.0;    // d=2

    int stages() const { return windows + 1; }
    std::int64_t length(int k) const { return times.at(k) - times.at(k - 1); }
    /// Membership of w = (x, y) in window k (interval in d=1, square in d=2).
    bool inside(int k, std::int64_t x, std::int64_t y) const;
};

/// Largest k >= 0 with m^{1+k lambda} <= n; 0 when m > n.
int stage_count(std::int64_t n, std::int64_t m, double lambda);

Schedule build_schedule_1d(const ScheduleParams1D& params);
Schedule build_schedule_2d(const ScheduleParams2D& params);

struct ThetaKappa {
    double theta;
    double kappa;
};

/// theta at the midpoint of ((1-eps)/2, 1/2), kappa half of the supremum that
/// keeps (1-2 theta)/(1-2 kappa theta) < eps.
ThetaKappa choose_theta_kappa(double epsilon);

struct RegimeReport {
    int u_n = 0;
    double eps_m = 0.0;
    double eps_u2 = 0.0;          ///< eps_m * u_n^2, must be small
    double u_over_root = 0.0;     ///< u_n / (m^{1-eta} / log m)^{1/2}
    double hypothesis_ratio = 0.0;  ///< m^{1-eta} log m / (log n)^2
    bool flagged = false;         ///< eps_u2 > 0.1
    bool weak_hypothesis = false;  ///< hypothesis_ratio < 10
    std::vector<std::string> notes;
};

RegimeReport validate_regime(const ScheduleParams1D& params);

}  // namespace crw
