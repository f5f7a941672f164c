#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <string>
#include <vector>

#include "crw/core_walk.hpp"
#include "crw/strategies.hpp"

namespace crw {

struct Budget {
    double max_operations = 4e9;
    double max_bytes = 2e9;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, double operations, double bytes)
        : std::runtime_error(what), operations_(operations), bytes_(bytes) {}
    double operations() const { return operations_; }
    double bytes() const { return bytes_; }

private:
    double operations_;
    double bytes_;
};

// ---------------------------------------------------------------------------
// Optimal control by backward induction
// ---------------------------------------------------------------------------

/// V_i(x, j) over the band |x|_inf <= min(i, n-i), 0 <= j <= min(i, m).
/// Positions outside the band are either unreachable from the origin by time
/// i or cannot return to 0 by time n, so their value is 0.
template <class Scalar>
struct ValueSlice {
    int d = 1;
    std::int64_t radius = 0;
    std::int64_t jmax = 0;
    std::vector<Scalar> values;

    std::int64_t width() const { return 2 * radius + 1; }
    std::int64_t plane() const { return d == 1 ? width() : width() * width(); }

    bool contains(std::int64_t x, std::int64_t y, std::int64_t j) const {
        return j >= 0 && j <= jmax && x >= -radius && x <= radius && y >= -radius && y <= radius &&
               (d == 2 || y == 0);
    }
    std::size_t index(std::int64_t x, std::int64_t y, std::int64_t j) const {
        const std::int64_t row = d == 1 ? 0 : (y + radius) * width();
        return static_cast<std::size_t>(j * plane() + row + x + radius);
    }
    Scalar get(std::int64_t x, std::int64_t y, std::int64_t j) const {
        return contains(x, y, j) ? values[index(x, y, j)] : Scalar(0);
    }
};

/// Policy stored run-length encoded along x for each (i, j, y).
struct PolicyRun {
    std::int64_t i;
    std::int64_t j;
    std::int64_t y;
    std::int64_t x_begin;
    std::int64_t x_end;  // inclusive
    Decision decision;
};

template <class Scalar>
struct ValueTable {
    Problem problem;
    Scalar value{};                           ///< V_0(0, 0)
    std::vector<ValueSlice<Scalar>> slices;   ///< i = 0..n, only with keep_values
    std::vector<PolicyRun> policy;            ///< only with keep_policy

    /// Optimal decision at (i, x, y, j); Step outside the stored band.
    Decision policy_at(std::int64_t i, std::int64_t x, std::int64_t y, std::int64_t j) const {
        auto it = std::lower_bound(policy.begin(), policy.end(), std::tuple{i, j, y, x},
                                   [](const PolicyRun& r, const auto& key) {
                                       const auto& [ki, kj, ky, kx] = key;
                                       return std::tuple{r.i, r.j, r.y, r.x_end} < std::tuple{ki, kj, ky, kx};
                                   });
        if (it != policy.end() && it->i == i && it->j == j && it->y == y && it->x_begin <= x && x <= it->x_end) {
            return it->decision;
        }
        return Decision::Step;
    }
};

struct DpOptions {
    bool keep_values = false;
    bool keep_policy = false;
    Budget budget{};
};

struct DpCost {
    double operations = 0.0;
    double bytes = 0.0;
};

inline DpCost estimate_dp_cost(const Problem& p, std::size_t scalar_bytes, const DpOptions& opt = {}) {
    DpCost c;
    double largest = 0.0;
    for (std::int64_t i = 0; i <= p.n; ++i) {
        const double w = 2.0 * static_cast<double>(std::min(i, p.n - i)) + 1.0;
        const double cells = (p.d == 1 ? w : w * w) * (static_cast<double>(std::min(i, p.m)) + 1.0);
        c.operations += cells;
        largest = std::max(largest, cells);
        if (opt.keep_values) c.bytes += cells * static_cast<double>(scalar_bytes);
        if (opt.keep_policy) c.bytes += cells / (p.d == 1 ? w : w) * 48.0;
    }
    c.bytes += 2.0 * largest * static_cast<double>(scalar_bytes);
    return c;
}

/// Optimal success probability sup P(W_n = 0) over admissible strategies,
/// by backward induction over (i, x, j). Ties prefer Stand.
template <class Scalar>
ValueTable<Scalar> optimal_value(const Problem& p, const DpOptions& opt = {}) {
    p.validate();
    const DpCost cost = estimate_dp_cost(p, sizeof(Scalar), opt);
    if (cost.operations > opt.budget.max_operations || cost.bytes > opt.budget.max_bytes) {
        std::ostringstream msg;
        msg << "dynamic program over d=" << p.d << ", n=" << p.n << ", m=" << p.m << " needs about "
            << cost.operations << " state updates and " << cost.bytes / 1e6 << " MB (limits "
            << opt.budget.max_operations << " updates, " << opt.budget.max_bytes / 1e6 << " MB)";
        throw BudgetExceeded(msg.str(), cost.operations, cost.bytes);
    }

    auto make_slice = [&p](std::int64_t i) {
        ValueSlice<Scalar> s;
        s.d = p.d;
        s.radius = std::min(i, p.n - i);
        s.jmax = std::min(i, p.m);
        s.values.assign(static_cast<std::size_t>(s.plane() * (s.jmax + 1)), Scalar(0));
        return s;
    };

    ValueTable<Scalar> table;
    table.problem = p;
    ValueSlice<Scalar> next = make_slice(p.n);
    for (std::int64_t j = 0; j <= next.jmax; ++j) next.values[next.index(0, 0, j)] = Scalar(1);
    if (opt.keep_values) table.slices.assign(static_cast<std::size_t>(p.n) + 1, ValueSlice<Scalar>{});
    if (opt.keep_values) table.slices[p.n] = next;

    const Scalar step_weight = Scalar(1) / Scalar(2 * p.d);
    std::vector<PolicyRun> runs;
    for (std::int64_t i = p.n - 1; i >= 0; --i) {
        ValueSlice<Scalar> cur = make_slice(i);
        const std::int64_t r = cur.radius;
        const std::int64_t ylo = p.d == 1 ? 0 : -r;
        const std::int64_t yhi = p.d == 1 ? 0 : r;
        for (std::int64_t j = 0; j <= cur.jmax; ++j) {
            const bool stand_ok = can_stand(j, p.m);
            for (std::int64_t y = ylo; y <= yhi; ++y) {
                for (std::int64_t x = -r; x <= r; ++x) {
                    Scalar step = next.get(x - 1, y, 0) + next.get(x + 1, y, 0);
                    if (p.d == 2) step += next.get(x, y - 1, 0) + next.get(x, y + 1, 0);
                    step *= step_weight;
                    Decision choice = Decision::Step;
                    Scalar best = step;
                    if (stand_ok) {
                        Scalar stand = next.get(x, y, j + 1);
                        if (!(stand < step)) {
                            best = stand;
                            choice = Decision::Stand;
                        }
                    }
                    cur.values[cur.index(x, y, j)] = best;
                    if (opt.keep_policy) {
                        if (!runs.empty() && runs.back().i == i && runs.back().j == j && runs.back().y == y &&
                            runs.back().decision == choice && runs.back().x_end == x - 1) {
                            runs.back().x_end = x;
                        } else {
                            runs.push_back({i, j, y, x, x, choice});
                        }
                    }
                }
            }
        }
        if (opt.keep_values) table.slices[i] = cur;
        next = std::move(cur);
    }
    table.value = next.get(0, 0, 0);
    if (opt.keep_policy) {
        std::sort(runs.begin(), runs.end(), [](const PolicyRun& a, const PolicyRun& b) {
            return std::tuple{a.i, a.j, a.y, a.x_begin} < std::tuple{b.i, b.j, b.y, b.x_begin};
        });
        table.policy = std::move(runs);
    }
    return table;
}

/// CSV rows i,x,[y,]j,V,policy over the stored band (needs keep_values and keep_policy).
std::string value_table_csv(const ValueTable<double>& table);

// ---------------------------------------------------------------------------
// Exact evaluation of a (phase-)Markov strategy by forward propagation
// ---------------------------------------------------------------------------

/// Dense box of probability masses over positions.
struct Band {
    std::int64_t x0 = 0, x1 = -1, y0 = 0, y1 = -1;
    std::vector<double> mass;

    bool empty() const { return x1 < x0; }
    std::int64_t width() const { return x1 - x0 + 1; }
    double& at(std::int64_t x, std::int64_t y) {
        return mass[static_cast<std::size_t>((y - y0) * width() + (x - x0))];
    }
    double at(std::int64_t x, std::int64_t y) const {
        return mass[static_cast<std::size_t>((y - y0) * width() + (x - x0))];
    }
    bool contains(std::int64_t x, std::int64_t y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
    /// Adds mass, growing the box to cover `hint` (which must contain (x, y)) if needed.
    void add(std::int64_t x, std::int64_t y, double v, const Band& hint);
};

/// Probability mass over (phase, j, position) at a fixed time. Mass dropped
/// because the origin is no longer reachable by time n is kept in dead_mass.
struct StateDistribution {
    struct Slot {
        PhaseId phase;
        std::int64_t j;
        Band band;
    };
    std::int64_t time = 0;
    std::vector<Slot> slots;
    double dead_mass = 0.0;

    double total_mass() const;
    double mass_at_origin() const;
};

struct ExactEvaluation {
    double probability = 0.0;
    StateDistribution final_distribution;
};

struct EvalOptions {
    bool prune_unreachable = true;
    Budget budget{};
};

/// P(W_n = 0) for a strategy with a Markov, time-Markov or phase-Markov
/// signature. Refuses full-history strategies.
ExactEvaluation evaluate_strategy_exact(const Strategy& strategy, const Problem& problem,
                                        const EvalOptions& options = {});

// ---------------------------------------------------------------------------
// SSRW functionals
// ---------------------------------------------------------------------------

/// P(tau_0 > l | Y_0 = x) for 1d SSRW, by propagation with an absorbing origin.
double hitting_tail_1d(std::int64_t x, std::int64_t l);

/// table[x][l] = P(tau_0 > l | Y_0 = x) for 1 <= x <= xmax, 0 <= l <= lmax.
std::vector<std::vector<double>> hitting_tail_table_1d(std::int64_t xmax, std::int64_t lmax);

/// law[k] = P(Y_l = k - l), k = 0..2l, by repeated convolution.
std::vector<double> ssrw_law_1d(std::int64_t l);

/// P(Y_l = k) via log-gamma; suitable for large l.
double ssrw_pmf_1d(std::int64_t l, std::int64_t k);

/// P(-|x| < Y_l < |x|).
double reflection_tail_1d(std::int64_t x, std::int64_t l);

/// The reflection identity holds when l and x have opposite parity.
inline bool reflection_applicable(std::int64_t x, std::int64_t l) { return ((l + x) & 1) != 0; }

/// P(tau_0 > l | x) from the reflection identity, shifting l by one when the
/// parities agree (tau_0 has the parity of x). Works for large l.
double hitting_tail_closed_form(std::int64_t x, std::int64_t l);

/// p[i] = P(Y^{(2)}_i = 0 | Y_0 = x) for i = 0..N (p[0] = [x == 0]).
std::vector<double> return_probabilities_2d(Point x, std::int64_t horizon);

/// Expected number of visits to 0 at times 1..N starting from x.
double expected_local_time(Point x, std::int64_t horizon);

}  // namespace crw
