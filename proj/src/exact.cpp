#include "crw/exact.hpp"

#include <cmath>
#include <numbers>

namespace crw {

std::string value_table_csv(const ValueTable<double>& table) {
    const Problem& p = table.problem;
    if (table.slices.empty() || table.policy.empty()) {
        throw std::invalid_argument("value table was computed without keep_values/keep_policy");
    }
    std::ostringstream out;
    out.precision(17);
    out << (p.d == 1 ? "i,x,j,V,policy\n" : "i,x,y,j,V,policy\n");
    for (std::int64_t i = 0; i < p.n; ++i) {
        const ValueSlice<double>& s = table.slices[static_cast<std::size_t>(i)];
        const std::int64_t ylo = p.d == 1 ? 0 : -s.radius;
        const std::int64_t yhi = p.d == 1 ? 0 : s.radius;
        for (std::int64_t j = 0; j <= std::min(s.jmax, p.m - 1); ++j) {
            for (std::int64_t y = ylo; y <= yhi; ++y) {
                for (std::int64_t x = -s.radius; x <= s.radius; ++x) {
                    out << i << ',' << x << ',';
                    if (p.d == 2) out << y << ',';
                    out << j << ',' << s.get(x, y, j) << ',' << to_string(table.policy_at(i, x, y, j)) << '\n';
                }
            }
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------

void Band::add(std::int64_t x, std::int64_t y, double v, const Band& hint) {
    if (empty()) {
        x0 = std::min(hint.x0, x);
        x1 = std::max(hint.x1, x);
        y0 = std::min(hint.y0, y);
        y1 = std::max(hint.y1, y);
        mass.assign(static_cast<std::size_t>(width() * (y1 - y0 + 1)), 0.0);
    } else if (!contains(x, y)) {
        Band grown;
        grown.x0 = std::min({x0, hint.x0, x});
        grown.x1 = std::max({x1, hint.x1, x});
        grown.y0 = std::min({y0, hint.y0, y});
        grown.y1 = std::max({y1, hint.y1, y});
        grown.mass.assign(static_cast<std::size_t>(grown.width() * (grown.y1 - grown.y0 + 1)), 0.0);
        for (std::int64_t yy = y0; yy <= y1; ++yy) {
            for (std::int64_t xx = x0; xx <= x1; ++xx) grown.at(xx, yy) = at(xx, yy);
        }
        *this = std::move(grown);
    }
    at(x, y) += v;
}

double StateDistribution::total_mass() const {
    double total = dead_mass;
    for (const Slot& s : slots) {
        for (double v : s.band.mass) total += v;
    }
    return total;
}

double StateDistribution::mass_at_origin() const {
    double total = 0.0;
    for (const Slot& s : slots) {
        if (!s.band.empty() && s.band.contains(0, 0)) total += s.band.at(0, 0);
    }
    return total;
}

ExactEvaluation evaluate_strategy_exact(const Strategy& strategy, const Problem& p, const EvalOptions& opt) {
    p.validate();
    if (!(strategy.problem() == p)) throw std::invalid_argument("strategy was built for a different problem");
    if (strategy.signature() == Signature::FullHistory) {
        throw std::invalid_argument("strategy '" + strategy.name() +
                                    "' depends on the full history; exact evaluation needs a Markov "
                                    "signature, use Monte Carlo instead");
    }
    {
        // Worst case: every (phase, j) slot holds the full reachable box.
        const double w = 2.0 * static_cast<double>(p.n) + 1.0;
        const double box = p.d == 1 ? w : w * w;
        const double bytes = box * 8.0 * 2.0 * std::min<double>(strategy.phase_count() * (p.m + 1.0), 64.0);
        const double ops = box * static_cast<double>(p.n) * 0.5;
        if (bytes > opt.budget.max_bytes || (p.d == 2 && ops > opt.budget.max_operations)) {
            std::ostringstream msg;
            msg << "exact evaluation over d=" << p.d << ", n=" << p.n << " may need about " << ops
                << " cell updates and " << bytes / 1e6 << " MB";
            throw BudgetExceeded(msg.str(), ops, bytes);
        }
    }

    const std::int64_t jstride = p.m + 1;
    const std::size_t key_count = static_cast<std::size_t>(strategy.phase_count()) * static_cast<std::size_t>(jstride);
    std::vector<int> slot_of(key_count, -1);

    StateDistribution cur;
    {
        Band b;
        b.add(0, 0, 1.0, b);
        cur.slots.push_back({strategy.initial_phase(), 0, std::move(b)});
    }

    const int moves = 2 * p.d;
    const Point unit[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    const double step_share = 1.0 / moves;
    const double move_prob = 1.0 / static_cast<double>(p.m);

    for (std::int64_t i = 0; i < p.n; ++i) {
        StateDistribution next;
        next.time = i + 1;
        next.dead_mass = cur.dead_mass;
        const std::int64_t remaining = p.n - (i + 1);

        for (const auto& src : cur.slots) {
            if (src.band.empty()) continue;
            Band hint;
            hint.x0 = src.band.x0 - 1;
            hint.x1 = src.band.x1 + 1;
            hint.y0 = p.d == 2 ? src.band.y0 - 1 : 0;
            hint.y1 = p.d == 2 ? src.band.y1 + 1 : 0;

            auto emit = [&](PhaseId phase, std::int64_t j, Point w, double v) {
                if (v == 0.0) return;
                if (opt.prune_unreachable && l1_norm(w) > remaining) {
                    next.dead_mass += v;
                    return;
                }
                const std::size_t key = static_cast<std::size_t>(phase) * static_cast<std::size_t>(jstride) +
                                        static_cast<std::size_t>(j);
                int& idx = slot_of[key];
                if (idx < 0) {
                    idx = static_cast<int>(next.slots.size());
                    next.slots.push_back({phase, j, Band{}});
                }
                next.slots[static_cast<std::size_t>(idx)].band.add(w.x, w.y, v, hint);
            };

            for (std::int64_t y = src.band.y0; y <= src.band.y1; ++y) {
                for (std::int64_t x = src.band.x0; x <= src.band.x1; ++x) {
                    const double mass = src.band.at(x, y);
                    if (mass == 0.0) continue;
                    const WalkState s{i, {x, y}, src.j};
                    const Decision dec = strategy.decide(s, src.phase);
                    if (!is_admissible(s, dec, p)) {
                        std::ostringstream msg;
                        msg << "strategy '" << strategy.name() << "' chose '" << to_string(dec)
                            << "' at time " << i << " with J=" << src.j << " (m=" << p.m << ")";
                        throw AdmissibilityError(i, msg.str());
                    }
                    switch (dec) {
                        case Decision::Stand: {
                            const WalkState to{i + 1, s.w, s.j + 1};
                            emit(strategy.transition(src.phase, s, dec, to), to.j, to.w, mass);
                            break;
                        }
                        case Decision::Step:
                            for (int k = 0; k < moves; ++k) {
                                const WalkState to{i + 1, s.w + unit[k], 0};
                                emit(strategy.transition(src.phase, s, dec, to), 0, to.w, mass * step_share);
                            }
                            break;
                        case Decision::DelayedStep: {
                            const WalkState stay{i + 1, s.w, 0};
                            emit(strategy.transition(src.phase, s, dec, stay), 0, stay.w, mass * (1.0 - move_prob));
                            for (int k = 0; k < moves; ++k) {
                                const WalkState to{i + 1, s.w + unit[k], 0};
                                emit(strategy.transition(src.phase, s, dec, to), 0, to.w,
                                     mass * move_prob * step_share);
                            }
                            break;
                        }
                    }
                }
            }
        }
        for (const auto& slot : next.slots) {
            slot_of[static_cast<std::size_t>(slot.phase) * static_cast<std::size_t>(jstride) +
                    static_cast<std::size_t>(slot.j)] = -1;
        }
        cur = std::move(next);
    }

    ExactEvaluation out;
    out.probability = cur.mass_at_origin();
    out.final_distribution = std::move(cur);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// row[t] = P(tau_0 > t) from x >= 1, t = 0 .. lmax.
std::vector<double> hitting_tail_row(std::int64_t x, std::int64_t lmax) {
    // mass[k] = P(Y_t = k, tau_0 > t), k = 1 .. x + lmax
    std::vector<double> mass(static_cast<std::size_t>(x + lmax + 2), 0.0);
    std::vector<double> nxt(mass.size(), 0.0);
    mass[static_cast<std::size_t>(x)] = 1.0;
    std::vector<double> row(static_cast<std::size_t>(lmax) + 1, 0.0);
    row[0] = 1.0;
    std::int64_t lo = x, hi = x;
    for (std::int64_t t = 1; t <= lmax; ++t) {
        std::fill(nxt.begin() + std::max<std::int64_t>(lo - 1, 0), nxt.begin() + hi + 2, 0.0);
        for (std::int64_t k = lo; k <= hi; ++k) {
            const double half = 0.5 * mass[static_cast<std::size_t>(k)];
            if (k - 1 >= 1) nxt[static_cast<std::size_t>(k - 1)] += half;
            nxt[static_cast<std::size_t>(k + 1)] += half;
        }
        lo = std::max<std::int64_t>(lo - 1, 1);
        hi = hi + 1;
        std::swap(mass, nxt);
        double survive = 0.0;
        for (std::int64_t k = lo; k <= hi; ++k) survive += mass[static_cast<std::size_t>(k)];
        row[static_cast<std::size_t>(t)] = survive;
    }
    return row;
}

}  // namespace

std::vector<std::vector<double>> hitting_tail_table_1d(std::int64_t xmax, std::int64_t lmax) {
    std::vector<std::vector<double>> table(static_cast<std::size_t>(xmax) + 1);
    for (std::int64_t x = 1; x <= xmax; ++x) table[static_cast<std::size_t>(x)] = hitting_tail_row(x, lmax);
    return table;
}

double hitting_tail_1d(std::int64_t x, std::int64_t l) {
    if (x == 0) throw std::invalid_argument("hitting_tail_1d needs a nonzero start");
    if (l < 0) throw std::invalid_argument("hitting_tail_1d needs l >= 0");
    const std::int64_t ax = x < 0 ? -x : x;
    if (l < ax) return 1.0;
    return hitting_tail_row(ax, l)[static_cast<std::size_t>(l)];
}

std::vector<double> ssrw_law_1d(std::int64_t l) {
    std::vector<double> law(static_cast<std::size_t>(2 * l + 1), 0.0);
    std::vector<double> nxt(law.size(), 0.0);
    law[static_cast<std::size_t>(l)] = 1.0;
    for (std::int64_t t = 1; t <= l; ++t) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (std::int64_t k = l - t + 1; k <= l + t - 1; ++k) {
            const double half = 0.5 * law[static_cast<std::size_t>(k)];
            if (half == 0.0) continue;
            nxt[static_cast<std::size_t>(k - 1)] += half;
            nxt[static_cast<std::size_t>(k + 1)] += half;
        }
        std::swap(law, nxt);
    }
    return law;
}

double ssrw_pmf_1d(std::int64_t l, std::int64_t k) {
    if (k < -l || k > l || ((l + k) & 1)) return 0.0;
    const double up = static_cast<double>((l + k) / 2);
    const double ld = static_cast<double>(l);
    return std::exp(std::lgamma(ld + 1.0) - std::lgamma(up + 1.0) - std::lgamma(ld - up + 1.0) -
                    ld * std::numbers::ln2);
}

double reflection_tail_1d(std::int64_t x, std::int64_t l) {
    const std::int64_t ax = x < 0 ? -x : x;
    double total = 0.0;
    if (l <= 4096) {
        const std::vector<double> law = ssrw_law_1d(l);
        for (std::int64_t y = -ax + 1; y <= ax - 1; ++y) {
            if (y >= -l && y <= l) total += law[static_cast<std::size_t>(y + l)];
        }
        return total;
    }
    for (std::int64_t y = -ax + 1; y <= ax - 1; ++y) total += ssrw_pmf_1d(l, y);
    return total;
}

double hitting_tail_closed_form(std::int64_t x, std::int64_t l) {
    if (x == 0) throw std::invalid_argument("hitting_tail_closed_form needs a nonzero start");
    const std::int64_t ax = x < 0 ? -x : x;
    if (l < ax) return 1.0;
    const std::int64_t lq = reflection_applicable(ax, l) ? l : l + 1;
    double total = 0.0;
    for (std::int64_t y = -ax + 1; y <= ax - 1; ++y) total += ssrw_pmf_1d(lq, y);
    return total;
}

namespace {

// P(Y_i = z) for i = 0..N along one coordinate, by the ratio recurrence in steps of 2.
std::vector<double> one_coordinate_returns(std::int64_t z, std::int64_t horizon) {
    std::vector<double> out(static_cast<std::size_t>(horizon) + 1, 0.0);
    const std::int64_t az = z < 0 ? -z : z;
    if (az > horizon) return out;
    double p = std::exp(-static_cast<double>(az) * std::numbers::ln2);
    out[static_cast<std::size_t>(az)] = p;
    for (std::int64_t i = az; i + 2 <= horizon; i += 2) {
        const double up = static_cast<double>((i + az) / 2);
        const double down = static_cast<double>((i - az) / 2);
        p *= static_cast<double>(i + 1) * static_cast<double>(i + 2) / ((up + 1.0) * (down + 1.0) * 4.0);
        out[static_cast<std::size_t>(i + 2)] = p;
    }
    return out;
}

}  // namespace

std::vector<double> return_probabilities_2d(Point x, std::int64_t horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    if (horizon > (std::int64_t{1} << 24)) {
        throw BudgetExceeded("return_probabilities_2d horizon above 2^24", static_cast<double>(horizon), 0.0);
    }
    // Rotating by 45 degrees turns 2d SSRW into two independent 1d SSRWs.
    const std::vector<double> a = one_coordinate_returns(x.x + x.y, horizon);
    const std::vector<double> b = one_coordinate_returns(x.x - x.y, horizon);
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = a[i] * b[i];
    return p;
}

double expected_local_time(Point x, std::int64_t horizon) {
    const std::vector<double> p = return_probabilities_2d(x, horizon);
    double total = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) total += p[i];
    return total;
}

}  // namespace crw
