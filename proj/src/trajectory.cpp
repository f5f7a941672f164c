#include "crw/trajectory.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace crw {

WindowTracker::WindowTracker(const Schedule& schedule)
    : times_(schedule.times), obs_(schedule.times.size()) {}

void WindowTracker::reset() {
    std::fill(obs_.begin(), obs_.end(), StageObservation{});
    next_ = 1;
    hit_ = false;
    active_ = true;
}

void WindowTracker::on_arrival(const WalkState& s, bool strategy_failed) {
    if (s.w.is_origin()) hit_ = true;
    if (next_ < times_.size() && s.i == times_[next_]) {
        obs_[next_] = {s.w, hit_, active_};
        hit_ = false;
        active_ = !strategy_failed;
        ++next_;
    }
}

namespace {

void check_problem(const Strategy& strategy, const Problem& problem) {
    problem.validate();
    if (!(strategy.problem() == problem)) {
        throw std::invalid_argument("strategy was built for a different problem");
    }
}

[[noreturn]] void stand_violation(const WalkState& s, std::int64_t at, const Strategy& strategy,
                                  const Problem& problem) {
    std::ostringstream msg;
    msg << "strategy '" << strategy.name() << "' stands at time " << at << " with J=" << s.j + (at - s.i)
        << " but m=" << problem.m << " allows at most m-1 consecutive stands";
    throw AdmissibilityError(at, msg.str());
}

template <bool Record>
SimResult run_planned(const Strategy& strategy, const Problem& problem, RandomSource& rng,
                      Trajectory* rec, WindowTracker* tracker) {
    WalkState s{};
    PhaseId phase = strategy.initial_phase();
    const std::int64_t n = problem.n;
    const double m = static_cast<double>(problem.m);
    const int d = problem.d;
    if constexpr (Record) {
        rec->positions.assign(1, s.w);
        rec->decisions.clear();
        rec->positions.reserve(static_cast<std::size_t>(n) + 1);
        rec->decisions.reserve(static_cast<std::size_t>(n));
    }
    if (tracker) tracker->reset();

    while (s.i < n) {
        const Run run = strategy.plan(s, phase);
        std::int64_t len = std::min(run.length, n - s.i);
        if (tracker) len = std::min(len, tracker->next_checkpoint() - s.i);
        if (len < 1) throw std::logic_error("strategy '" + strategy.name() + "' planned an empty run");
        const WalkState from = s;

        switch (run.decision) {
            case Decision::Stand: {
                const std::int64_t budget = stand_budget(s.j, problem.m);
                if (budget < len) stand_violation(s, s.i + budget, strategy, problem);
                s.i += len;
                s.j += len;
                if constexpr (Record) {
                    rec->positions.insert(rec->positions.end(), static_cast<std::size_t>(len), s.w);
                    rec->decisions.insert(rec->decisions.end(), static_cast<std::size_t>(len), Decision::Stand);
                }
                break;
            }
            case Decision::Step: {
                s.j = 0;
                const bool stop = run.stop_at_origin || tracker != nullptr;
                if (!Record && !stop && d == 1) {
                    s.w.x += rng.sign_sum(len);
                    s.i += len;
                    break;
                }
                for (std::int64_t k = 0; k < len; ++k) {
                    s.w = s.w + unit_move(d, rng);
                    ++s.i;
                    if constexpr (Record) {
                        rec->positions.push_back(s.w);
                        rec->decisions.push_back(Decision::Step);
                    }
                    if (stop && s.w.is_origin()) break;
                }
                break;
            }
            case Decision::DelayedStep: {
                s.j = 0;
                for (std::int64_t k = 0; k < len; ++k) {
                    ++s.i;
                    const bool moves = rng.uniform01() * m < 1.0;
                    if (moves) s.w = s.w + unit_move(d, rng);
                    if constexpr (Record) {
                        rec->positions.push_back(s.w);
                        rec->decisions.push_back(Decision::DelayedStep);
                    }
                    if (moves) break;
                }
                break;
            }
        }
        phase = strategy.transition(phase, from, run.decision, s);
        if (tracker) tracker->on_arrival(s, strategy.failed(phase));
    }
    return {s, phase, s.w.is_origin()};
}

}  // namespace

SimResult simulate(const Strategy& strategy, const Problem& problem, RandomSource& rng,
                   SimOptions options) {
    check_problem(strategy, problem);
    if (options.record) return run_planned<true>(strategy, problem, rng, options.record, options.windows);
    return run_planned<false>(strategy, problem, rng, nullptr, options.windows);
}

SimResult simulate_stepwise(const Strategy& strategy, const Problem& problem, RandomSource& rng,
                            Trajectory* record) {
    check_problem(strategy, problem);
    WalkState s = initial_state(problem);
    PhaseId phase = strategy.initial_phase();
    if (record) {
        record->positions.assign(1, s.w);
        record->decisions.clear();
    }
    while (s.i < problem.n) {
        const Decision dec = strategy.decide(s, phase);
        const WalkState next = advance(s, dec, rng, problem);
        phase = strategy.transition(phase, s, dec, next);
        s = next;
        if (record) {
            record->positions.push_back(s.w);
            record->decisions.push_back(dec);
        }
    }
    return {s, phase, s.w.is_origin()};
}

std::pair<Trajectory, bool> run_trajectory(const Strategy& strategy, const Problem& problem,
                                           std::uint64_t seed) {
    RandomSource rng(seed);
    Trajectory t;
    const SimResult r = simulate(strategy, problem, rng, {&t, nullptr});
    return {std::move(t), r.success};
}

}  // namespace crw
