#include "crw/strategies.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace crw {

const char* to_string(Signature s) {
    switch (s) {
        case Signature::Markov: return "(w,j)";
        case Signature::TimeMarkov: return "(w,j,i)";
        case Signature::PhaseMarkov: return "(w,j,i,phase)";
        case Signature::FullHistory: return "full-history";
    }
    return "?";
}

WindowPhase decode_window_phase(PhaseId phase) {
    return {phase / 3 + 1, static_cast<WindowMode>(phase % 3)};
}

PhaseId encode_window_phase(WindowPhase wp) {
    return 3 * (wp.stage - 1) + static_cast<int>(wp.mode);
}

namespace {

class AlwaysStep final : public Strategy {
public:
    explicit AlwaysStep(const Problem& p) : problem_(p) {}
    std::string name() const override { return "always_step"; }
    Signature signature() const override { return Signature::Markov; }
    const Problem& problem() const override { return problem_; }
    Decision decide(const WalkState&, PhaseId) const override { return Decision::Step; }
    Run plan(const WalkState& s, PhaseId) const override {
        return {Decision::Step, problem_.n - s.i, false};
    }

private:
    Problem problem_;
};

class LazyMax final : public Strategy {
public:
    explicit LazyMax(const Problem& p) : problem_(p) {}
    std::string name() const override { return "lazy_max"; }
    Signature signature() const override { return Signature::Markov; }
    const Problem& problem() const override { return problem_; }
    Decision decide(const WalkState& s, PhaseId) const override {
        return can_stand(s.j, problem_.m) ? Decision::Stand : Decision::Step;
    }
    Run plan(const WalkState& s, PhaseId) const override {
        if (!can_stand(s.j, problem_.m)) return {Decision::Step, 1, false};
        return {Decision::Stand, std::min(stand_budget(s.j, problem_.m), problem_.n - s.i), false};
    }

private:
    Problem problem_;
};

// Lazy until n-m, then step until the walk hits 0, then stand.
class LazyThenSprint final : public Strategy {
public:
    enum Phase : PhaseId { Lazy = 0, Sprint = 1, Hold = 2 };

    explicit LazyThenSprint(const Problem& p) : problem_(p), switch_time_(p.n - p.m) {}
    std::string name() const override { return "lazy_then_sprint"; }
    Signature signature() const override { return Signature::PhaseMarkov; }
    const Problem& problem() const override { return problem_; }
    int phase_count() const override { return 3; }
    PhaseId initial_phase() const override { return switch_time_ <= 0 ? Sprint : Lazy; }

    Decision decide(const WalkState& s, PhaseId phase) const override {
        if (phase == Sprint) return Decision::Step;
        return can_stand(s.j, problem_.m) ? Decision::Stand : Decision::Step;
    }

    PhaseId transition(PhaseId phase, const WalkState&, Decision, const WalkState& to) const override {
        if (phase == Lazy && to.i >= switch_time_) return Sprint;
        if (phase == Sprint && to.w.is_origin()) return Hold;
        return phase;
    }

    Run plan(const WalkState& s, PhaseId phase) const override {
        if (phase == Sprint) return {Decision::Step, problem_.n - s.i, true};
        if (!can_stand(s.j, problem_.m)) return {Decision::Step, 1, false};
        const std::int64_t limit = phase == Lazy ? switch_time_ : problem_.n;
        return {Decision::Stand, std::min(stand_budget(s.j, problem_.m), limit - s.i), false};
    }

private:
    Problem problem_;
    std::int64_t switch_time_;
};

// Staged strategy threading the windows of a schedule. In each stage: step
// until the first visit to 0 after the stage start, then step only every
// m-th time step until the stage ends. A stage without a visit to 0 marks
// the run as failed and it steps for the rest of the horizon.
class Windowed final : public Strategy {
public:
    Windowed(Schedule schedule, const Problem& p, std::string name)
        : schedule_(std::move(schedule)), problem_(p), name_(std::move(name)) {
        if (schedule_.n != p.n || schedule_.m != p.m || schedule_.d != p.d) {
            throw std::invalid_argument("schedule/problem mismatch (n, m or d differ)");
        }
    }

    std::string name() const override { return name_; }
    Signature signature() const override { return Signature::PhaseMarkov; }
    const Problem& problem() const override { return problem_; }
    int phase_count() const override { return 3 * schedule_.stages(); }
    PhaseId initial_phase() const override { return encode_window_phase({1, WindowMode::Seeking}); }
    int stage_of(PhaseId phase) const override { return decode_window_phase(phase).stage; }
    bool failed(PhaseId phase) const override {
        return decode_window_phase(phase).mode == WindowMode::Failed;
    }
    int stages() const override { return schedule_.stages(); }

    Decision decide(const WalkState& s, PhaseId phase) const override {
        if (decode_window_phase(phase).mode != WindowMode::Holding) return Decision::Step;
        return can_stand(s.j, problem_.m) ? Decision::Stand : Decision::Step;
    }

    PhaseId transition(PhaseId phase, const WalkState&, Decision, const WalkState& to) const override {
        WindowPhase wp = decode_window_phase(phase);
        if (wp.mode == WindowMode::Failed) return phase;
        if (wp.mode == WindowMode::Seeking && to.w.is_origin()) wp.mode = WindowMode::Holding;
        if (wp.stage < schedule_.stages() && to.i == schedule_.times[wp.stage]) {
            if (wp.mode == WindowMode::Seeking) {
                wp.mode = WindowMode::Failed;
            } else {
                wp = {wp.stage + 1, WindowMode::Seeking};
            }
        }
        return encode_window_phase(wp);
    }

    Run plan(const WalkState& s, PhaseId phase) const override {
        const WindowPhase wp = decode_window_phase(phase);
        const std::int64_t stage_end = schedule_.times[wp.stage];
        switch (wp.mode) {
            case WindowMode::Failed:
                return {Decision::Step, problem_.n - s.i, false};
            case WindowMode::Seeking:
                return {Decision::Step, stage_end - s.i, true};
            case WindowMode::Holding:
                break;
        }
        if (!can_stand(s.j, problem_.m)) return {Decision::Step, 1, false};
        return {Decision::Stand, std::min(stand_budget(s.j, problem_.m), stage_end - s.i), false};
    }

private:
    Schedule schedule_;
    Problem problem_;
    std::string name_;
};

// Remark-mode wrapper: inner Stand becomes DelayedStep. The inner strategy
// keeps seeing its own stand counter (consecutive DelayedSteps since the
// last move or Step), carried in the phase next to the inner phase.
class Delayed final : public Strategy {
public:
    Delayed(StrategyPtr inner, const Problem& p)
        : inner_(std::move(inner)), problem_(p), stride_(p.m + 1) {
        if (!(inner_->problem() == p)) throw std::invalid_argument("inner strategy/problem mismatch");
    }

    std::string name() const override { return "delayed(" + inner_->name() + ")"; }
    Signature signature() const override {
        return inner_->signature() == Signature::FullHistory ? Signature::FullHistory
                                                             : Signature::PhaseMarkov;
    }
    const Problem& problem() const override { return problem_; }
    int phase_count() const override { return inner_->phase_count() * static_cast<int>(stride_); }
    PhaseId initial_phase() const override { return pack(inner_->initial_phase(), 0); }
    int stage_of(PhaseId phase) const override { return inner_->stage_of(inner_phase(phase)); }
    bool failed(PhaseId phase) const override { return inner_->failed(inner_phase(phase)); }
    int stages() const override { return inner_->stages(); }

    Decision decide(const WalkState& s, PhaseId phase) const override {
        return map(inner_->decide(view(s, phase), inner_phase(phase)));
    }

    PhaseId transition(PhaseId phase, const WalkState& from, Decision decision,
                       const WalkState& to) const override {
        const std::int64_t ij = inner_j(phase);
        const bool reset = decision == Decision::Step || !(from.w == to.w);
        const std::int64_t next_j = reset ? 0 : ij + (to.i - from.i);
        const Decision inner_decision = decision == Decision::Step ? Decision::Step : Decision::Stand;
        const PhaseId ip = inner_->transition(inner_phase(phase), {from.i, from.w, ij}, inner_decision,
                                              {to.i, to.w, next_j});
        return pack(ip, next_j);
    }

    Run plan(const WalkState& s, PhaseId phase) const override {
        Run r = inner_->plan(view(s, phase), inner_phase(phase));
        r.decision = map(r.decision);
        if (r.decision == Decision::DelayedStep) r.stop_at_origin = false;
        return r;
    }

private:
    static Decision map(Decision d) { return d == Decision::Stand ? Decision::DelayedStep : d; }
    PhaseId pack(PhaseId ip, std::int64_t ij) const {
        return static_cast<PhaseId>(ip * stride_ + std::min(ij, stride_ - 1));
    }
    PhaseId inner_phase(PhaseId phase) const { return static_cast<PhaseId>(phase / stride_); }
    std::int64_t inner_j(PhaseId phase) const { return phase % stride_; }
    WalkState view(const WalkState& s, PhaseId phase) const { return {s.i, s.w, inner_j(phase)}; }

    StrategyPtr inner_;
    Problem problem_;
    std::int64_t stride_;
};

}  // namespace

StrategyPtr always_step(const Problem& problem) { return std::make_shared<AlwaysStep>(problem); }
StrategyPtr lazy_max(const Problem& problem) { return std::make_shared<LazyMax>(problem); }
StrategyPtr lazy_then_sprint(const Problem& problem) {
    return std::make_shared<LazyThenSprint>(problem);
}

StrategyPtr windowed_1d(const Schedule& schedule, const Problem& problem) {
    if (problem.d != 1) throw std::invalid_argument("windowed_1d requires d = 1");
    return std::make_shared<Windowed>(schedule, problem, "windowed_1d");
}

StrategyPtr windowed_2d(const Schedule& schedule, const Problem& problem) {
    if (problem.d != 2) throw std::invalid_argument("windowed_2d requires d = 2");
    return std::make_shared<Windowed>(schedule, problem, "windowed_2d");
}

StrategyPtr delayed_wrapper(StrategyPtr inner, const Problem& problem) {
    return std::make_shared<Delayed>(std::move(inner), problem);
}

bool is_windowed(const StrategySpec& spec) {
    return spec.name == "windowed_1d" || spec.name == "windowed_2d";
}

StrategySpec resolve_spec(StrategySpec spec) {
    if (spec.name != "windowed_2d" || spec.schedule) return spec;
    if (spec.kappa && !spec.theta) throw std::invalid_argument("kappa given without theta");
    if (!spec.theta) {
        const ThetaKappa tk = choose_theta_kappa(spec.epsilon);
        spec.theta = tk.theta;
        spec.kappa = tk.kappa;
    } else if (!spec.kappa) {
        const double th = *spec.theta;
        spec.kappa = (1.0 - (1.0 - 2.0 * th) / spec.epsilon) / (2.0 * th) / 2.0;
    }
    return spec;
}

Schedule schedule_for(const StrategySpec& spec, const Problem& problem) {
    if (spec.schedule) {
        const Schedule& s = *spec.schedule;
        if (s.n != problem.n || s.m != problem.m || s.d != problem.d) {
            throw std::invalid_argument("schedule/problem mismatch (n, m or d differ)");
        }
        return s;
    }
    if (spec.name == "windowed_1d") return build_schedule_1d({problem.n, problem.m, spec.eta});
    if (spec.name == "windowed_2d") {
        const StrategySpec r = resolve_spec(spec);
        return build_schedule_2d({problem.n, problem.m, r.epsilon, *r.theta, *r.kappa, r.stage_cap});
    }
    throw std::invalid_argument("strategy '" + spec.name + "' has no schedule");
}

StrategyPtr make_strategy(const StrategySpec& spec, const Problem& problem) {
    problem.validate();
    StrategyPtr s;
    if (spec.name == "always_step") {
        s = always_step(problem);
    } else if (spec.name == "lazy_max") {
        s = lazy_max(problem);
    } else if (spec.name == "lazy_then_sprint") {
        s = lazy_then_sprint(problem);
    } else if (spec.name == "windowed_1d") {
        s = windowed_1d(schedule_for(spec, problem), problem);
    } else if (spec.name == "windowed_2d") {
        s = windowed_2d(schedule_for(spec, problem), problem);
    } else {
        throw std::invalid_argument("unknown strategy '" + spec.name + "'");
    }
    if (spec.delayed) s = delayed_wrapper(std::move(s), problem);
    return s;
}

}  // namespace crw
