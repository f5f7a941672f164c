#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "crw/core_walk.hpp"
#include "crw/schedule.hpp"

namespace crw {

/// What a strategy's decision is allowed to depend on.
enum class Signature {
    Markov,       ///< (w, j)
    TimeMarkov,   ///< (w, j, i)
    PhaseMarkov,  ///< (w, j, i, phase)
    FullHistory,
};

const char* to_string(Signature s);

using PhaseId = std::int32_t;

/// A run of identical decisions. The simulator executes up to `length`
/// repetitions and stops early when a Step lands on the origin and
/// `stop_at_origin` is set, or as soon as a DelayedStep actually moves.
struct Run {
    Decision decision = Decision::Step;
    std::int64_t length = 1;
    bool stop_at_origin = false;
};

/// Decision rule with an explicit finite phase. Implementations are immutable
/// after construction and safe to share between concurrent trials; all
/// per-trajectory state lives in the PhaseId the caller carries.
///
/// transition() is called once per executed run with the state at the start
/// and at the end of the run; it must equal the composition of single-step
/// transitions over that run. plan() must agree with decide() at every state
/// of the run and keep the phase unchanged on every arrival except the last.
class Strategy {
public:
    virtual ~Strategy() = default;

    virtual std::string name() const = 0;
    virtual Signature signature() const = 0;
    virtual const Problem& problem() const = 0;

    virtual int phase_count() const { return 1; }
    virtual PhaseId initial_phase() const { return 0; }

    virtual Decision decide(const WalkState& s, PhaseId phase) const = 0;

    virtual PhaseId transition(PhaseId phase, const WalkState& /*from*/, Decision /*decision*/,
                               const WalkState& /*to*/) const {
        return phase;
    }

    virtual Run plan(const WalkState& s, PhaseId phase) const { return {decide(s, phase), 1, false}; }

    /// Stage index (1-based) encoded in a phase, 0 for unstaged strategies.
    virtual int stage_of(PhaseId) const { return 0; }
    /// True once the staged strategy has given up (tau_0 > t_k at some stage).
    virtual bool failed(PhaseId) const { return false; }
    virtual int stages() const { return 0; }
};

using StrategyPtr = std::shared_ptr<const Strategy>;

StrategyPtr always_step(const Problem& problem);
StrategyPtr lazy_max(const Problem& problem);
StrategyPtr lazy_then_sprint(const Problem& problem);
StrategyPtr windowed_1d(const Schedule& schedule, const Problem& problem);
StrategyPtr windowed_2d(const Schedule& schedule, const Problem& problem);
StrategyPtr delayed_wrapper(StrategyPtr inner, const Problem& problem);

/// Phase encoding shared by the windowed strategies.
enum class WindowMode : int { Seeking = 0, Holding = 1, Failed = 2 };

struct WindowPhase {
    int stage = 1;
    WindowMode mode = WindowMode::Seeking;
};

WindowPhase decode_window_phase(PhaseId phase);
PhaseId encode_window_phase(WindowPhase wp);

/// Strategy selection by name, as used by the CLI and sweep configs.
struct StrategySpec {
    std::string name = "always_step";
    bool delayed = false;
    double eta = 0.5;       // windowed_1d
    double epsilon = 0.5;   // windowed_2d
    std::optional<double> theta;
    std::optional<double> kappa;
    int stage_cap = 16;
    std::optional<Schedule> schedule;  ///< prebuilt schedule overrides the parameters
};

bool is_windowed(const StrategySpec& spec);

/// Makes defaulted windowed_2d parameters explicit (theta, kappa).
StrategySpec resolve_spec(StrategySpec spec);

/// Builds (or returns the prebuilt) schedule for a windowed spec.
Schedule schedule_for(const StrategySpec& spec, const Problem& problem);

/// Throws std::invalid_argument for unknown names and ScheduleError for
/// unusable windowed parameters.
StrategyPtr make_strategy(const StrategySpec& spec, const Problem& problem);

}  // namespace crw
