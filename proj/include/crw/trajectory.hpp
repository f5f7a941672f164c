#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "crw/core_walk.hpp"
#include "crw/schedule.hpp"
#include "crw/strategies.hpp"

namespace crw {

struct StageObservation {
    Point position{};     ///< W at the stage end t_k
    bool hit = false;     ///< W visited 0 in (t_{k-1}, t_k]
    bool active = false;  ///< strategy had not failed at t_{k-1}
};

/// Records the walk at every window checkpoint t_1 .. t_{u+1}.
class WindowTracker {
public:
    explicit WindowTracker(const Schedule& schedule);

    void reset();
    std::int64_t next_checkpoint() const {
        return next_ < times_.size() ? times_[next_] : std::numeric_limits<std::int64_t>::max();
    }
    void on_arrival(const WalkState& s, bool strategy_failed);

    /// Entry k (1-based, entry 0 unused) describes stage k.
    const std::vector<StageObservation>& stages() const { return obs_; }

private:
    std::vector<std::int64_t> times_;
    std::vector<StageObservation> obs_;
    std::size_t next_ = 1;
    bool hit_ = false;
    bool active_ = true;
};

struct SimResult {
    WalkState final{};
    PhaseId phase = 0;
    bool success = false;
};

struct SimOptions {
    Trajectory* record = nullptr;
    WindowTracker* windows = nullptr;
};

/// Runs one controlled walk to the horizon, executing the strategy's planned
/// runs in bulk. Throws AdmissibilityError naming the offending time step.
SimResult simulate(const Strategy& strategy, const Problem& problem, RandomSource& rng,
                   SimOptions options = {});

/// Reference kernel: one decide()/advance()/transition() per time step.
/// Consumes randomness exactly like simulate().
SimResult simulate_stepwise(const Strategy& strategy, const Problem& problem, RandomSource& rng,
                            Trajectory* record = nullptr);

/// Deterministic in (strategy, problem, seed). The stream is RandomSource(seed);
/// trial t of a Monte Carlo batch is replayed with seed derive_seed(master, t).
std::pair<Trajectory, bool> run_trajectory(const Strategy& strategy, const Problem& problem,
                                           std::uint64_t seed);

}  // namespace crw
