#include "crw/core_walk.hpp"

#include <sstream>

namespace crw {

void Problem::validate() const {
    if (d != 1 && d != 2) throw std::invalid_argument("dimension must be 1 or 2");
    if (n < 1) throw std::invalid_argument("horizon n must be >= 1");
    if (m < 1) throw std::invalid_argument("stand parameter m must be >= 1");
}

const char* to_string(Decision d) {
    switch (d) {
        case Decision::Stand: return "stand";
        case Decision::Step: return "step";
        case Decision::DelayedStep: return "delayed";
    }
    return "?";
}

WalkState initial_state(const Problem& problem) {
    problem.validate();
    return WalkState{};
}

std::vector<Decision> admissible_decisions(const WalkState& state, const Problem& problem) {
    if (state.i >= problem.n) {
        throw std::invalid_argument("no decision at or after the horizon (i >= n)");
    }
    std::vector<Decision> out;
    if (can_stand(state.j, problem.m)) out.push_back(Decision::Stand);
    out.push_back(Decision::Step);
    return out;
}

bool is_admissible(const WalkState& state, Decision decision, const Problem& problem) {
    if (state.i >= problem.n) return false;
    return decision != Decision::Stand || can_stand(state.j, problem.m);
}

WalkState advance(const WalkState& state, Decision decision, RandomSource& rng,
                  const Problem& problem) {
    if (!is_admissible(state, decision, problem)) {
        std::ostringstream msg;
        msg << "inadmissible decision '" << to_string(decision) << "' at time " << state.i
            << " (J=" << state.j << ", m=" << problem.m << ", n=" << problem.n << ")";
        throw AdmissibilityError(state.i, msg.str());
    }
    switch (decision) {
        case Decision::Stand:
            return {state.i + 1, state.w, state.j + 1};
        case Decision::Step:
            return {state.i + 1, state.w + unit_move(problem.d, rng), 0};
        case Decision::DelayedStep:
            if (rng.uniform01() * static_cast<double>(problem.m) < 1.0) {
                return {state.i + 1, state.w + unit_move(problem.d, rng), 0};
            }
            return {state.i + 1, state.w, 0};
    }
    return state;
}

std::string Trajectory::check(const Problem& problem) const {
    std::ostringstream msg;
    if (positions.size() != decisions.size() + 1) return "positions/decisions size mismatch";
    if (positions.empty() || !positions.front().is_origin()) return "w_0 is not the origin";
    std::int64_t j = 0;
    for (std::size_t k = 0; k < decisions.size(); ++k) {
        const Point& a = positions[k];
        const Point& b = positions[k + 1];
        const std::int64_t moved = l1_norm({b.x - a.x, b.y - a.y});
        if (problem.d == 1 && (a.y != 0 || b.y != 0)) return "y coordinate used in d=1";
        switch (decisions[k]) {
            case Decision::Stand:
                if (moved != 0) {
                    msg << "moved while standing at step " << k + 1;
                    return msg.str();
                }
                ++j;
                break;
            case Decision::Step:
                if (moved != 1) {
                    msg << "step " << k + 1 << " is not a unit move";
                    return msg.str();
                }
                j = 0;
                break;
            case Decision::DelayedStep:
                if (moved > 1) {
                    msg << "delayed step " << k + 1 << " moved more than one unit";
                    return msg.str();
                }
                j = 0;
                break;
        }
        if (j > problem.m - 1) {
            msg << "J exceeds m-1 at time " << k + 1;
            return msg.str();
        }
    }
    return {};
}

}  // namespace crw
