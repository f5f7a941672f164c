#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "crw/random.hpp"

namespace crw {

/// Lattice point in Z^d. In one dimension the y coordinate stays 0.
struct Point {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const Point&, const Point&) = default;
    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    bool is_origin() const { return x == 0 && y == 0; }
};

inline std::int64_t sup_norm(const Point& p) {
    const std::int64_t ax = p.x < 0 ? -p.x : p.x;
    const std::int64_t ay = p.y < 0 ? -p.y : p.y;
    return ax > ay ? ax : ay;
}

inline std::int64_t l1_norm(const Point& p) {
    return (p.x < 0 ? -p.x : p.x) + (p.y < 0 ? -p.y : p.y);
}

/// Controlled-walk problem: dimension, horizon and the stand-still parameter.
/// A strategy may stand still for at most m-1 consecutive time steps.
struct Problem {
    int d = 1;
    std::int64_t n = 1;
    std::int64_t m = 1;

    void validate() const;
    friend bool operator==(const Problem&, const Problem&) = default;
};

enum class Decision : std::uint8_t {
    Stand,
    Step,
    /// Stand with probability 1 - 1/m, SSRW step with probability 1/m; never
    /// limited by the consecutive-stand rule.
    DelayedStep,
};

const char* to_string(Decision d);

/// Instantaneous state: time i, position w and J, the time since the last
/// SSRW step.
struct WalkState {
    std::int64_t i = 0;
    Point w{};
    std::int64_t j = 0;

    friend bool operator==(const WalkState&, const WalkState&) = default;
};

/// Stand is allowed iff the resulting counter stays <= m-1.
inline bool can_stand(std::int64_t j, std::int64_t m) {
#ifdef CRW_MUTATION_J_OFF_BY_ONE
    return j + 1 <= m;
#else
    return j + 1 <= m - 1;
#endif
}

/// Number of consecutive Stand decisions still allowed from counter j.
inline std::int64_t stand_budget(std::int64_t j, std::int64_t m) {
#ifdef CRW_MUTATION_J_OFF_BY_ONE
    return m - j > 0 ? m - j : 0;
#else
    return m - 1 - j > 0 ? m - 1 - j : 0;
#endif
}

class AdmissibilityError : public std::runtime_error {
public:
    AdmissibilityError(std::int64_t time_step, const std::string& what)
        : std::runtime_error(what), time_step_(time_step) {}
    std::int64_t time_step() const { return time_step_; }

private:
    std::int64_t time_step_;
};

struct Trajectory {
    std::vector<Point> positions;      // w_0 .. w_n
    std::vector<Decision> decisions;   // Delta_1 .. Delta_n

    /// Checks the structural invariants and returns the first violation, or
    /// an empty string. Delayed steps are checked as unit moves or stands.
    std::string check(const Problem& problem) const;
};

/// Uniform unit move: one bit in d=1, an axis bit then a sign bit in d=2.
inline Point unit_move(int d, RandomSource& rng) {
    if (d == 1) return {rng.next_bit() ? 1 : -1, 0};
    const bool axis = rng.next_bit();
    const std::int64_t sign = rng.next_bit() ? 1 : -1;
    return axis ? Point{0, sign} : Point{sign, 0};
}

WalkState initial_state(const Problem& problem);

/// Decisions available in standard mode. Step is always present.
std::vector<Decision> admissible_decisions(const WalkState& state, const Problem& problem);

bool is_admissible(const WalkState& state, Decision decision, const Problem& problem);

WalkState advance(const WalkState& state, Decision decision, RandomSource& rng, const Problem& problem);

}  // namespace crw
