#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"

#include "crw/core_walk.hpp"
#include "crw/random.hpp"
#include "oracles.hpp"

using namespace crw;

TEST_CASE("initial state is the origin with J = 0") {
    CHECK(initial_state({1, 10, 3}) == WalkState{0, {0, 0}, 0});
    CHECK(initial_state({2, 5, 2}) == WalkState{0, {0, 0}, 0});
    CHECK(initial_state({1, 1, 1}) == WalkState{0, {0, 0}, 0});
}

TEST_CASE("problem validation") {
    CHECK_NOTHROW(Problem{1, 1, 1}.validate());
    CHECK_THROWS_AS(Problem({3, 10, 2}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(Problem({1, 0, 2}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(Problem({1, 10, 0}).validate(), std::invalid_argument);
}

TEST_CASE("admissible decisions") {
    const Problem p{1, 100, 3};
    auto has = [](const std::vector<Decision>& v, Decision d) { return std::find(v.begin(), v.end(), d) != v.end(); };
    auto a = admissible_decisions({4, {0, 0}, 0}, p);
    CHECK(has(a, Decision::Stand));
    CHECK(has(a, Decision::Step));
    a = admissible_decisions({4, {0, 0}, 2}, p);
    CHECK_FALSE(has(a, Decision::Stand));
    CHECK(has(a, Decision::Step));
    a = admissible_decisions({0, {0, 0}, 0}, Problem{1, 10, 1});
    CHECK(a == std::vector<Decision>{Decision::Step});
    CHECK_THROWS(admissible_decisions({100, {0, 0}, 0}, p));
}

TEST_CASE("advance follows the decision") {
    const Problem p{1, 100, 3};
    RandomSource rng(5);
    CHECK(advance({4, {7, 0}, 1}, Decision::Stand, rng, p) == WalkState{5, {7, 0}, 2});
    const WalkState s = advance({4, {7, 0}, 1}, Decision::Step, rng, p);
    CHECK(s.i == 5);
    CHECK(s.j == 0);
    CHECK((s.w.x == 6 || s.w.x == 8));
    CHECK_THROWS_AS(advance({4, {7, 0}, 2}, Decision::Stand, rng, p), AdmissibilityError);
}

TEST_CASE("advance step law in d=1 and d=2") {
    RandomSource rng(11);
    std::map<std::pair<std::int64_t, std::int64_t>, int> counts;
    const int N = 40000;
    for (int t = 0; t < N; ++t) {
        const WalkState s = advance({0, {0, 0}, 0}, Decision::Step, rng, {2, 5, 2});
        ++counts[{s.w.x, s.w.y}];
    }
    REQUIRE(counts.size() == 4);
    for (const auto& [pt, c] : counts) {
        CHECK(std::abs(pt.first) + std::abs(pt.second) == 1);
        // 0.25 +- 5 standard errors
        CHECK(std::abs(c / double(N) - 0.25) < 5 * std::sqrt(0.25 * 0.75 / N));
    }
    int up = 0;
    for (int t = 0; t < N; ++t) up += advance({0, {0, 0}, 0}, Decision::Step, rng, {1, 5, 2}).w.x == 1;
    CHECK(std::abs(up / double(N) - 0.5) < 5 * std::sqrt(0.25 / N));
}

TEST_CASE("delayed step resets J and moves with probability 1/m") {
    const Problem p{1, 100, 4};
    RandomSource rng(3);
    int moved = 0;
    const int N = 40000;
    for (int t = 0; t < N; ++t) {
        const WalkState s = advance({0, {0, 0}, 0}, Decision::DelayedStep, rng, p);
        CHECK(s.j == 0);
        moved += !s.w.is_origin();
    }
    CHECK(std::abs(moved / double(N) - 0.25) < 5 * std::sqrt(0.25 * 0.75 / N));
    // With m = 1 a delayed step is an ordinary step.
    for (int t = 0; t < 100; ++t) CHECK_FALSE(advance({0, {0, 0}, 0}, Decision::DelayedStep, rng, {1, 5, 1}).w.is_origin());
}

TEST_CASE("trajectory invariants are checked") {
    const Problem p{1, 4, 2};
    Trajectory t;
    t.positions = {{0, 0}, {1, 0}, {1, 0}, {0, 0}, {0, 0}};
    t.decisions = {Decision::Step, Decision::Stand, Decision::Step, Decision::Stand};
    CHECK(t.check(p).empty());
    Trajectory bad = t;
    bad.decisions[3] = Decision::Stand;
    bad.decisions[2] = Decision::Stand;
    bad.positions[3] = {1, 0};
    bad.positions[4] = {1, 0};
    CHECK_FALSE(bad.check(p).empty());  // two consecutive stands with m = 2
    Trajectory jump = t;
    jump.positions[1] = {2, 0};
    CHECK_FALSE(jump.check(p).empty());
    Trajectory start = t;
    start.positions[0] = {1, 0};
    CHECK_FALSE(start.check(p).empty());
}

TEST_CASE("random source is reproducible and splittable") {
    RandomSource a(42), b(42);
    for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    // sign_sum consumes exactly the bits next_bit would.
    for (std::int64_t count : {1, 5, 63, 64, 65, 200}) {
        RandomSource x(9), y(9);
        x.next_bit();
        y.next_bit();
        std::int64_t sum = 0;
        for (std::int64_t k = 0; k < count; ++k) sum += x.next_bit() ? 1 : -1;
        CHECK(y.sign_sum(count) == sum);
        CHECK(x.next_u64() == y.next_u64());
        CHECK(x.next_bit() == y.next_bit());
    }
}

TEST_CASE("pure SSRW law with m = 1 matches the binomial law") {
    const int n = 12;
    const Problem p{1, n, 1};
    const int N = 100000;
    std::vector<int> counts(2 * n + 1, 0);
    RandomSource rng(2024);
    for (int t = 0; t < N; ++t) {
        WalkState s = initial_state(p);
        while (s.i < n) s = advance(s, Decision::Step, rng, p);
        ++counts[static_cast<std::size_t>(s.w.x + n)];
    }
    const auto law = oracle::pascal_law(n);
    for (int k = 0; k <= n; ++k) {
        const double q = law[static_cast<std::size_t>(k)];
        const double f = counts[static_cast<std::size_t>(2 * k)] / double(N);
        CHECK(std::abs(f - q) <= 3 * std::sqrt(q * (1 - q) / N) + 1e-12);
    }
}
