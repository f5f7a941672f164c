#include <cmath>

#include "doctest.h"

#include "crw/analysis.hpp"
#include "crw/exact.hpp"
#include "crw/strategies.hpp"
#include "oracles.hpp"

using namespace crw;

TEST_CASE("optimal value examples") {
    CHECK(optimal_value<Rational>({1, 2, 2}).value == Rational(1, 2));
    CHECK(optimal_value<Rational>({1, 2, 3}).value == Rational(1));
    for (std::int64_t m = 2; m < 6; ++m) CHECK(optimal_value<Rational>({1, 1, m}).value == Rational(1));
    CHECK(optimal_value<double>({1, 2, 2}).value == 0.5);
}

TEST_CASE("DP equals the decision-tree oracle") {
    for (int d : {1, 2}) {
        const int nmax = d == 1 ? 8 : 5;
        for (int n = 1; n <= nmax; ++n) {
            for (int m = 1; m <= 4; ++m) {
                INFO("d=" << d << " n=" << n << " m=" << m);
                const Rational dp = optimal_value<Rational>({d, n, m}).value;
                CHECK(dp == oracle::best_tree(d, n, m));
                CHECK(std::abs(optimal_value<double>({d, n, m}).value - boost::rational_cast<double>(dp)) < 1e-14);
            }
        }
    }
}

TEST_CASE("exhaustive history enumeration agrees with the tree oracle") {
    for (int n = 1; n <= 6; ++n) {
        for (int m = 1; m <= 3; ++m) CHECK(exhaustive_optimum({1, n, m}) == oracle::best_tree(1, n, m));
    }
    CHECK(exhaustive_optimum({2, 3, 2}) == oracle::best_tree(2, 3, 2));
}

TEST_CASE("optimal value is monotone in m and vanishes for odd n at m=1") {
    for (std::int64_t n : {5, 17, 40}) {
        double prev = -1.0;
        for (std::int64_t m = 1; m <= 12; ++m) {
            const double v = optimal_value<double>({1, n, m}).value;
            CHECK(v >= prev - 1e-15);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-15);
            prev = v;
        }
        if (n % 2 == 1) CHECK(optimal_value<double>({1, n, 1}).value == 0.0);
    }
}

TEST_CASE("value table and policy") {
    const Problem p{1, 12, 3};
    DpOptions opt;
    opt.keep_values = opt.keep_policy = true;
    const ValueTable<double> t = optimal_value<double>(p, opt);
    CHECK(t.slices.size() == 13);
    CHECK(t.slices[12].get(0, 0, 0) == 1.0);
    CHECK(t.slices[12].get(1, 0, 0) == 0.0);
    CHECK(t.value == t.slices[0].get(0, 0, 0));
    // The stored policy attains the value.
    for (std::int64_t i = 0; i < p.n; ++i) {
        const auto& cur = t.slices[static_cast<std::size_t>(i)];
        const auto& nx = t.slices[static_cast<std::size_t>(i + 1)];
        for (std::int64_t j = 0; j <= cur.jmax; ++j) {
            for (std::int64_t x = -cur.radius; x <= cur.radius; ++x) {
                const Decision d = t.policy_at(i, x, 0, j);
                const double v = d == Decision::Stand ? nx.get(x, 0, j + 1)
                                                      : 0.5 * (nx.get(x - 1, 0, 0) + nx.get(x + 1, 0, 0));
                CHECK(v == doctest::Approx(cur.get(x, 0, j)).epsilon(1e-14));
                if (d == Decision::Stand) CHECK(can_stand(j, p.m));
            }
        }
    }
    const std::string csv = value_table_csv(t);
    CHECK(csv.rfind("i,x,j,V,policy", 0) == 0);
}

TEST_CASE("budget refusal") {
    DpOptions opt;
    opt.budget.max_operations = 1000;
    CHECK_THROWS_AS(optimal_value<double>({2, 1000, 10}, opt), BudgetExceeded);
    try {
        optimal_value<double>({2, 1000, 10}, opt);
    } catch (const BudgetExceeded& e) {
        CHECK(e.operations() > 1000);
        CHECK(std::string(e.what()).find("MB") != std::string::npos);
    }
}

TEST_CASE("exact evaluation examples") {
    const Problem p10{1, 10, 3};
    CHECK(evaluate_strategy_exact(*always_step(p10), p10).probability == doctest::Approx(252.0 / 1024).epsilon(1e-14));
    const Problem p2{1, 2, 3};
    CHECK(evaluate_strategy_exact(*lazy_max(p2), p2).probability == 1.0);
    const Problem p{1, 10000, 100};
    CHECK(evaluate_strategy_exact(*lazy_max(p), p).probability == doctest::Approx(oracle::return_1d(100)).epsilon(1e-10));
    CHECK(oracle::return_1d(100) == doctest::Approx(0.0796).epsilon(1e-3));
    const Problem q{1, 2000, 32};
    CHECK(std::abs(evaluate_strategy_exact(*lazy_max(q), q).probability - oracle::return_1d(62)) < 1e-10);
    for (std::int64_t n : {1, 3, 11}) {
        const Problem odd{1, n, 5};
        CHECK(evaluate_strategy_exact(*always_step(odd), odd).probability == 0.0);
    }
}

TEST_CASE("forward propagation conserves mass") {
    const Problem p{2, 300, 7};
    StrategySpec spec;
    spec.name = "lazy_then_sprint";
    const StrategyPtr s = make_strategy(spec, p);
    const ExactEvaluation e = evaluate_strategy_exact(*s, p);
    CHECK(e.final_distribution.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    const ExactEvaluation full = evaluate_strategy_exact(*s, p, {false, {}});
    CHECK(full.final_distribution.dead_mass == 0.0);
    CHECK(full.probability == doctest::Approx(e.probability).epsilon(1e-12));
    for (const auto& slot : full.final_distribution.slots) {
        CHECK(slot.j <= p.m - 1);
        for (double v : slot.band.mass) CHECK(v >= 0.0);
    }
}

TEST_CASE("dominance over small problems in d=1 and d=2") {
    for (int d : {1, 2}) {
        for (std::int64_t n : {20, 60}) {
            for (std::int64_t m : {2, 4, 9}) {
                const Problem p{d, n, m};
                const double opt = optimal_value<double>(p).value;
                for (const char* name : {"always_step", "lazy_max", "lazy_then_sprint"}) {
                    StrategySpec spec;
                    spec.name = name;
                    CHECK(evaluate_strategy_exact(*make_strategy(spec, p), p).probability <= opt + 1e-12);
                    spec.delayed = true;
                    CHECK(evaluate_strategy_exact(*make_strategy(spec, p), p).probability >= 0.0);
                }
            }
        }
    }
}

TEST_CASE("delayed steps are a Binomial(n, 1/m) thinning") {
    const std::int64_t n = 16;
    // With m > n lazy_max always wants to stand, so the wrapper always delays.
    const Problem big{1, n, n + 1};
    const StrategyPtr s = delayed_wrapper(lazy_max(big), big);
    const ExactEvaluation e = evaluate_strategy_exact(*s, big, {false, {}});
    // Law of W_n: sum_k Binom(n, k, 1/(n+1)) P(Y_k = x).
    const double q = 1.0 / static_cast<double>(n + 1);
    std::vector<double> law(2 * n + 1, 0.0);
    for (std::int64_t k = 0; k <= n; ++k) {
        const double bk = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) *
                          std::pow(q, static_cast<double>(k)) * std::pow(1 - q, static_cast<double>(n - k));
        const auto pas = oracle::pascal_law(static_cast<int>(k));
        for (std::int64_t r = 0; r <= k; ++r) law[static_cast<std::size_t>(2 * r - k + n)] += bk * pas[static_cast<std::size_t>(r)];
    }
    std::vector<double> got(2 * n + 1, 0.0);
    for (const auto& slot : e.final_distribution.slots) {
        for (std::int64_t x = slot.band.x0; x <= slot.band.x1; ++x) got[static_cast<std::size_t>(x + n)] += slot.band.at(x, 0);
    }
    for (std::size_t k = 0; k < law.size(); ++k) CHECK(got[k] == doctest::Approx(law[k]).epsilon(1e-12));
}

TEST_CASE("full-history strategies are refused") {
    class History final : public Strategy {
    public:
        explicit History(const Problem& p) : p_(p) {}
        std::string name() const override { return "history"; }
        Signature signature() const override { return Signature::FullHistory; }
        const Problem& problem() const override { return p_; }
        Decision decide(const WalkState&, PhaseId) const override { return Decision::Step; }

    private:
        Problem p_;
    };
    const Problem p{1, 10, 2};
    History h(p);
    CHECK_THROWS_AS(evaluate_strategy_exact(h, p), std::invalid_argument);
}

TEST_CASE("hitting tails") {
    CHECK(hitting_tail_1d(2, 1) == 1.0);
    CHECK(hitting_tail_1d(1, 2) == 0.5);
    CHECK(reflection_tail_1d(1, 2) == 0.5);
    CHECK(hitting_tail_1d(1, 1) == 0.5);
    CHECK(reflection_tail_1d(1, 1) == 0.0);
    CHECK_FALSE(reflection_applicable(1, 1));
    CHECK(reflection_applicable(1, 2));
    for (int x = 1; x <= 6; ++x) {
        for (int l = 0; l <= 16; ++l) {
            const double paths = oracle::tail_by_paths(x, l);
            CHECK(hitting_tail_1d(x, l) == doctest::Approx(paths).epsilon(1e-14));
            CHECK(hitting_tail_1d(-x, l) == doctest::Approx(paths).epsilon(1e-14));
            CHECK(hitting_tail_closed_form(x, l) == doctest::Approx(paths).epsilon(1e-12));
        }
    }
    const auto table = hitting_tail_table_1d(6, 16);
    for (int x = 1; x <= 6; ++x) {
        for (int l = 0; l <= 16; ++l) CHECK(table[x][l] == doctest::Approx(oracle::tail_by_paths(x, l)).epsilon(1e-14));
    }
    CHECK(hitting_tail_closed_form(100, 10000) == doctest::Approx(hitting_tail_1d(100, 10000)).epsilon(1e-9));
}

TEST_CASE("SSRW laws") {
    const auto law = ssrw_law_1d(10);
    const auto pas = oracle::pascal_law(10);
    for (int k = 0; k <= 10; ++k) CHECK(law[2 * k] == doctest::Approx(pas[k]).epsilon(1e-14));
    CHECK(ssrw_pmf_1d(10, 0) == doctest::Approx(252.0 / 1024).epsilon(1e-12));
    CHECK(ssrw_pmf_1d(10, 1) == 0.0);
    CHECK(ssrw_pmf_1d(1000, 0) == doctest::Approx(oracle::return_1d(1000)).epsilon(1e-10));
}

TEST_CASE("2d return probabilities") {
    const auto p0 = return_probabilities_2d({0, 0}, 4);
    CHECK(p0[0] == 1.0);
    CHECK(p0[1] == 0.0);
    CHECK(p0[2] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(return_probabilities_2d({1, 0}, 1)[1] == doctest::Approx(0.25).epsilon(1e-15));
    for (auto [x, y] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {2, 1}, {-3, 2}, {0, 5}}) {
        const auto grid = oracle::returns_2d_grid(x, y, 30);
        const auto fast = return_probabilities_2d({x, y}, 30);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(fast[i] == doctest::Approx(grid[i]).epsilon(1e-12));
    }
    CHECK(expected_local_time({0, 0}, 2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(expected_local_time({40, 0}, 30) == 0.0);
    CHECK_THROWS_AS(return_probabilities_2d({0, 0}, (std::int64_t{1} << 24) + 1), BudgetExceeded);
}

TEST_CASE("2d expected local time grows like log N") {
    std::vector<double> r;
    for (int e = 10; e <= 14; ++e) {
        const std::int64_t N = std::int64_t{1} << e;
        r.push_back(expected_local_time({0, 0}, N) / std::log(static_cast<double>(N)));
    }
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    CHECK((*hi - *lo) / *lo < 0.10);
}
