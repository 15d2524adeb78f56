#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "ordstat/baselines.hpp"
#include "ordstat/error.hpp"
#include "ordstat/spill.hpp"
#include "oracles.hpp"

using namespace ordstat;

namespace {

using Counts = std::vector<std::int64_t>;

BinProbabilityMatrix random_matrix(oracle::Gen& gen, std::size_t n, std::size_t cols,
                                   std::vector<std::vector<double>>* rows = nullptr) {
    std::vector<double> flat;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = gen.prob_row(cols, 0.15);
        flat.insert(flat.end(), r.begin(), r.end());
    }
    BinProbabilityMatrix p(n, cols, flat);
    if (rows) {
        rows->clear();
        for (std::size_t i = 0; i < n; ++i) rows->emplace_back(p.row(i).begin(), p.row(i).end());
    }
    return p;
}

BinProbabilityMatrix same_rows(std::size_t n, std::vector<double> row) {
    std::vector<double> flat;
    for (std::size_t i = 0; i < n; ++i) flat.insert(flat.end(), row.begin(), row.end());
    return BinProbabilityMatrix(n, row.size(), flat);
}

OrderQuery query(Counts c, std::int64_t n) {
    std::vector<double> x(c.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = static_cast<double>(j);
    return validate_and_canonicalize(c, x, n);
}

} // namespace

TEST_CASE("config table layout is a bijection onto the simplex") {
    for (std::size_t d = 1; d <= 4; ++d) {
        for (std::int64_t n = 0; n <= 6; ++n) {
            const ConfigTable t(d, n, 1'000'000);
            CHECK(t.size() == static_cast<std::size_t>(simplex_entry_count(d, n)));
            // lexicographic enumeration, last coordinate fastest, must hit 0, 1, 2, ...
            Counts k(d, 0);
            std::size_t expected = 0;
            while (true) {
                std::int64_t s = 0;
                for (auto v : k) s += v;
                if (s <= n) CHECK(t.index(k) == expected++);
                std::size_t j = d;
                while (j > 0 && ++k[j - 1] > n) k[--j] = 0;
                if (j == 0) break;
            }
            CHECK(expected == t.size());
        }
    }
    CHECK(simplex_entry_count(6, 30) == 1947792.0);
}

TEST_CASE("boncelet examples") {
    CHECK(solve_boncelet(query({1}, 1), BinProbabilityMatrix(1, 2, {0.4, 0.6})) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(std::abs(solve_boncelet(query({1, 2}, 3), same_rows(3, {1.0 / 3, 1.0 / 3, 1.0 / 3})) - 16.0 / 27) <= 1e-15);
    CHECK(solve_boncelet(query({1, 3}, 4), same_rows(4, {0.0, 0.0, 1.0})) == 0.0);
}

TEST_CASE("brute force examples") {
    CHECK(brute_force(query({2}, 2), BinProbabilityMatrix(2, 2, {0.3, 0.7, 0.6, 0.4})) ==
          doctest::Approx(0.3 * 0.6).epsilon(1e-15));
    CHECK(std::abs(brute_force(query({1, 2}, 3), same_rows(3, {1.0 / 3, 1.0 / 3, 1.0 / 3})) - 16.0 / 27) <= 1e-15);
    CHECK(brute_force(query({1}, 4), same_rows(4, {0.5, 0.5})) == 0.9375);
}

TEST_CASE("boncelet and brute force against enumeration") {
    oracle::Gen gen(31);
    for (std::int64_t n = 1; n <= 6; ++n) {
        for (std::size_t d = 1; d <= std::min<std::size_t>(3, static_cast<std::size_t>(n)); ++d) {
            for (int t = 0; t < 20; ++t) {
                std::vector<std::vector<double>> rows;
                const auto p = random_matrix(gen, static_cast<std::size_t>(n), d + 1, &rows);
                const auto q = query(gen.increasing_indices(d, n), n);
                const double exact = static_cast<double>(oracle::independent_enumeration(n, q.c, rows));
                CHECK(std::abs(brute_force(q, p) - exact) <= 1e-12);
                CHECK(std::abs(solve_boncelet(q, p) - exact) <= 1e-12);
            }
        }
    }
}

TEST_CASE("boncelet agrees with the spill solver") {
    oracle::Gen gen(32);
    for (int t = 0; t < 100; ++t) {
        const auto n = gen.integer(1, 20);
        const auto d = static_cast<std::size_t>(gen.integer(1, std::min<std::int64_t>(n, 4)));
        const auto p = random_matrix(gen, static_cast<std::size_t>(n), d + 1);
        const auto q = query(gen.increasing_indices(d, n), n);
        CHECK(std::abs(solve_boncelet(q, p) - solve_independent(q, p)) <= 1e-12);
    }
}

TEST_CASE("boncelet tables stay normalised and are thread independent") {
    oracle::Gen gen(33);
    for (int t = 0; t < 10; ++t) {
        const auto n = gen.integer(5, 20);
        const auto p = random_matrix(gen, static_cast<std::size_t>(n), 4);
        const auto q = query(gen.increasing_indices(3, n), n);
        BonceletOptions serial, parallel;
        double worst = 0.0;
        serial.observer = [&](std::size_t, const ConfigTable& table) {
            worst = std::max(worst, std::abs(table.total() - 1.0));
        };
        parallel.threads = 3;
        const double a = solve_boncelet(q, p, serial);
        const double b = solve_boncelet(q, p, parallel);
        CHECK(std::memcmp(&a, &b, sizeof a) == 0);
        CHECK(worst <= 1e-12 * static_cast<double>(n));
    }
}

TEST_CASE("resource guards") {
    const auto q = query({1, 2, 3, 4, 5, 6}, 30);
    const auto p = same_rows(30, std::vector<double>(7, 1.0 / 7));
    BonceletOptions small;
    small.max_table_entries = 1000;
    CHECK_THROWS_AS(solve_boncelet(q, p, small), Error);
    try {
        brute_force(q, p);
        FAIL("expected a resource error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Resource);
    }
    // 10^7 assignments is still allowed
    const auto q7 = query({1}, 7);
    CHECK_NOTHROW(brute_force(query({1, 2, 3, 4, 5, 6, 7}, 7), same_rows(7, std::vector<double>(8, 0.125))));
    CHECK_NOTHROW(brute_force(q7, same_rows(7, {0.5, 0.5})));
}

TEST_CASE("monte carlo") {
    const auto q = validate_and_canonicalize(Counts{1, 2}, std::vector<double>{1.0 / 3, 2.0 / 3}, 3);
    const auto sampler = independent_sampler({CdfProvider(Uniform{0.0, 1.0})});

    SUBCASE("degenerate sampler") {
        const JointSampler always = [](CounterRng&, std::span<double> out) {
            for (auto& v : out) v = -1.0;
        };
        const auto r = monte_carlo(q, always, 10000, 5);
        CHECK(r.estimate == 1.0);
        CHECK(r.stderr_ == 0.0);
        CHECK(r.hits == 10000);
    }
    SUBCASE("a million trials land within three standard errors") {
        const auto r = monte_carlo(q, sampler, 1'000'000, 2024, 2);
        CHECK(std::abs(r.estimate - 16.0 / 27) <= 3 * r.stderr_);
    }
    SUBCASE("different seeds differ but both stay within four standard errors") {
        const auto a = monte_carlo(q, sampler, 100000, 1);
        const auto b = monte_carlo(q, sampler, 100000, 2);
        CHECK(a.estimate != b.estimate);
        CHECK(std::abs(a.estimate - 16.0 / 27) <= 4 * a.stderr_);
        CHECK(std::abs(b.estimate - 16.0 / 27) <= 4 * b.stderr_);
    }
    SUBCASE("thread count does not matter") {
        const auto a = monte_carlo(q, sampler, 50000, 9, 1);
        const auto b = monte_carlo(q, sampler, 50000, 9, 4);
        CHECK(a.hits == b.hits);
    }
    SUBCASE("constraint check sorts the sample") {
        std::vector<double> v{0.9, 0.1, 0.5};
        CHECK(satisfies_order_constraints(q, v));
        std::vector<double> w{0.9, 0.1, 0.8};
        CHECK_FALSE(satisfies_order_constraints(q, w));
    }
    SUBCASE("zero trials is an input error") {
        CHECK_THROWS_AS(monte_carlo(q, sampler, 0, 1), Error);
    }
}
