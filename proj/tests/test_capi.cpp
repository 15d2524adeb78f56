#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "ordstat/ordstat.h"

namespace {

struct Query {
    ordstat_query* q = nullptr;
    Query(std::int64_t n, std::vector<std::int64_t> c, std::vector<double> x) {
        REQUIRE(ordstat_query_create(n, c.data(), x.data(), c.size(), &q) == ORDSTAT_OK);
    }
    ~Query() { ordstat_query_destroy(q); }
};

struct Matrix {
    ordstat_matrix* m = nullptr;
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
        REQUIRE(ordstat_matrix_create(rows, cols, v.data(), &m) == ORDSTAT_OK);
    }
    ~Matrix() { ordstat_matrix_destroy(m); }
};

int copy_conditional(void*, size_t i, const uint32_t* bins, const uint32_t*, size_t count, double* out,
                     size_t len) {
    for (size_t k = 0; k < len; ++k) out[k] = 0.0;
    if (i == 1) {
        out[0] = out[1] = 0.5;
        return 0;
    }
    if (count != 1) return 1;
    out[bins[0] - 1] = 1.0;
    return 0;
}

int failing_conditional(void* user, size_t, const uint32_t*, const uint32_t*, size_t, double*, size_t) {
    ++*static_cast<int*>(user);
    return 7;
}

} // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(ordstat_version()) == "1.0.0");
    CHECK(std::string(ordstat_status_name(ORDSTAT_OK)) == "ok");
    CHECK(std::string(ordstat_status_name(ORDSTAT_ERR_RESOURCE)) == "resource error");
    CHECK(std::string(ordstat_status_name(static_cast<ordstat_status>(99))) == "unknown status");
}

TEST_CASE("queries") {
    const std::int64_t c[] = {2, 3};
    const double x[] = {0.9, 0.5};
    ordstat_query* q = nullptr;
    REQUIRE(ordstat_query_create(5, c, x, 2, &q) == ORDSTAT_OK);
    CHECK(ordstat_query_n(q) == 5);
    CHECK(ordstat_query_d(q) == 2);
    std::int64_t cc[2];
    double xx[2];
    std::int64_t deltas[2];
    CHECK(ordstat_query_get(q, cc, xx) == ORDSTAT_OK);
    CHECK(cc[1] == 3);
    CHECK(xx[0] == 0.5);
    CHECK(ordstat_query_get(q, nullptr, nullptr) == ORDSTAT_OK);
    CHECK(ordstat_query_deltas(q, deltas) == ORDSTAT_OK);
    CHECK(deltas[0] == 2);
    CHECK(deltas[1] == 1);
    ordstat_query_destroy(q);
    ordstat_query_destroy(nullptr);

    const std::int64_t dup[] = {2, 2};
    ordstat_query* bad = reinterpret_cast<ordstat_query*>(0x1);
    CHECK(ordstat_query_create(5, dup, x, 2, &bad) == ORDSTAT_ERR_VALIDATION);
    CHECK(bad == nullptr);
    CHECK(std::string(ordstat_last_error()).size() > 0);
    const std::int64_t high[] = {6};
    CHECK(ordstat_query_create(5, high, x, 1, &bad) == ORDSTAT_ERR_RANGE);
    CHECK(ordstat_query_create(5, nullptr, x, 1, &bad) == ORDSTAT_ERR_INPUT);
    CHECK(ordstat_query_create(5, c, x, 2, nullptr) == ORDSTAT_ERR_INPUT);
}

TEST_CASE("independent solvers agree on the uniform example") {
    Query q(3, {1, 2}, {1.0 / 3, 2.0 / 3});
    ordstat_dist* u = nullptr;
    REQUIRE(ordstat_dist_uniform(0.0, 1.0, &u) == ORDSTAT_OK);
    double f = 0.0;
    CHECK(ordstat_dist_cdf(u, 0.25, &f) == ORDSTAT_OK);
    CHECK(f == 0.25);
    ordstat_matrix* p = nullptr;
    REQUIRE(ordstat_matrix_from_distributions(q.q, &u, 1, &p) == ORDSTAT_OK);
    CHECK(ordstat_matrix_rows(p) == 3);
    CHECK(ordstat_matrix_cols(p) == 3);

    double spill = 0, boncelet = 0, brute = 0;
    CHECK(ordstat_solve_spill(q.q, p, nullptr, &spill) == ORDSTAT_OK);
    CHECK(ordstat_solve_boncelet(q.q, p, 0, 1, &boncelet) == ORDSTAT_OK);
    CHECK(ordstat_solve_brute(q.q, p, &brute) == ORDSTAT_OK);
    CHECK(std::abs(spill - 16.0 / 27) <= 1e-15);
    CHECK(std::abs(boncelet - spill) <= 1e-15);
    CHECK(std::abs(brute - spill) <= 1e-15);

    ordstat_spill_options o = ordstat_spill_default_options();
    CHECK(o.prune == 1);
    o.precompute_sums = 1;
    o.threads = 2;
    double again = 0;
    CHECK(ordstat_solve_spill(q.q, p, &o, &again) == ORDSTAT_OK);
    CHECK(std::memcmp(&again, &spill, sizeof again) == 0);

    ordstat_mc_result r{};
    CHECK(ordstat_monte_carlo_independent(q.q, &u, 1, 100000, 3, 2, &r) == ORDSTAT_OK);
    CHECK(r.trials == 100000);
    CHECK(std::abs(r.estimate - 16.0 / 27) <= 4 * r.stderr_value);
    ordstat_matrix_destroy(p);
    ordstat_dist_destroy(u);
}

TEST_CASE("distribution constructors") {
    ordstat_dist* d = nullptr;
    CHECK(ordstat_dist_gaussian(0.0, 0.0, &d) == ORDSTAT_ERR_INVALID_DISTRIBUTION);
    CHECK(ordstat_dist_exponential(-1.0, &d) == ORDSTAT_ERR_INVALID_DISTRIBUTION);
    CHECK(ordstat_dist_uniform(2.0, 1.0, &d) == ORDSTAT_ERR_INVALID_DISTRIBUTION);
    const double pts[] = {0.0, 1.0};
    const double ms[] = {0.5, 0.5};
    REQUIRE(ordstat_dist_atoms(pts, ms, 2, &d) == ORDSTAT_OK);
    double f = 0;
    CHECK(ordstat_dist_cdf(d, 0.0, &f) == ORDSTAT_OK);
    CHECK(f == 0.5);
    CHECK(ordstat_dist_cdf(d, std::nan(""), &f) == ORDSTAT_ERR_INPUT);
    ordstat_dist_destroy(d);
    REQUIRE(ordstat_dist_empirical(pts, 2, &d) == ORDSTAT_OK);
    ordstat_dist_destroy(d);
    CHECK(ordstat_dist_empirical(pts, 0, &d) == ORDSTAT_ERR_INVALID_DISTRIBUTION);
}

TEST_CASE("matrix handling") {
    ordstat_matrix* m = nullptr;
    const double bad[] = {0.4, 0.7};
    CHECK(ordstat_matrix_create(1, 2, bad, &m) == ORDSTAT_ERR_INPUT);
    Matrix good(1, 2, {0.4, 0.6});
    double out[2];
    CHECK(ordstat_matrix_get(good.m, out) == ORDSTAT_OK);
    CHECK(out[0] == 0.4);

    Query q(2, {1}, {0.0});
    double v = 0;
    CHECK(ordstat_solve_spill(q.q, good.m, nullptr, &v) == ORDSTAT_ERR_INPUT);
    CHECK(ordstat_solve_spill(nullptr, good.m, nullptr, &v) == ORDSTAT_ERR_INPUT);
    CHECK(ordstat_solve_spill(q.q, nullptr, nullptr, &v) == ORDSTAT_ERR_INPUT);
}

TEST_CASE("resource limits come back as status codes") {
    Query q(30, {1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 6});
    Matrix p(30, 7, std::vector<double>(30 * 7, 1.0 / 7));
    double v = 0;
    CHECK(ordstat_solve_brute(q.q, p.m, &v) == ORDSTAT_ERR_RESOURCE);
    CHECK(ordstat_solve_boncelet(q.q, p.m, 1000, 1, &v) == ORDSTAT_ERR_RESOURCE);
    ordstat_spill_options o = ordstat_spill_default_options();
    o.max_table_entries = 10;
    CHECK(ordstat_solve_spill(q.q, p.m, &o, &v) == ORDSTAT_ERR_RESOURCE);
    CHECK(std::string(ordstat_last_error()).find("entries") != std::string::npos);
}

TEST_CASE("dependent solver through callbacks") {
    Query q(2, {2}, {0.0});
    ordstat_micro* micro = nullptr;
    REQUIRE(ordstat_micro_coarse(q.q, &micro) == ORDSTAT_OK);
    CHECK(ordstat_micro_count(micro) == 2);
    CHECK(ordstat_micro_granularity(micro) == 1);
    const size_t u[] = {1};
    const size_t w[] = {2};
    ordstat_schedule* s = nullptr;
    REQUIRE(ordstat_schedule_create(2, u, w, 1, &s) == ORDSTAT_OK);
    CHECK(ordstat_schedule_max_boundary(s) == 1);

    double v = 0;
    CHECK(ordstat_solve_dependent(q.q, micro, s, copy_conditional, nullptr, nullptr, &v) == ORDSTAT_OK);
    CHECK(v == 0.5);

    int calls = 0;
    CHECK(ordstat_solve_dependent(q.q, micro, s, failing_conditional, &calls, nullptr, &v) ==
          ORDSTAT_ERR_INVALID_CONDITIONAL);
    CHECK(calls >= 1);
    CHECK(ordstat_solve_dependent(q.q, micro, s, nullptr, nullptr, nullptr, &v) == ORDSTAT_ERR_INPUT);

    ordstat_dependent_options o = ordstat_dependent_default_options();
    o.max_table_entries = 1;
    CHECK(ordstat_solve_dependent(q.q, micro, s, copy_conditional, nullptr, &o, &v) == ORDSTAT_ERR_RESOURCE);

    const size_t loop[] = {1};
    ordstat_schedule* bad = nullptr;
    CHECK(ordstat_schedule_create(2, loop, loop, 1, &bad) == ORDSTAT_ERR_INPUT);

    ordstat_micro* fine = nullptr;
    CHECK(ordstat_micro_uniform(q.q, 3, -1.0, 1.0, &fine) == ORDSTAT_OK);
    CHECK(ordstat_micro_count(fine) == 6);
    ordstat_micro_destroy(fine);
    const double support[] = {-1.0, 0.0, 1.0};
    CHECK(ordstat_micro_from_support(q.q, support, 3, &fine) == ORDSTAT_OK);
    CHECK(ordstat_micro_granularity(fine) == 2);
    ordstat_micro_destroy(fine);

    ordstat_schedule_destroy(s);
    ordstat_micro_destroy(micro);
}

TEST_CASE("markov chains") {
    const std::int64_t offsets[] = {-1, 0, 1};
    const double probs[] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    ordstat_chain* chain = nullptr;
    REQUIRE(ordstat_chain_from_steps(offsets, probs, 3, 0, 3, 0, 0, 0, &chain) == ORDSTAT_OK);
    std::int64_t lo = 0, hi = 0;
    CHECK(ordstat_chain_support(chain, &lo, &hi) == ORDSTAT_OK);
    CHECK(lo == -3);
    CHECK(hi == 3);
    Query q(3, {3}, {0.0});
    double exact = 0, paths = 0;
    CHECK(ordstat_solve_chain(chain, q.q, nullptr, &exact) == ORDSTAT_OK);
    CHECK(ordstat_enumerate_paths(chain, q.q, 0, &paths) == ORDSTAT_OK);
    CHECK(std::abs(exact - 13.0 / 27) <= 1e-15);
    CHECK(std::abs(paths - exact) <= 1e-15);
    ordstat_mc_result r{};
    CHECK(ordstat_monte_carlo_chain(chain, q.q, 50000, 1, 1, &r) == ORDSTAT_OK);
    CHECK(std::abs(r.estimate - exact) <= 4 * r.stderr_value);
    CHECK(ordstat_enumerate_paths(chain, q.q, 10, &paths) == ORDSTAT_ERR_RESOURCE);

    Query longer(4, {3}, {0.0});
    CHECK(ordstat_solve_chain(chain, longer.q, nullptr, &exact) == ORDSTAT_ERR_INPUT);
    ordstat_chain_destroy(chain);

    const double bad_probs[] = {0.5, 0.5, 0.5};
    CHECK(ordstat_chain_from_steps(offsets, bad_probs, 3, 0, 3, 0, 0, 0, &chain) == ORDSTAT_ERR_INPUT);

    const double rows[] = {0.5, 0.5, 0.5, 0.5};
    const double first[] = {1.0, 0.0};
    REQUIRE(ordstat_chain_from_matrix(0, 1, rows, first, &chain) == ORDSTAT_OK);
    Query one(2, {1}, {0.0});
    CHECK(ordstat_solve_chain(chain, one.q, nullptr, &exact) == ORDSTAT_OK);
    CHECK(exact == 1.0);
    ordstat_chain_destroy(chain);
}
