#include "ordstat/ordstat.h"

#include <algorithm>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ordstat/baselines.hpp"
#include "ordstat/dependent.hpp"
#include "ordstat/distributions.hpp"
#include "ordstat/error.hpp"
#include "ordstat/markov_chain.hpp"
#include "ordstat/query.hpp"
#include "ordstat/spill.hpp"

struct ordstat_query {
    ordstat::OrderQuery q;
};
struct ordstat_dist {
    ordstat::CdfProvider d;
};
struct ordstat_matrix {
    ordstat::BinProbabilityMatrix m;
};
struct ordstat_chain {
    ordstat::MarkovChain c;
};
struct ordstat_schedule {
    ordstat::DependencySchedule s;
};
struct ordstat_micro {
    ordstat::MicroBinSpec m;
};

namespace {

thread_local std::string last_error;

ordstat_status status_of(ordstat::ErrorKind kind) {
    switch (kind) {
    case ordstat::ErrorKind::Validation: return ORDSTAT_ERR_VALIDATION;
    case ordstat::ErrorKind::Range: return ORDSTAT_ERR_RANGE;
    case ordstat::ErrorKind::Input: return ORDSTAT_ERR_INPUT;
    case ordstat::ErrorKind::InvalidDistribution: return ORDSTAT_ERR_INVALID_DISTRIBUTION;
    case ordstat::ErrorKind::InvalidConditional: return ORDSTAT_ERR_INVALID_CONDITIONAL;
    case ordstat::ErrorKind::Resource: return ORDSTAT_ERR_RESOURCE;
    case ordstat::ErrorKind::Numerical: return ORDSTAT_ERR_NUMERICAL;
    }
    return ORDSTAT_ERR_INTERNAL;
}

template <typename Fn>
ordstat_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        last_error.clear();
        return ORDSTAT_OK;
    } catch (const ordstat::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return ORDSTAT_ERR_RESOURCE;
    } catch (const std::exception& e) {
        last_error = e.what();
        return ORDSTAT_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return ORDSTAT_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (p == nullptr) ordstat::fail(ordstat::ErrorKind::Input, std::string(what) + " is null");
}

template <typename T>
std::vector<T> copy_array(const T* data, std::size_t count, const char* what) {
    if (count > 0) need(data, what);
    return count > 0 ? std::vector<T>(data, data + count) : std::vector<T>{};
}

std::vector<ordstat::CdfProvider> providers(const ordstat_dist* const* dists, std::size_t count) {
    if (count > 0) need(dists, "dists");
    std::vector<ordstat::CdfProvider> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        need(dists[k], "distribution handle");
        out.push_back(dists[k]->d);
    }
    return out;
}

ordstat::DependentOptions dependent_options(const ordstat_dependent_options* options) {
    const ordstat_dependent_options o = options ? *options : ordstat_dependent_default_options();
    ordstat::DependentOptions opts;
    opts.prune = o.prune != 0;
    opts.threads = o.threads;
    if (o.max_table_entries != 0) opts.max_table_entries = o.max_table_entries;
    return opts;
}

void fill_mc(const ordstat::MonteCarloResult& r, ordstat_mc_result* out) {
    out->estimate = r.estimate;
    out->stderr_value = r.stderr_;
    out->hits = r.hits;
    out->trials = r.trials;
}

template <typename Handle, typename Value>
void make_handle(Handle** out, Value&& value) {
    need(out, "out");
    *out = new Handle{std::forward<Value>(value)};
}

} // namespace

extern "C" {

const char* ordstat_version(void) { return "1.0.0"; }

const char* ordstat_last_error(void) { return last_error.c_str(); }

const char* ordstat_status_name(ordstat_status status) {
    switch (status) {
    case ORDSTAT_OK: return "ok";
    case ORDSTAT_ERR_VALIDATION: return "validation error";
    case ORDSTAT_ERR_RANGE: return "range error";
    case ORDSTAT_ERR_INPUT: return "input error";
    case ORDSTAT_ERR_INVALID_DISTRIBUTION: return "invalid distribution";
    case ORDSTAT_ERR_INVALID_CONDITIONAL: return "invalid conditional";
    case ORDSTAT_ERR_RESOURCE: return "resource error";
    case ORDSTAT_ERR_NUMERICAL: return "numerical error";
    case ORDSTAT_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

// ---- query ----

ordstat_status ordstat_query_create(int64_t n, const int64_t* c, const double* x, size_t d,
                                    ordstat_query** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        const auto cv = copy_array(c, d, "c");
        const auto xv = copy_array(x, d, "x");
        make_handle(out, ordstat::validate_and_canonicalize(cv, xv, n));
    });
}

void ordstat_query_destroy(ordstat_query* query) { delete query; }

int64_t ordstat_query_n(const ordstat_query* query) { return query ? query->q.n : 0; }

size_t ordstat_query_d(const ordstat_query* query) { return query ? query->q.d() : 0; }

ordstat_status ordstat_query_get(const ordstat_query* query, int64_t* c, double* x) {
    return guarded([&] {
        need(query, "query");
        for (std::size_t j = 0; j < query->q.d(); ++j) {
            if (c) c[j] = query->q.c[j];
            if (x) x[j] = query->q.x[j];
        }
    });
}

ordstat_status ordstat_query_deltas(const ordstat_query* query, int64_t* out) {
    return guarded([&] {
        need(query, "query");
        need(out, "out");
        const auto deltas = ordstat::compute_deltas(query->q);
        std::copy(deltas.begin(), deltas.end(), out);
    });
}

// ---- distributions ----

ordstat_status ordstat_dist_uniform(double a, double b, ordstat_dist** out) {
    return guarded([&] { make_handle(out, ordstat::CdfProvider(ordstat::Uniform{a, b})); });
}

ordstat_status ordstat_dist_gaussian(double mean, double sigma, ordstat_dist** out) {
    return guarded([&] { make_handle(out, ordstat::CdfProvider(ordstat::Gaussian{mean, sigma})); });
}

ordstat_status ordstat_dist_exponential(double rate, ordstat_dist** out) {
    return guarded([&] { make_handle(out, ordstat::CdfProvider(ordstat::Exponential{rate})); });
}

ordstat_status ordstat_dist_atoms(const double* points, const double* masses, size_t count, ordstat_dist** out) {
    return guarded([&] {
        ordstat::DiscreteAtoms atoms{copy_array(points, count, "points"), copy_array(masses, count, "masses")};
        make_handle(out, ordstat::CdfProvider(std::move(atoms)));
    });
}

ordstat_status ordstat_dist_empirical(const double* samples, size_t count, ordstat_dist** out) {
    return guarded([&] {
        make_handle(out, ordstat::CdfProvider(ordstat::Empirical{copy_array(samples, count, "samples")}));
    });
}

void ordstat_dist_destroy(ordstat_dist* dist) { delete dist; }

ordstat_status ordstat_dist_cdf(const ordstat_dist* dist, double t, double* out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        *out = dist->d.cdf(t);
    });
}

// ---- matrix ----

ordstat_status ordstat_matrix_create(size_t rows, size_t cols, const double* values, ordstat_matrix** out) {
    return guarded([&] {
        make_handle(out, ordstat::BinProbabilityMatrix(rows, cols, copy_array(values, rows * cols, "values")));
    });
}

ordstat_status ordstat_matrix_from_distributions(const ordstat_query* query, const ordstat_dist* const* dists,
                                                 size_t count, ordstat_matrix** out) {
    return guarded([&] {
        need(query, "query");
        const auto provs = providers(dists, count);
        make_handle(out, ordstat::bin_probabilities(query->q, provs));
    });
}

void ordstat_matrix_destroy(ordstat_matrix* matrix) { delete matrix; }

size_t ordstat_matrix_rows(const ordstat_matrix* matrix) { return matrix ? matrix->m.rows() : 0; }

size_t ordstat_matrix_cols(const ordstat_matrix* matrix) { return matrix ? matrix->m.cols() : 0; }

ordstat_status ordstat_matrix_get(const ordstat_matrix* matrix, double* out) {
    return guarded([&] {
        need(matrix, "matrix");
        need(out, "out");
        const auto data = matrix->m.data();
        std::copy(data.begin(), data.end(), out);
    });
}

// ---- independent solvers ----

ordstat_spill_options ordstat_spill_default_options(void) { return {1, 0, 1, 0}; }

ordstat_status ordstat_solve_spill(const ordstat_query* query, const ordstat_matrix* p,
                                   const ordstat_spill_options* options, double* out) {
    return guarded([&] {
        need(query, "query");
        need(p, "matrix");
        need(out, "out");
        const ordstat_spill_options o = options ? *options : ordstat_spill_default_options();
        ordstat::SpillOptions opts;
        opts.prune = o.prune != 0;
        opts.precompute_sums = o.precompute_sums != 0;
        opts.threads = o.threads;
        if (o.max_table_entries != 0) opts.max_table_entries = o.max_table_entries;
        *out = ordstat::solve_independent(query->q, p->m, opts);
    });
}

ordstat_status ordstat_solve_boncelet(const ordstat_query* query, const ordstat_matrix* p,
                                      size_t max_table_entries, unsigned threads, double* out) {
    return guarded([&] {
        need(query, "query");
        need(p, "matrix");
        need(out, "out");
        ordstat::BonceletOptions opts;
        if (max_table_entries != 0) opts.max_table_entries = max_table_entries;
        opts.threads = threads;
        *out = ordstat::solve_boncelet(query->q, p->m, opts);
    });
}

ordstat_status ordstat_solve_brute(const ordstat_query* query, const ordstat_matrix* p, double* out) {
    return guarded([&] {
        need(query, "query");
        need(p, "matrix");
        need(out, "out");
        *out = ordstat::brute_force(query->q, p->m);
    });
}

ordstat_status ordstat_monte_carlo_independent(const ordstat_query* query, const ordstat_dist* const* dists,
                                               size_t count, uint64_t trials, uint64_t seed, unsigned threads,
                                               ordstat_mc_result* out) {
    return guarded([&] {
        need(query, "query");
        need(out, "out");
        auto provs = providers(dists, count);
        if (provs.size() != 1 && provs.size() != static_cast<std::size_t>(query->q.n)) {
            ordstat::fail(ordstat::ErrorKind::Input, "need 1 or n distributions");
        }
        const auto sampler = ordstat::independent_sampler(std::move(provs));
        fill_mc(ordstat::monte_carlo(query->q, sampler, trials, seed, threads), out);
    });
}

// ---- dependent ----

ordstat_status ordstat_schedule_create(size_t n, const size_t* edge_u, const size_t* edge_v, size_t edge_count,
                                       ordstat_schedule** out) {
    return guarded([&] {
        const auto u = copy_array(edge_u, edge_count, "edge_u");
        const auto v = copy_array(edge_v, edge_count, "edge_v");
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t k = 0; k < edge_count; ++k) edges.emplace_back(u[k], v[k]);
        make_handle(out, ordstat::boundary_sets(n, edges));
    });
}

void ordstat_schedule_destroy(ordstat_schedule* schedule) { delete schedule; }

size_t ordstat_schedule_max_boundary(const ordstat_schedule* schedule) {
    return schedule ? schedule->s.max_boundary() : 0;
}

ordstat_status ordstat_micro_coarse(const ordstat_query* query, ordstat_micro** out) {
    return guarded([&] {
        need(query, "query");
        make_handle(out, ordstat::MicroBinSpec::coarse(query->q));
    });
}

ordstat_status ordstat_micro_uniform(const ordstat_query* query, size_t H, double outer_lo, double outer_hi,
                                     ordstat_micro** out) {
    return guarded([&] {
        need(query, "query");
        make_handle(out, ordstat::MicroBinSpec::uniform(query->q, H, outer_lo, outer_hi));
    });
}

ordstat_status ordstat_micro_from_support(const ordstat_query* query, const double* support, size_t count,
                                          ordstat_micro** out) {
    return guarded([&] {
        need(query, "query");
        const auto pts = copy_array(support, count, "support");
        make_handle(out, ordstat::MicroBinSpec::from_support(query->q, pts));
    });
}

void ordstat_micro_destroy(ordstat_micro* micro) { delete micro; }

size_t ordstat_micro_count(const ordstat_micro* micro) { return micro ? micro->m.count() : 0; }

size_t ordstat_micro_granularity(const ordstat_micro* micro) { return micro ? micro->m.granularity() : 0; }

ordstat_dependent_options ordstat_dependent_default_options(void) { return {1, 1, 0}; }

ordstat_status ordstat_solve_dependent(const ordstat_query* query, const ordstat_micro* micro,
                                       const ordstat_schedule* schedule, ordstat_conditional_fn conditional,
                                       void* user, const ordstat_dependent_options* options, double* out) {
    return guarded([&] {
        need(query, "query");
        need(micro, "micro");
        need(schedule, "schedule");
        need(out, "out");
        if (conditional == nullptr) ordstat::fail(ordstat::ErrorKind::Input, "conditional callback is null");
        const std::size_t M = micro->m.count();
        ordstat::ConditionalProvider cond = [conditional, user, M](std::size_t i,
                                                                   std::span<const ordstat::MicroBin> nbr) {
            std::vector<std::uint32_t> bins(nbr.size());
            std::vector<std::uint32_t> micros(nbr.size());
            for (std::size_t k = 0; k < nbr.size(); ++k) {
                bins[k] = nbr[k].bin;
                micros[k] = nbr[k].micro;
            }
            std::vector<double> row(M, 0.0);
            if (conditional(user, i, bins.data(), micros.data(), nbr.size(), row.data(), M) != 0) {
                ordstat::fail(ordstat::ErrorKind::InvalidConditional,
                              "conditional callback failed for variable " + std::to_string(i));
            }
            return row;
        };
        *out = ordstat::solve_dependent(query->q, micro->m, schedule->s, cond, dependent_options(options));
    });
}

// ---- Markov chains ----

ordstat_status ordstat_chain_from_steps(const int64_t* offsets, const double* probs, size_t count,
                                        int64_t initial, size_t n, int has_truncation, int64_t lo, int64_t hi,
                                        ordstat_chain** out) {
    return guarded([&] {
        const auto off = copy_array(offsets, count, "offsets");
        const auto pr = copy_array(probs, count, "probs");
        std::optional<std::pair<std::int64_t, std::int64_t>> trunc;
        if (has_truncation) trunc = std::make_pair(lo, hi);
        make_handle(out, ordstat::MarkovChain::from_steps(off, pr, initial, n, trunc));
    });
}

ordstat_status ordstat_chain_from_matrix(int64_t lower, int64_t upper, const double* rows, const double* first,
                                         ordstat_chain** out) {
    return guarded([&] {
        if (lower > upper) ordstat::fail(ordstat::ErrorKind::Input, "chain support is empty");
        const double size_d = static_cast<double>(upper) - static_cast<double>(lower) + 1.0;
        if (size_d > 1e6) ordstat::fail(ordstat::ErrorKind::Resource, "chain support exceeds 1e6 states");
        const auto size = static_cast<std::size_t>(size_d);
        const auto r = copy_array(rows, size * size, "rows");
        const auto f = copy_array(first, size, "first");
        make_handle(out, ordstat::MarkovChain::from_matrix(lower, upper, r, f));
    });
}

void ordstat_chain_destroy(ordstat_chain* chain) { delete chain; }

ordstat_status ordstat_chain_support(const ordstat_chain* chain, int64_t* lower, int64_t* upper) {
    return guarded([&] {
        need(chain, "chain");
        if (lower) *lower = chain->c.lower();
        if (upper) *upper = chain->c.upper();
    });
}

ordstat_status ordstat_solve_chain(const ordstat_chain* chain, const ordstat_query* query,
                                   const ordstat_dependent_options* options, double* out) {
    return guarded([&] {
        need(chain, "chain");
        need(query, "query");
        need(out, "out");
        *out = ordstat::solve_chain(chain->c, query->q, dependent_options(options));
    });
}

ordstat_status ordstat_enumerate_paths(const ordstat_chain* chain, const ordstat_query* query, double max_paths,
                                       double* out) {
    return guarded([&] {
        need(chain, "chain");
        need(query, "query");
        need(out, "out");
        *out = ordstat::enumerate_paths_oracle(chain->c, query->q, max_paths > 0.0 ? max_paths : 1e7);
    });
}

ordstat_status ordstat_monte_carlo_chain(const ordstat_chain* chain, const ordstat_query* query,
                                         uint64_t trials, uint64_t seed, unsigned threads, ordstat_mc_result* out) {
    return guarded([&] {
        need(chain, "chain");
        need(query, "query");
        need(out, "out");
        if (chain->c.horizon() != 0 && static_cast<std::size_t>(query->q.n) > chain->c.horizon()) {
            ordstat::fail(ordstat::ErrorKind::Input, "chain support was sized for fewer steps than n");
        }
        fill_mc(ordstat::monte_carlo(query->q, chain->c.sampler(), trials, seed, threads), out);
    });
}

} // extern "C"
