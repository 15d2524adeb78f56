#include "ordstat/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include "ordstat/error.hpp"
#include "parallel.hpp"

namespace ordstat {

double simplex_entry_count(std::size_t d, std::int64_t n) {
    // C(n+d, d) as a running product; exact while it stays below 2^53
    double count = 1.0;
    for (std::size_t m = 1; m <= d; ++m) {
        count = count * static_cast<double>(n + static_cast<std::int64_t>(m)) / static_cast<double>(m);
        if (!std::isfinite(count)) return std::numeric_limits<double>::infinity();
    }
    return std::round(count);
}

ConfigTable::ConfigTable(std::size_t d, std::int64_t n, std::size_t max_entries) : d_(d), n_(n) {
    const double count = simplex_entry_count(d, n);
    if (count > static_cast<double>(max_entries)) {
        fail(ErrorKind::Resource, "configuration table needs " + std::to_string(count) +
                                      " entries, cap is " + std::to_string(max_entries));
    }
    const auto N = static_cast<std::size_t>(n);
    // vectors of length m with sum <= r: C(r+m, m), Pascal style
    std::vector<std::vector<std::size_t>> within(d + 1, std::vector<std::size_t>(N + 1, 1));
    for (std::size_t m = 1; m <= d; ++m) {
        std::size_t acc = 0;
        for (std::size_t r = 0; r <= N; ++r) {
            acc += within[m - 1][r];
            within[m][r] = acc;
        }
    }
    offsets_.assign(d * (N + 1) * (N + 1), 0);
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t tail = d - j - 1;
        for (std::size_t s = 0; s <= N; ++s) {
            std::size_t acc = 0;
            for (std::size_t v = 0; s + v <= N; ++v) {
                offsets_[(j * (N + 1) + s) * (N + 1) + v] = acc;
                acc += within[tail][N - s - v];
            }
        }
    }
    values_.assign(static_cast<std::size_t>(count), 0.0);
}

std::size_t ConfigTable::index(std::span<const std::int64_t> k) const {
    if (k.size() != d_) fail(ErrorKind::Input, "count vector has wrong dimension");
    std::size_t idx = 0;
    std::int64_t prefix = 0;
    for (std::size_t j = 0; j < d_; ++j) {
        if (k[j] < 0 || prefix + k[j] > n_) fail(ErrorKind::Input, "count vector outside the simplex");
        idx += offset(j, prefix, k[j]);
        prefix += k[j];
    }
    return idx;
}

double ConfigTable::total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

namespace {

std::vector<std::int64_t> decode_config(const ConfigTable& t, std::size_t index) {
    std::vector<std::int64_t> k(t.dims(), 0);
    std::int64_t prefix = 0;
    for (std::size_t j = 0; j < t.dims(); ++j) {
        std::int64_t v = 0;
        while (prefix + v + 1 <= t.n() && t.offset(j, prefix, v + 1) <= index) ++v;
        index -= t.offset(j, prefix, v);
        k[j] = v;
        prefix += v;
    }
    return k;
}

void check_matrix(const OrderQuery& query, const BinProbabilityMatrix& p) {
    if (p.rows() != static_cast<std::size_t>(query.n) || p.cols() != query.d() + 1) {
        fail(ErrorKind::Input, "bin-probability matrix is " + std::to_string(p.rows()) + "x" +
                                   std::to_string(p.cols()) + ", query needs " + std::to_string(query.n) +
                                   "x" + std::to_string(query.d() + 1));
    }
}

} // namespace

double solve_boncelet(const OrderQuery& query, const BinProbabilityMatrix& p,
                      const BonceletOptions& options) {
    check_matrix(query, p);
    const std::size_t d = query.d();
    const std::int64_t n = query.n;
    ConfigTable prev(d, n, options.max_table_entries);
    ConfigTable next(d, n, options.max_table_entries);
    prev[0] = 1.0;

    for (std::size_t i = 1; i <= p.rows(); ++i) {
        const auto row = p.row(i - 1);
        const auto balls = static_cast<std::int64_t>(i);
        detail::parallel_chunks(prev.size(), options.threads, [&](std::size_t begin, std::size_t end) {
            std::vector<std::int64_t> k = decode_config(prev, begin);
            std::vector<std::int64_t> before(d);  // sum of k_0..k_{j-1}
            std::vector<std::size_t> head(d + 1);   // rank contribution of coordinates < j
            std::vector<std::size_t> shifted(d + 1); // coordinates > j with one ball fewer before them
            std::int64_t sum = 0;
            for (std::int64_t v : k) sum += v;

            for (std::size_t idx = begin; idx < end; ++idx) {
                if (sum > balls) {
                    next[idx] = 0.0;
                } else {
                    std::int64_t s = 0;
                    head[0] = 0;
                    for (std::size_t j = 0; j < d; ++j) {
                        before[j] = s;
                        head[j + 1] = head[j] + prev.offset(j, s, k[j]);
                        s += k[j];
                    }
                    shifted[d] = 0;
                    for (std::size_t j = d; j-- > 0;) {
                        const std::size_t term = before[j] > 0 ? prev.offset(j, before[j] - 1, k[j]) : 0;
                        shifted[j] = shifted[j + 1] + term;
                    }
                    double value = row[d] * prev[idx];
                    for (std::size_t j = 0; j < d; ++j) {
                        if (k[j] > 0) {
                            const std::size_t src =
                                head[j] + prev.offset(j, before[j], k[j] - 1) + shifted[j + 1];
                            value += row[j] * prev[src];
                        }
                    }
                    next[idx] = value;
                }
                // lexicographic successor within sum(k) <= n, last coordinate fastest
                for (std::size_t j = d; j-- > 0;) {
                    if (sum < n) {
                        ++k[j];
                        ++sum;
                        break;
                    }
                    sum -= k[j];
                    k[j] = 0;
                }
            }
        });
        std::swap(prev, next);
        if (options.observer) options.observer(i, prev);
    }

    // accept k with cumulative counts k_1 + ... + k_j >= c_j for every j
    double result = 0.0;
    std::vector<std::int64_t> k(d, 0);
    std::int64_t sum = 0;
    for (std::size_t idx = 0; idx < prev.size(); ++idx) {
        std::int64_t cum = 0;
        bool ok = true;
        for (std::size_t j = 0; j < d && ok; ++j) {
            cum += k[j];
            ok = cum >= query.c[j];
        }
        if (ok) result += prev[idx];
        for (std::size_t j = d; j-- > 0;) {
            if (sum < n) {
                ++k[j];
                ++sum;
                break;
            }
            sum -= k[j];
            k[j] = 0;
        }
    }
    return result;
}

double brute_force(const OrderQuery& query, const BinProbabilityMatrix& p) {
    check_matrix(query, p);
    const std::size_t d = query.d();
    const auto n = static_cast<std::size_t>(query.n);
    if (static_cast<double>(n) * std::log10(static_cast<double>(d + 1)) > std::log10(kBruteForceMaxAssignments) + 1e-12) {
        fail(ErrorKind::Resource, "brute force needs " + std::to_string(d + 1) + "^" + std::to_string(n) +
                                      " assignments, cap is 1e7");
    }
    std::vector<std::int64_t> counts(d + 1, 0);
    double total = 0.0;

    auto recurse = [&](auto&& self, std::size_t i, double weight) -> void {
        if (weight == 0.0) return;
        if (i == n) {
            std::int64_t cum = 0;
            for (std::size_t j = 0; j < d; ++j) {
                cum += counts[j];
                if (cum < query.c[j]) return;
            }
            total += weight;
            return;
        }
        for (std::size_t j = 0; j <= d; ++j) {
            ++counts[j];
            self(self, i + 1, weight * p(i, j));
            --counts[j];
        }
    };
    recurse(recurse, 0, 1.0);
    return total;
}

JointSampler independent_sampler(std::vector<CdfProvider> dists) {
    if (dists.empty()) fail(ErrorKind::Input, "sampler needs at least one distribution");
    return [dists = std::move(dists)](CounterRng& rng, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = dists[dists.size() == 1 ? 0 : i].sample(rng);
        }
    };
}

bool satisfies_order_constraints(const OrderQuery& query, std::span<double> values) {
    std::sort(values.begin(), values.end());
    for (std::size_t j = 0; j < query.d(); ++j) {
        if (!(values[static_cast<std::size_t>(query.c[j] - 1)] <= query.x[j])) return false;
    }
    return true;
}

MonteCarloResult monte_carlo(const OrderQuery& query, const JointSampler& sampler,
                             std::uint64_t trials, std::uint64_t seed, unsigned threads) {
    if (trials < 1) fail(ErrorKind::Input, "monte carlo needs at least one trial");
    std::atomic<std::uint64_t> hits{0};
    detail::parallel_chunks(
        trials, threads,
        [&](std::size_t begin, std::size_t end) {
            std::vector<double> buf(static_cast<std::size_t>(query.n));
            std::uint64_t local = 0;
            for (std::size_t t = begin; t < end; ++t) {
                CounterRng rng(seed, t);
                sampler(rng, buf);
                if (satisfies_order_constraints(query, buf)) ++local;
            }
            hits += local;
        },
        256);
    MonteCarloResult r;
    r.trials = trials;
    r.hits = hits.load();
    r.estimate = static_cast<double>(r.hits) / static_cast<double>(trials);
    r.stderr_ = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials));
    return r;
}

} // namespace ordstat
