#pragma once

// Reference solvers: the full-configuration dynamic program over raw bin
// counts, exhaustive enumeration of bin assignments, and Monte Carlo.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ordstat/distributions.hpp"
#include "ordstat/query.hpp"
#include "ordstat/rng.hpp"

namespace ordstat {

/// Table over raw count vectors k in N^d with sum(k) <= n, laid out in
/// lexicographic order (k_1 most significant).
class ConfigTable {
public:
    ConfigTable(std::size_t d, std::int64_t n, std::size_t max_entries);

    std::size_t size() const noexcept { return values_.size(); }
    std::size_t index(std::span<const std::int64_t> k) const;

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double total() const;

    /// Offset contributed by coordinate j (0-based) holding value v when the
    /// coordinates before it sum to `prefix`.
    std::size_t offset(std::size_t j, std::int64_t prefix, std::int64_t v) const {
        return offsets_[(j * (n_ + 1) + static_cast<std::size_t>(prefix)) * (n_ + 1) +
                        static_cast<std::size_t>(v)];
    }

    std::size_t dims() const noexcept { return d_; }
    std::int64_t n() const noexcept { return n_; }

private:
    std::size_t d_;
    std::int64_t n_;
    std::vector<std::size_t> offsets_;
    std::vector<double> values_;
};

/// Number of count vectors of length d with sum <= n, i.e. C(n+d, d). Returns
/// +inf as a double when it does not fit.
double simplex_entry_count(std::size_t d, std::int64_t n);

struct BonceletOptions {
    std::size_t max_table_entries = 100'000'000;
    unsigned threads = 1;
    std::function<void(std::size_t, const ConfigTable&)> observer;
};

/// Full-configuration recurrence P(C_i = k) = p_{i,d+1} P(C_{i-1} = k)
/// + sum_{j: k_j > 0} p_{i,j} P(C_{i-1} = k - e_j), summed at the end over
/// every k with cumulative counts sum_{i<=j} k_i >= c_j.
double solve_boncelet(const OrderQuery& query, const BinProbabilityMatrix& p,
                      const BonceletOptions& options = {});

inline constexpr double kBruteForceMaxAssignments = 1e7;

/// Sum of prod_i p_{i,a_i} over all (d+1)^n bin assignments that satisfy
/// every bin condition.
double brute_force(const OrderQuery& query, const BinProbabilityMatrix& p);

/// Fills one joint draw of (X_1, ..., X_n).
using JointSampler = std::function<void(CounterRng&, std::span<double>)>;

JointSampler independent_sampler(std::vector<CdfProvider> dists);

/// True when the sorted sample satisfies X_(c_j) <= x_j for all j.
bool satisfies_order_constraints(const OrderQuery& query, std::span<double> values);

struct MonteCarloResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
};

/// Fraction of `trials` seeded draws satisfying the constraints, with
/// stderr sqrt(p(1-p)/trials). Trial t uses CounterRng(seed, t), so the
/// result does not depend on `threads`.
MonteCarloResult monte_carlo(const OrderQuery& query, const JointSampler& sampler,
                             std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

} // namespace ordstat
