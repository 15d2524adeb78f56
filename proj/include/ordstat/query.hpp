#pragma once

// Problem statement for the joint CDF of selected order statistics:
//
//     P(X_(c_1) <= x_1, ..., X_(c_d) <= x_d)
//
// and its ball-and-bin reduction. The thresholds cut the real line into
// d+1 bins I_j = (x_{j-1}, x_j] with x_0 = -inf and x_{d+1} = +inf; the
// event above holds iff at least c_j of the n balls land in bins 1..j for
// every j.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ordstat {

class CdfProvider;

struct OrderQuery {
    std::int64_t n = 0;
    std::vector<std::int64_t> c;  // 1-based, strictly increasing
    std::vector<double> x;        // non-decreasing after canonicalisation

    std::size_t d() const noexcept { return c.size(); }
};

/// Checks the index vector and rewrites x to its suffix-min envelope
/// x'_j = min(x_j, x'_{j+1}). The joint CDF is unchanged by the rewrite
/// because X_(c_j) <= X_(c_k) whenever j < k.
OrderQuery validate_and_canonicalize(std::span<const std::int64_t> c,
                                     std::span<const double> x,
                                     std::int64_t n);

/// Gaps delta_j = c_j - c_{j-1} with c_0 = 0. Each is >= 1.
std::vector<std::int64_t> compute_deltas(const OrderQuery& query);

struct BinSpec {
    std::vector<double> bounds;  // -inf, x_1, ..., x_d, +inf

    std::size_t bin_count() const noexcept { return bounds.size() - 1; }
    /// 1-based bin containing t under the right-closed convention.
    std::size_t locate(double t) const;
};

BinSpec make_bins(const OrderQuery& query);

/// Row-major n x (d+1) matrix of per-variable bin probabilities.
class BinProbabilityMatrix {
public:
    BinProbabilityMatrix() = default;

    /// Validates entries in [0,1] and row sums within 1e-12 of 1. Rows that
    /// are off by at most that much are renormalised.
    BinProbabilityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols_, cols_};
    }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    std::span<const double> data() const noexcept { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// p_{i,j} = F_i(x_j) - F_i(x_{j-1}). `dists` holds either n providers or a
/// single provider shared by every variable.
BinProbabilityMatrix bin_probabilities(const OrderQuery& query,
                                       std::span<const CdfProvider> dists);

} // namespace ordstat
