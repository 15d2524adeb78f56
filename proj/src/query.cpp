#include "ordstat/query.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ordstat/distributions.hpp"
#include "ordstat/error.hpp"

namespace ordstat {

namespace {

constexpr double kRowTolerance = 1e-12;

void normalise_row(std::span<double> row, std::size_t i, ErrorKind kind) {
    double sum = 0.0;
    for (double& v : row) {
        if (!(v >= -kRowTolerance) || v > 1.0 + kRowTolerance) {
            fail(kind, "row " + std::to_string(i + 1) + ": probability " + std::to_string(v) +
                           " outside [0, 1]");
        }
        v = std::clamp(v, 0.0, 1.0);
        sum += v;
    }
    const double gap = std::abs(sum - 1.0);
    if (gap > kRowTolerance) {
        fail(kind, "row " + std::to_string(i + 1) + " sums to " + std::to_string(sum));
    }
    if (gap > 0.0) {
        for (double& v : row) v /= sum;
    }
}

} // namespace

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Range: return "range error";
    case ErrorKind::Input: return "input error";
    case ErrorKind::InvalidDistribution: return "invalid distribution";
    case ErrorKind::InvalidConditional: return "invalid conditional";
    case ErrorKind::Resource: return "resource limit";
    case ErrorKind::Numerical: return "numerical check failed";
    }
    return "error";
}

OrderQuery validate_and_canonicalize(std::span<const std::int64_t> c,
                                     std::span<const double> x,
                                     std::int64_t n) {
    if (c.empty()) fail(ErrorKind::Validation, "at least one order statistic is required");
    if (c.size() != x.size()) {
        fail(ErrorKind::Validation, "index and threshold vectors differ in length (" +
                                        std::to_string(c.size()) + " vs " + std::to_string(x.size()) + ")");
    }
    if (n < 1) fail(ErrorKind::Range, "n must be positive");
    if (static_cast<std::int64_t>(c.size()) > n) {
        fail(ErrorKind::Range, "d = " + std::to_string(c.size()) + " exceeds n = " + std::to_string(n));
    }
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] < 1 || c[j] > n) {
            fail(ErrorKind::Range, "order-statistic index " + std::to_string(c[j]) +
                                       " outside [1, " + std::to_string(n) + "]");
        }
        if (j > 0 && c[j] <= c[j - 1]) {
            fail(ErrorKind::Validation, "order-statistic indices must be strictly increasing");
        }
        if (std::isnan(x[j])) fail(ErrorKind::Validation, "threshold is NaN");
    }

    OrderQuery q;
    q.n = n;
    q.c.assign(c.begin(), c.end());
    q.x.assign(x.begin(), x.end());
    for (std::size_t j = q.x.size() - 1; j-- > 0;) {
        q.x[j] = std::min(q.x[j], q.x[j + 1]);
    }
    return q;
}

std::vector<std::int64_t> compute_deltas(const OrderQuery& query) {
    std::vector<std::int64_t> delta(query.d());
    std::int64_t prev = 0;
    for (std::size_t j = 0; j < query.d(); ++j) {
        delta[j] = query.c[j] - prev;
        prev = query.c[j];
    }
    return delta;
}

BinSpec make_bins(const OrderQuery& query) {
    BinSpec bins;
    bins.bounds.reserve(query.d() + 2);
    bins.bounds.push_back(-std::numeric_limits<double>::infinity());
    bins.bounds.insert(bins.bounds.end(), query.x.begin(), query.x.end());
    bins.bounds.push_back(std::numeric_limits<double>::infinity());
    return bins;
}

std::size_t BinSpec::locate(double t) const {
    // first interior bound >= t; bins are right-closed
    auto it = std::lower_bound(bounds.begin() + 1, bounds.end() - 1, t);
    return static_cast<std::size_t>(it - bounds.begin());
}

BinProbabilityMatrix::BinProbabilityMatrix(std::size_t rows, std::size_t cols,
                                           std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (cols_ < 2) fail(ErrorKind::Input, "bin-probability matrix needs at least two columns");
    if (values_.size() != rows_ * cols_) {
        fail(ErrorKind::Input, "bin-probability matrix has " + std::to_string(values_.size()) +
                                   " entries, expected " + std::to_string(rows_ * cols_));
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        normalise_row({values_.data() + i * cols_, cols_}, i, ErrorKind::Input);
    }
}

BinProbabilityMatrix bin_probabilities(const OrderQuery& query,
                                       std::span<const CdfProvider> dists) {
    const auto n = static_cast<std::size_t>(query.n);
    if (dists.size() != n && dists.size() != 1) {
        fail(ErrorKind::Input, "expected 1 or " + std::to_string(n) + " distributions, got " +
                                   std::to_string(dists.size()));
    }
    const std::size_t d = query.d();
    std::vector<double> values(n * (d + 1));
    std::vector<double> F(d);
    for (std::size_t i = 0; i < n; ++i) {
        const CdfProvider& dist = dists.size() == 1 ? dists[0] : dists[i];
        if (i == 0 || dists.size() != 1) {
            for (std::size_t j = 0; j < d; ++j) {
                F[j] = dist.cdf(query.x[j]);
                if (!(F[j] >= 0.0 && F[j] <= 1.0)) {
                    fail(ErrorKind::InvalidDistribution, "CDF value outside [0, 1]");
                }
                if (j > 0 && F[j] < F[j - 1] - 1e-15) {
                    fail(ErrorKind::InvalidDistribution, "CDF decreases across thresholds");
                }
            }
        }
        double* row = values.data() + i * (d + 1);
        double prev = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = std::max(0.0, F[j] - prev);
            prev = F[j];
        }
        row[d] = std::max(0.0, 1.0 - prev);
        normalise_row({row, d + 1}, i, ErrorKind::InvalidDistribution);
    }
    return BinProbabilityMatrix(n, d + 1, std::move(values));
}

} // namespace ordstat
