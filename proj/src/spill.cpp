#include "ordstat/spill.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "ordstat/error.hpp"
#include "parallel.hpp"

namespace ordstat {

MixedRadix::MixedRadix(std::span<const std::int64_t> deltas, std::size_t max_entries) {
    radix_.reserve(deltas.size());
    stride_.reserve(deltas.size());
    double logical = 1.0;
    for (std::int64_t delta : deltas) {
        if (delta < 0) fail(ErrorKind::Input, "negative spill capacity");
        logical *= static_cast<double>(delta + 1);
        if (logical > static_cast<double>(max_entries)) {
            fail(ErrorKind::Resource, "spill table would exceed " + std::to_string(max_entries) + " entries");
        }
        stride_.push_back(size_);
        radix_.push_back(delta + 1);
        size_ *= static_cast<std::size_t>(delta + 1);
    }
}

std::size_t MixedRadix::index(std::span<const std::int64_t> state) const {
    if (state.size() != radix_.size()) fail(ErrorKind::Input, "spill state has wrong dimension");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < state.size(); ++j) {
        if (state[j] < 0 || state[j] >= radix_[j]) fail(ErrorKind::Input, "spill state out of range");
        idx += static_cast<std::size_t>(state[j]) * stride_[j];
    }
    return idx;
}

SpillState MixedRadix::decode(std::size_t index) const {
    SpillState state(radix_.size());
    for (std::size_t j = 0; j < radix_.size(); ++j) {
        state[j] = static_cast<std::int64_t>(index % static_cast<std::size_t>(radix_[j]));
        index /= static_cast<std::size_t>(radix_[j]);
    }
    return state;
}

SpillTable::SpillTable(std::vector<std::int64_t> deltas, std::size_t max_entries)
    : deltas_(std::move(deltas)), layout_(deltas_, max_entries), values_(layout_.size(), 0.0) {}

SpillTable SpillTable::initial(std::vector<std::int64_t> deltas, std::size_t max_entries) {
    SpillTable t(std::move(deltas), max_entries);
    t.values_[0] = 1.0;
    return t;
}

double SpillTable::total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

SpillState spill_transform(std::span<const std::int64_t> k, std::span<const std::int64_t> deltas) {
    if (k.size() != deltas.size()) fail(ErrorKind::Input, "count vector and deltas differ in length");
    for (std::int64_t v : k) {
        if (v < 0) fail(ErrorKind::Input, "bin counts must be non-negative");
    }
    const std::size_t d = k.size();
    SpillState s(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::int64_t best = 0;
        std::int64_t balls = 0;
        std::int64_t capacity = 0;
        // j' runs from j down to 0: balls in bins j'..j minus the capacity of j'..j-1
        for (std::size_t jp = j + 1; jp-- > 0;) {
            balls += k[jp];
            if (jp < j) capacity += deltas[jp];
            best = std::max(best, balls - capacity);
        }
        s[j] = std::min(deltas[j], best);
    }
    return s;
}

std::vector<std::size_t> BinRange::bins() const {
    std::vector<std::size_t> out;
    for (std::size_t j = first; j <= last; ++j) out.push_back(j);
    return out;
}

BinRange sigma(std::size_t j, std::span<const std::int64_t> kappa,
               std::span<const std::int64_t> deltas) {
    if (j < 1 || j > deltas.size() + 1) fail(ErrorKind::Input, "sigma: target bin out of range");
    std::size_t first = j;
    while (first > 1 && kappa[first - 2] == deltas[first - 2]) --first;
    return {first, j};
}

namespace {

// Sum of p over the 1-based bin range [first, last], ascending.
double run_sum(std::span<const double> p, std::size_t first, std::size_t last) {
    double acc = p[first - 1];
    for (std::size_t t = first + 1; t <= last; ++t) acc += p[t - 1];
    return acc;
}

} // namespace

SpillTable spill_step(const SpillTable& prev, std::span<const double> p_row,
                      const SpillStepOptions& options) {
    const auto& deltas = prev.deltas();
    const std::size_t d = deltas.size();
    if (p_row.size() != d + 1) {
        fail(ErrorKind::Input, "probability row has " + std::to_string(p_row.size()) +
                                   " entries, expected " + std::to_string(d + 1));
    }
    const MixedRadix& layout = prev.layout();
    SpillTable next(deltas, layout.size());

    // runs[(first-1)*(d+1) + (last-1)] = p_first + ... + p_last, same order as run_sum
    std::vector<double> runs;
    if (options.precompute_sums) {
        runs.assign((d + 1) * (d + 1), 0.0);
        for (std::size_t first = 1; first <= d + 1; ++first) {
            double acc = p_row[first - 1];
            runs[(first - 1) * (d + 1) + (first - 1)] = acc;
            for (std::size_t last = first + 1; last <= d + 1; ++last) {
                acc += p_row[last - 1];
                runs[(first - 1) * (d + 1) + (last - 1)] = acc;
            }
        }
    }

    std::int64_t capacity = 0;
    for (std::int64_t v : deltas) capacity += v;
    const bool prune = options.remaining_balls.has_value();
    const std::int64_t remaining = options.remaining_balls.value_or(0);

    detail::parallel_chunks(layout.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        SpillState kappa = layout.decode(begin);
        std::int64_t filled = 0;
        for (std::int64_t v : kappa) filled += v;
        std::vector<std::size_t> first(d + 2, 1);

        for (std::size_t idx = begin; idx < end; ++idx) {
            if (!prune || capacity - filled <= remaining) {
                double value;
                if (options.precompute_sums) {
                    first[1] = 1;
                    for (std::size_t j = 2; j <= d + 1; ++j) {
                        first[j] = kappa[j - 2] == deltas[j - 2] ? first[j - 1] : j;
                    }
                    value = runs[(first[d + 1] - 1) * (d + 1) + d] * prev[idx];
                    for (std::size_t j = 1; j <= d; ++j) {
                        if (kappa[j - 1] > 0) {
                            value += prev[idx - layout.stride(j - 1)] *
                                     runs[(first[j] - 1) * (d + 1) + (j - 1)];
                        }
                    }
                } else {
                    const BinRange tail = sigma(d + 1, kappa, deltas);
                    value = run_sum(p_row, tail.first, tail.last) * prev[idx];
                    for (std::size_t j = 1; j <= d; ++j) {
                        if (kappa[j - 1] > 0) {
                            const BinRange r = sigma(j, kappa, deltas);
                            value += prev[idx - layout.stride(j - 1)] * run_sum(p_row, r.first, r.last);
                        }
                    }
                }
                next[idx] = value;
            }
            // advance the odometer, kappa_1 fastest
            for (std::size_t j = 0; j < d; ++j) {
                if (kappa[j] < deltas[j]) {
                    ++kappa[j];
                    ++filled;
                    break;
                }
                filled -= kappa[j];
                kappa[j] = 0;
            }
        }
    });
    return next;
}

double solve_independent(const OrderQuery& query, const BinProbabilityMatrix& p,
                         const SpillOptions& options) {
    const std::size_t d = query.d();
    if (p.rows() != static_cast<std::size_t>(query.n) || p.cols() != d + 1) {
        fail(ErrorKind::Input, "bin-probability matrix is " + std::to_string(p.rows()) + "x" +
                                   std::to_string(p.cols()) + ", query needs " + std::to_string(query.n) +
                                   "x" + std::to_string(d + 1));
    }
    SpillTable table = SpillTable::initial(compute_deltas(query), options.max_table_entries);
    SpillStepOptions step;
    step.precompute_sums = options.precompute_sums;
    step.threads = options.threads;
    for (std::size_t i = 1; i <= p.rows(); ++i) {
        if (options.prune) step.remaining_balls = query.n - static_cast<std::int64_t>(i);
        table = spill_step(table, p.row(i - 1), step);
        if (options.observer) options.observer(i, table);
    }
    return table.accepting();
}

} // namespace ordstat
