#pragma once

// Compressed ball-and-bin dynamic program for independent variables.
//
// Raw bin counts k are mapped to a spill state kappa in
// {0..delta_1} x ... x {0..delta_d}: bin j keeps at most delta_j balls and
// any overflow cascades into bin j+1 (and past bin d it is dropped). All
// bin conditions hold exactly when the spill state is full, kappa = delta,
// so the answer is the probability mass of that single state after n balls.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ordstat/query.hpp"

namespace ordstat {

using SpillState = std::vector<std::int64_t>;

inline constexpr std::size_t kDefaultMaxTableEntries = 100'000'000;

/// Mixed-radix addressing over {0..delta_1} x ... x {0..delta_d} with
/// kappa_1 the fastest-varying digit.
class MixedRadix {
public:
    MixedRadix() = default;
    MixedRadix(std::span<const std::int64_t> deltas, std::size_t max_entries);

    std::size_t size() const noexcept { return size_; }
    std::size_t dims() const noexcept { return radix_.size(); }
    std::size_t stride(std::size_t j) const noexcept { return stride_[j]; }
    std::int64_t radix(std::size_t j) const noexcept { return radix_[j]; }

    std::size_t index(std::span<const std::int64_t> state) const;
    SpillState decode(std::size_t index) const;

private:
    std::vector<std::int64_t> radix_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 1;
};

/// Dense probability table over spill states.
class SpillTable {
public:
    explicit SpillTable(std::vector<std::int64_t> deltas,
                        std::size_t max_entries = kDefaultMaxTableEntries);

    /// Unit mass on the all-zero state (no balls thrown yet).
    static SpillTable initial(std::vector<std::int64_t> deltas,
                              std::size_t max_entries = kDefaultMaxTableEntries);

    const std::vector<std::int64_t>& deltas() const noexcept { return deltas_; }
    const MixedRadix& layout() const noexcept { return layout_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator[](std::size_t index) const { return values_[index]; }
    double& operator[](std::size_t index) { return values_[index]; }
    double at(std::span<const std::int64_t> state) const { return values_[layout_.index(state)]; }

    /// Mass of the accepting state kappa = delta (the last index).
    double accepting() const { return values_.back(); }
    double total() const;

    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<std::int64_t> deltas_;
    MixedRadix layout_;
    std::vector<double> values_;
};

/// S_j(k) = min(delta_j, max(0, max_{j' <= j} (sum_{i=j'}^{j} k_i - sum_{i=j'}^{j-1} delta_i))).
SpillState spill_transform(std::span<const std::int64_t> k, std::span<const std::int64_t> deltas);

/// Contiguous 1-based bin range [first, last].
struct BinRange {
    std::size_t first = 1;
    std::size_t last = 1;

    bool contains(std::size_t j) const noexcept { return first <= j && j <= last; }
    std::vector<std::size_t> bins() const;

    friend bool operator==(const BinRange&, const BinRange&) = default;
};

/// Bins from which a new ball ends up in bin j (j in [1, d+1]) given spill
/// state kappa: j itself plus the run of full bins immediately to its left.
BinRange sigma(std::size_t j, std::span<const std::int64_t> kappa,
               std::span<const std::int64_t> deltas);

struct SpillStepOptions {
    /// Balls still to be thrown after this step. When set, states whose
    /// deficit sum_j (delta_j - kappa_j) exceeds it are left at zero.
    std::optional<std::int64_t> remaining_balls;
    /// Tabulate the run sums sum_{j' in [first, last]} p_{j'} once per step
    /// instead of re-summing them for every state.
    bool precompute_sums = false;
    unsigned threads = 1;
};

/// One application of the recurrence: distribution of the spill state after
/// one more ball with bin probabilities p_row (length d+1).
SpillTable spill_step(const SpillTable& prev, std::span<const double> p_row,
                      const SpillStepOptions& options = {});

struct SpillOptions {
    bool prune = true;
    bool precompute_sums = false;
    unsigned threads = 1;
    std::size_t max_table_entries = kDefaultMaxTableEntries;
    /// Called with (i, T_i) after each step i = 1..n.
    std::function<void(std::size_t, const SpillTable&)> observer;
};

/// P(X_(c_1) <= x_1, ..., X_(c_d) <= x_d) from the bin-probability matrix.
/// Only two tables are alive at a time.
double solve_independent(const OrderQuery& query, const BinProbabilityMatrix& p,
                         const SpillOptions& options = {});

} // namespace ordstat
