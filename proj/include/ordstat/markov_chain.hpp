#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ordstat/baselines.hpp"
#include "ordstat/dependent.hpp"

namespace ordstat {

/// Integer-valued Markov chain X_1, ..., X_n on the support [lower, upper].
/// Transition rows are stored sparsely.
class MarkovChain {
public:
    struct Entry {
        std::int64_t value;
        double prob;
    };

    /// X_0 = initial and X_{i+1} = X_i + offset with the given probabilities.
    /// Without truncation the support is the range reachable in n steps;
    /// with truncation, moves that would leave [lo, hi] stop at the edge.
    static MarkovChain from_steps(std::span<const std::int64_t> offsets,
                                  std::span<const double> probs, std::int64_t initial,
                                  std::size_t n,
                                  std::optional<std::pair<std::int64_t, std::int64_t>> truncation = {},
                                  std::size_t max_support = 1'000'000);

    /// Explicit row-stochastic matrix over [lower, upper] (row-major,
    /// size^2 entries) and the distribution of X_1 over the same support.
    static MarkovChain from_matrix(std::int64_t lower, std::int64_t upper,
                                   std::span<const double> rows, std::span<const double> first);

    std::int64_t lower() const noexcept { return lower_; }
    std::int64_t upper() const noexcept { return upper_; }
    std::size_t support_size() const noexcept { return static_cast<std::size_t>(upper_ - lower_ + 1); }

    std::span<const Entry> first() const noexcept { return first_; }
    std::span<const Entry> row(std::int64_t value) const;
    std::size_t max_row_width() const noexcept;
    /// Longest path the support was sized for (0 = any length).
    std::size_t horizon() const noexcept { return horizon_; }

    /// Path sampler for X_1..X_n.
    JointSampler sampler() const;

private:
    MarkovChain() = default;
    void finish_rows();

    std::int64_t lower_ = 0;
    std::int64_t upper_ = 0;
    std::size_t horizon_ = 0;
    std::vector<Entry> first_;
    std::vector<std::size_t> row_start_;
    std::vector<Entry> entries_;
};

struct ChainModel {
    DependencySchedule schedule;
    MicroBinSpec micro;
    ConditionalProvider conditional;
};

/// Path graph, one micro-bin per support point, and a conditional provider
/// that reads the predecessor's micro-bin and emits its transition row.
ChainModel markov_chain_adapter(const MarkovChain& chain, const OrderQuery& query);

/// solve_dependent on the adapted chain.
double solve_chain(const MarkovChain& chain, const OrderQuery& query,
                   const DependentOptions& options = {});

/// Exact probability by summing over every trajectory with non-zero
/// probability. Refuses when (widest row)^n exceeds max_paths.
double enumerate_paths_oracle(const MarkovChain& chain, const OrderQuery& query,
                              double max_paths = 1e7);

} // namespace ordstat
