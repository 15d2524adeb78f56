#include "ordstat/markov_chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ordstat/error.hpp"

namespace ordstat {

namespace {

void check_distribution(std::span<const double> probs, const std::string& what) {
    double sum = 0.0;
    for (double v : probs) {
        if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::Input, what + " has a negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) fail(ErrorKind::Input, what + " sums to " + std::to_string(sum));
}

// Merges entries with equal value and drops zero-probability ones.
std::vector<MarkovChain::Entry> compact(std::map<std::int64_t, double> mass) {
    std::vector<MarkovChain::Entry> out;
    for (auto [v, p] : mass) {
        if (p > 0.0) out.push_back({v, p});
    }
    return out;
}

} // namespace

MarkovChain MarkovChain::from_steps(std::span<const std::int64_t> offsets, std::span<const double> probs,
                                    std::int64_t initial, std::size_t n,
                                    std::optional<std::pair<std::int64_t, std::int64_t>> truncation,
                                    std::size_t max_support) {
    if (offsets.empty() || offsets.size() != probs.size()) {
        fail(ErrorKind::Input, "step kernel needs matching, non-empty offset and probability lists");
    }
    if (n < 1) fail(ErrorKind::Input, "chain length must be positive");
    check_distribution(probs, "step kernel");
    const auto [min_off, max_off] = std::minmax_element(offsets.begin(), offsets.end());

    MarkovChain chain;
    if (truncation) {
        if (truncation->first > truncation->second) fail(ErrorKind::Input, "truncation range is empty");
        if (initial < truncation->first || initial > truncation->second) {
            fail(ErrorKind::Input, "initial state lies outside the truncation range");
        }
        chain.lower_ = truncation->first;
        chain.upper_ = truncation->second;
    } else {
        const auto steps = static_cast<std::int64_t>(n);
        chain.lower_ = initial + std::min(*min_off, steps * *min_off);
        chain.upper_ = initial + std::max(*max_off, steps * *max_off);
        chain.horizon_ = n;
    }
    if (static_cast<double>(chain.upper_) - static_cast<double>(chain.lower_) + 1.0 >
        static_cast<double>(max_support)) {
        fail(ErrorKind::Resource, "chain support would exceed " + std::to_string(max_support) + " states");
    }

    // moves past the edge stop there; without truncation this only affects
    // rows that no path of length n uses
    const auto step_from = [&](std::int64_t from) {
        std::map<std::int64_t, double> mass;
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            mass[std::clamp(from + offsets[k], chain.lower_, chain.upper_)] += probs[k];
        }
        return compact(std::move(mass));
    };
    chain.first_ = step_from(initial);
    chain.row_start_.push_back(0);
    for (std::int64_t v = chain.lower_; v <= chain.upper_; ++v) {
        const auto row = step_from(v);
        chain.entries_.insert(chain.entries_.end(), row.begin(), row.end());
        chain.row_start_.push_back(chain.entries_.size());
    }
    return chain;
}

MarkovChain MarkovChain::from_matrix(std::int64_t lower, std::int64_t upper, std::span<const double> rows,
                                     std::span<const double> first) {
    if (lower > upper) fail(ErrorKind::Input, "chain support is empty");
    const double size_d = static_cast<double>(upper) - static_cast<double>(lower) + 1.0;
    if (size_d > 1e6) fail(ErrorKind::Resource, "chain support exceeds 1e6 states");
    const auto size = static_cast<std::size_t>(size_d);
    if (rows.size() != size * size) {
        fail(ErrorKind::Input, "transition matrix has " + std::to_string(rows.size()) + " entries, expected " +
                                   std::to_string(size * size));
    }
    if (first.size() != size) fail(ErrorKind::Input, "initial distribution has the wrong length");
    check_distribution(first, "initial distribution");

    MarkovChain chain;
    chain.lower_ = lower;
    chain.upper_ = upper;
    for (std::size_t k = 0; k < size; ++k) {
        if (first[k] > 0.0) chain.first_.push_back({lower + static_cast<std::int64_t>(k), first[k]});
    }
    chain.row_start_.push_back(0);
    for (std::size_t r = 0; r < size; ++r) {
        const auto row = rows.subspan(r * size, size);
        check_distribution(row, "transition row " + std::to_string(lower + static_cast<std::int64_t>(r)));
        for (std::size_t k = 0; k < size; ++k) {
            if (row[k] > 0.0) chain.entries_.push_back({lower + static_cast<std::int64_t>(k), row[k]});
        }
        chain.row_start_.push_back(chain.entries_.size());
    }
    return chain;
}

std::span<const MarkovChain::Entry> MarkovChain::row(std::int64_t value) const {
    if (value < lower_ || value > upper_) {
        fail(ErrorKind::Input, "state " + std::to_string(value) + " is outside the chain support");
    }
    const auto r = static_cast<std::size_t>(value - lower_);
    return {entries_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
}

std::size_t MarkovChain::max_row_width() const noexcept {
    std::size_t w = first_.size();
    for (std::size_t r = 0; r + 1 < row_start_.size(); ++r) w = std::max(w, row_start_[r + 1] - row_start_[r]);
    return w;
}

namespace {

std::int64_t draw(std::span<const MarkovChain::Entry> entries, CounterRng& rng) {
    const double u = rng.next_double();
    double acc = 0.0;
    for (const auto& e : entries) {
        acc += e.prob;
        if (u < acc) return e.value;
    }
    return entries.back().value;
}

void check_horizon(const MarkovChain& chain, const OrderQuery& query) {
    if (chain.horizon() != 0 && static_cast<std::size_t>(query.n) > chain.horizon()) {
        fail(ErrorKind::Input, "chain support was sized for " + std::to_string(chain.horizon()) +
                                   " steps, query has n = " + std::to_string(query.n));
    }
}

} // namespace

JointSampler MarkovChain::sampler() const {
    return [chain = *this](CounterRng& rng, std::span<double> out) {
        std::int64_t v = 0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            v = draw(i == 0 ? chain.first() : chain.row(v), rng);
            out[i] = static_cast<double>(v);
        }
    };
}

ChainModel markov_chain_adapter(const MarkovChain& chain, const OrderQuery& query) {
    check_horizon(chain, query);
    std::vector<double> support;
    support.reserve(chain.support_size());
    for (std::int64_t v = chain.lower(); v <= chain.upper(); ++v) support.push_back(static_cast<double>(v));
    MicroBinSpec micro = MicroBinSpec::from_support(query, support);

    // flat micro-bin of every support value, and the value held by each
    // micro-bin (-1 for the empty padding ones)
    const std::size_t M = micro.count();
    std::vector<std::size_t> flat_of(support.size());
    std::vector<std::ptrdiff_t> value_at(M, -1);
    for (std::size_t k = 0; k < support.size(); ++k) {
        flat_of[k] = micro.flat(micro.locate(support[k]));
        value_at[flat_of[k]] = static_cast<std::ptrdiff_t>(k);
    }

    ConditionalProvider cond = [chain, micro, flat_of = std::move(flat_of), value_at = std::move(value_at)](
                                   std::size_t i, std::span<const MicroBin> nbr) {
        std::vector<double> out(micro.count(), 0.0);
        std::span<const MarkovChain::Entry> entries = chain.first();
        if (i > 1) {
            if (nbr.size() != 1) fail(ErrorKind::InvalidConditional, "chain conditional expects one neighbour");
            const std::size_t f = micro.flat(nbr[0]);
            if (value_at[f] < 0) {
                // an empty micro-bin is never occupied; any distribution will do
                out[f] = 1.0;
                return out;
            }
            entries = chain.row(chain.lower() + value_at[f]);
        }
        for (const auto& e : entries) out[flat_of[static_cast<std::size_t>(e.value - chain.lower())]] += e.prob;
        return out;
    };
    return {chain_schedule(static_cast<std::size_t>(query.n)), std::move(micro), std::move(cond)};
}

double solve_chain(const MarkovChain& chain, const OrderQuery& query, const DependentOptions& options) {
    const ChainModel model = markov_chain_adapter(chain, query);
    return solve_dependent(query, model.micro, model.schedule, model.conditional, options);
}

double enumerate_paths_oracle(const MarkovChain& chain, const OrderQuery& query, double max_paths) {
    check_horizon(chain, query);
    const auto n = static_cast<std::size_t>(query.n);
    const double width = static_cast<double>(std::max<std::size_t>(1, chain.max_row_width()));
    if (static_cast<double>(n) * std::log10(width) > std::log10(max_paths) + 1e-12) {
        fail(ErrorKind::Resource, "path enumeration needs up to " + std::to_string(width) + "^" +
                                      std::to_string(n) + " paths, cap is " + std::to_string(max_paths));
    }
    std::vector<double> path(n);
    std::vector<double> sorted(n);
    double total = 0.0;
    auto recurse = [&](auto&& self, std::size_t i, std::int64_t prev, double weight) -> void {
        if (i == n) {
            sorted = path;
            if (satisfies_order_constraints(query, sorted)) total += weight;
            return;
        }
        for (const auto& e : i == 0 ? chain.first() : chain.row(prev)) {
            path[i] = static_cast<double>(e.value);
            self(self, i + 1, e.value, weight * e.prob);
        }
    };
    recurse(recurse, 0, 0, 1.0);
    return total;
}

} // namespace ordstat
