#pragma once

// Optimal contract search: the monotone bounded-knapsack dynamic program
// over per-type gains, the outer loop over the number of channels sold,
// and an exhaustive oracle for small instances.

#include <cstddef>
#include <optional>
#include <vector>

#include "offload/contract.hpp"

namespace offload {

enum class Objective { MbsRevenue, SocialWelfare };

const char* to_string(Objective objective) noexcept;

/// Tie-break applied whenever two choices are within `tie_tolerance`.
/// PreferLarger exists only as a negative control for the oracle check.
enum class TieBreak { PreferSmaller, PreferLarger };

struct SolverOptions {
    bool k_cap = true;
    /// Evaluate max over l >= k by direct scan instead of running suffix maxima.
    bool direct_scan = false;
    TieBreak tie_break = TieBreak::PreferSmaller;
    double tie_tolerance = 1e-12;
    unsigned threads = 1;
};

/// Value table cell: empty when the weight budget cannot hold the choice.
using DpValue = std::optional<double>;

/// OPT and D tables of one inner solve, indexed (t, k, w).
class DpTables {
public:
    DpTables(std::size_t types, ChannelCount max_choice, ChannelCount capacity);

    std::size_t types() const noexcept { return types_; }
    ChannelCount max_choice() const noexcept { return max_choice_; }
    ChannelCount capacity() const noexcept { return capacity_; }

    DpValue& opt(std::size_t t, ChannelCount k, ChannelCount w) { return opt_[index(t, k, w)]; }
    const DpValue& opt(std::size_t t, ChannelCount k, ChannelCount w) const {
        return opt_[index(t, k, w)];
    }
    ChannelCount& decision(std::size_t t, ChannelCount k, ChannelCount w) {
        return decision_[index(t, k, w)];
    }
    ChannelCount decision(std::size_t t, ChannelCount k, ChannelCount w) const {
        return decision_[index(t, k, w)];
    }
    std::size_t cell_count() const noexcept { return opt_.size(); }

private:
    std::size_t index(std::size_t t, ChannelCount k, ChannelCount w) const noexcept {
        return (t * (static_cast<std::size_t>(max_choice_) + 1) + static_cast<std::size_t>(k)) *
                   (static_cast<std::size_t>(capacity_) + 1) +
               static_cast<std::size_t>(w);
    }

    std::size_t types_;
    ChannelCount max_choice_;
    ChannelCount capacity_;
    std::vector<DpValue> opt_;
    std::vector<ChannelCount> decision_;
};

/// Per-type option values: gains[t][k] for k = 0..K.
using GainTable = std::vector<std::vector<double>>;

GainTable objective_gains(const TypeLadder& ladder, Objective objective, ChannelCount max_choice);

/// Fills OPT and D for capacity `capacity` and choices 0..max_choice.
DpTables build_dp_tables(const TypeLadder& ladder, const GainTable& gains,
                         ChannelCount capacity, ChannelCount max_choice,
                         const SolverOptions& options = {});

struct InnerSolution {
    double value;
    QualityAssignment assignment;
    std::size_t cells;
};

/// Maximizes the summed per-type gains over monotone assignments with
/// sum N_t w_t <= capacity and every w_t <= max_choice.
InnerSolution dp_inner(const TypeLadder& ladder, Objective objective, ChannelCount capacity,
                       ChannelCount max_choice, const SolverOptions& options = {});

struct TraceRow {
    ChannelCount capacity;
    double inner_value;
    double objective;  // inner_value - C(capacity)
    double revenue;
    double welfare;
    ChannelCount sold;
};

struct SolverResult {
    Objective objective;
    Contract contract;
    double revenue = 0.0;
    double welfare = 0.0;
    double objective_value = 0.0;
    ChannelCount sold = 0;
    ChannelCount chosen_capacity = 0;
    std::vector<TraceRow> trace;
    std::size_t dp_cells = 0;
};

/// K used for capacity W: min(W, smallest k with P(X_top >= k) < 1e-12)
/// when the cap is enabled, otherwise W.
ChannelCount choice_bound(const TypeLadder& ladder, ChannelCount capacity, bool k_cap);

SolverResult solve(const TypeLadder& ladder, const MbsLoad& mbs, Objective objective,
                   const SolverOptions& options = {});

/// Upper bound on the number of monotone assignments with entries in 0..M.
double monotone_assignment_count(std::size_t types, ChannelCount max_value);

inline constexpr double kDefaultSearchCap = 1e7;

/// Exhaustive search over every monotone assignment within budget. Ties
/// go to the fewest channels sold, then the lexicographically smallest.
SolverResult brute_force_solve(const TypeLadder& ladder, const MbsLoad& mbs, Objective objective,
                               double search_cap = kDefaultSearchCap,
                               double tie_tolerance = 1e-12);

}  // namespace offload
