#pragma once

// Contract data model: type ladders, quality/price schedules, IC/IR
// feasibility, optimal pricing, and revenue/welfare evaluation.
//
// Type indices are zero-based throughout: t = 0 is the lowest type.

#include <cstddef>
#include <string>
#include <vector>

#include "offload/stochastic.hpp"

namespace offload {

struct TypeEntry {
    PoissonMean lambda;
    int count;

    friend bool operator==(const TypeEntry&, const TypeEntry&) = default;
};

/// UAV types in strictly ascending order of mean load, each with a
/// positive multiplicity.
class TypeLadder {
public:
    explicit TypeLadder(std::vector<TypeEntry> entries);

    /// Sorts by lambda and sums the counts of equal lambdas.
    static TypeLadder merged(std::vector<TypeEntry> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<TypeEntry>& entries() const noexcept { return entries_; }
    PoissonMean lambda(std::size_t t) const { return entries_.at(t).lambda; }
    int count(std::size_t t) const { return entries_.at(t).count; }
    int total_count() const noexcept;

    friend bool operator==(const TypeLadder&, const TypeLadder&) = default;

private:
    std::vector<TypeEntry> entries_;
};

/// Channel count per type. Feasible contracts need it nondecreasing, but
/// arbitrary vectors are representable so that infeasible ones can be checked.
using QualityAssignment = std::vector<ChannelCount>;

/// Price per type, in expected served users.
using PriceSchedule = std::vector<double>;

struct Contract {
    QualityAssignment assignment;
    PriceSchedule prices;

    friend bool operator==(const Contract&, const Contract&) = default;
};

struct MbsLoad {
    ChannelCount total_channels;
    PoissonMean load;

    MbsLoad(ChannelCount total, PoissonMean mean);
};

bool is_monotone(const QualityAssignment& assignment) noexcept;

/// Total channels sold: sum of N_t * w_t.
ChannelCount channels_sold(const TypeLadder& ladder, const QualityAssignment& assignment);

/// Absolute slack granted to every IC/IR inequality.
inline constexpr double kFeasibilityTolerance = 1e-9;

enum class ConstraintKind { IncentiveCompatibility, IndividualRationality };

/// One IC or IR inequality. Slack is lhs - rhs; negative means violated.
struct Constraint {
    ConstraintKind kind;
    std::size_t type;
    std::size_t alternative;  // meaningful for IC only
    double slack;
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<Constraint> constraints;
    std::vector<Constraint> violations;

    std::string describe() const;
};

FeasibilityReport validate_feasibility(const TypeLadder& ladder, const Contract& contract);

/// Per-step bounds p_{k-1} + lower <= p_k <= p_{k-1} + upper, k >= 1.
struct PriceStepBound {
    std::size_t type;
    double lower;
    double upper;
    double lower_slack;
    double upper_slack;
};

struct PriceConditionReport {
    bool monotone = true;
    bool first_price_in_range = true;
    bool steps_in_range = true;
    double first_price_upper = 0.0;
    std::vector<PriceStepBound> steps;

    bool feasible() const noexcept { return monotone && first_price_in_range && steps_in_range; }
};

/// Checks the three adjacent-type pricing conditions that are equivalent
/// to IC/IR for strictly ascending types.
PriceConditionReport price_conditions(const TypeLadder& ladder, const Contract& contract);

/// Revenue-maximizing feasible prices for a fixed monotone assignment:
/// p_0 = U(l_0, w_0), p_k = p_{k-1} + U(l_k, w_k) - U(l_k, w_{k-1}).
PriceSchedule optimal_prices(const TypeLadder& ladder, const QualityAssignment& assignment);

/// Sum of N_t p_t minus the MBS cost of the channels sold.
double revenue(const TypeLadder& ladder, const Contract& contract, const MbsLoad& mbs);

/// Total UAV utility minus the MBS cost of the channels sold.
double social_welfare(const TypeLadder& ladder, const QualityAssignment& assignment,
                      const MbsLoad& mbs);

/// Sum over types of N_t (U(l_t, w_t) - p_t).
double operator_surplus(const TypeLadder& ladder, const Contract& contract);

/// Suffix sums C_t = sum_{i>=t} N_i and D_t = sum_{i>t} N_i.
struct GainCoefficients {
    std::vector<long long> c;
    std::vector<long long> d;
};

GainCoefficients gain_coefficients(const TypeLadder& ladder);

/// G_t(w) = C_t U(l_t, w) - D_t U(l_{t+1}, w), with D_{T-1} = 0.
double gain(const TypeLadder& ladder, std::size_t t, ChannelCount w);

}  // namespace offload
