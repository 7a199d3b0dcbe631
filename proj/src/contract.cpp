#include "offload/contract.hpp"

#include <algorithm>
#include <sstream>

#include "offload/error.hpp"

namespace offload {

namespace {

void require_dimensions(const TypeLadder& ladder, std::size_t n, const char* what) {
    if (n != ladder.size()) {
        std::ostringstream os;
        os << what << " has " << n << " entries but the ladder has " << ladder.size() << " types";
        throw DomainError(os.str());
    }
}

void require_contract_shape(const TypeLadder& ladder, const Contract& contract) {
    require_dimensions(ladder, contract.assignment.size(), "assignment");
    require_dimensions(ladder, contract.prices.size(), "price schedule");
    for (ChannelCount w : contract.assignment) {
        if (w < 0) {
            throw DomainError("channel counts must be non-negative");
        }
    }
}

// U(l_t, w) for every type t and w = 0..max_w.
std::vector<std::vector<double>> utility_table(const TypeLadder& ladder, ChannelCount max_w) {
    std::vector<std::vector<double>> table;
    table.reserve(ladder.size());
    for (const auto& entry : ladder.entries()) {
        table.push_back(utility_curve(entry.lambda, max_w));
    }
    return table;
}

ChannelCount max_quality(const QualityAssignment& assignment) {
    return assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end());
}

}  // namespace

TypeLadder::TypeLadder(std::vector<TypeEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw DomainError("type ladder must contain at least one type");
    }
    for (std::size_t t = 0; t < entries_.size(); ++t) {
        if (entries_[t].count < 1) {
            throw DomainError("type " + std::to_string(t) + " has non-positive count " +
                              std::to_string(entries_[t].count));
        }
        if (t > 0 && !(entries_[t - 1].lambda < entries_[t].lambda)) {
            throw DomainError("type ladder must be strictly ascending in lambda (index " +
                              std::to_string(t) + ")");
        }
    }
}

TypeLadder TypeLadder::merged(std::vector<TypeEntry> entries) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const TypeEntry& x, const TypeEntry& y) { return x.lambda < y.lambda; });
    std::vector<TypeEntry> out;
    for (const auto& e : entries) {
        if (!out.empty() && out.back().lambda == e.lambda) {
            out.back().count += e.count;
        } else {
            out.push_back(e);
        }
    }
    return TypeLadder(std::move(out));
}

int TypeLadder::total_count() const noexcept {
    int n = 0;
    for (const auto& e : entries_) {
        n += e.count;
    }
    return n;
}

MbsLoad::MbsLoad(ChannelCount total, PoissonMean mean) : total_channels(total), load(mean) {
    if (total < 0) {
        throw DomainError("MBS channel budget must be non-negative");
    }
}

bool is_monotone(const QualityAssignment& assignment) noexcept {
    return std::is_sorted(assignment.begin(), assignment.end());
}

ChannelCount channels_sold(const TypeLadder& ladder, const QualityAssignment& assignment) {
    require_dimensions(ladder, assignment.size(), "assignment");
    long long sold = 0;
    for (std::size_t t = 0; t < ladder.size(); ++t) {
        sold += static_cast<long long>(ladder.count(t)) * assignment[t];
    }
    return static_cast<ChannelCount>(sold);
}

std::string FeasibilityReport::describe() const {
    if (feasible) {
        return "feasible";
    }
    std::ostringstream os;
    os << "infeasible:";
    for (const auto& v : violations) {
        if (v.kind == ConstraintKind::IncentiveCompatibility) {
            os << " IC(" << v.type << "," << v.alternative << ")";
        } else {
            os << " IR(" << v.type << ")";
        }
        os << " slack=" << v.slack << ";";
    }
    return os.str();
}

FeasibilityReport validate_feasibility(const TypeLadder& ladder, const Contract& contract) {
    require_contract_shape(ladder, contract);
    const auto& w = contract.assignment;
    const auto& p = contract.prices;
    const auto u = utility_table(ladder, max_quality(w));

    FeasibilityReport report;
    auto record = [&report](Constraint c) {
        report.constraints.push_back(c);
        if (c.slack < -kFeasibilityTolerance) {
            report.feasible = false;
            report.violations.push_back(c);
        }
    };
    for (std::size_t t = 0; t < ladder.size(); ++t) {
        const double own = u[t][w[t]] - p[t];
        record({ConstraintKind::IndividualRationality, t, t, own});
        for (std::size_t alt = 0; alt < ladder.size(); ++alt) {
            if (alt != t) {
                record({ConstraintKind::IncentiveCompatibility, t, alt, own - (u[t][w[alt]] - p[alt])});
            }
        }
    }
    return report;
}

PriceConditionReport price_conditions(const TypeLadder& ladder, const Contract& contract) {
    require_contract_shape(ladder, contract);
    const auto& w = contract.assignment;
    const auto& p = contract.prices;
    const auto u = utility_table(ladder, max_quality(w));

    PriceConditionReport report;
    report.monotone = is_monotone(w);
    report.first_price_upper = u[0][w[0]];
    report.first_price_in_range = p[0] >= -kFeasibilityTolerance &&
                                  p[0] <= report.first_price_upper + kFeasibilityTolerance;
    for (std::size_t k = 1; k < ladder.size(); ++k) {
        PriceStepBound step;
        step.type = k;
        step.lower = u[k - 1][w[k]] - u[k - 1][w[k - 1]];
        step.upper = u[k][w[k]] - u[k][w[k - 1]];
        const double increment = p[k] - p[k - 1];
        step.lower_slack = increment - step.lower;
        step.upper_slack = step.upper - increment;
        if (step.lower_slack < -kFeasibilityTolerance || step.upper_slack < -kFeasibilityTolerance) {
            report.steps_in_range = false;
        }
        report.steps.push_back(step);
    }
    return report;
}

PriceSchedule optimal_prices(const TypeLadder& ladder, const QualityAssignment& assignment) {
    require_dimensions(ladder, assignment.size(), "assignment");
    if (!is_monotone(assignment) || assignment.front() < 0) {
        throw DomainError("optimal pricing needs a nondecreasing, non-negative assignment");
    }
    const auto u = utility_table(ladder, assignment.back());
    PriceSchedule prices(ladder.size());
    prices[0] = u[0][assignment[0]];
    for (std::size_t k = 1; k < ladder.size(); ++k) {
        prices[k] = prices[k - 1] + (u[k][assignment[k]] - u[k][assignment[k - 1]]);
    }
    return prices;
}

namespace {

double cost_of(const TypeLadder& ladder, const QualityAssignment& assignment, const MbsLoad& mbs) {
    const ChannelCount sold = channels_sold(ladder, assignment);
    if (sold > mbs.total_channels) {
        throw DomainError("contract sells " + std::to_string(sold) + " channels but the MBS has " +
                          std::to_string(mbs.total_channels));
    }
    return mbs_cost(sold, mbs.total_channels, mbs.load);
}

}  // namespace

double revenue(const TypeLadder& ladder, const Contract& contract, const MbsLoad& mbs) {
    require_contract_shape(ladder, contract);
    const double cost = cost_of(ladder, contract.assignment, mbs);
    double payments = 0.0;
    for (std::size_t t = 0; t < ladder.size(); ++t) {
        payments += ladder.count(t) * contract.prices[t];
    }
    return payments - cost;
}

double social_welfare(const TypeLadder& ladder, const QualityAssignment& assignment,
                      const MbsLoad& mbs) {
    const double cost = cost_of(ladder, assignment, mbs);
    double utility = 0.0;
    for (std::size_t t = 0; t < ladder.size(); ++t) {
        if (assignment[t] < 0) {
            throw DomainError("channel counts must be non-negative");
        }
        utility += ladder.count(t) * uav_utility(ladder.lambda(t), assignment[t]);
    }
    return utility - cost;
}

double operator_surplus(const TypeLadder& ladder, const Contract& contract) {
    require_contract_shape(ladder, contract);
    double surplus = 0.0;
    for (std::size_t t = 0; t < ladder.size(); ++t) {
        surplus += ladder.count(t) *
                   (uav_utility(ladder.lambda(t), contract.assignment[t]) - contract.prices[t]);
    }
    return surplus;
}

GainCoefficients gain_coefficients(const TypeLadder& ladder) {
    const std::size_t n = ladder.size();
    GainCoefficients g{std::vector<long long>(n), std::vector<long long>(n)};
    long long suffix = 0;
    for (std::size_t i = n; i-- > 0;) {
        g.d[i] = suffix;
        suffix += ladder.count(i);
        g.c[i] = suffix;
    }
    return g;
}

double gain(const TypeLadder& ladder, std::size_t t, ChannelCount w) {
    if (t >= ladder.size()) {
        throw DomainError("type index " + std::to_string(t) + " out of range");
    }
    const auto coeff = gain_coefficients(ladder);
    double value = static_cast<double>(coeff.c[t]) * uav_utility(ladder.lambda(t), w);
    if (t + 1 < ladder.size()) {
        value -= static_cast<double>(coeff.d[t]) * uav_utility(ladder.lambda(t + 1), w);
    }
    return value;
}

}  // namespace offload
