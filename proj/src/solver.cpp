#include "offload/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "offload/error.hpp"

namespace offload {

namespace {

struct Choice {
    DpValue value;
    ChannelCount index = 0;
};

// Picks among candidates v[lo..hi] the index the tie-break rule selects:
// the smallest (or largest) index whose value is within tolerance of the max.
// The returned value is the max itself.
template <typename ValueAt>
Choice select_choice(ChannelCount lo, ChannelCount hi, ValueAt value_at,
                     const SolverOptions& options) {
    DpValue best;
    for (ChannelCount l = lo; l <= hi; ++l) {
        const DpValue v = value_at(l);
        if (v && (!best || *v > *best)) {
            best = v;
        }
    }
    if (!best) {
        return {};
    }
    const double threshold = *best - options.tie_tolerance;
    if (options.tie_break == TieBreak::PreferSmaller) {
        for (ChannelCount l = lo; l <= hi; ++l) {
            if (const DpValue v = value_at(l); v && *v >= threshold) {
                return {best, l};
            }
        }
    } else {
        for (ChannelCount l = hi; l >= lo; --l) {
            if (const DpValue v = value_at(l); v && *v >= threshold) {
                return {best, l};
            }
        }
    }
    return {};  // unreachable: best itself qualifies
}

void fill_last_level(const TypeLadder& ladder, const GainTable& gains, DpTables& tables) {
    const std::size_t t = ladder.size() - 1;
    const long long n = ladder.count(t);
    for (ChannelCount k = 0; k <= tables.max_choice(); ++k) {
        for (ChannelCount w = 0; w <= tables.capacity(); ++w) {
            if (w >= k * n) {
                tables.opt(t, k, w) = gains[t][k];
            }
            tables.decision(t, k, w) = 0;
        }
    }
}

// OPT(t,k,w) = G_t(k) + max_{l>=k} OPT(t+1, l, w - k N_t), scanned directly.
void fill_level_direct(const TypeLadder& ladder, const GainTable& gains, std::size_t t,
                       const SolverOptions& options, DpTables& tables) {
    const long long n = ladder.count(t);
    const ChannelCount kmax = tables.max_choice();
    for (ChannelCount k = 0; k <= kmax; ++k) {
        for (ChannelCount w = 0; w <= tables.capacity(); ++w) {
            if (w < k * n) {
                tables.decision(t, k, w) = 0;
                continue;
            }
            const ChannelCount rest = static_cast<ChannelCount>(w - k * n);
            const double g = gains[t][k];
            const Choice c = select_choice(
                k, kmax,
                [&](ChannelCount l) -> DpValue {
                    const DpValue& next = tables.opt(t + 1, l, rest);
                    return next ? DpValue(g + *next) : DpValue();
                },
                options);
            tables.opt(t, k, w) = c.value;
            tables.decision(t, k, w) = c.value ? c.index : 0;
        }
    }
}

// Same recurrence with the inner max over l >= k kept as a running suffix
// maximum, so each cell costs O(1). Only valid for PreferSmaller.
void fill_level_suffix(const TypeLadder& ladder, const GainTable& gains, std::size_t t,
                       const SolverOptions& options, DpTables& tables) {
    const long long n = ladder.count(t);
    const ChannelCount kmax = tables.max_choice();
    const ChannelCount cap = tables.capacity();
    // suffix[k][w'] = selected choice over l in [k, kmax] for remaining weight w'.
    std::vector<Choice> running(static_cast<std::size_t>(cap) + 1);
    std::vector<Choice> suffix((static_cast<std::size_t>(kmax) + 1) * (cap + 1));
    for (ChannelCount l = kmax; l >= 0; --l) {
        for (ChannelCount w = 0; w <= cap; ++w) {
            Choice& r = running[w];
            const DpValue& v = tables.opt(t + 1, l, w);
            if (v) {
                if (!r.value || *v > *r.value) {
                    r = {v, l};
                } else if (*v >= *r.value - options.tie_tolerance) {
                    r.index = l;  // keep the max, move to the smaller index
                }
            }
            suffix[static_cast<std::size_t>(l) * (cap + 1) + w] = r;
        }
    }
    for (ChannelCount k = 0; k <= kmax; ++k) {
        for (ChannelCount w = 0; w <= cap; ++w) {
            tables.decision(t, k, w) = 0;
            if (w < k * n) {
                continue;
            }
            const Choice& c = suffix[static_cast<std::size_t>(k) * (cap + 1) + (w - k * n)];
            if (c.value) {
                tables.opt(t, k, w) = gains[t][k] + *c.value;
                tables.decision(t, k, w) = c.index;
            }
        }
    }
}

void require_inner_bounds(ChannelCount capacity, ChannelCount max_choice) {
    if (capacity < 0 || max_choice < 0) {
        throw DomainError("capacity and choice bound must be non-negative");
    }
    if (max_choice > capacity) {
        throw DomainError("choice bound K=" + std::to_string(max_choice) +
                          " exceeds capacity W=" + std::to_string(capacity));
    }
}

InnerSolution extract(const TypeLadder& ladder, const DpTables& tables,
                      const SolverOptions& options) {
    const ChannelCount cap = tables.capacity();
    const Choice first = select_choice(
        0, tables.max_choice(), [&](ChannelCount k) { return tables.opt(0, k, cap); }, options);
    InnerSolution s{*first.value, QualityAssignment(ladder.size(), 0), tables.cell_count()};
    s.assignment[0] = first.index;
    ChannelCount remaining = cap;
    for (std::size_t t = 0; t + 1 < ladder.size(); ++t) {
        s.assignment[t + 1] = tables.decision(t, s.assignment[t], remaining);
        remaining -= s.assignment[t] * ladder.count(t);
    }
    return s;
}

InnerSolution inner_from_gains(const TypeLadder& ladder, const GainTable& gains,
                               ChannelCount capacity, ChannelCount max_choice,
                               const SolverOptions& options) {
    const DpTables tables = build_dp_tables(ladder, gains, capacity, max_choice, options);
    return extract(ladder, tables, options);
}

// Objective value of a contract priced optimally.
struct Evaluation {
    Contract contract;
    double revenue;
    double welfare;
    ChannelCount sold;
};

Evaluation evaluate(const TypeLadder& ladder, const MbsLoad& mbs, QualityAssignment assignment) {
    Evaluation e;
    e.contract.prices = optimal_prices(ladder, assignment);
    e.contract.assignment = std::move(assignment);
    e.revenue = revenue(ladder, e.contract, mbs);
    e.welfare = social_welfare(ladder, e.contract.assignment, mbs);
    e.sold = channels_sold(ladder, e.contract.assignment);
    return e;
}

}  // namespace

const char* to_string(Objective objective) noexcept {
    return objective == Objective::MbsRevenue ? "mbs-revenue" : "social-welfare";
}

DpTables::DpTables(std::size_t types, ChannelCount max_choice, ChannelCount capacity)
    : types_(types),
      max_choice_(max_choice),
      capacity_(capacity),
      opt_(types * (static_cast<std::size_t>(max_choice) + 1) *
           (static_cast<std::size_t>(capacity) + 1)),
      decision_(opt_.size(), 0) {}

GainTable objective_gains(const TypeLadder& ladder, Objective objective, ChannelCount max_choice) {
    std::vector<std::vector<double>> utility;
    for (const auto& e : ladder.entries()) {
        utility.push_back(utility_curve(e.lambda, max_choice));
    }
    const GainCoefficients coeff = gain_coefficients(ladder);
    GainTable gains(ladder.size(), std::vector<double>(static_cast<std::size_t>(max_choice) + 1));
    for (std::size_t t = 0; t < ladder.size(); ++t) {
        for (ChannelCount k = 0; k <= max_choice; ++k) {
            if (objective == Objective::SocialWelfare) {
                gains[t][k] = ladder.count(t) * utility[t][k];
            } else {
                double g = static_cast<double>(coeff.c[t]) * utility[t][k];
                if (t + 1 < ladder.size()) {
                    g -= static_cast<double>(coeff.d[t]) * utility[t + 1][k];
                }
                gains[t][k] = g;
            }
        }
    }
    return gains;
}

DpTables build_dp_tables(const TypeLadder& ladder, const GainTable& gains, ChannelCount capacity,
                         ChannelCount max_choice, const SolverOptions& options) {
    require_inner_bounds(capacity, max_choice);
    if (gains.size() != ladder.size()) {
        throw DomainError("gain table does not match the ladder");
    }
    for (const auto& row : gains) {
        if (row.size() < static_cast<std::size_t>(max_choice) + 1) {
            throw DomainError("gain table is shorter than the choice bound");
        }
    }
    DpTables tables(ladder.size(), max_choice, capacity);
    fill_last_level(ladder, gains, tables);
    const bool direct = options.direct_scan || options.tie_break != TieBreak::PreferSmaller;
    for (std::size_t t = ladder.size() - 1; t-- > 0;) {
        if (direct) {
            fill_level_direct(ladder, gains, t, options, tables);
        } else {
            fill_level_suffix(ladder, gains, t, options, tables);
        }
    }
    return tables;
}

InnerSolution dp_inner(const TypeLadder& ladder, Objective objective, ChannelCount capacity,
                       ChannelCount max_choice, const SolverOptions& options) {
    require_inner_bounds(capacity, max_choice);
    return inner_from_gains(ladder, objective_gains(ladder, objective, max_choice), capacity,
                            max_choice, options);
}

ChannelCount choice_bound(const TypeLadder& ladder, ChannelCount capacity, bool k_cap) {
    if (!k_cap) {
        return capacity;
    }
    return std::min(capacity, saturation_count(ladder.lambda(ladder.size() - 1)));
}

SolverResult solve(const TypeLadder& ladder, const MbsLoad& mbs, Objective objective,
                   const SolverOptions& options) {
    const ChannelCount m = mbs.total_channels;
    const GainTable gains = objective_gains(ladder, objective, choice_bound(ladder, m, options.k_cap));
    const std::vector<double> cost = cost_curve(m, mbs.load);

    std::vector<InnerSolution> inner(static_cast<std::size_t>(m) + 1);
    auto run_range = [&](ChannelCount begin, ChannelCount step) {
        for (ChannelCount w = begin; w <= m; w += step) {
            inner[w] = inner_from_gains(ladder, gains, w, choice_bound(ladder, w, options.k_cap),
                                        options);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, m + 1));
    if (threads == 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(run_range, static_cast<ChannelCount>(i),
                              static_cast<ChannelCount>(threads));
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    SolverResult result;
    result.objective = objective;
    result.trace.reserve(inner.size());
    double best = 0.0;
    for (ChannelCount w = 0; w <= m; ++w) {
        const Evaluation e = evaluate(ladder, mbs, inner[w].assignment);
        const double net = inner[w].value - cost[w];
        result.trace.push_back({w, inner[w].value, net, e.revenue, e.welfare, e.sold});
        result.dp_cells += inner[w].cells;
        best = w == 0 ? net : std::max(best, net);
    }
    ChannelCount chosen = 0;
    const double threshold = best - options.tie_tolerance;
    if (options.tie_break == TieBreak::PreferSmaller) {
        while (result.trace[chosen].objective < threshold) {
            ++chosen;
        }
    } else {
        chosen = m;
        while (result.trace[chosen].objective < threshold) {
            --chosen;
        }
    }
    Evaluation e = evaluate(ladder, mbs, inner[chosen].assignment);
    result.contract = std::move(e.contract);
    result.revenue = e.revenue;
    result.welfare = e.welfare;
    result.sold = e.sold;
    result.chosen_capacity = chosen;
    result.objective_value = result.trace[chosen].objective;
    return result;
}

double monotone_assignment_count(std::size_t types, ChannelCount max_value) {
    // Multisets of size T drawn from M + 1 values: C(M + T, T).
    return std::exp(std::lgamma(max_value + static_cast<double>(types) + 1.0) -
                    std::lgamma(static_cast<double>(types) + 1.0) -
                    std::lgamma(max_value + 1.0));
}

namespace {

struct Candidate {
    double value;
    ChannelCount sold;
    QualityAssignment assignment;
};

// True when `x` beats the incumbent under the oracle's tie rule, given
// both are already within tolerance of the maximum.
bool preferred(const Candidate& x, const Candidate& incumbent) {
    if (x.sold != incumbent.sold) {
        return x.sold < incumbent.sold;
    }
    return x.assignment < incumbent.assignment;
}

template <typename Visit>
void enumerate_monotone(const TypeLadder& ladder, ChannelCount budget, Visit&& visit) {
    QualityAssignment w(ladder.size(), 0);
    auto rec = [&](auto&& self, std::size_t t, ChannelCount lo, ChannelCount left) -> void {
        if (t == ladder.size()) {
            visit(w);
            return;
        }
        for (ChannelCount k = lo; static_cast<long long>(k) * ladder.count(t) <= left; ++k) {
            w[t] = k;
            self(self, t + 1, k, left - k * ladder.count(t));
        }
    };
    rec(rec, 0, 0, budget);
}

}  // namespace

SolverResult brute_force_solve(const TypeLadder& ladder, const MbsLoad& mbs, Objective objective,
                               double search_cap, double tie_tolerance) {
    const ChannelCount m = mbs.total_channels;
    const double estimate = monotone_assignment_count(ladder.size(), m);
    if (estimate > search_cap) {
        std::ostringstream os;
        os << "brute-force search refused: about " << estimate
           << " monotone assignments exceed the cap of " << search_cap;
        throw SearchSpaceError(os.str(), estimate);
    }

    std::vector<Candidate> all;
    enumerate_monotone(ladder, m, [&](const QualityAssignment& w) {
        const Evaluation e = evaluate(ladder, mbs, w);
        const double value = objective == Objective::MbsRevenue ? e.revenue : e.welfare;
        all.push_back({value, e.sold, w});
    });

    // Per-capacity trace: best pre-cost value over assignments selling <= W.
    const std::vector<double> cost = cost_curve(m, mbs.load);
    SolverResult result;
    result.objective = objective;
    for (ChannelCount cap = 0; cap <= m; ++cap) {
        double top = 0.0;
        bool any = false;
        for (const auto& c : all) {
            if (c.sold <= cap) {
                const double inner = c.value + cost[c.sold];
                top = any ? std::max(top, inner) : inner;
                any = true;
            }
        }
        const Candidate* pick = nullptr;
        for (const auto& c : all) {
            if (c.sold <= cap && c.value + cost[c.sold] >= top - tie_tolerance &&
                (!pick || preferred(c, *pick))) {
                pick = &c;
            }
        }
        const Evaluation e = evaluate(ladder, mbs, pick->assignment);
        result.trace.push_back({cap, top, top - cost[cap], e.revenue, e.welfare, e.sold});
    }

    double best = all.front().value;
    for (const auto& c : all) {
        best = std::max(best, c.value);
    }
    const Candidate* pick = nullptr;
    for (const auto& c : all) {
        if (c.value >= best - tie_tolerance && (!pick || preferred(c, *pick))) {
            pick = &c;
        }
    }
    Evaluation e = evaluate(ladder, mbs, pick->assignment);
    result.contract = std::move(e.contract);
    result.revenue = e.revenue;
    result.welfare = e.welfare;
    result.sold = e.sold;
    result.chosen_capacity = e.sold;
    result.objective_value = pick->value;
    return result;
}

}  // namespace offload
