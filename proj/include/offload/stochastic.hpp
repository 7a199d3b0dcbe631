#pragma once

// Poisson tail probabilities and the served-user utility/cost functions
// built on them. All functions are pure.

#include <vector>

namespace offload {

/// Mean of a Poisson active-user count. Always finite and strictly positive.
class PoissonMean {
public:
    explicit PoissonMean(double value);

    double value() const noexcept { return value_; }

    friend bool operator==(PoissonMean, PoissonMean) = default;
    friend auto operator<=>(PoissonMean, PoissonMean) = default;

private:
    double value_;
};

/// Number of fixed-bandwidth channels.
using ChannelCount = int;

double poisson_pmf(PoissonMean mean, int k);

/// P(X >= k) for X ~ Poisson(mean). Sums whichever side of the
/// distribution is smaller, so deep tails keep full relative precision.
double poisson_tail(PoissonMean mean, int k);

/// P(X >= k) for k = 0..max_k.
std::vector<double> poisson_tails(PoissonMean mean, int max_k);

/// Expected number of served users of a UAV with `w` channels:
/// sum over k = 1..w of P(X >= k).
double uav_utility(PoissonMean type, ChannelCount w);

/// U(type, w) for w = 0..max_w.
std::vector<double> utility_curve(PoissonMean type, ChannelCount max_w);

/// Served users the MBS loses by selling `sold` of its `total` channels.
double mbs_cost(ChannelCount sold, ChannelCount total, PoissonMean load);

/// C(m) for m = 0..total.
std::vector<double> cost_curve(ChannelCount total, PoissonMean load);

/// Smallest k with P(X >= k) < threshold.
int saturation_count(PoissonMean mean, double threshold = 1e-12);

}  // namespace offload
