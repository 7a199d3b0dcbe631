#include "offload/stochastic.hpp"

#include <cmath>
#include <string>

#include "offload/error.hpp"

namespace offload {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            compensation_ += (sum_ - t) + x;
        } else {
            compensation_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

constexpr double kRelativeCutoff = 1e-18;

double log_pmf(double lambda, int k) {
    return -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
}

void require_count(int k, const char* what) {
    if (k < 0) {
        throw DomainError(std::string(what) + " must be non-negative, got " + std::to_string(k));
    }
}

}  // namespace

PoissonMean::PoissonMean(double value) : value_(value) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw DomainError("Poisson mean must be finite and positive, got " + std::to_string(value));
    }
}

double poisson_pmf(PoissonMean mean, int k) {
    require_count(k, "pmf argument");
    return std::exp(log_pmf(mean.value(), k));
}

double poisson_tail(PoissonMean mean, int k) {
    require_count(k, "tail index");
    if (k == 0) {
        return 1.0;
    }
    const double lambda = mean.value();
    CompensatedSum sum;
    if (k > lambda) {
        // Upper side: terms shrink geometrically because i + 1 > lambda.
        double term = std::exp(log_pmf(lambda, k));
        for (int i = k; term > 0.0; ++i) {
            sum.add(term);
            if (term < kRelativeCutoff * sum.value()) {
                break;
            }
            term *= lambda / (i + 1);
        }
        return sum.value();
    }
    // Lower side: sum P(X = i) for i < k downward from the mode side.
    double term = std::exp(log_pmf(lambda, k - 1));
    for (int i = k - 1; i >= 0 && term > 0.0; --i) {
        sum.add(term);
        if (term < kRelativeCutoff * sum.value()) {
            break;
        }
        term *= i / lambda;
    }
    const double tail = 1.0 - sum.value();
    return tail < 0.0 ? 0.0 : tail;
}

std::vector<double> poisson_tails(PoissonMean mean, int max_k) {
    require_count(max_k, "tail range");
    std::vector<double> tails(static_cast<std::size_t>(max_k) + 1);
    for (int k = 0; k <= max_k; ++k) {
        tails[k] = poisson_tail(mean, k);
    }
    return tails;
}

double uav_utility(PoissonMean type, ChannelCount w) {
    require_count(w, "channel count");
    return utility_curve(type, w).back();
}

std::vector<double> utility_curve(PoissonMean type, ChannelCount max_w) {
    require_count(max_w, "channel count");
    std::vector<double> curve(static_cast<std::size_t>(max_w) + 1, 0.0);
    CompensatedSum sum;
    for (int w = 1; w <= max_w; ++w) {
        sum.add(poisson_tail(type, w));
        curve[w] = sum.value();
    }
    return curve;
}

double mbs_cost(ChannelCount sold, ChannelCount total, PoissonMean load) {
    require_count(sold, "sold channel count");
    require_count(total, "total channel count");
    if (sold > total) {
        throw DomainError("cannot sell " + std::to_string(sold) + " of " + std::to_string(total) +
                          " channels");
    }
    CompensatedSum sum;
    for (int k = total - sold + 1; k <= total; ++k) {
        sum.add(poisson_tail(load, k));
    }
    return sum.value();
}

std::vector<double> cost_curve(ChannelCount total, PoissonMean load) {
    require_count(total, "total channel count");
    std::vector<double> curve(static_cast<std::size_t>(total) + 1, 0.0);
    CompensatedSum sum;
    for (int m = 1; m <= total; ++m) {
        sum.add(poisson_tail(load, total - m + 1));
        curve[m] = sum.value();
    }
    return curve;
}

int saturation_count(PoissonMean mean, double threshold) {
    if (!(threshold > 0.0)) {
        throw DomainError("saturation threshold must be positive");
    }
    int k = 0;
    while (poisson_tail(mean, k) >= threshold) {
        ++k;
    }
    return k;
}

}  // namespace offload
