#pragma once

#include <span>
#include <vector>

namespace deprec {

// Future-discount factor lambda in (0,1) and depreciation factor gamma in
// [0,1). gamma = 0 recovers the plain discounted payoff.
struct DiscountSpec {
  double lambda = 0.5;
  double gamma = 0.5;

  bool valid() const {
    return lambda > 0.0 && lambda < 1.0 && gamma >= 0.0 && gamma < 1.0;
  }
  void require_valid() const;
};

// values[n] = sum_{k<=n} r_k gamma^(n-k), via the recurrence
// values[n] = gamma * values[n-1] + r_n.
std::vector<double> asset_sequence(std::span<const double> rewards,
                                   double gamma);

struct TruncatedSum {
  double partial_sum;
  double tail_bound;
};

// Truncated discounted depreciating payoff sum_{n<=N} lambda^(n-1) * asset[n]
// with a tail bound valid for any continuation bounded by max|r| of the input.
TruncatedSum discounted_depreciating_truncated(std::span<const double> rewards,
                                               const DiscountSpec& spec);

// N-th Cesaro term of the depreciated asset stream.
double average_depreciating_estimate(std::span<const double> rewards,
                                     double gamma);

// sum_{k<=n} r_k (1 - gamma^(n+1-k)) / (n (1-gamma)); equal to the Cesaro
// term above for every finite sequence. Requires gamma in (0,1).
double lemma1_closed_form(std::span<const double> rewards, double gamma);

// sum_{k<=n} r_k gamma^(n+1-k) / (n (1-gamma)); the vanishing tail that
// separates the depreciating average from the plain average.
double lemma2_tail(std::span<const double> rewards, double gamma);

// Compensated running sum, used for Cesaro averages at N ~ 1e6.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace deprec
