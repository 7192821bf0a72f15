#include "deprec/payoff.hpp"

#include <cmath>
#include <stdexcept>

namespace deprec {

namespace {

void require_gamma_half_open(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in [0,1)");
}

void require_gamma_open(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0,1)");
}

void require_nonempty(std::span<const double> rewards) {
  if (rewards.empty()) throw std::invalid_argument("empty reward sequence");
}

double max_abs(std::span<const double> rewards) {
  double m = 0.0;
  for (double r : rewards) m = std::max(m, std::abs(r));
  return m;
}

}  // namespace

void DiscountSpec::require_valid() const {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("lambda must lie in (0,1)");
  require_gamma_half_open(gamma);
}

std::vector<double> asset_sequence(std::span<const double> rewards,
                                   double gamma) {
  require_gamma_half_open(gamma);
  std::vector<double> values;
  values.reserve(rewards.size());
  double asset = 0.0;
  for (double r : rewards) {
    asset = gamma * asset + r;
    values.push_back(asset);
  }
  return values;
}

TruncatedSum discounted_depreciating_truncated(std::span<const double> rewards,
                                               const DiscountSpec& spec) {
  spec.require_valid();
  require_nonempty(rewards);
  const std::size_t n = rewards.size();
  const bool compensate = n > 10000;
  KahanSum kahan;
  double plain = 0.0;
  double asset = 0.0;
  double weight = 1.0;  // lambda^(n-1)
  for (double r : rewards) {
    asset = spec.gamma * asset + r;
    const double term = weight * asset;
    if (compensate)
      kahan.add(term);
    else
      plain += term;
    weight *= spec.lambda;
  }
  const double partial = compensate ? kahan.value() : plain;
  // weight is now lambda^N; worst case tail for |r| <= max|r|:
  // max|r| * lambda^N / ((1-lambda)(1-lambda*gamma))
  const double tail = max_abs(rewards) * weight /
                      ((1.0 - spec.lambda) * (1.0 - spec.lambda * spec.gamma));
  return {partial, tail};
}

double average_depreciating_estimate(std::span<const double> rewards,
                                     double gamma) {
  require_gamma_half_open(gamma);
  require_nonempty(rewards);
  const bool compensate = rewards.size() > 10000;
  KahanSum kahan;
  double plain = 0.0;
  double asset = 0.0;
  for (double r : rewards) {
    asset = gamma * asset + r;
    if (compensate)
      kahan.add(asset);
    else
      plain += asset;
  }
  const double total = compensate ? kahan.value() : plain;
  return total / static_cast<double>(rewards.size());
}

double lemma1_closed_form(std::span<const double> rewards, double gamma) {
  require_gamma_open(gamma);
  require_nonempty(rewards);
  const std::size_t n = rewards.size();
  const bool compensate = n > 10000;
  KahanSum kahan;
  double plain = 0.0;
  double power = 1.0;  // gamma^(n+1-k), built from k = n downward
  for (std::size_t k = n; k >= 1; --k) {
    power *= gamma;
    const double term = rewards[k - 1] * (1.0 - power);
    if (compensate)
      kahan.add(term);
    else
      plain += term;
  }
  const double total = compensate ? kahan.value() : plain;
  return total / (static_cast<double>(n) * (1.0 - gamma));
}

double lemma2_tail(std::span<const double> rewards, double gamma) {
  require_gamma_open(gamma);
  require_nonempty(rewards);
  const std::size_t n = rewards.size();
  KahanSum kahan;
  double power = 1.0;
  for (std::size_t k = n; k >= 1; --k) {
    power *= gamma;
    if (power == 0.0) break;  // remaining terms underflow
    kahan.add(rewards[k - 1] * power);
  }
  return kahan.value() / (static_cast<double>(n) * (1.0 - gamma));
}

}  // namespace deprec
