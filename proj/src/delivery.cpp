#include "timely/delivery.hpp"

#include <cmath>
#include <stdexcept>

namespace timely {

double DeliveryDistribution::expected() const {
  double e = 0.0;
  for (size_t k = 1; k < pmf.size(); ++k)
    e += static_cast<double>(k) * pmf[k];
  return e;
}

double DeliveryDistribution::variance() const {
  double e = expected();
  double e2 = 0.0;
  for (size_t k = 1; k < pmf.size(); ++k)
    e2 += static_cast<double>(k) * static_cast<double>(k) * pmf[k];
  return e2 - e * e;
}

std::vector<double> DeliveryDistribution::survival() const {
  // Accumulate the tail from above so survival[i] is a clean suffix sum.
  std::vector<double> s(pmf.size() - 1, 0.0);
  double tail = 0.0;
  for (size_t k = pmf.size(); k-- > 1;) {
    tail += pmf[k];
    s[k - 1] = tail;
  }
  return s;
}

DeliveryDistribution delivery_distribution(std::span<const double> ordered_probs,
                                           int tau) {
  if (tau < 1) throw std::invalid_argument("tau must be at least 1");
  for (double p : ordered_probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("probability outside [0, 1]");

  const size_t q = ordered_probs.size();
  // state[k] = Pr(k packets delivered so far); k == q is absorbing.
  std::vector<double> state(q + 1, 0.0), next(q + 1, 0.0);
  state[0] = 1.0;
  for (int t = 0; t < tau; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (size_t k = 0; k < q; ++k) {
      const double pk = ordered_probs[k];
      next[k] += state[k] * (1.0 - pk);
      next[k + 1] += state[k] * pk;
    }
    next[q] += state[q];
    state.swap(next);
  }
  DeliveryDistribution dist;
  dist.pmf = std::move(state);
  return dist;
}

double expected_deliveries(std::span<const double> ordered_probs, int tau) {
  return delivery_distribution(ordered_probs, tau).expected();
}

double expected_deliveries(std::span<const double> ordered_probs, int tau,
                           std::span<const double> weights) {
  if (weights.size() != ordered_probs.size())
    throw std::invalid_argument("weights length != probability list length");
  std::vector<double> survival =
      delivery_distribution(ordered_probs, tau).survival();
  double total = 0.0;
  for (size_t k = 0; k < survival.size(); ++k) total += weights[k] * survival[k];
  return total;
}

}  // namespace timely
