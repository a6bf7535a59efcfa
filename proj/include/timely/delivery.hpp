#pragma once

#include <span>
#include <vector>

namespace timely {

// Distribution of Y, the number of in-deadline deliveries one AP makes when
// it serves q clients in a fixed order over tau slots, retransmitting each
// packet until it gets through.  pmf[k] = Pr(Y = k) for k = 0..q.
struct DeliveryDistribution {
  std::vector<double> pmf;

  double expected() const;
  double variance() const;
  // survival()[i] = Pr(Y >= i + 1), i.e. the chance the client in service
  // position i + 1 is delivered.  Size q.
  std::vector<double> survival() const;
};

// Exact forward pass over (packets delivered, slots elapsed); O(q * tau).
// Equivalent to Pr(Y >= i) = Pr(G_1 + ... + G_i <= tau) for independent
// geometric service times G_k with success probability ordered_probs[k-1].
// A zero probability entry simply never succeeds (and stalls everything
// behind it, which is why greedy orders put such clients last).
// Preconditions: tau >= 1, each probability in [0, 1].
DeliveryDistribution delivery_distribution(std::span<const double> ordered_probs,
                                           int tau);

// E[Y] for the given service order.
double expected_deliveries(std::span<const double> ordered_probs, int tau);

// Weighted form: sum_k weights[k-1] * Pr(Y >= k), the expected total weight
// of delivered packets.  weights must match ordered_probs in length.
double expected_deliveries(std::span<const double> ordered_probs, int tau,
                           std::span<const double> weights);

}  // namespace timely
