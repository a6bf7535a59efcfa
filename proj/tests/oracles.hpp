#pragma once

// Reference implementations for cross-checking the library.  Everything here
// is deliberately naive and uses a different route than the optimized code:
// delivery laws come from convolving truncated geometric distributions, the
// best partition from trying every owner vector and every service order, the
// packing optimum from enumerating every assignment, the LP optimum from
// enumerating every basis, and the online optimum from a plain memoized
// recursion over (pending set, slots left) that still includes idling.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "timely/instance.hpp"

namespace oracle {

// Pr(first `count` clients of the list are all delivered within tau slots),
// i.e. the survival function of the delivery count at `count`.
inline double survival(const std::vector<double>& probs, size_t count,
                       int tau) {
  // dist[t] = Pr(the first k clients are delivered and consumed t slots)
  std::vector<double> dist(static_cast<size_t>(tau) + 1, 0.0);
  dist[0] = 1.0;
  for (size_t k = 0; k < count; ++k) {
    std::vector<double> next(static_cast<size_t>(tau) + 1, 0.0);
    for (int t = 0; t <= tau; ++t) {
      const double mass = dist[static_cast<size_t>(t)];
      if (mass == 0.0) continue;
      double fail = 1.0;
      for (int g = 1; t + g <= tau; ++g) {
        next[static_cast<size_t>(t + g)] += mass * fail * probs[k];
        fail *= 1.0 - probs[k];
      }
    }
    dist.swap(next);
  }
  double total = 0.0;
  for (double v : dist) total += v;
  return total;
}

inline double expected_deliveries(const std::vector<double>& probs, int tau) {
  double e = 0.0;
  for (size_t i = 1; i <= probs.size(); ++i) e += survival(probs, i, tau);
  return e;
}

// Client at list position i is delivered exactly when at least i clients are.
inline double weighted_expected(const std::vector<double>& probs,
                                const std::vector<double>& weights, int tau) {
  double e = 0.0;
  for (size_t i = 0; i < probs.size(); ++i)
    e += weights[i] * survival(probs, i + 1, tau);
  return e;
}

// Best value one AP can get from serving exactly `clients`, trying every
// service order.
inline double best_list_value(const timely::Instance& instance, int ap,
                              std::vector<int> clients) {
  if (clients.empty()) return 0.0;
  std::sort(clients.begin(), clients.end());
  double best = 0.0;
  do {
    std::vector<double> probs;
    std::vector<double> weights;
    for (int j : clients) {
      probs.push_back(instance.success[static_cast<size_t>(ap)]
                                      [static_cast<size_t>(j)]);
      weights.push_back(instance.weights[static_cast<size_t>(j)]);
    }
    best = std::max(best, weighted_expected(probs, weights, instance.tau));
  } while (std::next_permutation(clients.begin(), clients.end()));
  return best;
}

// Optimum over every owner vector and every per-AP service order.  Leaving
// a client unserved never helps (appending it last never hurts), so plain
// n_aps^n_clients owner enumeration finds the true optimum.
inline double best_partition_value(const timely::Instance& instance) {
  const int n = instance.n_aps;
  const int m = instance.n_clients;
  std::uint64_t space = 1;
  for (int j = 0; j < m; ++j) space *= static_cast<std::uint64_t>(n);

  double best = 0.0;
  std::vector<int> owner(static_cast<size_t>(m), 0);
  for (std::uint64_t code = 0; code < space; ++code) {
    std::uint64_t rest = code;
    for (int j = 0; j < m; ++j) {
      owner[static_cast<size_t>(j)] = static_cast<int>(rest % n);
      rest /= static_cast<std::uint64_t>(n);
    }
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
      std::vector<int> list;
      for (int j = 0; j < m; ++j)
        if (owner[static_cast<size_t>(j)] == i) list.push_back(j);
      value += best_list_value(instance, i, list);
    }
    best = std::max(best, value);
  }
  return best;
}

// Packing optimum by enumerating all (n_aps + 1)^n_clients assignments.
inline double packing_optimum(const timely::Instance& instance) {
  const int n = instance.n_aps;
  const int m = instance.n_clients;
  std::uint64_t space = 1;
  for (int j = 0; j < m; ++j) space *= static_cast<std::uint64_t>(n + 1);

  double best = 0.0;
  for (std::uint64_t code = 0; code < space; ++code) {
    std::uint64_t rest = code;
    std::vector<double> load(static_cast<size_t>(n), 0.0);
    double value = 0.0;
    bool feasible = true;
    for (int j = 0; j < m && feasible; ++j) {
      const int pick = static_cast<int>(rest % (n + 1));
      rest /= static_cast<std::uint64_t>(n + 1);
      if (pick == n) continue;  // skipped
      const double p = instance.success[static_cast<size_t>(pick)]
                                       [static_cast<size_t>(j)];
      if (p <= 0.0) {
        feasible = false;
        break;
      }
      load[static_cast<size_t>(pick)] += 1.0 / p;
      value += instance.weights[static_cast<size_t>(j)];
    }
    for (double l : load)
      if (l > instance.tau + 1e-9) feasible = false;
    if (feasible) best = std::max(best, value);
  }
  return best;
}

// LP optimum of max c.x s.t. a x <= b, x >= 0 by enumerating every basis of
// the slack-extended system.  Exponential and tiny on purpose.
inline double lp_optimum(const std::vector<std::vector<double>>& a,
                         const std::vector<double>& b,
                         const std::vector<double>& c) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(c.size());
  const int cols = n + m;

  double best = 0.0;  // x = 0 is feasible (b >= 0)

  // Enumerate all size-m column subsets.
  std::vector<int> idx(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<size_t>(i)] = i;
  for (;;) {
    // Solve B z = b for the chosen columns with partial-pivot elimination.
    std::vector<std::vector<double>> mat(
        static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m) + 1));
    for (int r = 0; r < m; ++r) {
      for (int k = 0; k < m; ++k) {
        const int col = idx[static_cast<size_t>(k)];
        mat[static_cast<size_t>(r)][static_cast<size_t>(k)] =
            col < n ? a[static_cast<size_t>(r)][static_cast<size_t>(col)]
                    : (col - n == r ? 1.0 : 0.0);
      }
      mat[static_cast<size_t>(r)][static_cast<size_t>(m)] =
          b[static_cast<size_t>(r)];
    }
    bool singular = false;
    for (int col = 0; col < m && !singular; ++col) {
      int piv = col;
      for (int r = col + 1; r < m; ++r)
        if (std::abs(mat[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
            std::abs(mat[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
          piv = r;
      if (std::abs(mat[static_cast<size_t>(piv)][static_cast<size_t>(col)]) <
          1e-11) {
        singular = true;
        break;
      }
      std::swap(mat[static_cast<size_t>(col)], mat[static_cast<size_t>(piv)]);
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f =
            mat[static_cast<size_t>(r)][static_cast<size_t>(col)] /
            mat[static_cast<size_t>(col)][static_cast<size_t>(col)];
        for (int k = col; k <= m; ++k)
          mat[static_cast<size_t>(r)][static_cast<size_t>(k)] -=
              f * mat[static_cast<size_t>(col)][static_cast<size_t>(k)];
      }
    }
    if (!singular) {
      bool feasible = true;
      double objective = 0.0;
      for (int k = 0; k < m; ++k) {
        const double z = mat[static_cast<size_t>(k)][static_cast<size_t>(m)] /
                         mat[static_cast<size_t>(k)][static_cast<size_t>(k)];
        if (z < -1e-9) feasible = false;
        const int col = idx[static_cast<size_t>(k)];
        if (col < n) objective += c[static_cast<size_t>(col)] * z;
      }
      if (feasible) best = std::max(best, objective);
    }

    // Next combination.
    int pos = m - 1;
    while (pos >= 0 && idx[static_cast<size_t>(pos)] == cols - m + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<size_t>(pos)];
    for (int k = pos + 1; k < m; ++k)
      idx[static_cast<size_t>(k)] = idx[static_cast<size_t>(k - 1)] + 1;
  }
  return best;
}

// Expected deliveries of the best coordinated per-slot policy, by memoized
// recursion over (pending mask, slots left).  Target tuples range over
// pending clients plus idling, so it also certifies that idling is useless
// while anything is pending.
class OnlineOptimum {
 public:
  explicit OnlineOptimum(const timely::Instance& instance)
      : instance_(instance),
        table_(static_cast<size_t>(instance.tau + 1)
                   << instance.n_clients,
               -1.0) {}

  double value() {
    return at((std::uint32_t{1} << instance_.n_clients) - 1, instance_.tau);
  }

  double at(std::uint32_t mask, int slots) {
    if (mask == 0 || slots == 0) return 0.0;
    double& slot_value =
        table_[static_cast<size_t>(slots) << instance_.n_clients | mask];
    if (slot_value >= 0.0) return slot_value;

    std::vector<int> pending;
    for (int j = 0; j < instance_.n_clients; ++j)
      if (mask & (std::uint32_t{1} << j)) pending.push_back(j);
    const int choices = static_cast<int>(pending.size()) + 1;  // + idle

    double best = 0.0;
    std::vector<int> pickv(static_cast<size_t>(instance_.n_aps), 0);
    std::uint64_t tuples = 1;
    for (int i = 0; i < instance_.n_aps; ++i)
      tuples *= static_cast<std::uint64_t>(choices);
    for (std::uint64_t t = 0; t < tuples; ++t) {
      std::uint64_t rest = t;
      for (int i = 0; i < instance_.n_aps; ++i) {
        pickv[static_cast<size_t>(i)] = static_cast<int>(rest % choices);
        rest /= static_cast<std::uint64_t>(choices);
      }
      // Expected one-slot reward plus continuation over all 2^n outcomes.
      double total = 0.0;
      const int outcomes = 1 << instance_.n_aps;
      for (int o = 0; o < outcomes; ++o) {
        double prob = 1.0;
        std::uint32_t delivered = 0;
        for (int i = 0; i < instance_.n_aps; ++i) {
          const int pick = pickv[static_cast<size_t>(i)];
          if (pick == static_cast<int>(pending.size())) {
            // Idle never delivers: only the failure bit carries mass.
            if (o & (1 << i)) {
              prob = 0.0;
              break;
            }
            continue;
          }
          const int client = pending[static_cast<size_t>(pick)];
          const double p = instance_.success[static_cast<size_t>(i)]
                                            [static_cast<size_t>(client)];
          if (o & (1 << i)) {
            prob *= p;
            delivered |= std::uint32_t{1} << client;
          } else {
            prob *= 1.0 - p;
          }
        }
        if (prob == 0.0) continue;
        const int count = __builtin_popcount(delivered);
        total += prob * (count + at(mask & ~delivered, slots - 1));
      }
      best = std::max(best, total);
    }
    slot_value = best;
    return slot_value;
  }

 private:
  const timely::Instance& instance_;
  std::vector<double> table_;
};

inline double online_optimum(const timely::Instance& instance) {
  return OnlineOptimum(instance).value();
}

}  // namespace oracle
