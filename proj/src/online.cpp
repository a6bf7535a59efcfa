#include "timely/online.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "timely/errors.hpp"
#include "timely/rng.hpp"

namespace timely {
namespace {

// Pending clients in one AP's service preference: descending success
// probability, ties to the lower client index.
std::vector<int> pending_by_preference(const Instance& instance, int ap,
                                       std::uint32_t pending) {
  std::vector<int> list;
  for (int j = 0; j < instance.n_clients; ++j)
    if (pending & (std::uint32_t{1} << j)) list.push_back(j);
  const auto& row = instance.success[static_cast<size_t>(ap)];
  std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
    double pa = row[static_cast<size_t>(a)];
    double pb = row[static_cast<size_t>(b)];
    if (pa != pb) return pa > pb;
    return a < b;
  });
  return list;
}

double tuple_payoff(const Instance& instance, const std::vector<int>& targets) {
  double total = 0.0;
  for (size_t i = 0; i < targets.size(); ++i) {
    const int j = targets[i];
    if (j == kIdle) continue;
    bool first_owner = true;
    for (size_t k = 0; k < i; ++k) {
      if (targets[k] == j) {
        first_owner = false;
        break;
      }
    }
    if (!first_owner) continue;
    double fail = 1.0;
    for (size_t k = i; k < targets.size(); ++k)
      if (targets[k] == j)
        fail *= 1.0 - instance.success[k][static_cast<size_t>(j)];
    total += 1.0 - fail;
  }
  return total;
}

void check_budget(const Instance& instance, const OnlineOptions& options) {
  if (instance.n_clients > 24)
    throw BudgetExceeded("pending-set table needs 2^" +
                         std::to_string(instance.n_clients) + " entries");
  const std::uint64_t states = (std::uint64_t{1} << instance.n_clients) *
                               static_cast<std::uint64_t>(instance.tau);
  if (states > options.max_state_slots)
    throw BudgetExceeded("value sweep needs " + std::to_string(states) +
                         " state-slots, budget is " +
                         std::to_string(options.max_state_slots));
  if (instance.n_aps != 2 && instance.n_clients > 8)
    throw BudgetExceeded(
        "joint-outcome enumeration supports at most 8 clients unless "
        "n_aps == 2");
}

// Best action value for one pending set via the pairwise two-AP recursion.
double best_pair_value(const Instance& instance, std::uint32_t mask,
                       const std::vector<double>& next) {
  const auto& p1 = instance.success[0];
  const auto& p2 = instance.success[1];
  double best = 0.0;
  bool any = false;
  for (int i = 0; i < instance.n_clients; ++i) {
    if (!(mask & (std::uint32_t{1} << i))) continue;
    const std::uint32_t without_i = mask & ~(std::uint32_t{1} << i);
    const double a = p1[static_cast<size_t>(i)];
    for (int j = 0; j < instance.n_clients; ++j) {
      if (!(mask & (std::uint32_t{1} << j))) continue;
      const std::uint32_t without_j = mask & ~(std::uint32_t{1} << j);
      const std::uint32_t without_both = without_i & without_j;
      const double b = p2[static_cast<size_t>(j)];
      const double both_count = i == j ? 1.0 : 2.0;
      double v = a * b * (both_count + next[without_both]) +
                 a * (1.0 - b) * (1.0 + next[without_i]) +
                 (1.0 - a) * b * (1.0 + next[without_j]) +
                 (1.0 - a) * (1.0 - b) * next[mask];
      if (!any || v > best) {
        best = v;
        any = true;
      }
    }
  }
  return best;
}

// Best action value by enumerating every target tuple over the pending set
// and every joint success/failure outcome.
double best_general_value(const Instance& instance, std::uint32_t mask,
                          const std::vector<double>& next) {
  const int n = instance.n_aps;
  std::vector<int> pending;
  for (int j = 0; j < instance.n_clients; ++j)
    if (mask & (std::uint32_t{1} << j)) pending.push_back(j);
  const size_t width = pending.size();

  std::vector<size_t> pick(static_cast<size_t>(n), 0);
  double best = 0.0;
  bool any = false;
  for (;;) {
    double value = 0.0;
    for (std::uint32_t outcome = 0; outcome < (std::uint32_t{1} << n);
         ++outcome) {
      double prob = 1.0;
      std::uint32_t delivered = 0;
      for (int i = 0; i < n; ++i) {
        const int target = pending[pick[static_cast<size_t>(i)]];
        const double p =
            instance.success[static_cast<size_t>(i)][static_cast<size_t>(target)];
        if (outcome & (std::uint32_t{1} << i)) {
          prob *= p;
          delivered |= std::uint32_t{1} << target;
        } else {
          prob *= 1.0 - p;
        }
      }
      if (prob == 0.0) continue;
      value += prob * (std::popcount(delivered) + next[mask & ~delivered]);
    }
    if (!any || value > best) {
      best = value;
      any = true;
    }
    size_t d = 0;
    while (d < static_cast<size_t>(n) && ++pick[d] == width) {
      pick[d] = 0;
      ++d;
    }
    if (d == static_cast<size_t>(n)) break;
  }
  return best;
}

// One backward sweep over every pending set, fanning out across threads
// when the table is large.  compute(mask) must only read the previous
// slot's table.
template <typename Fn>
void sweep(std::uint32_t table_size, int threads, std::vector<double>& out,
           Fn&& compute) {
  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (table_size < (std::uint32_t{1} << 15)) workers = 1;
  if (workers == 1) {
    for (std::uint32_t mask = 0; mask < table_size; ++mask)
      out[mask] = compute(mask);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint32_t chunk =
      (table_size + static_cast<std::uint32_t>(workers) - 1) /
      static_cast<std::uint32_t>(workers);
  for (int w = 0; w < workers; ++w) {
    const std::uint32_t begin = chunk * static_cast<std::uint32_t>(w);
    const std::uint32_t end = std::min(table_size, begin + chunk);
    if (begin >= end) continue;
    pool.emplace_back([&, begin, end] {
      for (std::uint32_t mask = begin; mask < end; ++mask)
        out[mask] = compute(mask);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

double slot_expected_deliveries(const SlotAction& action,
                                const Instance& instance) {
  if (action.targets.size() != static_cast<size_t>(instance.n_aps))
    throw std::invalid_argument("action size != n_aps");
  return tuple_payoff(instance, action.targets);
}

std::vector<double> slot_client_rates(const SlotAction& action,
                                      const Instance& instance) {
  if (action.targets.size() != static_cast<size_t>(instance.n_aps))
    throw std::invalid_argument("action size != n_aps");
  std::vector<double> fail(static_cast<size_t>(instance.n_clients), 1.0);
  std::vector<char> targeted(static_cast<size_t>(instance.n_clients), 0);
  for (int i = 0; i < instance.n_aps; ++i) {
    const int j = action.targets[static_cast<size_t>(i)];
    if (j == kIdle) continue;
    if (j < 0 || j >= instance.n_clients)
      throw std::invalid_argument("action target out of range");
    targeted[static_cast<size_t>(j)] = 1;
    fail[static_cast<size_t>(j)] *=
        1.0 - instance.success[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  std::vector<double> rates(static_cast<size_t>(instance.n_clients), 0.0);
  for (int j = 0; j < instance.n_clients; ++j)
    if (targeted[static_cast<size_t>(j)])
      rates[static_cast<size_t>(j)] = 1.0 - fail[static_cast<size_t>(j)];
  return rates;
}

SlotAction greedy_slot_choice(const Instance& instance, std::uint32_t pending,
                              SlotChoiceStats* stats) {
  if (instance.n_clients > 24)
    throw std::invalid_argument("pending mask supports at most 24 clients");
  SlotAction action;
  action.targets.assign(static_cast<size_t>(instance.n_aps), kIdle);
  if (pending == 0) return action;

  const int n = instance.n_aps;
  std::vector<std::vector<int>> candidates(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> prefs = pending_by_preference(instance, i, pending);
    prefs.resize(std::min(prefs.size(), static_cast<size_t>(n)));
    candidates[static_cast<size_t>(i)] = std::move(prefs);
  }

  std::vector<size_t> pick(static_cast<size_t>(n), 0);
  std::vector<int> tuple(static_cast<size_t>(n), 0);
  std::vector<int> best_tuple;
  double best = -1.0;
  std::uint64_t evaluated = 0;
  for (;;) {
    for (int i = 0; i < n; ++i)
      tuple[static_cast<size_t>(i)] =
          candidates[static_cast<size_t>(i)][pick[static_cast<size_t>(i)]];
    const double value = tuple_payoff(instance, tuple);
    ++evaluated;
    if (value > best || (value == best && tuple < best_tuple)) {
      best = value;
      best_tuple = tuple;
    }
    size_t d = 0;
    while (d < static_cast<size_t>(n) && ++pick[d] == candidates[d].size()) {
      pick[d] = 0;
      ++d;
    }
    if (d == static_cast<size_t>(n)) break;
  }
  if (stats) stats->tuples_evaluated += evaluated;
  action.targets = std::move(best_tuple);
  return action;
}

double mdp_optimal_value(const Instance& instance,
                         const OnlineOptions& options) {
  if (instance.n_clients == 0) return 0.0;
  validate_instance(instance);
  check_budget(instance, options);

  const std::uint32_t table = std::uint32_t{1} << instance.n_clients;
  // next holds the value with t slots already consumed (all zero at the
  // horizon); each pass pulls it one slot earlier.
  std::vector<double> value(table, 0.0), next(table, 0.0);
  for (int t = 0; t < instance.tau; ++t) {
    if (instance.n_aps == 2) {
      sweep(table, options.threads, value, [&](std::uint32_t mask) {
        return mask == 0 ? 0.0 : best_pair_value(instance, mask, next);
      });
    } else {
      sweep(table, options.threads, value, [&](std::uint32_t mask) {
        return mask == 0 ? 0.0 : best_general_value(instance, mask, next);
      });
    }
    value.swap(next);
  }
  return next[table - 1];
}

GreedyPolicyResult greedy_policy_value(const Instance& instance,
                                       const GreedyEval& eval,
                                       const OnlineOptions& options) {
  if (instance.n_clients == 0) return {};
  validate_instance(instance);
  GreedyPolicyResult result;

  if (eval.mode == GreedyEval::Mode::kExact) {
    check_budget(instance, options);
    const std::uint32_t table = std::uint32_t{1} << instance.n_clients;

    // The heuristic looks only at the pending set, so each mask's action
    // can be resolved once up front.
    SlotChoiceStats stats;
    std::vector<SlotAction> actions(table);
    for (std::uint32_t mask = 1; mask < table; ++mask)
      actions[mask] = greedy_slot_choice(instance, mask, &stats);
    result.tuples_evaluated = stats.tuples_evaluated;

    const int n = instance.n_aps;
    std::vector<double> value(table, 0.0), next(table, 0.0);
    for (int t = 0; t < instance.tau; ++t) {
      for (std::uint32_t mask = 1; mask < table; ++mask) {
        const auto& targets = actions[mask].targets;
        double v = 0.0;
        for (std::uint32_t outcome = 0; outcome < (std::uint32_t{1} << n);
             ++outcome) {
          double prob = 1.0;
          std::uint32_t delivered = 0;
          for (int i = 0; i < n; ++i) {
            const int target = targets[static_cast<size_t>(i)];
            const double p = instance.success[static_cast<size_t>(i)]
                                             [static_cast<size_t>(target)];
            if (outcome & (std::uint32_t{1} << i)) {
              prob *= p;
              delivered |= std::uint32_t{1} << target;
            } else {
              prob *= 1.0 - p;
            }
          }
          if (prob == 0.0) continue;
          v += prob * (std::popcount(delivered) + next[mask & ~delivered]);
        }
        value[mask] = v;
      }
      value.swap(next);
    }
    result.value = next[table - 1];
    return result;
  }

  if (eval.intervals < 1)
    throw std::invalid_argument("need at least one interval");
  if (instance.n_clients > 24)
    throw std::invalid_argument("pending mask supports at most 24 clients");
  const std::uint32_t full = (std::uint32_t{1} << instance.n_clients) - 1;
  std::int64_t total = 0;
  SlotChoiceStats stats;
  for (std::int64_t r = 0; r < eval.intervals; ++r) {
    std::uint32_t pending = full;
    for (int slot = 0; slot < instance.tau && pending != 0; ++slot) {
      const SlotAction action = greedy_slot_choice(instance, pending, &stats);
      for (int i = 0; i < instance.n_aps; ++i) {
        const int target = action.targets[static_cast<size_t>(i)];
        if (target == kIdle) continue;
        if (!(pending & (std::uint32_t{1} << target)))
          continue;  // an earlier AP in this slot already delivered it
        const double p =
            instance.success[static_cast<size_t>(i)][static_cast<size_t>(target)];
        const double u = CounterRng::uniform(
            eval.seed, static_cast<std::uint64_t>(r),
            CounterRng::kChannelDomain,
            static_cast<std::uint64_t>(slot) *
                    static_cast<std::uint64_t>(instance.n_aps) +
                static_cast<std::uint64_t>(i));
        if (u < p) {
          pending &= ~(std::uint32_t{1} << target);
          ++total;
        }
      }
    }
  }
  result.value =
      static_cast<double>(total) / static_cast<double>(eval.intervals);
  result.tuples_evaluated = stats.tuples_evaluated;
  return result;
}

}  // namespace timely
