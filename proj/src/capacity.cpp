#include "timely/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "timely/delivery.hpp"
#include "timely/errors.hpp"

namespace timely {
namespace {

// Safety margin for branch-and-bound pruning: a node survives unless its
// admissible bound is clearly below the incumbent, so floating point noise
// can only cost extra nodes, never the optimum.
constexpr double kPruneSlack = 1e-9;

// n_aps^n_clients, saturating instead of overflowing.
std::uint64_t partition_space(int n_aps, int n_clients) {
  std::uint64_t space = 1;
  for (int j = 0; j < n_clients; ++j) {
    if (space > (std::numeric_limits<std::uint64_t>::max() >> 6) /
                    static_cast<std::uint64_t>(n_aps))
      return std::numeric_limits<std::uint64_t>::max();
    space *= static_cast<std::uint64_t>(n_aps);
  }
  return space;
}

// Clients in greedy service priority for each AP, precomputed once so a
// candidate owner vector evaluates in O(n_clients + q * tau) without sorting.
std::vector<std::vector<int>> greedy_priority(const Instance& instance) {
  std::vector<std::vector<int>> priority(
      static_cast<size_t>(instance.n_aps));
  for (int i = 0; i < instance.n_aps; ++i) {
    auto& list = priority[static_cast<size_t>(i)];
    list.resize(static_cast<size_t>(instance.n_clients));
    for (int j = 0; j < instance.n_clients; ++j)
      list[static_cast<size_t>(j)] = j;
    const auto& row = instance.success[static_cast<size_t>(i)];
    std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
      double va =
          instance.weights[static_cast<size_t>(a)] * row[static_cast<size_t>(a)];
      double vb =
          instance.weights[static_cast<size_t>(b)] * row[static_cast<size_t>(b)];
      if (va != vb) return va > vb;
      return a < b;
    });
  }
  return priority;
}

struct Evaluator {
  const Instance& instance;
  std::vector<std::vector<int>> priority;
  // Scratch reused across evaluations (single thread each).
  std::vector<double> probs;
  std::vector<double> weights;

  explicit Evaluator(const Instance& inst)
      : instance(inst), priority(greedy_priority(inst)) {}

  double ap_value(int ap, const std::vector<int>& list) {
    if (list.empty()) return 0.0;
    probs.clear();
    weights.clear();
    const auto& row = instance.success[static_cast<size_t>(ap)];
    for (int c : list) {
      probs.push_back(row[static_cast<size_t>(c)]);
      weights.push_back(instance.weights[static_cast<size_t>(c)]);
    }
    return expected_deliveries(probs, instance.tau, weights);
  }

  // Value of the owner vector, visiting APs in index order so every code
  // path accumulates in the same sequence.
  double owner_value(const std::vector<int>& owner,
                     std::vector<double>* per_ap = nullptr) {
    double total = 0.0;
    std::vector<int> list;
    for (int i = 0; i < instance.n_aps; ++i) {
      list.clear();
      for (int c : priority[static_cast<size_t>(i)])
        if (owner[static_cast<size_t>(c)] == i) list.push_back(c);
      double v = ap_value(i, list);
      if (per_ap) (*per_ap)[static_cast<size_t>(i)] = v;
      total += v;
    }
    return total;
  }
};

void decode_owner(std::uint64_t code, int n_aps, std::vector<int>& owner) {
  for (auto& o : owner) {
    o = static_cast<int>(code % static_cast<std::uint64_t>(n_aps));
    code /= static_cast<std::uint64_t>(n_aps);
  }
}

struct BlockBest {
  double value = -1.0;
  std::uint64_t code = 0;
};

BlockBest scan_block(const Instance& instance, std::uint64_t begin,
                     std::uint64_t end) {
  Evaluator eval(instance);
  std::vector<int> owner(static_cast<size_t>(instance.n_clients), 0);
  BlockBest best;
  decode_owner(begin, instance.n_aps, owner);
  for (std::uint64_t code = begin; code < end; ++code) {
    double v = eval.owner_value(owner);
    if (v > best.value) {
      best.value = v;
      best.code = code;
    }
    // Odometer step to the next owner vector.
    for (auto& o : owner) {
      if (++o < instance.n_aps) break;
      o = 0;
    }
  }
  return best;
}

CapacityResult exhaustive_search(const Instance& instance,
                                 const SearchOptions& options) {
  const std::uint64_t space =
      partition_space(instance.n_aps, instance.n_clients);
  if (space > options.max_evaluations)
    throw BudgetExceeded("exhaustive partition search needs " +
                         std::to_string(space) + " evaluations, budget is " +
                         std::to_string(options.max_evaluations));

  int threads = options.threads > 0
                    ? options.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  // Not worth fanning out for tiny spaces.
  if (space < 4096) threads = 1;
  const std::uint64_t per_block =
      (space + static_cast<std::uint64_t>(threads) - 1) /
      static_cast<std::uint64_t>(threads);

  std::vector<BlockBest> results(static_cast<size_t>(threads));
  {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      std::uint64_t begin = per_block * static_cast<std::uint64_t>(t);
      std::uint64_t end = std::min(space, begin + per_block);
      if (begin >= end) {
        results[static_cast<size_t>(t)] = BlockBest{};
        continue;
      }
      pool.emplace_back([&instance, begin, end, t, &results] {
        results[static_cast<size_t>(t)] = scan_block(instance, begin, end);
      });
    }
    for (auto& th : pool) th.join();
  }

  BlockBest best;
  best.value = -1.0;
  for (const auto& r : results) {
    if (r.value > best.value ||
        (r.value == best.value && r.code < best.code)) {
      best = r;
    }
  }

  std::vector<int> owner(static_cast<size_t>(instance.n_clients), 0);
  decode_owner(best.code, instance.n_aps, owner);
  CapacityResult result;
  result.per_ap_expected.assign(static_cast<size_t>(instance.n_aps), 0.0);
  Evaluator eval(instance);
  result.value = eval.owner_value(owner, &result.per_ap_expected);
  result.best_partition = partition_from_owner(instance, std::move(owner));
  return result;
}

// Depth-first search over client assignments with the append-gain bound.
class BoundedSearch {
 public:
  explicit BoundedSearch(const Instance& instance)
      : instance_(instance), eval_(instance) {
    order_ = processing_order();
    root_gain_suffix_ = root_gain_suffix();
    lists_.assign(static_cast<size_t>(instance.n_aps), {});
    ap_value_.assign(static_cast<size_t>(instance.n_aps), 0.0);
    best_owner_.assign(static_cast<size_t>(instance.n_clients), 0);
    owner_.assign(static_cast<size_t>(instance.n_clients), 0);
    seed_incumbent();
  }

  CapacityResult run() {
    descend(0);
    CapacityResult result;
    result.per_ap_expected.assign(static_cast<size_t>(instance_.n_aps), 0.0);
    Evaluator eval(instance_);
    result.value = eval.owner_value(best_owner_, &result.per_ap_expected);
    result.best_partition = partition_from_owner(instance_, best_owner_);
    return result;
  }

 private:
  // Clients with a strong best link first: good incumbents appear early.
  std::vector<int> processing_order() const {
    std::vector<int> order(static_cast<size_t>(instance_.n_clients));
    for (int j = 0; j < instance_.n_clients; ++j)
      order[static_cast<size_t>(j)] = j;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return solo_gain(a) > solo_gain(b);
    });
    return order;
  }

  // Value of client j alone on its best AP; no later insertion can beat it.
  double solo_gain(int j) const {
    double best = 0.0;
    for (int i = 0; i < instance_.n_aps; ++i) {
      double p = instance_.success[static_cast<size_t>(i)][static_cast<size_t>(j)];
      double v = instance_.weights[static_cast<size_t>(j)] *
                 (1.0 - std::pow(1.0 - p, instance_.tau));
      best = std::max(best, v);
    }
    return best;
  }

  std::vector<double> root_gain_suffix() const {
    std::vector<double> suffix(order_.size() + 1, 0.0);
    for (size_t d = order_.size(); d-- > 0;)
      suffix[d] = suffix[d + 1] + solo_gain(order_[d]);
    return suffix;
  }

  // Gain of inserting client j into AP i's current list at its greedy
  // position.  Lists only grow along a branch, so this never understates
  // what later assignment of j could still contribute there.
  double insertion_gain(int i, int j) {
    auto& list = lists_[static_cast<size_t>(i)];
    auto pos = insert_position(i, j);
    list.insert(list.begin() + pos, j);
    double grown = eval_.ap_value(i, list);
    list.erase(list.begin() + pos);
    return grown - ap_value_[static_cast<size_t>(i)];
  }

  std::ptrdiff_t insert_position(int i, int j) const {
    const auto& row = instance_.success[static_cast<size_t>(i)];
    const auto& list = lists_[static_cast<size_t>(i)];
    double vj =
        instance_.weights[static_cast<size_t>(j)] * row[static_cast<size_t>(j)];
    std::ptrdiff_t pos = 0;
    for (int c : list) {
      double vc = instance_.weights[static_cast<size_t>(c)] *
                  row[static_cast<size_t>(c)];
      if (vc > vj || (vc == vj && c < j)) {
        ++pos;
        continue;
      }
      break;
    }
    return pos;
  }

  void seed_incumbent() {
    // Greedy completion: each client to the AP where it adds the most.
    for (size_t d = 0; d < order_.size(); ++d) {
      int j = order_[d];
      int best_ap = 0;
      double best_gain = -1.0;
      for (int i = 0; i < instance_.n_aps; ++i) {
        double g = insertion_gain(i, j);
        if (g > best_gain) {
          best_gain = g;
          best_ap = i;
        }
      }
      assign(best_ap, j);
      owner_[static_cast<size_t>(j)] = best_ap;
    }
    best_value_ = total_value();
    best_owner_ = owner_;
    for (size_t d = order_.size(); d-- > 0;) unassign(owner_[static_cast<size_t>(order_[d])], order_[d]);
  }

  double total_value() const {
    double total = 0.0;
    for (double v : ap_value_) total += v;
    return total;
  }

  void assign(int i, int j) {
    auto& list = lists_[static_cast<size_t>(i)];
    list.insert(list.begin() + insert_position(i, j), j);
    ap_value_[static_cast<size_t>(i)] = eval_.ap_value(i, list);
  }

  void unassign(int i, int j) {
    auto& list = lists_[static_cast<size_t>(i)];
    list.erase(std::find(list.begin(), list.end(), j));
    ap_value_[static_cast<size_t>(i)] = eval_.ap_value(i, list);
  }

  void descend(size_t depth) {
    if (depth == order_.size()) {
      double v = total_value();
      if (v > best_value_) {
        best_value_ = v;
        best_owner_ = owner_;
      }
      return;
    }
    double current = total_value();
    // Cheap root-level bound first, the per-node bound only when needed.
    if (current + root_gain_suffix_[depth] <= best_value_ - kPruneSlack)
      return;
    double remaining = 0.0;
    std::vector<std::pair<double, int>> child_gain(
        static_cast<size_t>(instance_.n_aps));
    for (size_t d = depth; d < order_.size(); ++d) {
      int j = order_[d];
      double best_gain = 0.0;
      for (int i = 0; i < instance_.n_aps; ++i) {
        double g = insertion_gain(i, j);
        if (d == depth)
          child_gain[static_cast<size_t>(i)] = {g, i};
        best_gain = std::max(best_gain, g);
      }
      remaining += best_gain;
    }
    if (current + remaining <= best_value_ - kPruneSlack) return;

    // Most promising AP first; index order on ties keeps runs repeatable.
    std::stable_sort(child_gain.begin(), child_gain.end(),
                     [](const auto& a, const auto& b) {
                       if (a.first != b.first) return a.first > b.first;
                       return a.second < b.second;
                     });
    int j = order_[depth];
    for (const auto& [gain, i] : child_gain) {
      assign(i, j);
      owner_[static_cast<size_t>(j)] = i;
      descend(depth + 1);
      unassign(i, j);
    }
  }

  const Instance& instance_;
  Evaluator eval_;
  std::vector<int> order_;
  std::vector<double> root_gain_suffix_;
  std::vector<std::vector<int>> lists_;
  std::vector<double> ap_value_;
  std::vector<int> owner_;
  std::vector<int> best_owner_;
  double best_value_ = -1.0;
};

}  // namespace

double ap_expected_value(const Instance& instance, int ap,
                         const std::vector<int>& list) {
  Evaluator eval(instance);
  return eval.ap_value(ap, list);
}

double evaluate_partition(const Instance& instance,
                          const Partition& partition) {
  validate_partition(instance, partition);
  Evaluator eval(instance);
  return eval.owner_value(partition.owner);
}

std::vector<double> partition_client_rates(const Instance& instance,
                                           const Partition& partition) {
  validate_partition(instance, partition);
  Partition greedy = partition_from_owner(instance, partition.owner);
  std::vector<double> rates(static_cast<size_t>(instance.n_clients), 0.0);
  std::vector<double> probs;
  for (int i = 0; i < instance.n_aps; ++i) {
    const auto& list = greedy.order[static_cast<size_t>(i)];
    if (list.empty()) continue;
    probs.clear();
    for (int c : list)
      probs.push_back(
          instance.success[static_cast<size_t>(i)][static_cast<size_t>(c)]);
    std::vector<double> survival =
        delivery_distribution(probs, instance.tau).survival();
    for (size_t k = 0; k < list.size(); ++k)
      rates[static_cast<size_t>(list[k])] = survival[k];
  }
  return rates;
}

CapacityResult exact_capacity(const Instance& instance,
                              const SearchOptions& options) {
  if (instance.n_clients == 0) {
    CapacityResult empty;
    empty.per_ap_expected.assign(static_cast<size_t>(instance.n_aps), 0.0);
    empty.best_partition.order.assign(static_cast<size_t>(instance.n_aps), {});
    return empty;
  }
  validate_instance(instance);
  if (options.mode == SearchMode::kExhaustive)
    return exhaustive_search(instance, options);
  return BoundedSearch(instance).run();
}

}  // namespace timely
