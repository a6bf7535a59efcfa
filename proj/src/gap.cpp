#include "timely/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "timely/errors.hpp"
#include "timely/simplex.hpp"

namespace timely {
namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kFracTol = 1e-9;

double slot_cost(double p) {
  return p > 0.0 ? 1.0 / p : std::numeric_limits<double>::infinity();
}

std::uint64_t choice_space(int n_aps, int n_clients) {
  std::uint64_t space = 1;
  const std::uint64_t base = static_cast<std::uint64_t>(n_aps) + 1;
  for (int j = 0; j < n_clients; ++j) {
    if (space > (std::numeric_limits<std::uint64_t>::max() >> 6) / base)
      return std::numeric_limits<std::uint64_t>::max();
    space *= base;
  }
  return space;
}

// LP relaxation restricted to clients[from..), with the given residual bin
// capacities.  Used both for the public relaxation (from = 0, full caps)
// and as the optimistic bound inside best-first search.
SimplexResult sub_lp(const Instance& instance, int from,
                     const std::vector<double>& caps) {
  const int n = instance.n_aps;
  const int m = instance.n_clients;
  // Columns: one variable per (ap, client) pair with p > 0, client >= from.
  std::vector<std::pair<int, int>> vars;
  for (int i = 0; i < n; ++i)
    for (int j = from; j < m; ++j)
      if (instance.success[static_cast<size_t>(i)][static_cast<size_t>(j)] > 0.0)
        vars.emplace_back(i, j);

  std::vector<std::vector<double>> a(
      static_cast<size_t>(n + m - from),
      std::vector<double>(vars.size(), 0.0));
  std::vector<double> b(static_cast<size_t>(n + m - from), 0.0);
  std::vector<double> c(vars.size(), 0.0);
  for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] = caps[static_cast<size_t>(i)];
  for (int j = from; j < m; ++j) b[static_cast<size_t>(n + j - from)] = 1.0;
  for (size_t v = 0; v < vars.size(); ++v) {
    const auto [i, j] = vars[v];
    a[static_cast<size_t>(i)][v] =
        slot_cost(instance.success[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    a[static_cast<size_t>(n + j - from)][v] = 1.0;
    c[v] = instance.weights[static_cast<size_t>(j)];
  }
  SimplexResult lp = solve_max_lp(a, b, c);

  // Re-expand to a dense matrix in the x field for the public caller.
  std::vector<double> dense(static_cast<size_t>(n) * static_cast<size_t>(m),
                            0.0);
  for (size_t v = 0; v < vars.size(); ++v) {
    const auto [i, j] = vars[v];
    dense[static_cast<size_t>(i) * static_cast<size_t>(m) +
          static_cast<size_t>(j)] = lp.x[v];
  }
  lp.x = std::move(dense);
  return lp;
}

struct DfsState {
  const Instance& instance;
  std::vector<double> loads;
  std::vector<int> choice;       // per client: ap index or kUnserved
  std::vector<int> best_choice;
  std::vector<double> weight_suffix;
  double value = 0.0;
  double best = -1.0;

  explicit DfsState(const Instance& inst)
      : instance(inst),
        loads(static_cast<size_t>(inst.n_aps), 0.0),
        choice(static_cast<size_t>(inst.n_clients), kUnserved),
        best_choice(static_cast<size_t>(inst.n_clients), kUnserved),
        weight_suffix(static_cast<size_t>(inst.n_clients) + 1, 0.0) {
    for (int j = inst.n_clients; j-- > 0;)
      weight_suffix[static_cast<size_t>(j)] =
          weight_suffix[static_cast<size_t>(j) + 1] +
          inst.weights[static_cast<size_t>(j)];
  }

  void run(int depth) {
    if (depth == instance.n_clients) {
      if (value > best) {
        best = value;
        best_choice = choice;
      }
      return;
    }
    if (value + weight_suffix[static_cast<size_t>(depth)] <= best) return;
    const double w = instance.weights[static_cast<size_t>(depth)];
    for (int i = 0; i < instance.n_aps; ++i) {
      const double cost = slot_cost(
          instance.success[static_cast<size_t>(i)][static_cast<size_t>(depth)]);
      if (loads[static_cast<size_t>(i)] + cost >
          static_cast<double>(instance.tau) + kFeasTol)
        continue;
      loads[static_cast<size_t>(i)] += cost;
      value += w;
      choice[static_cast<size_t>(depth)] = i;
      run(depth + 1);
      choice[static_cast<size_t>(depth)] = kUnserved;
      value -= w;
      loads[static_cast<size_t>(i)] -= cost;
    }
    run(depth + 1);  // leave this client out
  }
};

GapSolution solution_from_choice(const Instance& instance,
                                 const std::vector<int>& choice) {
  GapSolution gap;
  gap.x.assign(static_cast<size_t>(instance.n_aps),
               std::vector<int>(static_cast<size_t>(instance.n_clients), 0));
  gap.per_bin_load.assign(static_cast<size_t>(instance.n_aps), 0.0);
  gap.objective = 0.0;
  for (int j = 0; j < instance.n_clients; ++j) {
    const int i = choice[static_cast<size_t>(j)];
    if (i == kUnserved) continue;
    gap.x[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
    gap.per_bin_load[static_cast<size_t>(i)] += slot_cost(
        instance.success[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    gap.objective += instance.weights[static_cast<size_t>(j)];
  }
  return gap;
}

struct BfsNode {
  double bound = 0.0;
  double value = 0.0;
  int depth = 0;
  std::uint64_t id = 0;  // insertion order, for a stable pop order on ties
  std::vector<double> loads;
  std::vector<int> choice;
};

struct BfsNodeLess {
  bool operator()(const BfsNode& a, const BfsNode& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

GapSolution best_first_search(const Instance& instance,
                              const GapOptions& options) {
  // Greedy incumbent: cheapest feasible bin in client order.
  double incumbent = 0.0;
  std::vector<int> incumbent_choice(static_cast<size_t>(instance.n_clients),
                                    kUnserved);
  {
    std::vector<double> loads(static_cast<size_t>(instance.n_aps), 0.0);
    for (int j = 0; j < instance.n_clients; ++j) {
      int best_i = kUnserved;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int i = 0; i < instance.n_aps; ++i) {
        double cost = slot_cost(
            instance.success[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        if (loads[static_cast<size_t>(i)] + cost >
            static_cast<double>(instance.tau) + kFeasTol)
          continue;
        if (cost < best_cost) {
          best_cost = cost;
          best_i = i;
        }
      }
      if (best_i != kUnserved) {
        loads[static_cast<size_t>(best_i)] += best_cost;
        incumbent_choice[static_cast<size_t>(j)] = best_i;
        incumbent += instance.weights[static_cast<size_t>(j)];
      }
    }
  }

  std::priority_queue<BfsNode, std::vector<BfsNode>, BfsNodeLess> queue;
  std::uint64_t next_id = 0;
  std::uint64_t pops = 0;

  auto make_node = [&](int depth, double value, std::vector<double> loads,
                       std::vector<int> choice) {
    BfsNode node;
    node.depth = depth;
    node.value = value;
    node.loads = std::move(loads);
    node.choice = std::move(choice);
    std::vector<double> caps(node.loads.size());
    for (size_t i = 0; i < caps.size(); ++i) {
      caps[i] = static_cast<double>(instance.tau) - node.loads[i];
      if (caps[i] < 0.0) caps[i] = 0.0;
    }
    double optimistic =
        depth < instance.n_clients ? sub_lp(instance, depth, caps).objective
                                   : 0.0;
    // Inflate slightly so the bound is optimistic even after rounding.
    node.bound = value + optimistic * (1.0 + 1e-12) + 1e-12;
    node.id = next_id++;
    return node;
  };

  queue.push(make_node(
      0, 0.0, std::vector<double>(static_cast<size_t>(instance.n_aps), 0.0),
      std::vector<int>(static_cast<size_t>(instance.n_clients), kUnserved)));

  double best = incumbent;
  std::vector<int> best_choice = std::move(incumbent_choice);
  while (!queue.empty()) {
    BfsNode node = queue.top();
    queue.pop();
    if (node.bound <= best) break;  // nothing left can improve
    if (++pops > options.node_budget)
      throw BudgetExceeded("assignment search expanded more than " +
                           std::to_string(options.node_budget) + " nodes");
    if (node.depth == instance.n_clients) {
      if (node.value > best) {
        best = node.value;
        best_choice = node.choice;
      }
      continue;
    }
    const int j = node.depth;
    for (int i = 0; i < instance.n_aps; ++i) {
      const double cost = slot_cost(
          instance.success[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      if (node.loads[static_cast<size_t>(i)] + cost >
          static_cast<double>(instance.tau) + kFeasTol)
        continue;
      auto loads = node.loads;
      loads[static_cast<size_t>(i)] += cost;
      auto choice = node.choice;
      choice[static_cast<size_t>(j)] = i;
      BfsNode child =
          make_node(node.depth + 1,
                    node.value + instance.weights[static_cast<size_t>(j)],
                    std::move(loads), std::move(choice));
      if (child.depth == instance.n_clients && child.value > best) {
        best = child.value;
        best_choice = child.choice;
      }
      if (child.bound > best) queue.push(std::move(child));
    }
    BfsNode skip = make_node(node.depth + 1, node.value, node.loads,
                             node.choice);
    if (skip.depth == instance.n_clients && skip.value > best) {
      best = skip.value;
      best_choice = skip.choice;
    }
    if (skip.bound > best) queue.push(std::move(skip));
  }
  return solution_from_choice(instance, best_choice);
}

}  // namespace

int pack_count(std::span<const double> sizes, double tau) {
  double sum = 0.0;
  int count = 0;
  for (double s : sizes) {
    if (!(s > 0.0)) throw std::invalid_argument("sizes must be positive");
    sum += s;
    if (sum > tau + kFeasTol) break;
    ++count;
  }
  return count;
}

GapSolution solve_gap_exact(const Instance& instance,
                            const GapOptions& options) {
  if (instance.n_clients == 0) {
    GapSolution empty;
    empty.per_bin_load.assign(static_cast<size_t>(instance.n_aps), 0.0);
    empty.x.assign(static_cast<size_t>(instance.n_aps), {});
    return empty;
  }
  validate_instance(instance);
  if (choice_space(instance.n_aps, instance.n_clients) <=
      options.brute_force_limit) {
    DfsState dfs(instance);
    dfs.run(0);
    return solution_from_choice(instance, dfs.best_choice);
  }
  return best_first_search(instance, options);
}

LpSolution solve_lp_relaxation(const Instance& instance) {
  validate_instance(instance);
  const int n = instance.n_aps;
  const int m = instance.n_clients;
  std::vector<double> caps(static_cast<size_t>(n),
                           static_cast<double>(instance.tau));
  SimplexResult lp = sub_lp(instance, 0, caps);

  LpSolution solution;
  solution.objective = lp.objective;
  solution.x.assign(static_cast<size_t>(n),
                    std::vector<double>(static_cast<size_t>(m), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      solution.x[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          lp.x[static_cast<size_t>(i) * static_cast<size_t>(m) +
               static_cast<size_t>(j)];

  for (int j = 0; j < m; ++j) {
    double col = 0.0;
    bool unit = false;
    for (int i = 0; i < n; ++i) {
      double v = solution.x[static_cast<size_t>(i)][static_cast<size_t>(j)];
      col += v;
      if (v >= 1.0 - kFracTol) unit = true;
    }
    if (col <= kFracTol)
      solution.z_sets.z1.push_back(j);
    else if (unit)
      solution.z_sets.z4.push_back(j);
    else if (col >= 1.0 - kFracTol)
      solution.z_sets.z3.push_back(j);
    else
      solution.z_sets.z2.push_back(j);
  }
  return solution;
}

GapSolution round_down(const LpSolution& lp, const Instance& instance) {
  GapSolution gap;
  gap.x.assign(static_cast<size_t>(instance.n_aps),
               std::vector<int>(static_cast<size_t>(instance.n_clients), 0));
  gap.per_bin_load.assign(static_cast<size_t>(instance.n_aps), 0.0);
  for (int i = 0; i < instance.n_aps; ++i) {
    for (int j = 0; j < instance.n_clients; ++j) {
      if (lp.x[static_cast<size_t>(i)][static_cast<size_t>(j)] >=
          1.0 - kFracTol) {
        gap.x[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
        gap.per_bin_load[static_cast<size_t>(i)] += slot_cost(
            instance.success[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        gap.objective += instance.weights[static_cast<size_t>(j)];
      }
    }
  }
  return gap;
}

Partition completed_partition(const GapSolution& gap,
                              const Instance& instance) {
  std::vector<int> owner(static_cast<size_t>(instance.n_clients), kUnserved);
  for (int i = 0; i < instance.n_aps; ++i)
    for (int j = 0; j < instance.n_clients; ++j)
      if (gap.x[static_cast<size_t>(i)][static_cast<size_t>(j)] == 1)
        owner[static_cast<size_t>(j)] = i;
  int next_ap = 0;
  for (int j = 0; j < instance.n_clients; ++j) {
    if (owner[static_cast<size_t>(j)] != kUnserved) continue;
    owner[static_cast<size_t>(j)] = next_ap;
    next_ap = (next_ap + 1) % instance.n_aps;
  }
  return partition_from_owner(instance, std::move(owner));
}

void to_json(nlohmann::json& j, const GapSolution& gap) {
  j = nlohmann::json{{"x", gap.x},
                     {"objective", gap.objective},
                     {"per_bin_load", gap.per_bin_load}};
}

void from_json(const nlohmann::json& j, GapSolution& gap) {
  j.at("x").get_to(gap.x);
  j.at("objective").get_to(gap.objective);
  j.at("per_bin_load").get_to(gap.per_bin_load);
}

namespace {

std::vector<int> ids_from(const std::vector<int>& zero_based) {
  std::vector<int> ids;
  ids.reserve(zero_based.size());
  for (int j : zero_based) ids.push_back(j + 1);
  return ids;
}

std::vector<int> ids_to(const std::vector<int>& one_based) {
  std::vector<int> zs;
  zs.reserve(one_based.size());
  for (int j : one_based) zs.push_back(j - 1);
  return zs;
}

}  // namespace

void to_json(nlohmann::json& j, const LpSolution& lp) {
  j = nlohmann::json{{"x", lp.x},
                     {"objective", lp.objective},
                     {"z_sets",
                      {{"z1", ids_from(lp.z_sets.z1)},
                       {"z2", ids_from(lp.z_sets.z2)},
                       {"z3", ids_from(lp.z_sets.z3)},
                       {"z4", ids_from(lp.z_sets.z4)}}}};
}

void from_json(const nlohmann::json& j, LpSolution& lp) {
  j.at("x").get_to(lp.x);
  j.at("objective").get_to(lp.objective);
  lp.z_sets.z1 = ids_to(j.at("z_sets").at("z1").get<std::vector<int>>());
  lp.z_sets.z2 = ids_to(j.at("z_sets").at("z2").get<std::vector<int>>());
  lp.z_sets.z3 = ids_to(j.at("z_sets").at("z3").get<std::vector<int>>());
  lp.z_sets.z4 = ids_to(j.at("z_sets").at("z4").get<std::vector<int>>());
}

}  // namespace timely
