#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "timely/instance.hpp"

namespace timely {

// Deterministic-equivalent assignment problem: each AP is a bin of capacity
// tau, client j costs 1/p_ij slots in bin i, the payoff of packing j is its
// weight.  Solutions here are exact optima of that 0-1 problem.
struct GapSolution {
  std::vector<std::vector<int>> x;   // [n_aps][n_clients], entries 0/1
  double objective = 0.0;            // packed weight (count when unweighted)
  std::vector<double> per_bin_load;  // sum of 1/p over packed clients
};

// Client index sets classified from an LP vertex, by column sum and by
// whether the column already contains an integral 1:
//   z1: column sum 0        z2: fractional column sum in (0, 1)
//   z3: sum 1, no unit entry  z4: sum 1 with a unit entry
struct ZSets {
  std::vector<int> z1, z2, z3, z4;
};

struct LpSolution {
  std::vector<std::vector<double>> x;  // [n_aps][n_clients]
  double objective = 0.0;
  ZSets z_sets;
};

struct GapOptions {
  // Owner-vector enumeration runs when (n_aps + 1)^n_clients fits here...
  std::uint64_t brute_force_limit = std::uint64_t{1} << 22;
  // ...otherwise best-first search with the LP bound, capped at this many
  // expanded nodes before giving up with BudgetExceeded.
  std::uint64_t node_budget = std::uint64_t{1} << 20;
};

// Longest prefix of sizes whose running sum stays within capacity tau
// (absolute tolerance 1e-9 so exact fills are not lost to rounding).
// Callers pass sizes in service order; infinite entries never pack.
int pack_count(std::span<const double> sizes, double tau);

// Exact optimum of the 0-1 assignment problem.  Clients with p_ij = 0 can
// never be packed into bin i.  All-zero probability matrices are legal and
// give objective 0.
GapSolution solve_gap_exact(const Instance& instance,
                            const GapOptions& options = {});

// LP relaxation of the same problem (x_ij >= 0 with per-client column sums
// at most 1).  Solved by the in-house simplex, so the returned point is a
// vertex; z-sets are classified with fractionality tolerance 1e-9.
LpSolution solve_lp_relaxation(const Instance& instance);

// Floors every entry of the LP vertex.  Keeps at least objective - n_aps of
// the LP value because a vertex has at most n_aps fractionally-served
// clients (|z2| + |z3| <= n_aps).
GapSolution round_down(const LpSolution& lp, const Instance& instance);

// Turns a packed solution into a full partition: packed clients go to their
// bin's AP, every leftover client is dealt round-robin across APs 0, 1, ...
// in ascending client order, then each AP's list is put in greedy order.
Partition completed_partition(const GapSolution& gap, const Instance& instance);

void to_json(nlohmann::json& j, const GapSolution& gap);
void from_json(const nlohmann::json& j, GapSolution& gap);
void to_json(nlohmann::json& j, const LpSolution& lp);
void from_json(const nlohmann::json& j, LpSolution& lp);

}  // namespace timely
