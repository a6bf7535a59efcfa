#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace timely {

// Planar layout an instance was sampled from, kept so a run can be
// reproduced or plotted later.  Positions are (x, y) pairs.
struct Geometry {
  std::vector<std::array<double, 2>> ap_positions;
  double coverage_radius = 0.0;
  std::vector<std::array<double, 2>> client_positions;
};

// One downlink problem: n_aps access points, n_clients clients, an interval
// of tau slots, and per-(AP, client) delivery probabilities.  success[i][j]
// is the chance a single transmission from AP i reaches client j.  weights
// are per-client priorities, every entry >= 1; all-ones means the plain
// packet count objective.
//
// n_clients == 0 is legal only as the degenerate product of virtual
// expansion with zero demand; the solvers treat it as capacity 0.  The
// validating constructor below rejects it for ordinary inputs.
struct Instance {
  int n_aps = 0;
  int n_clients = 0;
  int tau = 0;
  std::vector<std::vector<double>> success;  // [n_aps][n_clients]
  std::vector<double> weights;               // [n_clients]
  std::optional<Geometry> geometry;

  bool weighted() const;  // true if any weight differs from 1
};

// Owner value for a client no AP serves.
inline constexpr int kUnserved = -1;

// A static assignment: owner[j] is the AP serving client j (or kUnserved),
// and order[i] lists AP i's clients in service order.  The two views must
// agree; validate_partition checks that.
struct Partition {
  std::vector<int> owner;
  std::vector<std::vector<int>> order;
};

// Validates and returns an Instance.  Throws std::invalid_argument on any
// violation: empty dimensions, tau < 1, matrix shape mismatch, probability
// outside [0, 1], weight < 1, or non-finite entries.  Pass an empty weights
// vector to get all-ones.
Instance build_instance(int n_aps, int n_clients, int tau,
                        std::vector<std::vector<double>> success,
                        std::vector<double> weights = {},
                        std::optional<Geometry> geometry = std::nullopt);

// Re-runs the build_instance checks on an already-constructed value
// (useful after JSON parsing).
void validate_instance(const Instance& instance);

// Throws std::invalid_argument unless partition is consistent with the
// instance: owner entries in [0, n_aps) or kUnserved, order lists cover
// exactly the owned clients with no duplicates.
void validate_partition(const Instance& instance, const Partition& partition);

// Builds the partition induced by an owner vector, with each AP's list in
// greedy service order: descending weight * success, ties broken by
// ascending client index.
Partition partition_from_owner(const Instance& instance,
                               std::vector<int> owner);

// Samples a two-AP instance from the documented planar layout: APs at
// (-1/6, 0) and (1/6, 0), coverage radius 1/3, clients uniform over the
// union of the two coverage disks (rejection sampling from the enclosing
// rectangle [-1/2, 1/2] x [-1/3, 1/3]).  Success probability is
// 1 - min(3 * distance, 1), so it decays linearly to zero at the coverage
// edge.  Identical seeds give bit-identical instances.
Instance generate_geometric_instance(std::uint64_t seed, int n_clients,
                                     int tau);

// Replaces each client j by demand[j] identical copies (demand[j] >= 0).
// Copies keep client j's success column and weight, and appear in ascending
// j order, so copy -> original mapping is reconstructible from demand.
// All-zero demand yields the empty-client marker instance.
Instance virtual_expand(const Instance& instance,
                        const std::vector<int>& demand);

// Expanded-column index -> originating client index for the instance
// virtual_expand produces from this demand vector.
std::vector<int> expansion_origins(const std::vector<int>& demand);

// JSON round trip.  Schema:
//   { "n_aps": int, "n_clients": int, "tau": int,
//     "success": [[float]], "weights": [float]?, "geometry": {...}? }
// Weights are omitted when all ones.  Values survive the round trip exactly
// for all finite doubles.
void to_json(nlohmann::json& j, const Instance& instance);
void from_json(const nlohmann::json& j, Instance& instance);
void to_json(nlohmann::json& j, const Geometry& geometry);
void from_json(const nlohmann::json& j, Geometry& geometry);

// Partition JSON uses 1-based AP ids with 0 meaning unserved, matching the
// CLI surface; in-memory indices are 0-based.
void to_json(nlohmann::json& j, const Partition& partition);
void from_json(const nlohmann::json& j, Partition& partition);

}  // namespace timely
