#include "timely/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "timely/rng.hpp"

namespace timely {
namespace {

bool finite(double v) { return std::isfinite(v); }

void check(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

bool Instance::weighted() const {
  return std::any_of(weights.begin(), weights.end(),
                     [](double w) { return w != 1.0; });
}

void validate_instance(const Instance& instance) {
  check(instance.n_aps >= 1, "instance needs at least one AP");
  check(instance.n_clients >= 0, "negative client count");
  check(instance.tau >= 1, "interval length must be at least 1 slot");
  check(static_cast<int>(instance.success.size()) == instance.n_aps,
        "success matrix row count != n_aps");
  for (const auto& row : instance.success) {
    check(static_cast<int>(row.size()) == instance.n_clients,
          "success matrix column count != n_clients");
    for (double p : row)
      check(finite(p) && p >= 0.0 && p <= 1.0,
            "success probability outside [0, 1]");
  }
  check(static_cast<int>(instance.weights.size()) == instance.n_clients,
        "weight count != n_clients");
  for (double w : instance.weights)
    check(finite(w) && w >= 1.0, "client weight below 1");
  if (instance.geometry) {
    const Geometry& g = *instance.geometry;
    check(static_cast<int>(g.client_positions.size()) == instance.n_clients,
          "geometry client position count != n_clients");
    check(static_cast<int>(g.ap_positions.size()) == instance.n_aps,
          "geometry AP position count != n_aps");
    check(finite(g.coverage_radius) && g.coverage_radius > 0.0,
          "coverage radius must be positive");
  }
}

Instance build_instance(int n_aps, int n_clients, int tau,
                        std::vector<std::vector<double>> success,
                        std::vector<double> weights,
                        std::optional<Geometry> geometry) {
  check(n_clients >= 1, "instance needs at least one client");
  Instance instance;
  instance.n_aps = n_aps;
  instance.n_clients = n_clients;
  instance.tau = tau;
  instance.success = std::move(success);
  if (weights.empty()) weights.assign(static_cast<size_t>(n_clients), 1.0);
  instance.weights = std::move(weights);
  instance.geometry = std::move(geometry);
  validate_instance(instance);
  return instance;
}

void validate_partition(const Instance& instance, const Partition& partition) {
  check(static_cast<int>(partition.owner.size()) == instance.n_clients,
        "partition owner count != n_clients");
  check(static_cast<int>(partition.order.size()) == instance.n_aps,
        "partition order list count != n_aps");
  std::vector<int> seen_owner(static_cast<size_t>(instance.n_clients),
                              kUnserved);
  for (int ap = 0; ap < instance.n_aps; ++ap) {
    for (int client : partition.order[static_cast<size_t>(ap)]) {
      check(client >= 0 && client < instance.n_clients,
            "order entry out of range");
      check(seen_owner[static_cast<size_t>(client)] == kUnserved,
            "client listed twice in partition order");
      seen_owner[static_cast<size_t>(client)] = ap;
    }
  }
  for (int j = 0; j < instance.n_clients; ++j) {
    int o = partition.owner[static_cast<size_t>(j)];
    check(o == kUnserved || (o >= 0 && o < instance.n_aps),
          "owner entry out of range");
    check(o == seen_owner[static_cast<size_t>(j)],
          "partition owner and order views disagree");
  }
}

Partition partition_from_owner(const Instance& instance,
                               std::vector<int> owner) {
  Partition partition;
  partition.owner = std::move(owner);
  partition.order.assign(static_cast<size_t>(instance.n_aps), {});
  for (int j = 0; j < instance.n_clients; ++j) {
    int o = partition.owner[static_cast<size_t>(j)];
    if (o != kUnserved) partition.order[static_cast<size_t>(o)].push_back(j);
  }
  for (int ap = 0; ap < instance.n_aps; ++ap) {
    const auto& row = instance.success[static_cast<size_t>(ap)];
    auto& list = partition.order[static_cast<size_t>(ap)];
    std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
      double va = instance.weights[static_cast<size_t>(a)] *
                  row[static_cast<size_t>(a)];
      double vb = instance.weights[static_cast<size_t>(b)] *
                  row[static_cast<size_t>(b)];
      if (va != vb) return va > vb;
      return a < b;
    });
  }
  validate_partition(instance, partition);
  return partition;
}

Instance generate_geometric_instance(std::uint64_t seed, int n_clients,
                                     int tau) {
  check(n_clients >= 1, "instance needs at least one client");
  check(tau >= 1, "interval length must be at least 1 slot");

  const double radius = 1.0 / 3.0;
  const std::array<double, 2> ap0 = {-1.0 / 6.0, 0.0};
  const std::array<double, 2> ap1 = {1.0 / 6.0, 0.0};
  // Enclosing rectangle of the two coverage disks.
  const double x_lo = ap0[0] - radius, x_hi = ap1[0] + radius;
  const double y_lo = -radius, y_hi = radius;

  Geometry geometry;
  geometry.ap_positions = {ap0, ap1};
  geometry.coverage_radius = radius;

  std::vector<std::vector<double>> success(
      2, std::vector<double>(static_cast<size_t>(n_clients), 0.0));

  std::uint64_t counter = 0;
  for (int j = 0; j < n_clients; ++j) {
    double x = 0.0, y = 0.0;
    for (;;) {
      double ux = CounterRng::uniform(seed, 0, CounterRng::kGeometryDomain,
                                      counter++);
      double uy = CounterRng::uniform(seed, 0, CounterRng::kGeometryDomain,
                                      counter++);
      x = x_lo + ux * (x_hi - x_lo);
      y = y_lo + uy * (y_hi - y_lo);
      double d0 = std::hypot(x - ap0[0], y - ap0[1]);
      double d1 = std::hypot(x - ap1[0], y - ap1[1]);
      if (d0 <= radius || d1 <= radius) break;
    }
    geometry.client_positions.push_back({x, y});
    double d0 = std::hypot(x - ap0[0], y - ap0[1]);
    double d1 = std::hypot(x - ap1[0], y - ap1[1]);
    success[0][static_cast<size_t>(j)] = 1.0 - std::min(d0 / radius, 1.0);
    success[1][static_cast<size_t>(j)] = 1.0 - std::min(d1 / radius, 1.0);
  }

  return build_instance(2, n_clients, tau, std::move(success), {},
                        std::move(geometry));
}

std::vector<int> expansion_origins(const std::vector<int>& demand) {
  std::vector<int> origins;
  for (int j = 0; j < static_cast<int>(demand.size()); ++j) {
    check(demand[static_cast<size_t>(j)] >= 0, "negative demand");
    for (int c = 0; c < demand[static_cast<size_t>(j)]; ++c)
      origins.push_back(j);
  }
  return origins;
}

Instance virtual_expand(const Instance& instance,
                        const std::vector<int>& demand) {
  check(static_cast<int>(demand.size()) == instance.n_clients,
        "demand count != n_clients");
  std::vector<int> origins = expansion_origins(demand);

  Instance expanded;
  expanded.n_aps = instance.n_aps;
  expanded.n_clients = static_cast<int>(origins.size());
  expanded.tau = instance.tau;
  expanded.success.assign(static_cast<size_t>(instance.n_aps), {});
  for (int i = 0; i < instance.n_aps; ++i) {
    auto& row = expanded.success[static_cast<size_t>(i)];
    row.reserve(origins.size());
    for (int origin : origins)
      row.push_back(
          instance.success[static_cast<size_t>(i)][static_cast<size_t>(origin)]);
  }
  for (int origin : origins)
    expanded.weights.push_back(instance.weights[static_cast<size_t>(origin)]);
  validate_instance(expanded);
  return expanded;
}

void to_json(nlohmann::json& j, const Geometry& geometry) {
  j = nlohmann::json{{"ap_positions", geometry.ap_positions},
                     {"coverage_radius", geometry.coverage_radius},
                     {"client_positions", geometry.client_positions}};
}

void from_json(const nlohmann::json& j, Geometry& geometry) {
  j.at("ap_positions").get_to(geometry.ap_positions);
  j.at("coverage_radius").get_to(geometry.coverage_radius);
  j.at("client_positions").get_to(geometry.client_positions);
}

void to_json(nlohmann::json& j, const Instance& instance) {
  j = nlohmann::json{{"n_aps", instance.n_aps},
                     {"n_clients", instance.n_clients},
                     {"tau", instance.tau},
                     {"success", instance.success}};
  if (instance.weighted()) j["weights"] = instance.weights;
  if (instance.geometry) j["geometry"] = *instance.geometry;
}

void from_json(const nlohmann::json& j, Instance& instance) {
  instance = Instance{};
  j.at("n_aps").get_to(instance.n_aps);
  j.at("n_clients").get_to(instance.n_clients);
  j.at("tau").get_to(instance.tau);
  j.at("success").get_to(instance.success);
  if (j.contains("weights")) {
    j.at("weights").get_to(instance.weights);
  } else {
    instance.weights.assign(static_cast<size_t>(instance.n_clients), 1.0);
  }
  if (j.contains("geometry"))
    instance.geometry = j.at("geometry").get<Geometry>();
  validate_instance(instance);
}

void to_json(nlohmann::json& j, const Partition& partition) {
  std::vector<int> owner_ids;
  owner_ids.reserve(partition.owner.size());
  for (int o : partition.owner) owner_ids.push_back(o == kUnserved ? 0 : o + 1);
  std::vector<std::vector<int>> order_ids;
  order_ids.reserve(partition.order.size());
  for (const auto& list : partition.order) {
    std::vector<int> ids;
    ids.reserve(list.size());
    for (int c : list) ids.push_back(c + 1);
    order_ids.push_back(std::move(ids));
  }
  j = nlohmann::json{{"owner", owner_ids}, {"order", order_ids}};
}

void from_json(const nlohmann::json& j, Partition& partition) {
  partition = Partition{};
  std::vector<int> owner_ids = j.at("owner").get<std::vector<int>>();
  for (int id : owner_ids)
    partition.owner.push_back(id == 0 ? kUnserved : id - 1);
  auto order_ids = j.at("order").get<std::vector<std::vector<int>>>();
  for (auto& list : order_ids) {
    std::vector<int> clients;
    clients.reserve(list.size());
    for (int id : list) clients.push_back(id - 1);
    partition.order.push_back(std::move(clients));
  }
}

}  // namespace timely
