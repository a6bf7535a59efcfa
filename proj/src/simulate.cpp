#include "timely/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "timely/delivery.hpp"
#include "timely/errors.hpp"
#include "timely/rng.hpp"

namespace timely {
namespace {

constexpr double kRowSumTol = 1e-12;

// One interval of the static policy.  Channel draws are indexed by
// slot * n_aps + ap so the key never depends on how far any list got.
void run_interval(const Instance& instance, const Partition& partition,
                  std::uint64_t seed, std::int64_t interval,
                  std::vector<std::int64_t>& delivered) {
  const int n = instance.n_aps;
  for (int ap = 0; ap < n; ++ap) {
    const auto& list = partition.order[static_cast<size_t>(ap)];
    size_t next = 0;
    for (int slot = 0; slot < instance.tau && next < list.size(); ++slot) {
      const int client = list[next];
      const double p =
          instance.success[static_cast<size_t>(ap)][static_cast<size_t>(client)];
      const double u = CounterRng::uniform(
          seed, static_cast<std::uint64_t>(interval),
          CounterRng::kChannelDomain,
          static_cast<std::uint64_t>(slot) * static_cast<std::uint64_t>(n) +
              static_cast<std::uint64_t>(ap));
      if (u < p) {
        ++delivered[static_cast<size_t>(client)];
        ++next;
      }
    }
  }
}

Metrics finish_metrics(const Instance& instance,
                       std::vector<std::int64_t> delivered,
                       std::int64_t intervals, std::uint64_t seed) {
  Metrics metrics;
  metrics.intervals = intervals;
  metrics.seed = seed;
  metrics.per_client_delivered = std::move(delivered);
  std::int64_t total = 0;
  double weighted = 0.0;
  for (size_t j = 0; j < metrics.per_client_delivered.size(); ++j) {
    total += metrics.per_client_delivered[j];
    weighted += instance.weights[j] *
                static_cast<double>(metrics.per_client_delivered[j]);
  }
  metrics.t3_estimate = static_cast<double>(total) /
                        static_cast<double>(intervals);
  metrics.weighted_estimate = weighted / static_cast<double>(intervals);
  return metrics;
}

}  // namespace

std::string Metrics::to_csv() const {
  std::ostringstream out;
  out << "client_id,delivered,intervals\n";
  for (size_t j = 0; j < per_client_delivered.size(); ++j)
    out << (j + 1) << ',' << per_client_delivered[j] << ',' << intervals
        << '\n';
  return out.str();
}

void to_json(nlohmann::json& j, const Metrics& metrics) {
  j = nlohmann::json{{"intervals", metrics.intervals},
                     {"seed", metrics.seed},
                     {"per_client_delivered", metrics.per_client_delivered},
                     {"t3_estimate", metrics.t3_estimate},
                     {"weighted_estimate", metrics.weighted_estimate}};
}

Metrics simulate_static(const Instance& instance, const Partition& partition,
                        std::int64_t intervals, std::uint64_t seed,
                        int threads) {
  validate_instance(instance);
  validate_partition(instance, partition);
  if (intervals < 1) throw std::invalid_argument("need at least one interval");

  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (intervals < 1024) workers = 1;

  std::vector<std::vector<std::int64_t>> counts(
      static_cast<size_t>(workers),
      std::vector<std::int64_t>(static_cast<size_t>(instance.n_clients), 0));
  {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (intervals + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t begin = chunk * w;
      const std::int64_t end = std::min(intervals, begin + chunk);
      if (begin >= end) continue;
      pool.emplace_back([&, w, begin, end] {
        auto& mine = counts[static_cast<size_t>(w)];
        for (std::int64_t r = begin; r < end; ++r)
          run_interval(instance, partition, seed, r, mine);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<std::int64_t> delivered(
      static_cast<size_t>(instance.n_clients), 0);
  for (const auto& mine : counts)
    for (size_t j = 0; j < delivered.size(); ++j) delivered[j] += mine[j];
  return finish_metrics(instance, std::move(delivered), intervals, seed);
}

double interval_variance(const Instance& instance,
                         const Partition& partition) {
  validate_partition(instance, partition);
  double total = 0.0;
  std::vector<double> probs;
  for (int ap = 0; ap < instance.n_aps; ++ap) {
    const auto& list = partition.order[static_cast<size_t>(ap)];
    if (list.empty()) continue;
    probs.clear();
    for (int c : list)
      probs.push_back(
          instance.success[static_cast<size_t>(ap)][static_cast<size_t>(c)]);
    total += delivery_distribution(probs, instance.tau).variance();
  }
  return total;
}

void validate_fsmc(const FsmcSpec& fsmc) {
  if (fsmc.states.empty())
    throw std::invalid_argument("chain needs at least one state");
  if (fsmc.n_aps < 1 || fsmc.n_clients < 1)
    throw std::invalid_argument("chain needs positive AP and client counts");
  const size_t s = fsmc.states.size();
  if (fsmc.transition.size() != s)
    throw std::invalid_argument("transition row count != state count");
  if (fsmc.initial < 0 || fsmc.initial >= static_cast<int>(s))
    throw std::invalid_argument("initial state out of range");
  for (const auto& row : fsmc.transition) {
    if (row.size() != s)
      throw std::invalid_argument("transition column count != state count");
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("transition probability outside [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw std::invalid_argument("transition row does not sum to 1");
  }
  for (const auto& state : fsmc.states) {
    if (static_cast<int>(state.demand.size()) != fsmc.n_clients)
      throw std::invalid_argument("state demand size != n_clients");
    for (int d : state.demand)
      if (d < 0) throw std::invalid_argument("negative demand");
    if (static_cast<int>(state.success.size()) != fsmc.n_aps)
      throw std::invalid_argument("state success row count != n_aps");
    for (const auto& row : state.success) {
      if (static_cast<int>(row.size()) != fsmc.n_clients)
        throw std::invalid_argument("state success column count != n_clients");
      for (double p : row)
        if (!(p >= 0.0 && p <= 1.0))
          throw std::invalid_argument("success probability outside [0, 1]");
    }
  }

  // Irreducibility: every state reachable from state 0 and vice versa.
  auto reachable = [&](bool forward) {
    std::vector<char> seen(s, 0);
    std::vector<size_t> stack = {0};
    seen[0] = 1;
    while (!stack.empty()) {
      size_t u = stack.back();
      stack.pop_back();
      for (size_t v = 0; v < s; ++v) {
        double p = forward ? fsmc.transition[u][v] : fsmc.transition[v][u];
        if (p > 0.0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c; });
  };
  if (!reachable(true) || !reachable(false))
    throw std::invalid_argument("transition chain is not irreducible");
}

std::vector<double> stationary_distribution(const FsmcSpec& fsmc) {
  validate_fsmc(fsmc);
  const size_t s = fsmc.states.size();
  if (s == 1) return {1.0};

  // Solve pi (P - I) = 0 with the last equation replaced by sum(pi) = 1.
  std::vector<std::vector<double>> a(s, std::vector<double>(s + 1, 0.0));
  for (size_t col = 0; col + 1 < s; ++col) {
    for (size_t row = 0; row < s; ++row)
      a[col][row] = fsmc.transition[row][col] - (row == col ? 1.0 : 0.0);
  }
  for (size_t row = 0; row < s; ++row) a[s - 1][row] = 1.0;
  a[s - 1][s] = 1.0;

  // Gaussian elimination with partial pivoting.
  for (size_t k = 0; k < s; ++k) {
    size_t pivot = k;
    for (size_t r = k + 1; r < s; ++r)
      if (std::abs(a[r][k]) > std::abs(a[pivot][k])) pivot = r;
    if (std::abs(a[pivot][k]) < 1e-13)
      throw NumericalFailure("stationary system is numerically singular");
    std::swap(a[k], a[pivot]);
    for (size_t r = 0; r < s; ++r) {
      if (r == k) continue;
      double f = a[r][k] / a[k][k];
      if (f == 0.0) continue;
      for (size_t j = k; j <= s; ++j) a[r][j] -= f * a[k][j];
    }
  }
  std::vector<double> pi(s, 0.0);
  for (size_t k = 0; k < s; ++k) pi[k] = a[k][s] / a[k][k];
  for (double& v : pi)
    if (v < 0.0 && v > -1e-12) v = 0.0;
  return pi;
}

Metrics simulate_fsmc(const FsmcSpec& fsmc,
                      const std::vector<Partition>& partition_per_state,
                      int tau, std::int64_t intervals, std::uint64_t seed) {
  validate_fsmc(fsmc);
  if (tau < 1) throw std::invalid_argument("interval length must be >= 1");
  if (intervals < 1) throw std::invalid_argument("need at least one interval");
  if (partition_per_state.size() != fsmc.states.size())
    throw std::invalid_argument("need one partition per state");

  // Expand each state once, validating its partition against the expansion.
  struct Expanded {
    Instance instance;
    std::vector<int> origins;
  };
  std::vector<Expanded> expanded;
  expanded.reserve(fsmc.states.size());
  for (size_t s = 0; s < fsmc.states.size(); ++s) {
    const FsmcState& state = fsmc.states[s];
    Instance base;
    base.n_aps = fsmc.n_aps;
    base.n_clients = fsmc.n_clients;
    base.tau = tau;
    base.success = state.success;
    base.weights.assign(static_cast<size_t>(fsmc.n_clients), 1.0);
    validate_instance(base);
    Expanded e{virtual_expand(base, state.demand),
               expansion_origins(state.demand)};
    if (e.instance.n_clients > 0)
      validate_partition(e.instance, partition_per_state[s]);
    expanded.push_back(std::move(e));
  }

  std::vector<std::int64_t> delivered(static_cast<size_t>(fsmc.n_clients), 0);
  std::vector<std::int64_t> expanded_delivered;
  int state = fsmc.initial;
  for (std::int64_t r = 0; r < intervals; ++r) {
    const Expanded& e = expanded[static_cast<size_t>(state)];
    if (e.instance.n_clients > 0) {
      expanded_delivered.assign(static_cast<size_t>(e.instance.n_clients), 0);
      run_interval(e.instance, partition_per_state[static_cast<size_t>(state)],
                   seed, r, expanded_delivered);
      for (size_t c = 0; c < expanded_delivered.size(); ++c)
        delivered[static_cast<size_t>(e.origins[c])] += expanded_delivered[c];
    }
    // Chain step, in its own draw domain so channel keys stay aligned with
    // simulate_static.
    const double u = CounterRng::uniform(
        seed, static_cast<std::uint64_t>(r), CounterRng::kChainDomain, 0);
    double acc = 0.0;
    int next = static_cast<int>(fsmc.states.size()) - 1;
    for (size_t v = 0; v < fsmc.states.size(); ++v) {
      acc += fsmc.transition[static_cast<size_t>(state)][v];
      if (u < acc) {
        next = static_cast<int>(v);
        break;
      }
    }
    state = next;
  }

  Metrics metrics;
  metrics.intervals = intervals;
  metrics.seed = seed;
  metrics.per_client_delivered = std::move(delivered);
  std::int64_t total = 0;
  for (std::int64_t d : metrics.per_client_delivered) total += d;
  metrics.t3_estimate =
      static_cast<double>(total) / static_cast<double>(intervals);
  metrics.weighted_estimate = metrics.t3_estimate;
  return metrics;
}

double fsmc_capacity(const FsmcSpec& fsmc, int tau,
                     const SearchOptions& options) {
  if (tau < 1) throw std::invalid_argument("interval length must be >= 1");
  std::vector<double> pi = stationary_distribution(fsmc);
  double capacity = 0.0;
  for (size_t s = 0; s < fsmc.states.size(); ++s) {
    const FsmcState& state = fsmc.states[s];
    Instance base;
    base.n_aps = fsmc.n_aps;
    base.n_clients = fsmc.n_clients;
    base.tau = tau;
    base.success = state.success;
    base.weights.assign(static_cast<size_t>(fsmc.n_clients), 1.0);
    validate_instance(base);
    Instance grown = virtual_expand(base, state.demand);
    capacity += pi[s] * exact_capacity(grown, options).value;
  }
  return capacity;
}

void to_json(nlohmann::json& j, const FsmcSpec& fsmc) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& state : fsmc.states)
    states.push_back(nlohmann::json{{"demand", state.demand},
                                    {"success", state.success}});
  j = nlohmann::json{{"n_aps", fsmc.n_aps},
                     {"n_clients", fsmc.n_clients},
                     {"states", std::move(states)},
                     {"transition", fsmc.transition},
                     {"initial", fsmc.initial}};
}

void from_json(const nlohmann::json& j, FsmcSpec& fsmc) {
  fsmc = FsmcSpec{};
  j.at("n_aps").get_to(fsmc.n_aps);
  j.at("n_clients").get_to(fsmc.n_clients);
  for (const auto& state_json : j.at("states")) {
    FsmcState state;
    state_json.at("demand").get_to(state.demand);
    state_json.at("success").get_to(state.success);
    fsmc.states.push_back(std::move(state));
  }
  j.at("transition").get_to(fsmc.transition);
  if (j.contains("initial")) j.at("initial").get_to(fsmc.initial);
  validate_fsmc(fsmc);
}

}  // namespace timely
