// t3: command-line front end for the timely-throughput toolkit.
//
// Subcommands: gen, solve, lp, round, mdp, greedy, simulate, rateadapt,
// verify, sweep.  Exit codes: 0 success, 1 internal check failed, 2 invalid
// input, 3 solver budget exceeded.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "timely/capacity.hpp"
#include "timely/errors.hpp"
#include "timely/gap.hpp"
#include "timely/instance.hpp"
#include "timely/online.hpp"
#include "timely/rateadapt.hpp"
#include "timely/simulate.hpp"
#include "timely/verify.hpp"

namespace {

using nlohmann::json;

// A guaranteed bound failed on computed values; that is a bug, not bad input.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  return j;
}

timely::Instance load_instance(const std::string& path) {
  auto instance = read_json_file(path).get<timely::Instance>();
  timely::validate_instance(instance);
  return instance;
}

// Writes to --out when given, stdout otherwise.  Opened lazily so failed
// validation never creates or truncates the file.
class Sink {
 public:
  explicit Sink(std::string path) : path_(std::move(path)) {}

  std::ostream& stream() {
    if (!path_.empty() && !file_.is_open()) {
      file_.open(path_);
      if (!file_) throw std::invalid_argument("cannot open " + path_);
    }
    return file_.is_open() ? file_ : std::cout;
  }

 private:
  std::string path_;
  std::ofstream file_;
};

void print_partition(std::ostream& os, const timely::Partition& partition) {
  for (size_t i = 0; i < partition.order.size(); ++i) {
    os << "ap " << i + 1 << ":";
    for (int j : partition.order[i]) os << ' ' << j + 1;
    os << '\n';
  }
  std::vector<int> unserved;
  for (size_t j = 0; j < partition.owner.size(); ++j)
    if (partition.owner[j] == timely::kUnserved)
      unserved.push_back(static_cast<int>(j) + 1);
  if (!unserved.empty()) {
    os << "unserved:";
    for (int j : unserved) os << ' ' << j;
    os << '\n';
  }
}

// --- gen ---------------------------------------------------------------

struct GenArgs {
  std::uint64_t seed = 0;
  int clients = 0;
  int tau = 0;
  std::string out;
};

int run_gen(const GenArgs& args) {
  auto instance =
      timely::generate_geometric_instance(args.seed, args.clients, args.tau);
  Sink sink(args.out);
  sink.stream() << json(instance).dump(2) << '\n';
  return 0;
}

// --- solve ---------------------------------------------------------------

struct SolveArgs {
  std::string instance_path;
  std::string search = "exhaustive";
  std::uint64_t max_evaluations = std::uint64_t{1} << 24;
  int threads = 0;
  bool as_json = false;
  std::string out;
};

timely::SearchOptions search_options(const SolveArgs& args) {
  timely::SearchOptions options;
  options.mode = args.search == "bnb" ? timely::SearchMode::kBranchAndBound
                                      : timely::SearchMode::kExhaustive;
  options.max_evaluations = args.max_evaluations;
  options.threads = args.threads;
  return options;
}

int run_solve(const SolveArgs& args) {
  const auto instance = load_instance(args.instance_path);
  const auto result = timely::exact_capacity(instance, search_options(args));
  Sink sink(args.out);
  if (args.as_json) {
    sink.stream() << json{{"value", result.value},
                          {"partition", result.best_partition},
                          {"per_ap_expected", result.per_ap_expected}}
                         .dump(2)
                  << '\n';
  } else {
    sink.stream() << "value " << fmt(result.value) << '\n';
    print_partition(sink.stream(), result.best_partition);
  }
  return 0;
}

// --- lp ---------------------------------------------------------------

struct LpArgs {
  std::string instance_path;
  bool as_json = false;
  std::string out;
};

int run_lp(const LpArgs& args) {
  const auto instance = load_instance(args.instance_path);
  const auto lp = timely::solve_lp_relaxation(instance);
  Sink sink(args.out);
  if (args.as_json) {
    sink.stream() << json(lp).dump(2) << '\n';
  } else {
    sink.stream() << "objective " << fmt(lp.objective) << '\n'
                  << "z1 " << lp.z_sets.z1.size() << " z2 "
                  << lp.z_sets.z2.size() << " z3 " << lp.z_sets.z3.size()
                  << " z4 " << lp.z_sets.z4.size() << '\n';
  }
  return 0;
}

// --- round ---------------------------------------------------------------

int run_round(const LpArgs& args) {
  const auto instance = load_instance(args.instance_path);
  const auto lp = timely::solve_lp_relaxation(instance);
  const auto rounded = timely::round_down(lp, instance);
  const auto partition = timely::completed_partition(rounded, instance);
  const double value = timely::evaluate_partition(instance, partition);
  Sink sink(args.out);
  if (args.as_json) {
    sink.stream() << json{{"lp_objective", lp.objective},
                          {"rounded_objective", rounded.objective},
                          {"partition", partition},
                          {"policy_value", value}}
                         .dump(2)
                  << '\n';
  } else {
    sink.stream() << "lp_objective " << fmt(lp.objective) << '\n'
                  << "rounded_objective " << fmt(rounded.objective) << '\n'
                  << "policy_value " << fmt(value) << '\n';
  }
  return 0;
}

// --- mdp ---------------------------------------------------------------

struct MdpArgs {
  std::string instance_path;
  std::uint64_t max_state_slots = std::uint64_t{1} << 24;
  int threads = 0;
  bool as_json = false;
  std::string out;
};

int run_mdp(const MdpArgs& args) {
  const auto instance = load_instance(args.instance_path);
  timely::OnlineOptions options;
  options.max_state_slots = args.max_state_slots;
  options.threads = args.threads;
  const double value = timely::mdp_optimal_value(instance, options);
  Sink sink(args.out);
  if (args.as_json)
    sink.stream() << json{{"value", value}}.dump(2) << '\n';
  else
    sink.stream() << "value " << fmt(value) << '\n';
  return 0;
}

// --- greedy ---------------------------------------------------------------

struct GreedyArgs {
  std::string instance_path;
  std::int64_t intervals = 0;  // 0 = exact evaluation
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::uint64_t max_state_slots = std::uint64_t{1} << 24;
  int threads = 0;
  bool as_json = false;
  std::string out;
};

int run_greedy(const GreedyArgs& args) {
  if (args.intervals > 0 && !args.seed_given)
    throw std::invalid_argument("--intervals needs an explicit --seed");
  const auto instance = load_instance(args.instance_path);
  timely::OnlineOptions options;
  options.max_state_slots = args.max_state_slots;
  options.threads = args.threads;
  const auto eval = args.intervals > 0
                        ? timely::GreedyEval::simulated(args.intervals,
                                                        args.seed)
                        : timely::GreedyEval::exact();
  const auto result = timely::greedy_policy_value(instance, eval, options);
  Sink sink(args.out);
  if (args.as_json)
    sink.stream() << json{{"value", result.value},
                          {"tuples_evaluated", result.tuples_evaluated},
                          {"mode",
                           args.intervals > 0 ? "simulated" : "exact"}}
                         .dump(2)
                  << '\n';
  else
    sink.stream() << "value " << fmt(result.value) << '\n'
                  << "tuples " << result.tuples_evaluated << '\n';
  return 0;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string instance_path;
  std::string partition_path;  // empty = use the exact best partition
  std::int64_t intervals = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
  bool as_csv = false;
  bool as_json = false;
  std::string out;
};

int run_simulate(const SimulateArgs& args) {
  const auto instance = load_instance(args.instance_path);
  timely::Partition partition;
  if (args.partition_path.empty()) {
    partition = timely::exact_capacity(instance).best_partition;
  } else {
    partition = read_json_file(args.partition_path).get<timely::Partition>();
    timely::validate_partition(instance, partition);
  }
  const auto metrics = timely::simulate_static(instance, partition,
                                               args.intervals, args.seed,
                                               args.threads);
  Sink sink(args.out);
  if (args.as_json)
    sink.stream() << json(metrics).dump(2) << '\n';
  else if (args.as_csv)
    sink.stream() << metrics.to_csv();
  else
    sink.stream() << "intervals " << metrics.intervals << '\n'
                  << "t3_estimate " << fmt(metrics.t3_estimate) << '\n'
                  << "weighted_estimate " << fmt(metrics.weighted_estimate)
                  << '\n';
  return 0;
}

// --- rateadapt ---------------------------------------------------------------

struct RateadaptArgs {
  std::string tensor_path;
  std::uint64_t max_table_entries = 10'000'000;
  bool brute_force = false;
  std::uint64_t max_nodes = 10'000'000;
  bool as_json = false;
  std::string out;
};

int run_rateadapt(const RateadaptArgs& args) {
  const auto tensor =
      timely::reward_tensor_from_json(read_json_file(args.tensor_path));
  timely::RewardDpOptions options;
  options.max_table_entries = args.max_table_entries;
  const auto result = timely::solve_reward_dp(tensor, options);

  std::optional<double> reference;
  if (args.brute_force) {
    timely::BruteForceOptions brute;
    brute.max_nodes = args.max_nodes;
    reference = timely::brute_force_reward(tensor, brute);
  }

  Sink sink(args.out);
  if (args.as_json) {
    json j{{"value", result.value},
           {"op_count", result.op_count},
           {"allocation", result.allocation}};
    if (reference) j["brute_force"] = *reference;
    sink.stream() << j.dump(2) << '\n';
  } else {
    sink.stream() << "value " << fmt(result.value) << '\n'
                  << "ops " << result.op_count << '\n';
    for (size_t c = 0; c < result.allocation.size(); ++c) {
      sink.stream() << "client " << c + 1 << ":";
      for (int x : result.allocation[c]) sink.stream() << ' ' << x;
      sink.stream() << '\n';
    }
    if (reference)
      sink.stream() << "brute_force " << fmt(*reference) << '\n';
  }
  if (reference && *reference != result.value)
    throw CheckFailed("dynamic program value " + fmt(result.value) +
                      " != brute force " + fmt(*reference));
  return 0;
}

// --- verify ---------------------------------------------------------------

struct VerifyArgs {
  std::string instance_path;
  std::uint64_t max_evaluations = std::uint64_t{1} << 24;
  int threads = 0;
  bool as_csv = false;
  std::int64_t id = 0;
  bool as_json = false;
  std::string out;
};

int run_verify(const VerifyArgs& args) {
  const auto instance = load_instance(args.instance_path);
  timely::SearchOptions search;
  search.max_evaluations = args.max_evaluations;
  search.threads = args.threads;
  const auto report = timely::gap_report(instance, search);
  Sink sink(args.out);
  if (args.as_csv) {
    // One appendable row: instance_id,c_t3,c_det,lb,ub,ok
    sink.stream() << args.id << ',' << fmt(report.c_t3) << ','
                  << fmt(report.c_det) << ',' << fmt(report.lower_bound)
                  << ',' << fmt(report.upper_bound) << ','
                  << (report.lower_ok && report.upper_ok ? 1 : 0) << '\n';
  } else if (args.as_json) {
    sink.stream() << json{{"c_t3", report.c_t3},
                          {"c_det", report.c_det},
                          {"lower_bound", report.lower_bound},
                          {"upper_bound", report.upper_bound},
                          {"lower_ok", report.lower_ok},
                          {"upper_ok", report.upper_ok}}
                         .dump(2)
                  << '\n';
  } else {
    sink.stream() << "c_t3 " << fmt(report.c_t3) << '\n'
                  << "c_det " << fmt(report.c_det) << '\n'
                  << "lower_bound " << fmt(report.lower_bound) << '\n'
                  << "upper_bound " << fmt(report.upper_bound) << '\n'
                  << "lower_ok " << (report.lower_ok ? "yes" : "no") << '\n'
                  << "upper_ok " << (report.upper_ok ? "yes" : "no") << '\n';
  }
  if (!report.lower_ok || !report.upper_ok)
    throw CheckFailed("capacity escaped the packing sandwich: c_t3 " +
                      fmt(report.c_t3) + ", bounds (" +
                      fmt(report.lower_bound) + ", " +
                      fmt(report.upper_bound) + ")");
  return 0;
}

// --- sweep ---------------------------------------------------------------

// Canonical mode order; rows always appear in this order within a
// realization so identical configs give identical bytes.
const std::vector<std::string> kSweepModes = {"exact",  "relax",  "round",
                                              "online", "greedy", "simulate"};

struct SweepArgs {
  int realizations = 0;
  std::uint64_t seed_base = 0;
  int clients = 0;
  int tau = 0;
  std::vector<std::string> modes;
  std::int64_t intervals = 10000;
  int threads = 0;
  bool no_timing = false;
  bool as_json = false;
  std::string out;
};

struct SweepRow {
  int realization = 0;
  std::string mode;
  double value = 0.0;
  long long runtime_ms = 0;
  std::uint64_t seed = 0;
};

std::vector<bool> requested_modes(const std::vector<std::string>& modes) {
  std::vector<bool> wanted(kSweepModes.size(), false);
  for (const auto& name : modes) {
    if (name.empty()) continue;  // tolerate '' and trailing commas
    bool known = false;
    for (size_t i = 0; i < kSweepModes.size(); ++i)
      if (kSweepModes[i] == name) {
        wanted[i] = true;
        known = true;
      }
    if (!known) throw std::invalid_argument("unknown sweep mode " + name);
  }
  return wanted;
}

std::vector<SweepRow> run_realization(const SweepArgs& args,
                                      const std::vector<bool>& wanted,
                                      int realization) {
  const std::uint64_t seed = args.seed_base + static_cast<std::uint64_t>(realization);
  const auto instance =
      timely::generate_geometric_instance(seed, args.clients, args.tau);

  // Outer loop already spans the cores; keep the per-instance solvers serial.
  timely::SearchOptions search;
  search.threads = 1;
  timely::OnlineOptions online;
  online.threads = 1;

  std::optional<double> exact_value;
  std::optional<double> relax_value;
  std::optional<double> round_value;
  std::optional<double> online_value;
  std::optional<double> greedy_value;
  std::optional<timely::Partition> best_partition;

  std::vector<SweepRow> rows;
  for (size_t i = 0; i < kSweepModes.size(); ++i) {
    if (!wanted[i]) continue;
    const auto started = std::chrono::steady_clock::now();
    double value = 0.0;
    if (kSweepModes[i] == "exact") {
      auto result = timely::exact_capacity(instance, search);
      exact_value = value = result.value;
      best_partition = std::move(result.best_partition);
    } else if (kSweepModes[i] == "relax") {
      relax_value = value = timely::solve_gap_exact(instance).objective;
    } else if (kSweepModes[i] == "round") {
      const auto lp = timely::solve_lp_relaxation(instance);
      const auto partition =
          timely::completed_partition(timely::round_down(lp, instance),
                                      instance);
      round_value = value = timely::evaluate_partition(instance, partition);
    } else if (kSweepModes[i] == "online") {
      online_value = value = timely::mdp_optimal_value(instance, online);
    } else if (kSweepModes[i] == "greedy") {
      greedy_value = value =
          timely::greedy_policy_value(instance, timely::GreedyEval::exact(),
                                      online)
              .value;
    } else {  // simulate
      if (!best_partition)
        best_partition = timely::exact_capacity(instance, search).best_partition;
      value = timely::simulate_static(instance, *best_partition,
                                      args.intervals, seed, 1)
                  .t3_estimate;
    }
    const auto elapsed = std::chrono::steady_clock::now() - started;
    SweepRow row;
    row.realization = realization;
    row.mode = kSweepModes[i];
    row.value = value;
    row.runtime_ms =
        args.no_timing
            ? 0
            : std::chrono::duration_cast<std::chrono::milliseconds>(elapsed)
                  .count();
    row.seed = seed;
    rows.push_back(std::move(row));
  }

  // Bound checks on whatever this realization computed.  A failure here
  // is an implementation bug, so the whole sweep aborts.
  const auto where = [&] { return " (realization " + std::to_string(realization) + ")"; };
  if (exact_value && relax_value) {
    const auto report = timely::make_gap_report(*exact_value, *relax_value,
                                                instance.n_aps);
    if (!report.lower_ok || !report.upper_ok)
      throw CheckFailed("capacity " + fmt(*exact_value) +
                        " escaped the packing sandwich (" +
                        fmt(report.lower_bound) + ", " +
                        fmt(report.upper_bound) + ")" + where());
  }
  if (exact_value && online_value && *online_value < *exact_value - 1e-9)
    throw CheckFailed("online optimum " + fmt(*online_value) +
                      " below best static partition " + fmt(*exact_value) +
                      where());
  if (online_value && greedy_value && *greedy_value > *online_value + 1e-9)
    throw CheckFailed("greedy heuristic " + fmt(*greedy_value) +
                      " above online optimum " + fmt(*online_value) + where());
  if (exact_value && round_value) {
    if (*round_value > *exact_value + 1e-9)
      throw CheckFailed("rounded policy " + fmt(*round_value) +
                        " above optimum " + fmt(*exact_value) + where());
    const double n = instance.n_aps;
    if (*exact_value > 11.0 * n / 4.0 + 1e-9 &&
        *round_value <
            timely::rounded_guarantee_floor(*exact_value, instance.n_aps) -
                1e-9)
      throw CheckFailed("rounded policy " + fmt(*round_value) +
                        " below its guarantee floor" + where());
  }
  return rows;
}

int run_sweep(const SweepArgs& args) {
  if (args.realizations < 1)
    throw std::invalid_argument("need at least one realization");
  if (args.clients < 1) throw std::invalid_argument("need at least one client");
  if (args.tau < 1)
    throw std::invalid_argument("interval length must be at least 1 slot");
  if (args.intervals < 1)
    throw std::invalid_argument("need at least one simulated interval");
  // Omitting --modes runs everything; an explicitly empty list runs nothing.
  auto wanted = requested_modes(args.modes);
  if (args.modes.empty()) wanted.assign(kSweepModes.size(), true);

  const int realizations = args.realizations;
  std::vector<std::vector<SweepRow>> results(
      static_cast<size_t>(realizations));
  std::vector<std::exception_ptr> failures(static_cast<size_t>(realizations));

  int workers = args.threads > 0
                    ? args.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, realizations));

  std::atomic<int> next{0};
  auto drain = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= realizations) return;
      try {
        results[static_cast<size_t>(r)] = run_realization(args, wanted, r);
      } catch (...) {
        failures[static_cast<size_t>(r)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(drain);
    for (auto& worker : pool) worker.join();
  }

  // Emit in realization order regardless of which thread ran what.  On a
  // failure, everything before the failing realization is still flushed.
  Sink sink(args.out);
  if (args.as_json) {
    json all = json::array();
    for (int r = 0; r < realizations; ++r) {
      if (failures[static_cast<size_t>(r)]) {
        sink.stream() << all.dump(2) << '\n' << std::flush;
        std::rethrow_exception(failures[static_cast<size_t>(r)]);
      }
      for (const auto& row : results[static_cast<size_t>(r)])
        all.push_back(json{{"realization", row.realization},
                           {"mode", row.mode},
                           {"value", row.value},
                           {"runtime_ms", row.runtime_ms},
                           {"seed", row.seed}});
    }
    sink.stream() << all.dump(2) << '\n';
  } else {
    sink.stream() << "realization,mode,value,runtime_ms,seed\n";
    for (int r = 0; r < realizations; ++r) {
      if (failures[static_cast<size_t>(r)]) {
        sink.stream() << std::flush;
        std::rethrow_exception(failures[static_cast<size_t>(r)]);
      }
      for (const auto& row : results[static_cast<size_t>(r)])
        sink.stream() << row.realization << ',' << row.mode << ','
                      << fmt(row.value) << ',' << row.runtime_ms << ','
                      << row.seed << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timely-throughput solver and simulator toolkit"};
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand(
      "gen", "Sample a two-AP planar instance and print its JSON");
  gen->add_option("--seed", gen_args.seed, "RNG seed")->required();
  gen->add_option("--clients", gen_args.clients, "number of clients")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--tau", gen_args.tau, "slots per interval")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_args.out, "output file (default stdout)");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand(
      "solve", "Best static partition by exhaustive or branch-and-bound search");
  solve->add_option("--instance", solve_args.instance_path,
                    "instance JSON file")
      ->required();
  solve->add_option("--search", solve_args.search,
                    "search strategy: exhaustive or bnb")
      ->check(CLI::IsMember({"exhaustive", "bnb"}));
  solve->add_option("--max-evaluations", solve_args.max_evaluations,
                    "partition evaluation budget");
  solve->add_option("--threads", solve_args.threads,
                    "worker threads (0 = all cores)");
  solve->add_flag("--json", solve_args.as_json, "JSON output");
  solve->add_option("--out", solve_args.out, "output file (default stdout)");

  LpArgs lp_args;
  auto* lp = app.add_subcommand(
      "lp", "LP relaxation of the deterministic packing problem");
  lp->add_option("--instance", lp_args.instance_path, "instance JSON file")
      ->required();
  lp->add_flag("--json", lp_args.as_json, "JSON output");
  lp->add_option("--out", lp_args.out, "output file (default stdout)");

  LpArgs round_args;
  auto* round = app.add_subcommand(
      "round", "Round the LP vertex down and evaluate the induced partition");
  round->add_option("--instance", round_args.instance_path,
                    "instance JSON file")
      ->required();
  round->add_flag("--json", round_args.as_json, "JSON output");
  round->add_option("--out", round_args.out, "output file (default stdout)");

  MdpArgs mdp_args;
  auto* mdp = app.add_subcommand(
      "mdp", "Optimal online (per-slot) value by backward recursion");
  mdp->add_option("--instance", mdp_args.instance_path, "instance JSON file")
      ->required();
  mdp->add_option("--max-state-slots", mdp_args.max_state_slots,
                  "state-sweep budget");
  mdp->add_option("--threads", mdp_args.threads,
                  "worker threads (0 = all cores)");
  mdp->add_flag("--json", mdp_args.as_json, "JSON output");
  mdp->add_option("--out", mdp_args.out, "output file (default stdout)");

  GreedyArgs greedy_args;
  auto* greedy = app.add_subcommand(
      "greedy", "Per-slot greedy heuristic value (exact or simulated)");
  greedy->add_option("--instance", greedy_args.instance_path,
                     "instance JSON file")
      ->required();
  greedy->add_option("--intervals", greedy_args.intervals,
                     "simulate this many intervals instead of exact evaluation");
  auto* greedy_seed =
      greedy->add_option("--seed", greedy_args.seed, "simulation seed");
  greedy->add_option("--max-state-slots", greedy_args.max_state_slots,
                     "state-sweep budget");
  greedy->add_option("--threads", greedy_args.threads,
                     "worker threads (0 = all cores)");
  greedy->add_flag("--json", greedy_args.as_json, "JSON output");
  greedy->add_option("--out", greedy_args.out, "output file (default stdout)");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo run of a static partition");
  simulate->add_option("--instance", simulate_args.instance_path,
                       "instance JSON file")
      ->required();
  simulate->add_option("--partition", simulate_args.partition_path,
                       "partition JSON file (default: solve for the best)");
  simulate->add_option("--intervals", simulate_args.intervals,
                       "intervals to simulate")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", simulate_args.seed, "simulation seed")
      ->required();
  simulate->add_option("--threads", simulate_args.threads,
                       "worker threads (0 = all cores)");
  auto* sim_csv = simulate->add_flag("--csv", simulate_args.as_csv,
                                     "per-client CSV output");
  simulate->add_flag("--json", simulate_args.as_json, "JSON output")
      ->excludes(sim_csv);
  simulate->add_option("--out", simulate_args.out,
                       "output file (default stdout)");

  RateadaptArgs rateadapt_args;
  auto* rateadapt = app.add_subcommand(
      "rateadapt", "Optimal slot allocation for a monotone reward tensor");
  rateadapt->add_option("--tensor", rateadapt_args.tensor_path,
                        "reward tensor JSON file")
      ->required();
  rateadapt->add_option("--max-table-entries",
                        rateadapt_args.max_table_entries,
                        "dynamic-program table budget");
  rateadapt->add_flag("--brute-force", rateadapt_args.brute_force,
                      "cross-check against exhaustive enumeration");
  rateadapt->add_option("--max-nodes", rateadapt_args.max_nodes,
                        "enumeration node budget");
  rateadapt->add_flag("--json", rateadapt_args.as_json, "JSON output");
  rateadapt->add_option("--out", rateadapt_args.out,
                        "output file (default stdout)");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand(
      "verify", "Check the packing sandwich bounds on an instance");
  verify->add_option("--instance", verify_args.instance_path,
                     "instance JSON file")
      ->required();
  verify->add_option("--max-evaluations", verify_args.max_evaluations,
                     "partition evaluation budget");
  verify->add_option("--threads", verify_args.threads,
                     "worker threads (0 = all cores)");
  auto* verify_csv = verify->add_flag(
      "--csv", verify_args.as_csv,
      "one CSV row: instance_id,c_t3,c_det,lb,ub,ok");
  verify->add_option("--id", verify_args.id, "instance id for the CSV row");
  verify->add_flag("--json", verify_args.as_json, "JSON output")
      ->excludes(verify_csv);
  verify->add_option("--out", verify_args.out, "output file (default stdout)");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand(
      "sweep", "Run solver modes over seeded planar instances, emit CSV");
  sweep->add_option("--realizations", sweep_args.realizations,
                    "number of seeded instances")
      ->required();
  sweep->add_option("--seed-base", sweep_args.seed_base,
                    "seed of realization 0; realization r uses seed-base + r")
      ->required();
  sweep->add_option("--clients", sweep_args.clients, "clients per instance")
      ->required();
  sweep->add_option("--tau", sweep_args.tau, "slots per interval")->required();
  sweep->add_option("--modes", sweep_args.modes,
                    "comma-separated subset of exact,relax,round,online,"
                    "greedy,simulate")
      ->delimiter(',');
  sweep->add_option("--intervals", sweep_args.intervals,
                    "intervals per simulate row");
  sweep->add_option("--threads", sweep_args.threads,
                    "parallel realizations (0 = all cores)");
  sweep->add_flag("--no-timing", sweep_args.no_timing,
                  "write runtime_ms as 0 for byte-identical output");
  sweep->add_flag("--json", sweep_args.as_json, "JSON rows instead of CSV");
  sweep->add_option("--out", sweep_args.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  greedy_args.seed_given = greedy_seed->count() > 0;

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (solve->parsed()) return run_solve(solve_args);
    if (lp->parsed()) return run_lp(lp_args);
    if (round->parsed()) return run_round(round_args);
    if (mdp->parsed()) return run_mdp(mdp_args);
    if (greedy->parsed()) return run_greedy(greedy_args);
    if (simulate->parsed()) return run_simulate(simulate_args);
    if (rateadapt->parsed()) return run_rateadapt(rateadapt_args);
    if (verify->parsed()) return run_verify(verify_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
  } catch (const timely::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "malformed JSON: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
