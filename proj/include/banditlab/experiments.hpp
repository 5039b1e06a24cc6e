#pragma once

// Experiment orchestration. A run (episode) fixes one profile, one
// environment, one reward mode, a horizon and a seed, then loops
// select -> pull -> account regret -> observe. A suite replicates every
// (profile, environment, mode) cell over `runs` seeded episodes and
// reports mean +/- sample std of the error rate, plus a cross-environment
// average row per (mode, profile).
//
// Episode seeds are derive_seed(base_seed, run_index), shared across cells:
// algorithms in the same cell index see common random numbers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "banditlab/agents.hpp"
#include "banditlab/core.hpp"
#include "banditlab/environments.hpp"
#include "banditlab/ingestion.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

struct ExperimentConfig {
  std::vector<std::string> profiles;      // resolvable profile names
  std::vector<std::string> environments;  // dataset ids or "bernoulli:p1,p2,..."
  std::vector<RewardMode> modes;
  std::size_t horizon = 10000;
  std::size_t runs = 10;
  std::uint64_t base_seed = 12345;
  bool jitter_enabled = true;
};

// An environment description that can mint fresh per-episode instances.
// Dataset labels are loaded once and shared read-only across episodes.
struct ResolvedEnv {
  std::string name;
  std::variant<std::vector<double>, LoadedLabels> source;
  std::shared_ptr<const std::vector<ArmId>> shared_labels;  // set for datasets

  std::size_t arm_count() const {
    if (const auto* probs = std::get_if<std::vector<double>>(&source)) return probs->size();
    return std::get<LoadedLabels>(source).num_classes;
  }

  Environment make() const {
    if (const auto* probs = std::get_if<std::vector<double>>(&source)) {
      return BernoulliEnv(*probs);
    }
    return DatasetEnv(shared_labels, std::get<LoadedLabels>(source).num_classes);
  }
};

// Parses "bernoulli:0.9,0.1" into arm probabilities; returns empty if the
// string is not a bernoulli spec.
inline std::optional<std::vector<double>> parse_bernoulli_spec(const std::string& spec) {
  constexpr std::string_view prefix = "bernoulli:";
  if (spec.rfind(prefix, 0) != 0) return std::nullopt;
  std::vector<double> probs;
  std::stringstream ss(spec.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      probs.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad bernoulli arm probability: '" + item + "'");
    }
  }
  if (probs.size() < 2) {
    throw std::invalid_argument("bernoulli spec needs at least 2 arm probabilities: '" + spec + "'");
  }
  return probs;
}

// Splits a comma-separated environment list, re-attaching the numeric
// fragments of embedded bernoulli specs: "cnae9,bernoulli:0.8,0.2" is two
// environments, not three.
inline std::vector<std::string> split_env_list(const std::string& text) {
  auto is_number = [](const std::string& s) {
    if (s.empty()) return false;
    try {
      std::size_t pos = 0;
      (void)std::stod(s, &pos);
      return pos == s.size();
    } catch (const std::exception&) {
      return false;
    }
  };
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    // trim
    std::size_t b = piece.find_first_not_of(" \t");
    std::size_t e = piece.find_last_not_of(" \t");
    piece = b == std::string::npos ? std::string() : piece.substr(b, e - b + 1);
    if (piece.empty()) continue;
    if (!items.empty() && items.back().rfind("bernoulli:", 0) == 0 && is_number(piece)) {
      items.back() += "," + piece;
    } else {
      items.push_back(piece);
    }
  }
  return items;
}

inline ResolvedEnv resolve_environment(const std::string& spec,
                                       const std::filesystem::path& data_dir,
                                       std::vector<std::string>* warnings = nullptr) {
  ResolvedEnv env;
  if (auto probs = parse_bernoulli_spec(spec)) {
    env.name = spec;
    env.source = std::move(*probs);
    return env;
  }
  const DatasetSpec* dataset = find_dataset(spec);
  if (!dataset) {
    std::ostringstream msg;
    msg << "unknown environment '" << spec << "'; expected bernoulli:p1,p2,... or one of:";
    for (const auto& d : registry()) msg << ' ' << d.id;
    throw std::invalid_argument(msg.str());
  }
  if (!std::filesystem::exists(data_dir / dataset->filename)) {
    throw MissingDataError(fetch_instructions(*dataset, data_dir));
  }
  LoadedLabels loaded = load_labels(*dataset, data_dir);
  if (warnings) {
    warnings->insert(warnings->end(), loaded.warnings.begin(), loaded.warnings.end());
  }
  env.name = dataset->id;
  env.shared_labels = std::make_shared<const std::vector<ArmId>>(std::move(loaded.labels));
  loaded.labels = {};
  env.source = std::move(loaded);
  return env;
}

// Builds a ResolvedEnv directly from in-memory labels (fixtures, tests).
inline ResolvedEnv make_label_env(std::string name, std::vector<ArmId> labels,
                                  std::size_t num_classes) {
  ResolvedEnv env;
  env.name = std::move(name);
  env.shared_labels = std::make_shared<const std::vector<ArmId>>(std::move(labels));
  LoadedLabels info;
  info.num_classes = num_classes;
  env.source = std::move(info);
  return env;
}

struct RunResult {
  std::string profile;
  std::string environment;
  RewardMode mode = RewardMode::Normal;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  BiasProfile realized;  // weights actually used (post-jitter)
  double total_regret = 0.0;
  double error_rate = 0.0;  // total_regret / horizon
  std::vector<std::uint64_t> pull_counts;
  std::size_t horizon = 0;
};

// Optional per-step log. Posterior snapshots (the state after the step's
// update) are recorded only when full_state is set; they cost O(T * K).
struct TraceEntry {
  std::size_t step;
  ArmId arm;
  BinaryReward reward;
  double regret;
};

struct Trace {
  bool full_state = false;
  std::vector<TraceEntry> steps;
  std::vector<std::vector<ArmPosterior>> posteriors;
};

inline RunResult run_episode(const BiasProfile& profile, Environment env, RewardMode mode,
                             std::size_t horizon, std::uint64_t seed, bool jitter_enabled,
                             Trace* trace = nullptr) {
  if (horizon == 0) throw std::invalid_argument("run_episode: horizon must be >= 1");

  RandomStream rng(seed);
  const BiasProfile used = jitter_enabled ? jittered(profile, rng) : without_jitter(profile);

  const std::size_t num_arms = arm_count(env);
  AgentState agent = new_agent(num_arms, used);

  RunResult result;
  result.profile = profile.name;
  result.mode = mode;
  result.seed = seed;
  result.realized = used;
  result.horizon = horizon;
  result.pull_counts.assign(num_arms, 0);

  if (trace) {
    trace->steps.clear();
    trace->steps.reserve(horizon);
    trace->posteriors.clear();
    if (trace->full_state) trace->posteriors.reserve(horizon);
  }

  double total_regret = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const ArmId arm = select_arm(agent, rng);
    const EnvStep outcome = env_step(env, arm, rng);
    total_regret += outcome.regret;
    ++result.pull_counts[arm];
    observe(agent, arm, outcome.reward, mode);
    if (trace) {
      trace->steps.push_back(TraceEntry{t, arm, outcome.reward, outcome.regret});
      if (trace->full_state) trace->posteriors.push_back(agent.posteriors);
    }
  }

  result.total_regret = total_regret;
  result.error_rate = total_regret / static_cast<double>(horizon);
  return result;
}

struct AggregateRow {
  std::string profile;
  std::string environment;  // dataset/bernoulli name, or "average"
  RewardMode mode = RewardMode::Normal;
  double mean_error = 0.0;  // in [0, 1]
  double std_error = 0.0;   // sample std, n - 1 denominator
  std::size_t runs = 0;
};

inline constexpr const char* kAverageEnvName = "average";

namespace detail {

// Two-pass mean / sample std.
inline std::pair<double, double> mean_std(const std::vector<double>& values) {
  const std::size_t n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

}  // namespace detail

struct SuiteResult {
  std::vector<RunResult> runs;       // ordered by (profile, environment, mode, run_index)
  std::vector<AggregateRow> rows;    // per-cell rows, then "average" rows per (mode, profile)
};

// Executes every episode of the suite. Episodes are independent given their
// derived seeds, so with jobs > 1 they run on a small worker pool; results
// land in preassigned slots, making the output independent of scheduling.
inline SuiteResult run_suite(const ExperimentConfig& config,
                             const std::vector<ResolvedEnv>& environments,
                             const std::vector<BiasProfile>& profile_table,
                             unsigned jobs = 1) {
  if (config.horizon == 0 || config.runs == 0) {
    throw std::invalid_argument("run_suite: horizon and runs must be >= 1");
  }
  std::vector<const BiasProfile*> profiles;
  for (const auto& name : config.profiles) {
    const BiasProfile* found = nullptr;
    for (const auto& p : profile_table) {
      if (p.name == name) {
        found = &p;
        break;
      }
    }
    if (!found) throw std::invalid_argument("run_suite: profile '" + name + "' not in table");
    profiles.push_back(found);
  }

  struct Job {
    const BiasProfile* profile;
    const ResolvedEnv* env;
    RewardMode mode;
    std::size_t run_index;
  };
  std::vector<Job> todo;
  for (const auto* profile : profiles) {
    for (const auto& env : environments) {
      for (const RewardMode mode : config.modes) {
        for (std::size_t r = 0; r < config.runs; ++r) {
          todo.push_back(Job{profile, &env, mode, r});
        }
      }
    }
  }

  SuiteResult result;
  result.runs.resize(todo.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size() || failed.load()) break;
      const Job& job = todo[i];
      try {
        RunResult run = run_episode(*job.profile, job.env->make(), job.mode, config.horizon,
                                    derive_seed(config.base_seed, job.run_index),
                                    config.jitter_enabled);
        run.environment = job.env->name;
        run.run_index = job.run_index;
        result.runs[i] = std::move(run);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        break;
      }
    }
  };

  const unsigned worker_count =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(todo.size())));
  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Per-cell aggregation in deterministic (environment, mode, profile) order.
  std::size_t cursor = 0;
  std::vector<std::vector<double>> per_cell(profiles.size() * environments.size() *
                                            config.modes.size());
  for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
    for (std::size_t ei = 0; ei < environments.size(); ++ei) {
      for (std::size_t mi = 0; mi < config.modes.size(); ++mi) {
        auto& cell = per_cell[(pi * environments.size() + ei) * config.modes.size() + mi];
        for (std::size_t r = 0; r < config.runs; ++r) {
          cell.push_back(result.runs[cursor++].error_rate);
        }
      }
    }
  }

  for (std::size_t ei = 0; ei < environments.size(); ++ei) {
    for (std::size_t mi = 0; mi < config.modes.size(); ++mi) {
      for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
        const auto& cell = per_cell[(pi * environments.size() + ei) * config.modes.size() + mi];
        const auto [mean, stdev] = detail::mean_std(cell);
        result.rows.push_back(AggregateRow{profiles[pi]->name, environments[ei].name,
                                           config.modes[mi], mean, stdev, cell.size()});
      }
    }
  }

  // Cross-environment average per (mode, profile): all runs pooled.
  for (std::size_t mi = 0; mi < config.modes.size(); ++mi) {
    for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
      std::vector<double> pooled;
      for (std::size_t ei = 0; ei < environments.size(); ++ei) {
        const auto& cell = per_cell[(pi * environments.size() + ei) * config.modes.size() + mi];
        pooled.insert(pooled.end(), cell.begin(), cell.end());
      }
      const auto [mean, stdev] = detail::mean_std(pooled);
      result.rows.push_back(AggregateRow{profiles[pi]->name, kAverageEnvName, config.modes[mi],
                                         mean, stdev, pooled.size()});
    }
  }
  return result;
}

}  // namespace banditlab
