// banditlab command-line front end.
//
//   banditlab profiles [--format text|csv]
//   banditlab datasets [--data-dir DIR]
//   banditlab run   --profile NAME --env SPEC [--mode M] [--horizon N] ...
//   banditlab suite [--config FILE] [--profiles A,B,...] [--envs E1,E2] ...
//
// Exit codes: 0 success, 2 usage or validation error, 3 missing data file,
// 4 internal error. Every flag has a config-file equivalent (flat
// "key = value" text, see README); flags override config values.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "banditlab/config.hpp"
#include "banditlab/core.hpp"
#include "banditlab/experiments.hpp"
#include "banditlab/ingestion.hpp"
#include "banditlab/report.hpp"

namespace {

using namespace banditlab;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitMissingData = 3;
constexpr int kExitInternal = 4;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void print_usage(std::ostream& out) {
  out << "usage: banditlab <command> [flags]\n"
         "\n"
         "commands:\n"
         "  profiles   list the built-in bias profiles (--format text|csv)\n"
         "  datasets   list registered datasets and whether their files are present\n"
         "  run        run one episode: --profile NAME --env SPEC required\n"
         "  suite      run a full suite and write result tables\n"
         "\n"
         "common flags:\n"
         "  --config FILE      flat key = value config; flags override it\n"
         "  --profile NAME     profile for `run` (see `profiles`)\n"
         "  --profiles A,B     profile list for `suite` (default: all built-ins)\n"
         "  --env SPEC         dataset id or bernoulli:p1,p2,... for `run`\n"
         "  --envs S1,S2       environment list for `suite` (default: registry)\n"
         "  --mode M           normal | positive | negative (default normal)\n"
         "  --modes M1,M2      mode list for `suite` (default: all three)\n"
         "  --horizon N        steps per episode (default 10000)\n"
         "  --runs N           episodes per cell for `suite` (default 10)\n"
         "  --seed S           base seed, decimal 64-bit unsigned (default 12345)\n"
         "  --jitter on|off    per-run uniform weight perturbation (default on)\n"
         "  --data-dir DIR     dataset directory (default $BANDITLAB_DATA_DIR or ./data)\n"
         "  --out PATH         run: trace file; suite: output directory (default ./results)\n"
         "  --format csv|md    suite: md additionally writes markdown tables\n"
         "  --jobs N           parallel episodes for `suite` (default: hardware)\n"
         "  --trace            run: write the per-step trace (requires --out)\n"
         "  --raw              suite: also write the per-run raw results file\n";
}

// Flags become key/value pairs; bare --trace / --raw mean "on".
KvMap parse_flags(int argc, char** argv, int first) {
  KvMap flags;
  for (int i = first; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0 || arg.size() <= 2) {
      throw UsageError("unexpected argument '" + arg + "'");
    }
    std::string key = arg.substr(2);
    std::string value;
    const bool bare_ok = key == "trace" || key == "raw" || key == "help";
    if (i + 1 < argc && std::string(argv[i + 1]).rfind("--", 0) != 0) {
      value = argv[++i];
    } else if (bare_ok) {
      value = "on";
    } else {
      throw UsageError("flag --" + key + " needs a value");
    }
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    flags[key] = value;
  }
  return flags;
}

// Config file under the flags, flags on top.
KvMap merge_config(const KvMap& flags) {
  KvMap merged;
  auto it = flags.find("config");
  if (it != flags.end()) merged = load_kv_file(it->second);
  for (const auto& [k, v] : flags) {
    if (k != "config") merged[k] = v;
  }
  return merged;
}

std::string get_or(const KvMap& kv, const std::string& key, const std::string& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

std::filesystem::path data_dir_of(const KvMap& kv) {
  auto it = kv.find("data_dir");
  if (it != kv.end()) return it->second;
  if (const char* env = std::getenv("BANDITLAB_DATA_DIR")) return env;
  return "data";
}

RewardMode parse_mode(const std::string& text) {
  if (auto mode = reward_mode_from_string(text)) return *mode;
  throw UsageError("bad mode '" + text + "' (use normal, positive or negative)");
}

const BiasProfile& lookup_profile(const std::vector<BiasProfile>& table, const std::string& name) {
  for (const auto& p : table) {
    if (p.name == name) return p;
  }
  std::ostringstream msg;
  msg << "unknown profile '" << name << "'; valid names:";
  for (const auto& p : table) msg << ' ' << p.name;
  throw UsageError(msg.str());
}

int cmd_profiles(const KvMap& kv) {
  const auto profiles = profiles_from_config(kv);
  const std::string format = get_or(kv, "format", "text");
  if (format == "csv") {
    std::printf("name,tau,alpha,phi,beta,jitter_tau,jitter_alpha,jitter_phi,jitter_beta\n");
    for (const auto& p : profiles) {
      std::printf("%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.name.c_str(), p.tau,
                  p.alpha, p.phi, p.beta, p.jitter_tau, p.jitter_alpha, p.jitter_phi,
                  p.jitter_beta);
    }
  } else if (format == "text") {
    std::printf("%-8s %10s %10s %10s %10s   %s\n", "name", "tau", "alpha", "phi", "beta",
                "jitter (tau, alpha, phi, beta)");
    for (const auto& p : profiles) {
      std::printf("%-8s %10g %10g %10g %10g   %g, %g, %g, %g\n", p.name.c_str(), p.tau, p.alpha,
                  p.phi, p.beta, p.jitter_tau, p.jitter_alpha, p.jitter_phi, p.jitter_beta);
    }
  } else {
    throw UsageError("bad --format '" + format + "' for profiles (use text or csv)");
  }
  return kExitOk;
}

int cmd_datasets(const KvMap& kv) {
  const auto dir = data_dir_of(kv);
  std::printf("data directory: %s\n", dir.string().c_str());
  std::printf("%-14s %-26s %-8s %-20s %s\n", "id", "name", "classes", "file", "status");
  for (const auto& spec : registry()) {
    const auto path = dir / spec.filename;
    const bool present = std::filesystem::exists(path);
    std::printf("%-14s %-26s %-8zu %-20s %s\n", spec.id.c_str(), spec.display_name.c_str(),
                spec.declared_classes.value_or(0), spec.filename.c_str(),
                present ? "present" : "absent (see `banditlab run --env <id>` for fetch help)");
  }
  return kExitOk;
}

void write_trace_file(const std::filesystem::path& path, const Trace& trace, std::size_t arms) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write trace file " + path.string());
  out << "step,arm,reward,regret";
  for (std::size_t i = 0; i < arms; ++i) out << ",S_" << i << ",F_" << i;
  out << '\n';
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& e = trace.steps[t];
    out << e.step << ',' << e.arm << ',' << (e.reward ? 1 : 0) << ','
        << detail::format_double(e.regret);
    for (const auto& post : trace.posteriors[t]) {
      out << ',' << detail::format_double(post.successes) << ','
          << detail::format_double(post.failures);
    }
    out << '\n';
  }
}

int cmd_run(const KvMap& kv) {
  const auto profiles = profiles_from_config(kv);
  auto it = kv.find("profile");
  if (it == kv.end()) throw UsageError("run: --profile is required");
  const BiasProfile& profile = lookup_profile(profiles, it->second);

  it = kv.find("env");
  if (it == kv.end()) throw UsageError("run: --env is required");
  std::vector<std::string> warnings;
  const ResolvedEnv env = resolve_environment(it->second, data_dir_of(kv), &warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  const RewardMode mode = parse_mode(get_or(kv, "mode", "normal"));
  const std::size_t horizon = parse_u64("horizon", get_or(kv, "horizon", "10000"));
  const std::uint64_t seed = parse_u64("seed", get_or(kv, "seed", "12345"));
  const bool jitter = parse_bool("jitter", get_or(kv, "jitter", "on"));
  const bool want_trace = parse_bool("trace", get_or(kv, "trace", "off"));

  Trace trace;
  trace.full_state = true;
  RunResult result = run_episode(profile, env.make(), mode, horizon, seed, jitter,
                                 want_trace ? &trace : nullptr);
  result.environment = env.name;

  std::printf("profile:      %s\n", result.profile.c_str());
  std::printf("environment:  %s\n", result.environment.c_str());
  std::printf("mode:         %s\n", to_string(result.mode));
  std::printf("horizon:      %zu\n", result.horizon);
  std::printf("seed:         %llu\n", static_cast<unsigned long long>(result.seed));
  std::printf("weights:      tau=%g alpha=%g phi=%g beta=%g%s\n", result.realized.tau,
              result.realized.alpha, result.realized.phi, result.realized.beta,
              jitter ? " (jittered)" : "");
  std::printf("total regret: %.6f\n", result.total_regret);
  std::printf("error rate:   %.2f%%\n", result.error_rate * 100.0);
  std::printf("pull counts: ");
  for (std::size_t i = 0; i < result.pull_counts.size(); ++i) {
    std::printf(" arm%zu=%llu", i, static_cast<unsigned long long>(result.pull_counts[i]));
  }
  std::printf("\n");

  if (want_trace) {
    const std::string out_path = get_or(kv, "out", "trace.csv");
    write_trace_file(out_path, trace, result.pull_counts.size());
    std::printf("trace:        %s (%zu steps)\n", out_path.c_str(), trace.steps.size());
  }
  return kExitOk;
}

int cmd_suite(const KvMap& kv) {
  const auto profile_table = profiles_from_config(kv);

  ExperimentConfig config;
  if (auto it = kv.find("profiles"); it != kv.end()) {
    config.profiles = split_list(it->second);
  } else {
    config.profiles = profile_names();
  }
  for (const auto& name : config.profiles) lookup_profile(profile_table, name);  // validate early

  std::vector<std::string> env_specs;
  if (auto it = kv.find("envs"); it != kv.end()) {
    env_specs = split_env_list(it->second);
  } else if (auto it2 = kv.find("environments"); it2 != kv.end()) {
    env_specs = split_env_list(it2->second);
  } else {
    for (const auto& spec : registry()) env_specs.push_back(spec.id);
  }
  if (env_specs.empty()) throw UsageError("suite: no environments given");

  if (auto it = kv.find("modes"); it != kv.end()) {
    for (const auto& m : split_list(it->second)) config.modes.push_back(parse_mode(m));
  } else {
    config.modes = {RewardMode::Normal, RewardMode::PositiveOnly, RewardMode::NegativeOnly};
  }
  if (auto it = kv.find("mode"); it != kv.end()) config.modes = {parse_mode(it->second)};

  config.horizon = parse_u64("horizon", get_or(kv, "horizon", "10000"));
  config.runs = parse_u64("runs", get_or(kv, "runs", "10"));
  config.base_seed = parse_u64("seed", get_or(kv, "seed", "12345"));
  config.jitter_enabled = parse_bool("jitter", get_or(kv, "jitter", "on"));

  const std::string format = get_or(kv, "format", "csv");
  if (format != "csv" && format != "md") {
    throw UsageError("bad --format '" + format + "' for suite (use csv or md)");
  }
  const bool raw = parse_bool("raw", get_or(kv, "raw", "off"));
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  if (auto it = kv.find("jobs"); it != kv.end()) {
    jobs = static_cast<unsigned>(parse_u64("jobs", it->second));
    if (jobs == 0) throw UsageError("--jobs must be >= 1");
  }

  const auto dir = data_dir_of(kv);
  std::vector<ResolvedEnv> environments;
  std::vector<std::string> warnings;
  for (const auto& spec : env_specs) {
    environments.push_back(resolve_environment(spec, dir, &warnings));
    config.environments.push_back(environments.back().name);
  }
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  const SuiteResult result = run_suite(config, environments, profile_table, jobs);
  const auto files = build_suite_files(config, result, format == "md", raw);

  const std::filesystem::path out_dir = get_or(kv, "out", "results");
  write_files_atomic(out_dir, files);
  for (const auto& [name, content] : files) {
    std::printf("wrote %s (%zu bytes)\n", (out_dir / name).string().c_str(), content.size());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    print_usage(std::cerr);
    return kExitUsage;
  }
  const std::string command = argv[1];
  if (command == "help" || command == "--help" || command == "-h") {
    print_usage(std::cout);
    return kExitOk;
  }
  try {
    const KvMap kv = merge_config(parse_flags(argc, argv, 2));
    if (kv.count("help")) {
      print_usage(std::cout);
      return kExitOk;
    }
    if (command == "profiles") return cmd_profiles(kv);
    if (command == "datasets") return cmd_datasets(kv);
    if (command == "run") return cmd_run(kv);
    if (command == "suite") return cmd_suite(kv);
    throw UsageError("unknown command '" + command + "'");
  } catch (const MissingDataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMissingData;
  } catch (const LoadError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    print_usage(std::cerr);
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}
