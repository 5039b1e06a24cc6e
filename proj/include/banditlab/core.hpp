#pragma once

// Core domain types: bias profiles, per-arm Beta posteriors, reward modes,
// and the weighted posterior updates
//
//   on success:  S <- max(tau * S + alpha, eps)
//   on failure:  F <- max(phi * F + beta,  eps)
//
// With all four weights at 1 these reduce to the classic +1 Bernoulli
// Thompson Sampling increments. The eps floor keeps the Beta shape
// parameters valid when jitter drives a weight to zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

// Smallest admissible weight or Beta shape.
inline constexpr double kEpsilon = 1e-9;

// Largest admissible Beta shape. Jitter can push tau or phi above 1 (the
// published intervals allow 1 +/- 0.1), making the counter growth
// exponential; saturating here keeps every update finite, as the posterior
// contract requires. At this magnitude Beta(S, F) is already numerically
// indistinguishable from a point mass.
inline constexpr double kMaxShape = 1e300;

using ArmId = std::size_t;
using BinaryReward = bool;

enum class RewardMode { Normal, PositiveOnly, NegativeOnly };

inline const char* to_string(RewardMode mode) {
  switch (mode) {
    case RewardMode::Normal: return "normal";
    case RewardMode::PositiveOnly: return "positive";
    case RewardMode::NegativeOnly: return "negative";
  }
  return "?";
}

inline std::optional<RewardMode> reward_mode_from_string(std::string_view s) {
  if (s == "normal") return RewardMode::Normal;
  if (s == "positive") return RewardMode::PositiveOnly;
  if (s == "negative") return RewardMode::NegativeOnly;
  return std::nullopt;
}

// A named weighting of reward history. tau/phi scale the accumulated
// positive/negative counters, alpha/beta weight the incoming reward.
// The jitter_* fields are half-widths of the per-run uniform perturbation
// applied to each weight; zero means the weight is used as-is.
struct BiasProfile {
  std::string name;
  double tau = 1.0;
  double alpha = 1.0;
  double phi = 1.0;
  double beta = 1.0;
  double jitter_tau = 0.0;
  double jitter_alpha = 0.0;
  double jitter_phi = 0.0;
  double jitter_beta = 0.0;
};

// The eight built-in profiles. TS is the unweighted baseline; the others
// are the published center values with their jitter half-widths.
inline const std::vector<BiasProfile>& builtin_profiles() {
  static const std::vector<BiasProfile> table = {
      //    name     tau  alpha  phi  beta   j_tau j_alpha j_phi j_beta
      {"AD",    1.0,   1.0, 0.5,   1.0, 0.1, 0.1, 0.1, 0.1},
      {"ADHD",  0.2,   1.0, 0.2,   1.0, 0.1, 0.1, 0.1, 0.1},
      {"AZ",    0.1,   1.0, 0.1,   1.0, 0.1, 0.1, 0.1, 0.1},
      {"CP",    0.5,   0.5, 1.0,   1.0, 0.1, 0.1, 0.1, 0.1},
      {"bvFTD", 0.5, 100.0, 0.5,   1.0, 0.1, 10.0, 0.1, 0.1},
      {"PD",    0.5,   1.0, 0.5, 100.0, 0.1, 0.1, 0.1, 10.0},
      {"M",     0.5,   1.0, 0.5,   1.0, 0.1, 0.1, 0.1, 0.1},
      {"TS",    1.0,   1.0, 1.0,   1.0, 0.0, 0.0, 0.0, 0.0},
  };
  return table;
}

inline std::vector<std::string> profile_names() {
  std::vector<std::string> names;
  for (const auto& p : builtin_profiles()) names.push_back(p.name);
  return names;
}

inline BiasProfile named_profile(std::string_view name) {
  for (const auto& p : builtin_profiles()) {
    if (p.name == name) return p;
  }
  std::ostringstream msg;
  msg << "unknown profile '" << name << "'; valid names:";
  for (const auto& p : builtin_profiles()) msg << ' ' << p.name;
  throw std::invalid_argument(msg.str());
}

// One uniform draw per weight in the fixed order tau, alpha, phi, beta,
// each mapped to [center - halfwidth, center + halfwidth] and floored at
// kEpsilon. Exactly four uniforms are consumed even for zero half-widths,
// so the stream layout does not depend on the profile. The result carries
// zero half-widths: jitter is drawn once per run, not per step.
inline BiasProfile jittered(const BiasProfile& profile, RandomStream& rng) {
  auto draw = [&rng](double center, double halfwidth) {
    const double u = rng.uniform01();
    const double v = center + (2.0 * u - 1.0) * halfwidth;
    return v < kEpsilon ? kEpsilon : v;
  };
  BiasProfile out = profile;
  out.tau = draw(profile.tau, profile.jitter_tau);
  out.alpha = draw(profile.alpha, profile.jitter_alpha);
  out.phi = draw(profile.phi, profile.jitter_phi);
  out.beta = draw(profile.beta, profile.jitter_beta);
  out.jitter_tau = out.jitter_alpha = out.jitter_phi = out.jitter_beta = 0.0;
  return out;
}

// Copy of the profile with center weights kept and jitter disabled.
inline BiasProfile without_jitter(const BiasProfile& profile) {
  BiasProfile out = profile;
  out.jitter_tau = out.jitter_alpha = out.jitter_phi = out.jitter_beta = 0.0;
  return out;
}

// Beta(S, F) shape parameters for one arm. Real-valued: the weighted
// updates do not preserve integrality.
struct ArmPosterior {
  double successes = 1.0;  // S
  double failures = 1.0;   // F
};

inline ArmPosterior update_success(ArmPosterior post, const BiasProfile& w) {
  post.successes = std::clamp(w.tau * post.successes + w.alpha, kEpsilon, kMaxShape);
  return post;
}

inline ArmPosterior update_failure(ArmPosterior post, const BiasProfile& w) {
  post.failures = std::clamp(w.phi * post.failures + w.beta, kEpsilon, kMaxShape);
  return post;
}

// --- flat key/value serialization -----------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad numeric value for '" + key + "': '" + text + "'");
  }
}

}  // namespace detail

inline std::map<std::string, std::string> profile_to_kv(const BiasProfile& p) {
  using detail::format_double;
  return {
      {"name", p.name},
      {"tau", format_double(p.tau)},
      {"alpha", format_double(p.alpha)},
      {"phi", format_double(p.phi)},
      {"beta", format_double(p.beta)},
      {"jitter_tau", format_double(p.jitter_tau)},
      {"jitter_alpha", format_double(p.jitter_alpha)},
      {"jitter_phi", format_double(p.jitter_phi)},
      {"jitter_beta", format_double(p.jitter_beta)},
  };
}

inline void validate(const BiasProfile& p) {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!ok(p.tau) || !ok(p.alpha) || !ok(p.phi) || !ok(p.beta) ||
      !ok(p.jitter_tau) || !ok(p.jitter_alpha) || !ok(p.jitter_phi) || !ok(p.jitter_beta)) {
    throw std::invalid_argument("profile '" + p.name +
                                "': weights and jitter half-widths must be finite and >= 0");
  }
}

inline BiasProfile profile_from_kv(const std::map<std::string, std::string>& kv) {
  BiasProfile p;
  auto fetch = [&kv](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument(std::string("profile missing key '") + key + "'");
    return it->second;
  };
  p.name = fetch("name");
  p.tau = detail::parse_double("tau", fetch("tau"));
  p.alpha = detail::parse_double("alpha", fetch("alpha"));
  p.phi = detail::parse_double("phi", fetch("phi"));
  p.beta = detail::parse_double("beta", fetch("beta"));
  auto opt = [&kv](const char* key) {
    auto it = kv.find(key);
    return it == kv.end() ? 0.0 : detail::parse_double(key, it->second);
  };
  p.jitter_tau = opt("jitter_tau");
  p.jitter_alpha = opt("jitter_alpha");
  p.jitter_phi = opt("jitter_phi");
  p.jitter_beta = opt("jitter_beta");
  validate(p);
  return p;
}

}  // namespace banditlab
