#pragma once

// Flat "key = value" configuration text. Lines starting with '#' (or ';')
// are comments. Keys are dotted paths; the section prefix
// profile.<name>.<field> defines or overrides a bias profile, e.g.
//
//   profile.PD.beta = 100
//   profile.custom.tau = 0.7
//
// Every CLI flag has a config equivalent; flags override config values.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "banditlab/core.hpp"
#include "banditlab/ingestion.hpp"

namespace banditlab {

using KvMap = std::map<std::string, std::string>;

inline KvMap parse_kv_text(std::string_view text, std::string_view origin = "<config>") {
  KvMap kv;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string line(text.substr(start, end == std::string_view::npos ? end : end - start));
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const std::string trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << origin << ":" << line_no << ": expected 'key = value', got '" << trimmed << "'";
      throw std::invalid_argument(msg.str());
    }
    const std::string key = detail::trim(trimmed.substr(0, eq));
    const std::string value = detail::trim(trimmed.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream msg;
      msg << origin << ":" << line_no << ": empty key";
      throw std::invalid_argument(msg.str());
    }
    kv[key] = value;  // later assignments win
  }
  return kv;
}

inline KvMap load_kv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_kv_text(buffer.str(), path.string());
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
  if (value == "off" || value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("bad boolean for '" + key + "': '" + value + "' (use on/off)");
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer for '" + key + "': '" + value + "'");
  }
}

// Profiles defined in a config via profile.<name>.<field> keys, merged on
// top of the built-in table; partial definitions start from the built-in
// profile of the same name if one exists, else from unit weights.
inline std::vector<BiasProfile> profiles_from_config(const KvMap& kv) {
  std::map<std::string, BiasProfile> merged;
  for (const auto& p : builtin_profiles()) merged[p.name] = p;

  for (const auto& [key, value] : kv) {
    constexpr std::string_view prefix = "profile.";
    if (key.rfind(prefix, 0) != 0) continue;
    const std::size_t dot = key.find('.', prefix.size());
    if (dot == std::string::npos || dot + 1 >= key.size()) {
      throw std::invalid_argument("bad profile key '" + key + "'; expected profile.<name>.<field>");
    }
    const std::string name = key.substr(prefix.size(), dot - prefix.size());
    const std::string field = key.substr(dot + 1);
    auto it = merged.find(name);
    if (it == merged.end()) {
      BiasProfile fresh;
      fresh.name = name;
      it = merged.emplace(name, fresh).first;
    }
    BiasProfile& p = it->second;
    const double v = field == "name" ? 0.0 : detail::parse_double(key, value);
    if (field == "tau") p.tau = v;
    else if (field == "alpha") p.alpha = v;
    else if (field == "phi") p.phi = v;
    else if (field == "beta") p.beta = v;
    else if (field == "jitter_tau") p.jitter_tau = v;
    else if (field == "jitter_alpha") p.jitter_alpha = v;
    else if (field == "jitter_phi") p.jitter_phi = v;
    else if (field == "jitter_beta") p.jitter_beta = v;
    else if (field == "name") p.name = value;
    else throw std::invalid_argument("unknown profile field in '" + key + "'");
  }

  std::vector<BiasProfile> out;
  for (const auto& p : builtin_profiles()) out.push_back(merged.at(p.name));
  for (auto& [name, p] : merged) {
    bool builtin = false;
    for (const auto& b : builtin_profiles()) {
      if (b.name == name) builtin = true;
    }
    if (!builtin) out.push_back(p);
  }
  for (const auto& p : out) validate(p);
  return out;
}

}  // namespace banditlab
