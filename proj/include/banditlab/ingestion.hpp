#pragma once

// Dataset ingestion: read the label column of a delimited text file and map
// the distinct label strings, in sorted order, onto arm indices 0..K-1.
// Only the label column is ever parsed; features are ignored by design.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "banditlab/core.hpp"

namespace banditlab {

// label_column value selecting the last column of each row.
inline constexpr int kLastColumn = -1;

struct DatasetSpec {
  std::string id;            // registry / CLI name, e.g. "covertype"
  std::string display_name;  // e.g. "Covertype"
  std::string filename;      // resolved against the data directory
  char delimiter = ',';
  int label_column = kLastColumn;
  bool has_header = false;
  std::optional<std::size_t> declared_classes;
  std::string fetch_hint;  // where to obtain the file
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingDataError : public LoadError {
 public:
  using LoadError::LoadError;
};

struct LoadedLabels {
  std::vector<ArmId> labels;
  std::size_t num_classes = 0;
  std::vector<std::string> class_names;  // class_names[labels[i]] is row i's raw label
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

// Loads the label column of `path`. Row shape is fixed by the first data
// row; a row with a different field count, or an empty label, is reported
// with its 1-based line number. A class count differing from
// declared_classes produces a warning, not an error: the declared value
// follows the published table, which the file may contradict.
inline LoadedLabels load_labels_from_file(const std::filesystem::path& path,
                                          char delimiter,
                                          int label_column,
                                          bool has_header,
                                          std::optional<std::size_t> declared_classes,
                                          std::string_view dataset_name = {}) {
  std::ifstream in(path);
  if (!in) {
    throw MissingDataError("dataset file not found: " + path.string());
  }

  std::vector<std::string> raw_labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected_fields = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && has_header) continue;
    if (detail::trim(line).empty()) continue;  // ignore blank lines
    const auto fields = detail::split(line, delimiter);
    if (expected_fields == 0) {
      expected_fields = fields.size();
    } else if (fields.size() != expected_fields) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": malformed row: expected "
          << expected_fields << " fields, found " << fields.size();
      throw LoadError(msg.str());
    }
    const std::size_t column =
        label_column == kLastColumn ? fields.size() - 1 : static_cast<std::size_t>(label_column);
    if (column >= fields.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": label column " << label_column
          << " out of range for " << fields.size() << "-field row";
      throw LoadError(msg.str());
    }
    std::string label = detail::trim(fields[column]);
    if (label.empty()) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": empty label";
      throw LoadError(msg.str());
    }
    raw_labels.push_back(std::move(label));
  }
  if (raw_labels.empty()) {
    throw LoadError("dataset is empty: " + path.string());
  }

  std::vector<std::string> class_names = raw_labels;
  std::sort(class_names.begin(), class_names.end());
  class_names.erase(std::unique(class_names.begin(), class_names.end()), class_names.end());

  std::map<std::string, ArmId> index;
  for (std::size_t i = 0; i < class_names.size(); ++i) index[class_names[i]] = i;

  LoadedLabels out;
  out.labels.reserve(raw_labels.size());
  for (const auto& raw : raw_labels) out.labels.push_back(index[raw]);
  out.num_classes = class_names.size();
  out.class_names = std::move(class_names);

  if (declared_classes && *declared_classes != out.num_classes) {
    std::ostringstream msg;
    msg << (dataset_name.empty() ? path.string() : std::string(dataset_name)) << ": file has "
        << out.num_classes << " classes but the registry declares " << *declared_classes
        << "; trusting the file";
    out.warnings.push_back(msg.str());
  }
  return out;
}

inline LoadedLabels load_labels(const DatasetSpec& spec, const std::filesystem::path& data_dir) {
  return load_labels_from_file(data_dir / spec.filename, spec.delimiter, spec.label_column,
                               spec.has_header, spec.declared_classes, spec.display_name);
}

// The four UCI benchmark datasets. Files are never downloaded by this
// library; fetch_instructions() explains how to obtain each one.
inline const std::vector<DatasetSpec>& registry() {
  static const std::vector<DatasetSpec> specs = {
      {"covertype", "Covertype", "covtype.data", ',', kLastColumn, false, 7,
       "https://archive.ics.uci.edu/ml/datasets/covertype (covtype.data.gz, gunzip it)"},
      {"cnae9", "CNAE-9", "CNAE-9.data", ',', 0, false, 9,
       "https://archive.ics.uci.edu/ml/datasets/cnae-9 (CNAE-9.data)"},
      {"internet_ads", "Internet Advertisements", "ad.data", ',', kLastColumn, false, 2,
       "https://archive.ics.uci.edu/ml/datasets/internet+advertisements (ad.data)"},
      {"poker_hand", "Poker Hand", "poker-hand.data", ',', kLastColumn, false, 9,
       "https://archive.ics.uci.edu/ml/datasets/poker+hand (concatenate "
       "poker-hand-training-true.data and poker-hand-testing.data)"},
  };
  return specs;
}

inline const DatasetSpec* find_dataset(std::string_view id) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string want = lower(id);
  for (const auto& spec : registry()) {
    if (lower(spec.id) == want) return &spec;
  }
  return nullptr;
}

inline std::string fetch_instructions(const DatasetSpec& spec,
                                      const std::filesystem::path& data_dir) {
  std::ostringstream msg;
  msg << "dataset '" << spec.id << "' (" << spec.display_name << ") not found at "
      << (data_dir / spec.filename).string() << "\n"
      << "Fetch it from the UCI Machine Learning Repository:\n"
      << "  https://archive.ics.uci.edu/ml/datasets.html\n"
      << "  " << spec.fetch_hint << "\n"
      << "then place the file in the data directory (--data-dir or BANDITLAB_DATA_DIR).";
  return msg.str();
}

}  // namespace banditlab
