#include "all/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace all {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) cells.push_back("");
  return cells;
}

double parse_number(const std::string& cell, size_t row, const std::string& col) {
  const std::string t = trim(cell);
  double value = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw io_error("non-numeric cell '" + cell + "' at data row " +
                   std::to_string(row + 1) + ", column '" + col + "'");
  }
  return value;
}

}  // namespace

DatasetManifest DatasetManifest::parse(std::istream& in) {
  DatasetManifest m;
  std::map<int, std::string> ws;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    if (key == "label") {
      m.label_column = value;
    } else if (key == "positive") {
      m.positive_value = value;
    } else if (key == "classes") {
      m.class_selection = value;
    } else if (key == "id") {
      m.id_column = value;
    } else if (key == "exclude") {
      for (const auto& col : split_line(value, ',')) {
        if (!col.empty()) m.exclude_columns.push_back(col);
      }
    } else if (key.size() > 2 && key.substr(0, 2) == "ws") {
      int idx = 0;
      const auto [p, ec] =
          std::from_chars(key.data() + 2, key.data() + key.size(), idx);
      if (ec == std::errc() && p == key.data() + key.size() && idx >= 1) {
        ws[idx] = value;
      } else {
        throw io_error("manifest: bad weak-signal key '" + key + "'");
      }
    } else {
      throw io_error("manifest: unknown key '" + key + "'");
    }
  }
  if (m.label_column.empty()) {
    throw io_error("manifest: missing required key 'label'");
  }
  for (const auto& [idx, col] : ws) {
    if (idx != static_cast<int>(m.ws_columns.size()) + 1) {
      throw io_error("manifest: weak-signal keys must be ws1..wsK without gaps");
    }
    m.ws_columns.push_back(col);
  }
  return m;
}

DatasetManifest DatasetManifest::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open manifest " + path);
  return parse(in);
}

LoadedDataset load_dataset(const std::string& csv_path,
                           const DatasetManifest& manifest) {
  std::ifstream in(csv_path);
  if (!in) throw io_error("cannot open dataset " + csv_path);

  std::string line;
  if (!std::getline(in, line)) throw io_error(csv_path + ": empty file");
  const std::vector<std::string> header = split_line(line, ',');

  const auto column_of = [&](const std::string& name) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end()
               ? -1
               : static_cast<int>(std::distance(header.begin(), it));
  };

  const int label_col = column_of(manifest.label_column);
  if (label_col < 0) {
    throw io_error(csv_path + ": label column '" + manifest.label_column +
                   "' not in header");
  }
  const int id_col =
      manifest.id_column.empty() ? -1 : column_of(manifest.id_column);
  if (!manifest.id_column.empty() && id_col < 0) {
    throw io_error(csv_path + ": id column '" + manifest.id_column +
                   "' not in header");
  }

  std::vector<bool> is_feature(header.size(), true);
  is_feature[static_cast<size_t>(label_col)] = false;
  if (id_col >= 0) is_feature[static_cast<size_t>(id_col)] = false;
  for (const auto& col : manifest.exclude_columns) {
    const int c = column_of(col);
    if (c < 0) {
      throw io_error(csv_path + ": excluded column '" + col +
                     "' not in header");
    }
    is_feature[static_cast<size_t>(c)] = false;
  }

  LoadedDataset out;
  for (size_t c = 0; c < header.size(); ++c) {
    if (is_feature[c]) out.feature_names.push_back(header[c]);
  }
  if (out.feature_names.empty()) {
    throw io_error(csv_path + ": no feature columns left");
  }

  std::vector<std::vector<double>> feature_rows;
  std::vector<std::string> labels;
  std::vector<std::string> ids;
  size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_line(line, ',');
    if (cells.size() != header.size()) {
      throw io_error(csv_path + ": data row " + std::to_string(row + 1) +
                     " has " + std::to_string(cells.size()) +
                     " cells, header has " + std::to_string(header.size()));
    }
    std::vector<double> feats;
    feats.reserve(out.feature_names.size());
    for (size_t c = 0; c < cells.size(); ++c) {
      if (is_feature[c]) feats.push_back(parse_number(cells[c], row, header[c]));
    }
    feature_rows.push_back(std::move(feats));
    labels.push_back(cells[static_cast<size_t>(label_col)]);
    if (id_col >= 0) ids.push_back(cells[static_cast<size_t>(id_col)]);
    ++row;
  }
  if (feature_rows.empty()) throw io_error(csv_path + ": no data rows");

  // Class selection.
  std::map<std::string, size_t> counts;
  for (const auto& l : labels) ++counts[l];
  if (counts.size() < 2) {
    throw io_error(csv_path + ": fewer than 2 label classes");
  }

  std::vector<std::string> keep;  // keep[0] -> 0, keep[1] -> 1
  if (manifest.class_selection.empty() || manifest.class_selection == "top2") {
    if (manifest.class_selection.empty() && counts.size() != 2) {
      throw io_error(csv_path + ": " + std::to_string(counts.size()) +
                     " label classes; set 'classes = top2' or an explicit pair");
    }
    // Two most frequent classes, most frequent first; ties break toward the
    // lexicographically smaller value.
    std::vector<std::pair<std::string, size_t>> ranked(counts.begin(),
                                                       counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    keep = {ranked[0].first, ranked[1].first};
    if (manifest.class_selection.empty()) {
      std::sort(keep.begin(), keep.end());  // binary case: lex smaller -> 0
    }
  } else {
    keep = split_line(manifest.class_selection, ',');
    if (keep.size() != 2 || keep[0].empty() || keep[1].empty()) {
      throw io_error("manifest: 'classes' must be top2 or two values");
    }
    for (const auto& cls : keep) {
      if (counts.find(cls) == counts.end()) {
        throw io_error(csv_path + ": class '" + cls + "' not present");
      }
    }
  }
  if (!manifest.positive_value.empty()) {
    if (manifest.positive_value == keep[0]) {
      std::swap(keep[0], keep[1]);
    } else if (manifest.positive_value != keep[1]) {
      throw io_error("manifest: positive value '" + manifest.positive_value +
                     "' is not one of the selected classes");
    }
  }
  out.class_values = keep;

  std::vector<size_t> selected;
  for (size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] == keep[0] || labels[r] == keep[1]) selected.push_back(r);
  }

  const auto n = static_cast<Eigen::Index>(selected.size());
  const auto d = static_cast<Eigen::Index>(out.feature_names.size());
  out.data.features.resize(n, d);
  out.data.true_labels = Vector(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const size_t r = selected[static_cast<size_t>(i)];
    for (Eigen::Index c = 0; c < d; ++c) {
      out.data.features(i, c) = feature_rows[r][static_cast<size_t>(c)];
    }
    (*out.data.true_labels)[i] = labels[r] == keep[1] ? 1.0 : 0.0;
    if (id_col >= 0) out.data.ids.push_back(ids[r]);
  }
  out.data.validate();

  // Weak-signal feature columns: names first, then 0-based feature indices;
  // first/middle/last when the manifest names none.
  if (manifest.ws_columns.empty()) {
    out.ws_features = {0, static_cast<int>(d / 2), static_cast<int>(d - 1)};
  } else {
    for (const auto& col : manifest.ws_columns) {
      const auto it =
          std::find(out.feature_names.begin(), out.feature_names.end(), col);
      if (it != out.feature_names.end()) {
        out.ws_features.push_back(
            static_cast<int>(std::distance(out.feature_names.begin(), it)));
        continue;
      }
      int idx = -1;
      const auto [p, ec] =
          std::from_chars(col.data(), col.data() + col.size(), idx);
      if (ec == std::errc() && p == col.data() + col.size() && idx >= 0 &&
          idx < d) {
        out.ws_features.push_back(idx);
      } else {
        throw io_error("manifest: weak-signal column '" + col +
                       "' is neither a feature name nor a valid index");
      }
    }
  }
  return out;
}

void write_signals_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::string>& names,
                       const std::vector<Vector>& signals) {
  out << "id";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < data.n(); ++j) {
    if (!data.ids.empty()) {
      out << data.ids[static_cast<size_t>(j)];
    } else {
      out << j;
    }
    for (const auto& q : signals) out << ',' << q[j];
    out << '\n';
  }
}

}  // namespace all
