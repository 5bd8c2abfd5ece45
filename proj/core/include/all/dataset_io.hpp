// CSV dataset ingestion driven by a small key = value manifest naming the
// label column, the label mapping or class-selection rule, and the feature
// columns used to simulate each weak signal.
//
// Manifest keys:
//   label    = <column name>              (required)
//   positive = <label value mapped to 1>  (optional)
//   classes  = top2 | <value>,<value>     (optional; multiclass selection)
//   id       = <column name>              (optional; excluded from features)
//   exclude  = <col>,<col>,...            (optional; excluded from features)
//   ws1..wsK = <feature column name or 0-based feature index>
//
// Without `positive`, binary labels map deterministically: the
// lexicographically smaller value becomes 0. With `classes = top2`, the two
// most frequent label values are kept and the more frequent becomes 0.

#pragma once

#include "all/types.hpp"

#include <map>

namespace all {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetManifest {
  std::string label_column;
  std::string positive_value;   // empty = use the deterministic default
  std::string class_selection;  // "", "top2", or "a,b"
  std::string id_column;
  std::vector<std::string> exclude_columns;
  std::vector<std::string> ws_columns;  // ws1, ws2, ... in order

  static DatasetManifest parse(std::istream& in);
  static DatasetManifest load_file(const std::string& path);
};

struct LoadedDataset {
  Dataset data;
  std::vector<std::string> feature_names;
  std::vector<int> ws_features;       // resolved feature indices
  std::vector<std::string> class_values;  // class_values[0] -> 0, [1] -> 1
};

// Reads a header-rowed CSV with numeric feature cells, applies the manifest's
// label mapping and class selection, and resolves the weak-signal columns.
// Errors carry row/column context. When the manifest names no ws columns the
// first/middle/last features are used.
LoadedDataset load_dataset(const std::string& csv_path,
                           const DatasetManifest& manifest);

// Writes id (when present) plus one column per weak signal.
void write_signals_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::string>& names,
                       const std::vector<Vector>& signals);

}  // namespace all
