#pragma once

#include <string>
#include <vector>

#include "treevote/dataset.hpp"

namespace tvtest {

using treevote::Cell;
using treevote::ColumnKind;
using treevote::ColumnSpec;
using treevote::Dataset;
using treevote::Record;
using treevote::Schema;

// Target column "y" goes last.
inline Dataset make_data(std::vector<ColumnSpec> features, std::vector<std::string> classes,
                         const std::vector<Record>& feature_rows, const std::vector<std::string>& labels) {
  features.push_back({"y", ColumnKind::Categorical});
  Schema schema(features, "y", classes);
  std::vector<Record> rows;
  for (std::size_t i = 0; i < feature_rows.size(); ++i) {
    Record r = feature_rows[i];
    r.emplace_back(labels[i]);
    rows.push_back(std::move(r));
  }
  return Dataset(schema, rows);
}

inline std::vector<Record> records_of(const Dataset& d) {
  return treevote::extract_records(d, d.schema().features());
}

}  // namespace tvtest
