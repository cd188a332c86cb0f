#include "treevote/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "treevote/errors.hpp"

namespace treevote {

const char* to_string(ColumnKind kind) { return kind == ColumnKind::Numeric ? "numeric" : "categorical"; }

ColumnKind column_kind_from_string(const std::string& text) {
  if (text == "numeric") return ColumnKind::Numeric;
  if (text == "categorical") return ColumnKind::Categorical;
  fail(ErrorCode::InvalidArgument, "unknown column kind '" + text + "'");
}

Schema::Schema(std::vector<ColumnSpec> columns, std::string target, std::vector<std::string> classes)
    : columns_(std::move(columns)), target_(std::move(target)), classes_(std::move(classes)) {
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    if (c.name.empty()) fail(ErrorCode::InvalidArgument, "schema: empty column name");
    if (!seen.insert(c.name).second) fail(ErrorCode::InvalidArgument, "schema: duplicate column '" + c.name + "'");
  }
  const auto t = index_of(target_);
  if (!t) fail(ErrorCode::InvalidArgument, "schema: target '" + target_ + "' is not a column");
  if (columns_[*t].kind != ColumnKind::Categorical) {
    fail(ErrorCode::InvalidArgument, "schema: target '" + target_ + "' must be categorical");
  }
  target_index_ = *t;
  if (classes_.empty()) fail(ErrorCode::InvalidArgument, "schema: no classes");
  std::set<std::string> labels;
  for (const auto& c : classes_) {
    if (!labels.insert(c).second) fail(ErrorCode::InvalidArgument, "schema: duplicate class '" + c + "'");
  }
}

std::optional<std::size_t> Schema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Schema::class_index(const std::string& label) const {
  const auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - classes_.begin());
}

std::vector<std::size_t> Schema::feature_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i != target_index_) out.push_back(i);
  }
  return out;
}

std::vector<ColumnSpec> Schema::features() const {
  std::vector<ColumnSpec> out;
  for (auto i : feature_indices()) out.push_back(columns_[i]);
  return out;
}

Dataset::Dataset(Schema schema, const std::vector<Record>& rows) : schema_(std::move(schema)) {
  const auto& cols = schema_.columns();
  columns_.resize(cols.size());
  labels_.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != cols.size()) {
      fail(ErrorCode::InvalidArgument, "row " + std::to_string(r + 1) + ": expected " + std::to_string(cols.size()) +
                                           " values, got " + std::to_string(row.size()));
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c].kind == ColumnKind::Numeric) {
        const double* v = std::get_if<double>(&row[c]);
        if (!v) fail(ErrorCode::InvalidArgument, "row " + std::to_string(r + 1) + ", column '" + cols[c].name + "': expected a number");
        if (!std::isfinite(*v)) {
          fail(ErrorCode::InvalidArgument, "row " + std::to_string(r + 1) + ", column '" + cols[c].name + "': non-finite number");
        }
        columns_[c].numbers.push_back(*v);
      } else {
        const std::string* v = std::get_if<std::string>(&row[c]);
        if (!v) fail(ErrorCode::InvalidArgument, "row " + std::to_string(r + 1) + ", column '" + cols[c].name + "': expected a category");
        columns_[c].tokens.push_back(*v);
      }
    }
    const auto& label = columns_[schema_.target_index()].tokens.back();
    const auto k = schema_.class_index(label);
    if (!k) fail(ErrorCode::InvalidArgument, "row " + std::to_string(r + 1) + ": unknown class label '" + label + "'");
    labels_.push_back(*k);
  }
}

const std::vector<double>& Dataset::numbers(std::size_t column) const {
  if (schema_.columns().at(column).kind != ColumnKind::Numeric) {
    fail(ErrorCode::InvalidArgument, "column '" + schema_.columns()[column].name + "' is not numeric");
  }
  return columns_[column].numbers;
}

const std::vector<std::string>& Dataset::tokens(std::size_t column) const {
  if (schema_.columns().at(column).kind != ColumnKind::Categorical) {
    fail(ErrorCode::InvalidArgument, "column '" + schema_.columns()[column].name + "' is not categorical");
  }
  return columns_[column].tokens;
}

Cell Dataset::cell(std::size_t row, std::size_t column) const {
  if (schema_.columns().at(column).kind == ColumnKind::Numeric) return columns_[column].numbers.at(row);
  return columns_[column].tokens.at(row);
}

Record Dataset::row(std::size_t index) const {
  Record out;
  out.reserve(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) out.push_back(cell(index, c));
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.schema_ = schema_;
  out.columns_.resize(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const bool numeric = schema_.columns()[c].kind == ColumnKind::Numeric;
    for (auto i : indices) {
      if (i >= size()) fail(ErrorCode::InvalidArgument, "subset: row index out of range");
      if (numeric) {
        out.columns_[c].numbers.push_back(columns_[c].numbers[i]);
      } else {
        out.columns_[c].tokens.push_back(columns_[c].tokens[i]);
      }
    }
  }
  for (auto i : indices) out.labels_.push_back(labels_[i]);
  return out;
}

Dataset Dataset::keep_features(const std::vector<std::string>& names) const {
  for (const auto& n : names) {
    const auto idx = schema_.index_of(n);
    if (!idx || *idx == schema_.target_index()) fail(ErrorCode::InvalidArgument, "unknown feature '" + n + "'");
  }
  std::vector<ColumnSpec> specs;
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < schema_.columns().size(); ++c) {
    const auto& spec = schema_.columns()[c];
    const bool keep = c == schema_.target_index() || std::find(names.begin(), names.end(), spec.name) != names.end();
    if (keep) {
      specs.push_back(spec);
      kept.push_back(c);
    }
  }
  Dataset out;
  out.schema_ = Schema(std::move(specs), schema_.target(), schema_.classes());
  for (auto c : kept) out.columns_.push_back(columns_[c]);
  out.labels_ = labels_;
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  return schema_ == other.schema_ && columns_ == other.columns_ && labels_ == other.labels_;
}

std::vector<Record> extract_records(const Dataset& data, const std::vector<ColumnSpec>& features) {
  std::vector<std::size_t> map;
  for (const auto& f : features) {
    const auto idx = data.schema().index_of(f.name);
    if (!idx) fail(ErrorCode::InvalidArgument, "schema mismatch: dataset has no column '" + f.name + "'");
    if (data.schema().columns()[*idx].kind != f.kind) {
      fail(ErrorCode::InvalidArgument, "schema mismatch: column '" + f.name + "' has a different kind");
    }
    map.push_back(*idx);
  }
  std::vector<Record> out(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    out[r].reserve(map.size());
    for (auto c : map) out[r].push_back(data.cell(r, c));
  }
  return out;
}

}  // namespace treevote
