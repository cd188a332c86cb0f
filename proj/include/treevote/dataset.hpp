#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace treevote {

enum class ColumnKind { Categorical, Numeric };

const char* to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& text);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;

  bool operator==(const ColumnSpec&) const = default;
};

/// Reserved token for an empty categorical cell.
inline constexpr const char* kMissingToken = "__MISSING__";

class Schema {
 public:
  Schema() = default;
  /// Validates: names unique and non-empty, target is a categorical column,
  /// classes non-empty and unique.
  Schema(std::vector<ColumnSpec> columns, std::string target, std::vector<std::string> classes);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  const std::string& target() const { return target_; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t target_index() const { return target_index_; }
  std::size_t class_count() const { return classes_.size(); }

  std::optional<std::size_t> index_of(const std::string& name) const;
  std::optional<std::size_t> class_index(const std::string& label) const;

  /// Column indices of every non-target column, in schema order.
  std::vector<std::size_t> feature_indices() const;
  std::vector<ColumnSpec> features() const;

  bool operator==(const Schema& other) const {
    return columns_ == other.columns_ && target_ == other.target_ && classes_ == other.classes_;
  }

 private:
  std::vector<ColumnSpec> columns_;
  std::string target_;
  std::vector<std::string> classes_;
  std::size_t target_index_ = 0;
};

using Cell = std::variant<double, std::string>;
/// One value per column, in the order of whatever column list it belongs to.
using Record = std::vector<Cell>;

/// Immutable column-major table. Numeric columns hold finite doubles,
/// categorical columns hold tokens; the target column's tokens are all
/// schema classes.
class Dataset {
 public:
  Dataset() = default;
  /// Records are in schema column order.
  Dataset(Schema schema, const std::vector<Record>& rows);

  const Schema& schema() const { return schema_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  const std::vector<double>& numbers(std::size_t column) const;
  const std::vector<std::string>& tokens(std::size_t column) const;
  /// Class index (into schema().classes()) of every row.
  const std::vector<std::size_t>& labels() const { return labels_; }

  Cell cell(std::size_t row, std::size_t column) const;
  Record row(std::size_t index) const;

  /// Rows gathered by index; indices may repeat.
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Keeps the named feature columns (in schema order) plus the target.
  Dataset keep_features(const std::vector<std::string>& names) const;

  bool operator==(const Dataset& other) const;

 private:
  struct Column {
    std::vector<double> numbers;
    std::vector<std::string> tokens;
    bool operator==(const Column&) const = default;
  };

  Schema schema_;
  std::vector<Column> columns_;
  std::vector<std::size_t> labels_;
};

/// Records for `features` (by name) taken from every row of `data`. Throws
/// InvalidArgument on a missing column or kind mismatch.
std::vector<Record> extract_records(const Dataset& data, const std::vector<ColumnSpec>& features);

}  // namespace treevote
