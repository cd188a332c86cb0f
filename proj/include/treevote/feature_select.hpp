#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "treevote/dataset.hpp"

namespace treevote {

struct ContingencyTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  /// counts[r][c]
  std::vector<std::vector<double>> counts;

  std::size_t rows() const { return counts.size(); }
  std::size_t cols() const { return col_labels.size(); }
};

/// Equal-frequency binning of a numeric column: bin count min(max_bins,
/// distinct values); the nominal bin of sorted position i is
/// floor(i * bins / n) and every value takes the bin of its first occurrence,
/// so ties go to the lower bin. Empty bins are dropped.
struct NumericBinning {
  /// Inclusive [lower, upper] observed range of each bin, ascending.
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return lower.size(); }
  /// Bin of a value. A value falling in the gap between two bins goes to
  /// the side of the gap's midpoint it lies on (the midpoint itself goes low).
  std::size_t bin_of(double value) const;
  std::string label(std::size_t bin) const;
};

NumericBinning equal_frequency_bins(const std::vector<double>& values, std::size_t max_bins);

/// Categorical: one row per observed category (lexicographic). Numeric:
/// equal-frequency bins (at most 10), ordered by lower bound. Columns follow
/// the schema class order.
ContingencyTable contingency(const Dataset& data, const std::string& feature);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
};

/// Pearson statistic after dropping zero-margin rows and columns.
/// std::nullopt when fewer than two rows or columns survive.
std::optional<ChiSquare> chi_square_stat(const std::vector<std::vector<double>>& counts);
inline std::optional<ChiSquare> chi_square_stat(const ContingencyTable& table) {
  return chi_square_stat(table.counts);
}

/// Regularized lower/upper incomplete gamma P(a, x) and Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Upper-tail chi-square probability Q(dof/2, statistic/2).
double chi_square_pvalue(double statistic, int dof);

/// p-value of a table, 1.0 when the table is degenerate.
double table_pvalue(const std::vector<std::vector<double>>& counts);

struct FeatureScore {
  std::string name;
  double statistic = 0.0;
  int dof = 1;
  double p_value = 1.0;
  bool retained = false;
};

struct ChiSquareReport {
  /// Ascending p, ties by descending statistic, then by name.
  std::vector<FeatureScore> entries;
  double alpha = 0.05;

  std::vector<std::string> retained() const;
  std::vector<std::string> dropped() const;
};

inline constexpr double kDefaultAlpha = 0.05;

ChiSquareReport select_features(const Dataset& data, double alpha = kDefaultAlpha);

/// feature,chi_square,dof,p_value,retained
std::string report_to_csv(const ChiSquareReport& report);

}  // namespace treevote
