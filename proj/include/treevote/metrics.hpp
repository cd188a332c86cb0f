#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace treevote {

struct ConfusionMatrix {
  std::vector<std::string> classes;
  /// counts[actual][predicted]
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_total(std::size_t actual) const;
  std::size_t column_total(std::size_t predicted) const;
};

ConfusionMatrix confusion(const std::vector<std::string>& actual, const std::vector<std::string>& predicted,
                          const std::vector<std::string>& classes);
/// Same, on class indices.
ConfusionMatrix confusion(const std::vector<std::size_t>& actual, const std::vector<std::size_t>& predicted,
                          const std::vector<std::string>& classes);

double accuracy(const ConfusionMatrix& cm);
double error_rate(const ConfusionMatrix& cm);
/// sqrt(e (1 - e) / n)
double std_error(double error_rate, std::size_t n);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const CurvePoint&) const = default;
};

struct RocCurve {
  /// (false positive rate, true positive rate)
  std::vector<CurvePoint> points;
  double auc = 0.0;
};

struct GainCurve {
  /// (fraction targeted, fraction of positives captured)
  std::vector<CurvePoint> points;
};

/// One-vs-rest ROC. Tied scores form one diagonal step.
RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive);
GainCurve gain(const std::vector<double>& scores, const std::vector<bool>& positive);

double trapezoid_area(const std::vector<CurvePoint>& points);

/// "12.34%" with round-half-up on the exact ratio; 0.00% when den is 0.
std::string format_percent(std::size_t num, std::size_t den);

struct FrequencyCell {
  std::size_t count = 0;
  std::string column_percent;
  std::string row_percent;
  std::string total_percent;
};

struct FrequencyReport {
  std::vector<std::string> classes;
  /// cells[actual][predicted]
  std::vector<std::vector<FrequencyCell>> cells;
  std::vector<std::size_t> row_totals;
  std::vector<std::size_t> column_totals;
  std::size_t total = 0;

  std::string to_text() const;
  std::string to_csv() const;
};

FrequencyReport frequency_report(const ConfusionMatrix& cm);

struct EvalSummary {
  double accuracy = 0.0;
  double error_rate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  /// nullopt where a class is absent from the evaluated rows (or is the
  /// only class present).
  std::vector<std::optional<double>> per_class_auc;
};

}  // namespace treevote
