#include "treevote/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "treevote/csv.hpp"
#include "treevote/errors.hpp"

namespace treevote {

NumericBinning equal_frequency_bins(const std::vector<double>& values, std::size_t max_bins) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "equal_frequency_bins: no values");
  if (max_bins == 0) fail(ErrorCode::InvalidArgument, "equal_frequency_bins: max_bins must be positive");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) distinct += sorted[i] != sorted[i - 1];
  const std::size_t bins = std::min(max_bins, distinct);
  const std::size_t n = sorted.size();

  NumericBinning out;
  std::size_t current = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;  // ties keep the first occurrence's bin
    const std::size_t nominal = i * bins / n;
    if (nominal != current) {
      current = nominal;
      out.lower.push_back(sorted[i]);
      out.upper.push_back(sorted[i]);
    } else {
      out.upper.back() = sorted[i];
    }
  }
  return out;
}

std::size_t NumericBinning::bin_of(double value) const {
  for (std::size_t b = 0; b + 1 < lower.size(); ++b) {
    if (value <= upper[b]) return b;
    if (value < lower[b + 1] && value <= 0.5 * (upper[b] + lower[b + 1])) return b;
  }
  return lower.size() - 1;
}

std::string NumericBinning::label(std::size_t bin) const {
  return "[" + format_number(lower.at(bin)) + ", " + format_number(upper.at(bin)) + "]";
}

ContingencyTable contingency(const Dataset& data, const std::string& feature) {
  const auto& schema = data.schema();
  const auto idx = schema.index_of(feature);
  if (!idx) fail(ErrorCode::InvalidArgument, "contingency: unknown feature '" + feature + "'");
  if (*idx == schema.target_index()) fail(ErrorCode::InvalidArgument, "contingency: '" + feature + "' is the target");
  if (data.empty()) fail(ErrorCode::InvalidArgument, "contingency: empty dataset");

  ContingencyTable table;
  table.col_labels = schema.classes();
  const std::size_t k = schema.class_count();
  const auto& labels = data.labels();

  if (schema.columns()[*idx].kind == ColumnKind::Categorical) {
    std::map<std::string, std::vector<double>> rows;
    const auto& tokens = data.tokens(*idx);
    for (std::size_t r = 0; r < data.size(); ++r) {
      auto& row = rows[tokens[r]];
      row.resize(k, 0.0);
      row[labels[r]] += 1.0;
    }
    for (auto& [label, counts] : rows) {
      table.row_labels.push_back(label);
      table.counts.push_back(std::move(counts));
    }
  } else {
    const auto& values = data.numbers(*idx);
    const auto binning = equal_frequency_bins(values, 10);
    table.counts.assign(binning.size(), std::vector<double>(k, 0.0));
    for (std::size_t r = 0; r < data.size(); ++r) table.counts[binning.bin_of(values[r])][labels[r]] += 1.0;
    for (std::size_t b = 0; b < binning.size(); ++b) table.row_labels.push_back(binning.label(b));
  }
  return table;
}

std::optional<ChiSquare> chi_square_stat(const std::vector<std::vector<double>>& counts) {
  if (counts.empty()) return std::nullopt;
  const std::size_t cols = counts.front().size();
  std::vector<double> row_sum(counts.size(), 0.0);
  std::vector<double> col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != cols) fail(ErrorCode::InvalidArgument, "chi_square_stat: ragged table");
    for (std::size_t j = 0; j < cols; ++j) {
      const double o = counts[i][j];
      if (!(o >= 0.0) || !std::isfinite(o)) fail(ErrorCode::InvalidArgument, "chi_square_stat: negative or non-finite count");
      row_sum[i] += o;
      col_sum[j] += o;
      total += o;
    }
  }
  std::vector<std::size_t> live_rows;
  std::vector<std::size_t> live_cols;
  for (std::size_t i = 0; i < row_sum.size(); ++i) {
    if (row_sum[i] > 0.0) live_rows.push_back(i);
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_sum[j] > 0.0) live_cols.push_back(j);
  }
  if (live_rows.size() < 2 || live_cols.size() < 2) return std::nullopt;

  double stat = 0.0;
  for (auto i : live_rows) {
    for (auto j : live_cols) {
      const double expected = row_sum[i] * col_sum[j] / total;
      const double diff = counts[i][j] - expected;
      stat += diff * diff / expected;
    }
  }
  return ChiSquare{stat, static_cast<int>((live_rows.size() - 1) * (live_cols.size() - 1))};
}

namespace {

constexpr double kGammaEps = 1e-14;
constexpr int kGammaMaxTerms = 500;

double gamma_prefactor(double a, double x) { return std::exp(-x + a * std::log(x) - std::lgamma(a)); }

double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kGammaMaxTerms; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kGammaEps) break;
  }
  return sum * gamma_prefactor(a, x);
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kGammaMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kGammaEps) break;
  }
  return gamma_prefactor(a, x) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a) || std::isnan(x)) {
    fail(ErrorCode::InvalidArgument, "incomplete gamma: need a > 0 and x >= 0");
  }
}

}  // namespace

double gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::clamp(gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(1.0 - gamma_q_continued_fraction(a, x), 0.0, 1.0);
}

double gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_continued_fraction(a, x), 0.0, 1.0);
}

double chi_square_pvalue(double statistic, int dof) {
  if (std::isnan(statistic) || statistic < 0.0) fail(ErrorCode::InvalidArgument, "chi_square_pvalue: negative statistic");
  if (dof < 1) fail(ErrorCode::InvalidArgument, "chi_square_pvalue: dof must be at least 1");
  if (statistic == 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

double table_pvalue(const std::vector<std::vector<double>>& counts) {
  const auto chi = chi_square_stat(counts);
  return chi ? chi_square_pvalue(chi->statistic, chi->dof) : 1.0;
}

std::vector<std::string> ChiSquareReport::retained() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (e.retained) out.push_back(e.name);
  }
  return out;
}

std::vector<std::string> ChiSquareReport::dropped() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (!e.retained) out.push_back(e.name);
  }
  return out;
}

ChiSquareReport select_features(const Dataset& data, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "select_features: alpha must lie in (0, 1)");
  const auto features = data.schema().features();
  if (features.empty()) fail(ErrorCode::InvalidArgument, "select_features: dataset has no features");

  ChiSquareReport report;
  report.alpha = alpha;
  for (const auto& f : features) {
    FeatureScore score;
    score.name = f.name;
    if (const auto chi = chi_square_stat(contingency(data, f.name))) {
      score.statistic = chi->statistic;
      score.dof = chi->dof;
      score.p_value = chi_square_pvalue(chi->statistic, chi->dof);
    }
    score.retained = score.p_value <= alpha;
    report.entries.push_back(std::move(score));
  }
  std::stable_sort(report.entries.begin(), report.entries.end(), [](const FeatureScore& a, const FeatureScore& b) {
    if (a.p_value != b.p_value) return a.p_value < b.p_value;
    if (a.statistic != b.statistic) return a.statistic > b.statistic;
    return a.name < b.name;
  });
  return report;
}

std::string report_to_csv(const ChiSquareReport& report) {
  std::ostringstream out;
  out << "feature,chi_square,dof,p_value,retained\n";
  char buf[64];
  for (const auto& e : report.entries) {
    out << quote_csv_field(e.name) << ',';
    std::snprintf(buf, sizeof buf, "%.4f", e.statistic);
    out << buf << ',' << e.dof << ',';
    std::snprintf(buf, sizeof buf, "%.6f", e.p_value);
    out << buf << ',' << (e.retained ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace treevote
