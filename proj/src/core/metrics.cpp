#include "treevote/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "treevote/csv.hpp"
#include "treevote/errors.hpp"

namespace treevote {

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) t += std::accumulate(row.begin(), row.end(), std::size_t{0});
  return t;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) t += counts[k][k];
  return t;
}

std::size_t ConfusionMatrix::row_total(std::size_t actual) const {
  const auto& row = counts.at(actual);
  return std::accumulate(row.begin(), row.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::column_total(std::size_t predicted) const {
  std::size_t t = 0;
  for (const auto& row : counts) t += row.at(predicted);
  return t;
}

ConfusionMatrix confusion(const std::vector<std::size_t>& actual, const std::vector<std::size_t>& predicted,
                          const std::vector<std::string>& classes) {
  if (actual.size() != predicted.size()) {
    fail(ErrorCode::InvalidArgument, "confusion: " + std::to_string(actual.size()) + " actual labels but " +
                                         std::to_string(predicted.size()) + " predictions");
  }
  if (actual.empty()) fail(ErrorCode::InvalidArgument, "confusion: no rows");
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] >= classes.size() || predicted[i] >= classes.size()) {
      fail(ErrorCode::InvalidArgument, "confusion: class index out of range");
    }
    ++cm.counts[actual[i]][predicted[i]];
  }
  return cm;
}

ConfusionMatrix confusion(const std::vector<std::string>& actual, const std::vector<std::string>& predicted,
                          const std::vector<std::string>& classes) {
  auto index = [&](const std::string& label) {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) fail(ErrorCode::InvalidArgument, "confusion: unknown label '" + label + "'");
    return static_cast<std::size_t>(it - classes.begin());
  };
  if (actual.size() != predicted.size()) {
    fail(ErrorCode::InvalidArgument, "confusion: " + std::to_string(actual.size()) + " actual labels but " +
                                         std::to_string(predicted.size()) + " predictions");
  }
  std::vector<std::size_t> a;
  std::vector<std::size_t> p;
  for (const auto& l : actual) a.push_back(index(l));
  for (const auto& l : predicted) p.push_back(index(l));
  return confusion(a, p, classes);
}

double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) fail(ErrorCode::InvalidArgument, "accuracy: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double error_rate(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) fail(ErrorCode::InvalidArgument, "error_rate: empty confusion matrix");
  return static_cast<double>(total - cm.trace()) / static_cast<double>(total);
}

double std_error(double error_rate, std::size_t n) {
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) fail(ErrorCode::InvalidArgument, "std_error: error rate outside [0, 1]");
  if (n == 0) fail(ErrorCode::InvalidArgument, "std_error: n must be at least 1");
  return std::sqrt(error_rate * (1.0 - error_rate) / static_cast<double>(n));
}

namespace {

void check_scores(const std::vector<double>& scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) fail(ErrorCode::InvalidArgument, "curve: score and label counts differ");
  for (double s : scores) {
    if (!std::isfinite(s)) fail(ErrorCode::InvalidArgument, "curve: scores must be finite");
  }
}

// Rows by descending score, then the end offset of each tie group.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> ranked_groups(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::size_t> ends;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    if (i == order.size() || scores[order[i]] != scores[order[i - 1]]) ends.push_back(i);
  }
  return {std::move(order), std::move(ends)};
}

}  // namespace

double trapezoid_area(const std::vector<CurvePoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].x - points[i - 1].x) * (points[i].y + points[i - 1].y) / 2.0;
  }
  return area;
}

RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  check_scores(scores, positive);
  const auto pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  const std::size_t neg = positive.size() - pos;
  if (pos == 0 || neg == 0) fail(ErrorCode::InvalidArgument, "AUC undefined: need both positive and negative rows");

  const auto [order, ends] = ranked_groups(scores);
  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t start = 0;
  for (auto end : ends) {
    for (std::size_t i = start; i < end; ++i) (positive[order[i]] ? tp : fp)++;
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
    start = end;
  }
  roc.auc = trapezoid_area(roc.points);
  return roc;
}

GainCurve gain(const std::vector<double>& scores, const std::vector<bool>& positive) {
  check_scores(scores, positive);
  const auto pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  if (pos == 0) fail(ErrorCode::InvalidArgument, "gain: no positive rows");
  const auto n = static_cast<double>(scores.size());

  const auto [order, ends] = ranked_groups(scores);
  GainCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t start = 0;
  for (auto end : ends) {
    for (std::size_t i = start; i < end; ++i) tp += positive[order[i]];
    curve.points.push_back({static_cast<double>(end) / n, static_cast<double>(tp) / static_cast<double>(pos)});
    start = end;
  }
  return curve;
}

std::string format_percent(std::size_t num, std::size_t den) {
  if (den == 0) return "0.00%";
  // Hundredths of a percent, rounded half up on the exact ratio.
  const unsigned long long scaled = (2ULL * num * 10000ULL + den) / (2ULL * den);
  const unsigned long long whole = scaled / 100;
  const unsigned long long frac = scaled % 100;
  return std::to_string(whole) + "." + (frac < 10 ? "0" : "") + std::to_string(frac) + "%";
}

FrequencyReport frequency_report(const ConfusionMatrix& cm) {
  FrequencyReport r;
  r.classes = cm.classes;
  r.total = cm.total();
  if (r.total == 0) fail(ErrorCode::InvalidArgument, "frequency_report: empty confusion matrix");
  const std::size_t k = cm.classes.size();
  for (std::size_t a = 0; a < k; ++a) r.row_totals.push_back(cm.row_total(a));
  for (std::size_t p = 0; p < k; ++p) r.column_totals.push_back(cm.column_total(p));
  r.cells.assign(k, std::vector<FrequencyCell>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t p = 0; p < k; ++p) {
      auto& cell = r.cells[a][p];
      cell.count = cm.counts[a][p];
      cell.column_percent = format_percent(cell.count, r.column_totals[p]);
      cell.row_percent = format_percent(cell.count, r.row_totals[a]);
      cell.total_percent = format_percent(cell.count, r.total);
    }
  }
  return r;
}

std::string FrequencyReport::to_text() const {
  const std::size_t k = classes.size();
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"", "Evaluation"};
  for (const auto& c : classes) header.push_back("Voted predicted " + c);
  header.push_back("Row Total");
  grid.push_back(header);
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<std::string> count{"Count", classes[a]};
    std::vector<std::string> col{"Column percent", ""};
    std::vector<std::string> row{"Row percent", ""};
    std::vector<std::string> tot{"Total percent", ""};
    for (std::size_t p = 0; p < k; ++p) {
      count.push_back(std::to_string(cells[a][p].count));
      col.push_back(cells[a][p].column_percent);
      row.push_back(cells[a][p].row_percent);
      tot.push_back(cells[a][p].total_percent);
    }
    count.push_back(std::to_string(row_totals[a]));
    col.push_back("");
    row.push_back("");
    tot.push_back(format_percent(row_totals[a], total));
    grid.push_back(count);
    grid.push_back(col);
    grid.push_back(row);
    grid.push_back(tot);
  }
  std::vector<std::string> all{"Count", "All Grps"};
  std::vector<std::string> pct{"Percent", ""};
  for (std::size_t p = 0; p < k; ++p) {
    all.push_back(std::to_string(column_totals[p]));
    pct.push_back(format_percent(column_totals[p], total));
  }
  all.push_back(std::to_string(total));
  pct.push_back("");
  grid.push_back(all);
  grid.push_back(pct);

  std::vector<std::size_t> width(grid.front().size(), 0);
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  for (const auto& line : grid) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) text += "  ";
      text += line[c] + std::string(width[c] - line[c].size(), ' ');
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  }
  return out.str();
}

std::string FrequencyReport::to_csv() const {
  std::ostringstream out;
  out << "actual,predicted,count,column_percent,row_percent,total_percent\n";
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t p = 0; p < classes.size(); ++p) {
      const auto& c = cells[a][p];
      out << quote_csv_field(classes[a]) << ',' << quote_csv_field(classes[p]) << ',' << c.count << ','
          << c.column_percent << ',' << c.row_percent << ',' << c.total_percent << '\n';
    }
  }
  return out.str();
}

}  // namespace treevote
