#include "treevote/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "treevote/csv.hpp"
#include "treevote/errors.hpp"

namespace treevote {

ModelEvaluation evaluate_model(const Model& model, const Dataset& data) {
  if (data.empty()) fail(ErrorCode::InvalidArgument, "evaluate: empty evaluation set");
  if (model.classes() != data.schema().classes()) {
    fail(ErrorCode::InvalidArgument, "schema mismatch: model and data disagree on classes");
  }
  const auto records = extract_records(data, model.features());
  const std::size_t k = model.classes().size();

  std::vector<std::size_t> predicted;
  std::vector<std::vector<double>> scores(k);
  predicted.reserve(records.size());
  for (const auto& rec : records) {
    predicted.push_back(model.predict(rec));
    const auto dist = model.predict_dist(rec);
    for (std::size_t c = 0; c < k; ++c) scores[c].push_back(dist[c]);
  }

  ModelEvaluation ev;
  ev.confusion = confusion(data.labels(), predicted, model.classes());
  ev.summary.accuracy = accuracy(ev.confusion);
  ev.summary.error_rate = error_rate(ev.confusion);
  ev.summary.n = ev.confusion.total();
  ev.summary.std_error = std_error(ev.summary.error_rate, ev.summary.n);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<bool> positive;
    positive.reserve(data.size());
    for (auto y : data.labels()) positive.push_back(y == c);
    const auto pos = std::count(positive.begin(), positive.end(), true);
    if (pos > 0 && static_cast<std::size_t>(pos) < positive.size()) {
      ev.roc.emplace_back(roc_auc(scores[c], positive));
      ev.summary.per_class_auc.emplace_back(ev.roc.back()->auc);
    } else {
      ev.roc.emplace_back(std::nullopt);
      ev.summary.per_class_auc.emplace_back(std::nullopt);
    }
    if (pos > 0) {
      ev.gain.emplace_back(gain(scores[c], positive));
    } else {
      ev.gain.emplace_back(std::nullopt);
    }
  }
  return ev;
}

std::string curve_to_csv(const std::vector<CurvePoint>& points, const std::string& x_name, const std::string& y_name) {
  std::ostringstream out;
  out << x_name << ',' << y_name << '\n';
  for (const auto& p : points) out << format_number(p.x) << ',' << format_number(p.y) << '\n';
  return out.str();
}

std::vector<CurvePoint> curve_from_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) fail(ErrorCode::DataLoad, "curve file: missing header");
  std::vector<CurvePoint> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) fail(ErrorCode::DataLoad, "curve file row " + std::to_string(r) + ": expected 2 fields");
    try {
      std::size_t used_x = 0;
      std::size_t used_y = 0;
      const double x = std::stod(rows[r][0], &used_x);
      const double y = std::stod(rows[r][1], &used_y);
      if (used_x != rows[r][0].size() || used_y != rows[r][1].size()) throw std::invalid_argument("trailing text");
      out.push_back({x, y});
    } catch (const std::logic_error&) {
      fail(ErrorCode::DataLoad, "curve file row " + std::to_string(r) + ": cannot parse number");
    }
  }
  return out;
}

namespace {

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<CurvePoint>& points, CurveKind kind, bool baseline) {
  if (points.size() < 2) fail(ErrorCode::InvalidArgument, "render_svg: need at least two points");
  for (const auto& p : points) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      fail(ErrorCode::InvalidArgument, "render_svg: point outside the unit square");
    }
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n";
  out << "<title>" << (kind == CurveKind::Roc ? "ROC curve" : "Gain chart") << "</title>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
  if (baseline) {
    out << "<line x1=\"0.00\" y1=\"1000.00\" x2=\"1000.00\" y2=\"0.00\" stroke=\"gray\" stroke-dasharray=\"10,10\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"3\" points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) out << ' ';
    out << coord(1000.0 * points[i].x) << ',' << coord(1000.0 - 1000.0 * points[i].y);
  }
  out << "\"/>\n</svg>\n";
  return out.str();
}

}  // namespace treevote
