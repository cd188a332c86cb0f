#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "treevote/errors.hpp"
#include "treevote/evaluation.hpp"
#include "treevote/generator.hpp"
#include "treevote/metrics.hpp"
#include "treevote/serialize.hpp"

using namespace treevote;

namespace {

const std::vector<std::string> kClasses = {"Average", "Good", "Excellent"};

ConfusionMatrix table3() {
  std::vector<std::string> actual;
  std::vector<std::string> predicted;
  auto add = [&](const char* a, const char* p, int n) {
    for (int i = 0; i < n; ++i) {
      actual.push_back(a);
      predicted.push_back(p);
    }
  };
  add("Average", "Average", 27);
  add("Good", "Good", 62);
  add("Excellent", "Excellent", 29);
  add("Excellent", "Average", 1);
  return confusion(actual, predicted, kClasses);
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("confusion from table 3") {
  const auto cm = table3();
  CHECK(cm.counts == std::vector<std::vector<std::size_t>>{{27, 0, 0}, {0, 62, 0}, {1, 0, 29}});
  CHECK(cm.column_total(0) == 28);
  CHECK(cm.total() == 119);
  CHECK(accuracy(cm) == doctest::Approx(118.0 / 119.0));
  CHECK(format_percent(cm.trace(), cm.total()) == "99.16%");
}

TEST_CASE("confusion edge cases") {
  const auto diag = confusion(std::vector<std::size_t>{0, 1, 2}, std::vector<std::size_t>{0, 1, 2}, kClasses);
  CHECK(diag.trace() == 3);
  CHECK(error_rate(diag) == 0.0);
  const auto off = confusion(std::vector<std::size_t>{0, 1, 2}, std::vector<std::size_t>{1, 1, 1}, kClasses);
  CHECK(off.column_total(1) == 3);
  CHECK_THROWS_AS(confusion(std::vector<std::string>{"Nope"}, std::vector<std::string>{"Good"}, kClasses), Error);
  CHECK_THROWS_AS(confusion(std::vector<std::size_t>{0}, std::vector<std::size_t>{}, kClasses), Error);
}

TEST_CASE("error rate anchors") {
  auto rate = [](std::size_t errors, std::size_t n) {
    std::vector<std::size_t> a(n, 0);
    std::vector<std::size_t> p(n, 0);
    for (std::size_t i = 0; i < errors; ++i) p[i] = 1;
    return error_rate(confusion(a, p, {"A", "B"}));
  };
  CHECK(std::round(rate(3, 119) * 1e6) / 1e6 == 0.025210);
  CHECK(std::round(rate(5, 119) * 1e6) / 1e6 == 0.042017);
}

TEST_CASE("standard error") {
  CHECK(std_error(0.0, 50) == 0.0);
  CHECK(std_error(0.5, 100) == doctest::Approx(0.05));
  CHECK(std::abs(std_error(0.025210, 119) - 0.01437) <= 1e-5);
}

TEST_CASE("roc auc") {
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {true, true, false, false}).auc == 1.0);
  CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {true, true, false, false}).auc == 0.0);
  CHECK(roc_auc({0.9, 0.4, 0.6, 0.1}, {true, true, false, false}).auc == doctest::Approx(0.75));
  // all tied: one diagonal step
  const auto tied = roc_auc({0.5, 0.5, 0.5}, {true, false, false});
  CHECK(tied.auc == doctest::Approx(0.5));
  CHECK(tied.points.size() == 2);
  CHECK_THROWS_AS(roc_auc({0.5, 0.4}, {true, true}), Error);
}

TEST_CASE("gain curve") {
  std::vector<double> s;
  std::vector<bool> pos;
  for (int i = 0; i < 10; ++i) {
    s.push_back(1.0 - 0.1 * i);
    pos.push_back(i < 4);
  }
  const auto g = gain(s, pos);
  bool seen = false;
  for (const auto& p : g.points) {
    if (std::abs(p.x - 0.4) < 1e-12) {
      CHECK(p.y == doctest::Approx(1.0));
      seen = true;
    }
  }
  CHECK(seen);
  CHECK(g.points.back() == CurvePoint{1.0, 1.0});
  const auto flat = gain({0.3, 0.3, 0.3, 0.3}, {true, false, true, false});
  REQUIRE(flat.points.size() == 2);
  CHECK(flat.points[0] == CurvePoint{0.0, 0.0});
  CHECK(flat.points[1] == CurvePoint{1.0, 1.0});
}

TEST_CASE("format_percent rounds half up") {
  CHECK(format_percent(27, 28) == "96.43%");
  CHECK(format_percent(1, 8) == "12.50%");
  CHECK(format_percent(1, 80000) == "0.00%");
  CHECK(format_percent(1, 16000) == "0.01%");  // 0.00625% rounds up
  CHECK(format_percent(0, 0) == "0.00%");
  CHECK(format_percent(5, 5) == "100.00%");
}

TEST_CASE("frequency report matches table 3 cells") {
  const auto r = frequency_report(table3());
  CHECK(r.cells[0][0].column_percent == "96.43%");
  CHECK(r.cells[0][0].row_percent == "100.00%");
  CHECK(r.cells[0][0].total_percent == "22.69%");
  CHECK(r.cells[2][0].column_percent == "3.57%");
  CHECK(r.cells[2][0].row_percent == "3.33%");
  CHECK(r.cells[2][0].total_percent == "0.84%");
  const auto text = r.to_text();
  CHECK(text.find("Voted predicted Average") != std::string::npos);
  CHECK(text.find("All Grps") != std::string::npos);
  CHECK(r.to_csv().rfind("actual,predicted,count,column_percent,row_percent,total_percent\n", 0) == 0);

  const auto id = frequency_report(confusion(std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{0, 1}, {"A", "B"}));
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(id.cells[k][k].column_percent == "100.00%");
    CHECK(id.cells[k][k].row_percent == "100.00%");
    CHECK(id.cells[k][k].total_percent == "50.00%");
  }
}

TEST_CASE("svg rendering") {
  const std::vector<CurvePoint> diag = {{0, 0}, {1, 1}};
  const auto svg = render_svg(diag, CurveKind::Roc, false);
  CHECK(count_of(svg, "<polyline") == 1);
  CHECK(svg.find("points=\"0.00,1000.00 1000.00,0.00\"") != std::string::npos);
  CHECK(svg == render_svg(diag, CurveKind::Roc, false));
  CHECK(count_of(render_svg(diag, CurveKind::Gain, true), "<line") == 1);

  std::vector<CurvePoint> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({i / 99.0, std::sqrt(i / 99.0)});
  const auto big = render_svg(pts, CurveKind::Roc, true);
  const auto start = big.find("points=\"") + 8;
  const auto list = big.substr(start, big.find('"', start) - start);
  CHECK(count_of(list, ",") == 100);
  char expect[64];
  std::snprintf(expect, sizeof expect, "%.2f,%.2f", 1000.0 * pts[50].x, 1000.0 - 1000.0 * pts[50].y);
  CHECK(list.find(expect) != std::string::npos);

  CHECK_THROWS_AS(render_svg({{0, 0}}, CurveKind::Roc, true), Error);
  CHECK_THROWS_AS(render_svg({{0, 0}, {1.5, 1}}, CurveKind::Roc, true), Error);
}

TEST_CASE("curve csv round trip") {
  const std::vector<CurvePoint> pts = {{0, 0}, {0.25, 0.5}, {1, 1}};
  const auto csv = curve_to_csv(pts, "fpr", "tpr");
  CHECK(csv == "fpr,tpr\n0,0\n0.25,0.5\n1,1\n");
  CHECK(curve_from_csv(csv) == pts);
  CHECK_THROWS_AS(curve_from_csv("x,y\n1,zz\n"), Error);
}

TEST_CASE("model json round trip") {
  const auto d = generate_workers(5, 121);
  for (auto kind : {LearnerKind::Cart, LearnerKind::Chaid, LearnerKind::Boosted, LearnerKind::RandomForest}) {
    auto spec = LearnerSpec::defaults_for(kind);
    spec.forest.n_trees = 5;
    spec.boost.rounds = 5;
    const auto m = train_learner(spec, d, SeededRng(2));
    const auto doc = model_to_json(*m);
    const auto back = model_from_json(Json::parse(dump(doc)));
    CHECK(dump(model_to_json(*back)) == dump(doc));
    const auto recs = extract_records(d, m->features());
    for (std::size_t i = 0; i < recs.size(); i += 7) CHECK(back->predict(recs[i]) == m->predict(recs[i]));
  }
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"type":"tree"})")), Error);
}

TEST_CASE("schema json round trip") {
  const auto s = worker_schema();
  CHECK(schema_from_json(schema_to_json(s)) == s);
}

TEST_CASE("evaluate model on worker data") {
  const auto d = generate_workers(9, 121);
  const auto m = train_learner(LearnerSpec::defaults_for(LearnerKind::Cart), d, SeededRng(0));
  const auto ev = evaluate_model(*m, d);
  CHECK(ev.confusion.total() == 121);
  CHECK(ev.roc.size() == 3);
  CHECK(ev.gain.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    REQUIRE(ev.roc[k]);
    CHECK(ev.roc[k]->auc == doctest::Approx(trapezoid_area(ev.roc[k]->points)));
  }
}
