#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "treevote/feature_select.hpp"
#include "treevote/generator.hpp"

using namespace treevote;
using tvtest::make_data;

TEST_CASE("contingency of a constant feature") {
  const auto d = make_data({{"x", ColumnKind::Categorical}}, {"A", "B"},
                           {{std::string("k")}, {std::string("k")}, {std::string("k")}, {std::string("k")}, {std::string("k")}},
                           {"A", "A", "A", "B", "B"});
  const auto t = contingency(d, "x");
  REQUIRE(t.rows() == 1);
  CHECK(t.counts[0] == std::vector<double>{3, 2});
}

TEST_CASE("contingency hand count") {
  const auto d = make_data({{"x", ColumnKind::Categorical}}, {"A", "B"},
                           {{std::string("u")}, {std::string("u")}, {std::string("v")}}, {"A", "B", "B"});
  const auto t = contingency(d, "x");
  CHECK(t.row_labels == std::vector<std::string>{"u", "v"});
  CHECK(t.counts == std::vector<std::vector<double>>{{1, 1}, {0, 1}});
}

TEST_CASE("equal frequency bins") {
  const std::vector<double> v = {4, 1, 3, 2, 1, 2, 3, 4};
  const auto b = equal_frequency_bins(v, 10);
  REQUIRE(b.size() == 4);
  CHECK(b.lower == std::vector<double>{1, 2, 3, 4});
  const auto d = make_data({{"x", ColumnKind::Numeric}}, {"A", "B"},
                           {{4.0}, {1.0}, {3.0}, {2.0}, {1.0}, {2.0}, {3.0}, {4.0}},
                           {"A", "A", "B", "B", "A", "A", "B", "B"});
  const auto t = contingency(d, "x");
  REQUIRE(t.rows() == 4);
  for (const auto& row : t.counts) CHECK(row[0] + row[1] == 2.0);
}

TEST_CASE("ties go to the lower bin") {
  // 10 values, 5 bins: nominal bins 0,0,1,1,2,2,3,3,4,4 but the run of 7s spans three of them
  const std::vector<double> v = {1, 2, 7, 7, 7, 7, 7, 8, 9, 10};
  const auto b = equal_frequency_bins(v, 5);
  CHECK(b.bin_of(7.0) == 1);
  CHECK(b.bin_of(1.0) == 0);
  CHECK(b.bin_of(10.0) == b.size() - 1);
  // gap midpoint between 2 and 7 is 4.5
  CHECK(b.bin_of(4.5) == 0);
  CHECK(b.bin_of(4.6) == 1);
}

TEST_CASE("chi-square statistic anchors") {
  using Counts = std::vector<std::vector<double>>;
  auto s = chi_square_stat(Counts{{6, 3}, {4, 2}});
  REQUIRE(s);
  CHECK(s->statistic == doctest::Approx(0.0));
  CHECK(s->dof == 1);
  s = chi_square_stat(Counts{{10, 0}, {0, 10}});
  REQUIRE(s);
  CHECK(s->statistic == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(!chi_square_stat(Counts{{3, 2}}));
  CHECK(!chi_square_stat(Counts{{3, 0}, {2, 0}}));
  // zero-margin row and column are dropped before testing
  s = chi_square_stat(Counts{{10, 0, 0}, {0, 0, 0}, {0, 0, 10}});
  REQUIRE(s);
  CHECK(s->dof == 1);
  CHECK(s->statistic == doctest::Approx(20.0));
}

TEST_CASE("one row per instance gives N(K-1)") {
  std::vector<tvtest::Record> rows;
  std::vector<std::string> labels;
  const char* cls[] = {"A", "B", "C"};
  for (int i = 0; i < 121; ++i) {
    rows.push_back({std::string("W") + std::to_string(i)});
    labels.push_back(cls[i % 3]);
  }
  const auto d = make_data({{"op", ColumnKind::Categorical}}, {"A", "B", "C"}, rows, labels);
  const auto s = chi_square_stat(contingency(d, "op"));
  REQUIRE(s);
  CHECK(std::abs(s->statistic - 242.0) <= 1e-9);
  CHECK(s->dof == 240);
}

TEST_CASE("p-values") {
  CHECK(chi_square_pvalue(0.0, 1) == 1.0);
  CHECK(chi_square_pvalue(0.0, 7) == 1.0);
  CHECK(std::abs(chi_square_pvalue(0.7942, 2) - 0.672260) <= 5e-5);
  CHECK(std::abs(chi_square_pvalue(6.4121, 8) - 0.601180) <= 5e-4);
  CHECK(chi_square_pvalue(2.0 * std::log(2.0), 2) == doctest::Approx(0.5).epsilon(1e-12));
  // scipy.stats.chi2.sf reference values
  CHECK(chi_square_pvalue(3.0, 1) == doctest::Approx(0.08326451666355042).epsilon(1e-10));
  CHECK(chi_square_pvalue(20.0, 1) == doctest::Approx(7.744216431044088e-06).epsilon(1e-9));
  CHECK(chi_square_pvalue(50.0, 30) == doctest::Approx(0.01240206071890054).epsilon(1e-9));
  CHECK(chi_square_pvalue(1.0, 10) == doctest::Approx(0.9998278843700441).epsilon(1e-12));
  CHECK(gamma_p(2.5, 1.7) + gamma_q(2.5, 1.7) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("select_features") {
  std::vector<tvtest::Record> rows;
  std::vector<std::string> labels;
  for (int i = 0; i < 40; ++i) {
    const std::string y = i % 2 ? "A" : "B";
    rows.push_back({y == "A" ? std::string("a") : std::string("b"), std::string("const")});
    labels.push_back(y);
  }
  const auto d = make_data({{"same", ColumnKind::Categorical}, {"flat", ColumnKind::Categorical}}, {"A", "B"}, rows, labels);
  const auto r = select_features(d, 0.05);
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[0].name == "same");
  CHECK(r.entries[0].p_value < 1e-8);
  CHECK(r.entries[0].retained);
  CHECK(r.entries[1].name == "flat");
  CHECK(r.entries[1].statistic == 0.0);
  CHECK(r.entries[1].p_value == 1.0);
  CHECK_FALSE(r.entries[1].retained);
  CHECK(r.retained() == std::vector<std::string>{"same"});
  CHECK(r.dropped() == std::vector<std::string>{"flat"});
  const auto csv = report_to_csv(r);
  CHECK(csv.rfind("feature,chi_square,dof,p_value,retained\n", 0) == 0);
}

TEST_CASE("synthetic workers keep the informative features") {
  const auto r = select_features(generate_workers(7, 121), 0.05);
  const auto kept = r.retained();
  auto has = [&](const std::string& n) { return std::find(kept.begin(), kept.end(), n) != kept.end(); };
  CHECK(has("production_rate"));
  CHECK(has("labor_efficiency"));
  for (const char* noise : {"machine", "product", "unit", "elapsed_time"}) CHECK_FALSE(has(noise));
  // operator is one row per worker: N(K-1) exactly
  for (const auto& e : r.entries) {
    if (e.name == "operator") CHECK(e.statistic == doctest::Approx(242.0).epsilon(1e-12));
  }
}
