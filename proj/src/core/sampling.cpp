#include "treevote/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "treevote/errors.hpp"

namespace treevote {

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

BootstrapSample bootstrap_indices(std::size_t n, SeededRng& rng) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "bootstrap: empty dataset");
  BootstrapSample sample;
  sample.indices.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sample.indices.push_back(static_cast<std::size_t>(random_integer(rng, 0, static_cast<std::int64_t>(n) - 1)));
  }
  return sample;
}

std::pair<Dataset, BootstrapSample> bootstrap(const Dataset& data, SeededRng& rng) {
  auto sample = bootstrap_indices(data.size(), rng);
  auto resampled = data.subset(sample.indices);
  return {std::move(resampled), std::move(sample)};
}

double unique_fraction(const BootstrapSample& sample) {
  if (sample.indices.empty()) return 0.0;
  const std::set<std::size_t> distinct(sample.indices.begin(), sample.indices.end());
  return static_cast<double>(distinct.size()) / static_cast<double>(sample.indices.size());
}

Split stratified_split(const Dataset& data, double test_fraction, SeededRng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "stratified_split: test_fraction must lie in (0, 1)");
  }
  const auto& classes = data.schema().classes();
  std::vector<std::vector<std::size_t>> by_class(classes.size());
  for (std::size_t r = 0; r < data.size(); ++r) by_class[data.labels()[r]].push_back(r);

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    auto& rows = by_class[k];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      fail(ErrorCode::Degenerate, "stratified_split: class '" + classes[k] + "' has fewer than 2 rows");
    }
    // Fisher-Yates, high index first.
    for (std::size_t i = rows.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(random_integer(rng, 0, static_cast<std::int64_t>(i)));
      std::swap(rows[i], rows[j]);
    }
    const std::size_t n_test = std::min(rows.size(), round_half_up(static_cast<double>(rows.size()) * test_fraction));
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {data.subset(train_rows), data.subset(test_rows)};
}

}  // namespace treevote
