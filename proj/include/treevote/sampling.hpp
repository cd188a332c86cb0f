#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "treevote/dataset.hpp"
#include "treevote/rng.hpp"

namespace treevote {

struct BootstrapSample {
  /// Drawn row indices, in draw order.
  std::vector<std::size_t> indices;
};

/// N indices drawn i.i.d. via random_integer(rng, 0, N-1).
BootstrapSample bootstrap_indices(std::size_t n, SeededRng& rng);

std::pair<Dataset, BootstrapSample> bootstrap(const Dataset& data, SeededRng& rng);

struct Split {
  Dataset train;
  Dataset test;
};

/// Per class: shuffle the class's rows and send round-half-up(count * fraction)
/// of them to the test side. Both sides keep original row order.
Split stratified_split(const Dataset& data, double test_fraction, SeededRng& rng);

/// floor(x + 0.5) for non-negative x.
std::size_t round_half_up(double x);

/// Fraction of distinct indices in a sample.
double unique_fraction(const BootstrapSample& sample);

}  // namespace treevote
