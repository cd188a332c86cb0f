#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "treevote/dataset.hpp"

namespace treevote {

/// Synthetic stand-in for the worker evaluation table: twelve worker
/// attributes plus the `evaluation` target (Average, Good, Excellent).
///
/// production_rate = production_achieved / base_production, stored to six
/// decimals, and the label is a pure function of it (see evaluation_band).
/// labor_efficiency and incentive_wages follow the rate; machine, product,
/// unit and elapsed_time are drawn independently of everything else.
struct WorkerGeneratorParams {
  /// Latent rate ~ Normal(mean, sd). These values put 22.7% of the mass
  /// below 1.0 and 25.2% above 1.1.
  double rate_mean = 1.05283;
  double rate_sd = 0.07062;
  /// Supervisor score noise (percentage points) around 100 * rate.
  double efficiency_noise_sd = 3.0;
  /// Incentive paid per unit produced above base.
  double incentive_per_unit = 0.75;
};

Schema worker_schema();

/// Average if rate < 1.0, Good if 1.0 <= rate <= 1.1, Excellent above.
std::string evaluation_band(double production_rate);

/// Throws InvalidArgument for n < 10.
Dataset generate_workers(std::uint64_t seed, std::size_t n, const WorkerGeneratorParams& params = {});

}  // namespace treevote
