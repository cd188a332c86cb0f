#include "treevote/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "treevote/errors.hpp"
#include "treevote/rng.hpp"
#include "treevote/sampling.hpp"

namespace treevote {
namespace {

struct JobTitle {
  const char* name;
  int base;
};

constexpr std::array<JobTitle, 5> kJobTitles{{
    {"Weaver", 400},
    {"Spinner", 600},
    {"Dyer", 300},
    {"Finisher", 500},
    {"Knotter", 250},
}};
constexpr std::array<const char*, 2> kMachines{"Old", "New"};
constexpr std::array<const char*, 5> kProducts{"Woven", "Tufted", "Knotted", "Flatweave", "Needlefelt"};
constexpr int kUnits = 7;

double standard_normal(SeededRng& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double round_to(double x, double scale) { return std::floor(x * scale + 0.5) / scale; }

template <std::size_t N>
const char* pick(SeededRng& rng, const std::array<const char*, N>& options) {
  return options[static_cast<std::size_t>(random_integer(rng, 0, static_cast<std::int64_t>(N) - 1))];
}

}  // namespace

Schema worker_schema() {
  using K = ColumnKind;
  return Schema(
      {
          {"operator", K::Categorical},
          {"badge_no", K::Numeric},
          {"job_title", K::Categorical},
          {"base_production", K::Numeric},
          {"production_achieved", K::Numeric},
          {"incentive_wages", K::Numeric},
          {"production_rate", K::Numeric},
          {"labor_efficiency", K::Numeric},
          {"machine", K::Categorical},
          {"product", K::Categorical},
          {"elapsed_time", K::Numeric},
          {"unit", K::Categorical},
          {"evaluation", K::Categorical},
      },
      "evaluation", {"Average", "Good", "Excellent"});
}

std::string evaluation_band(double production_rate) {
  if (production_rate < 1.0) return "Average";
  if (production_rate <= 1.1) return "Good";
  return "Excellent";
}

Dataset generate_workers(std::uint64_t seed, std::size_t n, const WorkerGeneratorParams& params) {
  if (n < 10) fail(ErrorCode::InvalidArgument, "generate_workers: n must be at least 10");
  SeededRng rng(seed);
  std::vector<Record> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char op[32];
    std::snprintf(op, sizeof op, "W%04zu", i + 1);
    const double badge = 10000.0 + 7.0 * static_cast<double>(i) + static_cast<double>(random_integer(rng, 0, 6));

    const auto& job = kJobTitles[static_cast<std::size_t>(random_integer(rng, 0, static_cast<std::int64_t>(kJobTitles.size()) - 1))];
    const double base = job.base + static_cast<double>(random_integer(rng, -25, 25));

    double latent = params.rate_mean + params.rate_sd * standard_normal(rng);
    latent = std::clamp(latent, 0.5, 1.6);
    const double achieved = static_cast<double>(round_half_up(base * latent));
    const double rate = round_to(achieved / base, 1e6);
    const double efficiency = round_to(100.0 * rate + params.efficiency_noise_sd * standard_normal(rng), 10.0);
    const double incentive = std::max(0.0, achieved - base) * params.incentive_per_unit;

    const char* machine = pick(rng, kMachines);
    const char* product = pick(rng, kProducts);
    const double elapsed = round_to(6.0 + 4.0 * rng.uniform(), 100.0);
    const std::string unit = "U" + std::to_string(random_integer(rng, 1, kUnits));

    rows.push_back(Record{
        std::string(op),
        badge,
        std::string(job.name),
        base,
        achieved,
        incentive,
        rate,
        efficiency,
        std::string(machine),
        std::string(product),
        elapsed,
        unit,
        evaluation_band(rate),
    });
  }
  return Dataset(worker_schema(), rows);
}

}  // namespace treevote
