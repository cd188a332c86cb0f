#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treevote/dataset.hpp"
#include "treevote/ensemble.hpp"
#include "treevote/metrics.hpp"

namespace treevote {

/// Everything reported for one model on one evaluation set. Curves are
/// one-vs-rest with the model's class probability as score; a class's curves
/// are absent when they are undefined on this set.
struct ModelEvaluation {
  ConfusionMatrix confusion;
  EvalSummary summary;
  std::vector<std::optional<RocCurve>> roc;
  std::vector<std::optional<GainCurve>> gain;
};

ModelEvaluation evaluate_model(const Model& model, const Dataset& data);

/// Two-column CSV with header x,y.
std::string curve_to_csv(const std::vector<CurvePoint>& points, const std::string& x_name, const std::string& y_name);
std::vector<CurvePoint> curve_from_csv(const std::string& text);

enum class CurveKind { Roc, Gain };

/// Standalone SVG in a 1000x1000 viewBox: unit-square frame, optional
/// diagonal baseline, one polyline. (x, y) maps to (1000x, 1000 - 1000y)
/// with two decimals. Throws InvalidArgument for fewer than two points or
/// points outside [0, 1]^2.
std::string render_svg(const std::vector<CurvePoint>& points, CurveKind kind, bool baseline);

}  // namespace treevote
