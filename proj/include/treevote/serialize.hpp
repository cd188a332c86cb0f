#pragma once

#include <memory>
#include <string>

#include "json.hpp"

#include "treevote/dataset.hpp"
#include "treevote/ensemble.hpp"
#include "treevote/errors.hpp"
#include "treevote/feature_select.hpp"
#include "treevote/metrics.hpp"

namespace treevote {

using Json = nlohmann::json;

// All structured documents (schema, models, reports, configs) are JSON.
// Doubles are written in shortest round-trip form, so models reload exactly.

Json schema_to_json(const Schema& schema);
Schema schema_from_json(const Json& doc);

Json model_to_json(const Model& model);
std::shared_ptr<const Model> model_from_json(const Json& doc);

Json report_to_json(const ChiSquareReport& report);
Json confusion_to_json(const ConfusionMatrix& cm);
Json summary_to_json(const EvalSummary& summary);

/// Two-space indent with a trailing newline.
std::string dump(const Json& doc);
/// Parses text; failures become Error(code, context + ": " + detail).
Json parse_json(const std::string& text, ErrorCode code, const std::string& context);

}  // namespace treevote
