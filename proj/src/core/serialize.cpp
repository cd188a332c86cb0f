#include "treevote/serialize.hpp"

#include <algorithm>

namespace treevote {

Json schema_to_json(const Schema& schema) {
  Json cols = Json::array();
  for (const auto& c : schema.columns()) cols.push_back({{"name", c.name}, {"kind", to_string(c.kind)}});
  return {{"columns", cols}, {"target", schema.target()}, {"classes", schema.classes()}};
}

Schema schema_from_json(const Json& doc) {
  try {
    std::vector<ColumnSpec> cols;
    for (const auto& c : doc.at("columns")) {
      cols.push_back({c.at("name").get<std::string>(), column_kind_from_string(c.at("kind").get<std::string>())});
    }
    return Schema(std::move(cols), doc.at("target").get<std::string>(), doc.at("classes").get<std::vector<std::string>>());
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("schema document: ") + e.what());
  }
}

namespace {

Json features_to_json(const std::vector<ColumnSpec>& features) {
  Json out = Json::array();
  for (const auto& f : features) out.push_back({{"name", f.name}, {"kind", to_string(f.kind)}});
  return out;
}

std::vector<ColumnSpec> features_from_json(const Json& doc) {
  std::vector<ColumnSpec> out;
  for (const auto& f : doc) out.push_back({f.at("name").get<std::string>(), column_kind_from_string(f.at("kind").get<std::string>())});
  return out;
}

Json node_to_json(const TreeNode& node, const DecisionTree& tree) {
  Json out;
  out["counts"] = node.counts;
  out["distribution"] = node.distribution;
  out["prediction"] = tree.classes()[node.prediction];
  if (node.rule) {
    const auto& rule = *node.rule;
    Json r;
    r["feature"] = tree.features()[rule.feature].name;
    if (rule.is_numeric()) {
      r["thresholds"] = rule.thresholds;
    } else {
      r["groups"] = rule.groups;
    }
    if (rule.raw_p) r["raw_p"] = *rule.raw_p;
    if (rule.adjusted_p) r["adjusted_p"] = *rule.adjusted_p;
    if (rule.raw_p || rule.adjusted_p) r["bonferroni"] = rule.bonferroni;
    out["rule"] = r;
    Json children = Json::array();
    for (const auto& c : node.children) children.push_back(node_to_json(c, tree));
    out["children"] = children;
  }
  return out;
}

TreeNode node_from_json(const Json& doc, const std::vector<ColumnSpec>& features, const std::vector<std::string>& classes) {
  TreeNode node;
  node.counts = doc.at("counts").get<std::vector<std::size_t>>();
  node.distribution = doc.at("distribution").get<std::vector<double>>();
  if (node.counts.size() != classes.size() || node.distribution.size() != classes.size()) {
    fail(ErrorCode::InvalidArgument, "tree document: node class vectors do not match the class list");
  }
  const auto label = doc.at("prediction").get<std::string>();
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) fail(ErrorCode::InvalidArgument, "tree document: unknown class '" + label + "'");
  node.prediction = static_cast<std::size_t>(it - classes.begin());
  if (doc.contains("rule")) {
    const auto& r = doc.at("rule");
    SplitRule rule;
    const auto name = r.at("feature").get<std::string>();
    const auto f = std::find_if(features.begin(), features.end(), [&](const ColumnSpec& s) { return s.name == name; });
    if (f == features.end()) fail(ErrorCode::InvalidArgument, "tree document: unknown feature '" + name + "'");
    rule.feature = static_cast<std::size_t>(f - features.begin());
    if (r.contains("thresholds")) {
      rule.thresholds = r.at("thresholds").get<std::vector<double>>();
    } else {
      rule.groups = r.at("groups").get<std::vector<std::vector<std::string>>>();
    }
    if (r.contains("raw_p")) rule.raw_p = r.at("raw_p").get<double>();
    if (r.contains("adjusted_p")) rule.adjusted_p = r.at("adjusted_p").get<double>();
    if (r.contains("bonferroni")) rule.bonferroni = r.at("bonferroni").get<std::size_t>();
    for (const auto& c : doc.at("children")) node.children.push_back(node_from_json(c, features, classes));
    if (node.children.size() != rule.branch_count()) {
      fail(ErrorCode::InvalidArgument, "tree document: child count does not match the split rule");
    }
    node.rule = std::move(rule);
  }
  return node;
}

std::shared_ptr<const Model> model_from_json_impl(const Json& doc) {
  const auto type = doc.at("type").get<std::string>();
  const auto kind = doc.at("kind").get<std::string>();
  if (type == "tree") {
    const auto features = features_from_json(doc.at("features"));
    const auto classes = doc.at("classes").get<std::vector<std::string>>();
    TreeNode root = node_from_json(doc.at("root"), features, classes);
    return std::make_shared<const Model>(
        kind, DecisionTree(tree_algorithm_from_string(doc.at("algorithm").get<std::string>()), features, classes,
                           std::move(root)));
  }
  if (type == "ensemble") {
    std::vector<Member> members;
    for (const auto& m : doc.at("members")) members.push_back({model_from_json_impl(m.at("model")), m.at("weight").get<double>()});
    return std::make_shared<const Model>(
        kind, EnsembleModel(std::move(members), aggregation_from_string(doc.at("aggregation").get<std::string>()),
                            doc.at("class_order").get<std::vector<std::string>>()));
  }
  fail(ErrorCode::InvalidArgument, "model document: unknown type '" + type + "'");
}

}  // namespace

Json model_to_json(const Model& model) {
  if (model.is_tree()) {
    const auto& tree = model.tree();
    return {{"type", "tree"},
            {"kind", model.kind()},
            {"algorithm", to_string(tree.algorithm())},
            {"features", features_to_json(tree.features())},
            {"classes", tree.classes()},
            {"root", node_to_json(tree.root(), tree)}};
  }
  const auto& ens = model.ensemble();
  Json members = Json::array();
  for (const auto& m : ens.members()) members.push_back({{"weight", m.weight}, {"model", model_to_json(*m.model)}});
  return {{"type", "ensemble"},
          {"kind", model.kind()},
          {"aggregation", to_string(ens.aggregation())},
          {"class_order", ens.class_order()},
          {"members", members}};
}

std::shared_ptr<const Model> model_from_json(const Json& doc) {
  try {
    return model_from_json_impl(doc);
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("model document: ") + e.what());
  }
}

Json report_to_json(const ChiSquareReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"feature", e.name},
                       {"chi_square", e.statistic},
                       {"dof", e.dof},
                       {"p_value", e.p_value},
                       {"retained", e.retained}});
  }
  return {{"alpha", report.alpha}, {"entries", entries}};
}

Json confusion_to_json(const ConfusionMatrix& cm) { return {{"classes", cm.classes}, {"counts", cm.counts}}; }

Json summary_to_json(const EvalSummary& summary) {
  Json auc = Json::array();
  for (const auto& a : summary.per_class_auc) auc.push_back(a ? Json(*a) : Json(nullptr));
  return {{"accuracy", summary.accuracy},
          {"error_rate", summary.error_rate},
          {"std_error", summary.std_error},
          {"n", summary.n},
          {"per_class_auc", auc}};
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json parse_json(const std::string& text, ErrorCode code, const std::string& context) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(code, context + ": " + e.what());
  }
}

}  // namespace treevote
