#include "treevote/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "treevote/csv.hpp"
#include "treevote/evaluation.hpp"
#include "treevote/feature_select.hpp"
#include "treevote/generator.hpp"
#include "treevote/sampling.hpp"

namespace treevote {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::Config, "config: " + what); }

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_as(const Json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    config_error("bad value for '" + key + "' in " + where);
  }
}

std::size_t get_count(const Json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) config_error("'" + key + "' in " + where + " must be a non-negative integer");
  return v.get<std::size_t>();
}

std::uint64_t get_u64(const Json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    config_error("'" + key + "' in " + where + " must be an unsigned integer");
  }
  return v.get<std::uint64_t>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string file_safe(const std::string& name) {
  std::string out;
  for (unsigned char ch : name) out.push_back(std::isalnum(ch) || ch == '-' || ch == '_' ? static_cast<char>(ch) : '_');
  return out;
}

// Rethrows InvalidArgument under another code, prefixed with the stage.
template <class Fn>
auto in_stage(const std::string& stage, ErrorCode invalid_as, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    const ErrorCode code = e.code() == ErrorCode::InvalidArgument ? invalid_as : e.code();
    const std::string what = e.what();
    if (what.rfind(stage + ":", 0) == 0) throw Error(code, what);
    throw Error(code, stage + ": " + what);
  }
}

}  // namespace

std::vector<ModelConfig> default_models() {
  return {
      {"random_forest", LearnerSpec::defaults_for(LearnerKind::RandomForest)},
      {"boosted", LearnerSpec::defaults_for(LearnerKind::Boosted)},
      {"cart", LearnerSpec::defaults_for(LearnerKind::Cart)},
      {"chaid", LearnerSpec::defaults_for(LearnerKind::Chaid)},
  };
}

LearnerSpec learner_spec_from_json(const std::string& kind_name, const Json& params) {
  LearnerKind kind;
  try {
    kind = learner_kind_from_string(kind_name);
  } catch (const Error& e) {
    config_error(e.what());
  }
  LearnerSpec spec = LearnerSpec::defaults_for(kind);
  const std::string where = "params of " + kind_name;
  const Json p = params.is_null() ? Json::object() : params;
  switch (kind) {
    case LearnerKind::Cart:
    case LearnerKind::Chaid:
    case LearnerKind::ExhaustiveChaid: {
      check_keys(p, {"max_depth", "min_samples_split", "min_samples_leaf", "alpha_merge", "alpha_split", "numeric_bins"}, where);
      if (p.contains("max_depth")) {
        if (p["max_depth"].is_null()) {
          spec.tree.max_depth.reset();
        } else {
          spec.tree.max_depth = get_count(p, "max_depth", where);
        }
      }
      if (p.contains("min_samples_split")) spec.tree.min_samples_split = get_count(p, "min_samples_split", where);
      if (p.contains("min_samples_leaf")) spec.tree.min_samples_leaf = get_count(p, "min_samples_leaf", where);
      if (p.contains("alpha_merge")) spec.tree.alpha_merge = get_as<double>(p, "alpha_merge", where);
      if (p.contains("alpha_split")) spec.tree.alpha_split = get_as<double>(p, "alpha_split", where);
      if (p.contains("numeric_bins")) spec.tree.numeric_bins = get_count(p, "numeric_bins", where);
      try {
        spec.tree.validate();
      } catch (const Error& e) {
        config_error(e.what());
      }
      break;
    }
    case LearnerKind::Boosted:
      check_keys(p, {"rounds", "base_max_depth", "learning_rate"}, where);
      if (p.contains("rounds")) spec.boost.rounds = get_count(p, "rounds", where);
      if (p.contains("base_max_depth")) spec.boost.base_max_depth = get_count(p, "base_max_depth", where);
      if (p.contains("learning_rate")) spec.boost.learning_rate = get_as<double>(p, "learning_rate", where);
      try {
        spec.boost.validate();
      } catch (const Error& e) {
        config_error(e.what());
      }
      break;
    case LearnerKind::RandomForest:
      check_keys(p, {"n_trees", "mtry", "bootstrap"}, where);
      if (p.contains("n_trees")) spec.forest.n_trees = get_count(p, "n_trees", where);
      if (p.contains("mtry")) spec.forest.mtry = get_count(p, "mtry", where);
      if (p.contains("bootstrap")) spec.forest.bootstrap = get_as<bool>(p, "bootstrap", where);
      if (spec.forest.n_trees < 1) config_error("n_trees must be at least 1");
      break;
  }
  return spec;
}

Json learner_spec_to_json(const LearnerSpec& spec) {
  switch (spec.kind) {
    case LearnerKind::Cart:
    case LearnerKind::Chaid:
    case LearnerKind::ExhaustiveChaid:
      return {{"max_depth", spec.tree.max_depth ? Json(*spec.tree.max_depth) : Json(nullptr)},
              {"min_samples_split", spec.tree.min_samples_split},
              {"min_samples_leaf", spec.tree.min_samples_leaf},
              {"alpha_merge", spec.tree.alpha_merge},
              {"alpha_split", spec.tree.alpha_split},
              {"numeric_bins", spec.tree.numeric_bins}};
    case LearnerKind::Boosted:
      return {{"rounds", spec.boost.rounds},
              {"base_max_depth", spec.boost.base_max_depth},
              {"learning_rate", spec.boost.learning_rate}};
    case LearnerKind::RandomForest:
      return {{"n_trees", spec.forest.n_trees}, {"mtry", spec.forest.mtry}, {"bootstrap", spec.forest.bootstrap}};
  }
  return Json::object();
}

namespace {

std::vector<ModelConfig> parse_models(const Json& doc) {
  if (!doc.is_array() || doc.empty()) config_error("'models' must be a non-empty list");
  std::vector<ModelConfig> out;
  std::set<std::string> names;
  for (const auto& m : doc) {
    check_keys(m, {"name", "kind", "params"}, "model entry");
    if (!m.contains("kind")) config_error("model entry without 'kind'");
    const auto kind = get_as<std::string>(m, "kind", "model entry");
    ModelConfig mc;
    mc.name = m.contains("name") ? get_as<std::string>(m, "name", "model entry") : kind;
    if (mc.name.empty()) config_error("model name must be non-empty");
    if (!names.insert(mc.name).second) config_error("duplicate model name '" + mc.name + "'");
    mc.spec = learner_spec_from_json(kind, m.contains("params") ? m.at("params") : Json(nullptr));
    out.push_back(std::move(mc));
  }
  return out;
}

EvaluationMode parse_evaluation(const Json& doc) {
  EvaluationMode mode;
  if (doc.is_string()) {
    if (doc.get<std::string>() != "resubstitution") config_error("evaluation must be 'resubstitution' or a split object");
    return mode;
  }
  check_keys(doc, {"mode", "test_fraction", "seed"}, "evaluation");
  const auto name = doc.contains("mode") ? get_as<std::string>(doc, "mode", "evaluation") : std::string("resubstitution");
  if (name == "resubstitution") return mode;
  if (name != "split") config_error("unknown evaluation mode '" + name + "'");
  mode.split = true;
  if (doc.contains("test_fraction")) mode.test_fraction = get_as<double>(doc, "test_fraction", "evaluation");
  if (!(mode.test_fraction > 0.0 && mode.test_fraction < 1.0)) config_error("test_fraction must lie in (0, 1)");
  if (doc.contains("seed")) mode.seed = get_u64(doc, "seed", "evaluation");
  return mode;
}

void validate_committee(const PipelineConfig& config) {
  for (const auto& name : config.committee_members) {
    const bool known = std::any_of(config.models.begin(), config.models.end(),
                                   [&](const ModelConfig& m) { return m.name == name; });
    if (!known) config_error("committee member '" + name + "' is not a configured model");
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(const Json& doc, const fs::path& base_dir) {
  check_keys(doc,
             {"input", "schema", "alpha", "evaluation", "models", "committee_members", "output_dir", "master_seed",
              "parallel", "svg"},
             "pipeline config");
  PipelineConfig c;
  if (doc.contains("input")) {
    c.input = get_as<std::string>(doc, "input", "pipeline config");
    if (c.input.rfind("synthetic(", 0) != 0) c.input = resolve(base_dir, c.input).string();
  }
  if (doc.contains("schema")) c.schema = resolve(base_dir, get_as<std::string>(doc, "schema", "pipeline config"));
  if (doc.contains("alpha")) c.alpha = get_as<double>(doc, "alpha", "pipeline config");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) config_error("alpha must lie in (0, 1)");
  if (doc.contains("evaluation")) c.evaluation = parse_evaluation(doc.at("evaluation"));
  c.models = doc.contains("models") ? parse_models(doc.at("models")) : default_models();
  if (doc.contains("committee_members")) {
    c.committee_members = get_as<std::vector<std::string>>(doc, "committee_members", "pipeline config");
    if (c.committee_members.empty()) config_error("committee_members must not be empty");
  } else {
    for (const auto& m : c.models) c.committee_members.push_back(m.name);
  }
  validate_committee(c);
  if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, get_as<std::string>(doc, "output_dir", "pipeline config"));
  if (doc.contains("master_seed")) c.master_seed = get_u64(doc, "master_seed", "pipeline config");
  if (doc.contains("parallel")) c.parallel = get_as<bool>(doc, "parallel", "pipeline config");
  if (doc.contains("svg")) c.svg = get_as<bool>(doc, "svg", "pipeline config");
  return c;
}

Json pipeline_config_to_json(const PipelineConfig& config) {
  Json models = Json::array();
  for (const auto& m : config.models) {
    models.push_back({{"name", m.name}, {"kind", to_string(m.spec.kind)}, {"params", learner_spec_to_json(m.spec)}});
  }
  Json evaluation = config.evaluation.split
                        ? Json{{"mode", "split"}, {"test_fraction", config.evaluation.test_fraction}, {"seed", config.evaluation.seed}}
                        : Json{{"mode", "resubstitution"}};
  // output_dir is left out so bundles written to different places compare equal.
  Json doc = {{"input", config.input},
              {"alpha", config.alpha},
              {"evaluation", evaluation},
              {"models", models},
              {"committee_members", config.committee_members},
              {"master_seed", config.master_seed},
              {"parallel", config.parallel},
              {"svg", config.svg}};
  if (!config.schema.empty()) doc["schema"] = config.schema.filename().string();
  return doc;
}

std::string read_file(const fs::path& path, ErrorCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(code, "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Dataset resolve_input(const std::string& input, const fs::path& schema_path) {
  static const std::regex synthetic(R"(^\s*synthetic\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$)");
  std::smatch m;
  if (std::regex_match(input, m, synthetic)) {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    try {
      seed = std::stoull(m[1].str());
      n = std::stoull(m[2].str());
    } catch (const std::exception&) {
      config_error("bad synthetic input '" + input + "'");
    }
    return in_stage("config", ErrorCode::Config, [&] { return generate_workers(seed, n); });
  }
  if (input.rfind("synthetic", 0) == 0) config_error("bad synthetic input '" + input + "', expected synthetic(seed,n)");
  if (schema_path.empty()) config_error("a CSV input needs a 'schema' file");
  return in_stage("load", ErrorCode::DataLoad, [&] {
    const Schema schema = schema_from_json(parse_json(read_file(schema_path, ErrorCode::DataLoad), ErrorCode::DataLoad,
                                                      "schema '" + schema_path.string() + "'"));
    return load_csv_text(read_file(input, ErrorCode::DataLoad), schema);
  });
}

namespace {

void require_two_classes(const Dataset& data) {
  const std::set<std::size_t> present(data.labels().begin(), data.labels().end());
  if (present.size() < 2) fail(ErrorCode::Degenerate, "load: degenerate data, only one class present");
}

Json summary_json(const std::string& name, const std::string& kind, const ModelEvaluation& ev) {
  Json auc = Json::object();
  for (std::size_t k = 0; k < ev.confusion.classes.size(); ++k) {
    const auto& a = ev.summary.per_class_auc[k];
    auc[ev.confusion.classes[k]] = a ? Json(*a) : Json(nullptr);
  }
  return {{"model", name},
          {"kind", kind},
          {"n", ev.summary.n},
          {"accuracy", ev.summary.accuracy},
          {"error_rate", ev.summary.error_rate},
          {"std_error", ev.summary.std_error},
          {"per_class_auc", auc},
          {"confusion", confusion_to_json(ev.confusion)}};
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "actual";
  for (const auto& c : cm.classes) out << ',' << quote_csv_field(c);
  out << '\n';
  for (std::size_t a = 0; a < cm.classes.size(); ++a) {
    out << quote_csv_field(cm.classes[a]);
    for (auto v : cm.counts[a]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

void add_evaluation_files(ReportBundle& bundle, const std::string& dir, const std::string& name, const std::string& kind,
                          const ModelEvaluation& ev, bool svg) {
  bundle.files[dir + "/summary.json"] = dump(summary_json(name, kind, ev));
  bundle.files[dir + "/confusion.csv"] = confusion_csv(ev.confusion);
  for (std::size_t k = 0; k < ev.confusion.classes.size(); ++k) {
    const std::string cls = file_safe(ev.confusion.classes[k]);
    const auto& roc = ev.roc[k];
    const auto& g = ev.gain[k];
    bundle.files[dir + "/roc_" + cls + ".csv"] = curve_to_csv(roc ? roc->points : std::vector<CurvePoint>{}, "fpr", "tpr");
    bundle.files[dir + "/gain_" + cls + ".csv"] =
        curve_to_csv(g ? g->points : std::vector<CurvePoint>{}, "targeted_fraction", "captured_fraction");
    if (svg) {
      if (roc) bundle.files[dir + "/roc_" + cls + ".svg"] = render_svg(roc->points, CurveKind::Roc, true);
      if (g) bundle.files[dir + "/gain_" + cls + ".svg"] = render_svg(g->points, CurveKind::Gain, true);
    }
  }
}

std::string accuracy_table(const std::vector<std::pair<std::string, const ConfusionMatrix*>>& rows) {
  std::size_t width = std::string("Algorithm").size();
  for (const auto& [name, cm] : rows) width = std::max(width, name.size());
  std::ostringstream out;
  out << "Algorithm" << std::string(width - 9 + 2, ' ') << "Overall Accuracy\n";
  for (const auto& [name, cm] : rows) {
    out << name << std::string(width - name.size() + 2, ' ') << format_percent(cm->trace(), cm->total()) << '\n';
  }
  return out.str();
}

std::shared_ptr<const Model> build_committee(const std::vector<std::string>& names,
                                             const std::map<std::string, std::shared_ptr<const Model>>& trained) {
  std::vector<std::shared_ptr<const Model>> members;
  for (const auto& n : names) {
    const auto it = trained.find(n);
    if (it == trained.end()) config_error("committee member '" + n + "' was not trained");
    members.push_back(it->second);
  }
  return std::make_shared<const Model>(committee(members));
}

std::map<std::string, std::shared_ptr<const Model>> train_models(const std::vector<ModelConfig>& models,
                                                                 const Dataset& train, std::uint64_t master_seed,
                                                                 bool parallel) {
  const SeededRng master(master_seed);
  std::map<std::string, std::shared_ptr<const Model>> out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& m = models[i];
    out[m.name] = in_stage("train " + m.name, ErrorCode::Config,
                           [&] { return train_learner(m.spec, train, derive_rng(master, i), parallel); });
  }
  return out;
}

}  // namespace

ReportBundle run_pipeline(const PipelineConfig& config) {
  validate_committee(config);
  const Dataset data = resolve_input(config.input, config.schema);
  require_two_classes(data);

  Dataset train = data;
  Dataset eval = data;
  if (config.evaluation.split) {
    SeededRng split_rng(config.evaluation.seed);
    auto parts = in_stage("split", ErrorCode::Config, [&] { return stratified_split(data, config.evaluation.test_fraction, split_rng); });
    train = std::move(parts.train);
    eval = std::move(parts.test);
    require_two_classes(train);
  }

  const ChiSquareReport report = in_stage("select", ErrorCode::Config, [&] { return select_features(train, config.alpha); });
  const auto retained = report.retained();
  if (retained.empty()) fail(ErrorCode::Degenerate, "select: no features retained at alpha " + format_number(config.alpha));
  const Dataset train_sel = train.keep_features(retained);
  const Dataset eval_sel = eval.keep_features(retained);

  const auto trained = train_models(config.models, train_sel, config.master_seed, config.parallel);
  const auto voted = build_committee(config.committee_members, trained);

  ReportBundle bundle;
  bundle.files["run.json"] = dump(pipeline_config_to_json(config));
  bundle.files["features.csv"] = report_to_csv(report);
  bundle.files["features.json"] = dump(report_to_json(report));

  std::vector<ModelEvaluation> evaluations;
  Json model_summaries = Json::array();
  for (const auto& m : config.models) {
    const auto& model = *trained.at(m.name);
    evaluations.push_back(in_stage("evaluate " + m.name, ErrorCode::Config, [&] { return evaluate_model(model, eval_sel); }));
    add_evaluation_files(bundle, "eval/" + file_safe(m.name), m.name, to_string(m.spec.kind), evaluations.back(), config.svg);
    bundle.files["models/" + file_safe(m.name) + ".json"] = dump(model_to_json(model));
    model_summaries.push_back(summary_json(m.name, to_string(m.spec.kind), evaluations.back()));
  }
  const ModelEvaluation voted_eval = in_stage("evaluate committee", ErrorCode::Config, [&] { return evaluate_model(*voted, eval_sel); });
  add_evaluation_files(bundle, "eval/voted", "Voted", "committee", voted_eval, config.svg);
  const auto freq = frequency_report(voted_eval.confusion);
  bundle.files["eval/voted/frequency.txt"] = freq.to_text();
  bundle.files["eval/voted/frequency.csv"] = freq.to_csv();

  std::vector<std::pair<std::string, const ConfusionMatrix*>> rows;
  for (std::size_t i = 0; i < config.models.size(); ++i) rows.emplace_back(config.models[i].name, &evaluations[i].confusion);
  rows.emplace_back("Voted", &voted_eval.confusion);
  const std::string table = accuracy_table(rows);
  bundle.files["accuracy.txt"] = table;

  Json summary = {{"evaluation", config.evaluation.split ? "split" : "resubstitution"},
                  {"training_rows", train_sel.size()},
                  {"evaluated_rows", eval_sel.size()},
                  {"features_retained", retained},
                  {"features_dropped", report.dropped()},
                  {"models", model_summaries},
                  {"committee_members", config.committee_members},
                  {"voted", summary_json("Voted", "committee", voted_eval)}};
  bundle.files["summary.json"] = dump(summary);

  std::ostringstream console;
  console << "evaluated rows: " << eval_sel.size() << (config.evaluation.split ? " (held-out split)" : " (resubstitution)") << '\n';
  console << "features retained (" << retained.size() << "):";
  for (const auto& f : retained) console << ' ' << f;
  console << "\n\n" << table;
  bundle.console = console.str();
  return bundle;
}

void write_bundle(const ReportBundle& bundle, const fs::path& dir) {
  for (const auto& [rel, content] : bundle.files) {
    const fs::path path = dir / rel;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::OutputWrite, "write: cannot create '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) fail(ErrorCode::OutputWrite, "write: cannot write '" + path.string() + "'");
  }
}

namespace {

struct LoadedConfig {
  Json doc;
  fs::path base_dir;
};

LoadedConfig load_config(const CommandOptions& options) {
  if (options.config_path.empty()) config_error("--config is required");
  LoadedConfig lc;
  lc.doc = in_stage("config", ErrorCode::Config, [&] {
    return parse_json(read_file(options.config_path, ErrorCode::Config), ErrorCode::Config,
                      "'" + options.config_path.string() + "'");
  });
  lc.base_dir = options.config_path.parent_path();
  return lc;
}

fs::path output_dir(const Json& doc, const fs::path& base, const CommandOptions& options, const std::string& fallback) {
  if (options.out_dir) return *options.out_dir;
  if (doc.contains("output_dir")) return resolve(base, get_as<std::string>(doc, "output_dir", "config"));
  return resolve(base, fallback);
}

std::string finish(const ReportBundle& bundle, const fs::path& dir) {
  write_bundle(bundle, dir);
  std::ostringstream out;
  out << bundle.console;
  out << "wrote " << bundle.files.size() << " files to " << dir.string() << '\n';
  return out.str();
}

void reject_seed(const CommandOptions& options, const std::string& command) {
  if (options.seed) config_error("--seed does not apply to '" + command + "'");
}

Dataset input_from(const Json& doc, const fs::path& base, const std::string& where) {
  if (!doc.contains("input")) config_error("'input' is required for " + where);
  std::string input = get_as<std::string>(doc, "input", where);
  if (input.rfind("synthetic", 0) != 0) input = resolve(base, input).string();
  const fs::path schema = doc.contains("schema") ? resolve(base, get_as<std::string>(doc, "schema", where)) : fs::path();
  return resolve_input(input, schema);
}

std::string cmd_gen(const CommandOptions& options) {
  const auto lc = load_config(options);
  check_keys(lc.doc, {"seed", "n", "output_dir"}, "gen config");
  std::uint64_t seed = lc.doc.contains("seed") ? get_u64(lc.doc, "seed", "gen config") : 7;
  if (options.seed) seed = *options.seed;
  const std::size_t n = lc.doc.contains("n") ? get_count(lc.doc, "n", "gen config") : 121;
  const Dataset data = in_stage("gen", ErrorCode::Config, [&] { return generate_workers(seed, n); });
  ReportBundle bundle;
  bundle.files["data.csv"] = to_csv(data);
  bundle.files["schema.json"] = dump(schema_to_json(data.schema()));
  bundle.console = "generated " + std::to_string(data.size()) + " worker rows (seed " + std::to_string(seed) + ")\n";
  return finish(bundle, output_dir(lc.doc, lc.base_dir, options, "treevote_gen"));
}

std::string cmd_select(const CommandOptions& options) {
  reject_seed(options, "select");
  const auto lc = load_config(options);
  check_keys(lc.doc, {"input", "schema", "alpha", "output_dir"}, "select config");
  const double alpha = lc.doc.contains("alpha") ? get_as<double>(lc.doc, "alpha", "select config") : kDefaultAlpha;
  if (!(alpha > 0.0 && alpha < 1.0)) config_error("alpha must lie in (0, 1)");
  const Dataset data = input_from(lc.doc, lc.base_dir, "select config");
  const auto report = in_stage("select", ErrorCode::Config, [&] { return select_features(data, alpha); });
  const auto retained = report.retained();
  if (retained.empty()) fail(ErrorCode::Degenerate, "select: no features retained at alpha " + format_number(alpha));
  const Dataset reduced = data.keep_features(retained);
  ReportBundle bundle;
  bundle.files["features.csv"] = report_to_csv(report);
  bundle.files["features.json"] = dump(report_to_json(report));
  bundle.files["selected.csv"] = to_csv(reduced);
  bundle.files["selected_schema.json"] = dump(schema_to_json(reduced.schema()));
  bundle.console = report_to_csv(report);
  return finish(bundle, output_dir(lc.doc, lc.base_dir, options, "treevote_select"));
}

std::string cmd_train(const CommandOptions& options) {
  const auto lc = load_config(options);
  check_keys(lc.doc, {"input", "schema", "models", "committee_members", "master_seed", "parallel", "output_dir"}, "train config");
  PipelineConfig c;
  c.models = lc.doc.contains("models") ? parse_models(lc.doc.at("models")) : default_models();
  if (lc.doc.contains("committee_members")) {
    c.committee_members = get_as<std::vector<std::string>>(lc.doc, "committee_members", "train config");
  } else {
    for (const auto& m : c.models) c.committee_members.push_back(m.name);
  }
  validate_committee(c);
  if (lc.doc.contains("master_seed")) c.master_seed = get_u64(lc.doc, "master_seed", "train config");
  if (options.seed) c.master_seed = *options.seed;
  if (lc.doc.contains("parallel")) c.parallel = get_as<bool>(lc.doc, "parallel", "train config");
  const Dataset data = input_from(lc.doc, lc.base_dir, "train config");
  require_two_classes(data);
  const auto trained = train_models(c.models, data, c.master_seed, c.parallel);
  ReportBundle bundle;
  for (const auto& m : c.models) bundle.files["models/" + file_safe(m.name) + ".json"] = dump(model_to_json(*trained.at(m.name)));
  if (!c.committee_members.empty()) {
    bundle.files["models/committee.json"] = dump(model_to_json(*build_committee(c.committee_members, trained)));
  }
  bundle.console = "trained " + std::to_string(c.models.size()) + " models on " + std::to_string(data.size()) + " rows\n";
  return finish(bundle, output_dir(lc.doc, lc.base_dir, options, "treevote_train"));
}

std::string cmd_evaluate(const CommandOptions& options) {
  reject_seed(options, "evaluate");
  const auto lc = load_config(options);
  check_keys(lc.doc, {"input", "schema", "models", "committee", "output_dir", "svg"}, "evaluate config");
  const bool svg = lc.doc.contains("svg") ? get_as<bool>(lc.doc, "svg", "evaluate config") : true;
  const Dataset data = input_from(lc.doc, lc.base_dir, "evaluate config");

  std::vector<std::pair<std::string, fs::path>> models;
  if (lc.doc.contains("models")) {
    for (const auto& p : get_as<std::vector<std::string>>(lc.doc, "models", "evaluate config")) {
      const fs::path path = resolve(lc.base_dir, p);
      models.emplace_back(path.stem().string(), path);
    }
  }
  if (lc.doc.contains("committee")) models.emplace_back("voted", resolve(lc.base_dir, get_as<std::string>(lc.doc, "committee", "evaluate config")));
  if (models.empty()) config_error("evaluate needs 'models' or 'committee'");

  ReportBundle bundle;
  std::vector<ModelEvaluation> evaluations;
  std::vector<std::string> names;
  for (const auto& [name, path] : models) {
    const auto model = in_stage("load model " + name, ErrorCode::DataLoad, [&] {
      return model_from_json(parse_json(read_file(path, ErrorCode::DataLoad), ErrorCode::DataLoad, path.string()));
    });
    evaluations.push_back(in_stage("evaluate " + name, ErrorCode::DataLoad, [&] { return evaluate_model(*model, data); }));
    names.push_back(name);
    add_evaluation_files(bundle, "eval/" + file_safe(name), name, model->kind(), evaluations.back(), svg);
    if (name == "voted") {
      const auto freq = frequency_report(evaluations.back().confusion);
      bundle.files["eval/voted/frequency.txt"] = freq.to_text();
      bundle.files["eval/voted/frequency.csv"] = freq.to_csv();
    }
  }
  std::vector<std::pair<std::string, const ConfusionMatrix*>> rows;
  for (std::size_t i = 0; i < names.size(); ++i) rows.emplace_back(names[i] == "voted" ? "Voted" : names[i], &evaluations[i].confusion);
  bundle.files["accuracy.txt"] = accuracy_table(rows);
  bundle.console = bundle.files["accuracy.txt"];
  return finish(bundle, output_dir(lc.doc, lc.base_dir, options, "treevote_eval"));
}

std::string cmd_pipeline(const CommandOptions& options) {
  const auto lc = load_config(options);
  PipelineConfig config = parse_pipeline_config(lc.doc, lc.base_dir);
  if (options.seed) config.master_seed = *options.seed;
  if (options.out_dir) config.output_dir = *options.out_dir;
  return finish(run_pipeline(config), config.output_dir);
}

std::string cmd_render(const CommandOptions& options) {
  reject_seed(options, "render");
  const auto lc = load_config(options);
  check_keys(lc.doc, {"points", "kind", "baseline", "output", "output_dir"}, "render config");
  if (!lc.doc.contains("points")) config_error("render needs 'points'");
  const fs::path points_path = resolve(lc.base_dir, get_as<std::string>(lc.doc, "points", "render config"));
  const std::string kind = lc.doc.contains("kind") ? get_as<std::string>(lc.doc, "kind", "render config") : "roc";
  if (kind != "roc" && kind != "gain") config_error("render kind must be 'roc' or 'gain'");
  const bool baseline = lc.doc.contains("baseline") ? get_as<bool>(lc.doc, "baseline", "render config") : true;
  const auto points = curve_from_csv(read_file(points_path, ErrorCode::DataLoad));
  const std::string svg = in_stage("render", ErrorCode::DataLoad, [&] {
    return render_svg(points, kind == "roc" ? CurveKind::Roc : CurveKind::Gain, baseline);
  });
  const std::string name = lc.doc.contains("output") ? get_as<std::string>(lc.doc, "output", "render config")
                                                      : points_path.stem().string() + ".svg";
  ReportBundle bundle;
  bundle.files[name] = svg;
  bundle.console = "rendered " + std::to_string(points.size()) + " points\n";
  return finish(bundle, output_dir(lc.doc, lc.base_dir, options, "."));
}

}  // namespace

std::string run_command(const std::string& command, const CommandOptions& options) {
  if (command == "gen") return cmd_gen(options);
  if (command == "select") return cmd_select(options);
  if (command == "train") return cmd_train(options);
  if (command == "evaluate") return cmd_evaluate(options);
  if (command == "pipeline") return cmd_pipeline(options);
  if (command == "render") return cmd_render(options);
  config_error("unknown subcommand '" + command + "'");
}

}  // namespace treevote
