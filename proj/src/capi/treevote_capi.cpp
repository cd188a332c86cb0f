#include "treevote/treevote.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "treevote/csv.hpp"
#include "treevote/evaluation.hpp"
#include "treevote/feature_select.hpp"
#include "treevote/generator.hpp"
#include "treevote/pipeline.hpp"
#include "treevote/serialize.hpp"

struct tv_dataset {
  treevote::Dataset data;
};

struct tv_model {
  std::shared_ptr<const treevote::Model> model;
};

namespace {

thread_local std::string g_last_error;

tv_status to_status(treevote::ErrorCode code) {
  switch (code) {
    case treevote::ErrorCode::Config: return TV_ERR_CONFIG;
    case treevote::ErrorCode::DataLoad: return TV_ERR_DATA;
    case treevote::ErrorCode::Degenerate: return TV_ERR_DEGENERATE;
    case treevote::ErrorCode::OutputWrite: return TV_ERR_OUTPUT;
    case treevote::ErrorCode::InvalidArgument: return TV_ERR_INVALID_ARGUMENT;
  }
  return TV_ERR_INTERNAL;
}

template <class Fn>
tv_status guarded(Fn fn) {
  g_last_error.clear();
  try {
    fn();
    return TV_OK;
  } catch (const treevote::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return TV_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) treevote::fail(treevote::ErrorCode::InvalidArgument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void write_text(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) treevote::fail(treevote::ErrorCode::OutputWrite, std::string("cannot write '") + path + "'");
}

}  // namespace

extern "C" {

const char* tv_version(void) { return "0.1.0"; }

const char* tv_last_error(void) { return g_last_error.c_str(); }

void tv_string_free(char* s) { std::free(s); }

tv_status tv_dataset_generate(uint64_t seed, size_t rows, tv_dataset** out) {
  return guarded([&] {
    require(out, "out must not be null");
    *out = new tv_dataset{treevote::generate_workers(seed, rows)};
  });
}

tv_status tv_dataset_load(const char* csv_path, const char* schema_path, tv_dataset** out) {
  return guarded([&] {
    require(csv_path && schema_path && out, "null argument");
    *out = new tv_dataset{treevote::resolve_input(csv_path, schema_path)};
  });
}

tv_status tv_dataset_from_csv_text(const char* csv_text, const char* schema_json, tv_dataset** out) {
  return guarded([&] {
    require(csv_text && schema_json && out, "null argument");
    const auto schema = treevote::schema_from_json(treevote::parse_json(schema_json, treevote::ErrorCode::DataLoad, "schema"));
    *out = new tv_dataset{treevote::load_csv_text(csv_text, schema)};
  });
}

tv_status tv_dataset_save(const tv_dataset* data, const char* csv_path, const char* schema_path) {
  return guarded([&] {
    require(data && csv_path, "null argument");
    write_text(csv_path, treevote::to_csv(data->data));
    if (schema_path) write_text(schema_path, treevote::dump(treevote::schema_to_json(data->data.schema())));
  });
}

size_t tv_dataset_rows(const tv_dataset* data) { return data ? data->data.size() : 0; }

size_t tv_dataset_class_count(const tv_dataset* data) { return data ? data->data.schema().class_count() : 0; }

const char* tv_dataset_class_name(const tv_dataset* data, size_t index) {
  if (!data || index >= data->data.schema().class_count()) return nullptr;
  return data->data.schema().classes()[index].c_str();
}

tv_status tv_dataset_select_features(const tv_dataset* data, double alpha, tv_dataset** out, char** report_json) {
  return guarded([&] {
    require(data && out, "null argument");
    const auto report = treevote::select_features(data->data, alpha);
    const auto retained = report.retained();
    if (retained.empty()) treevote::fail(treevote::ErrorCode::Degenerate, "no features retained");
    auto reduced = std::make_unique<tv_dataset>(tv_dataset{data->data.keep_features(retained)});
    if (report_json) *report_json = copy_string(treevote::dump(treevote::report_to_json(report)));
    *out = reduced.release();
  });
}

void tv_dataset_free(tv_dataset* data) { delete data; }

tv_status tv_model_train(const tv_dataset* data, const char* learner_json, uint64_t seed, tv_model** out) {
  return guarded([&] {
    require(data && learner_json && out, "null argument");
    const auto doc = treevote::parse_json(learner_json, treevote::ErrorCode::Config, "learner");
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
      treevote::fail(treevote::ErrorCode::Config, "learner: expected {\"kind\": ..., \"params\": {...}}");
    }
    for (const auto& [key, value] : doc.items()) {
      if (key != "kind" && key != "params" && key != "parallel") {
        treevote::fail(treevote::ErrorCode::Config, "learner: unknown key '" + key + "'");
      }
    }
    const auto spec = treevote::learner_spec_from_json(doc["kind"].get<std::string>(),
                                                       doc.contains("params") ? doc["params"] : treevote::Json());
    const bool parallel = doc.contains("parallel") && doc["parallel"].is_boolean() && doc["parallel"].get<bool>();
    *out = new tv_model{treevote::train_learner(spec, data->data, treevote::SeededRng(seed), parallel)};
  });
}

tv_status tv_model_committee(const tv_model* const* members, size_t count, tv_model** out) {
  return guarded([&] {
    require(members && out && count > 0, "committee needs at least one member");
    std::vector<std::shared_ptr<const treevote::Model>> models;
    for (size_t i = 0; i < count; ++i) {
      require(members[i], "null committee member");
      models.push_back(members[i]->model);
    }
    *out = new tv_model{std::make_shared<const treevote::Model>(treevote::committee(models))};
  });
}

tv_status tv_model_load(const char* path, tv_model** out) {
  return guarded([&] {
    require(path && out, "null argument");
    const auto text = treevote::read_file(path, treevote::ErrorCode::DataLoad);
    *out = new tv_model{treevote::model_from_json(treevote::parse_json(text, treevote::ErrorCode::DataLoad, path))};
  });
}

tv_status tv_model_save(const tv_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "null argument");
    write_text(path, treevote::dump(treevote::model_to_json(*model->model)));
  });
}

tv_status tv_model_predict(const tv_model* model, const tv_dataset* data, size_t* labels, size_t capacity) {
  return guarded([&] {
    require(model && data && labels, "null argument");
    require(capacity >= data->data.size(), "labels buffer too small");
    const auto records = treevote::extract_records(data->data, model->model->features());
    for (size_t i = 0; i < records.size(); ++i) labels[i] = model->model->predict(records[i]);
  });
}

tv_status tv_model_predict_proba(const tv_model* model, const tv_dataset* data, double* probs, size_t capacity) {
  return guarded([&] {
    require(model && data && probs, "null argument");
    const size_t k = model->model->classes().size();
    require(capacity >= data->data.size() * k, "probability buffer too small");
    const auto records = treevote::extract_records(data->data, model->model->features());
    for (size_t i = 0; i < records.size(); ++i) {
      const auto dist = model->model->predict_dist(records[i]);
      std::copy(dist.begin(), dist.end(), probs + i * k);
    }
  });
}

tv_status tv_model_evaluate(const tv_model* model, const tv_dataset* data, char** summary_json) {
  return guarded([&] {
    require(model && data && summary_json, "null argument");
    const auto ev = treevote::evaluate_model(*model->model, data->data);
    auto doc = treevote::summary_to_json(ev.summary);
    doc["confusion"] = treevote::confusion_to_json(ev.confusion);
    *summary_json = copy_string(treevote::dump(doc));
  });
}

void tv_model_free(tv_model* model) { delete model; }

tv_status tv_render_svg(const char* points_csv, const char* kind, int baseline, char** svg) {
  return guarded([&] {
    require(points_csv && kind && svg, "null argument");
    const std::string k = kind;
    require(k == "roc" || k == "gain", "kind must be \"roc\" or \"gain\"");
    const auto points = treevote::curve_from_csv(points_csv);
    *svg = copy_string(treevote::render_svg(points, k == "roc" ? treevote::CurveKind::Roc : treevote::CurveKind::Gain,
                                            baseline != 0));
  });
}

tv_status tv_run_command(const char* command, const char* config_path, const char* out_dir, const uint64_t* seed,
                         char** console) {
  return guarded([&] {
    require(command && config_path, "null argument");
    treevote::CommandOptions options;
    options.config_path = config_path;
    if (out_dir) options.out_dir = std::filesystem::path(out_dir);
    if (seed) options.seed = *seed;
    const auto text = treevote::run_command(command, options);
    if (console) *console = copy_string(text);
  });
}

}  // extern "C"
