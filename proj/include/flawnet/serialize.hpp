#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "flawnet/model.hpp"

namespace flawnet {

inline nlohmann::json to_json(const InitScheme& s) {
  nlohmann::json j{{"kind", to_string(s)}};
  if (s.kind == InitKind::Constant) j["constant"] = s.constant;
  return j;
}

inline InitScheme init_scheme_from_json(const nlohmann::json& j) {
  InitScheme s = parse_init_scheme(j.at("kind").get<std::string>());
  if (j.contains("constant")) s.constant = j.at("constant").get<double>();
  return s;
}

inline nlohmann::json to_json(const ArchConfig& c) {
  return {
      {"arch", to_string(c.kind)},
      {"layer_width", c.layer_width},
      {"layer_depth", c.layer_depth},
      {"dim_x", c.dim_x},
      {"dim_y", c.dim_y},
      {"lambda", c.lambda},
      {"lambda_auto", c.lambda_auto},
      {"init", to_json(c.init)},
      {"epochs", c.epochs},
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"seed", c.seed},
      {"augment_train", c.augment_train},
  };
}

inline ArchConfig arch_config_from_json(const nlohmann::json& j) {
  ArchConfig c;
  c.kind = parse_arch_kind(j.at("arch").get<std::string>());
  c.layer_width = j.at("layer_width").get<std::size_t>();
  c.layer_depth = j.at("layer_depth").get<std::size_t>();
  c.dim_x = j.at("dim_x").get<std::size_t>();
  c.dim_y = j.at("dim_y").get<std::size_t>();
  c.lambda = j.at("lambda").get<double>();
  c.lambda_auto = j.at("lambda_auto").get<bool>();
  c.init = init_scheme_from_json(j.at("init"));
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.augment_train = j.value("augment_train", false);
  return c;
}

/// Serializes a model as a version-tagged JSON container holding the config
/// and a flat list of named parameter arrays (tied weights appear once).
inline nlohmann::json model_to_json(MultimodalModel& m) {
  nlohmann::json doc;
  doc["format"] = "flawnet-model";
  doc["version"] = 1;
  doc["config"] = to_json(m.config);
  doc["params"] = nlohmann::json::array();
  for (const auto& p : m.parameters()) {
    nlohmann::json jp;
    jp["name"] = p.name;
    jp["values"] = std::vector<double>(p.data, p.data + p.size);
    doc["params"].push_back(std::move(jp));
  }
  return doc;
}

inline void save_model(MultimodalModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file '" + path + "'");
  out << model_to_json(m).dump(2) << '\n';
  if (!out) throw Error("failed writing model file '" + path + "'");
}

inline MultimodalModel model_from_json(const nlohmann::json& doc) {
  if (doc.value("format", "") != "flawnet-model")
    throw DataError("not a flawnet-model file");
  if (doc.value("version", 0) != 1)
    throw DataError("unsupported model file version");
  MultimodalModel m = build_model(arch_config_from_json(doc.at("config")));
  auto params = m.parameters();
  const auto& jparams = doc.at("params");
  if (jparams.size() != params.size())
    throw DataError("model file parameter count does not match the architecture");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& jp = jparams[i];
    if (jp.at("name").get<std::string>() != params[i].name)
      throw DataError("model file parameter '" + jp.at("name").get<std::string>() +
                      "' does not match expected '" + params[i].name + "'");
    const auto values = jp.at("values").get<std::vector<double>>();
    if (values.size() != params[i].size)
      throw DataError("model file parameter '" + params[i].name + "' has wrong size");
    for (std::size_t k = 0; k < values.size(); ++k) params[i].data[k] = values[k];
  }
  return m;
}

inline MultimodalModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file is malformed: ") + e.what());
  }
  return model_from_json(doc);
}

}  // namespace flawnet
