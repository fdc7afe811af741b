// Copyright 2026 The smicqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <string>

#include <toml.hpp>

#include "smicqa/backbone.hpp"
#include "smicqa/error.hpp"

namespace smicqa {
namespace {

std::array<double, 3> read_triple(const toml::table& table, const char* key,
                                  const std::array<double, 3>& fallback) {
  const auto* node = table.get(key);
  if (node == nullptr) return fallback;
  const auto* arr = node->as_array();
  if (arr == nullptr || arr->size() != 3) {
    throw ConfigError(std::string("backbone.") + key + " must be an array of 3 numbers");
  }
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto v = (*arr)[i].value<double>();
    if (!v) throw ConfigError(std::string("backbone.") + key + " must be an array of 3 numbers");
    out[i] = *v;
  }
  return out;
}

}  // namespace

void apply_environment(BackboneConfig& config) {
  if (const char* env = std::getenv("SMICQA_MODEL_PATH"); env != nullptr && *env != '\0') {
    config.model_path = env;
  }
}

BackboneConfig load_backbone_config(const std::filesystem::path& toml_path) {
  toml::table root;
  try {
    root = toml::parse_file(toml_path.string());
  } catch (const toml::parse_error& e) {
    throw ConfigError("cannot parse " + toml_path.string() + ": " + std::string(e.description()));
  }
  BackboneConfig config;
  const auto* table = root["backbone"].as_table();
  if (table == nullptr) throw ConfigError(toml_path.string() + ": missing [backbone] table");

  if (const auto* node = table->get("model_path")) {
    const auto path = node->value<std::string>();
    if (!path) throw ConfigError("backbone.model_path must be a string");
    std::filesystem::path p(*path);
    if (p.is_relative()) p = toml_path.parent_path() / p;
    config.model_path = p;
  }
  if (const auto* node = table->get("stage_taps")) {
    const auto* arr = node->as_array();
    if (arr == nullptr) throw ConfigError("backbone.stage_taps must be an array of strings");
    if (arr->size() != static_cast<std::size_t>(kStageCount)) {
      throw ConfigError("backbone.stage_taps needs exactly 5 entries, got " +
                        std::to_string(arr->size()));
    }
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto tap = (*arr)[i].value<std::string>();
      if (!tap || tap->empty()) throw ConfigError("backbone.stage_taps entries must be non-empty strings");
      config.stage_taps[i] = *tap;
    }
  }
  config.preprocessing.mean = read_triple(*table, "input_mean", config.preprocessing.mean);
  config.preprocessing.std = read_triple(*table, "input_std", config.preprocessing.std);
  for (double s : config.preprocessing.std) {
    if (!(s > 0.0)) throw ConfigError("backbone.input_std entries must be positive");
  }
  apply_environment(config);
  return config;
}

}  // namespace smicqa
