// Copyright 2026 The lasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lasr/model.hpp"

namespace lasr::ckpt {

inline constexpr char kMagic[] = "LASRCKP1";
inline constexpr std::uint32_t kVersion = 1;

// Versioned container: a kind tag, a JSON metadata block (config echo,
// counters), and named parameter stores. Save -> load -> save is
// byte-identical.
struct Container {
  std::string kind;
  nlohmann::json meta;
  std::vector<std::pair<std::string, model::ParamStore>> stores;

  const model::ParamStore& store(const std::string& name) const;
};

void save(const std::string& path, const Container& container);
Container load(const std::string& path);

nlohmann::json model_config_to_json(const model::ModelConfig& cfg);
model::ModelConfig model_config_from_json(const nlohmann::json& j);

// Error (naming the first mismatched field) when two configs differ.
void require_same_config(const model::ModelConfig& expected,
                         const model::ModelConfig& actual);

// extra_meta entries (e.g. the feature pipeline settings) are stored beside
// the config echo.
void save_las_model(const std::string& path, const model::LasModel& m,
                    const nlohmann::json* extra_meta = nullptr);
model::LasModel load_las_model(const std::string& path,
                               const model::ModelConfig* expected = nullptr);

}  // namespace lasr::ckpt
