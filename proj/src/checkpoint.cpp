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

#include "lasr/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "lasr/error.hpp"
#include "lasr/io.hpp"

namespace lasr::ckpt {

const model::ParamStore& Container::store(const std::string& name) const {
  for (const auto& [n, s] : stores) {
    if (n == name) return s;
  }
  fail("checkpoint: container has no store '", name, "'");
}

void save(const std::string& path, const Container& container) {
  util::atomic_write(path, [&](std::ostream& os) {
    os.write(kMagic, 8);
    util::write_u32(os, kVersion);
    util::write_string(os, container.kind);
    util::write_string(os, container.meta.dump());
    util::write_u32(os, static_cast<std::uint32_t>(container.stores.size()));
    for (const auto& [store_name, store] : container.stores) {
      util::write_string(os, store_name);
      util::write_u32(os, static_cast<std::uint32_t>(store.items.size()));
      for (const auto& [param_name, value] : store.items) {
        util::write_string(os, param_name);
        util::write_u32(os, static_cast<std::uint32_t>(value.rows));
        util::write_u32(os, static_cast<std::uint32_t>(value.cols));
        util::write_f64_vec(os, value.data);
      }
    }
  });
}

Container load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  check(is.good(), "checkpoint: cannot open ", path);
  char magic[8];
  is.read(magic, 8);
  check(is.good() && std::string(magic, 8) == kMagic, "checkpoint: ", path,
        " is not a checkpoint container");
  const std::uint32_t version = util::read_u32(is);
  check(version == kVersion, "checkpoint: ", path, " has version ", version,
        ", this build reads version ", kVersion);

  Container c;
  c.kind = util::read_string(is);
  const std::string meta = util::read_string(is);
  try {
    c.meta = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    fail("checkpoint: ", path, ": corrupt metadata block: ", e.what());
  }
  const std::uint32_t num_stores = util::read_u32(is);
  for (std::uint32_t s = 0; s < num_stores; ++s) {
    const std::string store_name = util::read_string(is);
    model::ParamStore store;
    const std::uint32_t num_params = util::read_u32(is);
    for (std::uint32_t k = 0; k < num_params; ++k) {
      const std::string param_name = util::read_string(is);
      const int rows = static_cast<int>(util::read_u32(is));
      const int cols = static_cast<int>(util::read_u32(is));
      auto data = util::read_f64_vec(is);
      check(static_cast<std::int64_t>(data.size()) ==
                static_cast<std::int64_t>(rows) * cols,
            "checkpoint: ", path, ": parameter ", param_name,
            " has inconsistent shape");
      store.add(param_name, ad::Array(rows, cols, std::move(data)));
    }
    c.stores.emplace_back(store_name, std::move(store));
  }
  return c;
}

nlohmann::json model_config_to_json(const model::ModelConfig& cfg) {
  nlohmann::json j;
  j["input_dim"] = cfg.input_dim;
  j["vocab_size"] = cfg.vocab_size;
  j["enc_layers"] = cfg.enc_layers;
  j["compress_after"] = cfg.compress_after;
  j["enc_hidden"] = cfg.enc_hidden;
  j["dec_layers"] = cfg.dec_layers;
  j["dec_hidden"] = cfg.dec_hidden;
  j["attn_kind"] = model::attn_kind_name(cfg.attn_kind);
  j["attn_heads"] = cfg.attn_heads;
  j["head_size"] = cfg.head_size;
  j["loc_conv_channels"] = cfg.loc_conv_channels;
  j["loc_conv_width"] = cfg.loc_conv_width;
  j["dropout"] = cfg.dropout;
  j["label_smooth"] = cfg.label_smooth;
  j["joint_lambda"] = cfg.joint_lambda;
  j["mwer_lambda"] = cfg.mwer_lambda;
  j["ss_start_epoch"] = cfg.ss_start_epoch;
  j["ss_rate"] = cfg.ss_rate;
  j["ss_max"] = cfg.ss_max;
  j["beam"] = cfg.beam;
  return j;
}

model::ModelConfig model_config_from_json(const nlohmann::json& j) {
  model::ModelConfig cfg;
  cfg.input_dim = j.at("input_dim").get<int>();
  cfg.vocab_size = j.at("vocab_size").get<int>();
  cfg.enc_layers = j.at("enc_layers").get<int>();
  cfg.compress_after = j.at("compress_after").get<std::vector<int>>();
  cfg.enc_hidden = j.at("enc_hidden").get<int>();
  cfg.dec_layers = j.at("dec_layers").get<int>();
  cfg.dec_hidden = j.at("dec_hidden").get<int>();
  cfg.attn_kind = model::attn_kind_from_name(j.at("attn_kind").get<std::string>());
  cfg.attn_heads = j.at("attn_heads").get<int>();
  cfg.head_size = j.at("head_size").get<int>();
  cfg.loc_conv_channels = j.at("loc_conv_channels").get<int>();
  cfg.loc_conv_width = j.at("loc_conv_width").get<int>();
  cfg.dropout = j.at("dropout").get<double>();
  cfg.label_smooth = j.at("label_smooth").get<double>();
  cfg.joint_lambda = j.at("joint_lambda").get<double>();
  cfg.mwer_lambda = j.at("mwer_lambda").get<double>();
  cfg.ss_start_epoch = j.at("ss_start_epoch").get<int>();
  cfg.ss_rate = j.at("ss_rate").get<double>();
  cfg.ss_max = j.at("ss_max").get<double>();
  cfg.beam = j.at("beam").get<int>();
  return cfg;
}

void require_same_config(const model::ModelConfig& expected,
                         const model::ModelConfig& actual) {
  const nlohmann::json je = model_config_to_json(expected);
  const nlohmann::json ja = model_config_to_json(actual);
  for (auto it = je.begin(); it != je.end(); ++it) {
    if (ja.at(it.key()) != it.value()) {
      fail("checkpoint: config mismatch on field '", it.key(),
           "': checkpoint has ", ja.at(it.key()).dump(), ", expected ",
           it.value().dump());
    }
  }
}

void save_las_model(const std::string& path, const model::LasModel& m,
                    const nlohmann::json* extra_meta) {
  Container c;
  c.kind = "las";
  c.meta["config"] = model_config_to_json(m.config());
  if (extra_meta) {
    for (auto it = extra_meta->begin(); it != extra_meta->end(); ++it)
      c.meta[it.key()] = it.value();
  }
  c.stores.emplace_back("params", m.params());
  save(path, c);
}

model::LasModel load_las_model(const std::string& path,
                               const model::ModelConfig* expected) {
  Container c = load(path);
  check(c.kind == "las", "checkpoint: ", path, " holds a '", c.kind,
        "' model, expected 'las'");
  model::ModelConfig cfg = model_config_from_json(c.meta.at("config"));
  if (expected) require_same_config(*expected, cfg);
  return model::LasModel(cfg, c.store("params"));
}

}  // namespace lasr::ckpt
