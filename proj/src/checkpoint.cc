// src/checkpoint.cc
// Copyright 2026 The asrtk authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "asrtk/checkpoint.h"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "asrtk/error.h"

namespace asrtk {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'A', 'S', 'C', 'K'};
constexpr uint32_t kVersion = 1;

ModelConfig config_from_json(const json &j) {
  ModelConfig config;
  config.input_dim = j.at("input_dim").get<int>();
  config.num_outputs = j.at("num_outputs").get<int>();
  config.scale_factor = j.at("scale_factor").get<double>();
  for (const auto &lj : j.at("layers")) {
    LayerSpec s;
    const std::string kind = lj.at("kind").get<std::string>();
    if (kind == "tdnn") {
      s.kind = LayerKind::kTdnn;
      s.context = lj.at("context").get<std::vector<int>>();
      s.out_dim = lj.at("out_dim").get<int>();
    } else if (kind == "lstmp") {
      s.kind = LayerKind::kLstmp;
      s.cell_dim = lj.at("cell_dim").get<int>();
      s.proj_dim = lj.at("proj_dim").get<int>();
    } else {
      throw FormatError("unknown layer kind in checkpoint: " + kind);
    }
    config.layers.push_back(std::move(s));
  }
  return config;
}

}  // namespace

void save_checkpoint(const Checkpoint &model, const std::string &path) {
  json header;
  header["config"] = json::parse(model_config_json(model.config));
  header["meta"] = {{"stage", model.meta.stage},
                    {"epoch", model.meta.epoch},
                    {"seed", model.meta.seed},
                    {"config_hash", model.meta.config_hash}};
  json tensors = json::array();
  auto refs = tensor_refs(const_cast<Checkpoint *>(&model));
  for (const auto &r : refs)
    tensors.push_back({{"name", r.name}, {"shape", r.shape}});
  header["tensors"] = tensors;
  const std::string header_str = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, 4);
  uint32_t version = kVersion;
  out.write(reinterpret_cast<const char *>(&version), 4);
  uint64_t header_len = header_str.size();
  out.write(reinterpret_cast<const char *>(&header_len), 8);
  out.write(header_str.data(), std::streamsize(header_str.size()));

  std::vector<float> buf;
  for (const auto &r : refs) {
    buf.resize(r.size);
    for (size_t i = 0; i < r.size; i++) buf[i] = float(r.data[i]);
    out.write(reinterpret_cast<const char *>(buf.data()),
              std::streamsize(buf.size() * sizeof(float)));
  }
  if (!out) throw DataError("short write to checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);

  char magic[4];
  uint32_t version = 0;
  uint64_t header_len = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char *>(&version), 4);
  in.read(reinterpret_cast<char *>(&header_len), 8);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("not a checkpoint file: " + path);
  if (version != kVersion)
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version) + ": " + path);

  std::string header_str(header_len, '\0');
  in.read(header_str.data(), std::streamsize(header_len));
  if (!in) throw FormatError("truncated checkpoint header: " + path);
  json header;
  try {
    header = json::parse(header_str);
  } catch (const json::parse_error &e) {
    throw FormatError("bad checkpoint header: " + std::string(e.what()));
  }

  Checkpoint model = build_model(config_from_json(header.at("config")), 0);
  const auto &meta = header.at("meta");
  model.meta.stage = meta.at("stage").get<std::string>();
  model.meta.epoch = meta.at("epoch").get<int>();
  model.meta.seed = meta.at("seed").get<uint64_t>();
  model.meta.config_hash = meta.at("config_hash").get<std::string>();

  auto refs = tensor_refs(&model);
  const auto &tensors = header.at("tensors");
  if (tensors.size() != refs.size())
    throw FormatError("checkpoint tensor count mismatch: " + path);
  std::vector<float> buf;
  for (size_t i = 0; i < refs.size(); i++) {
    const auto shape = tensors[i].at("shape").get<std::vector<size_t>>();
    if (tensors[i].at("name").get<std::string>() != refs[i].name ||
        shape != refs[i].shape)
      throw FormatError("checkpoint tensor layout mismatch at " +
                        refs[i].name + ": " + path);
    buf.resize(refs[i].size);
    in.read(reinterpret_cast<char *>(buf.data()),
            std::streamsize(buf.size() * sizeof(float)));
    if (!in) throw FormatError("truncated checkpoint tensors: " + path);
    for (size_t k = 0; k < refs[i].size; k++)
      refs[i].data[k] = double(buf[k]);
  }
  return model;
}

}  // namespace asrtk
