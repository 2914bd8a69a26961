// src/manifest.cc
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

#include "asrtk/manifest.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "asrtk/error.h"

namespace asrtk {

using nlohmann::json;

double Manifest::total_duration_s() const {
  double acc = 0.0;
  for (const auto &u : utterances) acc += u.duration_s;
  return acc;
}

std::vector<std::string> Manifest::speaker_ids() const {
  std::set<std::string> ids;
  for (const auto &u : utterances) ids.insert(u.speaker_id);
  return {ids.begin(), ids.end()};
}

std::string transcript_to_string(const std::vector<std::string> &words) {
  std::string out;
  for (size_t i = 0; i < words.size(); i++) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

std::vector<std::string> split_words(const std::string &text) {
  std::vector<std::string> words;
  std::istringstream ss(text);
  std::string w;
  while (ss >> w) words.push_back(w);
  return words;
}

Manifest read_manifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);

  Manifest m;
  std::set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw FormatError("manifest " + path + " line " +
                        std::to_string(lineno) + ": " + e.what());
    }
    Utterance u;
    try {
      u.utt_id = j.at("utt_id").get<std::string>();
      u.speaker_id = j.at("speaker_id").get<std::string>();
      u.audio_path = j.at("audio_path").get<std::string>();
      u.transcript = split_words(j.at("transcript").get<std::string>());
      u.condition_tag = j.at("condition_tag").get<std::string>();
      u.duration_s = j.at("duration_s").get<double>();
    } catch (const json::exception &e) {
      throw FormatError("manifest " + path + " line " +
                        std::to_string(lineno) + ": " + e.what());
    }
    if (!seen.insert(u.utt_id).second)
      throw FormatError("manifest " + path + ": duplicate utt_id " + u.utt_id);
    m.utterances.push_back(std::move(u));
  }
  return m;
}

void write_manifest(const Manifest &manifest, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open manifest for writing: " + path);
  for (const auto &u : manifest.utterances) {
    json j;
    j["utt_id"] = u.utt_id;
    j["speaker_id"] = u.speaker_id;
    j["audio_path"] = u.audio_path;
    j["transcript"] = transcript_to_string(u.transcript);
    j["condition_tag"] = u.condition_tag;
    j["duration_s"] = u.duration_s;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("short write to manifest: " + path);
}

}  // namespace asrtk
