// include/asrtk/manifest.h
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

#ifndef ASRTK_MANIFEST_H_
#define ASRTK_MANIFEST_H_

#include <string>
#include <vector>

namespace asrtk {

// One corpus record. Serialized as a JSON-lines row with exactly the fields
// utt_id, speaker_id, audio_path, transcript, condition_tag, duration_s.
struct Utterance {
  std::string utt_id;
  std::string speaker_id;
  std::string audio_path;
  std::vector<std::string> transcript;
  std::string condition_tag;
  double duration_s = 0.0;
};

struct Manifest {
  std::vector<Utterance> utterances;

  size_t size() const { return utterances.size(); }
  double total_duration_s() const;
  std::vector<std::string> speaker_ids() const;  // unique, sorted
};

Manifest read_manifest(const std::string &path);
void write_manifest(const Manifest &manifest, const std::string &path);

std::string transcript_to_string(const std::vector<std::string> &words);
std::vector<std::string> split_words(const std::string &text);

}  // namespace asrtk

#endif  // ASRTK_MANIFEST_H_
