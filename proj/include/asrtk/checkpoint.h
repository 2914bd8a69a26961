// include/asrtk/checkpoint.h
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

#ifndef ASRTK_CHECKPOINT_H_
#define ASRTK_CHECKPOINT_H_

#include <string>

#include "asrtk/model.h"

namespace asrtk {

// Versioned binary checkpoint: magic "ASCK", u32 version, u64 header length,
// JSON header (config, metadata, tensor shapes), then the tensors as
// row-major little-endian f32 in canonical order.
void save_checkpoint(const Checkpoint &model, const std::string &path);
Checkpoint load_checkpoint(const std::string &path);

}  // namespace asrtk

#endif  // ASRTK_CHECKPOINT_H_
