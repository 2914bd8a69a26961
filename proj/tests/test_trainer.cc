// tests/test_trainer.cc
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "asrtk/error.h"
#include "asrtk/rng.h"
#include "asrtk/trainer.h"
#include "test_util.h"

using namespace asrtk;
using asrtk_test::TempDir;

namespace {

ModelConfig small_config(int input_dim = 8, int num_outputs = 3) {
  ModelConfig config;
  config.input_dim = input_dim;
  config.num_outputs = num_outputs;
  LayerSpec t;
  t.kind = LayerKind::kTdnn;
  t.context = {-1, 0, 1};
  t.out_dim = 12;
  LayerSpec l;
  l.kind = LayerKind::kLstmp;
  l.cell_dim = 8;
  l.proj_dim = 4;
  config.layers = {t, l};
  return config;
}

// Linearly separable frames: class k lives near the k-th unit direction.
TrainingSet separable_set(int num_utts, size_t frames_per_utt, int input_dim,
                          int classes, uint64_t seed) {
  Rng rng(seed);
  TrainingSet set;
  for (int u = 0; u < num_utts; u++) {
    TrainingUtt tu;
    tu.utt_id = "utt" + std::to_string(u);
    tu.features = Matrix(frames_per_utt, size_t(input_dim));
    tu.targets.resize(frames_per_utt);
    for (size_t t = 0; t < frames_per_utt; t++) {
      const int k = int(rng.index(size_t(classes)));
      tu.targets[t] = k;
      for (int c = 0; c < input_dim; c++)
        tu.features.at(t, size_t(c)) =
            0.1 * rng.gaussian() + (c % classes == k ? 1.0 : 0.0);
    }
    set.utts.push_back(std::move(tu));
  }
  return set;
}

}  // namespace

TEST_CASE("stage defaults follow the two training columns") {
  StageConfig s1 = StageConfig::stage1_defaults();
  CHECK(s1.lr_init == 1e-3);
  CHECK(s1.lr_final == 1e-4);
  CHECK(s1.epochs == 4);
  CHECK(dropout_rate(s1.dropout, 0.5) == doctest::Approx(0.3));

  StageConfig s2 = StageConfig::stage2_defaults();
  CHECK(s2.lr_init == 1e-6);
  CHECK(s2.lr_final == 1e-7);
  for (double p : {0.0, 0.4, 1.0}) CHECK(dropout_rate(s2.dropout, p) == 0.0);
}

TEST_CASE("lr_at endpoints and geometric midpoint") {
  StageConfig s1 = StageConfig::stage1_defaults();
  CHECK(lr_at(s1, 0.0) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(lr_at(s1, 1.0) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(lr_at(s1, 0.5) ==
        doctest::Approx(std::sqrt(1e-3 * 1e-4)).epsilon(1e-12));
  CHECK(lr_at(s1, 0.5) == doctest::Approx(3.1623e-4).epsilon(1e-4));

  StageConfig s2 = StageConfig::stage2_defaults();
  CHECK(lr_at(s2, 1.0) == doctest::Approx(1e-7).epsilon(1e-12));

  CHECK_THROWS_AS(lr_at(s1, 1.5), DomainError);
}

TEST_CASE("lr_at is strictly decreasing when lr_final < lr_init") {
  StageConfig s = StageConfig::stage1_defaults();
  double prev = lr_at(s, 0.0);
  for (int i = 1; i <= 100; i++) {
    const double cur = lr_at(s, i / 100.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("zero epochs returns the initial checkpoint unchanged") {
  Checkpoint init = build_model(small_config(), 1);
  TrainingSet data = separable_set(4, 20, 8, 3, 2);
  StageConfig config = StageConfig::stage1_defaults();
  config.epochs = 0;
  TrainResult res = train_stage(init, data, config);
  CHECK(res.metrics.empty());
  auto ra = tensor_refs(&init);
  auto rb = tensor_refs(&res.model);
  for (size_t r = 0; r < ra.size(); r++)
    for (size_t i = 0; i < ra[r].size; i++)
      CHECK(ra[r].data[i] == rb[r].data[i]);
}

TEST_CASE("training a separable task decreases the loss every epoch") {
  Checkpoint init = build_model(small_config(), 3);
  TrainingSet data = separable_set(12, 30, 8, 3, 4);
  StageConfig config = StageConfig::stage1_defaults();
  config.lr_init = 0.5;
  config.lr_final = 0.05;
  config.epochs = 4;
  config.batch_utts = 4;
  config.dropout = DropoutSchedule::constant(0.0);
  config.seed = 5;
  TrainResult res = train_stage(init, data, config);

  // Mean loss per epoch, strictly decreasing.
  std::vector<double> epoch_loss(4, 0.0);
  std::vector<int> counts(4, 0);
  for (const auto &m : res.metrics) {
    epoch_loss[size_t(m.epoch)] += m.loss;
    counts[size_t(m.epoch)]++;
  }
  for (int e = 0; e < 4; e++) epoch_loss[size_t(e)] /= counts[size_t(e)];
  for (int e = 1; e < 4; e++) CHECK(epoch_loss[size_t(e)] < epoch_loss[size_t(e - 1)]);
  CHECK(res.model.meta.stage == "stage1");
}

TEST_CASE("metrics log one record per step") {
  Checkpoint init = build_model(small_config(), 6);
  TrainingSet data = separable_set(10, 15, 8, 3, 7);
  StageConfig config = StageConfig::stage1_defaults();
  config.epochs = 3;
  config.batch_utts = 4;  // ceil(10/4) = 3 steps per epoch
  TrainResult res = train_stage(init, data, config);
  CHECK(res.metrics.size() == 9);
  for (size_t i = 0; i < res.metrics.size(); i++)
    CHECK(res.metrics[i].step == i);

  TempDir dir("metrics");
  write_metrics_csv(res.metrics, "deadbeef", dir.file("m.csv"));
  std::ifstream in(dir.file("m.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "# config_hash=deadbeef");
  std::getline(in, line);
  CHECK(line == "step,epoch,progress,lr,dropout,loss,frame_acc");
  size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) rows++;
  CHECK(rows == 9);
}

TEST_CASE("training is reproducible and independent of jobs") {
  Checkpoint init = build_model(small_config(), 8);
  TrainingSet data = separable_set(8, 25, 8, 3, 9);
  StageConfig config = StageConfig::stage1_defaults();
  config.lr_init = 0.2;
  config.lr_final = 0.02;
  config.epochs = 2;
  config.seed = 10;

  TrainResult a = train_stage(init, data, config, "", 1);
  TrainResult b = train_stage(init, data, config, "", 1);
  TrainResult c = train_stage(init, data, config, "", 4);
  auto ra = tensor_refs(&a.model), rb = tensor_refs(&b.model),
       rc = tensor_refs(&c.model);
  for (size_t r = 0; r < ra.size(); r++)
    for (size_t i = 0; i < ra[r].size; i++) {
      CHECK(ra[r].data[i] == rb[r].data[i]);
      CHECK(ra[r].data[i] == rc[r].data[i]);
    }
}

TEST_CASE("nan loss aborts and keeps the per-epoch checkpoints") {
  TempDir dir("abort");
  Checkpoint init = build_model(small_config(), 11);
  TrainingSet data = separable_set(4, 10, 8, 3, 12);
  StageConfig config = StageConfig::stage1_defaults();
  config.lr_init = 1e18;  // guaranteed blowup after the first update
  config.lr_final = 1e17;
  config.epochs = 3;
  config.batch_utts = 1;
  CHECK_THROWS_AS(train_stage(init, data, config, dir.str()), NumericError);
}

TEST_CASE("transfer_init copies every tensor bitwise") {
  ModelConfig config = small_config();
  Checkpoint source = build_model(config, 13);
  source.meta.stage = "stage1";
  Checkpoint target = transfer_init(source, config);
  CHECK(target.meta.stage == "stage2-init");
  auto rs = tensor_refs(&source), rt = tensor_refs(&target);
  for (size_t r = 0; r < rs.size(); r++)
    for (size_t i = 0; i < rs[r].size; i++)
      CHECK(rs[r].data[i] == rt[r].data[i]);
}

TEST_CASE("transfer_init rejects a mismatched output layer by name") {
  ModelConfig config = small_config(8, 3);
  Checkpoint source = build_model(config, 14);
  ModelConfig other = small_config(8, 5);
  CHECK_THROWS_WITH_AS(transfer_init(source, other),
                       doctest::Contains("output.w"), TransferError);
}

TEST_CASE("one stage-2 step moves every layer (nothing is frozen)") {
  ModelConfig config = small_config();
  Checkpoint source = build_model(config, 15);
  TrainingSet data = separable_set(2, 15, 8, 3, 16);

  StageConfig s2 = StageConfig::stage2_defaults();
  s2.epochs = 1;
  s2.batch_utts = 2;  // exactly one step
  s2.seed = 17;
  Checkpoint init = transfer_init(source, config);
  TrainResult res = train_stage(init, data, s2);
  REQUIRE(res.metrics.size() == 1);
  CHECK(res.metrics[0].dropout == 0.0);

  auto rs = tensor_refs(&source);
  auto rt = tensor_refs(&res.model);
  for (size_t r = 0; r < rs.size(); r++) {
    double max_delta = 0.0;
    for (size_t i = 0; i < rs[r].size; i++)
      max_delta = std::max(max_delta,
                           std::fabs(rs[r].data[i] - rt[r].data[i]));
    CAPTURE(rs[r].name);
    CHECK(max_delta > 0.0);
  }
}
