// python/bindings.cc
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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "asrtk/audio.h"
#include "asrtk/augment.h"
#include "asrtk/error.h"
#include "asrtk/evaluation.h"
#include "asrtk/features.h"
#include "asrtk/model.h"
#include "asrtk/trainer.h"

namespace py = pybind11;
using namespace asrtk;

namespace {

AudioSignal signal_from(py::array_t<double, py::array::c_style> samples,
                        int rate) {
  if (samples.ndim() != 1) throw DomainError("expected a 1-d sample array");
  AudioSignal sig;
  sig.sample_rate_hz = rate;
  sig.samples.assign(samples.data(), samples.data() + samples.size());
  return sig;
}

py::array_t<double> array_from(const std::vector<double> &v) {
  py::array_t<double> out(py::ssize_t(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Matrix matrix_from(py::array_t<double, py::array::c_style> a) {
  if (a.ndim() != 2) throw DomainError("expected a 2-d array");
  Matrix m(size_t(a.shape(0)), size_t(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data.begin());
  return m;
}

py::array_t<double> array_from(const Matrix &m) {
  py::array_t<double> out({py::ssize_t(m.rows), py::ssize_t(m.cols)});
  std::copy(m.data.begin(), m.data.end(), out.mutable_data());
  return out;
}

py::dict alignment_dict(const AlignmentResult &a) {
  py::dict d;
  d["substitutions"] = a.substitutions;
  d["deletions"] = a.deletions;
  d["insertions"] = a.insertions;
  d["correct"] = a.correct;
  d["ref_len"] = a.ref_len;
  return d;
}

}  // namespace

PYBIND11_MODULE(_asrtk, m) {
  m.doc() = "speech augmentation, adaptation training and WER scoring";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<DomainError>(m, "DomainError");

  // audio
  m.def(
      "read_wav",
      [](const std::string &path) {
        AudioSignal sig = read_wav(path);
        return py::make_tuple(array_from(sig.samples), sig.sample_rate_hz);
      },
      py::arg("path"), "Read a wav file; returns (samples, sample_rate_hz).");
  m.def(
      "write_wav",
      [](py::array_t<double, py::array::c_style> samples, int rate,
         const std::string &path) {
        return write_wav(signal_from(samples, rate), path);
      },
      py::arg("samples"), py::arg("sample_rate_hz"), py::arg("path"),
      "Write 16-bit PCM mono; returns the number of clipped samples.");
  m.def(
      "resample",
      [](py::array_t<double, py::array::c_style> samples, int rate,
         int target_rate) {
        return array_from(
            resample(signal_from(samples, rate), target_rate).samples);
      },
      py::arg("samples"), py::arg("sample_rate_hz"),
      py::arg("target_rate_hz"));
  m.def(
      "signal_power",
      [](py::array_t<double, py::array::c_style> samples) {
        return signal_power(signal_from(samples, 16000));
      },
      py::arg("samples"));

  // augmentation kernels
  m.def(
      "convolve",
      [](py::array_t<double, py::array::c_style> signal,
         py::array_t<double, py::array::c_style> rir, int rate) {
        ConvolveResult res =
            convolve(signal_from(signal, rate), signal_from(rir, rate));
        return py::make_tuple(array_from(res.signal.samples), res.scale);
      },
      py::arg("signal"), py::arg("rir"), py::arg("sample_rate_hz") = 16000,
      "Reverberate; returns (samples truncated to len(signal), peak scale).");
  m.def(
      "mix_at_snr",
      [](py::array_t<double, py::array::c_style> speech,
         py::array_t<double, py::array::c_style> noise, double snr_db,
         int rate) {
        return array_from(mix_at_snr(signal_from(speech, rate),
                                     signal_from(noise, rate), snr_db)
                              .samples);
      },
      py::arg("speech"), py::arg("noise"), py::arg("snr_db"),
      py::arg("sample_rate_hz") = 16000);
  m.def(
      "speed_perturb",
      [](py::array_t<double, py::array::c_style> samples, int rate,
         double factor) {
        return array_from(
            speed_perturb(signal_from(samples, rate), factor).samples);
      },
      py::arg("samples"), py::arg("sample_rate_hz"), py::arg("factor"));

  // features
  m.def(
      "compute_mfcc",
      [](py::array_t<double, py::array::c_style> samples, int rate) {
        return array_from(compute_mfcc(signal_from(samples, rate)).frames);
      },
      py::arg("samples"), py::arg("sample_rate_hz") = 16000,
      "40-dim MFCC matrix, 25 ms windows at 10 ms shift.");
  m.def(
      "splice",
      [](py::array_t<double, py::array::c_style> frames, int left, int right) {
        FeatureMatrix fm;
        fm.frames = matrix_from(frames);
        return array_from(splice(fm, left, right).frames);
      },
      py::arg("frames"), py::arg("left") = 2, py::arg("right") = 2);
  m.def(
      "recording_embedding",
      [](py::array_t<double, py::array::c_style> frames,
         const std::string &source_id) {
        FeatureMatrix fm;
        fm.frames = matrix_from(frames);
        return array_from(recording_embedding(fm, source_id).vector);
      },
      py::arg("frames"), py::arg("source_id") = "");
  m.def(
      "assemble_input",
      [](py::array_t<double, py::array::c_style> spliced,
         py::array_t<double, py::array::c_style> embedding) {
        FeatureMatrix fm;
        fm.frames = matrix_from(spliced);
        RecordingEmbedding emb;
        emb.vector.assign(embedding.data(),
                          embedding.data() + embedding.size());
        return array_from(assemble_input(fm, emb));
      },
      py::arg("spliced"), py::arg("embedding"));

  // schedules
  m.def(
      "lr_at",
      [](double lr_init, double lr_final, double progress) {
        StageConfig c;
        c.lr_init = lr_init;
        c.lr_final = lr_final;
        return lr_at(c, progress);
      },
      py::arg("lr_init"), py::arg("lr_final"), py::arg("progress"));
  m.def(
      "dropout_rate",
      [](const std::vector<std::pair<double, double>> &breakpoints,
         double progress) {
        DropoutSchedule s;
        s.breakpoints = breakpoints;
        return dropout_rate(s, progress);
      },
      py::arg("breakpoints"), py::arg("progress"));

  // scoring
  m.def(
      "align_words",
      [](const std::vector<std::string> &ref,
         const std::vector<std::string> &hyp) {
        return alignment_dict(align_words(ref, hyp));
      },
      py::arg("ref"), py::arg("hyp"));
  m.def(
      "wer",
      [](const std::vector<std::string> &ref,
         const std::vector<std::string> &hyp) {
        return wer(align_words(ref, hyp));
      },
      py::arg("ref"), py::arg("hyp"));
  m.def("weighted_average_wer", &weighted_average_wer, py::arg("per_speaker"));
  m.def("relative_improvement", &relative_improvement,
        py::arg("baseline_wer"), py::arg("system_wer"));
  m.def(
      "boxplot_stats",
      [](std::vector<double> values) {
        BoxplotStats s = boxplot_stats(std::move(values));
        py::dict d;
        d["min"] = s.min;
        d["q1"] = s.q1;
        d["median"] = s.median;
        d["q3"] = s.q3;
        d["max"] = s.max;
        d["whisker_lo"] = s.whisker_lo;
        d["whisker_hi"] = s.whisker_hi;
        d["outliers"] = s.outliers;
        return d;
      },
      py::arg("values"));
  m.def(
      "greedy_decode",
      [](py::array_t<double, py::array::c_style> log_posteriors,
         const std::vector<std::string> &words, int silence_id) {
        SymbolTable symbols;
        symbols.words = words;
        symbols.silence_id = silence_id;
        return greedy_decode(matrix_from(log_posteriors), symbols);
      },
      py::arg("log_posteriors"), py::arg("words"), py::arg("silence_id") = 0);
}
