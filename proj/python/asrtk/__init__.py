# python/asrtk/__init__.py
# Copyright 2026 The asrtk authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Speech augmentation, adaptation training and WER scoring."""

from ._asrtk import (  # noqa: F401
    ConfigError,
    DataError,
    DomainError,
    align_words,
    assemble_input,
    boxplot_stats,
    compute_mfcc,
    convolve,
    dropout_rate,
    greedy_decode,
    lr_at,
    mix_at_snr,
    read_wav,
    recording_embedding,
    relative_improvement,
    resample,
    signal_power,
    speed_perturb,
    splice,
    weighted_average_wer,
    wer,
    write_wav,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DomainError",
    "align_words",
    "assemble_input",
    "boxplot_stats",
    "compute_mfcc",
    "convolve",
    "dropout_rate",
    "greedy_decode",
    "lr_at",
    "mix_at_snr",
    "read_wav",
    "recording_embedding",
    "relative_improvement",
    "resample",
    "signal_power",
    "speed_perturb",
    "splice",
    "weighted_average_wer",
    "wer",
    "write_wav",
]
