# python/voxpriv/__init__.py

# Copyright 2026  Voxpriv Authors

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

"""Python face of the voxpriv C++ core.

Exposes the main operations of the speaker-anonymization evaluation
toolkit: cosine scoring, EER with the flip rule, word/phone error rates,
prosody normalization, and constrained anonymous-target selection.
"""

from ._voxpriv import (
    VoxprivError,
    compute_eer,
    cosine_distance,
    cosine_similarity,
    edit_distance,
    flip_rule,
    gender_average,
    mean_embedding,
    normalize_prosody,
    normalize_text,
    per,
    select_anonymous,
    wer,
)

__version__ = "0.1.0"

__all__ = [
    "VoxprivError",
    "compute_eer",
    "cosine_distance",
    "cosine_similarity",
    "edit_distance",
    "flip_rule",
    "gender_average",
    "mean_embedding",
    "normalize_prosody",
    "normalize_text",
    "per",
    "select_anonymous",
    "wer",
    "__version__",
]
