"""Per-stage random streams derived from a master seed.

Each stage owns the stream ``SeedSequence([master, stage index])``; a stage
that draws more or fewer numbers never shifts another stage's randomness.
"""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError

# Order is frozen: indices feed the seed sequences.
STAGES = (
    "split",
    "preprocess",
    "embed",
    "ae_train",
    "encode",
    "flow_train",
    "score",
    "subgroups",
    "evaluate",
    "synonyms",
    "noise",
)


def stage_seed_sequence(master: int, stage: str) -> np.random.SeedSequence:
    if stage not in STAGES:
        raise ValidationError(f"unknown pipeline stage '{stage}'")
    return np.random.SeedSequence([int(master), STAGES.index(stage)])


def stage_rng(master: int, stage: str) -> np.random.Generator:
    return np.random.default_rng(stage_seed_sequence(master, stage))
