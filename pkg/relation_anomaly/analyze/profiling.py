"""Wall-clock and memory profiling of pipeline stages."""

from __future__ import annotations

import logging
import os
import statistics
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator

import psutil

from ..errors import StageError

logger = logging.getLogger(__name__)


@dataclass
class StageTiming:
    """Timing for a single stage execution."""

    stage: str
    duration_ms: float
    memory_delta_mb: float = 0.0


@dataclass
class StageProfiler:
    """Records every ``with profiler.stage(name):`` block of one seed.

    Exceptions escaping a block are re-raised as :class:`StageError` tagged
    with the stage name and seed.
    """

    seed: int = 0
    timings: list[StageTiming] = field(default_factory=list)

    def __post_init__(self):
        self.process = psutil.Process(os.getpid())

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        initial_memory = self.process.memory_info().rss / 1024 / 1024  # MB
        start = time.perf_counter()
        try:
            yield
        except StageError:
            raise
        except Exception as e:
            raise StageError(name, self.seed, e) from e
        finally:
            elapsed = (time.perf_counter() - start) * 1000
            delta = self.process.memory_info().rss / 1024 / 1024 - initial_memory
            self.timings.append(StageTiming(name, elapsed, delta))
            logger.debug("seed %d stage %s: %.1f ms, %+.1f MB", self.seed, name, elapsed, delta)

    @property
    def durations(self) -> dict[str, float]:
        """Total milliseconds per stage name, in first-seen order."""
        totals: dict[str, float] = defaultdict(float)
        for t in self.timings:
            totals[t.stage] += t.duration_ms
        return dict(totals)


def summarize_durations(per_seed: dict[int, dict[str, float]]) -> dict[str, dict[str, float]]:
    """Mean and max milliseconds per stage across seeds."""
    by_stage: dict[str, list[float]] = defaultdict(list)
    for durations in per_seed.values():
        for stage, ms in durations.items():
            by_stage[stage].append(ms)
    return {stage: {"mean_ms": statistics.mean(v), "max_ms": max(v)} for stage, v in by_stage.items()}
