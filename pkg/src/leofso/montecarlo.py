"""Plain Monte Carlo estimates of the outage probability."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .fading import FadingParams, StateModel, sample_fading

DEFAULT_SAMPLES = 1_000_000
CHUNK = 1_000_000
# below this analytic probability a point is not compared against simulation
MIN_RESOLVABLE = 1e-4


@dataclass(frozen=True)
class McResult:
    estimate: float
    n: int
    stderr: float
    seed: int
    stream: int = 0

    def interval(self, k: float = 3.0) -> tuple[float, float]:
        return self.estimate - k * self.stderr, self.estimate + k * self.stderr


def mc_outage(states: StateModel, params: Sequence[FadingParams], nu: float, n: int = DEFAULT_SAMPLES,
              seed: int = 0, stream: int = 0, angular: str = "gaussian") -> McResult:
    """Fraction of ``n`` sampled realizations with h_a h_p < nu.

    Samples are drawn in fixed chunks of ``CHUNK`` from consecutive
    sub-streams, so a given (seed, stream, n) always gives the same estimate.
    """
    if n < 1:
        raise DomainError("sample count must be at least 1")
    if not nu >= 0:
        raise DomainError("normalized threshold must be non-negative")
    hits = 0
    done = 0
    chunk_index = 0
    while done < n:
        size = min(CHUNK, n - done)
        sub = stream * 1_000_003 + chunk_index
        draw = sample_fading(states, params, size, seed, stream=sub, angular=angular)
        hits += int(np.count_nonzero(draw.h_a * draw.h_p < nu))
        done += size
        chunk_index += 1
    p = hits / n
    return McResult(estimate=p, n=n, stderr=math.sqrt(p * (1.0 - p) / n), seed=seed, stream=stream)


@dataclass(frozen=True)
class SweepPoint:
    """One Monte Carlo job: a model at an elevation with its analytic outage."""

    label: str
    elevation: float
    states: StateModel
    params: tuple[FadingParams, ...]
    nu: float
    analytic: float


@dataclass(frozen=True)
class SweepRow:
    point: SweepPoint
    result: McResult
    resolvable: bool

    @property
    def rel_error(self) -> float:
        return abs(self.result.estimate - self.point.analytic) / self.point.analytic

    @property
    def within(self) -> float:
        """|estimate - analytic| in units of the binomial standard error."""
        if self.result.stderr == 0:
            return math.inf if self.result.estimate != self.point.analytic else 0.0
        return abs(self.result.estimate - self.point.analytic) / self.result.stderr


def _run(args):
    point, n, seed, stream, angular = args
    return mc_outage(point.states, point.params, point.nu, n, seed, stream, angular)


def mc_sweep(points: Sequence[SweepPoint], n: int = DEFAULT_SAMPLES, seed: int = 0, angular: str = "gaussian",
             workers: int = 1, min_resolvable: float = MIN_RESOLVABLE) -> list[SweepRow]:
    """Run every point on its own stream (stream index = position in ``points``).

    A point is resolvable when its analytic outage is at least
    ``max(min_resolvable, 10 / n)``, i.e. about ten expected outage events.
    """
    jobs = [(p, n, seed, i, angular) for i, p in enumerate(points)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, jobs))
    else:
        results = [_run(j) for j in jobs]
    floor = max(min_resolvable, 10.0 / n)
    return [SweepRow(p, r, p.analytic >= floor) for p, r in zip(points, results)]
