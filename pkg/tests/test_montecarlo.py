import math
import warnings

import pytest

from leofso.errors import DomainError
from leofso.fading import FadingParams, StateModel
from leofso.montecarlo import CHUNK, SweepPoint, mc_outage, mc_sweep
from leofso.outage import outage_for_states

STATES = StateModel((0.4, 0.4, 0.2), ((1.0, 1.0), (1.4, 2.0), (1.8, 3.5)))
PARAMS = (FadingParams(19.65, 16.95), FadingParams(14.02, 12.91), FadingParams(10.89, 9.61))
NU = 0.5087


def test_reproducible():
    a = mc_outage(STATES, PARAMS, NU, n=20_000, seed=7, stream=3)
    b = mc_outage(STATES, PARAMS, NU, n=20_000, seed=7, stream=3)
    c = mc_outage(STATES, PARAMS, NU, n=20_000, seed=8, stream=3)
    assert a == b
    assert a.estimate != c.estimate


def test_stderr_is_binomial():
    r = mc_outage(STATES, PARAMS, NU, n=50_000, seed=1)
    assert r.stderr == pytest.approx(math.sqrt(r.estimate * (1 - r.estimate) / r.n))
    lo, hi = r.interval(2.0)
    assert lo < r.estimate < hi


def test_chunked_run_extends_single_chunk():
    # the first chunk of a longer run is the same draw as a one-chunk run
    n = CHUNK + 10
    long = mc_outage(STATES, PARAMS, 0.45, n=n, seed=2)
    short = mc_outage(STATES, PARAMS, 0.45, n=CHUNK, seed=2)
    assert abs(long.estimate * n - short.estimate * CHUNK) <= 10


def test_coverage_over_seeds():
    analytic = outage_for_states(STATES, PARAMS, NU)
    hits = 0
    for seed in range(100):
        r = mc_outage(STATES, PARAMS, NU, n=20_000, seed=seed)
        hits += abs(r.estimate - analytic) <= 2 * math.sqrt(analytic * (1 - analytic) / r.n)
    if hits < 92:
        warnings.warn(f"2-sigma coverage {hits}/100 below nominal 95")
    assert hits >= 85


def test_sweep_streams_and_workers():
    pts = [SweepPoint("a", 0.5, STATES, PARAMS, NU, outage_for_states(STATES, PARAMS, NU)),
           SweepPoint("b", 0.5, STATES, PARAMS, 0.3, outage_for_states(STATES, PARAMS, 0.3))]
    serial = mc_sweep(pts, n=10_000, seed=4)
    parallel = mc_sweep(pts, n=10_000, seed=4, workers=2)
    assert [r.result for r in serial] == [r.result for r in parallel]
    assert [r.result.stream for r in serial] == [0, 1]
    assert serial[0].resolvable and not serial[1].resolvable


def test_rejects_bad_arguments():
    with pytest.raises(DomainError):
        mc_outage(STATES, PARAMS, NU, n=0)
    with pytest.raises(DomainError):
        mc_outage(STATES, PARAMS, -1.0, n=10)
