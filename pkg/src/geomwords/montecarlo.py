"""Monte Carlo estimates of the statistics' moments on random geometric words.

Randomness is counter-based.  Samples are grouped in fixed blocks of
``BLOCK_SIZE``; block ``b`` draws from a Philox generator keyed by the seed
with its counter starting at ``b << 128``, so the letters of sample ``i``
depend only on ``(seed, i)``.  Each block reduces to a ``(count, mean, M2)``
triple and the triples are merged in ascending block order, which makes the
report bit-identical for any number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .law import GeometricLaw, as_law
from .words import STATISTICS

__all__ = [
    "BLOCK_SIZE",
    "DEFAULT_SEED",
    "SimulationConfig",
    "EstimateReport",
    "sample_geometric",
    "geometric_letters",
    "sample_words",
    "estimate_moments",
]

BLOCK_SIZE = 1 << 16
DEFAULT_SEED = 20241015
LETTER_CAP = 1 << 62


@dataclass(frozen=True)
class SimulationConfig:
    statistic: str
    n: int
    law: GeometricLaw
    samples: int
    seed: int = DEFAULT_SEED
    workers: int = 1

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        law = as_law(self.law)
        if law.exact:
            law = GeometricLaw(float(law.q))
        object.__setattr__(self, "law", law)
        if not 0 < law.q < 1:
            raise ValueError(f"simulation needs 0 < q < 1, got {law.q}")
        if self.n < 0:
            raise ValueError(f"n must be nonnegative, got {self.n}")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 unsigned bits")


class EstimateReport(NamedTuple):
    mean: float
    variance: float
    standard_error: float
    samples: int


class _Partial(NamedTuple):
    count: int
    mean: float
    m2: float


def sample_geometric(law, u: float) -> int:
    """Inverse-CDF draw: the least ``k >= 1`` with ``1 - q**k >= u``."""
    return int(geometric_letters(as_law(law).q, np.asarray([u]))[0])


def geometric_letters(q: float, u: np.ndarray) -> np.ndarray:
    q = float(q)
    if q == 0:
        return np.ones(u.shape, dtype=np.int64)
    k = np.ceil(np.log1p(-u) / math.log(q))
    if np.any(k > LETTER_CAP):
        raise OverflowError(f"geometric letter above 2**62 at q={q}")
    return np.maximum(k, 1).astype(np.int64)


def _generator(seed: int, block: int) -> np.random.Generator:
    # counter word 2 carries the block index; one block never uses 2**128 steps
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, block, 0]))


def sample_words(cfg: SimulationConfig, block: int) -> np.ndarray:
    """Letters for the samples of one block, one word per row."""
    start = block * BLOCK_SIZE
    rows = min(BLOCK_SIZE, cfg.samples - start)
    u = _generator(cfg.seed, block).random((rows, cfg.n))
    return geometric_letters(cfg.law.q, u)


def _block_partial(cfg: SimulationConfig, block: int) -> _Partial:
    words = sample_words(cfg, block)
    if cfg.n < 2:
        values = np.zeros(len(words))
    else:
        values = STATISTICS[cfg.statistic][1](words).astype(np.float64)
    mean = float(values.mean())
    return _Partial(len(values), mean, float(((values - mean) ** 2).sum()))


def _merge(a: _Partial, b: _Partial) -> _Partial:
    count = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * b.count / count
    m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / count
    return _Partial(count, mean, m2)


def estimate_moments(cfg: SimulationConfig) -> EstimateReport:
    blocks = range(math.ceil(cfg.samples / BLOCK_SIZE))
    if cfg.workers == 1 or len(blocks) == 1:
        partials = [_block_partial(cfg, b) for b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            partials = list(pool.map(_block_partial, [cfg] * len(blocks), blocks))
    total = partials[0]
    for part in partials[1:]:
        total = _merge(total, part)
    variance = total.m2 / (total.count - 1) if total.count > 1 else 0.0
    return EstimateReport(total.mean, variance, math.sqrt(variance / total.count), total.count)
