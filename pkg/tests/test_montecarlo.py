import math

import numpy as np
import pytest

from geomwords import closed_forms as cf
from geomwords import montecarlo as mc
from geomwords.law import GeometricLaw


def test_sampler_examples():
    assert mc.sample_geometric(0, 0.73) == 1
    assert mc.sample_geometric(0.5, 0.4) == 1
    assert mc.sample_geometric(0.5, 0.6) == 2
    assert mc.sample_geometric(0.5, 0.5) == 1
    assert mc.sample_geometric(0.5, 0.0) == 1


def test_sampler_is_inverse_cdf():
    q = 0.7
    u = np.linspace(0, 1, 5001, endpoint=False)
    k = mc.geometric_letters(q, u)
    assert np.all(1 - q ** k >= u - 1e-12)
    assert np.all((k == 1) | (1 - q ** (k - 1) < u + 1e-12))


def test_sampler_marginal():
    gen = np.random.default_rng(5)
    letters = mc.geometric_letters(0.5, gen.random(10 ** 6))
    freq = np.mean(letters == 1)
    sigma = math.sqrt(0.25 / 10 ** 6)
    assert abs(freq - 0.5) <= 5 * sigma


def test_config_validation():
    law = GeometricLaw(0.5)
    with pytest.raises(ValueError):
        mc.SimulationConfig("knuth", 5, law, 0)
    with pytest.raises(ValueError):
        mc.SimulationConfig("knuth", 5, law, 10, workers=0)
    with pytest.raises(ValueError):
        mc.SimulationConfig("knuth", 5, GeometricLaw(0), 10)
    with pytest.raises(ValueError):
        mc.SimulationConfig("runs", 5, law, 10)


def test_trivial_length():
    rep = mc.estimate_moments(mc.SimulationConfig("inversions", 1, GeometricLaw(0.3), 1000, 1))
    assert rep == (0.0, 0.0, 0.0, 1000)


def test_streams_depend_on_seed_and_block():
    cfg = mc.SimulationConfig("knuth", 6, GeometricLaw(0.5), 3 * mc.BLOCK_SIZE, 9)
    b0, b1 = mc.sample_words(cfg, 0), mc.sample_words(cfg, 1)
    assert not np.array_equal(b0, b1)
    other = mc.SimulationConfig("knuth", 6, GeometricLaw(0.5), 3 * mc.BLOCK_SIZE, 10)
    assert not np.array_equal(b0, mc.sample_words(other, 0))
    # a block's letters do not depend on the total sample count
    shorter = mc.SimulationConfig("knuth", 6, GeometricLaw(0.5), mc.BLOCK_SIZE + 7, 9)
    assert np.array_equal(mc.sample_words(shorter, 1), b1[:7])


@pytest.mark.parametrize("workers", [1, 2, 3])
def test_determinism_across_workers(workers):
    base = mc.SimulationConfig("inversions", 12, GeometricLaw(0.6), 200_000, 42)
    ref = mc.estimate_moments(base)
    other = mc.SimulationConfig("inversions", 12, GeometricLaw(0.6), 200_000, 42, workers)
    assert mc.estimate_moments(other) == ref
    assert mc.estimate_moments(base) == ref


def test_standard_error_definition():
    rep = mc.estimate_moments(mc.SimulationConfig("knuth", 8, GeometricLaw(0.4), 5000, 3))
    assert rep.standard_error == math.sqrt(rep.variance / rep.samples)
    assert rep.variance >= 0


def test_merge_matches_two_pass():
    gen = np.random.default_rng(1)
    values = gen.integers(0, 50, 10_000).astype(float)
    parts = [values[:3000], values[3000:3001], values[3001:]]
    acc = None
    for chunk in parts:
        m = chunk.mean()
        part = mc._Partial(len(chunk), m, float(((chunk - m) ** 2).sum()))
        acc = part if acc is None else mc._merge(acc, part)
    assert acc.count == len(values)
    assert math.isclose(acc.mean, values.mean(), rel_tol=1e-12)
    assert math.isclose(acc.m2, ((values - values.mean()) ** 2).sum(), rel_tol=1e-10)


@pytest.mark.parametrize("statistic", ["inversions", "knuth"])
def test_agrees_with_closed_form(statistic):
    law = GeometricLaw(0.5)
    rep = mc.estimate_moments(mc.SimulationConfig(statistic, 20, law, 200_000, 7))
    ref = cf.closed_form_moments(statistic, 20, law)
    assert abs(rep.mean - ref.mean) <= 5 * rep.standard_error
    assert abs(rep.variance / ref.variance - 1) < 0.1


def test_inversions_n20_one_million():
    law = GeometricLaw(0.5)
    rep = mc.estimate_moments(mc.SimulationConfig("inversions", 20, law, 10 ** 6, 7))
    assert cf.mean_inversions(20, 0.5) == pytest.approx(190 / 3)
    assert abs(rep.mean - 190 / 3) <= 5 * rep.standard_error
