import numpy as np
import numpy.testing as npt
import pytest

from conceptid.datagen import (
    CENTERS_4D,
    RECTANGLES_2D,
    GeneratorSpec,
    gen_2d,
    gen_4d,
    gen_energy_surrogate,
    generate,
    region_2d_mask,
)
from conceptid.errors import ConfigError


def test_gen_2d_all_samples_inside_region():
    ds = gen_2d(34000, seed=0)
    assert ds.n_samples == 34000
    assert ds.column_names == ("f1", "f2")
    assert region_2d_mask(ds.values).all()


def test_gen_2d_rectangle_counts_multinomial():
    ds = gen_2d(34000, seed=1)
    f1, f2 = ds.values[:, 0], ds.values[:, 1]
    counts = []
    for lo1, hi1, lo2, hi2 in RECTANGLES_2D:
        counts.append(np.count_nonzero((f1 >= lo1) & (f1 < hi1) & (f2 >= lo2) & (f2 < hi2)))
    assert sum(counts) == 34000
    total_area = 68.0
    for count, area in zip(counts, (16.0, 36.0, 16.0)):
        p = area / total_area
        sigma = np.sqrt(34000 * p * (1 - p))
        assert abs(count - 34000 * p) < 3 * sigma


def test_gen_2d_deterministic():
    npt.assert_array_equal(gen_2d(500, seed=9).values, gen_2d(500, seed=9).values)
    assert not np.array_equal(gen_2d(500, seed=9).values, gen_2d(500, seed=10).values)


def test_gen_4d_counts_and_center_means():
    n = 30000
    ds = gen_4d(n, seed=2, sigma=1.0)
    assert ds.n_samples == n and ds.n_features == 4
    # recover per-center membership by nearest center (clouds are 10 sigma apart)
    d = np.linalg.norm(ds.values[:, None, :] - CENTERS_4D[None], axis=2)
    which = d.argmin(axis=1)
    counts = np.bincount(which, minlength=3)
    npt.assert_array_equal(counts, [10000, 10000, 10000])
    for c in range(3):
        mean = ds.values[which == c].mean(axis=0)
        bound = 4 * 1.0 / np.sqrt(counts[c])
        assert np.all(np.abs(mean - CENTERS_4D[c]) < bound)


def test_gen_4d_per_center_covariance_isotropic():
    ds = gen_4d(30000, seed=3, sigma=1.0)
    d = np.linalg.norm(ds.values[:, None, :] - CENTERS_4D[None], axis=2)
    which = d.argmin(axis=1)
    for c in range(3):
        cov = np.cov(ds.values[which == c], rowvar=False)
        npt.assert_allclose(cov, np.eye(4), atol=0.1)


def test_gen_4d_remainder_round_robin():
    ds = gen_4d(31, seed=4, sigma=0.001)
    d = np.linalg.norm(ds.values[:, None, :] - CENTERS_4D[None], axis=2)
    counts = np.bincount(d.argmin(axis=1), minlength=3)
    npt.assert_array_equal(sorted(counts, reverse=True), [11, 10, 10])


def test_gen_4d_sigma_zero_limit():
    ds = gen_4d(9, seed=5, sigma=1e-12)
    d = np.linalg.norm(ds.values[:, None, :] - CENTERS_4D[None], axis=2)
    assert d.min(axis=1).max() < 1e-9
    with pytest.raises(ConfigError):
        gen_4d(10, seed=0, sigma=0.0)


def test_energy_surrogate_structure():
    ds = gen_energy_surrogate(5000, seed=6)
    assert ds.column_names == ("investment", "yearly_costs", "resilience")
    investment, yearly, resilience = ds.values.T
    assert np.all(resilience <= 0.0)
    assert np.all((investment >= 0) & (investment < 1))
    # within an investment decile, cost noise and resilience move together
    decile = (investment >= 0.4) & (investment < 0.5)
    corr = np.corrcoef(yearly[decile], resilience[decile])[0, 1]
    assert corr > 0.2


def test_generator_spec_dispatch_and_validation():
    spec = GeneratorSpec("gaussian4d", 12, 7, sigma=2.0)
    ds = generate(spec)
    assert ds.n_samples == 12
    assert spec.to_json_dict()["sigma"] == 2.0
    assert "rng" in spec.to_json_dict()
    with pytest.raises(ConfigError):
        GeneratorSpec("nope", 10, 0)
    with pytest.raises(ConfigError):
        GeneratorSpec("uniform2d", 0, 0)
    with pytest.raises(ConfigError):
        GeneratorSpec("gaussian4d", 10, 0, sigma=-1.0)
