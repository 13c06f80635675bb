import math

import numpy as np
import pytest

from ascltlab.empirical import (
    EmpiricalMeasure,
    chi2_2_cdf,
    exponential_cdf,
    ks_to,
    normal_cdf,
)
from ascltlab.sources import SourceSpec, sample_prefix
from ascltlab.spectra import (
    circulant_eigen_dft,
    periodogram,
    periodogram_all,
    periodogram_ecdf_distance,
    reverse_circulant_spectrum,
    symmetric_circulant_first_row,
    symmetric_circulant_spectrum,
)
from ascltlab.transform import partial_sums_fast

from .oracles import (
    char_poly_roots,
    circulant_dense,
    jacobi_eigenvalues,
    match_complex_multisets,
)


def test_circulant_scalar_identity():
    row = np.array([3.5, 0.0, 0.0, 0.0, 0.0])
    eig = circulant_eigen_dft(row)
    assert np.allclose(eig, 3.5)


def test_circulant_known_row():
    eig = circulant_eigen_dft(np.array([1.0, 2.0, 3.0, 2.0]))
    assert sorted(np.round(eig.real, 9).tolist()) == [-2.0, -2.0, 0.0, 8.0]
    assert np.max(np.abs(eig.imag)) < 1e-12


def test_circulant_trace_identity():
    rng = np.random.default_rng(5)
    for _ in range(10):
        row = rng.standard_normal(7)
        eig = circulant_eigen_dft(row)
        assert np.sum(eig).real == pytest.approx(7.0 * row[0], rel=1e-9, abs=1e-9)


def test_circulant_matches_char_poly_oracle():
    # 50 random rows for each n <= 8, matched as complex multisets
    rng = np.random.default_rng(77)
    for n in range(1, 9):
        for _ in range(50):
            row = rng.standard_normal(n)
            dft = circulant_eigen_dft(row)
            dense = char_poly_roots(circulant_dense(row))
            assert match_complex_multisets(dft, dense) < 1e-9 * max(1.0, np.max(np.abs(dft)))


def test_symmetric_first_row_mirrors():
    c = symmetric_circulant_first_row(np.array([1.0, 2.0, 3.0]), 5)
    assert np.array_equal(c, [1.0, 2.0, 3.0, 3.0, 2.0])


def test_symmetric_degenerate_zero_input():
    eig = circulant_eigen_dft(symmetric_circulant_first_row(np.zeros(3), 5))
    assert np.allclose(eig, 0.0)


def test_symmetric_matches_jacobi_oracle():
    spec = SourceSpec(family="normal", master_seed=13)
    sp = symmetric_circulant_spectrum(5, spec)
    c = symmetric_circulant_first_row(sample_prefix(spec, 3), 5)
    dense = jacobi_eigenvalues(circulant_dense(c) / math.sqrt(5.0))
    assert np.max(np.abs(sp.eigenvalues - dense)) < 1e-9


def test_symmetric_eigenvalue_pairing_vs_transform():
    # all but <= 2 eigenvalues come in pairs equal to the trig-weight sums
    n = 4097
    spec = SourceSpec(family="rademacher", master_seed=3)
    sp = symmetric_circulant_spectrum(n, spec)
    c = symmetric_circulant_first_row(sample_prefix(spec, (n + 1) // 2), n)
    r = (n - 1) // 2
    ps = partial_sums_fast(n, r, np.roll(c, -1))
    paired = np.sort(ps.s / math.sqrt(2.0))
    lam0 = float(np.sum(c)) / math.sqrt(n)
    expect = np.sort(np.concatenate([paired, paired, [lam0]]))
    assert np.max(np.abs(sp.eigenvalues - expect)) < 1e-9


def test_symmetric_esd_limit():
    spec = SourceSpec(family="rademacher", master_seed=3)
    sp = symmetric_circulant_spectrum(4097, spec)
    assert ks_to(sp.esd(), normal_cdf) <= 0.03


def test_esd_insensitive_to_centering():
    # adding a constant to the first row shifts only the zero-frequency
    # eigenvalue, so the two ESDs differ by at most one atom
    rng = np.random.default_rng(8)
    n = 101
    row = symmetric_circulant_first_row(rng.standard_normal((n + 1) // 2), n)
    a = np.sort(circulant_eigen_dft(row).real)
    b = np.sort(circulant_eigen_dft(row + 0.7).real)
    worst = 0.0
    for x in np.concatenate([a, b]) + 1e-8:  # offset past roundoff-split ties
        fa = np.searchsorted(a, x, side="right") / n
        fb = np.searchsorted(b, x, side="right") / n
        worst = max(worst, abs(fa - fb))
    assert worst <= 2.0 / n


def test_reverse_circulant_degenerate_zero_input():
    mags = periodogram_all(np.zeros(9))
    assert np.allclose(mags, 0.0)


def test_reverse_circulant_symmetry_and_exceptional():
    spec = SourceSpec(family="rademacher", master_seed=3)
    sp = reverse_circulant_spectrum(4096, spec)
    assert len(sp.exceptional) == 2  # even n: frequencies 0 and n/2
    assert np.array_equal(np.sort(-sp.eigenvalues), sp.eigenvalues)
    x = sample_prefix(spec, 4096)
    assert sp.exceptional[0] == pytest.approx(math.sqrt(2.0 / 4096) * np.sum(x))


def test_reverse_circulant_pairs_match_transform():
    n = 4097
    spec = SourceSpec(family="rademacher", master_seed=3)
    sp = reverse_circulant_spectrum(n, spec)
    ps = partial_sums_fast(n, (n - 1) // 2, sample_prefix(spec, n))
    mags = np.sqrt(ps.s**2 + ps.t**2)
    assert np.max(np.abs(np.sort(sp.eigenvalues[sp.eigenvalues >= 0]) - np.sort(mags))) < 1e-9


def test_reverse_circulant_squared_magnitudes_chi2():
    n = 4097
    spec = SourceSpec(family="rademacher", master_seed=3)
    sp = reverse_circulant_spectrum(n, spec)
    sq = np.sort(sp.eigenvalues[sp.eigenvalues >= 0] ** 2)
    assert ks_to(EmpiricalMeasure(sq), chi2_2_cdf) <= 0.03


def test_periodogram_examples():
    n = 64
    assert periodogram(np.ones(n), 5) == pytest.approx(0.0, abs=1e-12)
    k0 = 7
    j = np.arange(1, n + 1)
    x = np.cos(2.0 * np.pi * j * k0 / n)
    assert periodogram(x, k0) == pytest.approx(n / 4.0, rel=1e-9)


def test_periodogram_consistency_with_transform():
    rng = np.random.default_rng(21)
    x = rng.standard_normal(129)
    ps = partial_sums_fast(129, 64, x)
    for k in [1, 17, 64]:
        expect = (ps.s[k - 1] ** 2 + ps.t[k - 1] ** 2) / 2.0
        assert periodogram(x, k) == pytest.approx(expect, rel=1e-9, abs=1e-12)


def test_periodogram_nonnegative_and_range_checked():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(33)
    assert np.all(periodogram_all(x) >= 0.0)
    with pytest.raises(ValueError):
        periodogram(x, 0)
    with pytest.raises(ValueError):
        periodogram(x, 17)


def test_periodogram_ecdf_distance_families():
    for family in ["normal", "rademacher"]:
        spec = SourceSpec(family=family, master_seed=2)
        assert periodogram_ecdf_distance(2**14, spec) <= 0.03


def test_periodogram_degenerate_zero_distance_one():
    mu = EmpiricalMeasure.from_samples(periodogram_all(np.zeros(9)))
    assert ks_to(mu, exponential_cdf) == 1.0


def test_spectrum_summary_and_csv(tmp_path):
    spec = SourceSpec(family="normal", master_seed=1)
    sp = symmetric_circulant_spectrum(17, spec)
    summary = sp.summary(limit_cdf=normal_cdf)
    assert summary["count"] == 17
    assert 0.0 <= summary["ks_to_limit"] <= 1.0
    path = tmp_path / "spec.csv"
    sp.to_csv(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 1], sp.eigenvalues)
