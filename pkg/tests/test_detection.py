from pathlib import Path

import numpy as np
import pytest

from uhdbell.core.detection import (
    CountDistribution,
    ModeMatch,
    convolve_dark,
    interference_extrema,
    mismatch_envelope,
    pi_s,
    poisson_counts,
    visibility_to_xi,
    xi_to_visibility,
)
from uhdbell.core.validators import DomainError

sample_dir = Path(__file__).parent.parent / "sample/datafiles"


def random_distribution(rng, max_len=15):
    return CountDistribution(rng.dirichlet(np.ones(rng.integers(1, max_len))))


def test_count_distribution():
    dist = CountDistribution([0.25, 0.5, 0.25])
    assert len(dist) == 3
    assert dist.p0 == 0.25
    assert dist.mean == 1.0
    assert dist.tail_mass == 0.0
    with pytest.raises(ValueError):
        dist.probs[0] = 1.0


def test_count_distribution_errors():
    with pytest.raises(DomainError):
        CountDistribution([])

    with pytest.raises(DomainError):
        CountDistribution([0.5, 0.6])

    with pytest.raises(DomainError):
        CountDistribution([1.2, -0.2])

    with pytest.raises(DomainError):
        CountDistribution([np.nan, 1.0])

    # the tail completes the distribution
    assert CountDistribution([0.5, 0.4], tail_mass=0.1).tail_mass == 0.1


def test_count_distribution_csv(tmp_path):
    dist = CountDistribution.from_csv(sample_dir / "counts.csv")
    assert len(dist) == 4
    assert dist.p0 == 0.45

    path = tmp_path / "counts.csv"
    dist.to_csv(path)
    assert CountDistribution.from_csv(path) == dist

    text = CountDistribution([0.5, 0.5]).to_csv()
    assert text.splitlines() == ["n,p", "0,0.5", "1,0.5"]


def test_count_distribution_csv_sparse(tmp_path):
    # missing count indices are zero
    path = tmp_path / "sparse.csv"
    path.write_text("n,p\n0,0.5\n3,0.5\n")
    dist = CountDistribution.from_csv(path)
    assert list(dist.probs) == [0.5, 0.0, 0.0, 0.5]


def test_count_distribution_csv_exact(tmp_path):
    # 17 significant digits written, the same doubles read back
    probs = np.random.default_rng(11).dirichlet(np.ones(40))
    path = tmp_path / "exact.csv"
    CountDistribution(probs).to_csv(path)
    assert np.array_equal(CountDistribution.from_csv(path).probs, probs)

    path.write_text("n,p\n0,0.45\n1,0.35\n2,0.15\n3,0.05\n")
    assert list(CountDistribution.from_csv(path).probs) == \
        [0.45, 0.35, 0.15, 0.05]


def test_pi_s():
    dist = CountDistribution.from_csv(sample_dir / "counts.csv")
    assert pi_s(dist, -1.0) == 0.45
    assert pi_s(dist, 0.0) == pytest.approx(0.2)
    assert pi_s([1.0], -0.3) == 1.0

    with pytest.raises(DomainError):
        pi_s(dist, 0.5)


def test_pi_s_contraction():
    rng = np.random.default_rng(3)
    for _ in range(200):
        dist = random_distribution(rng)
        for s in (-5.0, -1.0, -0.4, 0.0):
            assert abs(pi_s(dist, s)) <= 1.0 + 1e-15


@pytest.mark.parametrize("s", [-1.0, -0.5, -1e-9])
def test_dark_count_factorization(s):
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        field_counts = random_distribution(rng)
        dark = random_distribution(rng)
        combined = convolve_dark(field_counts, dark)
        worst = max(worst, abs(
            pi_s(combined, s) - pi_s(field_counts, s) * pi_s(dark, s)))
    assert worst < 1e-12


def test_convolve_dark():
    combined = convolve_dark(
        CountDistribution([0.5, 0.5]), CountDistribution([0.9, 0.1]))
    np.testing.assert_allclose(combined.probs, [0.45, 0.5, 0.05])
    assert combined.tail_mass == 0.0

    dark = poisson_counts(0.1, 2)
    combined = convolve_dark(CountDistribution([1.0]), dark)
    assert combined.tail_mass > 0.0
    assert combined.p0 == pytest.approx(np.exp(-0.1))


def test_poisson_counts():
    dist = poisson_counts(0.5, 30)
    assert dist.p0 == pytest.approx(np.exp(-0.5))
    assert dist.mean == pytest.approx(0.5)
    assert dist.probs.sum() + dist.tail_mass == pytest.approx(1.0)

    assert poisson_counts(0.0, 2).probs.tolist() == [1.0, 0.0, 0.0]

    with pytest.raises(DomainError):
        poisson_counts(-0.1, 2)


def test_mismatch_envelope():
    assert float(mismatch_envelope(1.5, 0.8, 1.0, -1.0)) == 1.0
    assert float(mismatch_envelope(1.0, 1.0, 0.5, -1.0)) == \
        pytest.approx(np.exp(-1.0))


@pytest.mark.parametrize("eta,xi,s", [
    (1.0, 0.5, -1.0), (0.7, 0.9, -0.5), (0.3, 0.2, -2.0)])
def test_mismatch_envelope_curvature(eta, xi, s):
    # log-quadratic in |alpha| with curvature -2 eta (1 - xi) / ((1 - s) xi)
    h = 1e-3
    x = 0.8
    f = [float(np.log(mismatch_envelope(v, eta, xi, s)))
         for v in (x - h, x, x + h)]
    second = (f[0] - 2.0 * f[1] + f[2]) / h ** 2
    expected = -2.0 * (2.0 * eta * (1.0 - xi) / ((1.0 - s) * xi))
    assert second == pytest.approx(expected, rel=1e-6)


def test_visibility():
    assert xi_to_visibility(1.0) == 1.0
    assert xi_to_visibility(0.5) == pytest.approx(2.0 / 3.0)
    assert visibility_to_xi(2.0 / 3.0) == pytest.approx(0.5)

    xis = np.linspace(0.01, 1.0, 100)
    visibilities = [xi_to_visibility(x) for x in xis]
    assert np.all(np.diff(visibilities) > 0)
    for xi, v in zip(xis, visibilities):
        assert visibility_to_xi(v) == pytest.approx(xi, abs=1e-12)

    with pytest.raises(DomainError):
        xi_to_visibility(0.0)

    with pytest.raises(DomainError):
        visibility_to_xi(1.5)


def test_mode_match():
    assert ModeMatch.from_fields(1.0, 2.0).xi == 0.5
    assert ModeMatch.from_fields(1j, 1.0).xi == 1.0
    assert ModeMatch.from_visibility(1.0).xi == 1.0
    assert ModeMatch(0.5).visibility == pytest.approx(2.0 / 3.0)

    with pytest.raises(DomainError):
        ModeMatch.from_fields(2.0, 1.0)

    with pytest.raises(DomainError):
        ModeMatch(0.0)


def test_interference_extrema():
    assert interference_extrema(1.0, 0.9, 1.0) == (0.0, 3.6)
    j_min, j_max = interference_extrema(2.0, 0.5, 0.8)
    assert j_min == pytest.approx(0.4)
    assert j_max == pytest.approx(6.8)

    with pytest.raises(DomainError):
        interference_extrema(1.0, 1.0, 0.5)
