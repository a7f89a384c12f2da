"""
Photocount statistics: the ordering-weighted sum over count
probabilities, dark-count convolution, and the mode-mismatch and
visibility model of an unbalanced homodyne setup.
"""
from logging import getLogger
import os
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from .ordering import check_ordering, ordering_weight
from .validators import DomainError, check_amplitude, check_number, \
    unit_interval

logger = getLogger(__name__)

NORM_TOL = 1e-9


class CountDistribution(object):
    """
    Probabilities ``p_0 .. p_N`` of registering ``n`` counts.

    The vector is finite; the probability of more than ``N`` counts is
    kept in ``tail_mass`` (0 for an exact distribution).

    Parameters
    ----------
    probs: array-like
        The probabilities, each in [0, 1].
    tail_mass: float
        Probability not represented in ``probs``. ``sum(probs) +
        tail_mass`` must be 1 within 1e-9.

    Examples
    --------
    >>> dist = CountDistribution([0.5, 0.5])
    >>> dist.p0
    0.5
    >>> dist.mean
    0.5
    """

    def __init__(self, probs, tail_mass: float = 0.0):
        probs = np.array(probs, dtype=float).ravel()
        if probs.size == 0:
            raise DomainError("A count distribution needs at least p_0.")

        if not np.all(np.isfinite(probs)):
            raise DomainError("Count probabilities must be finite.")

        if np.any(probs < -NORM_TOL) or np.any(probs > 1.0 + NORM_TOL):
            raise DomainError("Count probabilities must lie in [0, 1].")

        tail_mass = check_number(
            "tail_mass", tail_mass, min=-NORM_TOL, max=1.0)
        total = float(np.sum(probs)) + tail_mass
        if abs(total - 1.0) > NORM_TOL:
            raise DomainError(
                "Count probabilities sum to {!r}, not 1.".format(total))

        probs = np.clip(probs, 0.0, 1.0)
        probs.setflags(write=False)
        self._probs = probs
        self._tail_mass = max(tail_mass, 0.0)

    def __len__(self):
        return self._probs.size

    def __repr__(self):
        return "CountDistribution({})".format(
            ", ".join(repr(float(p)) for p in self._probs))

    def __eq__(self, other):
        return isinstance(other, CountDistribution) and \
            np.array_equal(self._probs, other._probs) and \
            self._tail_mass == other._tail_mass

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def p0(self) -> float:
        return float(self._probs[0])

    @property
    def tail_mass(self) -> float:
        return self._tail_mass

    @property
    def mean(self) -> float:
        return float(np.dot(np.arange(self._probs.size), self._probs))

    @classmethod
    def from_csv(cls, path: Union[str, os.PathLike]) -> "CountDistribution":
        """
        Reads a distribution from CSV. A column named ``p`` (or the
        last column) holds the probabilities; an optional ``n`` column
        gives the count index, missing indices are zero.

        Examples
        --------
        >>> dist = CountDistribution.from_csv("counts.csv")
        >>> dist.p0, len(dist)
        (0.45, 4)
        """
        df = pd.read_csv(path, comment="#", float_precision="round_trip")
        column = "p" if "p" in df.columns else df.columns[-1]
        if "n" in df.columns and column != "n":
            n = df["n"].astype(int).to_numpy()
            if np.any(n < 0):
                raise DomainError("Count indices must be nonnegative.")
            probs = np.zeros(n.max() + 1)
            np.add.at(probs, n, df[column].astype(float).to_numpy())
        else:
            probs = df[column].astype(float).to_numpy()

        logger.debug("Read {} count probabilities from '{}'.".format(
            probs.size, path))
        return cls(probs)

    def to_csv(self, path: Optional[Union[str, os.PathLike]] = None):
        """
        Writes ``n,p`` rows. Returns the CSV text when ``path`` is None.
        """
        df = pd.DataFrame({
            "n": np.arange(self._probs.size),
            "p": self._probs,
        })
        return df.to_csv(path, index=False, float_format="%.17g")


class ModeMatch(object):
    """
    Overlap between the probe (local oscillator) field and the signal
    mode.

    Parameters
    ----------
    xi: float
        Mode matching, the fraction of probe photons in the signal
        mode, in (0, 1].
    alpha_projection: complex, optional
        Projection of the probe field onto the signal mode.
    probe_photons: float, optional
        Mean photon number of the probe in the detection window.
    """

    def __init__(
            self, xi: float,
            alpha_projection: Optional[complex] = None,
            probe_photons: Optional[float] = None):
        self.xi = unit_interval("xi", xi)
        self.alpha_projection = None if alpha_projection is None \
            else check_amplitude("alpha_projection", alpha_projection)
        self.probe_photons = None if probe_photons is None \
            else check_number("probe_photons", probe_photons, min=0.0)

    def __repr__(self):
        return "ModeMatch(xi={!r})".format(self.xi)

    @property
    def visibility(self) -> float:
        return xi_to_visibility(self.xi)

    @classmethod
    def from_fields(cls, alpha_projection, probe_photons) -> "ModeMatch":
        """
        ``xi = |alpha_projection|^2 / probe_photons``; by the Schwarz
        inequality the projection never carries more photons than the
        whole probe.

        Examples
        --------
        >>> ModeMatch.from_fields(1.0, 2.0).xi
        0.5
        """
        amp = check_amplitude("alpha_projection", alpha_projection)
        total = check_number(
            "probe_photons", probe_photons, min=0.0, min_inclusive=False)
        xi = abs(amp) ** 2 / total
        if xi > 1.0 + NORM_TOL:
            raise DomainError(
                "|alpha_projection|^2 = {!r} exceeds probe_photons = {!r}."
                .format(abs(amp) ** 2, total))

        return cls(min(xi, 1.0), alpha_projection=amp, probe_photons=total)

    @classmethod
    def from_visibility(cls, visibility) -> "ModeMatch":
        return cls(visibility_to_xi(visibility))


def pi_s(counts: CountDistribution, s: float) -> float:
    """
    ``sum_n ((s + 1) / (s - 1))^n p_n``, proportional to the
    s-ordered quasidistribution at the displaced point.

    Examples
    --------
    >>> pi_s(CountDistribution([0.25, 0.75]), -1.0)
    0.25
    >>> pi_s(CountDistribution([0.5, 0.5]), 0.0)
    0.0
    """
    s = check_ordering(s)
    if not isinstance(counts, CountDistribution):
        counts = CountDistribution(counts)

    weights = ordering_weight(s) ** np.arange(len(counts))
    return float(np.dot(weights, counts.probs))


def convolve_dark(
        field: CountDistribution,
        dark: CountDistribution) -> CountDistribution:
    """
    Count statistics of a detector whose dark counts are independent of
    the field counts.

    Examples
    --------
    >>> convolve_dark(CountDistribution([0.5, 0.5]),
    ...               CountDistribution([0.9, 0.1]))
    CountDistribution(0.45, 0.5, 0.05)
    """
    probs = np.convolve(field.probs, dark.probs)
    kept = float(np.sum(probs))
    # everything not in the product of the two kept parts
    tail = (1.0 - kept) if field.tail_mass or dark.tail_mass else 0.0
    return CountDistribution(probs, tail_mass=tail)


def poisson_counts(mean: float, n_max: int) -> CountDistribution:
    """
    Poissonian counts truncated at ``n_max``; used for dark counts, with
    ``p_0 = exp(-mean)``.

    Examples
    --------
    >>> dist = poisson_counts(0.0, 3)
    >>> dist.p0
    1.0
    """
    mean = check_number("mean", mean, min=0.0)
    if int(n_max) < 0:
        raise DomainError("'n_max' must be nonnegative.")

    n = np.arange(int(n_max) + 1)
    probs = stats.poisson.pmf(n, mean) if mean > 0 \
        else (n == 0).astype(float)
    tail = float(stats.poisson.sf(int(n_max), mean)) if mean > 0 else 0.0
    return CountDistribution(probs, tail_mass=tail)


def mismatch_envelope(alpha, eta_tilde: float, xi: float, s: float):
    """
    Gaussian factor by which an imperfectly matched probe multiplies the
    ordering-weighted count sum,
    ``exp(-(2 eta / (1 - s)) ((1 - xi) / xi) |alpha|^2)`` with rescaled
    amplitude ``alpha``.

    Examples
    --------
    >>> import numpy as np
    >>> bool(np.isclose(mismatch_envelope(1.0, 1.0, 0.5, -1.0), np.exp(-1)))
    True
    >>> float(mismatch_envelope(2.0, 0.7, 1.0, -0.5))
    1.0
    """
    eta_tilde = unit_interval("eta_tilde", eta_tilde)
    xi = unit_interval("xi", xi)
    s = check_ordering(s)
    alpha = np.asarray(alpha, dtype=complex)
    if not np.all(np.isfinite(alpha)):
        raise DomainError("'alpha' must have finite components.")

    return np.exp(
        -2.0 * eta_tilde / (1.0 - s) * (1.0 - xi) / xi * np.abs(alpha) ** 2)


def xi_to_visibility(xi: float) -> float:
    """
    Examples
    --------
    >>> xi_to_visibility(1.0)
    1.0
    """
    xi = unit_interval("xi", xi)
    return 2.0 * xi / (1.0 + xi)


def visibility_to_xi(visibility: float) -> float:
    """
    Examples
    --------
    >>> visibility_to_xi(1.0)
    1.0
    """
    visibility = unit_interval("visibility", visibility)
    return visibility / (2.0 - visibility)


def interference_extrema(
        alpha_s, T: float, xi: float) -> Tuple[float, float]:
    """
    Minimum and maximum output intensity (in photons) when the probe
    interferes with a coherent signal ``alpha_s`` on a beam splitter of
    transmission ``T``, with the probe amplitude tuned so that the
    projected part cancels the signal exactly.

    Returns
    -------
    (j_min, j_max): (float, float)
        ``(1 - xi) T |alpha_s|^2`` and ``(1 + 3 xi) T |alpha_s|^2``.

    Examples
    --------
    >>> interference_extrema(1.0, 0.9, 1.0)
    (0.0, 3.6)
    """
    amp = check_amplitude("alpha_s", alpha_s)
    T = check_number("T", T, min=0.0, max=1.0,
                     min_inclusive=False, max_inclusive=False)
    xi = unit_interval("xi", xi)
    intensity = T * abs(amp) ** 2
    return ((1.0 - xi) * intensity, (1.0 + 3.0 * xi) * intensity)
