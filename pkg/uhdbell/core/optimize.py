"""
Multi-restart downhill-simplex maximization of the CH violation.

The simplex works on a ``ParamVector``: seven real coordinates fixing
the four displacements in the gauge ``Im a1 = 0``, plus ``|r|`` for
states with squeezing.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from logging import getLogger
import math
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .bell import CHResult, DisplacementSettings, SetupParams, \
    as_setup, as_state, ch_combination, ch_evaluator, ch_violation
from .states import R_MAX, State
from .validators import DomainError, check_number

logger = getLogger(__name__)

# Relative size of the probe step used to confirm a minimum.
MINIMUM_PROBE = 1e-3
MAX_SIMPLEX_RESTARTS = 5
R_START_RANGE = (0.0, 2.0)


@dataclass(frozen=True)
class SimplexConfig:
    """
    Nelder-Mead coefficients and the multi-restart policy.

    Attributes
    ----------
    reflection, expansion, contraction, shrink: float
        Simplex coefficients; reflection > 0, expansion > 1,
        0 < contraction < 1, 0 < shrink < 1.
    f_tol: float
        The simplex has converged when its function values span less
        than this.
    max_iters: int
        Iteration limit per simplex run.
    restarts: int
        Number of random starts in ``maximize_ch``.
    init_box: float
        Half-width of the box the random starting amplitudes are drawn
        from.
    max_amplitude: float
        Displacements of larger modulus are outside the search region.
        A run that ends within ``initial_step`` of this bound has only
        approached the far-field limit and is not counted as converged.
    rng_seed: int
        Seed of the starting-point generator.
    initial_step: float
        Edge length of the initial simplex.
    """
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    f_tol: float = 1e-10
    max_iters: int = 5000
    restarts: int = 32
    init_box: float = 1.0
    max_amplitude: float = 4.0
    rng_seed: int = 0
    initial_step: float = 0.5

    def __post_init__(self):
        check_number("reflection", self.reflection,
                     min=0.0, min_inclusive=False)
        check_number("expansion", self.expansion,
                     min=1.0, min_inclusive=False)
        check_number("contraction", self.contraction, min=0.0, max=1.0,
                     min_inclusive=False, max_inclusive=False)
        check_number("shrink", self.shrink, min=0.0, max=1.0,
                     min_inclusive=False, max_inclusive=False)
        check_number("f_tol", self.f_tol, min=0.0, min_inclusive=False)
        check_number("init_box", self.init_box, min=0.0, min_inclusive=False)
        check_number("max_amplitude", self.max_amplitude,
                     min=self.init_box, min_inclusive=False)
        check_number("initial_step", self.initial_step,
                     min=0.0, min_inclusive=False)
        for name in ("max_iters", "restarts"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise DomainError(
                    "'{}' must be a nonnegative integer.".format(name))
            object.__setattr__(self, name, int(value))
        if int(self.rng_seed) != self.rng_seed or self.rng_seed < 0:
            raise DomainError("'rng_seed' must be a nonnegative integer.")
        object.__setattr__(self, "rng_seed", int(self.rng_seed))

    def replace(self, **kwargs) -> "SimplexConfig":
        return replace(self, **kwargs)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "SimplexConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise ValueError("Unknown simplex settings: {}".format(
                ", ".join(sorted(unknown))))
        return cls(**values)


class ParamVector(object):
    """
    Real coordinates of the simplex search.

    ``(Re a1, Re a2, Im a2, Re b1, Im b1, Re b2, Im b2[, r])``; the
    squeezing enters through its absolute value.

    Examples
    --------
    >>> v = ParamVector([-1.0, 0, 0, -1.0, 0, 0.5, 0])
    >>> v.to_settings().a1
    (1+0j)
    """

    def __init__(self, coords):
        coords = np.array(coords, dtype=float).ravel()
        if coords.size not in (7, 8):
            raise DomainError(
                "A parameter vector has 7 or 8 coordinates, not {}.".format(
                    coords.size))
        self.coords = coords

    def __len__(self):
        return self.coords.size

    def __repr__(self):
        return "ParamVector({})".format(list(self.coords))

    @property
    def has_r(self) -> bool:
        return self.coords.size == 8

    @property
    def r(self) -> Optional[float]:
        return abs(float(self.coords[7])) if self.has_r else None

    def amplitudes(self) -> Tuple[complex, complex, complex, complex]:
        c = self.coords
        return (complex(c[0], 0.0), complex(c[1], c[2]),
                complex(c[3], c[4]), complex(c[5], c[6]))

    def to_settings(
            self, r: Optional[float] = None,
            canonical: bool = True) -> DisplacementSettings:
        """
        The displacements, with ``Re a1 >= 0`` when ``canonical`` (both
        gauge symmetries contain the overall sign flip).
        """
        c = self.coords[:7]
        if canonical and c[0] < 0:
            c = -c
        a1, a2, b1, b2 = ParamVector(c).amplitudes()
        return DisplacementSettings(
            a1, a2, b1, b2, r=self.r if self.has_r else r)

    @classmethod
    def from_settings(
            cls, d: DisplacementSettings, with_r: bool = False,
            opposite: bool = False,
            default_r: float = 0.5) -> "ParamVector":
        d = d.canonical(opposite=opposite)
        coords = [d.a1.real, d.a2.real, d.a2.imag,
                  d.b1.real, d.b1.imag, d.b2.real, d.b2.imag]
        if with_r:
            coords.append(d.r if d.r is not None else default_r)
        return cls(coords)


class NMSimplex(object):
    """
    The N + 1 vertices of a simplex and their function values.
    """

    def __init__(self, f: Callable, x, step: float):
        self.f = f
        self.n = len(x)
        self.nfe = 0
        self.nrestarts = 0
        self.step = step
        self.build(np.asarray(x, dtype=float))

    def evaluate(self, x) -> float:
        self.nfe += 1
        value = self.f(x)
        return value if math.isfinite(value) else math.inf

    def build(self, x):
        self.vertices = np.tile(x, (self.n + 1, 1))
        for i in range(self.n):
            self.vertices[i + 1, i] += self.step
        self.values = np.array([self.evaluate(v) for v in self.vertices])

    def order(self):
        idx = np.argsort(self.values, kind="stable")
        self.vertices = self.vertices[idx]
        self.values = self.values[idx]

    def spread(self) -> float:
        return float(self.values[-1] - self.values[0])

    def shrink(self, sigma: float):
        best = self.vertices[0]
        for i in range(1, self.n + 1):
            self.vertices[i] = best + sigma * (self.vertices[i] - best)
            self.values[i] = self.evaluate(self.vertices[i])

    def test_for_minimum(self, delta: float, tol: float) -> bool:
        """
        Perturbs the best vertex along every coordinate and checks that
        none of the neighbours is lower by more than ``tol``.
        """
        x0 = self.vertices[0]
        f0 = self.values[0]
        for j in range(self.n):
            for sign in (1.0, -1.0):
                p = x0.copy()
                p[j] += sign * self.step * delta
                if self.evaluate(p) < f0 - tol:
                    return False
        return True

    def rebuild(self):
        """
        Restarts from a fresh simplex about the best vertex.
        """
        self.build(self.vertices[0].copy())
        self.nrestarts += 1


def take_a_step(smplx: NMSimplex, cfg: SimplexConfig):
    """
    Replaces the worst vertex by a reflected, expanded or contracted
    point, or shrinks the simplex towards the best vertex.
    """
    smplx.order()
    n = smplx.n
    worst = smplx.vertices[n]
    f_worst = smplx.values[n]
    centroid = smplx.vertices[:n].mean(axis=0)

    x_refl = centroid + cfg.reflection * (centroid - worst)
    f_refl = smplx.evaluate(x_refl)

    if f_refl < smplx.values[0]:
        x_ext = centroid + cfg.expansion * (x_refl - centroid)
        f_ext = smplx.evaluate(x_ext)
        if f_ext < f_refl:
            smplx.vertices[n], smplx.values[n] = x_ext, f_ext
        else:
            smplx.vertices[n], smplx.values[n] = x_refl, f_refl
        return

    if f_refl < smplx.values[n - 1]:
        smplx.vertices[n], smplx.values[n] = x_refl, f_refl
        return

    if f_refl < f_worst:
        x_con = centroid + cfg.contraction * (x_refl - centroid)
        f_con = smplx.evaluate(x_con)
        if f_con <= f_refl:
            smplx.vertices[n], smplx.values[n] = x_con, f_con
            return
    else:
        x_con = centroid + cfg.contraction * (worst - centroid)
        f_con = smplx.evaluate(x_con)
        if f_con < f_worst:
            smplx.vertices[n], smplx.values[n] = x_con, f_con
            return

    smplx.shrink(cfg.shrink)


def minimize(
        f: Callable, x, cfg: SimplexConfig) -> Tuple[
            np.ndarray, float, bool, int]:
    """
    Locates a minimum of ``f`` starting from ``x``.

    Returns
    -------
    (x_best, f_best, converged, n_evaluations)
    """
    x = np.asarray(x, dtype=float)
    smplx = NMSimplex(f, x, cfg.initial_step)
    converged = False
    iters = 0
    while iters < cfg.max_iters:
        smplx.order()
        if smplx.spread() < cfg.f_tol:
            if smplx.nrestarts >= MAX_SIMPLEX_RESTARTS or \
                    smplx.test_for_minimum(MINIMUM_PROBE, cfg.f_tol):
                converged = True
                break
            smplx.rebuild()
            continue

        take_a_step(smplx, cfg)
        iters += 1

    smplx.order()
    return smplx.vertices[0].copy(), float(smplx.values[0]), converged, \
        smplx.nfe


def nelder_mead(
        objective: Callable, start, cfg: Optional[SimplexConfig] = None):
    """
    Maximizes ``objective`` by running the simplex on its negation.

    Parameters
    ----------
    objective: callable
        ``objective(x) -> float`` for a 1-D numpy array ``x``.
        Non-finite values count as minus infinity.
    start: array-like or ParamVector
        Starting point.
    cfg: SimplexConfig
        Coefficients, tolerance and iteration limit.

    Returns
    -------
    (best, value, converged): (numpy.ndarray, float, bool)

    Examples
    --------
    >>> best, value, converged = nelder_mead(
    ...     lambda x: -((x[0] - 1) ** 2 + (x[1] + 2) ** 2), [0.0, 0.0])
    >>> converged, bool(abs(best[0] - 1) < 1e-3), bool(value > -1e-6)
    (True, True, True)
    """
    best, value, converged, _ = _maximize(objective, start, cfg)
    return best, value, converged


def _maximize(objective, start, cfg):
    cfg = cfg or SimplexConfig()
    if isinstance(start, ParamVector):
        start = start.coords

    def negated(x):
        value = objective(x)
        return -value if math.isfinite(value) else math.inf

    x, f, converged, nfe = minimize(negated, start, cfg)
    return x, -f, converged, nfe


def ch_objective(
        state: State, p: SetupParams, optimize_r: bool,
        max_amplitude: float = math.inf):
    """
    ``ch_violation`` of the CH combination as a function of the simplex
    coordinates; minus infinity outside the search region.
    """
    bound = max_amplitude ** 2
    fixed = None if optimize_r else ch_evaluator(state, p)

    def objective(x):
        a1, a2, b1, b2 = (complex(x[0], 0.0), complex(x[1], x[2]),
                          complex(x[3], x[4]), complex(x[5], x[6]))
        if max(abs(a) ** 2 for a in (a1, a2, b1, b2)) > bound:
            return -math.inf
        evaluate = fixed
        if evaluate is None:
            r = abs(x[7])
            if r > R_MAX:
                return -math.inf
            evaluate = ch_evaluator(state.with_params(r=r), p)
        return ch_violation(evaluate(a1, a2, b1, b2))

    return objective


def at_amplitude_bound(x, cfg: SimplexConfig) -> bool:
    """
    True when a point lies within one initial step of the amplitude
    bound, where the CH combination is flat at its far-field limit.
    """
    amps = ParamVector(x).amplitudes()
    return max(abs(a) for a in amps) > cfg.max_amplitude - cfg.initial_step


def _run_restart(args):
    state, p, cfg, start, optimize_r = args
    objective = ch_objective(state, p, optimize_r, cfg.max_amplitude)
    x, value, converged, nfe = _maximize(objective, start, cfg)
    stalled = at_amplitude_bound(x, cfg)
    return x, value, converged and not stalled, nfe, stalled


def random_starts(
        cfg: SimplexConfig, optimize_r: bool) -> List[np.ndarray]:
    """
    Starting points drawn uniformly from ``[-init_box, init_box]`` per
    amplitude coordinate (and ``r`` from [0, 2]); all draws happen up
    front so the result does not depend on execution order.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    amps = rng.uniform(-cfg.init_box, cfg.init_box, size=(cfg.restarts, 7))
    if not optimize_r:
        return [row for row in amps]

    rs = rng.uniform(*R_START_RANGE, size=cfg.restarts)
    return [np.append(row, r) for row, r in zip(amps, rs)]


def maximize_ch(
        state, p, cfg: Optional[SimplexConfig] = None,
        optimize_r: Optional[bool] = None,
        extra_starts: Iterable = (),
        workers: int = 1) -> CHResult:
    """
    Maximizes the violation of the CH inequality, ``ch_violation`` of
    the CH combination, over the displacement settings (and the
    squeezing when ``optimize_r``) from several starting points and
    returns the best run.

    Parameters
    ----------
    state: State or str
        The state, or its registered key.
    p: SetupParams
        Imperfections.
    cfg: SimplexConfig
        Simplex settings; ``cfg.restarts`` random starts are made.
    optimize_r: bool, optional
        Whether to optimize the squeezing. Defaults to True for states
        with squeezing.
    extra_starts: list of ParamVector, DisplacementSettings or arrays
        Starts that run before the random ones (warm starts).
    workers: int
        Number of worker processes. The result does not depend on it.

    Returns
    -------
    CHResult
        Best value over all runs; ties go to the lower run index.
    """
    state = as_state(state)
    p = as_setup(p)
    cfg = cfg or SimplexConfig()
    if optimize_r is None:
        optimize_r = state.has_squeezing
    if optimize_r and not state.has_squeezing:
        raise DomainError(
            "State '{}' has no squeezing to optimize.".format(state.key()))

    starts = [_start_coords(s, state, optimize_r) for s in extra_starts]
    starts += random_starts(cfg, optimize_r)
    if len(starts) == 0:
        raise DomainError("At least one start is required.")

    jobs = [(state, p, cfg, start, optimize_r) for start in starts]
    if workers is not None and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_run_restart, jobs))
    else:
        results = [_run_restart(job) for job in jobs]

    best_index = 0
    for i, (_, value, converged, _, stalled) in enumerate(results):
        logger.debug("restart {}: violation={!r} converged={}{}".format(
            i, value, converged, " (amplitude bound)" if stalled else ""))
        if value > results[best_index][1]:
            best_index = i

    x, value, converged, _, stalled = results[best_index]
    n_evaluations = sum(r[3] for r in results)
    if stalled:
        logger.debug(
            "Best run ended at the amplitude bound {}: the maximum is the "
            "far-field limit.".format(cfg.max_amplitude))
    elif not converged:
        logger.warning(
            "Best simplex run did not converge within {} iterations."
            .format(cfg.max_iters))

    vector = ParamVector(x)
    settings = vector.to_settings(r=state.r if state.has_squeezing else None)
    if optimize_r:
        state = state.with_params(r=settings.r)
    return CHResult(
        value=value,
        settings=settings,
        converged=converged,
        restarts_used=len(results),
        n_evaluations=n_evaluations,
        state=state.to_dict(),
        setup=p,
        ch=ch_combination(state, settings, p),
    )


def _start_coords(start, state: State, optimize_r: bool) -> np.ndarray:
    if isinstance(start, DisplacementSettings):
        return ParamVector.from_settings(
            start, with_r=optimize_r, opposite=state.opposite_phase,
            default_r=state.r).coords

    coords = ParamVector(
        start.coords if isinstance(start, ParamVector) else start).coords
    if optimize_r and coords.size == 7:
        return np.append(coords, state.r)
    if not optimize_r and coords.size == 8:
        return coords[:7]
    return coords
