"""
Maximal CH violations over the (efficiency, mode matching) plane, the
efficiency threshold at fixed mode matching, and plot-ready export.

Grids are indexed ``[i_xi][j_eta]``: each row holds a fixed mode
matching and runs over increasing efficiency.
The ``ch`` values are maxima of ``ch_violation``, positive exactly where
the CH inequality is violated.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import io
import json
from logging import getLogger
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import ndimage

from .bell import DisplacementSettings, SetupParams, as_state
from .optimize import SimplexConfig, maximize_ch
from .validators import DomainError, check_number, unit_interval

logger = getLogger(__name__)

DEFAULT_AXIS = (0.02, 1.0)
DEFAULT_RESOLUTION = 50
CONTOUR_OFFSET = 1e-3
THRESHOLD_LOWER_ETA = 0.05
MIN_TOL = 1e-5
# CH maxima at or below this count as "no violation" in the sign test.
VIOLATION_TOL = 1e-12
CSV_COLUMNS = ("eta", "xi", "ch", "re_a1", "re_a2", "im_a2",
               "re_b1", "im_b1", "re_b2", "im_b2")


class NoSignChangeError(RuntimeError):
    """
    The CH maximum does not change sign on the searched efficiency
    interval.
    """


@dataclass
class SweepGrid:
    """
    CH maxima on an ``(eta, xi)`` lattice.

    Attributes
    ----------
    eta_axis, xi_axis: numpy.ndarray
        Strictly increasing axes.
    ch_values: numpy.ndarray
        Maximal violation per cell, shape
        ``(len(xi_axis), len(eta_axis))``; NaN for failed cells.
    settings: list of list of DisplacementSettings
        Optimal settings per cell (None for failed cells).
    p_dark: float
        Zero-dark-count probability used for every cell.
    r_values: numpy.ndarray, optional
        Optimal squeezing per cell for states with squeezing.
    converged: numpy.ndarray
        Convergence flag of the best simplex run per cell.
    state: dict
        The state, as ``State.to_dict()``.
    config: dict
        Settings the grid was computed with, echoed into exports.
    """
    eta_axis: np.ndarray
    xi_axis: np.ndarray
    ch_values: np.ndarray
    settings: List[List[Optional[DisplacementSettings]]]
    p_dark: float
    r_values: Optional[np.ndarray] = None
    converged: Optional[np.ndarray] = None
    state: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.eta_axis = np.asarray(self.eta_axis, dtype=float)
        self.xi_axis = np.asarray(self.xi_axis, dtype=float)
        self.ch_values = np.asarray(self.ch_values, dtype=float)
        shape = (self.xi_axis.size, self.eta_axis.size)
        for name in ("eta_axis", "xi_axis"):
            axis = getattr(self, name)
            if axis.size > 1 and not np.all(np.diff(axis) > 0):
                raise DomainError(
                    "'{}' must be strictly increasing.".format(name))
        if self.ch_values.shape != shape:
            raise DomainError(
                "CH matrix shape {} does not match the axes {}.".format(
                    self.ch_values.shape, shape))
        if self.converged is None:
            self.converged = np.isfinite(self.ch_values)
        self.converged = np.asarray(self.converged, dtype=bool)
        if self.r_values is not None:
            self.r_values = np.asarray(self.r_values, dtype=float)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.ch_values.shape


@dataclass(frozen=True)
class ThresholdResult:
    """
    Smallest efficiency at which the CH maximum turns positive.

    ``ch_lo <= 0 < ch_hi`` holds for ``bracket = (lo, hi)``, whose width
    is at most ``tol``.
    """
    eta_threshold: float
    xi: float
    p_dark: float
    bracket: Tuple[float, float]
    tol: float
    ch_lo: float = float("nan")
    ch_hi: float = float("nan")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eta_threshold": self.eta_threshold,
            "xi": self.xi,
            "p_dark": self.p_dark,
            "bracket": list(self.bracket),
            "tol": self.tol,
            "ch_lo": self.ch_lo,
            "ch_hi": self.ch_hi,
        }


def cell_seed(base_seed: int, i: int, j: int) -> int:
    """
    Seed of cell ``(i, j)``, independent of the order cells are
    computed in.

    Examples
    --------
    >>> cell_seed(0, 1, 2) == cell_seed(0, 1, 2)
    True
    >>> cell_seed(0, 1, 2) == cell_seed(0, 2, 1)
    False
    """
    seq = np.random.SeedSequence([int(base_seed), int(i), int(j)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def make_axis(
        value_range: Sequence[float] = DEFAULT_AXIS,
        resolution: int = DEFAULT_RESOLUTION,
        name: str = "axis") -> np.ndarray:
    """
    ``resolution`` equally spaced points from ``lo`` to ``hi`` inside
    (0, 1].
    """
    lo, hi = value_range
    lo = unit_interval(name + " lower bound", lo)
    hi = unit_interval(name + " upper bound", hi)
    if int(resolution) != resolution or resolution < 2:
        raise DomainError(
            "'{}' resolution must be an integer >= 2.".format(name))
    if not lo < hi:
        raise DomainError("'{}' range must satisfy lo < hi.".format(name))
    return np.linspace(lo, hi, int(resolution))


def ch_max_at(
        state, eta: float, xi: float, p_dark: float = 1.0,
        cfg: Optional[SimplexConfig] = None, workers: int = 1,
        extra_starts=()):
    """
    ``maximize_ch`` at a single ``(eta, xi, p_dark)`` point.
    """
    return maximize_ch(
        state, SetupParams(eta, xi, p_dark), cfg,
        extra_starts=extra_starts, workers=workers)


def _sweep_cell(args):
    state, eta, xi, p_dark, cfg, extra_starts = args
    try:
        result = ch_max_at(state, eta, xi, p_dark, cfg,
                           extra_starts=extra_starts)
    except (DomainError, ArithmeticError, ValueError) as e:
        logger.warning("Cell eta={!r}, xi={!r} failed: {}".format(eta, xi, e))
        return float("nan"), None, False
    return result.value, result.settings, result.converged


def _sweep_row(args):
    state, i, etas, xi, p_dark, cfg = args
    row = []
    previous = None
    for j, eta in enumerate(etas):
        cell_cfg = cfg.replace(rng_seed=cell_seed(cfg.rng_seed, i, j))
        starts = () if previous is None else (previous,)
        value, settings, converged = _sweep_cell(
            (state, eta, xi, p_dark, cell_cfg, starts))
        row.append((value, settings, converged))
        if settings is not None:
            previous = settings
    return row


def sweep_ch(
        state,
        eta_range: Sequence[float] = DEFAULT_AXIS,
        xi_range: Sequence[float] = DEFAULT_AXIS,
        resolution: Union[int, Sequence[int]] = DEFAULT_RESOLUTION,
        p_dark: float = 1.0,
        cfg: Optional[SimplexConfig] = None,
        workers: int = 1,
        warm_start: bool = False,
        eta_axis: Optional[Sequence[float]] = None,
        xi_axis: Optional[Sequence[float]] = None) -> SweepGrid:
    """
    Maximizes the CH violation on every cell of an ``(eta, xi)`` grid.

    Parameters
    ----------
    state: State or str
        The state, or its registered key.
    eta_range, xi_range: (float, float)
        Axis ranges inside (0, 1].
    resolution: int or (int, int)
        Points per axis, ``(n_eta, n_xi)`` for a pair.
    p_dark: float
        Zero-dark-count probability.
    cfg: SimplexConfig
        Simplex settings; each cell uses the seed
        ``cell_seed(cfg.rng_seed, i_xi, j_eta)``.
    workers: int
        Worker processes; the grid does not depend on it.
    warm_start: bool
        Process each row by increasing efficiency and add the left
        neighbour's optimum to the starts of every cell.
    eta_axis, xi_axis: list of float, optional
        Explicit axes, overriding ranges and resolution.

    Returns
    -------
    SweepGrid
    """
    state = as_state(state)
    cfg = cfg or SimplexConfig()
    p_dark = unit_interval("p_dark", p_dark)
    if isinstance(resolution, (list, tuple)):
        n_eta, n_xi = resolution
    else:
        n_eta = n_xi = resolution

    etas = np.asarray(eta_axis, dtype=float) if eta_axis is not None \
        else make_axis(eta_range, n_eta, "eta")
    xis = np.asarray(xi_axis, dtype=float) if xi_axis is not None \
        else make_axis(xi_range, n_xi, "xi")
    for value in np.concatenate([etas, xis]):
        unit_interval("axis value", value)

    logger.info("Sweeping {} cells of {} (warm_start={}).".format(
        etas.size * xis.size, state, warm_start))

    if warm_start:
        jobs = [(state, i, etas, xi, p_dark, cfg) for i, xi in enumerate(xis)]
        rows = _map(_sweep_row, jobs, workers)
        cells = [cell for row in rows for cell in row]
    else:
        jobs = []
        for i, xi in enumerate(xis):
            for j, eta in enumerate(etas):
                cell_cfg = cfg.replace(rng_seed=cell_seed(cfg.rng_seed, i, j))
                jobs.append((state, eta, xi, p_dark, cell_cfg, ()))
        cells = _map(_sweep_cell, jobs, workers)

    shape = (xis.size, etas.size)
    ch = np.array([c[0] for c in cells], dtype=float).reshape(shape)
    converged = np.array([c[2] for c in cells], dtype=bool).reshape(shape)
    settings = [[cells[i * etas.size + j][1] for j in range(etas.size)]
                for i in range(xis.size)]
    r_values = None
    if state.has_squeezing:
        r_values = np.array(
            [[s.r if s is not None and s.r is not None else np.nan
              for s in row] for row in settings])

    failed = int(np.sum(~np.isfinite(ch)))
    if failed:
        logger.warning("{} of {} cells failed.".format(failed, ch.size))
    logger.info("Sweep done: max violation {!r}.".format(
        float(np.nanmax(ch)) if failed < ch.size else float("nan")))

    return SweepGrid(
        eta_axis=etas, xi_axis=xis, ch_values=ch, settings=settings,
        p_dark=p_dark, r_values=r_values, converged=converged,
        state=state.to_dict(),
        config={"simplex": cfg.to_dict(), "warm_start": bool(warm_start)})


def _map(func, jobs, workers):
    if workers is not None and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(func, jobs))
    return [func(job) for job in jobs]


def find_eta_threshold(
        state, xi: float, p_dark: float = 1.0, tol: float = 1e-3,
        cfg: Optional[SimplexConfig] = None, workers: int = 1,
        eta_lo: float = THRESHOLD_LOWER_ETA,
        eta_hi: float = 1.0) -> ThresholdResult:
    """
    Bisection on the efficiency for the sign change of the CH maximum
    at fixed mode matching and dark-count probability.

    Raises
    ------
    NoSignChangeError
        When the CH maximum has the same sign at both ends.
    """
    state = as_state(state)
    cfg = cfg or SimplexConfig()
    xi = unit_interval("xi", xi)
    p_dark = unit_interval("p_dark", p_dark)
    tol = check_number("tol", tol, min=MIN_TOL)
    lo = unit_interval("eta_lo", eta_lo)
    hi = unit_interval("eta_hi", eta_hi)
    if not lo < hi:
        raise DomainError("'eta_lo' must be below 'eta_hi'.")

    def ch(eta):
        value = ch_max_at(state, eta, xi, p_dark, cfg, workers).value
        logger.debug("threshold search: eta={!r} CH_max={!r}".format(
            eta, value))
        return value

    ch_hi = ch(hi)
    if not ch_hi > VIOLATION_TOL:
        raise NoSignChangeError(
            "no sign change: CH_max={!r} <= 0 at eta={!r} (xi={!r}, "
            "p_dark={!r}).".format(ch_hi, hi, xi, p_dark))
    ch_lo = ch(lo)
    if ch_lo > VIOLATION_TOL:
        raise NoSignChangeError(
            "no sign change: CH_max={!r} > 0 already at eta={!r}.".format(
                ch_lo, lo))

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        value = ch(mid)
        if value > VIOLATION_TOL:
            hi, ch_hi = mid, value
        else:
            lo, ch_lo = mid, value

    threshold = 0.5 * (lo + hi)
    logger.info("Efficiency threshold {!r} at xi={!r}, p_dark={!r}.".format(
        threshold, xi, p_dark))
    return ThresholdResult(
        eta_threshold=threshold, xi=xi, p_dark=p_dark, bracket=(lo, hi),
        tol=tol, ch_lo=ch_lo, ch_hi=ch_hi)


def violation_mask(
        grid: SweepGrid, offset: float = CONTOUR_OFFSET) -> np.ndarray:
    """
    Cells whose CH maximum exceeds ``offset``; NaN cells are False.
    """
    return np.nan_to_num(grid.ch_values, nan=-np.inf) > offset


def connected_violation_region(
        grid: SweepGrid, offset: float = CONTOUR_OFFSET) -> np.ndarray:
    """
    The 4-connected part of ``violation_mask`` that contains the cell
    of highest efficiency and mode matching (all False if that cell
    shows no violation).
    """
    mask = violation_mask(grid, offset)
    labels, _ = ndimage.label(mask)
    corner = labels[-1, -1]
    if corner == 0:
        return np.zeros_like(mask)
    return labels == corner


def grid_to_frame(
        grid: SweepGrid,
        contour_offset: float = CONTOUR_OFFSET) -> pd.DataFrame:
    mask = violation_mask(grid, contour_offset)
    records = []
    for i, xi in enumerate(grid.xi_axis):
        for j, eta in enumerate(grid.eta_axis):
            d = grid.settings[i][j]
            amps = (d.a1.real, d.a2.real, d.a2.imag, d.b1.real, d.b1.imag,
                    d.b2.real, d.b2.imag) if d is not None else (np.nan,) * 7
            record = [eta, xi, grid.ch_values[i, j], *amps]
            if grid.r_values is not None:
                record.append(grid.r_values[i, j])
            record.append(int(mask[i, j]))
            records.append(record)

    columns = list(CSV_COLUMNS)
    if grid.r_values is not None:
        columns.append("r")
    columns.append("mask")
    return pd.DataFrame.from_records(records, columns=columns)


def _json_text(value) -> str:
    """
    ``json.dumps(value, sort_keys=True)`` with every float written to 17
    significant digits.

    Examples
    --------
    >>> _json_text({"b": [0.1, 1.0], "a": None})
    '{"a": null, "b": [0.10000000000000001, 1.0]}'
    """
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        if not np.isfinite(value):
            return json.dumps(value)
        text = "{:.17g}".format(value)
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(value, dict):
        return "{" + ", ".join(
            json.dumps(str(key)) + ": " + _json_text(value[key])
            for key in sorted(value)) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in value) + "]"
    return json.dumps(value)


def export_grid(
        grid: SweepGrid, format: str = "csv",
        contour_offset: float = CONTOUR_OFFSET,
        config: Optional[Dict[str, Any]] = None) -> bytes:
    """
    Serializes a grid.

    Parameters
    ----------
    grid: SweepGrid
        The grid.
    format: str
        ``"csv"`` (one row per cell) or ``"json"``.
    contour_offset: float
        The mask column (or field) is 1 where ``ch > contour_offset``.
    config: dict, optional
        Settings echoed into the output; defaults to ``grid.config``.
        In CSV it is a first line starting with ``#``.

    Returns
    -------
    bytes
        UTF-8 text. CSV and JSON floats carry 17 significant digits.
    """
    contour_offset = check_number("contour_offset", contour_offset)
    config = grid.config if config is None else config

    if format == "csv":
        buffer = io.StringIO()
        if config:
            buffer.write("# " + json.dumps(config, sort_keys=True) + "\n")
        grid_to_frame(grid, contour_offset).to_csv(
            buffer, index=False, float_format="%.17g", na_rep="nan",
            lineterminator="\n")
        return buffer.getvalue().encode("utf-8")

    if format == "json":
        mask = violation_mask(grid, contour_offset)
        document = {
            "state": grid.state,
            "p_dark": grid.p_dark,
            "eta_axis": [float(v) for v in grid.eta_axis],
            "xi_axis": [float(v) for v in grid.xi_axis],
            "ch": [[float(v) for v in row] for row in grid.ch_values],
            "converged": [[bool(v) for v in row] for row in grid.converged],
            "settings": [[None if d is None else d.to_dict() for d in row]
                         for row in grid.settings],
            "contour_offset": contour_offset,
            "mask": [[int(v) for v in row] for row in mask],
            "config": config,
        }
        if grid.r_values is not None:
            document["r"] = [[float(v) for v in row]
                             for row in grid.r_values]
        return (_json_text(document) + "\n").encode("utf-8")

    raise DomainError("Unknown export format '{}'.".format(format))


def load_grid(
        data: Union[bytes, str, os.PathLike],
        format: str = "json") -> SweepGrid:
    """
    Reads a grid written by ``export_grid(..., format="json")``.

    ``data`` is the exported bytes (or text), or a path to them.
    """
    if format != "json":
        raise DomainError("Only JSON grids can be loaded.")

    if isinstance(data, bytes):
        text = data.decode("utf-8")
    elif isinstance(data, str) and data.lstrip().startswith("{"):
        text = data
    else:
        with open(data, "r", encoding="utf-8") as f:
            text = f.read()

    document = json.loads(text)
    settings = [[None if d is None else DisplacementSettings.from_dict(d)
                 for d in row] for row in document["settings"]]
    r_values = document.get("r")
    return SweepGrid(
        eta_axis=document["eta_axis"],
        xi_axis=document["xi_axis"],
        ch_values=document["ch"],
        settings=settings,
        p_dark=document["p_dark"],
        r_values=None if r_values is None else np.array(r_values),
        converged=document["converged"],
        state=document.get("state", {}),
        config=document.get("config", {}))
