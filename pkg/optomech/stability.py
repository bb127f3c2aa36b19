"""
Dynamic stability from the real parts of the coefficient-matrix
eigenvalues, and (Δ, P) phase maps built from it.
"""

from enum import Enum
from functools import partial
import math

import numpy as np
import pandas as pd

from .errors import OptomechError
from .formalisms import Formalism, build_system
from .frozen import Frozen
from .linalg import eigendecompose
from .logging import resolve_logger
from .parameters import cooperativity, drive_amplitude
from .runner import SweepRunner
from .steady import solve_intracavity, steady_state


MARGINAL_BAND = 1e-6
FAILED = "FAILED"


class Stability(Enum):
    """Classification of one coefficient matrix."""
    STABLE = "STABLE"
    UNSTABLE = "UNSTABLE"


def _matrix(sys):
    """Coefficient matrix of a CoeffSystem, or the array itself."""
    return getattr(sys, "M", sys)


def max_growth_rate(sys):
    """Largest real part among the eigenvalues (rad/s)."""
    return float(np.max(np.real(eigendecompose(_matrix(sys)).values)))


def classify(sys, margin=0.0):
    """
    Stable unless an eigenvalue has real part above the margin.

    Parameters
    ----------
    sys : CoeffSystem or np.ndarray
        System or bare coefficient matrix.
    margin : float
        Growth rate (rad/s) tolerated before calling the system unstable.

    Returns
    -------
    Stability
    """
    if max_growth_rate(sys) > margin:
        return Stability.UNSTABLE
    return Stability.STABLE


def classify_margin(sys, margin=0.0, band=0.0):
    """
    Classification plus a marginal flag.

    Returns
    -------
    tuple
        (Stability, marginal) where marginal is True if the largest real
        part lies within ±band of the margin.
    """
    growth = max_growth_rate(sys)
    cls = Stability.UNSTABLE if growth > margin else Stability.STABLE
    return cls, bool(abs(growth - margin) <= band)


def critical_photon_number(params, convention="table", logger=None):
    """
    Heuristic photon number for the onset of nonlinear instability,
    n_cr ≈ (4/C0)(Ω/κ)².

    Parameters
    ----------
    params : OmParams
        System parameters.
    convention : {"table", "main_text"}
        Cooperativity convention for C0.
    logger : OmLogger, optional
        Receives a regime warning when Ω < κ.

    Returns
    -------
    float
        n_cr, or inf when g0 = 0.
    """
    c0, _ = cooperativity(params, 1.0, convention)
    if params.Omega < params.kappa:
        resolve_logger(logger).log(
            "WARNING: critical photon number heuristic assumes a side-band "
            f"resolved system, but Omega/kappa = "
            f"{params.Omega / params.kappa:.3e}")
    if c0 == 0:
        return math.inf
    return 4 / c0 * (params.Omega / params.kappa)**2


def _classify_cell(cell, params, tags, band):
    """Worst-case class per formalism at one (Δ, P) cell."""
    Delta, power = cell
    p = params.replace(P_op=power)
    try:
        alpha_mag = drive_amplitude(p)
        count = len(solve_intracavity(p, Delta, alpha_mag))
        branches = ["lowest"] if count == 1 else ["lowest", "highest"]
        states = [steady_state(p, Delta, alpha_mag, branch)
                  for branch in branches]
        classes, marginal = {}, False
        for tag in tags:
            worst = Stability.STABLE
            for ss in states:
                cls, near = classify_margin(build_system(tag, p, ss),
                                            band=band)
                marginal = marginal or near
                if cls is Stability.UNSTABLE:
                    worst = cls
            classes[tag] = worst
        return {"failed": False, "nbar": states[0].nbar, "classes": classes,
                "marginal": marginal, "branch_count": count}
    except OptomechError as exc:
        return {"failed": True, "nbar": 0.0, "classes": {},
                "marginal": False, "branch_count": 0, "error": str(exc)}


def extract_thresholds(delta_grid, power_grid, unstable):
    """
    Lowest unstable power on each side of resonance.

    Parameters
    ----------
    delta_grid : array-like
        Detunings (rad/s), one per row of `unstable`.
    power_grid : array-like
        Powers (W), one per column.
    unstable : array-like
        Boolean (len(delta_grid), len(power_grid)) mask.

    Returns
    -------
    tuple
        (p_th_blue, p_th_red), blue being Δ < 0 and red Δ > 0. None where
        no cell on that side is unstable.
    """
    delta_grid = np.asarray(delta_grid, dtype=float)
    unstable = np.asarray(unstable, dtype=bool)
    power = np.broadcast_to(np.asarray(power_grid, dtype=float),
                            unstable.shape)

    def lowest(rows):
        mask = unstable & rows[:, None]
        return float(power[mask].min()) if mask.any() else None

    return lowest(delta_grid < 0), lowest(delta_grid > 0)


def boundary_cells(unstable, valid):
    """
    Unstable cells with at least one stable neighbour on the grid.

    Parameters
    ----------
    unstable, valid : np.ndarray
        Boolean masks of equal shape; `valid` excludes failed cells.

    Returns
    -------
    np.ndarray
        Boolean mask.
    """
    stable = valid & ~unstable
    padded = np.pad(stable, 1, constant_values=False)
    near = (padded[:-2, 1:-1] | padded[2:, 1:-1]
            | padded[1:-1, :-2] | padded[1:-1, 2:])
    return unstable & valid & near


class StabilityMap(Frozen):
    """
    Classification of a (Δ, P) grid under one or more formalisms.

    Attributes
    ----------
    delta_grid : np.ndarray
        Detunings (rad/s), one per row.
    power_grid : np.ndarray
        Input powers (W), one per column.
    formalisms : tuple of Formalism
        Bases evaluated; the first is treated as linear and the last as
        nonlinear.
    cls : dict
        Formalism mapped to an object array of Stability (None if failed).
    failed : np.ndarray
        True where the steady state could not be computed.
    marginal : np.ndarray
        True where an eigenvalue real part sat within the marginal band.
    nbar : np.ndarray
        Photon number of the lowest branch per cell.
    p_th_blue, p_th_red : float or None
        Lowest unstable power (nonlinear formalism) on the blue side
        (Δ < 0) and on the red side (Δ > 0). Δ = 0 belongs to neither.
    n_cr_empirical : float or None
        Smallest n̄ among unstable boundary cells (nonlinear formalism).
    n_cr_heuristic : float
        From `critical_photon_number`.
    """
    # pylint: disable=too-many-instance-attributes,too-many-arguments
    def __init__(self, *, delta_grid, power_grid, formalisms, cls, failed,
                 marginal, nbar, n_cr_heuristic):
        self.delta_grid = np.asarray(delta_grid, dtype=float)
        self.power_grid = np.asarray(power_grid, dtype=float)
        self.formalisms = tuple(formalisms)
        self.cls = cls
        self.failed = np.asarray(failed, dtype=bool)
        self.marginal = np.asarray(marginal, dtype=bool)
        self.nbar = np.asarray(nbar, dtype=float)
        self.n_cr_heuristic = float(n_cr_heuristic)

        unstable = self.unstable_mask(self.formalisms[-1])
        self.p_th_blue, self.p_th_red = extract_thresholds(
            self.delta_grid, self.power_grid, unstable)
        edge = boundary_cells(unstable, ~self.failed)
        self.n_cr_empirical = (float(self.nbar[edge].min()) if edge.any()
                               else None)

    def unstable_mask(self, tag):
        """Boolean mask of UNSTABLE cells for one formalism."""
        tag = Formalism.parse(tag)
        return np.vectorize(lambda c: c is Stability.UNSTABLE,
                            otypes=[bool])(self.cls[tag])

    def labels(self, tag):
        """Class names per cell, with FAILED where the solve failed."""
        tag = Formalism.parse(tag)
        return np.vectorize(lambda c: FAILED if c is None else c.value,
                            otypes=[object])(self.cls[tag])

    def quadrants(self):
        """
        Counts of the four (linear, nonlinear) class combinations.

        Returns
        -------
        dict
            (linear class name, nonlinear class name) mapped to the number
            of non-failed cells. Combinations that do not occur count 0.
        """
        linear = self.labels(self.formalisms[0])[~self.failed]
        nonlinear = self.labels(self.formalisms[-1])[~self.failed]
        names = [s.value for s in Stability]
        return {(a, b): int(np.sum((linear == a) & (nonlinear == b)))
                for a in names for b in names}

    def to_frame(self):
        """
        Long-form table, one row per cell, Δ-major.

        Returns
        -------
        pd.DataFrame
            delta_hz, power_w, cls_linear, cls_nonlinear, nbar.
        """
        deltas, powers = np.meshgrid(self.delta_grid, self.power_grid,
                                     indexing="ij")
        return pd.DataFrame({
            "delta_hz": deltas.ravel() / (2 * math.pi),
            "power_w": powers.ravel(),
            "cls_linear": self.labels(self.formalisms[0]).ravel(),
            "cls_nonlinear": self.labels(self.formalisms[-1]).ravel(),
            "nbar": np.where(self.failed, 0.0, self.nbar).ravel(),
        })

    def summary(self):
        """Thresholds and critical photon numbers as a dict."""
        return {"p_th_blue": self.p_th_blue, "p_th_red": self.p_th_red,
                "n_cr_empirical": self.n_cr_empirical,
                "n_cr_heuristic": self.n_cr_heuristic,
                "failed_cells": int(self.failed.sum())}


def phase_map(params, delta_grid, power_grid,
              formalisms=(Formalism.LINEARIZED4, Formalism.THIRD_ORDER5),
              threads=1, logger=None):
    """
    Classify every (Δ, P) cell.

    Each cell uses the lowest steady-state branch. Where the cubic has
    three roots the highest branch is evaluated too and the worse class is
    kept.

    Parameters
    ----------
    params : OmParams
        System parameters; P_op is replaced per cell.
    delta_grid : array-like
        Monotone detunings (rad/s).
    power_grid : array-like
        Monotone input powers (W).
    formalisms : sequence of Formalism or str
        Bases to classify with.
    threads : int
        Worker processes for the cell sweep.
    logger : OmLogger, optional
        Receives failed-cell reports and a summary.

    Returns
    -------
    StabilityMap
    """
    logger = resolve_logger(logger)
    tags = tuple(Formalism.parse(tag) for tag in formalisms)
    deltas = np.asarray(delta_grid, dtype=float)
    powers = np.asarray(power_grid, dtype=float)
    for name, grid in (("delta_grid", deltas), ("power_grid", powers)):
        if grid.size > 1 and not (np.all(np.diff(grid) > 0)
                                  or np.all(np.diff(grid) < 0)):
            raise ValueError(f"Parameter '{name}' must be monotone")

    cells = [(d, p) for d in deltas for p in powers]
    runner = SweepRunner(threads=threads, logger=logger)
    results = runner.map(
        partial(_classify_cell, params=params, tags=tags,
                band=MARGINAL_BAND * params.kappa), cells)

    shape = (len(deltas), len(powers))
    cls = {tag: np.empty(shape, dtype=object) for tag in tags}
    failed = np.zeros(shape, dtype=bool)
    marginal = np.zeros(shape, dtype=bool)
    nbar = np.zeros(shape)
    for k, result in enumerate(results):
        i, j = divmod(k, len(powers))
        failed[i, j] = result["failed"]
        marginal[i, j] = result["marginal"]
        nbar[i, j] = result["nbar"]
        for tag in tags:
            cls[tag][i, j] = result["classes"].get(tag)
        if result["failed"]:
            logger.log(f"Cell failed: {result['error']}",
                       sweep_point=f"Delta={deltas[i]:.6e}, P={powers[j]:.6e}")

    stab = StabilityMap(
        delta_grid=deltas, power_grid=powers, formalisms=tags, cls=cls,
        failed=failed, marginal=marginal, nbar=nbar,
        n_cr_heuristic=critical_photon_number(params, logger=logger))
    logger.log(stab.summary())
    return stab
