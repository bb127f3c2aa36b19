"""
Scattering matrices and output noise spectra.

The additive treatment reads the output spectrum directly from row 1 of
the scattering matrix. The multiplicative treatment convolves the
sideband elements of that row with the closed-form field spectra, because
the noise entering the product-operator equations is multiplied by system
operators.
"""

import math

import numpy as np
import pandas as pd
from scipy.signal import fftconvolve
from scipy.signal.windows import tukey

from .errors import CapabilityError, ConditioningError, ConfigError
from .formalisms import (Formalism, OPTICAL, SPECTRUM_NOISE_MODES,
                         build_system)
from .frozen import Frozen
from .linalg import resolvent_solve
from .logging import resolve_logger
from .steady import nonlinear_shift_coefficient


MAX_GRID_POINTS = 10**7
WIDE_GRID_FACTOR = 4
TAPER_FRACTION = 0.2
TERM_NAMES = ("cavity", "sb1", "sb2")

ADDITIVE_TAGS = (Formalism.FULL6, Formalism.LINEAR3, Formalism.LINEARIZED4)
MULTIPLICATIVE_TAGS = (Formalism.SECOND_ORDER3, Formalism.THIRD_ORDER5)


class FrequencyGrid(Frozen):
    """
    Uniform angular frequency grid, endpoints included.

    Attributes
    ----------
    start : float
        First point (rad/s).
    stop : float
        Last point (rad/s).
    step : float
        Spacing (rad/s), > 0.
    count : int
        Number of points, round((stop - start)/step) + 1.
    """
    def __init__(self, start, stop, step):
        self.start = float(start)
        self.stop = float(stop)
        self.step = float(step)
        if not (math.isfinite(self.step) and self.step > 0):
            raise ConfigError(
                f"Parameter 'step' must be finite and greater than 0, but "
                f"is: {step}", field="step")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)
                and self.stop >= self.start):
            raise ConfigError(
                f"Parameter 'stop' must be finite and at least start "
                f"({start}), but is: {stop}", field="stop")
        span = (self.stop - self.start) / self.step
        if span >= MAX_GRID_POINTS:
            raise ConfigError(
                f"Parameter 'step' must give fewer than {MAX_GRID_POINTS} "
                f"points, but gives: {span:.0f}", field="step")
        self.count = int(round(span)) + 1

    @classmethod
    def from_hz_spec(cls, spec):
        """
        Build a grid from "start:stop:step" given in cycles/s.

        Parameters
        ----------
        spec : str
            Three colon-separated numbers (Hz).

        Returns
        -------
        FrequencyGrid
            Values converted to rad/s.
        """
        parts = str(spec).split(":")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(
                f"Grid must be 'start:stop:step' in Hz, but is: {spec}",
                field="grid") from exc
        return cls(2 * math.pi * start, 2 * math.pi * stop,
                   2 * math.pi * step)

    @classmethod
    def around(cls, center, half_width, count):
        """Grid of `count` points spanning center ± half_width."""
        if count < 2:
            raise ConfigError(
                f"Parameter 'count' must be at least 2, but is: {count}",
                field="count")
        step = 2 * half_width / (count - 1)
        return cls(center - half_width, center + half_width, step)

    @property
    def values(self):
        """Grid points (rad/s)."""
        return self.start + self.step * np.arange(self.count)

    @property
    def center(self):
        """Midpoint of the grid (rad/s)."""
        return self.start + self.step * (self.count - 1) / 2

    def hz_spec(self):
        """The "start:stop:step" string in cycles/s."""
        scale = 2 * math.pi
        return (f"{self.start / scale!r}:{self.stop / scale!r}:"
                f"{self.step / scale!r}")


class SpectrumResult(Frozen):
    """
    Symmetrised output spectral density and its contributions.

    Attributes
    ----------
    grid : FrequencyGrid
        Frequencies at which the spectrum is given.
    terms : dict
        "cavity", "sb1" and "sb2" arrays.
    total : np.ndarray
        Pointwise sum of the terms.
    flags : np.ndarray
        Boolean per bin; True where the multiplicative treatment is
        outside |ω − Δ| <= Ω/2.
    """
    def __init__(self, grid, terms, flags=None):
        self.grid = grid
        self.terms = {name: np.asarray(terms.get(name, np.zeros(grid.count)),
                                       dtype=float)
                      for name in TERM_NAMES}
        self.total = sum(self.terms[name] for name in TERM_NAMES)
        self.flags = (np.zeros(grid.count, dtype=bool) if flags is None
                      else np.asarray(flags, dtype=bool))

    def to_frame(self):
        """
        Spectrum as a DataFrame with the CLI column names.

        Returns
        -------
        pd.DataFrame
            omega_hz, s_total, s_cavity, s_sb1, s_sb2.
        """
        return pd.DataFrame({
            "omega_hz": self.grid.values / (2 * math.pi),
            "s_total": self.total,
            "s_cavity": self.terms["cavity"],
            "s_sb1": self.terms["sb1"],
            "s_sb2": self.terms["sb2"],
        })


def scattering_matrix(sys, omega):
    """
    Scattering matrix Y(ω) = I − Pᵀ (M − iωI)⁻¹ P.

    Parameters
    ----------
    sys : CoeffSystem
        System with a noise map P (n x k).
    omega : float or np.ndarray
        Angular frequency, or array of them.

    Returns
    -------
    np.ndarray
        k x k matrix, or (len(omega), k, k).

    Raises
    ------
    CapabilityError
        If the system has no noise map.
    ConditioningError
        If the resolvent is near-singular.
    """
    if sys.noise_in is None:
        raise CapabilityError(
            f"{sys.tag.value} has no noise-input map, so no scattering "
            "matrix")
    P = sys.noise_in
    X = resolvent_solve(sys.M, omega, P)
    return np.eye(P.shape[1]) - P.T @ X


def _d_factors(params, ss, omega):
    """x, y and the common denominator D of the closed forms."""
    omega = np.asarray(omega, dtype=float)
    g0, Omega = params.g0, params.Omega
    x = omega - ss.Delta - 0.5j * params.gamma
    y = omega - ss.Delta - 0.5j * params.kappa
    D = (y * (x**2 - Omega**2)
         - g0**2 * ((2 * ss.mbar + 1) * x - (2 * ss.nbar + 1) * Omega))
    return x, y, D


def closed_form_Y_row(params, ss, omega):
    """
    Closed forms of Y₁₁, Y₁₂, Y₁₃ for the second-order basis.

    Valid for the SecondOrder3 system with s = 0, coherent phonons and the
    output-port noise map.

    Parameters
    ----------
    params : OmParams
        System parameters.
    ss : SteadyState
        Steady state.
    omega : float or np.ndarray
        Angular frequency (rad/s).

    Returns
    -------
    tuple of np.ndarray
        (Y11, Y12, Y13).
    """
    x, _, D = _d_factors(params, ss, omega)
    Omega, kappa_ex = params.Omega, params.kappa_ex
    cross = -1j * params.g0 * math.sqrt(params.gamma * kappa_ex)
    y11 = 1 - 2j * kappa_ex * (x**2 - Omega**2) / D
    y12 = cross * (x - Omega) / D
    y13 = cross * (x + Omega) / D
    return y11, y12, y13


def closed_form_fields(params, ss, omega):
    """
    Field spectra b̄(w), ā(w), ab(w) and ab*(w).

    Parameters
    ----------
    params : OmParams
        System parameters.
    ss : SteadyState
        Steady state supplying α, n̄ and m̄.
    omega : float or np.ndarray
        Angular frequency w (rad/s).

    Returns
    -------
    tuple of np.ndarray
        (b̄, ā, ab, ab*).

    Raises
    ------
    ConditioningError
        If w sits exactly on a pole.
    """
    w = np.asarray(omega, dtype=float)
    g0, Omega, Gamma = params.g0, params.Omega, params.Gamma
    alpha = ss.alpha
    x, y, D = _d_factors(params, ss, w)
    lower = w + Omega - 0.5j * Gamma
    upper = w + Omega + 0.5j * Gamma
    mech = 1j * (w + Omega) + Gamma / 2

    for den in (D, lower, upper, mech):
        zero = np.atleast_1d(den == 0)
        if zero.any():
            raise ConditioningError(float(np.atleast_1d(w)[zero][0]), np.inf)

    bbar = alpha / mech
    abar = -alpha**2 * g0 * (w - ss.Delta - Omega - 0.5j * params.gamma) \
        / (lower * D)
    ab = alpha**2 * (g0**2 * (ss.mbar - ss.nbar) - y * (x - Omega)) \
        / (lower * D)
    abconj = -abs(alpha)**2 * (g0**2 * (ss.mbar + ss.nbar + 1)
                               - y * (x + Omega)) / (upper * D)
    return bbar, abar, ab, abconj


def occupancy_densities(kinds, m):
    """Flat input densities: ½ for optical inputs, m + ½ for mechanical."""
    return np.array([0.5 if kind == OPTICAL else m + 0.5 for kind in kinds])


def spectrum_additive(sys, grid, m, logger=None):
    """
    Output spectrum with all noise entering additively.

    S(ω) = Σ_j |Y₁ⱼ(ω)|² S_j with S_j = ½ for optical inputs and m + ½ for
    mechanical inputs.

    Parameters
    ----------
    sys : CoeffSystem
        Full6, Linear3 or Linearized4 system.
    grid : FrequencyGrid
        Output frequencies.
    m : float
        Thermal phonon occupancy.
    logger : OmLogger, optional
        Receives a summary line.

    Returns
    -------
    SpectrumResult
        "cavity" holds the optical inputs, "sb1" the mechanical inputs.
    """
    if sys.tag not in ADDITIVE_TAGS:
        raise CapabilityError(
            f"Additive spectra need one of {[t.value for t in ADDITIVE_TAGS]}"
            f", not {sys.tag.value}")
    Y = scattering_matrix(sys, grid.values)
    weights = np.abs(Y[:, 0, :])**2 * occupancy_densities(sys.input_kinds, m)
    optical = np.array([kind == OPTICAL for kind in sys.input_kinds])
    result = SpectrumResult(grid, {
        "cavity": weights[:, optical].sum(axis=1),
        "sb1": weights[:, ~optical].sum(axis=1),
    })
    resolve_logger(logger).log(
        f"Additive spectrum ({sys.tag.value}): {grid.count} bins, "
        f"max S = {result.total.max():.6e}")
    return result


def convolve_spectra(f, g, grid, use_fft=False, taper=True):
    """
    (f ∗ g)(ω) = ∫ f(v) g(ω − v) dv on the points of a grid.

    f is sampled on a grid with the same step, the same centre and
    4x the width; g is sampled at every difference ω − v needed.

    Parameters
    ----------
    f, g : callable
        Complex functions of angular frequency, vectorised.
    grid : FrequencyGrid
        Output frequencies.
    use_fft : bool
        Use FFT convolution instead of the direct sum.
    taper : bool
        Multiply the quadrature weights by a Tukey window.

    Returns
    -------
    np.ndarray
        Complex convolution, one value per grid point.
    """
    n, h = grid.count, grid.step
    n_wide = WIDE_GRID_FACTOR * (n - 1) + 1
    wide_start = grid.center - h * (n_wide - 1) / 2
    wide = wide_start + h * np.arange(n_wide)

    weights = np.full(n_wide, h)
    weights[[0, -1]] *= 0.5
    if taper:
        weights *= tukey(n_wide, TAPER_FRACTION)

    diff_start = grid.start - (wide_start + (n_wide - 1) * h)
    diffs = diff_start + h * np.arange(n + n_wide - 1)

    weighted = weights * np.asarray(f(wide), dtype=complex)
    sampled = np.asarray(g(diffs), dtype=complex)
    if use_fft:
        full = fftconvolve(weighted, sampled, mode="full")
    else:
        full = np.convolve(weighted, sampled, mode="full")
    return full[n_wide - 1:n_wide - 1 + n]


def spectrum_multiplicative(sys, params, ss, grid, m, use_fft=False,
                            taper=True, logger=None):
    """
    Output spectrum with multiplicative noise.

    S(ω) = |Y₁₁|² ½ + (1/γ²)|(Y₁₂ + Y₁₃) ∗ ā|² (m + ½)
           + (1/θ²)|Y₁₄ ∗ ab + Y₁₅ ∗ ab*|² (m + ½),
    the last term for ThirdOrder5 only.

    Parameters
    ----------
    sys : CoeffSystem
        SecondOrder3 or ThirdOrder5 system with a noise map.
    params : OmParams
        System parameters.
    ss : SteadyState
        Steady state used for the field spectra.
    grid : FrequencyGrid
        Output frequencies.
    m : float
        Thermal phonon occupancy.
    use_fft : bool
        FFT convolution instead of the direct sum.
    taper : bool
        Taper the convolution weights.
    logger : OmLogger, optional
        Receives the count of bins outside |ω − Δ| <= Ω/2.

    Returns
    -------
    SpectrumResult
    """
    if sys.tag not in MULTIPLICATIVE_TAGS:
        raise CapabilityError(
            "Multiplicative spectra need SecondOrder3 or ThirdOrder5, not "
            f"{sys.tag.value}")
    logger = resolve_logger(logger)
    omegas = grid.values
    Y = scattering_matrix(sys, omegas)
    s_bb = m + 0.5

    def y_elem(column):
        return lambda w: scattering_matrix(sys, w)[:, 0, column]

    def field(index):
        return lambda w: closed_form_fields(params, ss, w)[index]

    def sb1_kernel(w):
        row = scattering_matrix(sys, w)[:, 0, :]
        return row[:, 1] + row[:, 2]

    first = convolve_spectra(field(1), sb1_kernel, grid, use_fft, taper)
    terms = {
        "cavity": np.abs(Y[:, 0, 0])**2 * 0.5,
        "sb1": np.abs(first)**2 * s_bb / params.gamma**2,
    }
    if sys.tag is Formalism.THIRD_ORDER5:
        second = (convolve_spectra(field(2), y_elem(3), grid, use_fft, taper)
                  + convolve_spectra(field(3), y_elem(4), grid, use_fft,
                                     taper))
        terms["sb2"] = np.abs(second)**2 * s_bb / params.theta**2

    flags = np.abs(omegas - ss.Delta) > params.Omega / 2
    if flags.any():
        logger.log(
            f"Multiplicative spectrum: {int(flags.sum())} of {grid.count} "
            "bins lie outside |omega - Delta| <= Omega/2 and may be "
            "inaccurate")
    return SpectrumResult(grid, terms, flags)


def reflectivity(params, ss, grid, formalism=Formalism.SECOND_ORDER3):
    """
    Cavity power reflectivity |R|².

    Parameters
    ----------
    params : OmParams
        System parameters.
    ss : SteadyState
        Steady state.
    grid : FrequencyGrid
        Probe frequencies.
    formalism : Formalism or str
        Basis for the |Y₁₁|² variant. SecondOrder3 uses the output-port
        map and ThirdOrder5 diag(√κ, √γ, √γ, √θ, √θ).

    Returns
    -------
    tuple of np.ndarray
        (semi-classical |R|², |Y₁₁|²). The semi-classical form is
        R = 1 − iκ_ex / (ω + Δ + χn̄ + iκ/2).
    """
    tag = Formalism.parse(formalism)
    omegas = grid.values
    shift = nonlinear_shift_coefficient(params) * ss.nbar
    semi = 1 - 1j * params.kappa_ex / (omegas + ss.Delta + shift
                                       + 0.5j * params.kappa)

    mode = SPECTRUM_NOISE_MODES.get(tag)
    sys = build_system(tag, params, ss, include_s=False, noise_mode=mode)
    Y = scattering_matrix(sys, omegas)
    return np.abs(semi)**2, np.abs(Y[:, 0, 0])**2


def reflectivity_db(r2):
    """Reflectivity in dB relative to unity, 10·log10|R|²."""
    return 10 * np.log10(np.asarray(r2, dtype=float))
