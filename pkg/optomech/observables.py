"""
Derived physics: resonance shifts from eigenvalues, the optical spring
effect with its quantum corrections, side-band inequivalence and the
phonon-number estimator based on the spring slope.
"""

import numpy as np

from .errors import DomainError
from .formalisms import Formalism, build_system
from .frozen import Frozen
from .linalg import eigendecompose, track_branches
from .logging import resolve_logger
from .steady import steady_state, zeta


class ShiftReport(Frozen):
    """
    Shifts of the mechanical and optical frequencies and decay rates.

    Attributes
    ----------
    dOmega : float
        Mechanical frequency shift δΩ (rad/s).
    domega : float
        Optical frequency shift δω (rad/s).
    dGamma : float
        Mechanical decay shift δΓ (rad/s).
    dkappa : float
        Optical decay shift δκ (rad/s).
    ambiguous : bool
        True if eigenvalue matching hit a tie.
    """
    # pylint: disable=too-many-arguments
    def __init__(self, dOmega, domega, dGamma, dkappa, ambiguous=False):
        self.dOmega = float(dOmega)
        self.domega = float(domega)
        self.dGamma = float(dGamma)
        self.dkappa = float(dkappa)
        self.ambiguous = bool(ambiguous)


class SpringPoint(Frozen):
    """
    Spring effect at one probe frequency and detuning.

    Attributes
    ----------
    w : float
        Probe frequency (rad/s).
    Delta : float
        Detuning (rad/s).
    dOmega_corr, dGamma_corr : float
        Frequency and damping shifts with the quantum corrections.
    dOmega_std, dGamma_std : float
        Standard spring effect.
    """
    # pylint: disable=too-many-arguments,too-many-positional-arguments
    def __init__(self, w, Delta, dOmega_corr, dGamma_corr, dOmega_std,
                 dGamma_std):
        self.w = float(w)
        self.Delta = float(Delta)
        self.dOmega_corr = float(dOmega_corr)
        self.dGamma_corr = float(dGamma_corr)
        self.dOmega_std = float(dOmega_std)
        self.dGamma_std = float(dGamma_std)


class InequivalenceResult(Frozen):
    """
    Red and blue sideband displacements at zero detuning.

    Attributes
    ----------
    dDelta : float
        ½(Δ_r + Δ_b) (rad/s).
    Delta_r, Delta_b : float
        Red and blue sideband displacements (rad/s).
    ambiguous : bool
        True if eigenvalue matching hit a tie.
    """
    def __init__(self, Delta_r, Delta_b, ambiguous=False):
        self.Delta_r = float(Delta_r)
        self.Delta_b = float(Delta_b)
        self.dDelta = 0.5 * (self.Delta_r + self.Delta_b)
        self.ambiguous = bool(ambiguous)


def free_anchors(params):
    """Uncoupled values ψ₁ = iκ/2, ψ₂ = −Ω + iγ/2, ψ₃ = Ω + iγ/2."""
    return np.array([0.5j * params.kappa,
                     -params.Omega + 0.5j * params.gamma,
                     params.Omega + 0.5j * params.gamma])


def tracked_frequencies(params, ss, phonons="coherent", mbar=None):
    """
    Eigenfrequencies η = −iμ − Δ of the second-order basis, matched to
    `free_anchors`.

    The matrix is built with s = 0.

    Returns
    -------
    tuple
        (η array of length 3, ambiguous flag).
    """
    sys = build_system(Formalism.SECOND_ORDER3, params, ss, include_s=False,
                       mbar=mbar, phonons=phonons)
    eig = eigendecompose(sys.M)
    eta = -1j * eig.values - ss.Delta
    track = track_branches([eta], free_anchors(params))
    return track.values[0], track.ambiguous


def resonance_shifts(params, ss, phonons="coherent", mbar=None, logger=None):
    """
    Frequency and decay shifts read off the eigenvalues.

    Parameters
    ----------
    params : OmParams
        System parameters.
    ss : SteadyState
        Steady state.
    phonons : {"coherent", "thermal", "raw"}
        Which phonon population enters the couplings.
    mbar : float, optional
        Explicit phonon population, overriding `phonons`.
    logger : OmLogger, optional
        Records which population was used.

    Returns
    -------
    ShiftReport
    """
    eta, ambiguous = tracked_frequencies(params, ss, phonons, mbar)
    resolve_logger(logger).log(
        f"Resonance shifts with phonon population "
        f"'{'explicit' if mbar is not None else phonons}'"
        + (" (ambiguous branch matching)" if ambiguous else ""))
    return ShiftReport(
        dOmega=-0.5 * np.real(eta[1] - eta[2]) - params.Omega,
        domega=-0.5 * np.real(eta[1] + eta[2]),
        dGamma=np.imag(-2 * eta[0] + eta[1] + eta[2]) - params.Gamma,
        dkappa=2 * np.imag(eta[0]) - params.kappa,
        ambiguous=ambiguous)


def temperature_slope(params, temps_k, logger=None):
    """
    Slope of δΩ against temperature without drive.

    Each temperature gets an undriven steady state. The shifts use the
    thermal occupancy as phonon population.

    Parameters
    ----------
    params : OmParams
        System parameters (T and P_op are replaced).
    temps_k : array-like
        At least two temperatures (K).
    logger : OmLogger, optional
        Receives the fitted slope.

    Returns
    -------
    float
        Least-squares slope d(δΩ)/dT in rad/s per K.
    """
    temps = np.asarray(temps_k, dtype=float)
    shifts = []
    for temp in temps:
        p = params.replace(T=temp, P_op=0.0)
        ss = steady_state(p, 0.0, 0.0)
        shifts.append(resonance_shifts(p, ss, phonons="thermal").dOmega)
    slope = np.polyfit(temps, np.array(shifts), 1)[0]
    resolve_logger(logger).log(
        f"Temperature slope of dOmega: {slope / (2 * np.pi):.6e} Hz/K "
        "(thermal phonon population)")
    return float(slope)


def approx_shift(params, nbar):
    """
    Perturbative sums of the shifts.

    Parameters
    ----------
    params : OmParams
        System parameters.
    nbar : float
        Intracavity photon number.

    Returns
    -------
    tuple of float
        (δΩ + δω ≈ −g²Ω/(Ω² + Γ²/4), δΓ + δκ ≈ g²Γ/(2(Ω² + Γ²/4))) with
        g² = g0² n̄.
    """
    g2 = params.g0**2 * nbar
    lorentz = params.Omega**2 + params.Gamma**2 / 4
    return -g2 * params.Omega / lorentz, g2 * params.Gamma / (2 * lorentz)


def spring_corrected(params, ss, w, Delta=None):
    """
    Standard and corrected spring effect.

    Parameters
    ----------
    params : OmParams
        System parameters.
    ss : SteadyState
        Supplies n̄ and m̄.
    w : float
        Probe frequency (rad/s), non-zero.
    Delta : float, optional
        Detuning; defaults to ss.Delta.

    Returns
    -------
    SpringPoint

    Raises
    ------
    DomainError
        If w = 0.
    """
    if w == 0:
        raise DomainError("Parameter 'w' must be non-zero, but is: 0")
    Delta = ss.Delta if Delta is None else Delta
    kappa, Omega, Gamma = params.kappa, params.Omega, params.Gamma
    nbar, mbar = ss.nbar, ss.mbar

    l_plus = 1 / ((Delta + w)**2 + kappa**2 / 4)
    l_minus = 1 / ((Delta - w)**2 + kappa**2 / 4)
    b_freq = (Delta + w) * l_plus + (Delta - w) * l_minus
    b_damp = kappa * l_plus - kappa * l_minus
    pref = params.g0**2 * Omega / w

    re_mu = (w / Omega) * (mbar + 0.5) + 0.5
    im_mu = (Gamma / (2 * Omega)) * (mbar + 0.5)

    std_omega = pref * nbar * b_freq
    std_gamma = pref * nbar * b_damp
    return SpringPoint(
        w=w, Delta=Delta,
        dOmega_corr=std_omega + pref * (re_mu * b_freq + im_mu * b_damp),
        dGamma_corr=std_gamma + pref * (re_mu * b_damp - im_mu * b_freq),
        dOmega_std=std_omega, dGamma_std=std_gamma)


def spring_weak_coupling(params, ss, Delta=None):
    """
    Spring frequency shift at w = Ω in the weak-coupling limit.

    Parameters
    ----------
    params : OmParams
        System parameters.
    ss : SteadyState
        Supplies n̄, m̄ and |α|.
    Delta : float, optional
        Detuning; defaults to ss.Delta.

    Returns
    -------
    tuple of float
        (δΩ, g0² term, g0⁴ term). δΩ = 2Δg0²(n̄ + m̄ + 1)/(Δ² + κ²/4).
        The second and third entries write n̄ ≈ |α|²/(Δ² + κ²/4) and
        m̄ ≈ g0²ζn̄² in terms of the drive.
    """
    Delta = ss.Delta if Delta is None else Delta
    g0 = params.g0
    lorentz = Delta**2 + params.kappa**2 / 4
    power = ss.alpha_mag**2
    shift = 2 * Delta * g0**2 * (ss.nbar + ss.mbar + 1) / lorentz
    g2_term = g0**2 * 2 * Delta * power / lorentz**2
    g4_term = (g0**4 * 2 * Delta * zeta(params, Delta) * power**2
               / lorentz**3)
    return shift, g2_term, g4_term


def spring_slope(params, alpha_mag, step=None):
    """
    d(δΩ)/dΔ at Δ = 0 by central differences of the weak-coupling shift.

    Parameters
    ----------
    params : OmParams
        System parameters.
    alpha_mag : float
        Drive magnitude, held fixed while Δ moves.
    step : float, optional
        Detuning step; defaults to κ/200.

    Returns
    -------
    float
        Slope (dimensionless, rad/s per rad/s).
    """
    step = params.kappa / 200 if step is None else step
    upper = spring_weak_coupling(params, steady_state(params, step,
                                                      alpha_mag))[0]
    lower = spring_weak_coupling(params, steady_state(params, -step,
                                                      alpha_mag))[0]
    return (upper - lower) / (2 * step)


def phonons_from_spring_slope(params, slope, alpha_mag):
    """
    Coherent phonon number on resonance from the spring slope.

    m̄(0) ≈ (κ²/8g0²)·slope − 4|α|²/κ² − 1.

    Raises
    ------
    DomainError
        If g0 = 0.
    """
    if params.g0 == 0:
        raise DomainError(
            "Parameter 'g0' must be greater than 0 to estimate phonons from "
            "the spring slope, but is: 0.0")
    kappa = params.kappa
    return (kappa**2 / (8 * params.g0**2) * slope
            - 4 * alpha_mag**2 / kappa**2 - 1)


def phonons_closed_forms(params, nbar0, alpha_mag):
    """
    Two closed-form estimates of the resonant phonon number.

    Returns
    -------
    tuple of float
        (32(g0 Q_m n̄(0)/Γ)², 512 g0² Q_m² |α|⁴/(Γ² κ⁴)), with
        Q_m = Ω/Γ. They agree when n̄(0) = 4|α|²/κ².
    """
    q_mech = params.Omega / params.Gamma
    first = 32 * (params.g0 * q_mech * nbar0 / params.Gamma)**2
    second = (512 * params.g0**2 * q_mech**2 * alpha_mag**4
              / (params.Gamma**2 * params.kappa**4))
    return first, second


def sideband_inequivalence_numeric(params, ss, logger=None):
    """
    Side-band inequivalence from the tracked eigenvalues.

    The second-order basis with s = 0 and the coherent phonon population
    stored in `ss` is used. Δ_r = −(Re η₃ − Ω) and Δ_b = −(Re η₂ + Ω).

    Parameters
    ----------
    params : OmParams
        System parameters.
    ss : SteadyState
        Steady state at Δ = 0.
    logger : OmLogger, optional
        Records the phonon population used.

    Returns
    -------
    InequivalenceResult

    Raises
    ------
    DomainError
        If ss.Delta is not 0.
    """
    if ss.Delta != 0:
        raise DomainError(
            f"Side-band inequivalence needs a steady state at Delta = 0, "
            f"but Delta is: {ss.Delta}")
    eta, ambiguous = tracked_frequencies(params, ss, phonons="coherent")
    resolve_logger(logger).log(
        f"Side-band inequivalence with coherent phonon population "
        f"mbar={ss.mbar:.6e}, nbar={ss.nbar:.6e}")
    return InequivalenceResult(
        Delta_r=-(np.real(eta[2]) - params.Omega),
        Delta_b=-(np.real(eta[1]) + params.Omega),
        ambiguous=ambiguous)


def sideband_inequivalence_asymptotic(params, nbar, mbar):
    """
    Fourth-order expansion of the first- and second-order inequivalence.

    Returns
    -------
    tuple of float
        (δΔ¹, δΔ²) with δΔ¹/Ω = (g0/Ω)²(n̄ + ½) − 2(g0/Ω)⁴(n̄ + ½)(m̄ + ½)
        and δΔ² = −2δΔ¹.
    """
    ratio = (params.g0 / params.Omega)**2
    first = params.Omega * (ratio * (nbar + 0.5)
                            - 2 * ratio**2 * (nbar + 0.5) * (mbar + 0.5))
    return first, -2 * first


def sideband_observable(params, nbar, mbar):
    """True if |Δ_r + Δ_b| = |2δΔ¹| exceeds the mechanical linewidth."""
    first, _ = sideband_inequivalence_asymptotic(params, nbar, mbar)
    return bool(abs(2 * first) > params.Gamma)


def inequivalence_turnover(params):
    """
    Photon number at which δΔ¹ stops growing.

    The phonon population follows the resonant coherent value
    m̄ = g0²ζ(0)n̄², so dδΔ¹/dn̄ = 0 becomes the quadratic
    6ac n̄² + 2ac n̄ + a − 1 = 0 with a = (g0/Ω)², c = g0²ζ(0).

    Returns
    -------
    float
        The positive root.

    Raises
    ------
    DomainError
        If g0 = 0 or g0 >= Ω (no positive root).
    """
    a = (params.g0 / params.Omega)**2
    c = params.g0**2 * zeta(params, 0.0)
    if a == 0 or a >= 1:
        raise DomainError(
            f"Parameter 'g0' must satisfy 0 < g0 < Omega for a turnover, "
            f"but is: {params.g0}")
    return ((-2 * a * c + np.sqrt(4 * a**2 * c**2 + 24 * a * c * (1 - a)))
            / (12 * a * c))
