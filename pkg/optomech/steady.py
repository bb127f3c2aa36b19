"""
Classical steady state of a driven optomechanical cavity.

The intracavity photon number solves a cubic in n̄. The mechanical
amplitude, drive phase, coherent phonon population and the ⟨ab⟩, ⟨ab†⟩
pair averages follow from it in closed form.
"""

import math

import numpy as np

from .errors import BranchIndexError, ConfigError, NoBistabilityError
from .frozen import Frozen
from .parameters import thermal_occupancy


ROOT_TOL = 1e-12
NEWTON_ITERATIONS = 60


class SteadyState(Frozen):
    """
    Equilibrium fields for one detuning and drive.

    Attributes
    ----------
    Delta : float
        Detuning Δ (rad/s).
    nbar : float
        Intracavity photon number n̄ >= 0.
    abar : float
        ā = sqrt(n̄), real by gauge choice.
    bbar : complex
        Mechanical amplitude b̄ = i g0 ā² / (iΩ + Γ/2).
    alpha : complex
        Drive amplitude α including its phase.
    m_th : float
        Thermal phonon occupancy.
    mbar : float
        Coherent phonon population (half quantum added, floored at 0).
    mbar_approx : float
        Leading n̄² term of the coherent phonon population.
    mbar_raw : complex
        m̄ from the direct linear solve, imaginary part retained.
    ab_pair : complex
        Steady ⟨a b⟩.
    abdag_pair : complex
        Steady ⟨a b†⟩.
    branch_count : int
        Number of real roots of the photon-number cubic (1 or 3).
    branch_index : int
        Index of the root used, in ascending order.
    """
    # pylint: disable=too-many-instance-attributes,too-many-arguments
    def __init__(self, *, Delta, nbar, bbar, alpha, m_th, mbar, mbar_approx,
                 mbar_raw, ab_pair, abdag_pair, branch_count=1,
                 branch_index=0):
        self.Delta = float(Delta)
        self.nbar = float(nbar)
        self.abar = math.sqrt(self.nbar)
        self.bbar = complex(bbar)
        self.alpha = complex(alpha)
        self.m_th = float(m_th)
        self.mbar = float(mbar)
        self.mbar_approx = float(mbar_approx)
        self.mbar_raw = complex(mbar_raw)
        self.ab_pair = complex(ab_pair)
        self.abdag_pair = complex(abdag_pair)
        self.branch_count = int(branch_count)
        self.branch_index = int(branch_index)

    @property
    def alpha_mag(self):
        """|α|."""
        return abs(self.alpha)


def nonlinear_shift_coefficient(params):
    """
    χ = 2 g0² Ω / (Ω² + Γ²/4), so that the effective detuning is Δ + χ n̄.
    """
    return (2 * params.g0**2 * params.Omega
            / (params.Omega**2 + params.Gamma**2 / 4))


def _polish(coeffs, x):
    """Newton refinement of a real root of a monic cubic."""
    b, c, d = coeffs
    for _ in range(NEWTON_ITERATIONS):
        f = ((x + b) * x + c) * x + d
        df = (3 * x + 2 * b) * x + c
        if df == 0 or f == 0:
            break
        step = f / df
        x_new = x - step
        # Keep a step only if it lowers the residual; near double roots
        # Newton can wander.
        f_new = ((x_new + b) * x_new + c) * x_new + d
        if abs(f_new) >= abs(f):
            break
        x = x_new
        if abs(step) <= 1e-16 * max(abs(x), 1.0):
            break
    return x


def solve_intracavity(params, Delta, alpha_mag):
    """
    Real roots of the photon-number cubic.

    χ² n³ + 2χΔ n² + (Δ² + κ²/4) n − |α|² = 0, with χ from
    `nonlinear_shift_coefficient`.

    Parameters
    ----------
    params : OmParams
        System parameters.
    Delta : float
        Detuning (rad/s).
    alpha_mag : float
        Drive flux magnitude |α| >= 0.

    Returns
    -------
    list of float
        Ascending roots, length 1 or 3 (a double root appears twice).
    """
    if alpha_mag < 0:
        raise ConfigError(
            f"Parameter 'alpha_mag' must be greater than or equal to 0, "
            f"but is: {alpha_mag}", field="alpha_mag")
    if alpha_mag == 0:
        return [0.0]

    chi = nonlinear_shift_coefficient(params)
    lorentz = Delta**2 + params.kappa**2 / 4
    if chi == 0:
        return [alpha_mag**2 / lorentz]

    # Solve in u = χ n, scaled by s so all coefficients are order one:
    # u³ + 2Δ u² + (Δ² + κ²/4) u − χ|α|² = 0
    drive = chi * alpha_mag**2
    s = max(abs(Delta), params.kappa / 2, drive ** (1 / 3))
    coeffs = (2 * Delta / s, lorentz / s**2, -drive / s**3)
    b, c, d = coeffs

    roots = np.roots([1.0, b, c, d])
    disc = 18 * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * c**3 - 27 * d**2
    if disc >= -ROOT_TOL:
        real = sorted(float(r.real) for r in roots)
    else:
        real = [float(roots[np.argmin(np.abs(roots.imag))].real)]

    nbars = [max(_polish(coeffs, x), 0.0) * s / chi for x in real]
    return sorted(nbars)


def _select_branch(roots, branch):
    """Index of the requested branch."""
    count = len(roots)
    if branch == "lowest":
        return 0
    if branch == "highest":
        return count - 1
    if isinstance(branch, (int, np.integer)) and not isinstance(branch, bool):
        if 0 <= branch < count:
            return int(branch)
        raise BranchIndexError(
            f"Branch index {branch} is not available; only {count} "
            f"root(s) at this point", branch_count=count)
    raise ConfigError(
        f"Parameter 'branch' must be 'lowest', 'highest' or an integer, "
        f"but is: {branch}", field="branch")


def bistability_onset(params, alpha_mag):
    """
    Detuning at which bistability starts, as given by the onset cubic.

    Solves −Δ_b(Δ_b² + 9κ²/4) = 27 g0² Ω |α|² / (Ω² + Γ²/4).

    Parameters
    ----------
    params : OmParams
        System parameters.
    alpha_mag : float
        Drive flux magnitude.

    Returns
    -------
    float
        Δ_b < 0 (rad/s).

    Raises
    ------
    NoBistabilityError
        If g0 = 0 or alpha_mag = 0.
    """
    if params.g0 == 0 or alpha_mag <= 0:
        raise NoBistabilityError(
            "Bistability needs g0 > 0 and a non-zero drive "
            f"(g0={params.g0}, alpha_mag={alpha_mag})")
    kappa = params.kappa
    # δ = Δ/κ: δ³ + (9/4)δ + (27/2)a = 0 with a = χ|α|²/κ³
    a = nonlinear_shift_coefficient(params) * alpha_mag**2 / kappa**3
    roots = np.roots([1.0, 0.0, 9 / 4, 13.5 * a])
    delta = float(roots[np.argmin(np.abs(roots.imag))].real)
    delta = _polish((0.0, 9 / 4, 13.5 * a), delta)
    return delta * kappa


def _window_polynomial(a):
    """
    Quartic in δ = Δ/κ whose negative region is the three-root window.

    The discriminant of the scaled cubic is
    −(δ² + 1/4)² − 4aδ³ − 9aδ − 27a²; this returns its negation.
    """
    return np.array([1.0, 4 * a, 0.5, 9 * a, 1 / 16 + 27 * a**2])


def bistability_window(params, alpha_mag):
    """
    Exact detuning interval with three steady-state roots.

    Parameters
    ----------
    params : OmParams
        System parameters.
    alpha_mag : float
        Drive flux magnitude.

    Returns
    -------
    tuple of float or None
        (Δ_lo, Δ_hi) in rad/s, or None below the cusp drive
        χ|α|² = √3 κ³ / 9.
    """
    if params.g0 == 0 or alpha_mag <= 0:
        return None
    kappa = params.kappa
    a = nonlinear_shift_coefficient(params) * alpha_mag**2 / kappa**3
    poly = _window_polynomial(a)
    roots = np.roots(poly)
    real = sorted(r.real for r in roots
                  if abs(r.imag) <= 1e-6 * max(1.0, abs(r)))
    if len(real) < 2:
        return None
    deriv = np.polyder(poly)
    edges = []
    for x in (real[0], real[-1]):
        for _ in range(NEWTON_ITERATIONS):
            df = np.polyval(deriv, x)
            if df == 0:
                break
            step = np.polyval(poly, x) / df
            if abs(step) > 1e-3 * max(abs(x), 1.0):
                break
            x -= step
            if abs(step) <= 1e-16 * max(abs(x), 1.0):
                break
        edges.append(float(x) * kappa)
    return edges[0], edges[1]


def zeta(params, Delta):
    """
    ζ(Δ) such that the leading coherent phonon term is g0² ζ n̄².
    """
    gamma, Gamma, Omega = params.gamma, params.Gamma, params.Omega
    return (32 * Omega**2 * (gamma**2 + gamma * Gamma + 4 * Delta**2)
            / ((gamma**2 + 4 * Delta**2) * (Gamma**2 + 4 * Omega**2)**2))


def coherent_phonons(params, Delta, nbar):
    """
    Coherent phonon population.

    Parameters
    ----------
    params : OmParams
        System parameters.
    Delta : float
        Detuning (rad/s).
    nbar : float
        Intracavity photon number, >= 0.

    Returns
    -------
    tuple of float
        (m̄_full, m̄_approx). m̄_approx = g0² ζ(Δ) n̄². m̄_full adds the
        detuning term −2ΔΩ/(γ² + 4Δ²) and is floored at 0. It vanishes for
        |Δ| → ∞.

    Notes
    -----
    The direct linear solve gives m̄_approx − ½ − 2ΔΩ/(γ²+4Δ²); the half
    quantum added to it cancels the −½.
    """
    gamma = params.gamma
    approx = params.g0**2 * zeta(params, Delta) * nbar**2
    full = approx - 2 * Delta * params.Omega / (gamma**2 + 4 * Delta**2)
    return max(full, 0.0), approx


def pair_averages_closed(params, Delta, nbar, alpha):
    """
    Closed-form steady ⟨ab⟩ and ⟨ab†⟩.

    Parameters
    ----------
    params : OmParams
        System parameters, g0 > 0.
    Delta : float
        Detuning (rad/s).
    nbar : float
        Intracavity photon number.
    alpha : complex
        Drive amplitude with phase.

    Returns
    -------
    tuple of complex
        (ab, ab*).
    """
    g0, kappa, Gamma = params.g0, params.kappa, params.Gamma
    Omega, gamma = params.Omega, params.gamma
    root_n = math.sqrt(nbar)
    mech = 8 * Gamma * g0**2 * nbar / (Gamma**2 + 4 * Omega**2)
    den = 4 * g0 * (gamma - 2j * Delta)

    ab = (1j * root_n * (g0**2 * (8 * nbar + 4)
                         + (2 * Delta + 1j * kappa)
                         * (2 * (Delta + Omega) + 1j * gamma))
          - 2j * alpha * (mech + gamma - 2j * (Delta + Omega))) / den
    abdag = (2 * alpha * (1j * mech - 1j * gamma - 2 * Delta + 2 * Omega)
             - root_n * (4j * g0**2 * (2 * nbar + 1)
                         + (kappa - 2j * Delta)
                         * (1j * gamma + 2 * Delta - 2 * Omega))) / den
    return complex(ab), complex(abdag)


def pair_averages_linear(params, Delta, nbar, alpha):
    """
    Solve the three averaged equations for (m̄, ⟨ab⟩, ⟨ab†⟩) directly.

    The unknowns are eliminated from the steady ā, âb̂ and âb̂† equations
    with b̄ from the linearised mechanical response. The m̄ obtained keeps
    a small imaginary part.

    Parameters
    ----------
    params : OmParams
        System parameters, g0 > 0 and nbar > 0.
    Delta : float
        Detuning (rad/s).
    nbar : float
        Intracavity photon number.
    alpha : complex
        Drive amplitude with phase.

    Returns
    -------
    tuple of complex
        (m̄_raw, ab, ab*).
    """
    g0, kappa, Omega, gamma = (params.g0, params.kappa, params.Omega,
                               params.gamma)
    abar = math.sqrt(nbar)
    bbar = mechanical_amplitude(params, nbar)
    d2 = -1j * (Omega - Delta) - gamma / 2
    d3 = 1j * (Omega + Delta) - gamma / 2
    A = np.array([
        [0.0, 1j * g0, 1j * g0],
        [1j * g0 * abar, d2, 0.0],
        [1j * g0 * abar, 0.0, d3],
    ], dtype=complex)
    rhs = np.array([
        alpha - (1j * Delta - kappa / 2) * abar,
        bbar * alpha - 1j * g0 * (nbar + 1) * abar,
        np.conj(bbar) * alpha + 1j * g0 * nbar * abar,
    ], dtype=complex)
    mbar, ab, abdag = np.linalg.solve(A, rhs)
    return complex(mbar), complex(ab), complex(abdag)


def mechanical_amplitude(params, nbar):
    """b̄ = i g0 n̄ / (iΩ + Γ/2)."""
    return 1j * params.g0 * nbar / (1j * params.Omega + params.Gamma / 2)


def drive_phase(params, Delta, nbar):
    """
    Complex α consistent with a real ā = sqrt(n̄).

    Re α = −κā/2, Im α = ā(χ n̄ + Δ).
    """
    abar = math.sqrt(nbar)
    chi = nonlinear_shift_coefficient(params)
    return abar * complex(-params.kappa / 2, chi * nbar + Delta)


def _build_state(params, Delta, nbar, mbar=None, branch_count=1,
                 branch_index=0):
    """Fill every SteadyState field from n̄."""
    bbar = mechanical_amplitude(params, nbar)
    alpha = drive_phase(params, Delta, nbar)
    full, approx = coherent_phonons(params, Delta, nbar)
    if mbar is not None:
        full = mbar
    abar = math.sqrt(nbar)

    if params.g0 == 0 or nbar == 0:
        ab, abdag = abar * bbar, abar * np.conj(bbar)
        mbar_raw = complex(full)
    else:
        ab, abdag = pair_averages_closed(params, Delta, nbar, alpha)
        mbar_raw = pair_averages_linear(params, Delta, nbar, alpha)[0]

    return SteadyState(
        Delta=Delta, nbar=nbar, bbar=bbar, alpha=alpha,
        m_th=thermal_occupancy(params.Omega, params.T),
        mbar=full, mbar_approx=approx, mbar_raw=mbar_raw,
        ab_pair=ab, abdag_pair=abdag,
        branch_count=branch_count, branch_index=branch_index)


def steady_state(params, Delta, alpha_mag, branch="lowest"):
    """
    Steady state at a given detuning and drive magnitude.

    Parameters
    ----------
    params : OmParams
        System parameters.
    Delta : float
        Detuning (rad/s).
    alpha_mag : float
        Drive flux magnitude |α|.
    branch : {"lowest", "highest"} or int
        Root of the photon-number cubic to use. Default is the lowest root.

    Returns
    -------
    SteadyState

    Raises
    ------
    BranchIndexError
        If an integer branch is not below the number of roots.
    """
    roots = solve_intracavity(params, Delta, alpha_mag)
    index = _select_branch(roots, branch)
    return _build_state(params, Delta, roots[index],
                        branch_count=len(roots), branch_index=index)


def state_from_nbar(params, Delta, nbar, mbar=None):
    """
    Steady state at a target photon number.

    α is the drive that produces this n̄. Its magnitude follows from the
    cubic and its phase keeps ā real.

    Parameters
    ----------
    params : OmParams
        System parameters.
    Delta : float
        Detuning (rad/s).
    nbar : float
        Target intracavity photon number, >= 0.
    mbar : float, optional
        Coherent phonon population to store instead of the computed one.

    Returns
    -------
    SteadyState
    """
    if nbar < 0:
        raise ConfigError(
            f"Parameter 'nbar' must be greater than or equal to 0, but is: "
            f"{nbar}", field="nbar")
    return _build_state(params, Delta, float(nbar), mbar=mbar)


def cubic_residual(params, Delta, nbar, alpha_mag):
    """
    Relative residual of a photon-number root in its cubic.

    Parameters
    ----------
    params : OmParams
        System parameters.
    Delta : float
        Detuning (rad/s).
    nbar : float
        Candidate root.
    alpha_mag : float
        Drive flux magnitude the root was solved for.

    Returns
    -------
    float
        |n̄(κ²/4 + (χn̄ + Δ)²) − |α|²| / max of the two sides.
    """
    chi = nonlinear_shift_coefficient(params)
    lhs = nbar * (params.kappa**2 / 4 + (chi * nbar + Delta)**2)
    rhs = alpha_mag**2
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale > 0 else 0.0


def mean_field_deviation(ss):
    """
    |⟨ab⟩ − ā b̄| / |ā b̄|.

    Parameters
    ----------
    ss : SteadyState
        State with ā b̄ != 0.

    Returns
    -------
    float
    """
    product = ss.abar * ss.bbar
    return abs(ss.ab_pair - product) / abs(product)
