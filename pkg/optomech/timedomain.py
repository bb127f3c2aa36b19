"""
Deterministic time evolution of the expectation values under a pulsed
drive, and the closed-form dynamics of the minimal basis.

With the noise inputs at their zero means, each basis obeys

    dA/dt = M(t) A − β(t) (α(t), α*(t))ᵀ

where M(t) and β(t) are rebuilt from the steady state belonging to the
momentary drive |α(t)|.
"""

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import ConfigError, IntegrationError
from .formalisms import BASIS_LABELS, Formalism, build_system
from .frozen import Frozen
from .logging import resolve_logger
from .steady import mechanical_amplitude, steady_state


CLOSURES = ("self_consistent", "published")
METHODS = ("magnus", "rk45")
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
MIN_STEP_FRACTION = 1e-14


class PulseResult(Frozen):
    """
    Trajectories of the basis expectation values.

    Attributes
    ----------
    times : np.ndarray
        Output times (s).
    trajectories : np.ndarray
        (len(times), n) complex values; column j follows basis_labels[j].
    basis_labels : tuple of str
        Operator per column.
    step_count : int
        Accepted steps.
    max_step_error : float
        Largest local error estimate of an accepted step.
    error_bound : float
        Sum of the local error estimates.
    method : str
        "magnus" or "rk45".
    """
    # pylint: disable=too-many-arguments
    def __init__(self, *, times, trajectories, basis_labels, step_count,
                 max_step_error, error_bound, method):
        self.times = np.asarray(times, dtype=float)
        self.trajectories = np.asarray(trajectories, dtype=complex)
        self.basis_labels = tuple(basis_labels)
        self.step_count = int(step_count)
        self.max_step_error = float(max_step_error)
        self.error_bound = float(error_bound)
        self.method = method


def coefficient_system(tag, params, ss, closure="self_consistent"):
    """
    System used for the dynamics.

    "self_consistent" drops s and uses the complex phonon population of the
    direct solve, so the fixed point is the steady state exactly.
    "published" keeps s and the coherent population.
    """
    if closure == "self_consistent":
        return build_system(tag, params, ss, include_s=False, phonons="raw")
    if closure == "published":
        return build_system(tag, params, ss)
    raise ConfigError(
        f"Parameter 'closure' must be one of {CLOSURES}, but is: {closure}",
        field="closure")


def steady_vector(tag, params, ss, closure="self_consistent"):
    """
    Fixed point of the basis equations at constant drive ss.alpha.

    Returns
    -------
    np.ndarray
        Solution A of M A = β (α, α*)ᵀ.
    """
    sys = coefficient_system(tag, params, ss, closure)
    drive = sys.drive @ np.array([ss.alpha, np.conj(ss.alpha)])
    return np.linalg.solve(sys.M, drive)


def _alpha_function(alpha_of_t, t_grid):
    """Callable α(t), interpolating samples linearly when needed."""
    if callable(alpha_of_t):
        return alpha_of_t
    samples = np.asarray(alpha_of_t, dtype=complex)
    if samples.shape != t_grid.shape:
        raise ConfigError(
            f"Parameter 'alpha_of_t' must have one sample per time point "
            f"({t_grid.size}), but has: {samples.size}", field="alpha_of_t")

    def interpolate(t):
        return complex(np.interp(t, t_grid, samples.real),
                       np.interp(t, t_grid, samples.imag))
    return interpolate


class _Momentary:
    """Cache of (M, β) per drive value."""
    def __init__(self, tag, params, Delta, closure):
        self.tag = tag
        self.params = params
        self.Delta = Delta
        self.closure = closure
        self.cache = {}

    def __call__(self, alpha):
        alpha = complex(alpha)
        magnitude = abs(alpha)
        if magnitude not in self.cache:
            ss = steady_state(self.params, self.Delta, magnitude)
            sys = coefficient_system(self.tag, self.params, ss, self.closure)
            self.cache[magnitude] = (sys.M, sys.drive)
        M, beta = self.cache[magnitude]
        return M, -beta @ np.array([alpha, np.conj(alpha)])


def _magnus_step(momentary, alpha, y, t, h):
    """One midpoint Magnus step of the affine system."""
    M, u = momentary(alpha(t + h / 2))
    n = len(y)
    augmented = np.zeros((n + 1, n + 1), dtype=complex)
    augmented[:n, :n] = M
    augmented[:n, n] = u
    return (expm(augmented * h) @ np.append(y, 1.0))[:n]


def _evolve_magnus(momentary, alpha, t_grid, y0, rtol):
    """Step-doubling Magnus integration hitting every grid point."""
    out = np.empty((t_grid.size, y0.size), dtype=complex)
    out[0] = y0
    y = y0.copy()
    span = t_grid[-1] - t_grid[0]
    h = span
    steps, worst, total = 0, 0.0, 0.0

    for k in range(1, t_grid.size):
        t, t_next = t_grid[k - 1], t_grid[k]
        while t < t_next:
            h = min(h, t_next - t)
            if h <= MIN_STEP_FRACTION * max(abs(t), span):
                raise IntegrationError("Step size underflow", time=t)
            full = _magnus_step(momentary, alpha, y, t, h)
            half = _magnus_step(momentary, alpha, y, t, h / 2)
            half = _magnus_step(momentary, alpha, half, t + h / 2, h / 2)

            estimate = np.linalg.norm(half - full) / 3
            tol = rtol * max(np.linalg.norm(half), np.linalg.norm(y))
            ratio = estimate / tol if tol > 0 else estimate / rtol
            factor = (MAX_FACTOR if ratio == 0
                      else min(MAX_FACTOR,
                               max(MIN_FACTOR, SAFETY * ratio**(-1 / 3))))
            if ratio <= 1:
                t = t_next if h == t_next - t else t + h
                y = half
                steps += 1
                worst = max(worst, estimate)
                total += estimate
            h *= factor
        out[k] = y
    return out, steps, worst, total


def _evolve_rk45(momentary, alpha, t_grid, y0, rtol):
    """Reference integration with the embedded 4(5) pair."""
    def rhs(t, y):
        M, u = momentary(alpha(t))
        return M @ y + u

    scale = max(np.linalg.norm(y0), 1.0)
    sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), y0.astype(complex),
                    method="RK45", t_eval=t_grid, rtol=rtol,
                    atol=rtol * scale)
    if not sol.success:
        raise IntegrationError(sol.message, time=float(sol.t[-1]))
    # RK45 makes six right-hand side evaluations per step
    return sol.y.T, int(sol.nfev // 6), 0.0, 0.0


def evolve_pulsed(params, alpha_of_t, formalism, t_grid,
                  closure="self_consistent", method="magnus", initial=None,
                  rtol=1e-9, Delta=0.0, logger=None):
    """
    Integrate the basis expectation values under a time-dependent drive.

    Parameters
    ----------
    params : OmParams
        System parameters; Ω and Γ stay at their bare values.
    alpha_of_t : callable or array-like
        Complex drive α(t), or samples on t_grid (linearly interpolated).
    formalism : Formalism or str
        Operator basis.
    t_grid : array-like
        Increasing output times (s); the first is the initial time.
    closure : {"self_consistent", "published"}
        How M is closed, see `coefficient_system`.
    method : {"magnus", "rk45"}
        Midpoint Magnus with step doubling, or scipy's RK45.
    initial : array-like, optional
        A at the first time; zeros by default.
    rtol : float
        Relative tolerance per step.
    Delta : float
        Detuning (rad/s).
    logger : OmLogger, optional
        Receives the step statistics.

    Returns
    -------
    PulseResult

    Raises
    ------
    IntegrationError
        If the step size underflows.
    """
    tag = Formalism.parse(formalism)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ConfigError(
            "Parameter 't_grid' must hold at least two increasing times",
            field="t_grid")
    if method not in METHODS:
        raise ConfigError(
            f"Parameter 'method' must be one of {METHODS}, but is: {method}",
            field="method")
    alpha = _alpha_function(alpha_of_t, t_grid)
    momentary = _Momentary(tag, params, Delta, closure)

    n = tag.dimension
    y0 = (np.zeros(n, dtype=complex) if initial is None
          else np.asarray(initial, dtype=complex))
    if y0.shape != (n,):
        raise ConfigError(
            f"Parameter 'initial' must have {n} entries, but has: {y0.size}",
            field="initial")

    if method == "magnus":
        out, steps, worst, total = _evolve_magnus(momentary, alpha, t_grid,
                                                  y0, rtol)
    else:
        out, steps, worst, total = _evolve_rk45(momentary, alpha, t_grid, y0,
                                                rtol)
    resolve_logger(logger).log(
        f"Pulsed evolution ({tag.value}, {method}, {closure}): {steps} "
        f"steps, max local error {worst:.3e}")
    return PulseResult(times=t_grid, trajectories=out,
                       basis_labels=BASIS_LABELS[tag],
                       step_count=steps, max_step_error=worst,
                       error_bound=total, method=method)


def minimal_dynamics(params, alpha, t_grid, Delta=0.0, initial=(0.0, 0.0)):
    """
    Closed-form expectation dynamics of the minimal basis at constant drive.

    N relaxes as N∞ + (N0 − N∞)e^(−2κt) and B as
    B∞ + (B0 − B∞ − K)e^(−ϑt) + Ke^(−2κt), with N∞ = n̄², B∞ = n̄b̄,
    ϑ = iΩ + γ/2 and K = ig0(N0 − N∞)/(ϑ − 2κ).

    Parameters
    ----------
    params : OmParams
        System parameters.
    alpha : complex
        Constant drive.
    t_grid : array-like
        Times (s); t is measured from t_grid[0].
    Delta : float
        Detuning (rad/s).
    initial : tuple of complex
        (N0, B0).

    Returns
    -------
    tuple of np.ndarray
        (N(t), B(t)).
    """
    t = np.asarray(t_grid, dtype=float)
    t = t - t[0]
    nbar = steady_state(params, Delta, abs(alpha)).nbar
    n_inf = nbar**2
    b_inf = nbar * mechanical_amplitude(params, nbar)
    n0, b0 = (complex(v) for v in initial)
    theta = 1j * params.Omega + params.gamma / 2
    coupling = 1j * params.g0 * (n0 - n_inf) / (theta - 2 * params.kappa)
    decay = np.exp(-2 * params.kappa * t)
    N = n_inf + (n0 - n_inf) * decay
    B = b_inf + (b0 - b_inf - coupling) * np.exp(-theta * t) \
        + coupling * decay
    return N, B
