"""
Coefficient, noise-input and drive matrices for each operator basis.

Each basis turns the quantum Langevin equations into a linear system

    dA/dt = M A + [√Γ] A_in − β (α, α*)ᵀ

for a vector A of operator expectation values. M carries the steady-state
fields; the noise map [√Γ] and drive map β are basis specific.
"""

from enum import Enum
import math

import numpy as np

from .errors import CapabilityError, ConfigError
from .frozen import Frozen


OPTICAL = "optical"
MECHANICAL = "mechanical"


class Formalism(Enum):
    """Operator bases, valued by their canonical tag."""
    LINEAR3 = "Linear3"
    LINEARIZED4 = "Linearized4"
    SECOND_ORDER3 = "SecondOrder3"
    THIRD_ORDER5 = "ThirdOrder5"
    FULL6 = "Full6"
    MINIMAL3 = "Minimal3"

    @classmethod
    def parse(cls, value):
        """
        Accept a Formalism, its tag, or a short alias (lin3, so3, ...).

        Raises
        ------
        ConfigError
            If the value names no basis.
        """
        if isinstance(value, cls):
            return value
        key = str(value).strip()
        lookup = {member.value.lower(): member for member in cls}
        lookup.update(ALIASES)
        try:
            return lookup[key.lower()]
        except KeyError as exc:
            raise ConfigError(
                f"Unknown formalism '{value}'. Use one of "
                f"{sorted(ALIASES)} or {[m.value for m in cls]}",
                field="formalism") from exc

    @property
    def dimension(self):
        """Matrix dimension n."""
        return len(BASIS_LABELS[self])


ALIASES = {
    "lin3": Formalism.LINEAR3,
    "lin4": Formalism.LINEARIZED4,
    "so3": Formalism.SECOND_ORDER3,
    "to5": Formalism.THIRD_ORDER5,
    "full6": Formalism.FULL6,
    "min3": Formalism.MINIMAL3,
}

BASIS_LABELS = {
    Formalism.LINEAR3: ("a", "b", "b†"),
    Formalism.LINEARIZED4: ("δa", "δa†", "δb", "δb†"),
    Formalism.SECOND_ORDER3: ("a", "ab", "ab†"),
    Formalism.THIRD_ORDER5: ("a", "ab", "ab†", "ab²", "ab†²"),
    Formalism.FULL6: ("a", "b", "ab", "ab†", "n", "a²"),
    Formalism.MINIMAL3: ("N", "B", "B†"),
}

# Noise modes available per basis; the first is the default.
NOISE_MODES = {
    Formalism.LINEAR3: ("diag_decay",),
    Formalism.LINEARIZED4: ("diag_decay",),
    Formalism.SECOND_ORDER3: ("zeroth_order", "output_ports"),
    Formalism.THIRD_ORDER5: ("zeroth_order", "diag_decay", "output_ports"),
    Formalism.FULL6: ("zeroth_order",),
    Formalism.MINIMAL3: (),
}

# Noise map used for multiplicative output spectra and |Y₁₁|²
SPECTRUM_NOISE_MODES = {
    Formalism.SECOND_ORDER3: "output_ports",
    Formalism.THIRD_ORDER5: "diag_decay",
}

PHONON_CHOICES = ("coherent", "thermal", "raw")


class CoeffSystem(Frozen):
    """
    One formalism instance.

    Attributes
    ----------
    tag : Formalism
        Operator basis.
    M : np.ndarray
        n x n coefficient matrix (rad/s).
    noise_in : np.ndarray or None
        n x k map from input noises to the state equations.
    noise_mode : str or None
        Which noise map noise_in holds.
    input_kinds : tuple of str
        "optical" or "mechanical" per noise column.
    drive : np.ndarray
        n x 2 map applied to (α, α*).
    drive_printed : bool
        False when the basis has no drive map and `drive` is zero.
    basis_labels : tuple of str
        Operator per row.
    decay_diag : np.ndarray
        Decay rate of each process; Re M[j, j] = −decay_diag[j]/2 when
        s = 0.
    """
    # pylint: disable=too-many-instance-attributes,too-many-arguments
    def __init__(self, *, tag, M, noise_in, noise_mode, input_kinds, drive,
                 drive_printed, decay_diag):
        self.tag = tag
        self.M = np.asarray(M, dtype=complex)
        self.noise_in = (None if noise_in is None
                         else np.asarray(noise_in, dtype=complex))
        self.noise_mode = noise_mode
        self.input_kinds = tuple(input_kinds)
        self.drive = np.asarray(drive, dtype=complex)
        self.drive_printed = drive_printed
        self.basis_labels = BASIS_LABELS[tag]
        self.decay_diag = np.asarray(decay_diag, dtype=float)

    @property
    def dimension(self):
        """Matrix dimension n."""
        return self.M.shape[0]


def _phonon_population(ss, phonons, mbar):
    """The m̄ entering the couplings."""
    if mbar is not None:
        return mbar
    if phonons == "coherent":
        return ss.mbar
    if phonons == "thermal":
        return ss.m_th
    if phonons == "raw":
        return ss.mbar_raw
    raise ConfigError(
        f"Parameter 'phonons' must be one of {PHONON_CHOICES}, but is: "
        f"{phonons}", field="phonons")


def _linear3(params, ss, _mbar, _s):
    g0, kappa, Omega, Gamma = params.g0, params.kappa, params.Omega, \
        params.Gamma
    M = np.array([
        [1j * ss.Delta - kappa / 2, 1j * g0, 1j * g0],
        [0, -1j * Omega - Gamma / 2, 0],
        [0, 0, 1j * Omega - Gamma / 2],
    ])
    return M, (kappa, Gamma, Gamma)


def _linearized4(params, ss, _mbar, _s):
    kappa, Omega, Gamma, Delta = params.kappa, params.Omega, params.Gamma, \
        ss.Delta
    g = params.g0 * ss.abar
    M = np.array([
        [1j * Delta - kappa / 2, 0, 1j * g, 1j * g],
        [0, -1j * Delta - kappa / 2, -1j * g, -1j * g],
        [1j * g, 1j * g, -1j * Omega - Gamma / 2, 0],
        [-1j * g, -1j * g, 0, 1j * Omega - Gamma / 2],
    ])
    return M, (kappa, kappa, Gamma, Gamma)


def _second_order3(params, ss, mbar, s):
    g0, kappa, Omega, gamma = params.g0, params.kappa, params.Omega, \
        params.gamma
    Delta, nbar = ss.Delta, ss.nbar
    # f+ = g0(m̄ + 1) and F = g0 n̄ combine into L+ = g0(m̄ + n̄ + 1)
    l_plus = g0 * (mbar + nbar + 1)
    l_minus = g0 * (mbar - nbar)
    M = np.array([
        [1j * Delta - kappa / 2, 1j * g0, 1j * g0],
        [1j * l_plus, -1j * (Omega - Delta) - gamma / 2 + 1j * s, 0],
        [1j * l_minus, 0, 1j * (Omega + Delta) - gamma / 2
         + 1j * np.conj(s)],
    ])
    return M, (kappa, gamma, gamma)


def _third_order5(params, ss, mbar, _s):
    g0, kappa, Omega = params.g0, params.kappa, params.Omega
    gamma, theta = params.gamma, params.theta
    Delta, nbar = ss.Delta, ss.nbar
    M = np.array([
        [1j * Delta - kappa / 2, 1j * g0, 1j * g0, 0, 0],
        [1j * g0 * (mbar + nbar + 1), -1j * (Omega - Delta) - gamma / 2,
         0, 1j * g0, 0],
        [1j * g0 * (mbar - nbar), 0, 1j * (Omega + Delta) - gamma / 2,
         0, 1j * g0],
        [0, 1j * g0 * (mbar + 2 * nbar + 2), 0,
         -1j * (2 * Omega - Delta) - theta / 2, 0],
        [0, 0, 1j * g0 * (mbar - 2 * nbar - 1), 0,
         1j * (2 * Omega + Delta) - theta / 2],
    ])
    return M, (kappa, gamma, gamma, theta, theta)


def _full6(params, ss, mbar, s):
    g0, kappa, Omega, Gamma, gamma = (params.g0, params.kappa, params.Omega,
                                      params.Gamma, params.gamma)
    Delta, nbar = ss.Delta, ss.nbar
    g = g0 * ss.abar
    M = np.zeros((6, 6), dtype=complex)
    M[0, 0] = 1j * Delta - kappa / 2
    M[0, 2] = M[0, 3] = 1j * g0
    M[1, 1] = -(1j * Omega + Gamma / 2)
    M[1, 4] = 1j * g0
    M[2, 0] = 1j * g0 * (mbar + nbar + 1)
    M[2, 2] = -1j * (Omega - Delta - s) - gamma / 2
    M[3, 0] = 1j * g0 * (mbar - nbar)
    M[3, 3] = 1j * (Omega + Delta + np.conj(s)) - gamma / 2
    M[4, 4] = -kappa
    M[5, 2] = M[5, 3] = 1j * g
    M[5, 5] = 2j * (Delta + 2 * np.real(s)) - kappa
    return M, (kappa, Gamma, gamma, gamma, 2 * kappa, 2 * kappa)


def _minimal3(params, _ss, _mbar, _s):
    g0, kappa, Omega, gamma = params.g0, params.kappa, params.Omega, \
        params.gamma
    M = np.array([
        [-2 * kappa, 0, 0],
        [1j * g0, -1j * Omega - gamma / 2, 0],
        [1j * g0, 0, 1j * Omega - gamma / 2],
    ])
    return M, (4 * kappa, gamma, gamma)


BUILDERS = {
    Formalism.LINEAR3: _linear3,
    Formalism.LINEARIZED4: _linearized4,
    Formalism.SECOND_ORDER3: _second_order3,
    Formalism.THIRD_ORDER5: _third_order5,
    Formalism.FULL6: _full6,
    Formalism.MINIMAL3: _minimal3,
}


def noise_matrix(tag, params, ss, mode="zeroth_order", mbar=None):
    """
    Map from input noise operators to the state equations.

    Parameters
    ----------
    tag : Formalism or str
        Operator basis.
    params : OmParams
        System parameters.
    ss : SteadyState
        Steady state supplying b̄, n̄ and m̄.
    mode : {"zeroth_order", "diag_decay", "output_ports"}
        Which map to build.
    mbar : float, optional
        Phonon population override (defaults to ss.mbar).

    Returns
    -------
    tuple
        (matrix, input_kinds).

    Raises
    ------
    CapabilityError
        If the mode is not available for the basis.
    """
    tag = Formalism.parse(tag)
    if mode not in NOISE_MODES[tag]:
        raise CapabilityError(
            f"Noise mode '{mode}' is not available for {tag.value}; "
            f"available: {list(NOISE_MODES[tag]) or 'none'}")

    kappa, Gamma, gamma, theta = (params.kappa, params.Gamma, params.gamma,
                                  params.theta)
    m = max(float(np.real(ss.mbar if mbar is None else mbar)), 0.0)
    mech = math.sqrt(Gamma * ss.nbar)
    bbar = ss.bbar
    sk = math.sqrt(kappa)

    if mode == "diag_decay":
        return (np.diag(np.sqrt(np.array(_decays_for_ports(tag, params)))),
                _kinds(tag, mode))
    if mode == "output_ports":
        ports = [math.sqrt(2 * params.kappa_ex), math.sqrt(gamma / 2),
                 math.sqrt(gamma / 2)]
        if tag is Formalism.THIRD_ORDER5:
            ports += [math.sqrt(theta / 2), math.sqrt(theta / 2)]
        return np.diag(ports).astype(complex), _kinds(tag, mode)

    if tag is Formalism.SECOND_ORDER3:
        P = np.array([
            [sk, 0, 0],
            [sk * bbar, mech, 0],
            [sk * np.conj(bbar), 0, mech],
        ], dtype=complex)
    elif tag is Formalism.THIRD_ORDER5:
        half = math.sqrt(kappa * m / 2)
        mech2 = math.sqrt(Gamma * ss.nbar * m)
        P = np.array([
            [sk, 0, 0],
            [half, mech, 0],
            [half, 0, mech],
            [0.5 * sk * m, mech2, 0],
            [0.5 * sk * m, 0, mech2],
        ], dtype=complex)
    else:
        # Inputs (a_in, a_in†, b_in, b_in†); K = n̄κ
        root_k = math.sqrt(ss.nbar * kappa)
        P = np.array([
            [sk, 0, 0, 0],
            [0, 0, math.sqrt(Gamma), 0],
            [sk * bbar, 0, mech, 0],
            [sk * np.conj(bbar), 0, 0, mech],
            [root_k, root_k, 0, 0],
            [root_k, 0, 0, 0],
        ], dtype=complex)
    return P, _kinds(tag, mode)


def _decays_for_ports(tag, params):
    """Diagonal decay rates used by the diag_decay noise map."""
    if tag is Formalism.LINEAR3:
        return (params.kappa, params.Gamma, params.Gamma)
    if tag is Formalism.LINEARIZED4:
        return (params.kappa, params.kappa, params.Gamma, params.Gamma)
    return (params.kappa, params.gamma, params.gamma, params.theta,
            params.theta)


def _kinds(tag, mode):
    """Optical/mechanical kind of each noise column."""
    if tag in (Formalism.LINEARIZED4, Formalism.FULL6):
        return (OPTICAL, OPTICAL, MECHANICAL, MECHANICAL)
    if mode in ("diag_decay", "output_ports") and \
            tag is Formalism.THIRD_ORDER5:
        return (OPTICAL,) + (MECHANICAL,) * 4
    return (OPTICAL, MECHANICAL, MECHANICAL)


def drive_matrix(tag, ss):
    """
    Map β applied to (α, α*).

    Parameters
    ----------
    tag : Formalism or str
        Operator basis.
    ss : SteadyState
        Steady state supplying b̄ and n̄.

    Returns
    -------
    tuple
        (beta, printed). For bases without a drive map, beta is zero and
        printed is False.
    """
    tag = Formalism.parse(tag)
    n = tag.dimension
    beta = np.zeros((n, 2), dtype=complex)
    bbar, bconj = ss.bbar, np.conj(ss.bbar)
    root_n = ss.abar

    if tag is Formalism.SECOND_ORDER3:
        beta[:, 0] = (1, bbar, bconj)
    elif tag is Formalism.THIRD_ORDER5:
        beta[:, 0] = (1, bbar, bconj, bbar**2, bconj**2)
    elif tag is Formalism.FULL6:
        beta[:, 0] = (1, 0, bbar, bconj, root_n, root_n)
        beta[4, 1] = root_n
    elif tag is Formalism.MINIMAL3:
        nbar = ss.nbar
        beta[0, :] = 2 * nbar * root_n
        beta[1, :] = root_n * bbar / 2
        beta[2, :] = root_n * bconj / 2
    else:
        return beta, False
    return beta, True


def build_system(tag, params, ss, include_s=True, mbar=None,
                 phonons="coherent", noise_mode=None):
    """
    Assemble the coefficient system of one basis at a steady state.

    Parameters
    ----------
    tag : Formalism or str
        Operator basis.
    params : OmParams
        System parameters.
    ss : SteadyState
        Steady state whose fields are substituted.
    include_s : bool
        Keep s = g0 b̄ on the diagonal (SecondOrder3, Full6). Default True.
    mbar : float or complex, optional
        Phonon population override.
    phonons : {"coherent", "thermal", "raw"}
        Which stored population to use when mbar is not given.
    noise_mode : str, optional
        Noise map to attach; defaults to the first mode of the basis.

    Returns
    -------
    CoeffSystem
    """
    tag = Formalism.parse(tag)
    population = _phonon_population(ss, phonons, mbar)
    s = params.g0 * ss.bbar if include_s else 0.0
    M, decays = BUILDERS[tag](params, ss, population, s)

    modes = NOISE_MODES[tag]
    if noise_mode is None:
        noise_mode = modes[0] if modes else None
    if noise_mode is None:
        noise_in, kinds = None, ()
    else:
        noise_in, kinds = noise_matrix(tag, params, ss, noise_mode,
                                       mbar=population)
    beta, printed = drive_matrix(tag, ss)

    return CoeffSystem(tag=tag, M=M, noise_in=noise_in,
                       noise_mode=noise_mode, input_kinds=kinds,
                       drive=beta, drive_printed=printed,
                       decay_diag=decays)


def full6_mask():
    """
    Boolean mask of the entries of the Full6 matrix that are allowed to be
    non-zero.
    """
    mask = np.zeros((6, 6), dtype=bool)
    for row, col in [(0, 0), (0, 2), (0, 3), (1, 1), (1, 4), (2, 0),
                     (2, 2), (3, 0), (3, 3), (4, 4), (5, 2), (5, 3),
                     (5, 5)]:
        mask[row, col] = True
    return mask
