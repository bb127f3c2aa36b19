"""
Physical parameters of one optomechanical system.

Configuration files give values as printed in parameter tables (frequencies
in cycles/s, optical and mechanical quality factors). Everything is converted
on parse to angular rates in rad/s, which every formula in the package uses.
"""

import json
import math
import os

import numpy as np
from scipy import constants

from .configdict import CONFIG_KEYS, ConfigDict
from .errors import ConfigError
from .frozen import Frozen


# Single-photon cooperativity C0 = factor * g0^2 / (kappa * Gamma)
TABLE_C0_FACTOR = 4.0
MAIN_TEXT_C0_FACTOR = 1.0
C0_CONVENTIONS = {"table": TABLE_C0_FACTOR, "main_text": MAIN_TEXT_C0_FACTOR}

FIXTURE_FILE = os.path.normpath(
    os.path.join(os.path.dirname(os.path.abspath(__file__)),
                 "../inputs/fixtures.json"))


class PhysConstants(Frozen):
    """
    Physical constants (SI).

    ħ, k_B and c are exact in the 2019 SI, so CODATA 2018 and later
    adjustments agree on every digit.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant, 1.054571817e-34 J s.
    kB : float
        Boltzmann constant, 1.380649e-23 J/K.
    c : float
        Speed of light in vacuum, 299792458 m/s.
    """
    def __init__(self):
        self.hbar = constants.hbar
        self.kB = constants.k
        self.c = constants.c


PHYS = PhysConstants()


class OmParams(Frozen):
    """
    Rates and derived quantities of one optomechanical system.

    All frequencies are angular (rad/s). γ = κ + Γ and θ = κ + 2Γ are
    recomputed on access and never stored.

    Attributes
    ----------
    g0 : float
        Single-photon optomechanical rate.
    Omega : float
        Mechanical resonance frequency Ω.
    kappa : float
        Optical decay rate κ.
    Gamma : float
        Mechanical decay rate Γ.
    eta : float
        Coupling efficiency η in [0, 1].
    kappa_ex : float
        External coupling rate η·κ.
    lambda_opt : float
        Optical wavelength (m).
    omega_c : float
        Optical carrier 2πc/λ.
    T : float
        Temperature (K).
    P_op : float
        Incident optical power (W).
    """
    # pylint: disable=too-many-arguments,too-many-positional-arguments
    def __init__(self, g0, Omega, kappa, Gamma, eta=1.0, lambda_opt=1e-6,
                 T=0.0, P_op=0.0):
        self.g0 = float(g0)
        self.Omega = float(Omega)
        self.kappa = float(kappa)
        self.Gamma = float(Gamma)
        self.eta = float(eta)
        self.lambda_opt = float(lambda_opt)
        self.T = float(T)
        self.P_op = float(P_op)
        self.check_param_validity()
        self.kappa_ex = self.eta * self.kappa
        self.omega_c = 2 * math.pi * PHYS.c / self.lambda_opt

    @property
    def gamma(self):
        """Total decay of the one-photon one-phonon processes, κ + Γ."""
        return self.kappa + self.Gamma

    @property
    def theta(self):
        """Decay of the one-photon two-phonon processes, κ + 2Γ."""
        return self.kappa + 2 * self.Gamma

    def check_param_validity(self):
        """
        Check rates and physical inputs.

        Raises
        ------
        ConfigError
            If any parameter fails validation.
        """
        for param in ["Omega", "kappa", "Gamma", "lambda_opt"]:
            self.validate_param(
                param, lambda x: math.isfinite(x) and x > 0,
                "must be finite and greater than 0")
        for param in ["g0", "T", "P_op"]:
            self.validate_param(
                param, lambda x: math.isfinite(x) and x >= 0,
                "must be finite and greater than or equal to 0")
        self.validate_param(
            "eta", lambda x: 0 <= x <= 1, "must be between 0 and 1")

    def validate_param(self, param_name, condition, error_msg):
        """
        Validate a single parameter against a condition.

        Parameters
        ----------
        param_name: str
            Name of the parameter being validated.
        condition: callable
            A function that returns True if the value is valid.
        error_msg: str
            Error message to display if validation fails.

        Raises
        ------
        ConfigError
            If the parameter fails the validation condition.
        """
        value = getattr(self, param_name)
        if not condition(value):
            raise ConfigError(
                f"Parameter '{param_name}' {error_msg}, but is: {value}",
                field=param_name)

    def replace(self, **changes):
        """
        Return a validated copy with some fields changed.

        Parameters
        ----------
        **changes
            Any of g0, Omega, kappa, Gamma, eta, lambda_opt, T, P_op.

        Returns
        -------
        OmParams
        """
        fields = {key: getattr(self, key) for key in
                  ("g0", "Omega", "kappa", "Gamma", "eta", "lambda_opt",
                   "T", "P_op")}
        unknown = set(changes) - set(fields)
        if unknown:
            raise ConfigError(
                f"Unknown OmParams field '{sorted(unknown)[0]}'",
                field=sorted(unknown)[0])
        fields.update(changes)
        return OmParams(**fields)

    def as_dict(self):
        """Angular rates and derived values, for manifests and logs."""
        return {"g0": self.g0, "Omega": self.Omega, "kappa": self.kappa,
                "Gamma": self.Gamma, "gamma": self.gamma,
                "theta": self.theta, "kappa_ex": self.kappa_ex,
                "eta": self.eta, "omega_c": self.omega_c,
                "lambda_opt": self.lambda_opt, "T": self.T,
                "P_op": self.P_op}


def parse_config(raw):
    """
    Validate a raw configuration mapping.

    Parameters
    ----------
    raw : mapping
        Flat mapping with exactly the keys in CONFIG_KEYS.

    Returns
    -------
    ConfigDict
        Keys locked, values converted to float.

    Raises
    ------
    ConfigError
        Unknown or missing key, non-numeric value, or value out of range.
    """
    config = ConfigDict(raw)
    for key in CONFIG_KEYS:
        try:
            config[key] = float(config[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                f"Parameter '{key}' must be a number, but is: {config[key]}",
                field=key) from exc

    checks = [
        ("g0_hz", lambda x: math.isfinite(x) and x >= 0,
         "must be finite and greater than or equal to 0"),
        ("omega_m_hz", lambda x: math.isfinite(x) and x > 0,
         "must be finite and greater than 0"),
        ("lambda_m", lambda x: math.isfinite(x) and x > 0,
         "must be finite and greater than 0"),
        ("q_opt", lambda x: math.isfinite(x) and x >= 1,
         "must be finite and at least 1"),
        ("q_mech", lambda x: math.isfinite(x) and x >= 1,
         "must be finite and at least 1"),
        ("eta", lambda x: 0 <= x <= 1, "must be between 0 and 1"),
        ("temp_k", lambda x: math.isfinite(x) and x >= 0,
         "must be finite and greater than or equal to 0"),
        ("power_w", lambda x: math.isfinite(x) and x >= 0,
         "must be finite and greater than or equal to 0"),
    ]
    for key, condition, msg in checks:
        if not condition(config[key]):
            raise ConfigError(
                f"Parameter '{key}' {msg}, but is: {config[key]}", field=key)
    return config


def derive_rates(raw):
    """
    Convert a raw configuration into angular rates.

    Parameters
    ----------
    raw : mapping
        Configuration as accepted by `parse_config`.

    Returns
    -------
    OmParams
        κ = ω_c/Q, Γ = Ω/Q_m, and 2π times every cycles/s input.
    """
    config = parse_config(raw)
    omega_c = 2 * math.pi * PHYS.c / config["lambda_m"]
    omega_m = 2 * math.pi * config["omega_m_hz"]
    return OmParams(
        g0=2 * math.pi * config["g0_hz"],
        Omega=omega_m,
        kappa=omega_c / config["q_opt"],
        Gamma=omega_m / config["q_mech"],
        eta=config["eta"],
        lambda_opt=config["lambda_m"],
        T=config["temp_k"],
        P_op=config["power_w"])


def serialize_config(params):
    """
    Invert `derive_rates`.

    Parameters
    ----------
    params : OmParams
        System parameters.

    Returns
    -------
    dict
        Flat mapping with the keys in CONFIG_KEYS.
    """
    return {
        "g0_hz": params.g0 / (2 * math.pi),
        "omega_m_hz": params.Omega / (2 * math.pi),
        "q_opt": params.omega_c / params.kappa,
        "q_mech": params.Omega / params.Gamma,
        "lambda_m": params.lambda_opt,
        "eta": params.eta,
        "temp_k": params.T,
        "power_w": params.P_op,
    }


def load_config(path):
    """
    Read a flat JSON configuration file.

    Parameters
    ----------
    path : str
        Path to the JSON file.

    Returns
    -------
    ConfigDict
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as exc:
        raise ConfigError(f"Cannot read config file '{path}': {exc}",
                          field="config") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Config file '{path}' is not valid JSON: {exc}",
                          field="config") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"Config file '{path}' must hold a JSON object",
                          field="config")
    return parse_config(raw)


def _read_fixtures(fixture_file=None):
    """Load the fixture file as a dict."""
    fixture_file = FIXTURE_FILE if fixture_file is None else fixture_file
    with open(fixture_file, "r", encoding="utf-8") as f:
        return json.load(f)


def list_fixtures(fixture_file=None):
    """
    Named fixture systems.

    Returns
    -------
    dict
        Fixture name mapped to its description.
    """
    return {name: entry["description"]
            for name, entry in _read_fixtures(fixture_file).items()}


def load_fixture(name, fixture_file=None):
    """
    Raw configuration of a named fixture.

    Parameters
    ----------
    name : str
        Fixture name (e.g. "A", "polaron").
    fixture_file : str, optional
        Alternative fixture file.

    Returns
    -------
    ConfigDict
    """
    fixtures = _read_fixtures(fixture_file)
    if name not in fixtures:
        raise ConfigError(
            f"Unknown fixture '{name}'. Available: {sorted(fixtures)}",
            field="fixture")
    return parse_config(fixtures[name]["params"])


def params_from_fixture(name):
    """Shortcut for `derive_rates(load_fixture(name))`."""
    return derive_rates(load_fixture(name))


def thermal_occupancy(Omega, T):
    """
    Bose-Einstein occupancy of a mechanical mode.

    Parameters
    ----------
    Omega : float
        Mechanical angular frequency (rad/s), > 0.
    T : float
        Temperature (K), >= 0.

    Returns
    -------
    float
        m = 1/(exp(ħΩ/k_BT) - 1); exactly 0 at T = 0.
    """
    if T == 0:
        return 0.0
    x = PHYS.hbar * Omega / (PHYS.kB * T)
    with np.errstate(over="ignore"):
        return float(1.0 / np.expm1(x))


def drive_amplitude(params):
    """
    Magnitude of the input photon flux amplitude.

    Parameters
    ----------
    params : OmParams
        System parameters.

    Returns
    -------
    float
        |α| = sqrt(η κ P / (ħ ω_c)) in s^(-1/2).
    """
    return math.sqrt(params.eta * params.kappa * params.P_op
                     / (PHYS.hbar * params.omega_c))


def cooperativity(params, nbar, convention="table"):
    """
    Single- and multi-photon cooperativity.

    Parameters
    ----------
    params : OmParams
        System parameters.
    nbar : float
        Intracavity photon number, >= 0.
    convention : {"table", "main_text"}
        "table" gives C0 = 4 g0^2/(κΓ); "main_text" gives g0^2/(κΓ).

    Returns
    -------
    tuple of float
        (C0, C) with C = nbar * C0.
    """
    if convention not in C0_CONVENTIONS:
        raise ConfigError(
            f"Unknown cooperativity convention '{convention}'. "
            f"Use one of {sorted(C0_CONVENTIONS)}", field="convention")
    c0 = (C0_CONVENTIONS[convention] * params.g0**2
          / (params.kappa * params.Gamma))
    return c0, nbar * c0
