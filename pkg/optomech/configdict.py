"""
Dictionary holding a raw system configuration, with its set of keys locked
to the recognised configuration fields.
"""

from collections import UserDict

from .errors import ConfigError


CONFIG_KEYS = ("g0_hz", "omega_m_hz", "q_opt", "q_mech",
               "lambda_m", "eta", "temp_k", "power_w")


class ConfigDict(UserDict):
    """
    Raw configuration with exactly the keys in CONFIG_KEYS.

    Values are given as printed in parameter tables: frequencies in
    cycles/s, quality factors, wavelength in metres, temperature in kelvin
    and power in watts.

    Attributes
    ----------
    _locked_keys : frozenset
        The recognised configuration fields.
    _locked_keys_initialised : bool
        True once __init__ has completed. Key checks are skipped before this
        point, as joblib may call __setitem__ while unpickling before other
        attributes are restored.
    """
    def __init__(self, *args, **kwargs):
        """
        Initialise the ConfigDict.

        Parameters
        ----------
        *args, **kwargs : any
            Arguments passed to dict for initialisation.

        Raises
        ------
        ConfigError
            If a key is missing or unknown.
        """
        self._locked_keys_initialised = False
        self._locked_keys = frozenset(CONFIG_KEYS)
        super().__init__(*args, **kwargs)

        unknown = sorted(set(self.data) - self._locked_keys)
        if unknown:
            raise ConfigError(
                f"Unknown configuration key '{unknown[0]}'. Allowed keys "
                f"are: {list(CONFIG_KEYS)}", field=unknown[0])
        missing = [key for key in CONFIG_KEYS if key not in self.data]
        if missing:
            raise ConfigError(
                f"Missing configuration key '{missing[0]}'",
                field=missing[0])
        self._locked_keys_initialised = True

    def __setattr__(self, name, value):
        """
        Only allow private attributes and "data", so that `cfg.eta = 1`
        fails loudly instead of silently creating an attribute.
        """
        if name.startswith("_") or name == "data":
            super().__setattr__(name, value)
        else:
            raise AttributeError(
                f"Cannot set attribute '{name}'. "
                f"Use item syntax: cfg['{name}'] = value")

    def __setitem__(self, key, value):
        """
        Restrict assignment to recognised configuration keys.

        Raises
        ------
        ConfigError
            If key is not one of CONFIG_KEYS.
        """
        if getattr(self, "_locked_keys_initialised", False):
            if key not in self._locked_keys:
                raise ConfigError(
                    f"Attempted to set unknown configuration key '{key}'. "
                    f"Allowed keys are: {list(CONFIG_KEYS)}", field=key)
        super().__setitem__(key, value)

    def __delitem__(self, key):
        """
        Prevent deletion of configuration keys.

        Raises
        ------
        ConfigError
            Always.
        """
        raise ConfigError(
            f"Deletion of configuration key '{key}' is not allowed",
            field=key)
