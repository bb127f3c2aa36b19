"""
Calculation log.

Operations that make an interpretive choice (which phonon population enters
the couplings, which bins of a spectrum lie in an unstable band, which
regime a heuristic assumes) report it here. Nothing is logged unless the
caller asks for a console or a file.
"""

import logging
import os
from pprint import pformat
import time

from rich.console import Console
from rich.logging import RichHandler


# Builtins that are printed as they are when sanitising
PLAIN_TYPES = (int, float, complex, bool, str, list, dict, tuple, set,
               type(None))


def default_log_path():
    """Timestamped file name in the working directory."""
    return f"omx_{time.strftime('%Y-%m-%d_%H-%M-%S')}.log"


def check_log_path(file_path):
    """
    Reject a log path that cannot be written as a `.log` file.

    Parameters
    ----------
    file_path : str
        Requested log file.

    Raises
    ------
    ValueError
        If the parent directory is missing or the suffix is not ".log".
    """
    if not file_path.endswith(".log"):
        raise ValueError(
            f"Parameter 'file_path' must end with '.log', but is: {file_path}")
    parent = os.path.dirname(file_path)
    if parent and not os.path.isdir(parent):
        raise ValueError(
            f"Parameter 'file_path' must be in an existing directory, but "
            f"'{parent}' does not exist")


class OmLogger:
    """
    Console and/or file log of calculation events.

    Attributes
    ----------
    log_to_console : boolean
        Print messages through rich.
    log_to_file : boolean
        Write messages to `file_path` (overwritten on start).
    file_path : str
        Log file, ending in ".log".
    sanitise : boolean
        Show custom objects in logged dicts as "<module.Class>".
    logger : logging.Logger or None
        Underlying logger; None while disabled.
    """
    def __init__(self, log_to_console=False, log_to_file=False,
                 file_path=None, sanitise=False):
        self.log_to_console = log_to_console
        self.log_to_file = log_to_file
        self.file_path = file_path if file_path else default_log_path()
        self.sanitise = sanitise
        self.logger = None

        if log_to_file:
            check_log_path(self.file_path)
        if self.enabled:
            self.logger = logging.getLogger(__name__)
            self._attach_handlers()

    @property
    def enabled(self):
        """True if messages go anywhere."""
        return self.log_to_console or self.log_to_file

    def _attach_handlers(self):
        """Replace any previous handlers by this logger's outputs."""
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)
            handler.close()

        handlers = []
        if self.log_to_console:
            console = Console()
            console.is_jupyter = False
            handlers.append(RichHandler(console=console, show_time=False,
                                        show_level=False, show_path=False))
        if self.log_to_file:
            handlers.append(logging.FileHandler(self.file_path, mode="w",
                                                encoding="utf-8"))

        plain = logging.Formatter("%(message)s")
        for handler in handlers:
            handler.setFormatter(plain)
            self.logger.addHandler(handler)
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False

    @staticmethod
    def sanitise_object(obj):
        """
        "<module.Class>" for custom objects, the object itself otherwise.
        """
        if isinstance(obj, PLAIN_TYPES):
            return obj
        return f"<{type(obj).__module__}.{type(obj).__name__}>"

    def log(self, msg, sweep_point=None):
        """
        Record a message.

        Parameters
        ----------
        msg : str or dict
            Text, or a dict that is pretty-printed.
        sweep_point : str, optional
            Label of the grid point the message belongs to, e.g.
            "Delta=-1.0e9"; written before the message.
        """
        if not self.enabled:
            return
        if isinstance(msg, dict):
            if self.sanitise:
                msg = {key: self.sanitise_object(value)
                       for key, value in msg.items()}
            msg = pformat(msg, indent=4)
        if sweep_point is None:
            self.logger.info(msg)
        else:
            self.logger.info("%s: %s", sweep_point, msg)


def resolve_logger(logger):
    """
    Return `logger`, or a disabled OmLogger when None is given.

    Parameters
    ----------
    logger : OmLogger or None
        Logger supplied by the caller.

    Returns
    -------
    OmLogger
    """
    return logger if logger is not None else OmLogger()
