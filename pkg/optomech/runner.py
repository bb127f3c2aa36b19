"""
Run a calculation over every point of a sweep, in sequence or in parallel.
"""

import os

from joblib import Parallel, delayed, cpu_count
import pandas as pd

from .errors import ConfigError
from .logging import resolve_logger


THREADS_ENV = "OMX_THREADS"


def resolve_threads(threads=None):
    """
    Number of worker processes to use.

    Parameters
    ----------
    threads : int or None
        Explicit value (e.g. from --threads). If None, the OMX_THREADS
        environment variable is read, and failing that 1 is used.

    Returns
    -------
    int
    """
    if threads is not None:
        return int(threads)
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return 1
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(
            f"Parameter '{THREADS_ENV}' must be an integer, but is: {raw}",
            field="threads") from exc


class SweepRunner:
    """
    Maps a function over sweep points, keeping the order of the points.

    Attributes
    ----------
    threads : int
        1 for sequential execution, -1 for all cores, or a core count.
    logger : OmLogger
        Logger used for the parallel-mode warning.
    """
    def __init__(self, threads=1, logger=None):
        """
        Parameters
        ----------
        threads : int
            Number of worker processes.
        logger : OmLogger, optional
            Logger; disabled if not given.
        """
        self.threads = threads
        self.logger = resolve_logger(logger)

    def map(self, func, items):
        """
        Apply func to every item.

        Parameters
        ----------
        func : callable
            Function of one sweep point. Must be picklable when threads != 1.
        items : iterable
            Sweep points.

        Returns
        -------
        list
            Results in the order of `items`.
        """
        items = list(items)
        if self.threads == 1:
            return [func(item) for item in items]

        # Check number of cores is valid
        valid_cores = [-1] + list(range(1, cpu_count()))
        if self.threads not in valid_cores:
            raise ConfigError(
                f"Invalid cores: {self.threads}. Must be one of: " +
                f"{valid_cores}.", field="threads")

        # Worker processes do not share the logger
        if self.logger.enabled:
            self.logger.log(
                "WARNING: Logging is disabled in parallel " +
                "(multiprocessing mode). Per-point log messages will not " +
                "appear. If you wish to generate logs, switch to " +
                "`threads=1`.")

        return Parallel(n_jobs=self.threads)(
            delayed(func)(item) for item in items)

    def map_frame(self, func, items):
        """
        Apply func to every item and stack the resulting records.

        Parameters
        ----------
        func : callable
            Function returning a dict of column values for one point.
        items : iterable
            Sweep points.

        Returns
        -------
        pd.DataFrame
            One row per item, in item order.
        """
        return pd.DataFrame(self.map(func, items)).reset_index(drop=True)
