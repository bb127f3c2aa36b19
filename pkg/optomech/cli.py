"""
Command-line front end.

`omx <subcommand> [options]` runs one calculation over a sweep and writes a
CSV (or JSON) result. Each file written is accompanied by a
`<out>.manifest.json` recording what produced it. Without --out the result
goes to stdout.

Exit codes: 0 on success, 2 for configuration or capability errors, 3 for
numerical errors.
"""

import argparse
from functools import partial
import json
import math
import sys
import time

import numpy as np
import pandas as pd
from rich.console import Console

from . import __version__
from .errors import (BranchIndexError, CapabilityError, ConfigError,
                     DomainError, NoBistabilityError, NumericError)
from .formalisms import (ALIASES, SPECTRUM_NOISE_MODES, Formalism,
                         build_system)
from .frozen import Frozen
from .logging import OmLogger
from .observables import (approx_shift, resonance_shifts,
                          sideband_inequivalence_asymptotic,
                          sideband_inequivalence_numeric, sideband_observable,
                          spring_corrected, spring_weak_coupling)
from .parameters import (derive_rates, drive_amplitude, list_fixtures,
                         load_config, load_fixture)
from .runner import SweepRunner, resolve_threads
from .spectra import (FrequencyGrid, spectrum_additive,
                      spectrum_multiplicative)
from .stability import phase_map
from .steady import state_from_nbar, steady_state
from .timedomain import evolve_pulsed


SUBCOMMANDS = ("steady", "matrix", "spectrum", "shift", "spring", "inequiv",
               "stability", "pulse", "fixtures")
USAGE_ERRORS = (ConfigError, CapabilityError, BranchIndexError)
NUMERIC_ERRORS = (NumericError, NoBistabilityError, DomainError)
CSV_OPTIONS = {"index": False, "float_format": "%.16e",
               "lineterminator": "\n", "encoding": "utf-8"}
TWO_PI = 2 * math.pi
LABEL_ASCII = str.maketrans({"†": "dag", "²": "2", "δ": "d"})


class RunManifest(Frozen):
    """
    Record of one CLI run, written next to its output.

    Attributes
    ----------
    config : dict
        Raw configuration used.
    subcommand : str
        Subcommand name.
    grids : dict
        Grid specifications as given on the command line.
    formalism : str or None
        Formalism tag, where one applies.
    version : str
        Package version.
    wall_time : float
        Seconds spent computing.
    argv : list of str
        Command-line arguments.
    """
    # pylint: disable=too-many-arguments
    def __init__(self, *, config, subcommand, grids, formalism, wall_time,
                 argv):
        self.config = dict(config)
        self.subcommand = subcommand
        self.grids = dict(grids)
        self.formalism = formalism
        self.version = __version__
        self.wall_time = float(wall_time)
        self.argv = list(argv)

    def to_dict(self):
        """Manifest as a JSON-ready dict."""
        return {"config": self.config, "subcommand": self.subcommand,
                "grids": self.grids, "formalism": self.formalism,
                "version": self.version, "wall_time": self.wall_time,
                "argv": self.argv}

    def write(self, out):
        """Write `<out>.manifest.json`."""
        with open(f"{out}.manifest.json", "w", encoding="utf-8",
                  newline="\n") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")


# ----------------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------------

def _common_parser():
    """Options shared by every subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--config", metavar="PATH",
                        help="Flat JSON configuration file.")
    source.add_argument("--fixture", metavar="NAME",
                        help="Named fixture system (see `omx fixtures list`).")
    common.add_argument("--out", metavar="PATH",
                        help="Output file; stdout if omitted.")
    common.add_argument("--threads", type=int, default=None,
                        help="Worker processes (default OMX_THREADS or 1).")
    common.add_argument("--log-console", action="store_true",
                        help="Log calculation events to the console.")
    common.add_argument("--log-file", metavar="PATH",
                        help="Log calculation events to a .log file.")
    return common


def build_parser():
    """
    Argument parser with one sub-parser per subcommand.

    Returns
    -------
    argparse.ArgumentParser
    """
    common = _common_parser()
    formalisms = sorted(ALIASES) + [tag.value for tag in Formalism]
    parser = argparse.ArgumentParser(
        prog="omx", description="Higher-order-operator cavity optomechanics.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    p = sub.add_parser("steady", parents=[common],
                       help="Steady state over a detuning sweep.")
    p.add_argument("--delta-hz", required=True, metavar="START:STOP:STEP")
    p.add_argument("--branch", default="lowest",
                   help="lowest, highest or a root index.")

    p = sub.add_parser("matrix", parents=[common],
                       help="Coefficient, noise and drive matrices as JSON.")
    p.add_argument("--formalism", default="so3", choices=formalisms)
    p.add_argument("--delta-hz", type=float, default=0.0)
    p.add_argument("--noise-mode", default=None)
    p.add_argument("--no-s", action="store_true",
                   help="Drop s = g0 b̄ from the diagonal.")

    p = sub.add_parser("spectrum", parents=[common],
                       help="Output noise spectrum.")
    p.add_argument("--formalism", default="so3", choices=formalisms)
    p.add_argument("--delta-hz", type=float, default=0.0)
    p.add_argument("--grid", required=True, metavar="START:STOP:STEP",
                   help="Output frequencies (Hz).")
    p.add_argument("--noise", choices=("additive", "multiplicative"),
                   default=None)
    p.add_argument("--noise-mode", default=None)
    p.add_argument("--use-fft", action="store_true")

    p = sub.add_parser("shift", parents=[common],
                       help="Eigenvalue resonance shifts over detuning.")
    p.add_argument("--delta-hz", required=True, metavar="START:STOP:STEP")
    p.add_argument("--phonons", choices=("coherent", "thermal"),
                   default="coherent")

    p = sub.add_parser("spring", parents=[common],
                       help="Spring effect over detuning.")
    p.add_argument("--delta-hz", required=True, metavar="START:STOP:STEP")
    p.add_argument("--w-hz", type=float, default=None,
                   help="Probe frequency (Hz); mechanical frequency if "
                   "omitted.")

    p = sub.add_parser("inequiv", parents=[common],
                       help="Side-band inequivalence over (n̄, m̄).")
    p.add_argument("--nbar", required=True, help="Comma-separated list.")
    p.add_argument("--mbar", required=True, help="Comma-separated list.")

    p = sub.add_parser("stability", parents=[common],
                       help="Dynamic stability phase map.")
    p.add_argument("--delta-hz", required=True, metavar="START:STOP:STEP")
    p.add_argument("--power-w", required=True, metavar="START:STOP:STEP")
    p.add_argument("--formalisms", default="lin4,to5",
                   help="Linear and nonlinear formalism, comma-separated.")

    p = sub.add_parser("pulse", parents=[common],
                       help="Time evolution under a sampled drive.")
    p.add_argument("--alpha-csv", required=True, metavar="PATH",
                   help="CSV with columns t_s, re_alpha, im_alpha.")
    p.add_argument("--formalism", default="so3", choices=formalisms)
    p.add_argument("--delta-hz", type=float, default=0.0)
    p.add_argument("--closure", choices=("self_consistent", "published"),
                   default="self_consistent")
    p.add_argument("--method", choices=("magnus", "rk45"), default="magnus")
    p.add_argument("--rtol", type=float, default=1e-9)

    p = sub.add_parser("fixtures", parents=[common],
                       help="List or show the named fixture systems.")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    return parser


def parse_range(spec, scale=1.0, field="grid"):
    """
    Inclusive arithmetic sequence from "start:stop:step".

    Parameters
    ----------
    spec : str
        Three colon-separated numbers.
    scale : float
        Factor applied to every value (2π for Hz to rad/s).
    field : str
        Option name for error messages.

    Returns
    -------
    np.ndarray
    """
    try:
        start, stop, step = (float(v) for v in str(spec).split(":"))
    except ValueError as exc:
        raise ConfigError(
            f"Parameter '{field}' must be 'start:stop:step', but is: {spec}",
            field=field) from exc
    if step <= 0 or stop < start:
        raise ConfigError(
            f"Parameter '{field}' needs step > 0 and stop >= start, but is: "
            f"{spec}", field=field)
    count = int(round((stop - start) / step)) + 1
    return scale * (start + step * np.arange(count))


def parse_list(text, field):
    """Comma-separated floats."""
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(
            f"Parameter '{field}' must be a comma-separated list of numbers, "
            f"but is: {text}", field=field) from exc


def _branch(text):
    """Branch option as 'lowest', 'highest' or int."""
    if text in ("lowest", "highest"):
        return text
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(
            f"Parameter 'branch' must be 'lowest', 'highest' or an integer, "
            f"but is: {text}", field="branch") from exc


def _raw_config(args):
    """Configuration selected by --config or --fixture."""
    if args.config:
        return load_config(args.config)
    if args.fixture:
        return load_fixture(args.fixture)
    raise ConfigError("One of --config or --fixture is required",
                      field="config")


def _complex_pairs(matrix):
    """Nested [re, im] lists for JSON."""
    if matrix is None:
        return None
    arr = np.asarray(matrix, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


# ----------------------------------------------------------------------------
# Per-point calculations (module level so they pickle for parallel runs)
# ----------------------------------------------------------------------------

def _steady_row(Delta, params, alpha_mag, branch):
    ss = steady_state(params, Delta, alpha_mag, branch)
    return {"Delta_hz": Delta / TWO_PI, "nbar": ss.nbar, "mbar": ss.mbar,
            "re_bbar": ss.bbar.real, "im_bbar": ss.bbar.imag,
            "branch_count": ss.branch_count}


def _shift_row(Delta, params, alpha_mag, phonons):
    ss = steady_state(params, Delta, alpha_mag)
    report = resonance_shifts(params, ss, phonons=phonons)
    freq, decay = approx_shift(params, ss.nbar)
    return {"delta_hz": Delta / TWO_PI,
            "d_omega_m_hz": report.dOmega / TWO_PI,
            "d_omega_c_hz": report.domega / TWO_PI,
            "d_gamma_m_hz": report.dGamma / TWO_PI,
            "d_kappa_hz": report.dkappa / TWO_PI,
            "approx_sum_freq_hz": freq / TWO_PI,
            "approx_sum_decay_hz": decay / TWO_PI,
            "ambiguous": report.ambiguous}


def _spring_row(Delta, params, alpha_mag, w):
    ss = steady_state(params, Delta, alpha_mag)
    point = spring_corrected(params, ss, w)
    weak, _, _ = spring_weak_coupling(params, ss)
    return {"delta_hz": Delta / TWO_PI, "w_hz": w / TWO_PI,
            "domega_corr_hz": point.dOmega_corr / TWO_PI,
            "dgamma_corr_hz": point.dGamma_corr / TWO_PI,
            "domega_std_hz": point.dOmega_std / TWO_PI,
            "dgamma_std_hz": point.dGamma_std / TWO_PI,
            "domega_weak_hz": weak / TWO_PI}


def _inequiv_row(pair, params):
    nbar, mbar = pair
    ss = state_from_nbar(params, 0.0, nbar, mbar=mbar)
    numeric = sideband_inequivalence_numeric(params, ss)
    first, second = sideband_inequivalence_asymptotic(params, nbar, mbar)
    return {"nbar": nbar, "mbar": mbar,
            "ddelta_numeric_hz": numeric.dDelta / TWO_PI,
            "ddelta1_asym_hz": first / TWO_PI,
            "ddelta2_asym_hz": second / TWO_PI,
            "observable": sideband_observable(params, nbar, mbar)}


# ----------------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------------

def _run_steady(args, params, runner):
    deltas = FrequencyGrid.from_hz_spec(args.delta_hz).values
    func = partial(_steady_row, params=params,
                   alpha_mag=drive_amplitude(params),
                   branch=_branch(args.branch))
    return (runner.map_frame(func, deltas), {"delta_hz": args.delta_hz},
            None)


def _run_matrix(args, params, _runner):
    tag = Formalism.parse(args.formalism)
    ss = steady_state(params, TWO_PI * args.delta_hz,
                      drive_amplitude(params))
    sys_ = build_system(tag, params, ss, include_s=not args.no_s,
                        noise_mode=args.noise_mode)
    doc = {"tag": tag.value, "basis_labels": list(sys_.basis_labels),
           "M": _complex_pairs(sys_.M),
           "noise_in": _complex_pairs(sys_.noise_in),
           "noise_mode": sys_.noise_mode,
           "input_kinds": list(sys_.input_kinds),
           "drive": _complex_pairs(sys_.drive),
           "drive_printed": sys_.drive_printed,
           "decay_diag": sys_.decay_diag.tolist()}
    return doc, {"delta_hz": args.delta_hz}, tag.value


def _run_spectrum(args, params, _runner, logger):
    tag = Formalism.parse(args.formalism)
    grid = FrequencyGrid.from_hz_spec(args.grid)
    ss = steady_state(params, TWO_PI * args.delta_hz,
                      drive_amplitude(params))
    noise = args.noise or ("multiplicative"
                           if tag in (Formalism.SECOND_ORDER3,
                                      Formalism.THIRD_ORDER5)
                           else "additive")
    if noise == "multiplicative":
        sys_ = build_system(tag, params, ss,
                            noise_mode=(args.noise_mode
                                        or SPECTRUM_NOISE_MODES.get(tag)))
        result = spectrum_multiplicative(sys_, params, ss, grid, ss.m_th,
                                         use_fft=args.use_fft, logger=logger)
    else:
        sys_ = build_system(tag, params, ss, noise_mode=args.noise_mode)
        result = spectrum_additive(sys_, grid, ss.m_th, logger=logger)
    return (result.to_frame(),
            {"grid": args.grid, "delta_hz": args.delta_hz, "noise": noise,
             "noise_mode": sys_.noise_mode},
            tag.value)


def _run_shift(args, params, runner):
    deltas = FrequencyGrid.from_hz_spec(args.delta_hz).values
    func = partial(_shift_row, params=params,
                   alpha_mag=drive_amplitude(params), phonons=args.phonons)
    return (runner.map_frame(func, deltas), {"delta_hz": args.delta_hz},
            Formalism.SECOND_ORDER3.value)


def _run_spring(args, params, runner):
    deltas = FrequencyGrid.from_hz_spec(args.delta_hz).values
    w = params.Omega if args.w_hz is None else TWO_PI * args.w_hz
    func = partial(_spring_row, params=params,
                   alpha_mag=drive_amplitude(params), w=w)
    return (runner.map_frame(func, deltas),
            {"delta_hz": args.delta_hz, "w_hz": w / TWO_PI}, None)


def _run_inequiv(args, params, runner):
    pairs = [(n, m) for n in parse_list(args.nbar, "nbar")
             for m in parse_list(args.mbar, "mbar")]
    func = partial(_inequiv_row, params=params)
    return (runner.map_frame(func, pairs),
            {"nbar": args.nbar, "mbar": args.mbar},
            Formalism.SECOND_ORDER3.value)


def _run_stability(args, params, runner, logger):
    deltas = FrequencyGrid.from_hz_spec(args.delta_hz).values
    powers = parse_range(args.power_w, field="power_w")
    tags = [Formalism.parse(t) for t in args.formalisms.split(",")]
    stab = phase_map(params, deltas, powers, formalisms=tags,
                     threads=runner.threads, logger=logger)
    grids = {"delta_hz": args.delta_hz, "power_w": args.power_w}
    return (stab.to_frame(), grids, ",".join(t.value for t in tags),
            stab.summary())


def _run_pulse(args, params, _runner, logger):
    tag = Formalism.parse(args.formalism)
    samples = pd.read_csv(args.alpha_csv)
    missing = {"t_s", "re_alpha", "im_alpha"} - set(samples.columns)
    if missing:
        raise ConfigError(
            f"Parameter 'alpha_csv' is missing columns {sorted(missing)}",
            field="alpha_csv")
    times = samples["t_s"].to_numpy(dtype=float)
    alpha = (samples["re_alpha"].to_numpy(dtype=float)
             + 1j * samples["im_alpha"].to_numpy(dtype=float))
    result = evolve_pulsed(params, alpha, tag, times, closure=args.closure,
                           method=args.method, rtol=args.rtol,
                           Delta=TWO_PI * args.delta_hz, logger=logger)
    columns = {"t_s": result.times}
    for j, label in enumerate(result.basis_labels):
        name = label.translate(LABEL_ASCII)
        columns[f"re_{name}"] = result.trajectories[:, j].real
        columns[f"im_{name}"] = result.trajectories[:, j].imag
    return (pd.DataFrame(columns), {"alpha_csv": args.alpha_csv},
            tag.value)


def _run_fixtures(args):
    if args.action == "list":
        rows = []
        for name, description in list_fixtures().items():
            row = {"name": name, "description": description}
            row.update(load_fixture(name))
            rows.append(row)
        return pd.DataFrame(rows)
    if not args.name:
        raise ConfigError("`fixtures show` needs a fixture name",
                          field="fixture")
    raw = load_fixture(args.name)
    return {"name": args.name, "description": list_fixtures()[args.name],
            "raw": dict(raw), "derived": derive_rates(raw).as_dict()}


# ----------------------------------------------------------------------------
# Output
# ----------------------------------------------------------------------------

def _emit(result, out):
    """Write a DataFrame as CSV or anything else as JSON."""
    if isinstance(result, pd.DataFrame):
        if out is None:
            sys.stdout.write(result.to_csv(
                **{k: v for k, v in CSV_OPTIONS.items() if k != "encoding"}))
        else:
            result.to_csv(out, **CSV_OPTIONS)
        return
    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def _summary_path(out):
    """`results.csv` -> `results_summary.json`."""
    stem = out[:-4] if out.lower().endswith(".csv") else out
    return f"{stem}_summary.json"


def run(args, argv):
    """
    Execute a parsed command.

    Parameters
    ----------
    args : argparse.Namespace
        Parsed arguments.
    argv : list of str
        Original arguments, echoed into the manifest.
    """
    if args.subcommand == "fixtures":
        _emit(_run_fixtures(args), args.out)
        return

    logger = OmLogger(log_to_console=args.log_console,
                      log_to_file=args.log_file is not None,
                      file_path=args.log_file)
    raw = _raw_config(args)
    params = derive_rates(raw)
    runner = SweepRunner(threads=resolve_threads(args.threads),
                         logger=logger)

    start = time.perf_counter()
    handlers = {
        "steady": lambda: _run_steady(args, params, runner),
        "matrix": lambda: _run_matrix(args, params, runner),
        "spectrum": lambda: _run_spectrum(args, params, runner, logger),
        "shift": lambda: _run_shift(args, params, runner),
        "spring": lambda: _run_spring(args, params, runner),
        "inequiv": lambda: _run_inequiv(args, params, runner),
        "stability": lambda: _run_stability(args, params, runner, logger),
        "pulse": lambda: _run_pulse(args, params, runner, logger),
    }
    outcome = handlers[args.subcommand]()
    result, grids, formalism = outcome[:3]
    wall_time = time.perf_counter() - start

    _emit(result, args.out)
    if len(outcome) > 3:
        summary = outcome[3]
        if args.out is None:
            sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
        else:
            _emit(summary, _summary_path(args.out))
    if args.out is not None:
        RunManifest(config=dict(raw), subcommand=args.subcommand, grids=grids,
                    formalism=formalism, wall_time=wall_time,
                    argv=argv).write(args.out)


VALUE_OPTIONS = ("--delta-hz", "--grid", "--power-w", "--w-hz", "--nbar",
                 "--mbar")


def _attach_values(argv):
    """
    Join value options to their value ("--delta-hz=-5e9:5e9:1e7") so that
    values starting with "-" are not read as options.
    """
    joined, k = [], 0
    while k < len(argv):
        if argv[k] in VALUE_OPTIONS and k + 1 < len(argv):
            joined.append(f"{argv[k]}={argv[k + 1]}")
            k += 2
        else:
            joined.append(argv[k])
            k += 1
    return joined


def main(argv=None):
    """
    Parse arguments, run the subcommand and map errors to exit codes.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name; sys.argv[1:] by default.

    Returns
    -------
    int
        0 on success, 2 on usage/config errors, 3 on numeric errors.
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    err = Console(stderr=True)
    try:
        args = build_parser().parse_args(_attach_values(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        run(args, argv)
    except USAGE_ERRORS as exc:
        err.print(f"error: {exc}", style="bold red", markup=False)
        return 2
    except NUMERIC_ERRORS as exc:
        err.print(f"numeric error: {exc}", style="bold red", markup=False)
        return 3
    except (ValueError, OSError) as exc:
        err.print(f"error: {exc}", style="bold red", markup=False)
        return 2
    return 0


dispatch = main
