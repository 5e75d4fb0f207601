"""Command-line front end.

Subcommands::

    fit          AR fit of a CSV/WAV series, JSON model report
    spectrum     AR power spectrum of a fitted series
    missing-sim  Monte-Carlo spectrum correlation under missing samples
    code         clip/quantize sweep of per-frame AR residuals
    entropy      closed-form Gaussian/Laplace residual entropies

Every float is written with 17 significant digits. Non-finite floats are
written as the strings ``"inf"``, ``"-inf"`` and ``"nan"``. On error nothing
is written except a one-line diagnostic on stderr; the exit status is the
``exit_code`` of the raised error.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .coding import (
    CODING_METHODS,
    QUANT_RANGES,
    ClipSpec,
    PipelineConfig,
    analytic_entropy_gaussian,
    analytic_entropy_laplace,
    delta_entropy,
    nats_to_bits,
    sweep_k,
)
from .errors import InvalidConfig, SeriesIOError, SparseARError
from .io import FORMATS, read_series
from .regression import METHODS, WEIGHT_MODES, RobustConfig, fit
from .signal import gen_speech_like
from .spectral import REFERENCES, Table1Config, ar_spectrum, run_table1

SUBCOMMANDS = ("fit", "spectrum", "missing-sim", "code", "entropy")
DEFAULT_K = "1,0.8,0.6,0.5,0.4,0.3,0.25,0.2,0.15,0.1"
PROG = "sparsear"


@dataclass
class CliConfig:
    subcommand: str
    input_path: str | None = None
    output_path: str | None = None
    seed: int = 42
    format: str = "json"
    options: dict = field(default_factory=dict)


# -- serialization ----------------------------------------------------------

def fmt_float(v):
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _json(obj, indent=0):
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        text = fmt_float(obj)
        return text if math.isfinite(obj) else f'"{text}"'
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json(str(k))}: {_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_json(v) for v in obj) + "]"
        items = [pad + _json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    # numpy scalars
    if hasattr(obj, "item"):
        return _json(obj.item(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj):
    return _json(obj) + "\n"


def to_csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = [c if isinstance(c, str) else fmt_float(c) for c in row]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


# -- argument parsing --------------------------------------------------------

def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _rho(text):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"rho must be a number or 'auto', got {text!r}")


def _add_common(p, formats=("json",)):
    p.add_argument("--seed", type=int, default=42, help="master seed (default: 42)")
    p.add_argument("--format", choices=formats, default="json",
                   help="report format (default: json)")
    p.add_argument("--output", help="write the report here instead of stdout")


def _add_input(p, required=True):
    p.add_argument("--input", required=required, help="CSV or WAV series")
    p.add_argument("--input-format", choices=FORMATS,
                   help="input format (default: from the file extension)")


def _add_robust(p):
    g = p.add_argument_group("robust fit")
    g.add_argument("--rho", type=_rho, default="auto",
                   help="robust scale, or 'auto' for (2 * MAD sigma)^2 (default: auto)")
    g.add_argument("--epsilon", type=float, default=1e-12, help="weight guard (default: 1e-12)")
    g.add_argument("--gnc-step", type=float, default=0.25,
                   help="exponent increment per iteration (default: 0.25)")
    g.add_argument("--tol", type=float, default=1e-8,
                   help="relative coefficient step tolerance (default: 1e-8)")
    g.add_argument("--max-iter", type=int, default=100, help="IRLS iteration cap (default: 100)")
    g.add_argument("--weight-mode", choices=sorted(WEIGHT_MODES), default="power",
                   help="IRLS weight rule (default: power)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog=PROG, description="Sparse-residual AR estimation toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="subcommand")

    p = sub.add_parser("fit", help="fit an AR model to a series")
    _add_input(p)
    p.add_argument("--order", type=int, default=2, help="AR order (default: 2)")
    p.add_argument("--method", choices=METHODS, default="robust", help="estimator (default: robust)")
    p.add_argument("--residual", action="store_true", help="include the residual vector")
    _add_robust(p)
    _add_common(p)

    p = sub.add_parser("spectrum", help="AR power spectrum of a series")
    _add_input(p)
    p.add_argument("--order", type=int, default=8, help="AR order (default: 8)")
    p.add_argument("--method", choices=METHODS, default="robust", help="estimator (default: robust)")
    p.add_argument("--grid-points", type=int, default=512,
                   help="frequencies on [0, 0.5] (default: 512)")
    _add_robust(p)
    _add_common(p, ("json", "csv"))

    p = sub.add_parser("missing-sim", help="spectrum correlation with missing samples")
    p.add_argument("--snr-list", type=_float_list, default=[10.0, 15.0, 20.0, 25.0, 30.0],
                   help="comma-separated SNRs in dB (default: 10,15,20,25,30)")
    p.add_argument("--trials", type=int, default=200, help="trials per SNR (default: 200)")
    p.add_argument("--n", type=int, default=64, help="series length (default: 64)")
    p.add_argument("--missing-fraction", type=float, default=0.25,
                   help="fraction of samples lost (default: 0.25)")
    p.add_argument("--order", type=int, default=8, help="AR order (default: 8)")
    p.add_argument("--grid-points", type=int, default=512,
                   help="spectrum grid size (default: 512)")
    p.add_argument("--db", action="store_true", help="correlate log spectra instead of power")
    p.add_argument("--reference", choices=REFERENCES, default="yule_walker",
                   help="complete-data reference spectrum (default: yule_walker)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default: 1)")
    _add_robust(p)
    _add_common(p, ("json", "csv"))

    p = sub.add_parser("code", help="residual clip/quantize sweep")
    _add_input(p, required=False)
    p.add_argument("--n", type=int, default=16000,
                   help="length of the synthetic signal used without --input (default: 16000)")
    p.add_argument("--frame-length", type=int, default=160, help="frame length (default: 160)")
    p.add_argument("--order", type=int, default=10, help="AR order (default: 10)")
    p.add_argument("--method", choices=CODING_METHODS, default="robust",
                   help="per-frame estimator (default: robust)")
    p.add_argument("--levels", type=int, default=256, help="quantizer levels (default: 256)")
    p.add_argument("--k", type=_float_list, default=_float_list(DEFAULT_K),
                   help=f"comma-separated clip fractions (default: {DEFAULT_K})")
    p.add_argument("--quant-range", choices=QUANT_RANGES, default="frame",
                   help="quantizer range per frame (default: frame)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default: 1)")
    _add_robust(p)
    _add_common(p, ("json", "csv"))

    p = sub.add_parser("entropy", help="closed-form residual entropies")
    p.add_argument("--sigma-g", type=float, default=1.0,
                   help="Gaussian residual std (default: 1)")
    p.add_argument("--sigma-l", type=float, default=1.0,
                   help="Laplace residual std (default: 1)")
    _add_common(p)
    return parser


def config_from_args(args):
    opts = {k: v for k, v in vars(args).items()
            if k not in ("subcommand", "input", "output", "seed", "format")}
    return CliConfig(args.subcommand, getattr(args, "input", None), args.output,
                     args.seed, args.format, opts)


# -- subcommands -------------------------------------------------------------

def _robust_config(o):
    return RobustConfig(rho=o["rho"], epsilon=o["epsilon"], gnc_step=o["gnc_step"],
                        tol=o["tol"], max_iter=o["max_iter"], weight_mode=o["weight_mode"])


def _check_jobs(o):
    if o.get("jobs", 1) < 1:
        raise InvalidConfig("--jobs must be >= 1")


def _run_fit(cfg):
    o = cfg.options
    robust = _robust_config(o)
    series = read_series(cfg.input_path, o["input_format"])
    model = fit(series, o["order"], o["method"], robust)
    out = model.to_dict()
    if o["residual"]:
        out["residual"] = [float(r) for r in model.residual]
    return to_json(out)


def _run_spectrum(cfg):
    o = cfg.options
    robust = _robust_config(o)
    if o["grid_points"] < 2:
        raise InvalidConfig("--grid-points must be >= 2")
    series = read_series(cfg.input_path, o["input_format"])
    model = fit(series, o["order"], o["method"], robust)
    grid = ar_spectrum(model, o["grid_points"])
    if cfg.format == "csv":
        return to_csv(["frequency", "power"], zip(grid.frequencies, grid.power))
    out = model.to_dict()
    out["frequency"] = [float(f) for f in grid.frequencies]
    out["power"] = [float(v) for v in grid.power]
    return to_json(out)


def _run_missing_sim(cfg):
    o = cfg.options
    _check_jobs(o)
    config = Table1Config(
        snr_list_db=tuple(o["snr_list"]), trials=o["trials"], n=o["n"],
        missing_fraction=o["missing_fraction"], order=o["order"],
        grid_points=o["grid_points"], seed=cfg.seed, db=o["db"],
        reference=o["reference"], robust=_robust_config(o))
    result = run_table1(config, jobs=o["jobs"])
    if cfg.format == "csv":
        header = ["method"] + [fmt_float(s) for s in config.snr_list_db]
        return to_csv(header, [[m, *vals] for m, vals in result.rows()])
    return to_json(result.to_dict(config))


def _run_code(cfg):
    o = cfg.options
    _check_jobs(o)
    ks = o["k"]
    if not ks:
        raise InvalidConfig("--k needs at least one value")
    for k in ks:
        ClipSpec(k)
    config = PipelineConfig(frame_length=o["frame_length"], order=o["order"],
                            method=o["method"], levels=o["levels"],
                            quant_range=o["quant_range"], robust=_robust_config(o))
    if cfg.input_path is not None:
        series = read_series(cfg.input_path, o["input_format"])
        source = {"input": cfg.input_path}
    else:
        if o["n"] < config.frame_length:
            raise InvalidConfig("--n must cover at least one frame")
        series, _ = gen_speech_like(o["n"], cfg.seed)
        source = {"synthetic": "speech_like", "n": o["n"], "seed": cfg.seed}
    reports = sweep_k(series, config, ks, jobs=o["jobs"])
    if cfg.format == "csv":
        header = ["inv_k", "snr_db", "entropy_bits", "clipped_percent", "zero_level_percent"]
        rows = [[1.0 / r.k, r.snr_db, r.entropy_bits, r.clipped_percent, r.zero_level_percent]
                for r in reports]
        return to_csv(header, rows)
    return to_json({
        "source": source,
        "method": config.method,
        "frame_length": config.frame_length,
        "order": config.order,
        "levels": config.levels,
        "quant_range": config.quant_range,
        "reports": [r.to_dict() for r in reports],
    })


def _run_entropy(cfg):
    o = cfg.options
    sg, sl = o["sigma_g"], o["sigma_l"]
    hg = analytic_entropy_gaussian(sg)
    hl = analytic_entropy_laplace(sl)
    dh = delta_entropy(sg, sl)
    return to_json({
        "sigma_g": float(sg),
        "sigma_l": float(sl),
        "h_gaussian_nats": hg,
        "h_laplace_nats": hl,
        "delta_h_nats": dh,
        "h_gaussian_bits": nats_to_bits(hg),
        "h_laplace_bits": nats_to_bits(hl),
        "delta_h_bits": nats_to_bits(dh),
    })


HANDLERS = {
    "fit": _run_fit,
    "spectrum": _run_spectrum,
    "missing-sim": _run_missing_sim,
    "code": _run_code,
    "entropy": _run_entropy,
}


def _emit(cfg, text, stdout):
    if cfg.output_path is None:
        stdout.write(text)
        stdout.flush()
        return
    try:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise SeriesIOError(f"cannot write {cfg.output_path}: {exc}") from exc


def run(cfg, stdout=None, stderr=None):
    """Execute one subcommand and return the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        text = HANDLERS[cfg.subcommand](cfg)
        _emit(cfg, text, stdout)
    except SparseARError as exc:
        msg = str(exc).splitlines()[0] if str(exc) else ""
        stderr.write(f"{PROG}: error: {type(exc).__name__}: {msg}\n")
        return exc.exit_code
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
