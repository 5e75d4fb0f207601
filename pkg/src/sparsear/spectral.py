"""AR power spectra and the missing-data spectrum-correlation experiment."""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateSignal, InvalidConfig
from .regression import RobustConfig, build_design, robust_fit, yule_walker_fit
from .signal import apply_missing, child_seeds, draw_frequency_pair, gen_two_sinusoids, rng_from

TABLE1_METHODS = ("yule_walker", "robust")
REFERENCES = ("yule_walker", "same")


@dataclass(frozen=True, eq=False)
class SpectrumGrid:
    frequencies: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        if self.frequencies.shape != self.power.shape:
            raise ValueError("frequency and power grids differ in length")


@dataclass(frozen=True)
class Table1Config:
    snr_list_db: tuple = (10.0, 15.0, 20.0, 25.0, 30.0)
    trials: int = 200
    n: int = 64
    missing_fraction: float = 0.25
    order: int = 8
    grid_points: int = 512
    seed: int = 42
    db: bool = False
    reference: str = "yule_walker"
    robust: RobustConfig = field(default_factory=RobustConfig)

    def __post_init__(self):
        if self.reference not in REFERENCES:
            raise InvalidConfig(f"reference must be one of {REFERENCES}")
        if not 0.0 <= self.missing_fraction <= 0.9:
            raise InvalidConfig("missing_fraction must lie in [0, 0.9]")
        object.__setattr__(self, "snr_list_db", tuple(float(s) for s in self.snr_list_db))
        if int(self.trials) < 1:
            raise InvalidConfig("trials must be >= 1")
        if not self.snr_list_db:
            raise InvalidConfig("snr list is empty")
        if int(self.grid_points) < 2:
            raise InvalidConfig("grid_points must be >= 2")
        if self.n < 2 * self.order + 1:
            raise InvalidConfig("series too short for the AR order")


def ar_spectrum(model, grid_points=512):
    """``sigma^2 / |1 - sum_k a_k exp(-j 2 pi f k)|^2`` on ``[0, 0.5]``."""
    coeffs = np.asarray(model.coeffs, dtype=float)
    if not np.all(np.isfinite(coeffs)):
        raise ValueError("model coefficients must be finite")
    freqs = np.linspace(0.0, 0.5, int(grid_points))
    lags = np.arange(1, coeffs.size + 1)
    denom = 1.0 - np.exp(-2j * np.pi * np.outer(freqs, lags)) @ coeffs
    with np.errstate(divide="ignore", over="ignore"):
        power = model.residual_variance / np.abs(denom) ** 2
    big = np.finfo(float).max
    power = np.nan_to_num(power, nan=big, posinf=big)
    return SpectrumGrid(freqs, power)


def spectrum_correlation(s1, s2, db=False):
    """Pearson correlation of two power grids (linear power by default)."""
    if s1.frequencies.shape != s2.frequencies.shape or not np.allclose(
            s1.frequencies, s2.frequencies):
        raise ValueError("spectra are evaluated on different grids")
    u, v = s1.power, s2.power
    if db:
        tiny = np.finfo(float).tiny
        u = 10.0 * np.log10(np.maximum(u, tiny))
        v = 10.0 * np.log10(np.maximum(v, tiny))
    u = u - u.mean()
    v = v - v.mean()
    nu, nv = np.sqrt(np.dot(u, u)), np.sqrt(np.dot(v, v))
    if nu == 0 or nv == 0:
        raise DegenerateSignal("constant spectrum has no correlation")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def missing_data_trial(config, snr_db, trial_seed):
    """One trial: two sinusoids, lose samples, compare spectra.

    With ``reference="yule_walker"`` both estimates are compared with the
    Yule-Walker spectrum of the complete series; ``"same"`` compares each
    estimator with its own complete-series fit. The estimators are fitted on
    the zero-filled series.

    Returns
    -------
    corr_yw, corr_robust : float
    """
    rng = rng_from(trial_seed)
    f1, f2 = draw_frequency_pair(rng)
    series = gen_two_sinusoids(f1, f2, snr_db, config.n, rng)
    lost, _ = apply_missing(series, config.missing_fraction, rng)

    def yw_spec(s):
        return ar_spectrum(yule_walker_fit(s, config.order), config.grid_points)

    def robust_spec(s):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model = robust_fit(build_design(s, config.order), config.robust)
        return ar_spectrum(model, config.grid_points)

    ref_yw = yw_spec(series)
    ref_rob = ref_yw if config.reference == "yule_walker" else robust_spec(series)
    return (spectrum_correlation(ref_yw, yw_spec(lost), config.db),
            spectrum_correlation(ref_rob, robust_spec(lost), config.db))


def trial_seeds(config):
    """Per-(SNR, trial) seeds derived from the master seed only."""
    return [child_seeds(config.seed, i, count=config.trials)
            for i in range(len(config.snr_list_db))]


def _snr_block(args):
    config, snr, seeds = args
    return [missing_data_trial(config, snr, s) for s in seeds]


@dataclass
class Table1Result:
    snr_list_db: tuple
    mean: dict
    trials: int
    raw: dict = field(repr=False, default_factory=dict)

    def rows(self):
        return [(m, [float(v) for v in self.mean[m]]) for m in TABLE1_METHODS]

    def to_dict(self, config=None):
        out = {
            "snr_db": [float(s) for s in self.snr_list_db],
            "trials": int(self.trials),
            "mean_correlation": {m: [float(v) for v in self.mean[m]] for m in TABLE1_METHODS},
        }
        if config is not None:
            cfg = asdict(config)
            cfg["snr_list_db"] = list(cfg["snr_list_db"])
            out["config"] = cfg
        return out


def run_table1(config, jobs=1):
    """Average :func:`missing_data_trial` over ``config.trials`` per SNR.

    ``jobs > 1`` spreads the SNR/trial blocks over worker processes; the
    seeds are fixed up front, so the result does not depend on ``jobs``.
    """
    seeds = trial_seeds(config)
    chunk = max(1, -(-config.trials // max(1, jobs)))
    tasks = []
    for i, snr in enumerate(config.snr_list_db):
        for start in range(0, config.trials, chunk):
            tasks.append((i, (config, snr, seeds[i][start:start + chunk])))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            blocks = list(pool.map(_snr_block, [t[1] for t in tasks]))
    else:
        blocks = [_snr_block(t[1]) for t in tasks]
    per_snr = [[] for _ in config.snr_list_db]
    for (i, _), block in zip(tasks, blocks):
        per_snr[i].extend(block)
    raw = {m: np.array([[t[j] for t in trials] for trials in per_snr])
           for j, m in enumerate(TABLE1_METHODS)}
    mean = {m: raw[m].mean(axis=1) for m in TABLE1_METHODS}
    return Table1Result(config.snr_list_db, mean, config.trials, raw)
