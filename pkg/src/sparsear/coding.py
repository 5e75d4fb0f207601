"""Residual clipping, uniform quantization and entropy measurement.

The coding pipeline splits a signal into non-overlapping frames, fits an AR
model per frame, clips each frame's residual to ``[K*min(r), K*max(r)]`` and
quantizes the clipped residual with a fixed number of uniform levels. The
quality and rate figures are pooled over all frames.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSignal, InvalidConfig, InvalidSigma, OutOfRange
from .regression import RobustConfig, build_design, l1_fit, ols_fit, robust_fit
from .signal import frame_split

LN2 = math.log(2.0)

# quantizer range per frame:
#   "frame"   - the unclipped residual's [min, max] (widened to hold the
#               clipped samples of one-sided frames); the step is the K=1 step
#   "clipped" - the clipped residual's [min, max]
QUANT_RANGES = ("frame", "clipped")
CODING_METHODS = ("ols", "robust", "l1")


@dataclass(frozen=True)
class ClipSpec:
    k: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.k <= 1.0:
            raise InvalidConfig(f"clip fraction k must lie in (0, 1], got {self.k}")


@dataclass(frozen=True)
class QuantizerSpec:
    levels: int = 256
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        if int(self.levels) < 2:
            raise InvalidConfig("a quantizer needs at least 2 levels")
        if not self.lo < self.hi:
            raise InvalidConfig("quantizer range must satisfy lo < hi")

    @property
    def step(self):
        return (self.hi - self.lo) / self.levels


@dataclass(frozen=True)
class CodingReport:
    snr_db: float
    entropy_bits: float
    clipped_percent: float
    zero_level_percent: float
    k: float

    def to_dict(self):
        return {
            "k": self.k,
            "inv_k": 1.0 / self.k,
            "snr_db": self.snr_db,
            "entropy_bits": self.entropy_bits,
            "clipped_percent": self.clipped_percent,
            "zero_level_percent": self.zero_level_percent,
        }


@dataclass(frozen=True)
class PipelineConfig:
    frame_length: int = 160
    order: int = 10
    method: str = "robust"
    clip: ClipSpec = field(default_factory=ClipSpec)
    levels: int = 256
    quant_range: str = "frame"
    robust: RobustConfig = field(default_factory=RobustConfig)

    def __post_init__(self):
        if self.method not in CODING_METHODS:
            raise InvalidConfig(f"method must be one of {CODING_METHODS}")
        if self.frame_length <= 2 * self.order:
            raise InvalidConfig("frame_length must exceed 2 * order")
        if self.quant_range not in QUANT_RANGES:
            raise InvalidConfig(f"quant_range must be one of {QUANT_RANGES}")
        if int(self.levels) < 2:
            raise InvalidConfig("a quantizer needs at least 2 levels")


def clip_residual(r, spec):
    """Project samples outside ``[k*min(r), k*max(r)]`` onto the bounds.

    Returns
    -------
    clipped : ndarray
    clipped_count : int
        Number of samples changed.
    """
    r = np.asarray(r, dtype=float)
    if r.size == 0:
        raise ValueError("empty residual")
    hi = spec.k * r.max()
    lo = spec.k * r.min()
    if spec.k < 1.0 and r.max() == 0.0 and r.min() == 0.0:
        raise DegenerateSignal("all-zero residual cannot be clipped")
    return clip_to_bounds(r, lo, hi)


def clip_to_bounds(r, lo, hi):
    """Project ``r`` onto ``[lo, hi]``; returns ``(clipped, changed_count)``.

    The projection is idempotent. Note that :func:`clip_residual` is not,
    since it recomputes its bounds from the vector it is given.
    """
    r = np.asarray(r, dtype=float)
    if lo > hi:
        lo, hi = hi, lo
    out = np.clip(r, lo, hi)
    return out, int(np.count_nonzero(out != r))


def clip_bounds(r, spec):
    """``(k*min(r), k*max(r))`` ordered low to high."""
    r = np.asarray(r, dtype=float)
    lo, hi = spec.k * r.min(), spec.k * r.max()
    return (lo, hi) if lo <= hi else (hi, lo)


def uniform_quantize(r, spec):
    """Midtread uniform quantizer over ``[lo, hi]``.

    Returns ``(indices, reconstructed, step)``. Reconstruction points sit at
    bin centres so ``|r - reconstructed| <= step / 2``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < spec.lo) or np.any(r > spec.hi):
        raise OutOfRange(f"samples outside quantizer range [{spec.lo}, {spec.hi}]")
    step = spec.step
    idx = np.floor((r - spec.lo) / step).astype(np.int64)
    np.clip(idx, 0, spec.levels - 1, out=idx)
    recon = spec.lo + (idx + 0.5) * step
    return idx, recon, step


def zero_level_index(spec):
    """Index of the bin containing 0, or -1 when 0 is outside the range."""
    if not spec.lo <= 0.0 <= spec.hi:
        return -1
    return int(min(math.floor(-spec.lo / spec.step), spec.levels - 1))


def empirical_entropy(indices):
    """Plug-in entropy of a symbol sequence, in bits per symbol."""
    idx = np.asarray(indices).reshape(-1)
    if idx.size == 0:
        raise ValueError("empty symbol sequence")
    _, counts = np.unique(idx, return_counts=True)
    p = counts / idx.size
    h = -np.sum(p * np.log2(p))
    return float(max(h, 0.0))


def snr_db(original, reconstructed):
    """``10 log10(sum x^2 / sum (x - y)^2)``; ``inf`` when the two are equal."""
    x = np.asarray(original, dtype=float)
    y = np.asarray(reconstructed, dtype=float)
    if x.shape != y.shape:
        raise ValueError("length mismatch")
    sig = float(np.sum(x * x))
    if sig == 0.0:
        raise DegenerateSignal("original signal is all zero")
    err = float(np.sum((x - y) ** 2))
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(sig / err)


def _check_sigma(sigma):
    if not sigma > 0:
        raise InvalidSigma(f"sigma must be positive, got {sigma}")


def analytic_entropy_gaussian(sigma):
    """Differential entropy of N(0, sigma^2) in nats."""
    _check_sigma(sigma)
    return math.log(math.sqrt(2.0 * math.pi * math.e) * sigma)


def analytic_entropy_laplace(sigma):
    """Differential entropy of a zero-mean Laplace source with std ``sigma``, nats."""
    _check_sigma(sigma)
    return math.log(math.sqrt(2.0) * math.e * sigma)


def delta_entropy(sigma_g, sigma_l):
    """Gaussian minus Laplace entropy, ``ln(sqrt(pi/e) * sigma_g / sigma_l)`` nats."""
    _check_sigma(sigma_g)
    _check_sigma(sigma_l)
    return math.log(math.sqrt(math.pi / math.e) * sigma_g / sigma_l)


def nats_to_bits(h):
    return h / LN2


def plugin_differential_entropy(x, bins=None):
    """Histogram estimate of differential entropy in nats.

    Uses ``sqrt(n)`` equal-width bins over the sample range unless ``bins``
    is given.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if bins is None:
        bins = max(int(math.sqrt(n)), 1)
    counts, edges = np.histogram(x, bins=bins)
    width = edges[1] - edges[0]
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)) + math.log(width))


def frame_residuals(series, config, jobs=1):
    """Fit an AR model per frame and return the list of residual vectors.

    ``jobs > 1`` fits the frames in worker processes; the result is
    identical to the serial one and keeps frame order.
    """
    if not np.any(series.samples):
        raise DegenerateSignal("all-zero input signal")
    frames = frame_split(series, config.frame_length)
    if not frames:
        raise DegenerateSignal(
            f"signal of length {len(series)} is shorter than one frame ({config.frame_length})")
    if jobs > 1 and len(frames) > 1:
        chunk = -(-len(frames) // jobs)
        blocks = [(frames[i:i + chunk], config) for i in range(0, len(frames), chunk)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return [r for block in pool.map(_fit_block, blocks) for r in block]
    return _fit_block((frames, config))


def _fit_block(args):
    frames, config = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return [_fit_frame(frame, config).residual for frame in frames]


def _fit_frame(frame, config):
    system = build_design(frame, config.order)
    if config.method == "ols":
        return ols_fit(system)
    if config.method == "l1":
        return l1_fit(system, config.robust)
    return robust_fit(system, config.robust)


def code_residuals(residuals, k, levels=256, quant_range="frame"):
    """Clip and quantize per-frame residuals and pool the figures of merit.

    SNR compares the quantized clipped residual with the original residual
    using pooled signal and error energies. Entropy is taken over the pooled
    index histogram; all frames share the same alphabet of ``levels``
    indices.
    """
    clip = ClipSpec(k)
    sig = err = 0.0
    clipped = zero = total = 0
    symbols = []
    for r in residuals:
        rc, nclip = clip_residual(r, clip)
        if quant_range == "frame":
            # one-sided frames clip towards zero, outside [min(r), max(r)]
            lo = float(min(r.min(), rc.min()))
            hi = float(max(r.max(), rc.max()))
        else:
            lo, hi = float(rc.min()), float(rc.max())
        if hi <= lo:
            # constant frame; a symmetric sliver keeps the quantizer valid
            pad = max(abs(lo), 1.0) * 1e-12
            lo, hi = lo - pad, hi + pad
        spec = QuantizerSpec(levels, lo, hi)
        idx, recon, _ = uniform_quantize(rc, spec)
        sig += float(np.sum(r * r))
        err += float(np.sum((r - recon) ** 2))
        clipped += nclip
        zero += int(np.count_nonzero(idx == zero_level_index(spec)))
        total += r.size
        symbols.append(idx)
    if sig == 0.0:
        raise DegenerateSignal("all-zero residual")
    snr = math.inf if err == 0.0 else 10.0 * math.log10(sig / err)
    return CodingReport(
        snr_db=snr,
        entropy_bits=empirical_entropy(np.concatenate(symbols)),
        clipped_percent=100.0 * clipped / total,
        zero_level_percent=100.0 * zero / total,
        k=float(k),
    )


def code_frames(series, config):
    """Run the frame coding pipeline once at ``config.clip.k``."""
    residuals = frame_residuals(series, config)
    return code_residuals(residuals, config.clip.k, config.levels, config.quant_range)


def sweep_k(series, config, k_values, jobs=1):
    """One :class:`CodingReport` per clip fraction, in input order.

    The per-frame fits do not depend on K, so they are computed once.
    """
    ks = [float(k) for k in k_values]
    for k in ks:
        ClipSpec(k)
    residuals = frame_residuals(series, config, jobs)
    return [code_residuals(residuals, k, config.levels, config.quant_range) for k in ks]
