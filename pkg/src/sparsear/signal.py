"""Time-series container, framing, masking and seeded generators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateSignal, InvalidFraction, UnstableModel

MAX_MISSING_FRACTION = 0.9


def rng_from(seed):
    """Return a ``numpy.random.Generator`` for an integer seed.

    Generators and ``SeedSequence`` objects are accepted as well so that a
    caller may pass a derived child stream.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def child_seeds(master, *key, count=None):
    """Derive independent integer seeds from ``master`` and a key path.

    The result depends only on ``(master, key)``, never on call order, so
    trials may be farmed out to workers in any order.
    """
    ss = np.random.SeedSequence([int(master), *[int(k) for k in key]])
    if count is None:
        return int(ss.generate_state(1, dtype=np.uint64)[0])
    return [int(s) for s in ss.generate_state(count, dtype=np.uint64)]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Real-valued samples with optional sample rate and presence mask.

    ``mask[i]`` is True when sample ``i`` was observed.
    """

    samples: np.ndarray
    sample_rate: float | None = None
    mask: np.ndarray | None = None

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=float).reshape(-1)
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", samples)
        if self.sample_rate is not None and not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=bool).reshape(-1)
            if mask.shape != samples.shape:
                raise ValueError("mask length must match samples")
            object.__setattr__(self, "mask", mask)

    def __len__(self):
        return self.samples.shape[0]


@dataclass(frozen=True, eq=False)
class MissingMask:
    present: np.ndarray
    missing_count: int = field(init=False)

    def __post_init__(self):
        present = np.asarray(self.present, dtype=bool).reshape(-1)
        object.__setattr__(self, "present", present)
        object.__setattr__(self, "missing_count", int(np.count_nonzero(~present)))


def frame_split(series, frame_length):
    """Cut ``series`` into ``len // frame_length`` non-overlapping frames.

    The trailing partial frame is dropped.
    """
    if frame_length < 1:
        raise ValueError("frame_length must be >= 1")
    nframes = len(series) // frame_length
    frames = []
    for i in range(nframes):
        sl = slice(i * frame_length, (i + 1) * frame_length)
        mask = None if series.mask is None else series.mask[sl]
        frames.append(TimeSeries(series.samples[sl], series.sample_rate, mask))
    return frames


def apply_missing(series, fraction, seed):
    """Zero out ``round(fraction * N)`` uniformly chosen samples.

    Returns the corrupted series (carrying the mask) and the mask itself.
    """
    if not 0.0 <= fraction <= MAX_MISSING_FRACTION:
        raise InvalidFraction(
            f"missing fraction must lie in [0, {MAX_MISSING_FRACTION}], got {fraction}")
    n = len(series)
    count = int(round(fraction * n))
    rng = rng_from(seed)
    present = np.ones(n, dtype=bool)
    if count:
        present[rng.choice(n, size=count, replace=False)] = False
    if series.mask is not None:
        present &= series.mask
    samples = np.where(present, series.samples, 0.0)
    return TimeSeries(samples, series.sample_rate, present), MissingMask(present)


def ar_roots(coeffs):
    """Roots of ``z^p - a_1 z^{p-1} - ... - a_p``."""
    coeffs = np.asarray(coeffs, dtype=float)
    return np.roots(np.concatenate(([1.0], -coeffs)))


def is_stable(coeffs):
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size == 0:
        return True
    return bool(np.all(np.abs(ar_roots(coeffs)) < 1.0))


def gen_ar_process(coeffs, noise_std, n, seed, initial=None, sample_rate=None):
    """Simulate ``x_t = sum_k a_k x_{t-k} + w_t`` with Gaussian ``w``.

    Parameters
    ----------
    coeffs : array_like
        AR coefficients ``a_1..a_p``.
    noise_std : float
        Standard deviation of the driving noise; 0 gives a free response.
    n : int
        Number of samples returned.
    seed : int
    initial : array_like, optional
        The ``p`` samples preceding the burn-in, oldest first. Zeros by
        default.

    Notes
    -----
    ``10 * p`` burn-in samples are generated and discarded before the ``n``
    returned samples.
    """
    coeffs = np.asarray(coeffs, dtype=float).reshape(-1)
    if not is_stable(coeffs):
        raise UnstableModel(f"AR polynomial has a root on or outside the unit circle: {coeffs}")
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")
    p = coeffs.size
    burn = 10 * p
    rng = rng_from(seed)
    noise = noise_std * rng.standard_normal(n + burn)
    init = np.zeros(p) if initial is None else np.asarray(initial, dtype=float).reshape(-1)
    if init.size != p:
        raise ValueError("initial state must have one value per coefficient")
    x = kernels.ar_recursion(coeffs, noise, init)
    return TimeSeries(x[burn:], sample_rate)


def gen_two_sinusoids(f1, f2, snr_db, n, seed):
    """Two unit-amplitude sinusoids with random phases plus white noise.

    Frequencies are normalized (cycles/sample). The noise variance is set
    from the power of the clean realization.
    """
    for f in (f1, f2):
        if not 0.0 < f < 0.5:
            raise ValueError("frequencies must lie in (0, 0.5)")
    if f1 == f2:
        raise DegenerateSignal("the two sinusoid frequencies coincide")
    rng = rng_from(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=2)
    t = np.arange(n)
    clean = np.cos(2 * np.pi * f1 * t + phases[0]) + np.cos(2 * np.pi * f2 * t + phases[1])
    noise_power = np.mean(clean ** 2) / 10.0 ** (snr_db / 10.0)
    x = clean + np.sqrt(noise_power) * rng.standard_normal(n)
    return TimeSeries(x)


def draw_frequency_pair(rng, low=0.05, high=0.45, min_separation=0.05):
    """Uniform pair in ``(low, high)`` at least ``min_separation`` apart."""
    while True:
        f1, f2 = rng.uniform(low, high, size=2)
        if abs(f1 - f2) >= min_separation:
            return float(f1), float(f2)


def sample_gaussian(sigma, n, seed):
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    return sigma * rng_from(seed).standard_normal(n)


def sample_laplace(sigma, n, seed):
    """Laplace draws with standard deviation ``sigma`` (scale ``sigma/sqrt 2``)."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    return rng_from(seed).laplace(0.0, sigma / np.sqrt(2.0), size=n)


def formant_coeffs(rng, order=10, radius=(0.85, 0.97)):
    """Stable AR coefficients from ``order // 2`` random resonant pole pairs."""
    if order % 2:
        raise ValueError("formant models need an even order")
    pairs = order // 2
    edges = np.linspace(0.02, 0.48, pairs + 1)
    poly = np.array([1.0])
    for i in range(pairs):
        f = rng.uniform(edges[i], edges[i + 1])
        rad = rng.uniform(*radius)
        pole = rad * np.exp(2j * np.pi * f)
        poly = np.convolve(poly, [1.0, -2.0 * pole.real, rad * rad])
    return -poly[1:].real


def gen_speech_like(n, seed, order=10, spike_fraction=0.02, spike_scale=30.0,
                    noise_std=1.0, sample_rate=8000.0):
    """AR resonator driven by Gaussian noise plus sparse heavy spikes.

    ``round(spike_fraction * n)`` excitation samples receive an extra
    impulse of random sign and magnitude ``spike_scale * noise_std * (1 + E)``
    with ``E`` standard exponential.
    """
    rng = rng_from(seed)
    coeffs = formant_coeffs(rng, order)
    excitation = noise_std * rng.standard_normal(n)
    count = int(round(spike_fraction * n))
    if count:
        pos = rng.choice(n, size=count, replace=False)
        mag = spike_scale * noise_std * (1.0 + rng.standard_exponential(count))
        excitation[pos] += rng.choice([-1.0, 1.0], size=count) * mag
    x = kernels.ar_recursion(coeffs, excitation, np.zeros(order))
    return TimeSeries(x, sample_rate), coeffs
