"""Series ingestion from text and WAV files."""

from __future__ import annotations

import math
import wave

import numpy as np

from .errors import ParseError, SeriesIOError, UnsupportedFormat
from .signal import TimeSeries

FORMATS = ("csv", "wav")
PCM16_SCALE = 32768.0


def _read_csv(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise SeriesIOError(f"cannot read {path}: {exc}") from exc
    values = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            v = float(text)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: not a number: {text!r}", line=lineno) from None
        if not math.isfinite(v):
            raise ParseError(f"{path}:{lineno}: non-finite value {text!r}", line=lineno)
        values.append(v)
    if not values:
        raise ParseError(f"{path}: no samples found", line=0)
    return TimeSeries(np.array(values))


def _read_wav(path):
    try:
        with wave.open(str(path), "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            if channels != 1:
                raise UnsupportedFormat(f"{path}: {channels} channels, only mono is supported")
            if width != 2:
                raise UnsupportedFormat(
                    f"{path}: {8 * width}-bit samples, only 16-bit PCM is supported")
            raw = wf.readframes(wf.getnframes())
    except UnsupportedFormat:
        raise
    except wave.Error as exc:
        # the stdlib reports non-PCM encodings as wave.Error
        raise UnsupportedFormat(f"{path}: {exc}") from exc
    except (OSError, EOFError) as exc:
        raise SeriesIOError(f"cannot read {path}: {exc}") from exc
    pcm = np.frombuffer(raw, dtype="<i2")
    return TimeSeries(pcm.astype(float) / PCM16_SCALE, sample_rate=float(rate))


def read_series(path, format=None):
    """Load a :class:`TimeSeries` from ``path``.

    Parameters
    ----------
    path : str or path-like
    format : {"csv", "wav"}, optional
        Inferred from the file extension when omitted; anything other than
        ``.wav`` is read as CSV.

    Notes
    -----
    CSV files carry one decimal per line; blank lines and lines starting
    with ``#`` are skipped. WAV files must be 16-bit PCM mono and are scaled
    by 1/32768, so -32768 maps to -1.0 exactly.
    """
    if format is None:
        format = "wav" if str(path).lower().endswith(".wav") else "csv"
    if format not in FORMATS:
        raise UnsupportedFormat(f"unknown input format {format!r}")
    if format == "wav":
        return _read_wav(path)
    return _read_csv(path)
