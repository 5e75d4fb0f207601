import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.signal import lfilter

from sparsear.coding import plugin_differential_entropy
from sparsear.errors import DegenerateSignal, InvalidFraction, UnstableModel
from sparsear.signal import (
    MissingMask,
    TimeSeries,
    apply_missing,
    child_seeds,
    draw_frequency_pair,
    formant_coeffs,
    frame_split,
    gen_ar_process,
    gen_speech_like,
    gen_two_sinusoids,
    is_stable,
    rng_from,
    sample_gaussian,
    sample_laplace,
)


def ts(n):
    return TimeSeries(np.arange(1.0, n + 1))


class TestTimeSeries:
    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            TimeSeries([1.0, np.nan])

    def test_mask_length(self):
        with pytest.raises(ValueError):
            TimeSeries([1.0, 2.0], mask=[True])

    def test_missing_count(self):
        assert MissingMask([True, False, False, True]).missing_count == 2


class TestFrameSplit:
    def test_drops_tail(self):
        frames = frame_split(ts(10), 4)
        assert len(frames) == 2
        assert frames[1].samples.tolist() == [5, 6, 7, 8]

    def test_exact_cover(self):
        frames = frame_split(ts(8), 4)
        assert np.concatenate([f.samples for f in frames]).tolist() == list(range(1, 9))

    def test_short_series(self):
        assert frame_split(ts(3), 4) == []


class TestApplyMissing:
    def test_quarter_of_64(self):
        out, mask = apply_missing(ts(64), 0.25, 1)
        assert mask.missing_count == 16
        assert np.all(out.samples[~mask.present] == 0)
        assert np.array_equal(out.samples[mask.present], ts(64).samples[mask.present])

    def test_zero_fraction(self):
        src = ts(30)
        out, mask = apply_missing(src, 0.0, 1)
        assert mask.missing_count == 0
        assert np.array_equal(out.samples, src.samples)

    @pytest.mark.parametrize("frac", [1.0, -0.1, 0.95])
    def test_bad_fraction(self, frac):
        with pytest.raises(InvalidFraction):
            apply_missing(ts(10), frac, 0)

    @given(st.integers(1, 200), st.floats(0, 0.9), st.integers(0, 2**32))
    def test_count_property(self, n, frac, seed):
        _, mask = apply_missing(ts(n), frac, seed)
        assert mask.missing_count == int(round(frac * n))


class TestGenAR:
    def test_free_decay(self):
        # with zero noise the burn-in only shifts the exponent
        x = gen_ar_process([0.9], 0.0, 20, 0, initial=[1.0]).samples
        t = np.arange(20) + 10 + 1
        assert np.allclose(x, 0.9 ** t, rtol=0, atol=1e-14)

    def test_unstable(self):
        with pytest.raises(UnstableModel):
            gen_ar_process([1.1], 1.0, 10, 0)

    def test_determinism(self):
        a = gen_ar_process([0.5, -0.3], 1.0, 100, 7).samples
        b = gen_ar_process([0.5, -0.3], 1.0, 100, 7).samples
        assert np.array_equal(a, b)

    def test_matches_lfilter(self):
        coeffs = np.array([1.2, -0.6, 0.1])
        x = gen_ar_process(coeffs, 1.0, 200, 3).samples
        noise = rng_from(3).standard_normal(200 + 30)
        ref = lfilter([1.0], np.concatenate(([1.0], -coeffs)), noise)[30:]
        assert np.allclose(x, ref, atol=1e-10)


class TestSinusoids:
    def test_fft_peaks(self):
        n = 512
        f1, f2 = 50 / n, 130 / n
        x = gen_two_sinusoids(f1, f2, 200.0, n, 0).samples
        mag = np.abs(np.fft.rfft(x))
        top = sorted(np.argsort(mag)[-2:])
        assert top == [50, 130]

    def test_determinism(self):
        a = gen_two_sinusoids(0.1, 0.3, 10, 64, 5).samples
        assert np.array_equal(a, gen_two_sinusoids(0.1, 0.3, 10, 64, 5).samples)

    def test_equal_frequencies(self):
        with pytest.raises(DegenerateSignal):
            gen_two_sinusoids(0.2, 0.2, 10, 64, 0)

    def test_snr_definition(self):
        n = 4096
        x = gen_two_sinusoids(0.1, 0.27, 10.0, n, 11).samples
        clean = gen_two_sinusoids(0.1, 0.27, 400.0, n, 11).samples
        noise = x - clean
        snr = 10 * np.log10(np.mean(clean ** 2) / np.mean(noise ** 2))
        assert abs(snr - 10.0) < 0.3

    def test_pair_separation(self):
        rng = rng_from(0)
        for _ in range(200):
            f1, f2 = draw_frequency_pair(rng)
            assert abs(f1 - f2) >= 0.05 and 0.05 <= min(f1, f2) and max(f1, f2) <= 0.45


class TestSamplers:
    def test_zero_sigma(self):
        assert not np.any(sample_gaussian(0.0, 10, 1))
        assert not np.any(sample_laplace(0.0, 10, 1))

    @pytest.mark.parametrize("sampler", [sample_gaussian, sample_laplace])
    def test_unit_variance(self, sampler):
        x = sampler(1.0, 10 ** 6, 2)
        assert abs(x.var() - 1.0) < 0.02

    def test_laplace_entropy(self):
        x = sample_laplace(1.0, 10 ** 6, 3)
        assert abs(plugin_differential_entropy(x) - np.log(np.sqrt(2) * np.e)) < 0.01


class TestSeeds:
    def test_child_seeds_stable(self):
        assert child_seeds(42, 1, 2) == child_seeds(42, 1, 2)
        assert child_seeds(42, 1, 2) != child_seeds(42, 2, 1)

    def test_count_prefix(self):
        # derived seeds do not depend on how many are requested
        assert child_seeds(42, 0, count=5)[:3] == child_seeds(42, 0, count=3)


@given(st.integers(0, 2**32), st.sampled_from([2, 4, 10, 12]))
def test_formant_models_stable(seed, order):
    assert is_stable(formant_coeffs(rng_from(seed), order))


def test_speech_like_deterministic():
    a, ca = gen_speech_like(2000, 9)
    b, cb = gen_speech_like(2000, 9)
    assert np.array_equal(a.samples, b.samples) and np.array_equal(ca, cb)
    assert a.sample_rate == 8000.0
