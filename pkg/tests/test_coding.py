import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparsear.coding import (
    ClipSpec,
    PipelineConfig,
    QuantizerSpec,
    analytic_entropy_gaussian,
    analytic_entropy_laplace,
    clip_bounds,
    clip_residual,
    clip_to_bounds,
    code_frames,
    code_residuals,
    delta_entropy,
    empirical_entropy,
    frame_residuals,
    nats_to_bits,
    plugin_differential_entropy,
    snr_db,
    sweep_k,
    uniform_quantize,
    zero_level_index,
)
from sparsear.errors import DegenerateSignal, InvalidConfig, InvalidSigma, OutOfRange
from sparsear.signal import TimeSeries, gen_speech_like, sample_gaussian, sample_laplace

# magnitudes below 1e-100 square to (sub)normal noise, treat them as zero
finite = st.floats(-1e3, 1e3, allow_nan=False).map(lambda v: 0.0 if abs(v) < 1e-100 else v)
vectors = arrays(np.float64, st.integers(1, 80), elements=finite)
# all-zero residuals are rejected by clipping, see test_all_zero_rejected
nonzero = vectors.filter(lambda v: np.any(v))


class TestClip:
    def test_identity(self):
        r = np.array([-3.0, 1.0, 2.0])
        out, n = clip_residual(r, ClipSpec(1.0))
        assert np.array_equal(out, r) and n == 0

    def test_hand_example(self):
        out, n = clip_residual(np.array([-4.0, -1, 0, 2, 8]), ClipSpec(0.5))
        assert out.tolist() == [-2, -1, 0, 2, 4] and n == 2

    def test_constant_positive(self):
        out, n = clip_residual(np.full(5, 2.0), ClipSpec(0.5))
        assert np.all(out == 1.0) and n == 5

    @pytest.mark.parametrize("k", [0.0, -0.1, 1.5])
    def test_bad_k(self, k):
        with pytest.raises(InvalidConfig):
            ClipSpec(k)

    def test_all_zero_rejected(self):
        with pytest.raises(DegenerateSignal):
            clip_residual(np.zeros(4), ClipSpec(0.5))
        out, n = clip_residual(np.zeros(4), ClipSpec(1.0))
        assert n == 0

    @given(nonzero, st.floats(0.01, 1.0))
    def test_idempotent(self, r, k):
        once, _ = clip_residual(r, ClipSpec(k))
        lo, hi = clip_bounds(r, ClipSpec(k))
        assert np.all(once >= lo) and np.all(once <= hi)
        twice, n = clip_to_bounds(once, lo, hi)
        assert np.array_equal(once, twice) and n == 0

    @given(nonzero, st.floats(0.01, 1.0), st.floats(0.01, 1.0))
    def test_error_monotone(self, r, k1, k2):
        lo, hi = sorted((k1, k2))
        e_lo = np.abs(clip_residual(r, ClipSpec(lo))[0] - r)
        e_hi = np.abs(clip_residual(r, ClipSpec(hi))[0] - r)
        assert np.all(e_hi <= e_lo + 1e-12)


class TestQuantize:
    def test_constant_input(self):
        idx, _, _ = uniform_quantize(np.full(10, 0.3), QuantizerSpec(256, 0.0, 1.0))
        assert len(set(idx.tolist())) == 1 and empirical_entropy(idx) == 0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            uniform_quantize(np.array([2.0]), QuantizerSpec(4, -1.0, 1.0))

    def test_bad_spec(self):
        with pytest.raises(InvalidConfig):
            QuantizerSpec(1, 0, 1)
        with pytest.raises(InvalidConfig):
            QuantizerSpec(4, 1, 1)

    @given(vectors, st.integers(2, 512))
    def test_half_step(self, r, levels):
        lo, hi = float(r.min()), float(r.max())
        if hi <= lo:
            hi = lo + 1.0
        spec = QuantizerSpec(levels, lo, hi)
        idx, recon, step = uniform_quantize(r, spec)
        assert np.max(np.abs(r - recon)) <= step / 2 * (1 + 1e-9)
        assert idx.min() >= 0 and idx.max() < levels
        assert empirical_entropy(idx) <= math.log2(levels) + 1e-12

    def test_zero_level(self):
        spec = QuantizerSpec(4, -1.0, 1.0)
        assert zero_level_index(spec) == 2
        assert zero_level_index(QuantizerSpec(4, 0.5, 1.0)) == -1


class TestEntropy:
    def test_symbols(self):
        assert empirical_entropy([3] * 9) == 0
        assert empirical_entropy([0, 1] * 50) == pytest.approx(1.0)
        assert empirical_entropy(np.arange(256)) == pytest.approx(8.0)

    def test_closed_forms(self):
        assert analytic_entropy_gaussian(1.0) == pytest.approx(1.4189385, abs=1e-6)
        assert analytic_entropy_laplace(1.0) == pytest.approx(1.3465736, abs=1e-6)
        for h in (analytic_entropy_gaussian, analytic_entropy_laplace):
            assert h(2.0) - h(1.0) == pytest.approx(math.log(2))

    def test_delta(self):
        assert delta_entropy(1.0, 1.0) == pytest.approx(0.5 * math.log(math.pi / math.e), abs=1e-15)
        assert delta_entropy(math.sqrt(math.e / math.pi), 1.0) == pytest.approx(0.0, abs=1e-15)

    @given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
    def test_delta_identity(self, sg, sl):
        ref = analytic_entropy_gaussian(sg) - analytic_entropy_laplace(sl)
        assert delta_entropy(sg, sl) == pytest.approx(ref, abs=1e-12)

    @pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
    def test_sigma_guard(self, bad):
        with pytest.raises(InvalidSigma):
            delta_entropy(bad, 1.0)

    def test_plugin_converges(self):
        g = sample_gaussian(1.0, 10 ** 6, 0)
        assert plugin_differential_entropy(g) == pytest.approx(
            analytic_entropy_gaussian(1.0), abs=0.01)

    def test_bits(self):
        assert nats_to_bits(math.log(2)) == pytest.approx(1.0)


class TestSNR:
    def test_examples(self):
        x = np.ones(4)
        assert snr_db(x, x) == math.inf
        assert snr_db(x, np.zeros(4)) == pytest.approx(0.0)
        assert snr_db(x, x - 0.1) == pytest.approx(20.0)

    def test_zero_signal(self):
        with pytest.raises(DegenerateSignal):
            snr_db(np.zeros(3), np.ones(3))


class TestPipeline:
    @pytest.fixture
    def speech(self):
        return gen_speech_like(3200, 5)[0]

    def test_quantization_only_at_k1(self, speech):
        cfg = PipelineConfig(method="ols")
        rep = code_frames(speech, cfg)
        assert rep.clipped_percent == 0
        res = frame_residuals(speech, cfg)
        noise = sum(r.size * ((r.max() - r.min()) / 256) ** 2 / 12 for r in res)
        ref = 10 * math.log10(sum(np.sum(r * r) for r in res) / noise)
        assert rep.snr_db == pytest.approx(ref, abs=0.5)

    def test_single_k_matches_code_frames(self, speech):
        cfg = PipelineConfig(method="ols", clip=ClipSpec(0.4))
        assert sweep_k(speech, cfg, [0.4])[0] == code_frames(speech, cfg)

    def test_jobs_invariant(self, speech):
        cfg = PipelineConfig(method="robust")
        assert sweep_k(speech, cfg, [1, 0.3], jobs=1) == sweep_k(speech, cfg, [1, 0.3], jobs=3)

    @given(st.lists(nonzero, min_size=1, max_size=4),
           st.lists(st.floats(0.05, 1.0), min_size=2, max_size=6),
           st.sampled_from(["frame", "clipped"]))
    def test_clipped_monotone(self, res, ks, qr):
        ks = sorted(ks)
        reps = [code_residuals(res, k, 256, qr) for k in ks]
        pct = [r.clipped_percent for r in reps]
        assert all(a >= b for a, b in zip(pct, pct[1:]))
        for r in reps:
            assert 0 <= r.clipped_percent <= 100 and 0 <= r.zero_level_percent <= 100
            assert r.entropy_bits <= 8 + 1e-12

    def test_config_rejects(self):
        with pytest.raises(InvalidConfig):
            PipelineConfig(method="yule_walker")
        with pytest.raises(InvalidConfig):
            PipelineConfig(frame_length=20, order=10)
        with pytest.raises(InvalidConfig):
            PipelineConfig(quant_range="global")

    def test_all_zero_signal(self):
        with pytest.raises(DegenerateSignal):
            code_frames(TimeSeries(np.zeros(400)), PipelineConfig())

    def test_short_signal(self):
        with pytest.raises(DegenerateSignal):
            code_frames(TimeSeries(np.ones(100)), PipelineConfig())


def test_gaussian_vs_laplace_gap():
    g = sample_gaussian(1.0, 10 ** 6, 1)
    lap = sample_laplace(1.0, 10 ** 6, 2)
    gap = plugin_differential_entropy(g) - plugin_differential_entropy(lap)
    assert gap == pytest.approx(delta_entropy(1.0, 1.0), abs=0.01)
