import itertools
import math

import numpy as np
import pytest

from rcldpc.channel import ChannelSpec, FadingRealization, block_index, llr, modulate, rayleigh, sample_fading, transmit
from rcldpc.codec import LinearCode, accumulate, build_generator, encode, puncture, syndrome, systematic_form
from rcldpc.construction import construct
from rcldpc.errors import LengthMismatch, SingularMatrix
from rcldpc.gf2 import BitMatrix, multiply, rank
from rcldpc.scaffold import CodeFamily

# -- codec ----------------------------------------------------------------------


def test_repetition_generator():
    g = build_generator(BitMatrix.from_dense([[1, 1]]), 1)
    assert g.to_dense().tolist() == [[1, 1]]


def test_generator_singular_parity():
    h = BitMatrix.from_dense([[1, 0, 1, 1], [0, 1, 1, 1]])
    with pytest.raises(SingularMatrix):
        build_generator(h, 2)


def test_accumulator_running_xor():
    x = np.array([1, 0, 1, 1, 0, 1, 1, 1, 0], dtype=np.uint8)
    assert accumulate(x).tolist() == [1, 1, 0, 1, 1, 0, 1, 0, 0]


def test_accumulator_with_lag_matches_recursion():
    rng = np.random.default_rng(0)
    x = rng.integers(0, 2, 12).astype(np.uint8)
    p = accumulate(x, 4)
    for t in range(12):
        want = x[t] ^ (p[t - 1] if t >= 1 else 0) ^ (p[t - 4] if t >= 4 else 0)
        assert p[t] == want


def test_zero_word():
    code = construct(CodeFamily("IRA_RC_half", 40, 2, seed=0))
    assert not encode(code, np.zeros(code.k, np.uint8)).any()


KINDS = [
    ("RA", 48, 2),
    ("IRA_RC_half", 48, 2),
    ("IRA_RC_third", 36, 3),
    ("IRAA_RC_half", 36, 2),
    ("IRAA_RC_third", 45, 3),
    ("PEG_baseline", 48, 2),
    ("IRA_RC_half", 48, "fast"),
]


@pytest.mark.parametrize("kind,n,f", KINDS)
def test_paths_agree_and_syndrome_zero(kind, n, f):
    code = construct(CodeFamily(kind, n, f, seed=4))
    assert rank(code.h) == code.m
    assert multiply(code.generator, code.h.T).nnz == 0
    rng = np.random.default_rng(5)
    u = rng.integers(0, 2, (64, code.k)).astype(np.uint8)
    a = encode(code, u, "accumulator" if code.stages else "generator")
    b = encode(code, u, "generator")
    assert np.array_equal(a, b)
    assert np.array_equal(a[:, : code.k], u)
    assert not syndrome(code.h, a).any()


def test_exhaustive_small_k():
    code = construct(CodeFamily("IRA_RC_half", 24, 2, seed=1))
    assert code.k == 12
    u = np.array(list(itertools.product((0, 1), repeat=12)), dtype=np.uint8)
    assert np.array_equal(encode(code, u, "accumulator"), encode(code, u, "generator"))


def test_syndrome_linearity_and_oracle():
    code = construct(CodeFamily("IRA_RC_third", 36, 3, seed=2))
    c = encode(code, np.random.default_rng(3).integers(0, 2, code.k).astype(np.uint8))
    c[7] ^= 1
    assert np.array_equal(syndrome(code.h, c), code.h.to_dense()[:, 7])
    v = np.random.default_rng(4).integers(0, 2, code.n_pre).astype(np.uint8)
    d = code.h.to_dense()
    naive = [sum(int(d[i, j]) * int(v[j]) for j in range(code.n_pre)) % 2 for i in range(code.m)]
    assert syndrome(code.h, v).tolist() == naive


def test_puncture_rates_and_order():
    third = construct(CodeFamily("IRAA_RC_third", 45, 3, seed=0))
    half = construct(CodeFamily("IRAA_RC_half", 36, 2, seed=0))
    assert third.rate == pytest.approx(1 / 3) and half.rate == pytest.approx(1 / 2)
    c = encode(third, np.ones(third.k, np.uint8))
    tx = puncture(third, c)
    assert len(tx) == third.n_tx
    assert np.array_equal(tx, c[third.transmitted_cols])
    plain = construct(CodeFamily("IRA_RC_half", 40, 2, seed=0))
    c = encode(plain, np.ones(plain.k, np.uint8))
    assert np.array_equal(puncture(plain, c), c)


def test_systematic_form_reorders_columns():
    rng = np.random.default_rng(6)
    code = construct(CodeFamily("IRA_RC_half", 40, 2, seed=0))
    perm = rng.permutation(code.n_pre)
    h_sys, order, k = systematic_form(code.h.select_columns(perm))
    assert k == code.k
    LinearCode(h_sys, k)  # builds, i.e. the trailing block is invertible
    assert sorted(order.tolist()) == list(range(code.n_pre))


# -- channel ----------------------------------------------------------------------


def test_modulate():
    assert modulate([0, 1, 0]).tolist() == [1.0, -1.0, 1.0]
    assert (modulate(np.zeros(5)) == 1).all()


def test_fading_moments_and_shape():
    h = rayleigh(np.random.default_rng(0), 1_000_000)
    assert abs(np.mean(h**2) - 1.0) < 0.01
    spec = ChannelSpec(10.0, 0.5, 2)
    f1 = sample_fading(spec, np.random.default_rng(1))
    f2 = sample_fading(spec, np.random.default_rng(1))
    assert len(f1.h) == 2 and np.array_equal(f1.h, f2.h)
    assert len(sample_fading(ChannelSpec(10.0, 0.5), np.random.default_rng(1), 7).h) == 7


def test_block_mapping_contiguous():
    assert block_index(4, 2).tolist() == [0, 0, 1, 1]
    assert block_index(7, 3).tolist() == [0, 0, 1, 1, 2, 2, 2]
    spec = ChannelSpec(math.inf, 0.5, 2)
    r = transmit(np.ones(4), FadingRealization(np.array([0.5, 2.0])), spec, np.random.default_rng(0))
    assert r.tolist() == [0.5, 0.5, 2.0, 2.0]


def test_noiseless_identity_and_hard_decision():
    spec = ChannelSpec(math.inf, 0.5, 1)
    c = np.array([0, 1, 1, 0, 1], dtype=np.uint8)
    r = transmit(modulate(c), FadingRealization(np.ones(1)), spec, np.random.default_rng(0))
    assert np.array_equal(r, modulate(c))
    assert np.array_equal((r < 0).astype(np.uint8), c)


def test_noise_variance():
    spec = ChannelSpec(3.0, 0.5, 1)
    s = np.ones(100_000)
    h = FadingRealization(np.array([0.7]))
    r = transmit(s, h, spec, np.random.default_rng(2))
    assert np.var(r - 0.7 * s) == pytest.approx(spec.n0 / 2, rel=0.02)


def test_llr_formula_and_puncturing():
    # N0 = 2 <=> 1 / (R * snr) = 2 with R = 1/2 and snr = 1 (0 dB)
    spec = ChannelSpec(0.0, 0.5, 1)
    assert spec.n0 == pytest.approx(2.0)
    out = llr(np.array([1.0]), FadingRealization(np.ones(1)), spec)
    assert out.tolist() == pytest.approx([2.0])
    out = llr(np.array([1.0, -1.0]), FadingRealization(np.ones(1)), spec, puncture_cols=[1], n_pre=3)
    assert out.tolist() == pytest.approx([2.0, 0.0, -2.0])
    with pytest.raises(LengthMismatch):
        llr(np.ones(2), FadingRealization(np.ones(1)), spec, puncture_cols=[1], n_pre=5)


def test_llr_limits():
    f = FadingRealization(np.ones(1))
    assert (llr(np.array([0.3, -0.2]), f, ChannelSpec(-math.inf, 0.5, 1)) == 0).all()
    assert llr(np.array([0.3, -0.2]), f, ChannelSpec(math.inf, 0.5, 1)).tolist() == [math.inf, -math.inf]
