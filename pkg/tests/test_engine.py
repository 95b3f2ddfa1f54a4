import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmlab import curves
from bmlab.engine import (
    ExponentTriple,
    SampledFunction,
    apply_bilinear,
    carleson_hunt_maximal,
    frequency_project,
    holder_chain_check,
    lp_norm,
    make_trial_pair,
    mixed_norm,
    norm_probe,
    square_function_report,
)
from bmlab.intervals import HalfOpenInterval, build_hyp_collection
from bmlab.symbols import SymbolSpec, constant_symbol, rectangle_symbol, staircase_symbol

from oracles import bilinear_double_sum


def random_function(rng, N=64, L=16.0):
    return SampledFunction(rng.normal(size=N) + 1j * rng.normal(size=N), L)


def sparse_function(rng, N=64, L=16.0, m=6):
    c = np.zeros(N, dtype=complex)
    slots = rng.choice(N, size=m, replace=False)
    c[slots] = rng.normal(size=m) + 1j * rng.normal(size=m)
    return SampledFunction.from_coeffs(c, L)


def test_roundtrip_precision(rng):
    f = random_function(rng, 256)
    back = SampledFunction.from_coeffs(f.coeffs(), f.L)
    assert np.max(np.abs(back.samples - f.samples)) < 1e-12 * np.max(np.abs(f.samples))


def test_sample_count_validation():
    with pytest.raises(ValueError):
        SampledFunction(np.zeros(48, dtype=complex), 1.0)
    with pytest.raises(ValueError):
        SampledFunction(np.zeros(64, dtype=complex), -1.0)


def test_identity_symbol_gives_product(rng):
    f = random_function(rng, 256)
    g = random_function(rng, 256)
    h = apply_bilinear(constant_symbol(1.0), f, g)
    assert h.N == 512
    err = np.max(np.abs(h.samples[::2] - f.samples * g.samples))
    assert err < 1e-10 * max(1.0, np.max(np.abs(f.samples * g.samples)))


def test_eta_independent_symbol_is_projection_times_g(rng):
    f = random_function(rng)
    g = random_function(rng)
    I = HalfOpenInterval(-0.7, 0.9)

    def ev(xi, eta):
        return I.contains(xi).astype(float) * np.ones(np.broadcast(xi, eta).shape)

    out = apply_bilinear(SymbolSpec(evaluator=ev), f, g)
    expect = frequency_project(f, I).samples * g.samples
    assert np.max(np.abs(out.samples[::2] - expect)) < 1e-10


def test_apply_bilinear_matches_double_sum(rng, hyperboloid_seq):
    sym = staircase_symbol(hyperboloid_seq.truncate(5))
    # exercise both a structured and a generic symbol
    rect = rectangle_symbol((-1.1, 0.3), (-0.2, 1.2))
    for symbol in (sym, rect):
        for _ in range(10):
            f = sparse_function(rng)
            g = sparse_function(rng)
            fast = apply_bilinear(symbol, f, g)
            slow = bilinear_double_sum(symbol, f, g)
            assert np.max(np.abs(fast.samples - slow)) < 1e-10


def test_mismatched_grids_rejected(rng):
    f = random_function(rng, 64)
    g = random_function(rng, 128)
    with pytest.raises(ValueError, match="mismatched"):
        apply_bilinear(constant_symbol(1.0), f, g)


def test_nan_symbol_rejected(rng):
    bad = SymbolSpec(evaluator=lambda xi, eta: np.full(np.broadcast(xi, eta).shape, np.nan))
    with pytest.raises(ValueError, match="undefined"):
        apply_bilinear(bad, random_function(rng), random_function(rng))


@given(st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=25, deadline=None)
def test_bilinearity(alpha_re, alpha_im):
    rng = np.random.default_rng(7)
    f1, f2, g = (random_function(rng) for _ in range(3))
    alpha = complex(alpha_re, alpha_im)
    sym = rectangle_symbol((-1.0, 1.0), (-1.0, 1.0))
    combo = SampledFunction(alpha * f1.samples + f2.samples, f1.L)
    lhs = apply_bilinear(sym, combo, g).samples
    rhs = alpha * apply_bilinear(sym, f1, g).samples + apply_bilinear(sym, f2, g).samples
    scale = max(1.0, np.max(np.abs(rhs)))
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * scale


def test_frequency_support_law(rng):
    A = (-0.9, -0.1)
    B = (0.3, 1.1)
    sym = rectangle_symbol(A, B)
    f = random_function(rng)
    g = random_function(rng)
    out = apply_bilinear(sym, f, g)
    freqs = out.freqs()
    outside = (freqs < A[0] + B[0]) | (freqs >= A[1] + B[1])
    assert np.max(np.abs(out.coeffs()[outside])) < 1e-12


def test_projection_idempotent_and_additive(rng):
    f = random_function(rng)
    I1 = HalfOpenInterval(-1.0, 0.0)
    I2 = HalfOpenInterval(0.0, 1.0)
    u = HalfOpenInterval(-1.0, 1.0)
    p1 = frequency_project(f, I1)
    assert np.max(np.abs(frequency_project(p1, I1).samples - p1.samples)) < 1e-14
    both = p1.samples + frequency_project(f, I2).samples
    assert np.max(np.abs(both - frequency_project(f, u).samples)) < 1e-12


def test_projection_single_exponential():
    N, L = 64, 16.0
    x = L * np.arange(N) / N
    xi0 = 5.0 / L
    f = SampledFunction(np.exp(2j * np.pi * xi0 * x), L)
    inside = frequency_project(f, HalfOpenInterval(xi0, xi0 + 0.01))
    outside = frequency_project(f, HalfOpenInterval(xi0 + 0.01, xi0 + 0.5))
    assert np.max(np.abs(inside.samples - f.samples)) < 1e-12
    assert np.max(np.abs(outside.samples)) < 1e-12
    full = frequency_project(f, HalfOpenInterval(-N / (2 * L), N / (2 * L)))
    assert np.max(np.abs(full.samples - f.samples)) < 1e-12


def test_carleson_single_exponential():
    N, L = 64, 8.0
    x = L * np.arange(N) / N
    c = 2.5 - 1.0j
    f = SampledFunction(c * np.exp(2j * np.pi * 3.0 / L * x), L)
    C = carleson_hunt_maximal(f)
    assert np.max(np.abs(C - abs(c))) < 1e-12


def test_carleson_dominates_projections(rng, hyperboloid_seq):
    coll = build_hyp_collection(hyperboloid_seq.truncate(8), "hyp2")
    for _ in range(100):
        g = random_function(rng, 128, 32.0)
        C = carleson_hunt_maximal(g)
        assert np.all(C >= np.abs(g.samples) - 1e-12)
        for iv in coll:
            proj = frequency_project(g, iv)
            assert np.all(np.abs(proj.samples) <= 2.0 * C + 1e-12)


def test_mixed_norm_constants():
    N, L = 64, 8.0
    c = 3.0 - 4.0j
    f = SampledFunction(np.full(N, c), L)
    for p in (1.5, 2.0, 4.0):
        assert abs(lp_norm(f, p) - abs(c) * L ** (1.0 / p)) < 1e-12
    two = mixed_norm([f, f], 2.0, inner="l2")
    assert abs(two - np.sqrt(2.0) * lp_norm(f, 2.0)) < 1e-12
    assert abs(mixed_norm([f, f], 2.0, inner="linf") - lp_norm(f, 2.0)) < 1e-12
    assert abs(mixed_norm([f], 3.0, inner=2.5) - lp_norm(f, 3.0)) < 1e-12


def test_parseval(rng):
    f = random_function(rng, 128)
    assert abs(lp_norm(f, 2.0) - np.linalg.norm(f.coeffs()) * np.sqrt(f.L)) < 1e-10


def test_mixed_norm_validation(rng):
    f = random_function(rng)
    with pytest.raises(ValueError):
        mixed_norm([f], 0.5)
    with pytest.raises(ValueError):
        mixed_norm([], 2.0)
    with pytest.raises(ValueError):
        mixed_norm([f, random_function(rng, 128)], 2.0)


def test_exponent_triple():
    e = ExponentTriple(3.0, 3.0, 3.0)
    assert abs(e.p3_dual - 1.5) < 1e-15
    assert e.local_L2
    assert ExponentTriple(2.0, 3.0, 6.0).local_L2
    assert not ExponentTriple(6.0, 1.5, 6.0).local_L2
    with pytest.raises(ValueError):
        ExponentTriple(2.0, 2.0, 3.0)
    with pytest.raises(ValueError):
        ExponentTriple(1.0, 4.0, 4.0)


def test_holder_chain_zero_input(hyperboloid_seq, rng):
    N, L = 128, 32.0
    z = SampledFunction(np.zeros(N, dtype=complex), L)
    g = random_function(rng, N, L)
    h = random_function(rng, N, L)
    rep = holder_chain_check(hyperboloid_seq.truncate(8), z, g, h, ExponentTriple(3, 3, 3))
    assert rep.lhs == 0.0 and rep.satisfied
    with pytest.raises(ValueError, match="nonzero"):
        holder_chain_check(hyperboloid_seq.truncate(8), z, g, z, ExponentTriple(3, 3, 3))


@pytest.mark.parametrize("triple", [(3, 3, 3), (2, 4, 4), (4, 2, 4), (2, 3, 6)])
def test_holder_chain_randomized(rng, hyperboloid_seq, triple):
    seq = hyperboloid_seq.truncate(8)
    e = ExponentTriple(*triple)
    for _ in range(200):
        f = random_function(rng, 128, 32.0)
        g = random_function(rng, 128, 32.0)
        h = random_function(rng, 128, 32.0)
        rep = holder_chain_check(seq, f, g, h, e)
        assert rep.satisfied
        assert rep.identity_gap <= 1e-8 * max(1.0, rep.lhs)
        assert rep.carleson_ok


def test_square_function_parseval(rng):
    f = random_function(rng, 128, 32.0)
    band = f.N / (2 * f.L)
    cover = [HalfOpenInterval(-band, 0.0), HalfOpenInterval(0.0, band + 1e-9)]
    rep = square_function_report(f, cover, 2.0)
    assert abs(rep["upper_ratio"] - 1.0) < 1e-10
    assert abs(rep["lower_ratio"] - 1.0) < 1e-10


def test_square_function_single_interval_support(rng):
    N, L = 128, 32.0
    c = np.zeros(N, dtype=complex)
    c[N // 2 + 3 : N // 2 + 7] = rng.normal(size=4) + 1j * rng.normal(size=4)
    f = SampledFunction.from_coeffs(c, L)
    coll = [HalfOpenInterval(2.5 / L, 7.5 / L), HalfOpenInterval(20.0 / L, 30.0 / L)]
    rep = square_function_report(f, coll, 4.0)
    assert abs(rep["upper_ratio"] - 1.0) < 1e-10
    assert rep["lower_ratio"] is None  # the family does not cover the band


def test_square_function_lacunary_stable_across_resolutions():
    coll = [HalfOpenInterval(2.0**k, 2.0**(k + 1)) for k in range(-3, 4)]
    coll += [HalfOpenInterval(-(2.0 ** (k + 1)), -(2.0**k)) for k in range(-3, 4)]
    ratios = []
    for N in (128, 256):
        rng = np.random.default_rng(99)
        vals = [
            square_function_report(random_function(rng, N, 32.0), coll, 4.0)["upper_ratio"]
            for _ in range(40)
        ]
        ratios.append(max(vals))
    assert all(np.isfinite(r) and r > 0 for r in ratios)
    assert max(ratios) <= 1.6 * min(ratios)  # recorded constant is resolution-stable


def test_square_function_zero_rejected():
    with pytest.raises(ValueError):
        square_function_report(SampledFunction(np.zeros(64, dtype=complex), 8.0), [], 2.0)


def test_norm_probe_reproducible_and_bounded():
    e = ExponentTriple(3.0, 3.0, 3.0)
    r1 = norm_probe(constant_symbol(1.0), e, trials=6, resolutions=[64, 128], seed=11, L=8.0)
    r2 = norm_probe(constant_symbol(1.0), e, trials=6, resolutions=[64, 128], seed=11, L=8.0)
    assert r1.as_dict() == r2.as_dict()
    assert max(row["max_ratio"] for row in r1.rows) <= 1.0 + 1e-6
    assert list(r1.csv_rows())[0][:3] == (3.0, 3.0, 3.0)


def test_norm_probe_rank_one_cross_check():
    e = ExponentTriple(4.0, 4.0, 2.0)
    A = (-0.8, -0.1)
    B = (0.2, 0.9)
    sym = rectangle_symbol(A, B)
    N, L = 64, 8.0
    for t in range(20):
        f, g = make_trial_pair("sparse_spectrum", (3, 0, 0, t), N, L)
        out = apply_bilinear(sym, f, g)
        pf = frequency_project(f, HalfOpenInterval(*A))
        pg = frequency_project(g, HalfOpenInterval(*B))
        ratio = lp_norm(out, e.p3_dual) / (lp_norm(f, e.p1) * lp_norm(g, e.p2))
        bound = (lp_norm(pf, e.p1) / lp_norm(f, e.p1)) * (lp_norm(pg, e.p2) / lp_norm(g, e.p2))
        assert ratio <= bound + 1e-9


def test_norm_probe_trial_validation():
    with pytest.raises(ValueError):
        norm_probe(constant_symbol(1.0), ExponentTriple(3, 3, 3), trials=0,
                   resolutions=[64], seed=1)
