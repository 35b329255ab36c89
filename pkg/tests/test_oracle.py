"""Dense reference path: shift matrices, projections, synthetic mixtures."""

import numpy as np
import pytest
import refimpl

from fastsdr.errors import SizeCapError
from fastsdr.oracle import (
    SIZE_CAP,
    Decomposition,
    MixtureSpec,
    build_projections,
    decompose,
    generate_mixture,
    metrics_via_decomposition,
    shift_matrix,
)
from fastsdr.signals import normalize_unit_norm
from fastsdr.solvers import default_loading


def unit_rows(rng, shape):
    return normalize_unit_norm(rng.standard_normal(shape)).samples


def test_shift_matrix_matches_naive_construction():
    rng = np.random.default_rng(60)
    s = rng.standard_normal(12)
    A = shift_matrix(s, 4)
    assert A.shape == (15, 4)
    assert np.array_equal(A, refimpl.naive_shift_matrix(s, 4))
    with pytest.raises(ValueError):
        shift_matrix(s.reshape(2, 6), 4)


def test_build_projections_match_naive_solve():
    rng = np.random.default_rng(61)
    K, T, L = 2, 80, 5
    refs = unit_rows(rng, (K, T))
    per_k, joint = build_projections(refs, L)

    lams = [default_loading(float(refs[k] @ refs[k]), L) for k in range(K)]
    for k in range(K):
        A = refimpl.naive_shift_matrix(refs[k], L)
        G = A.T @ A + lams[k] * np.eye(L)
        P = A @ np.linalg.solve(G, A.T)
        assert np.abs(per_k[k] - P).max() < 1e-10

    A = np.hstack([refimpl.naive_shift_matrix(refs[k], L) for k in range(K)])
    G = A.T @ A + np.diag(np.repeat(lams, L))
    P = A @ np.linalg.solve(G, A.T)
    assert np.abs(joint - P).max() < 1e-10


def test_projections_are_symmetric_and_nearly_idempotent():
    rng = np.random.default_rng(62)
    refs = unit_rows(rng, (2, 100))
    per_k, joint = build_projections(refs, 6)
    for P in (*per_k, joint):
        assert np.abs(P - P.T).max() < 1e-12
        # loading keeps P only approximately idempotent
        assert np.abs(P @ P - P).max() < 1e-8


def test_decomposition_additivity():
    rng = np.random.default_rng(63)
    K, T, L = 3, 90, 4
    refs = unit_rows(rng, (K, T))
    est = unit_rows(rng, (1, T))[0]
    padded = np.concatenate([est, np.zeros(L - 1)])
    for dec in decompose(refs, est, L):
        assert np.abs(dec.estimate - padded).max() < 1e-12


def test_decompose_validates_estimate():
    refs = np.ones((1, 20))
    with pytest.raises(ValueError):
        decompose(refs, np.ones(19), 4)
    with pytest.raises(ValueError):
        decompose(refs, np.ones((2, 20)), 4)


def test_metrics_via_decomposition_closed_form():
    # orthogonal unit components with known energies: the fractions reduce
    # to 10 log10 of plain energy ratios
    t = np.zeros(8)
    t[0] = 3.0
    ei = np.zeros(8)
    ei[1] = 2.0
    ea = np.zeros(8)
    ea[2] = 1.0
    sdr, sir, sar = metrics_via_decomposition(Decomposition(t, ei, ea))
    assert sdr == pytest.approx(10 * np.log10(9.0 / 5.0), abs=1e-12)
    assert sir == pytest.approx(10 * np.log10(9.0 / 4.0), abs=1e-12)
    assert sar == pytest.approx(10 * np.log10(13.0 / 1.0), abs=1e-12)


def test_metrics_via_decomposition_clamps_perfect_reconstruction():
    t = np.ones(4)
    zero = np.zeros(4)
    sdr, sir, sar = metrics_via_decomposition(Decomposition(t, zero, zero))
    bound = 10 * np.log10((1 - 1e-12) / 1e-12)
    assert sdr == pytest.approx(bound)
    assert sir == pytest.approx(bound)
    assert sar == pytest.approx(bound)


def test_generate_mixture_identity_filters_reproduce_references():
    rng = np.random.default_rng(64)
    refs = rng.standard_normal((2, 64))
    ident = np.zeros((2, 2, 1))
    ident[0, 0, 0] = 1.0
    ident[1, 1, 0] = 1.0
    mix = MixtureSpec(
        num_estimates=2,
        filter_taps=1,
        filters=ident,
        gains=np.eye(2),
        noise=np.zeros((2, 64)),
    )
    ests = generate_mixture(refs, mix, seed=0)
    assert np.array_equal(ests.samples, refs)


def test_generate_mixture_is_deterministic_and_shaped():
    rng = np.random.default_rng(65)
    refs = rng.standard_normal((3, 120))
    mix = MixtureSpec(num_estimates=2, filter_taps=6, noise_scale=0.1)
    a = generate_mixture(refs, mix, seed=7)
    b = generate_mixture(refs, mix, seed=7)
    c = generate_mixture(refs, mix, seed=8)
    assert a.samples.shape == (2, 120)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_mixture_spec_validation():
    with pytest.raises(ValueError):
        MixtureSpec(num_estimates=0)
    with pytest.raises(ValueError):
        MixtureSpec(num_estimates=1, filter_taps=0)
    with pytest.raises(ValueError):
        MixtureSpec(num_estimates=1, noise_scale=-0.1)
    refs = np.ones((1, 10))
    with pytest.raises(ValueError):
        generate_mixture(refs, MixtureSpec(num_estimates=1, filter_taps=9))


def test_size_cap_is_enforced():
    refs = np.ones((1, SIZE_CAP + 10))
    with pytest.raises(SizeCapError):
        shift_matrix(refs[0], 8)
    with pytest.raises(SizeCapError):
        decompose(refs, np.ones(SIZE_CAP + 10), 8)
