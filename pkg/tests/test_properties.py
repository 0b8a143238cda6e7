"""Property-based invariants on randomized inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from bimult.linalg import adjoint, psd_project, schatten_norm, svd
from bimult.multiplier import apply_schur, apply_tau
from bimult.symbols import SchurSymbol, complex_normal, embed_schur, make_rng, sup_norm

dims = st.integers(min_value=1, max_value=5)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rand_matrix(seed, shape):
    return complex_normal(make_rng(seed), shape)


@given(seeds, dims, dims)
@settings(max_examples=30, deadline=None, derandomize=True)
def test_schatten_ordering_property(seed, n, m):
    a = rand_matrix(seed, (n, m))
    s1 = schatten_norm(a, 1)
    s2 = schatten_norm(a, 2)
    sinf = schatten_norm(a, "inf")
    assert s1 + 1e-12 >= s2 >= sinf - 1e-12
    assert abs(s1 - schatten_norm(adjoint(a), 1)) <= 1e-10 * (1 + s1)


@given(seeds, dims)
@settings(max_examples=25, deadline=None, derandomize=True)
def test_psd_project_idempotent_property(seed, n):
    h = rand_matrix(seed, (n, n))
    h = 0.5 * (h + h.conj().T)
    p = psd_project(h)
    assert np.linalg.eigvalsh(p)[0] >= -1e-12 * (1 + np.abs(p).max())
    assert np.abs(psd_project(p) - p).max() <= 1e-10 * (1 + np.abs(p).max())


@given(seeds, dims, dims)
@settings(max_examples=25, deadline=None, derandomize=True)
def test_svd_reconstruction_property(seed, n, m):
    a = rand_matrix(seed, (n, m))
    res = svd(a)
    assert np.linalg.norm(a - res.reconstruct()) <= 1e-10 * (1 + np.linalg.norm(a))
    r = res.sigma.size
    assert np.abs(res.u.conj().T @ res.u - np.eye(r)).max() <= 1e-10
    assert np.abs(res.v.conj().T @ res.v - np.eye(r)).max() <= 1e-10


@given(seeds, st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=25, deadline=None, derandomize=True)
def test_schur_action_bound_property(seed, n1, n2, n3):
    rng = make_rng(seed)
    s = SchurSymbol(complex_normal(rng, (n1, n2, n3)))
    x = complex_normal(rng, (n2, n1))
    y = complex_normal(rng, (n3, n2))
    out = apply_schur(s, y, x)
    bound = sup_norm(s) * np.linalg.norm(x) * np.linalg.norm(y)
    assert np.linalg.norm(out) <= bound * (1 + 1e-12) + 1e-15


@given(seeds, st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=20, deadline=None, derandomize=True)
def test_embedding_consistency_property(seed, n1, n2, n3):
    rng = make_rng(seed)
    s = SchurSymbol(complex_normal(rng, (n1, n2, n3)))
    x = complex_normal(rng, (n2, n1))
    y = complex_normal(rng, (n3, n2))
    lhs = apply_tau(embed_schur(s), y, x)
    rhs = apply_schur(s, y, x)
    assert np.abs(lhs - rhs).max() <= 1e-12 * (1 + np.abs(rhs).max())
