"""Weak factorizations of trace-class Schur multipliers.

A kernel s admitting a bounded S2 x S2 -> S1 action factors through a finite
dimensional Hilbert space: s[t1, t2, t3] = <a(t1, t2), b(t2, t3)> with the
pairing conjugate-linear in the first slot.  The middle index decouples, so
the fields are built slice by slice from the gamma2 certificates.  Component
functions of the fields then yield a weak factorization of the embedded
symbol, phi = sum_i (a_i (x) 1)(1 (x) b_i), whose quality is measured by the
row/column w-norms |sum a_i a_i*|^(1/2) and |sum b_i* b_i|^(1/2) (products
taken with the reversed middle-leg multiplication).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraTriple, pair_membership_residual
from .linalg import ShapeError, schatten_norm
from .multiplier import PairSymbol, tau1_apply, tau3_apply
from .norms import gamma2
from .symbols import SchurSymbol, Symbol3, complex_normal, make_rng, sup_norm


@dataclass(frozen=True)
class VectorField:
    """A grid of complex k-vectors, one per (ta, tb)."""

    vectors: np.ndarray  # (na, nb, k)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.vectors, dtype=np.complex128)
        if arr.ndim != 3:
            raise ShapeError(f"shape: vector field must be 3-index, got ndim={arr.ndim}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector field entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)

    @property
    def grid_dims(self) -> tuple[int, int]:
        return self.vectors.shape[0], self.vectors.shape[1]

    @property
    def k(self) -> int:
        return self.vectors.shape[2]

    def sup_norm(self) -> float:
        if self.vectors.size == 0:
            return 0.0
        return float(np.linalg.norm(self.vectors, axis=2).max())


@dataclass(frozen=True)
class FactorFamily:
    """Finite families (a_i), (b_i) of pair symbols with uniform leg dims."""

    a_list: tuple[PairSymbol, ...]
    b_list: tuple[PairSymbol, ...]
    dims: tuple[int, int, int]

    def __post_init__(self):
        if len(self.a_list) != len(self.b_list):
            raise ShapeError("shape: factor families must have equal length")
        d1, d2, d3 = self.dims
        for a in self.a_list:
            if a.leg_dims != (d1, d2):
                raise ShapeError(f"shape: a-symbol legs {a.leg_dims} vs dims {(d1, d2)}")
        for b in self.b_list:
            if b.leg_dims != (d2, d3):
                raise ShapeError(f"shape: b-symbol legs {b.leg_dims} vs dims {(d2, d3)}")

    @property
    def count(self) -> int:
        return len(self.a_list)


def opmul_symbol(a: PairSymbol, b: PairSymbol) -> Symbol3:
    """The product symbol (a (x) 1)(1 (x) b); the middle leg multiplies reversed.

    On elementary tensors (R (x) S (x) 1)(1 (x) S' (x) T) = R (x) S'S (x) T,
    which in coefficients is a single contraction over the shared middle index.
    """
    d1, d2a = a.leg_dims
    d2b, d3 = b.leg_dims
    if d2a != d2b:
        raise ShapeError(f"shape: middle legs disagree, {d2a} vs {d2b}")
    return Symbol3(np.einsum("pqmw,rmst->pqrwst", a.data, b.data))


def synthesize_u(f: FactorFamily) -> Symbol3:
    """The symbol sum_i (a_i (x) 1)(1 (x) b_i) of a factor family."""
    d1, d2, d3 = f.dims
    total = np.zeros((d1, d1, d2, d2, d3, d3), dtype=np.complex128)
    for a, b in zip(f.a_list, f.b_list):
        total += opmul_symbol(a, b).data
    return Symbol3(total)


def schur_s1_factorize(s: SchurSymbol, tol: float = 1e-8) -> tuple[VectorField, VectorField]:
    """Hilbert-space factorization s[t1,t2,t3] = <a(t1,t2), b(t2,t3)>.

    Runs gamma2 on every middle-index slice, embeds the per-slice factor
    vectors into a common ambient dimension (the largest slice rank, smaller
    slices zero-padded) and keeps the per-slice balancing, so the product of
    the two sup norms equals the largest slice gamma2 value.
    """
    n1, n2, n3 = s.dims
    results = [gamma2(s.slice_at(t2), tol) for t2 in range(n2)]
    k = max((r.a_vecs.shape[1] for r in results), default=0)
    a_field = np.zeros((n1, n2, k), dtype=np.complex128)
    b_field = np.zeros((n2, n3, k), dtype=np.complex128)
    for t2, r in enumerate(results):
        kk = r.a_vecs.shape[1]
        a_field[:, t2, :kk] = r.a_vecs
        b_field[t2, :, :kk] = r.b_vecs
    a = VectorField(a_field)
    b = VectorField(b_field)

    recon = np.einsum("abk,bck->abc", a_field.conj(), b_field)
    err = float(np.abs(recon - s.data).max()) if s.data.size else 0.0
    scale = 1.0 + sup_norm(s)
    if err > 1e-6 * scale:
        raise RuntimeError(f"schur_s1_factorize: reconstruction error {err:.3e} beyond contract")
    best = max((r.value for r in results), default=0.0)
    if a.sup_norm() * b.sup_norm() > (1.0 + 1e-4) * best + 1e-12:
        raise RuntimeError("schur_s1_factorize: factor sup norms exceed the slice gamma2 bound")
    return a, b


def _diagonal_pair(values: np.ndarray) -> PairSymbol:
    da, db = values.shape
    data = np.zeros((da, da, db, db), dtype=np.complex128)
    i = np.arange(da)[:, None]
    j = np.arange(db)[None, :]
    data[i, i, j, j] = values
    return PairSymbol(data)


def to_weak_factorization(a: VectorField, b: VectorField) -> FactorFamily:
    """Turn factor fields into a weak factorization family of diagonal pair symbols.

    Component i of the first field enters conjugated: the field pairing is
    conjugate-linear in its first slot, while the weak factorization sums the
    plain products a_i(t1,t2) b_i(t2,t3).
    """
    n1, n2 = a.grid_dims
    n2b, n3 = b.grid_dims
    if n2 != n2b or a.k != b.k:
        raise ShapeError(f"shape: fields disagree, middle {n2} vs {n2b}, ambient {a.k} vs {b.k}")
    a_list = tuple(_diagonal_pair(a.vectors[:, :, i].conj()) for i in range(a.k))
    b_list = tuple(_diagonal_pair(b.vectors[:, :, i]) for i in range(b.k))
    return FactorFamily(a_list=a_list, b_list=b_list, dims=(n1, n2, n3))


def _realize_second_op(p: PairSymbol) -> np.ndarray:
    """Matrix of a pair symbol on C^{da db} with the SECOND leg transposed.

    Transposing the reversed factor is a *-isomorphism onto a plain matrix
    algebra, so this is a faithful representation of pairs whose second leg
    carries the reversed multiplication (the first-space families); operator
    norms computed here are representation independent.
    """
    da, db = p.leg_dims
    return p.data.transpose(0, 3, 1, 2).reshape(da * db, da * db)


def _realize_first_op(p: PairSymbol) -> np.ndarray:
    """Matrix of a pair symbol on C^{da db} with the FIRST leg transposed.

    Faithful representation of pairs whose first leg carries the reversed
    multiplication (the last-space families).
    """
    da, db = p.leg_dims
    return p.data.transpose(1, 2, 0, 3).reshape(da * db, da * db)


def row_wnorm(f: FactorFamily) -> float:
    """|sum_i a_i a_i*|^(1/2); the middle (second) leg multiplies reversed."""
    d1, d2, _ = f.dims
    total = np.zeros((d1 * d2, d1 * d2), dtype=np.complex128)
    for a in f.a_list:
        r = _realize_second_op(a)
        total += r @ r.conj().T
    return float(np.sqrt(schatten_norm(total, "inf")))


def col_wnorm(f: FactorFamily) -> float:
    """|sum_i b_i* b_i|^(1/2); the middle (first) leg multiplies reversed."""
    _, d2, d3 = f.dims
    total = np.zeros((d2 * d3, d2 * d3), dtype=np.complex128)
    for b in f.b_list:
        r = _realize_first_op(b)
        total += r.conj().T @ r
    return float(np.sqrt(schatten_norm(total, "inf")))


@dataclass
class FactorizationReport:
    """Outcome of verify_factorization; failures are entries, never raises."""

    synthesis_residual: float
    synthesis_ok: bool
    a_membership_residuals: list[float]
    b_membership_residuals: list[float]
    membership_ok: bool
    row_norm: float
    col_norm: float
    measured_value: float
    bound_ok: bool
    square_slack_x: float
    square_slack_y: float
    square_ok: bool

    @property
    def passed(self) -> bool:
        return self.synthesis_ok and self.membership_ok and self.bound_ok and self.square_ok


def verify_factorization(phi: Symbol3, f: FactorFamily, t: AlgebraTriple,
                         measured_norm, seed: int = 0, trials: int = 20) -> FactorizationReport:
    """Check a claimed weak factorization of phi against its defining properties.

    Reports the synthesis residual |phi - sum (a_i (x) 1)(1 (x) b_i)|, the
    two-leg membership residuals of every a_i and b_i, the norm bound
    measured <= row_wnorm * col_wnorm, and the square-sum inequalities
    sum_i |tau1(a_i, x)|_2^2 <= row^2 |x|_2^2 (and the b/y analogue) on
    seeded random unit vectors.
    """
    d1, d2, d3 = f.dims
    if phi.dims != (d1, d2, d3):
        raise ShapeError(f"shape: symbol dims {phi.dims} vs family dims {f.dims}")
    scale = 1.0 + phi.norm()
    residual = float(np.linalg.norm(phi.data - synthesize_u(f).data))

    a_resid = [pair_membership_residual(a.data, t.m1, t.m2) for a in f.a_list]
    b_resid = [pair_membership_residual(b.data, t.m2, t.m3) for b in f.b_list]
    memb_ok = all(r <= 1e-8 * (1.0 + p.norm()) for r, p in zip(a_resid, f.a_list))
    memb_ok = memb_ok and all(r <= 1e-8 * (1.0 + p.norm()) for r, p in zip(b_resid, f.b_list))

    row = row_wnorm(f)
    col = col_wnorm(f)
    measured = float(getattr(measured_norm, "value", measured_norm))
    bound_ok = measured <= row * col * (1.0 + 1e-6) + 1e-12

    slack_x = np.inf
    slack_y = np.inf
    for i in range(trials):
        rng = make_rng(seed, i)
        x = complex_normal(rng, (d2, d1))
        x /= np.linalg.norm(x)
        y = complex_normal(rng, (d3, d2))
        y /= np.linalg.norm(y)
        sum_x = sum(np.linalg.norm(tau1_apply(a, x)) ** 2 for a in f.a_list)
        sum_y = sum(np.linalg.norm(tau3_apply(b, y)) ** 2 for b in f.b_list)
        slack_x = min(slack_x, row * row - sum_x)
        slack_y = min(slack_y, col * col - sum_y)
    if trials == 0:
        slack_x = slack_y = 0.0

    return FactorizationReport(
        synthesis_residual=residual,
        synthesis_ok=bool(residual <= 1e-6 * scale),
        a_membership_residuals=[float(r) for r in a_resid],
        b_membership_residuals=[float(r) for r in b_resid],
        membership_ok=bool(memb_ok),
        row_norm=row,
        col_norm=col,
        measured_value=measured,
        bound_ok=bool(bound_ok),
        square_slack_x=float(slack_x),
        square_slack_y=float(slack_y),
        square_ok=bool(slack_x >= -1e-10 and slack_y >= -1e-10),
    )
