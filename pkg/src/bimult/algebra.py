"""Finite-dimensional von Neumann algebra machinery.

A ``MatrixAlgebra`` is a unital *-subalgebra of d x d matrices, stored through
an orthonormal basis with respect to the normalized trace inner product
``<A, B> = tr(A* B) / d`` (which makes the identity a unit vector).  The
module provides *-algebra generation by closure, commutants via a null-space
computation, trace-orthogonal conditional expectations, and membership tests
for triple tensor products of algebras.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ShapeError, as_matrix
from .symbols import Symbol3

ADMIT_RESIDUAL = 1e-10  # closure iteration: new basis candidate threshold
NULLSPACE_RTOL = 1e-10  # sigma <= rtol * sigma_max counts as null direction
MEMBERSHIP_RTOL = 1e-8


def trace_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Normalized trace inner product tr(a* b) / d."""
    return complex(np.einsum("ij,ij->", a.conj(), b)) / a.shape[0]


@dataclass(frozen=True)
class MatrixAlgebra:
    """Unital *-subalgebra of M_d given by generators plus an orthonormal basis."""

    dim: int
    generators: tuple[np.ndarray, ...]
    basis: tuple[np.ndarray, ...]

    def __post_init__(self):
        for m in (*self.generators, *self.basis):
            if m.shape != (self.dim, self.dim):
                raise ShapeError(f"shape: algebra element {m.shape} in dimension {self.dim}")

    @property
    def size(self) -> int:
        return len(self.basis)

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of x onto the span of the basis."""
        out = np.zeros_like(x, dtype=np.complex128)
        for b in self.basis:
            out += trace_inner(b, x) * b
        return out

    def contains(self, x: np.ndarray, rtol: float = MEMBERSHIP_RTOL) -> bool:
        resid = float(np.linalg.norm(x - self.project(x)))
        return resid <= rtol * (1.0 + float(np.linalg.norm(x)))


@dataclass(frozen=True)
class AlgebraTriple:
    m1: MatrixAlgebra
    m2: MatrixAlgebra
    m3: MatrixAlgebra

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.m1.dim, self.m2.dim, self.m3.dim


def _orthonormalize_into(basis: list[np.ndarray], cand: np.ndarray) -> bool:
    """Gram-Schmidt `cand` against `basis` (normalized trace norm); admit if new."""
    norm0 = np.sqrt(abs(trace_inner(cand, cand)))
    if norm0 <= 1e-14:
        return False
    cand = cand / norm0
    for _ in range(2):  # twice for numerical orthogonality
        for b in basis:
            cand = cand - trace_inner(b, cand) * b
    resid = np.sqrt(abs(trace_inner(cand, cand)))
    if resid <= ADMIT_RESIDUAL:
        return False
    basis.append(cand / resid)
    return True


def generate_algebra(dim: int, generators) -> MatrixAlgebra:
    """Smallest unital *-algebra containing the generators.

    Iterates products/adjoints with Gram-Schmidt admission until the span
    stabilizes; the span dimension is capped by dim^2 so this terminates.
    """
    gens = tuple(as_matrix(g) for g in generators)
    for g in gens:
        if g.shape != (dim, dim):
            raise ShapeError(f"shape: generator {g.shape} for dimension {dim}")
    basis: list[np.ndarray] = []
    _orthonormalize_into(basis, np.eye(dim, dtype=np.complex128))
    work = list(gens) + [g.conj().T for g in gens]
    for m in work:
        _orthonormalize_into(basis, m)
    cap = dim * dim
    changed = True
    while changed and len(basis) < cap:
        changed = False
        current = list(basis)
        for p in current:
            if _orthonormalize_into(basis, p.conj().T):
                changed = True
        current = list(basis)
        for p in current:
            for q in current:
                if _orthonormalize_into(basis, p @ q):
                    changed = True
                    if len(basis) >= cap:
                        break
            if len(basis) >= cap:
                break
    return MatrixAlgebra(dim=dim, generators=gens, basis=tuple(basis))


def _full_algebra(dim: int) -> MatrixAlgebra:
    units = []
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=np.complex128)
            e[i, j] = 1.0
            units.append(e)
    scale = np.sqrt(dim)  # trace-normalized units have norm 1/sqrt(d)
    return MatrixAlgebra(dim=dim, generators=tuple(units), basis=tuple(scale * u for u in units))


def commutant(a: MatrixAlgebra) -> MatrixAlgebra:
    """Commutant {X : XG = GX for the generators G and their adjoints}.

    The commutator constraint is linear, so the commutant is the null space of
    the stacked vectorized maps X -> GX - XG, extracted by SVD with threshold
    sigma <= 1e-10 * sigma_max.  Using generators only (not the full basis) is
    equivalent and cheaper.
    """
    d = a.dim
    gens = list(a.generators) + [g.conj().T for g in a.generators]
    if not gens:
        return _full_algebra(d)
    eye = np.eye(d)
    rows = [np.kron(g, eye) - np.kron(eye, g.T) for g in gens]  # row-major vec
    system = np.vstack(rows)
    _, sigma, vh = np.linalg.svd(system)
    if sigma.size == 0 or sigma[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(sigma > NULLSPACE_RTOL * sigma[0]))
    null = vh[rank:].conj()
    mats = [np.sqrt(d) * vec.reshape(d, d) for vec in null]  # trace-orthonormal
    basis: list[np.ndarray] = []
    _orthonormalize_into(basis, np.eye(d, dtype=np.complex128))
    for m in mats:
        _orthonormalize_into(basis, m)
    return MatrixAlgebra(dim=d, generators=tuple(basis), basis=tuple(basis))


def conditional_expectation(x: np.ndarray, a: MatrixAlgebra) -> np.ndarray:
    """Trace-orthogonal projection onto the algebra.

    Idempotent, unital, trace-preserving and Hermitian-preserving because the
    basis span is a unital *-closed subspace.
    """
    x = as_matrix(x)
    if x.shape != (a.dim, a.dim):
        raise ShapeError(f"shape: expected {(a.dim, a.dim)}, got {x.shape}")
    return a.project(x)


def project_symbol(phi: Symbol3, t: AlgebraTriple) -> Symbol3:
    """Orthogonal projection of phi onto span{b1 (x) b2 (x) b3}."""
    d1, d2, d3 = t.dims
    if phi.dims != (d1, d2, d3):
        raise ShapeError(f"shape: symbol dims {phi.dims} vs algebra dims {t.dims}")
    b1 = np.stack(t.m1.basis)
    b2 = np.stack(t.m2.basis)
    b3 = np.stack(t.m3.basis)
    coeff = np.einsum("abcdef,iab,jcd,kef->ijk", phi.data, b1.conj(), b2.conj(), b3.conj())
    coeff = coeff / (d1 * d2 * d3)
    return Symbol3(np.einsum("ijk,iab,jcd,kef->abcdef", coeff, b1, b2, b3))


def tensor_membership(phi: Symbol3, t: AlgebraTriple) -> tuple[bool, float]:
    """Does phi lie in M1 (x) M2 (x) M3 (as a linear subspace)?

    Projects the 6-index tensor onto span{b1 (x) b2 (x) b3} over the three
    orthonormal bases; the opposite multiplication on the middle leg does not
    change the subspace.  Returns (member, residual) with membership decided
    at residual <= 1e-8 * (1 + |phi|).
    """
    recon = project_symbol(phi, t)
    residual = float(np.linalg.norm(phi.data - recon.data))
    return residual <= MEMBERSHIP_RTOL * (1.0 + phi.norm()), residual


def pair_membership_residual(data: np.ndarray, ma: MatrixAlgebra, mb: MatrixAlgebra) -> float:
    """Projection residual of a 4-index tensor onto span{b_a (x) b_b}."""
    da, db = ma.dim, mb.dim
    if data.shape != (da, da, db, db):
        raise ShapeError(f"shape: pair tensor {data.shape} vs dims {(da, db)}")
    b1 = np.stack(ma.basis)
    b2 = np.stack(mb.basis)
    coeff = np.einsum("abcd,iab,jcd->ij", data, b1.conj(), b2.conj()) / (da * db)
    recon = np.einsum("ij,iab,jcd->abcd", coeff, b1, b2)
    return float(np.linalg.norm(data - recon))


def preset_algebra(name: str, dim: int) -> MatrixAlgebra:
    """Named presets: "full", "diagonal", "scalar", "block:<k1+k2+...>"."""
    name = name.strip().lower()
    if name == "full":
        return _full_algebra(dim)
    if name == "scalar":
        return generate_algebra(dim, [])
    if name == "diagonal":
        gens = []
        for i in range(dim):
            e = np.zeros((dim, dim), dtype=np.complex128)
            e[i, i] = 1.0
            gens.append(e)
        return generate_algebra(dim, gens)
    if name.startswith("block:"):
        sizes = [int(p) for p in name.split(":", 1)[1].split("+")]
        if any(k <= 0 for k in sizes) or sum(sizes) != dim:
            raise ShapeError(f"shape: block sizes {sizes} do not partition dimension {dim}")
        gens = []
        off = 0
        for k in sizes:
            for i in range(k):
                for j in range(k):
                    e = np.zeros((dim, dim), dtype=np.complex128)
                    e[off + i, off + j] = 1.0
                    gens.append(e)
            off += k
        return generate_algebra(dim, gens)
    raise ValueError(f"unknown algebra preset {name!r}")
