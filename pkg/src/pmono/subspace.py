"""Linear subspaces of R^n carried by orthonormal bases.

Every linear-relation computation in the package reduces to the handful of
operations here: span, membership, orthogonal complement, sum, intersection
and projector-based equality.  Subspaces are immutable; all tolerances are
passed explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TOL_RANK = 1e-10
TOL_MEMBER = 1e-8

__all__ = [
    "Subspace",
    "DimensionError",
    "span",
    "contains",
    "ortho_complement",
    "sum",
    "intersect",
    "equal",
    "is_subset",
    "TOL_RANK",
    "TOL_MEMBER",
]


class DimensionError(ValueError):
    """Raised when vectors or subspaces live in different ambient spaces."""


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of R^n with an orthonormal basis stored as rows.

    Use :func:`span` to build one from arbitrary vectors; the constructor
    trusts that ``basis`` is already orthonormal.
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float).reshape(-1, self.ambient_dim)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, np.zeros((0, n)))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n))

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def project(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return self.basis.T @ (self.basis @ v)

    def map(self, matrix, tol_rank: float = TOL_RANK) -> "Subspace":
        """Image of the subspace under a linear map given as a matrix."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape[1] != self.ambient_dim:
            raise DimensionError(
                f"map expects {self.ambient_dim} columns, got {matrix.shape[1]}")
        return span(self.basis @ matrix.T, tol_rank=tol_rank,
                    atol=tol_rank, n=matrix.shape[0])

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim,
                "basis": [[float(t) for t in row] for row in self.basis]}

    @classmethod
    def from_json(cls, data: dict) -> "Subspace":
        n = int(data["ambient_dim"])
        return span(data.get("basis", []), n=n)


def span(vectors, tol_rank: float = TOL_RANK, atol: float = 0.0,
         n: int | None = None) -> Subspace:
    """Orthonormal basis of the span of ``vectors``.

    Singular values below ``tol_rank * sigma_max`` (or below ``atol``) are
    discarded.  ``n`` fixes the ambient dimension when ``vectors`` is empty.

    >>> span([[1.0, 0.0], [2.0, 0.0]]).dim
    1
    """
    rows = [np.asarray(v, dtype=float).ravel() for v in vectors]
    if not rows:
        if n is None:
            raise DimensionError("ambient dimension unknown for an empty span")
        return Subspace.zero(n)
    dims = {r.shape[0] for r in rows}
    if len(dims) != 1 or (n is not None and dims != {n}):
        raise DimensionError(f"inconsistent vector dimensions {sorted(dims)}")
    A = np.vstack(rows)
    amb = A.shape[1]
    if A.shape[0] <= amb and np.allclose(A @ A.T, np.eye(A.shape[0]),
                                         rtol=0, atol=1e-12):
        # already orthonormal; keeping it makes span idempotent, so
        # serialized relations reload byte for byte
        return Subspace(amb, A)
    _, s, vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Subspace.zero(amb)
    cutoff = max(tol_rank * s[0], atol)
    rank = int(np.sum(s > cutoff))
    return Subspace(amb, vh[:rank])


def _check(S1: Subspace, S2: Subspace):
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionError(
            f"ambient dimensions differ: {S1.ambient_dim} vs {S2.ambient_dim}")


def contains(S: Subspace, v, tol: float = TOL_MEMBER) -> bool:
    """True iff ``||v - proj_S v|| <= tol * max(1, ||v||)``."""
    v = np.asarray(v, dtype=float).ravel()
    if v.shape[0] != S.ambient_dim:
        raise DimensionError(
            f"vector of length {v.shape[0]} in R^{S.ambient_dim}")
    r = np.linalg.norm(v - S.project(v))
    return bool(r <= tol * max(1.0, np.linalg.norm(v)))


def ortho_complement(S: Subspace) -> Subspace:
    n = S.ambient_dim
    if S.dim == 0:
        return Subspace.full(n)
    if S.dim == n:
        return Subspace.zero(n)
    # basis rows are orthonormal, so the trailing right singular vectors
    # of the basis matrix span exactly the complement
    _, _, vh = np.linalg.svd(S.basis, full_matrices=True)
    return Subspace(n, vh[S.dim:])


def sum(S1: Subspace, S2: Subspace, tol_rank: float = TOL_RANK) -> Subspace:  # noqa: A001
    _check(S1, S2)
    return span(np.vstack([S1.basis, S2.basis]), tol_rank=tol_rank,
                atol=tol_rank, n=S1.ambient_dim)


def intersect(S1: Subspace, S2: Subspace,
              tol_rank: float = TOL_RANK) -> Subspace:
    _check(S1, S2)
    return ortho_complement(
        sum(ortho_complement(S1), ortho_complement(S2), tol_rank=tol_rank))


def equal(S1: Subspace, S2: Subspace, tol: float = TOL_MEMBER) -> bool:
    _check(S1, S2)
    if S1.dim != S2.dim:
        return False
    return bool(np.linalg.norm(S1.projector() - S2.projector(), 2) <= tol)


def is_subset(S1: Subspace, S2: Subspace, tol: float = TOL_MEMBER) -> bool:
    """True iff every basis vector of ``S1`` lies in ``S2``."""
    _check(S1, S2)
    return all(contains(S2, v, tol) for v in S1.basis)
