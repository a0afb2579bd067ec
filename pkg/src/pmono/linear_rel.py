"""Linear and affine relations between R^d and its dual.

A linear relation is a subspace of R^{2d}; the first d coordinates are
``x`` and the last d are ``x*``.  On a graph basis ``B`` (rows) every
cyclic sum is a quadratic form in the basis coefficients, built from the
k-by-k pairing matrix ``M[a, b] = <x(b_a), x*(b_b)>``.  Decisions reduce to
eigenvalue signs of symmetrized forms, and polar membership to the
supremum of a concave-or-unbounded quadratic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import subspace as ss
from .finite_op import Pair, as_pair, cyclic_sum
from .subspace import Subspace
from .verdict import Decision, Verdict

__all__ = [
    "LinearRelation",
    "AffineRelation",
    "QuadReport",
    "NotPMonotoneError",
    "domain",
    "value_at_zero",
    "inverse",
    "is_monotone_linear",
    "is_p_monotone_linear",
    "cyclic_form",
    "polar_membership_linear",
    "polar_membership_affine",
    "maximalize",
    "is_maximal_p_monotone_linear",
    "is_premaximal_linear",
    "adjoint",
    "affine_hull_check",
]


class NotPMonotoneError(ValueError):
    """Raised by operations whose precondition is p-monotonicity."""


@dataclass(frozen=True, eq=False)
class LinearRelation:
    dim: int
    graph: Subspace

    def __post_init__(self):
        if self.graph.ambient_dim != 2 * self.dim:
            raise ss.DimensionError(
                f"graph lives in R^{self.graph.ambient_dim}, "
                f"expected R^{2 * self.dim}")

    @classmethod
    def from_basis(cls, rows, dim: int) -> "LinearRelation":
        return cls(dim, ss.span(rows, n=2 * dim))

    @classmethod
    def from_matrix(cls, A) -> "LinearRelation":
        """Graph ``{(x, Ax)}`` of a single-valued linear map."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        d = A.shape[0]
        if A.shape != (d, d):
            raise ss.DimensionError(f"matrix must be square, got {A.shape}")
        return cls.from_basis(np.hstack([np.eye(d), A.T]), d)

    @classmethod
    def zero(cls, d: int) -> "LinearRelation":
        """The relation whose graph is ``{(0, 0)}``."""
        return cls(d, Subspace.zero(2 * d))

    @property
    def basis(self) -> np.ndarray:
        return self.graph.basis

    def pairs(self):
        d = self.dim
        return [Pair(b[:d], b[d:]) for b in self.basis]

    def contains(self, q, tol: float = ss.TOL_MEMBER) -> bool:
        q = as_pair(q)
        return ss.contains(self.graph, np.concatenate([q.x, q.xstar]), tol)

    def equals(self, other: "LinearRelation", tol: float = ss.TOL_MEMBER) -> bool:
        return self.dim == other.dim and ss.equal(self.graph, other.graph, tol)

    def to_dict(self) -> dict:
        return {"kind": "linear", "dim": self.dim,
                "basis": [[float(t) for t in row] for row in self.basis]}


@dataclass(frozen=True, eq=False)
class AffineRelation:
    """``base + graph(direction)``."""

    base: Pair
    direction: LinearRelation

    def __post_init__(self):
        object.__setattr__(self, "base", as_pair(self.base))
        if self.base.dim != self.direction.dim:
            raise ss.DimensionError("base and direction dimensions differ")

    @property
    def dim(self) -> int:
        return self.direction.dim

    def to_dict(self) -> dict:
        out = self.direction.to_dict()
        out["base"] = self.base.to_dict()
        return out


@dataclass
class QuadReport:
    """Spectral summary of a quadratic chain objective."""

    max_eigenvalue: float
    witness: np.ndarray
    sup_value: float

    def to_dict(self) -> dict:
        sup = self.sup_value
        return {"max_eigenvalue": float(self.max_eigenvalue),
                "witness": [float(t) for t in self.witness],
                "sup_value": ("inf" if math.isinf(sup) and sup > 0
                              else float(sup))}


def domain(T: LinearRelation) -> Subspace:
    d = T.dim
    return ss.span(T.basis[:, :d], atol=ss.TOL_RANK, n=d)


def value_at_zero(T: LinearRelation) -> Subspace:
    """``T(0) = {x* : (0, x*) in graph}``."""
    d = T.dim
    vertical = Subspace(2 * d, np.hstack([np.zeros((d, d)), np.eye(d)]))
    both = ss.intersect(T.graph, vertical)
    return ss.span(both.basis[:, d:], atol=ss.TOL_RANK, n=d)


def inverse(T: LinearRelation) -> LinearRelation:
    d = T.dim
    B = T.basis
    return LinearRelation(d, Subspace(2 * d, np.hstack([B[:, d:], B[:, :d]])))


def _pairing_matrix(B: np.ndarray, d: int) -> np.ndarray:
    return B[:, :d] @ B[:, d:].T


def _sym(A):
    return 0.5 * (A + A.T)


def _eig_tol(M):
    return 1e-8 * (1.0 + (float(np.linalg.norm(M, 2)) if M.size else 0.0))


def _pair_from(z, d):
    return Pair(z[:d], z[d:])


def is_monotone_linear(T: LinearRelation, tol: float | None = None) -> Verdict:
    """Monotone iff ``<x, x*> >= 0`` on the graph.

    ``value`` is the smallest eigenvalue of the symmetrized pairing form;
    a failing verdict carries the pair realizing it.
    """
    B, d = T.basis, T.dim
    M = _pairing_matrix(B, d)
    tol = _eig_tol(M) if tol is None else tol
    if B.shape[0] == 0:
        return Verdict(Decision.HOLDS, value=0.0, tol=tol)
    w, V = np.linalg.eigh(_sym(M))
    lam, c = float(w[0]), V[:, 0]
    if lam < -tol:
        return Verdict(Decision.FAILS, certificate=[_pair_from(c @ B, d)],
                       value=lam, tol=tol)
    return Verdict(Decision.HOLDS, value=lam, tol=tol)


def cyclic_form(M: np.ndarray, p: int) -> np.ndarray:
    """Matrix of ``sum_i <x_{i+1} - x_i, x_i*>`` over p+1 coefficient blocks."""
    k = M.shape[0]
    n = p + 1
    Q = np.zeros((n * k, n * k))
    for i in range(n):
        j = (i + 1) % n
        Q[j * k:(j + 1) * k, i * k:(i + 1) * k] += M
        Q[i * k:(i + 1) * k, i * k:(i + 1) * k] -= M
    return Q


def is_p_monotone_linear(T: LinearRelation, p: int,
                         tol: float | None = None) -> Verdict:
    """p-monotonicity from the top eigenvalue of the cyclic form.

    The form vanishes on constant tuples, so its largest eigenvalue is
    never negative; T is p-monotone iff it is at most ``tol``.  On failure
    the certificate is the (p+1)-tuple of pairs from the top eigenvector,
    whose cyclic sum equals ``value``.
    """
    if int(p) != p or p < 1:
        raise ValueError(f"order p must be a positive integer, got {p}")
    B, d = T.basis, T.dim
    M = _pairing_matrix(B, d)
    tol = _eig_tol(M) if tol is None else tol
    k = B.shape[0]
    if k == 0:
        return Verdict(Decision.HOLDS, value=0.0, tol=tol)
    w, V = np.linalg.eigh(_sym(cyclic_form(M, p)))
    lam, v = float(w[-1]), V[:, -1]
    report = QuadReport(lam, v, lam)
    if lam > tol:
        Z = v.reshape(p + 1, k) @ B
        tup = [_pair_from(z, d) for z in Z]
        return Verdict(Decision.FAILS, certificate=tup, value=lam, tol=tol,
                       report=report)
    return Verdict(Decision.HOLDS, value=lam, tol=tol, report=report)


def _polar_quadratic(B, d, base: Pair, p: int, q: Pair):
    """Chain objective ``w -> w'Hw + g'w + c`` for chains from ``base + span B``.

    ``w`` stacks the basis coefficients of the chain points 1..p; the
    chain is closed by ``q`` at both ends.
    """
    k = B.shape[0]
    Bx, Bs = B[:, :d], B[:, d:]
    M = Bx @ Bs.T
    bx, bs = base.x, base.xstar
    H = np.zeros((p * k, p * k))
    g = np.zeros(p * k)
    blk = [slice(i * k, (i + 1) * k) for i in range(p)]
    for i in range(p - 1):
        H[blk[i + 1], blk[i]] += M
        H[blk[i], blk[i]] -= M
        g[blk[i + 1]] += Bx @ bs
        g[blk[i]] -= Bx @ bs
    g[blk[0]] += Bx @ q.xstar
    H[blk[p - 1], blk[p - 1]] -= M
    g[blk[p - 1]] += Bs @ (q.x - bx) - Bx @ bs
    const = float((bx - q.x) @ q.xstar + (q.x - bx) @ bs)
    return _sym(H), g, const


def _noise_floor(base: Pair, q: Pair) -> float:
    # rounding level of g when it should vanish, e.g. q = (0, u*) with u*
    # normal to the domain; the relative test alone would read noise as a
    # kernel component
    scale = 1.0 + max(float(np.linalg.norm(np.concatenate([q.x, q.xstar]))),
                      float(np.linalg.norm(np.concatenate([base.x, base.xstar]))))
    return 1e-10 * scale


def _chain_from(w, B, d, base, p):
    k = B.shape[0]
    Z = w.reshape(p, k) @ B if k else np.zeros((p, 2 * d))
    return [Pair(base.x + z[:d], base.xstar + z[d:]) for z in Z]


def polar_membership_affine(T: AffineRelation, p: int, q,
                            tol: float | None = None) -> Verdict:
    """Membership of ``q`` in the p-polar of an affine relation.

    The chain objective is quadratic in the chain coefficients.  Its
    supremum is infinite if the form has a positive direction or if the
    linear term has a component in the kernel; otherwise it is attained at
    ``w = -H^+ g / 2`` with value ``c - g'H^+g / 4``.  ``q`` is a member
    iff that supremum is at most ``tol``.  A failing verdict carries an
    explicit chain (points 1..p) whose cyclic sum with ``q`` exceeds
    ``tol``.
    """
    if int(p) != p or p < 1:
        raise ValueError(f"order p must be a positive integer, got {p}")
    q = as_pair(q)
    D = T.direction
    B, d, base = D.basis, D.dim, T.base
    H, g, const = _polar_quadratic(B, d, base, p, q)
    eig_tol = _eig_tol(H)
    if H.size:
        w, V = np.linalg.eigh(H)
    else:
        w, V = np.zeros(0), np.zeros((0, 0))
    lam_max = float(w[-1]) if w.size else 0.0
    top = V[:, -1] if w.size else np.zeros(0)
    gnorm = float(np.linalg.norm(g))
    sigma = float(np.max(np.abs(w))) if w.size else 0.0
    kernel = (np.abs(w) <= 1e-10 * sigma) | (w > 0)
    coef = V.T @ g if w.size else np.zeros(0)

    direction = None
    if lam_max > eig_tol:
        sup = math.inf
        direction = top * (1.0 if top @ g >= 0 else -1.0)
    elif np.linalg.norm(coef[kernel]) > max(1e-8 * gnorm, _noise_floor(base, q)):
        sup = math.inf
        direction = V[:, kernel] @ coef[kernel]
    else:
        rng_ = ~kernel
        gain = -0.25 * float(np.sum(coef[rng_] ** 2 / w[rng_]))
        sup = gain + const
        w_opt = -0.5 * (V[:, rng_] @ (coef[rng_] / w[rng_]))
    if tol is None:
        scale = abs(const) + (0.0 if math.isinf(sup) else abs(sup - const))
        tol = 1e-8 * (1.0 + scale)
    report = QuadReport(lam_max, top, sup)
    if sup <= tol:
        return Verdict(Decision.HOLDS, value=sup, tol=tol, report=report)

    if direction is None:
        chain = _chain_from(w_opt, B, d, base, p)
    else:
        chain = None
        t = 1.0
        for _ in range(200):
            cand = _chain_from(t * direction, B, d, base, p)
            if cyclic_sum([q] + cand) > tol:
                chain = cand
                break
            t *= 2.0
    return Verdict(Decision.FAILS, certificate=chain, value=sup, tol=tol,
                   report=report)


def polar_membership_linear(T: LinearRelation, p: int, q,
                            tol: float | None = None) -> Verdict:
    """Membership of ``q`` in the p-polar of a linear relation."""
    zero = Pair(np.zeros(T.dim), np.zeros(T.dim))
    return polar_membership_affine(AffineRelation(zero, T), p, q, tol)


def maximalize(T: LinearRelation) -> LinearRelation:
    """``graph(T) + ({0} x dom(T)^perp)``."""
    d = T.dim
    perp = ss.ortho_complement(domain(T)).basis
    extra = np.hstack([np.zeros_like(perp), perp])
    return LinearRelation(d, ss.sum(T.graph, Subspace(2 * d, extra)))


def is_maximal_p_monotone_linear(T: LinearRelation, p: int,
                                 tol: float | None = None) -> Verdict:
    """Maximal p-monotone iff p-monotone and ``T(0) = dom(T)^perp``.

    Domains are closed in finite dimension, so the test is exact.  When the
    values at zero fall short, the certificate is a pair ``(0, u*)`` with
    ``u*`` normal to the domain but missing from ``T(0)``: a direction in
    which T extends.
    """
    pm = is_p_monotone_linear(T, p, tol)
    if not pm.holds:
        pm.note = "not p-monotone"
        return pm
    d = T.dim
    t0 = value_at_zero(T)
    perp = ss.ortho_complement(domain(T))
    if ss.equal(t0, perp):
        return Verdict(Decision.HOLDS, value=pm.value, tol=pm.tol)
    missing = [u for u in perp.basis if not ss.contains(t0, u)]
    cert = [Pair(np.zeros(d), missing[0])] if missing else None
    return Verdict(Decision.FAILS, certificate=cert, value=pm.value, tol=pm.tol,
                   note=f"dim T(0) = {t0.dim}, dim dom(T)^perp = {perp.dim}")


def is_premaximal_linear(T: LinearRelation, p: int, sample_budget: int = 256,
                         tol: float | None = None, seed: int = 0) -> Verdict:
    """One-sided pre-maximality test.

    With ``R = maximalize(T)``, T is pre-maximal iff its p-polar equals R.
    Probes off the graph of R are tested for polar membership: the
    orthogonal complement basis of ``graph(R)`` at scales +-1 and +-3, then
    ``sample_budget`` random points.  A probe inside the polar is a
    conclusive ``FAILS`` certificate.  If none is found the verdict is
    ``HOLDS`` with note ``"sample-verified"``.
    """
    if not is_p_monotone_linear(T, p, tol).holds:
        raise NotPMonotoneError("pre-maximality needs a p-monotone relation")
    d = T.dim
    R = maximalize(T)
    off = ss.ortho_complement(R.graph).basis
    probes = [s * b for b in off for s in (1.0, -1.0, 3.0, -3.0)]
    rng = np.random.default_rng(seed)
    for i in range(sample_budget):
        z = rng.standard_normal(2 * d)
        if i % 2 and off.shape[0]:
            z = R.graph.project(z) + 0.1 * (rng.standard_normal(off.shape[0]) @ off)
        probes.append(z)
    tested = 0
    for z in probes:
        if ss.contains(R.graph, z):
            continue
        tested += 1
        q = _pair_from(z, d)
        if polar_membership_linear(T, p, q).holds:
            return Verdict(Decision.FAILS, certificate=[q], value=0.0,
                           tol=tol or 0.0,
                           note="polar point outside the canonical extension")
    return Verdict(Decision.HOLDS, value=float(tested), tol=tol or 0.0,
                   note="sample-verified")


def adjoint(T: LinearRelation) -> LinearRelation:
    """``{(x, x*) : <x, y*> = <y, x*> for all (y, y*) in T}``.

    This is the orthogonal complement of the graph under
    ``(y, y*) -> (y*, -y)``.
    """
    d = T.dim
    B = T.basis
    rotated = Subspace(2 * d, np.hstack([B[:, d:], -B[:, :d]]))
    return LinearRelation(d, ss.ortho_complement(rotated))


def affine_hull_check(T: AffineRelation, p: int, n_samples: int = 64,
                      tol: float | None = None, seed: int = 0) -> Verdict:
    """Check that sampled points of the affine hull of T lie in its p-polar.

    For an affine relation the hull is the relation itself; samples are
    the base shifted by basis directions (both signs) and by random
    combinations.  When the base is the origin the negated samples are
    checked as well.  The polar test runs on the affine relation directly,
    without translating it.
    """
    if not is_p_monotone_linear(T.direction, p).holds:
        raise NotPMonotoneError("affine_hull_check needs a p-monotone relation")
    d = T.dim
    B = T.direction.basis
    rng = np.random.default_rng(seed)
    zs = [s * b for b in B for s in (1.0, -1.0)]
    if B.shape[0]:
        zs += list(rng.standard_normal((n_samples, B.shape[0])) @ B)
    zs.append(np.zeros(2 * d))
    base = np.concatenate([T.base.x, T.base.xstar])
    at_origin = not np.any(base)
    points = [base + z for z in zs]
    if at_origin:
        points += [-(base + z) for z in zs]
    for h in points:
        q = _pair_from(h, d)
        v = polar_membership_affine(T, p, q, tol)
        if not v.holds:
            return Verdict(Decision.FAILS, certificate=[q], value=v.value,
                           tol=v.tol)
    return Verdict(Decision.HOLDS, value=float(len(points)),
                   tol=1e-8 if tol is None else tol,
                   note=f"{len(points)} hull points checked")
