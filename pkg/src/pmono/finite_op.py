"""Operators given by finitely many graph points.

The cyclic-weight digraph ``W[i, j] = <x_j - x_i, x_i*>`` turns every
question about finite operators into a question about walks: a (p+1)-tuple
of graph points is a closed walk with p+1 edges, and its cyclic sum is the
walk weight.  p-monotonicity is decided with max-plus matrix powers,
cyclic monotonicity with Bellman-Ford on ``-W``, and the Fitzpatrick
function of order p with a chain dynamic program.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .verdict import Decision, Verdict

__all__ = [
    "Pair",
    "FiniteOperator",
    "GridTooLarge",
    "OutsideHullError",
    "GridResult",
    "as_pair",
    "cyclic_sum",
    "inverse_cyclic_sum",
    "default_tol",
    "is_p_monotone",
    "is_cyclically_monotone",
    "fitzpatrick_p",
    "fitzpatrick_chain",
    "fitzpatrick_inf",
    "polar_excess",
    "polar_membership",
    "grid_axes",
    "polar_region_grid",
    "falsify_double_polar",
    "normal_cone_membership",
    "translate",
    "inverse",
    "ray_scale",
]

GRID_CAP = 10**7
# caps the (queries x N x N) temporaries of the batched DP
_CHUNK_ELEMS = 4_000_000


class GridTooLarge(ValueError):
    """Raised when a lattice or enumeration would exceed its cell cap."""


class OutsideHullError(ValueError):
    """Raised when a base point is not in the convex hull of the domain."""


@dataclass(frozen=True, eq=False)
class Pair:
    """One graph element ``(x, x*)``."""

    x: np.ndarray
    xstar: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float)).ravel()
        xs = np.atleast_1d(np.asarray(self.xstar, dtype=float)).ravel()
        if x.shape != xs.shape:
            raise ValueError(
                f"x has dimension {x.shape[0]} but x* has {xs.shape[0]}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xstar", xs)

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def pairing(self) -> float:
        return float(self.x @ self.xstar)

    def __eq__(self, other):
        if not isinstance(other, Pair):
            return NotImplemented
        return (np.array_equal(self.x, other.x)
                and np.array_equal(self.xstar, other.xstar))

    def __hash__(self):
        return hash((self.x.tobytes(), self.xstar.tobytes()))

    def __add__(self, other: "Pair") -> "Pair":
        return Pair(self.x + other.x, self.xstar + other.xstar)

    def scaled(self, t: float) -> "Pair":
        return Pair(t * self.x, t * self.xstar)

    def swapped(self) -> "Pair":
        return Pair(self.xstar, self.x)

    def to_dict(self) -> dict:
        return {"x": [float(t) for t in self.x],
                "xstar": [float(t) for t in self.xstar]}

    @classmethod
    def from_dict(cls, data) -> "Pair":
        return cls(data["x"], data["xstar"])


def as_pair(obj) -> Pair:
    if isinstance(obj, Pair):
        return obj
    if isinstance(obj, dict):
        return Pair.from_dict(obj)
    x, xs = obj
    return Pair(x, xs)


class FiniteOperator:
    """Finite graph ``{(x_i, x_i*)}`` with its cached cyclic weights."""

    def __init__(self, points, dim: int | None = None):
        pts = tuple(as_pair(p) for p in points)
        if not pts and dim is None:
            raise ValueError("dimension required for an empty operator")
        d = pts[0].dim if pts else int(dim)
        if dim is not None and d != dim:
            raise ValueError(f"points have dimension {d}, expected {dim}")
        if any(p.dim != d for p in pts):
            raise ValueError("points of mixed dimension")
        self.dim = d
        self.points = pts
        self.xs = np.array([p.x for p in pts]).reshape(len(pts), d)
        self.xstars = np.array([p.xstar for p in pts]).reshape(len(pts), d)
        for a in (self.xs, self.xstars):
            a.setflags(write=False)
        self._weights = None

    @classmethod
    def from_arrays(cls, xs, xstars) -> "FiniteOperator":
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        xstars = np.atleast_2d(np.asarray(xstars, dtype=float))
        return cls([Pair(a, b) for a, b in zip(xs, xstars)], dim=xs.shape[1])

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i) -> Pair:
        return self.points[i]

    def __iter__(self):
        return iter(self.points)

    def __repr__(self):
        return f"FiniteOperator(dim={self.dim}, N={len(self)})"

    @property
    def weights(self) -> np.ndarray:
        """``W[i, j] = <x_j - x_i, x_i*>``; the diagonal is exactly zero."""
        if self._weights is None:
            diff = self.xs[None, :, :] - self.xs[:, None, :]
            W = np.einsum("ijk,ik->ij", diff, self.xstars)
            W.setflags(write=False)
            self._weights = W
        return self._weights

    def subset(self, indices) -> "FiniteOperator":
        return FiniteOperator([self.points[i] for i in indices], dim=self.dim)

    def union(self, other: "FiniteOperator") -> "FiniteOperator":
        return FiniteOperator(self.points + other.points, dim=self.dim)

    def to_dict(self) -> dict:
        return {"kind": "finite", "dim": self.dim,
                "points": [p.to_dict() for p in self.points]}


def _chain_arrays(chain):
    pairs = [as_pair(c) for c in chain]
    if not pairs:
        raise ValueError("empty chain")
    if len({p.dim for p in pairs}) != 1:
        raise ValueError("chain of mixed dimension")
    return (np.array([p.x for p in pairs]), np.array([p.xstar for p in pairs]))


def cyclic_sum(chain) -> float:
    """``sum_i <x_{i+1} - x_i, x_i*>`` with wraparound."""
    xs, xss = _chain_arrays(chain)
    return float(np.sum((np.roll(xs, -1, axis=0) - xs) * xss))


def inverse_cyclic_sum(chain) -> float:
    """``sum_i <x_i, x*_{i+1} - x*_i>``: the cyclic sum of the inverse chain."""
    xs, xss = _chain_arrays(chain)
    return float(np.sum(xs * (np.roll(xss, -1, axis=0) - xss)))


def default_tol(T: FiniteOperator) -> float:
    if len(T) == 0:
        return 1e-9
    return 1e-9 * (1.0 + float(np.max(np.abs(T.weights))))


def _query_tol(T: FiniteOperator, q: Pair) -> float:
    rx = max([np.linalg.norm(q.x)] + [np.linalg.norm(v) for v in T.xs])
    rs = max([np.linalg.norm(q.xstar)] + [np.linalg.norm(v) for v in T.xstars])
    return float(1e-9 * (1.0 + rx * rs))


def _check_p(p):
    if int(p) != p or p < 1:
        raise ValueError(f"order p must be a positive integer, got {p}")
    return int(p)


def _max_plus_closed_walks(W: np.ndarray, steps: int):
    """Best closed walk with ``steps`` edges; returns (value, node tuple)."""
    N = W.shape[0]
    V = W.copy()
    args = []
    rows = max(1, _CHUNK_ELEMS // max(1, N * N))
    for _ in range(steps - 1):
        newV = np.empty_like(V)
        arg = np.empty((N, N), dtype=np.intp)
        for s in range(0, N, rows):
            cand = V[s:s + rows, :, None] + W[None, :, :]
            a = cand.argmax(axis=1)
            arg[s:s + rows] = a
            newV[s:s + rows] = np.take_along_axis(cand, a[:, None, :], 1)[:, 0]
        V = newV
        args.append(arg)
    diag = np.diag(V)
    i0 = int(np.argmax(diag))
    back = []
    j = i0
    for arg in reversed(args):
        j = int(arg[i0, j])
        back.append(j)
    return float(diag[i0]), tuple([i0] + back[::-1])


def is_p_monotone(T: FiniteOperator, p: int, tol: float | None = None) -> Verdict:
    """Decide p-monotonicity over all closed walks with at most p+1 edges.

    Zero-weight self-loops let a walk of exactly p+1 edges absorb any
    shorter one, so only the diagonal of the (p+1)-st max-plus power of
    the weight matrix is scanned.  On failure the certificate is the
    maximizing index tuple ``(i_0, ..., i_p)``.
    """
    p = _check_p(p)
    tol = default_tol(T) if tol is None else tol
    if len(T) == 0:
        return Verdict(Decision.HOLDS, value=-math.inf, tol=tol)
    value, tup = _max_plus_closed_walks(T.weights, p + 1)
    if value > tol:
        chain = [T[i] for i in tup]
        return Verdict(Decision.FAILS, certificate=tup,
                       value=cyclic_sum(chain), tol=tol)
    return Verdict(Decision.HOLDS, value=value, tol=tol)


def is_cyclically_monotone(T: FiniteOperator, tol: float | None = None) -> Verdict:
    """Look for a positive cycle of ``W`` by Bellman-Ford on ``-W``.

    Relaxations need an improvement of more than ``tol / N``; on
    convergence every cycle therefore weighs at most ``tol`` and the final
    distances are returned in ``report`` as a potential.  If a traced cycle
    is too light to be conclusive the exact max-plus engine decides with
    ``p = N - 1``.
    """
    tol = default_tol(T) if tol is None else tol
    N = len(T)
    if N <= 1:
        return Verdict(Decision.HOLDS, value=0.0 if N else -math.inf, tol=tol)
    cost = -np.array(T.weights)
    np.fill_diagonal(cost, np.inf)
    delta = tol / N
    dist = np.zeros(N)
    pred = np.full(N, -1)
    idx = np.arange(N)
    improved = np.zeros(N, dtype=bool)
    for _ in range(N):
        cand = dist[:, None] + cost
        best_u = cand.argmin(axis=0)
        best = cand[best_u, idx]
        improved = best < dist - delta
        if not improved.any():
            return Verdict(Decision.HOLDS, value=0.0, tol=tol,
                           report={"potential": (-dist).tolist()})
        dist[improved] = best[improved]
        pred[improved] = best_u[improved]

    cycle = _trace_cycle(pred, int(np.flatnonzero(improved)[0]), N)
    if cycle is not None:
        value = cyclic_sum([T[i] for i in cycle])
        if value > tol:
            return Verdict(Decision.FAILS, certificate=cycle, value=value,
                           tol=tol)
    return is_p_monotone(T, N - 1, tol)


def _trace_cycle(pred, v, N):
    for _ in range(N):
        v = pred[v]
        if v < 0:
            return None
    cycle = [v]
    u = pred[v]
    while u != v:
        if u < 0 or len(cycle) > N:
            return None
        cycle.append(u)
        u = pred[u]
    # pred points backwards along edges
    return tuple(int(c) for c in reversed(cycle))


def _chain_dp(T: FiniteOperator, p: int, x0: np.ndarray, x0s: np.ndarray):
    """Batched chain DP for query points ``x0`` (Q, d), ``x0s`` (Q, d).

    Returns the best chain sum (F - <x0, x0*>) per query and, per step,
    the argmax tables needed to rebuild the chains.
    """
    W = T.weights
    E = T.xs @ x0s.T                                   # (N, Q): <x_j, x0*>
    E = (E - np.sum(x0 * x0s, axis=1)[None, :]).T      # <x_j - x0, x0*>
    V = E
    args = []
    for _ in range(p - 1):
        cand = V[:, :, None] + W[None, :, :]
        a = cand.argmax(axis=1)
        V = np.take_along_axis(cand, a[:, None, :], 1)[:, 0]
        args.append(a)
    own = np.sum(T.xs * T.xstars, axis=1)
    X = x0 @ T.xstars.T - own[None, :]                # <x0 - x_j, x_j*>
    tot = V + X
    last = tot.argmax(axis=1)
    best = tot[np.arange(tot.shape[0]), last]
    return best, last, args


def _rebuild(last, args, k):
    j = int(last[k])
    chain = [j]
    for a in reversed(args):
        j = int(a[k, j])
        chain.append(j)
    return tuple(chain[::-1])


def _queries(qs):
    if isinstance(qs, (Pair, tuple, dict)):
        qs = [qs]
    pairs = [as_pair(q) for q in qs]
    return (np.array([q.x for q in pairs]), np.array([q.xstar for q in pairs]))


def polar_excess(T: FiniteOperator, p: int, x0, x0s, threads: int | None = None):
    """``F_{T,p}(q) - <x, x*>`` for many queries at once.

    ``x0`` and ``x0s`` are (Q, d) arrays.  Work is chunked to bound memory
    and spread over ``threads`` workers (default: ``PMONO_THREADS`` or 1).
    """
    p = _check_p(p)
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    x0s = np.atleast_2d(np.asarray(x0s, dtype=float))
    Q = x0.shape[0]
    N = len(T)
    if N == 0:
        return np.full(Q, -np.inf)
    rows = max(1, _CHUNK_ELEMS // max(1, N * N))
    chunks = [slice(s, s + rows) for s in range(0, Q, rows)]
    if threads is None:
        threads = int(os.environ.get("PMONO_THREADS", "1") or 1)

    def run(sl):
        best = _chain_dp(T, p, x0[sl], x0s[sl])[0]
        pi = np.sum(x0[sl] * x0s[sl], axis=1)
        return (best + pi) - pi

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(run, chunks))
    else:
        parts = [run(sl) for sl in chunks]
    return np.concatenate(parts) if parts else np.zeros(0)


def fitzpatrick_chain(T: FiniteOperator, p: int, q):
    """Value of ``F_{T,p}(q)`` and a maximizing chain ``(i_1, ..., i_p)``."""
    p = _check_p(p)
    q = as_pair(q)
    if len(T) == 0:
        return -math.inf, None
    if q.dim != T.dim:
        raise ValueError(f"query of dimension {q.dim} for operator in R^{T.dim}")
    best, last, args = _chain_dp(T, p, q.x[None, :], q.xstar[None, :])
    return float(best[0] + q.pairing()), _rebuild(last, args, 0)


def fitzpatrick_p(T: FiniteOperator, p: int, q) -> float:
    """Fitzpatrick function of order p at ``q``; ``-inf`` for empty T."""
    return fitzpatrick_chain(T, p, q)[0]


def fitzpatrick_inf(T: FiniteOperator, q, tol: float | None = None) -> float:
    """``sup_p F_{T,p}(q)``.

    Every graph point is reachable from the query, so a positive cycle
    makes the supremum infinite.  Otherwise closed sub-walks can be cut
    without loss and the best chain is a simple path, whence order N
    suffices.
    """
    if len(T) == 0:
        return -math.inf
    if not is_cyclically_monotone(T, tol).holds:
        return math.inf
    return fitzpatrick_p(T, len(T), q)


def polar_membership(T: FiniteOperator, p: int, q,
                     tol: float | None = None) -> Verdict:
    """Is ``q`` in the p-polar of T, i.e. ``F_{T,p}(q) <= <x, x*>``?

    ``value`` is the excess ``F_{T,p}(q) - <x, x*>``.  A failing verdict
    carries the maximizing chain of indices ``(i_1, ..., i_p)``; closing it
    with ``q`` gives a cyclic sum above ``tol``.
    """
    p = _check_p(p)
    q = as_pair(q)
    if len(T) == 0:
        return Verdict(Decision.HOLDS, value=-math.inf,
                       tol=1e-9 if tol is None else tol)
    tol = _query_tol(T, q) if tol is None else tol
    F, chain = fitzpatrick_chain(T, p, q)
    excess = F - q.pairing()
    if excess > tol:
        return Verdict(Decision.FAILS, certificate=chain, value=excess, tol=tol)
    return Verdict(Decision.HOLDS, value=excess, tol=tol)


@dataclass
class GridResult:
    """Lattice points in R^{2d} with polar membership and excess values."""

    dim: int
    points: np.ndarray
    member: np.ndarray
    excess: np.ndarray

    def to_csv(self) -> str:
        d = self.dim
        cols = ([f"x{i}" for i in range(d)] + [f"xstar{i}" for i in range(d)]
                + ["member", "value"])
        lines = [",".join(cols)]
        for row, m, v in zip(self.points, self.member, self.excess):
            coords = ",".join(repr(float(t)) for t in row)
            lines.append(f"{coords},{int(bool(m))},{_fmt(v)}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"dim": self.dim,
                "points": self.points.tolist(),
                "member": [bool(m) for m in self.member],
                "value": [_fmt(v) for v in self.excess]}


def _fmt(v):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def grid_axes(spec, ndim: int):
    """Axis coordinate arrays from ``[(lo, hi, step), ...]``.

    A single triple is replicated across all ``ndim`` axes.
    """
    spec = list(spec)
    if len(spec) == 1:
        spec = spec * ndim
    if len(spec) != ndim:
        raise ValueError(f"grid needs {ndim} axes, got {len(spec)}")
    counts = []
    for lo, hi, step in spec:
        if step <= 0 or hi < lo:
            raise ValueError(f"bad axis ({lo}, {hi}, {step})")
        counts.append(int(math.floor((hi - lo) / step + 1e-9)) + 1)
    cells = math.prod(counts)
    if cells > GRID_CAP:
        raise GridTooLarge(f"grid has {cells} cells, cap is {GRID_CAP}")
    return [lo + step * np.arange(n) for (lo, _, step), n in zip(spec, counts)]


def _lattice(axes):
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def polar_region_grid(T: FiniteOperator, p: int, grid, tol: float = 1e-9,
                      threads: int | None = None) -> GridResult:
    """Polar membership mask of T on an axis-aligned lattice in R^{2d}."""
    pts = _lattice(grid_axes(grid, 2 * T.dim))
    d = T.dim
    ex = polar_excess(T, p, pts[:, :d], pts[:, d:], threads=threads)
    return GridResult(d, pts, ex <= tol, ex)


def falsify_double_polar(T: FiniteOperator, p: int, q, budget: int = 100_000,
                         tol: float | None = None, seed: int = 0,
                         lattice_size: int = 625) -> Verdict:
    """Search for a proof that ``q`` is outside the double p-polar of T.

    Such a proof is a chain ``(y_1, ..., y_p)`` of pairs, each in the
    p-polar of T, whose cyclic sum with ``q`` exceeds ``tol``.  Candidates
    come from a lattice over a box of twice the data radius (at most
    ``lattice_size`` points, capped by ``budget``), where the best chain is
    found exactly by the chain DP; the rest of the budget goes to a
    randomized hill climb on the chain.  A failing verdict is a checkable
    exclusion; anything else is inconclusive, never a membership claim.
    """
    p = _check_p(p)
    q = as_pair(q)
    if budget < 0:
        raise ValueError("budget must be non-negative")
    if not is_p_monotone(T, p).holds:
        raise ValueError("falsify_double_polar expects a p-monotone operator")
    tol = _query_tol(T, q) if tol is None else tol
    if budget == 0:
        return Verdict(Decision.INCONCLUSIVE, value=-math.inf, tol=tol,
                       note="zero budget")
    d = T.dim
    radius = max(1.0, float(np.max(np.abs(np.concatenate(
        [T.xs.ravel(), T.xstars.ravel(), q.x, q.xstar])))))
    half = 2.0 * radius

    def members(cands):
        return cands[polar_excess(T, p, cands[:, :d], cands[:, d:]) <= tol]

    n_axis = max(2, int(math.floor(min(budget, lattice_size) ** (1 / (2 * d)))))
    if n_axis % 2 == 0 and (n_axis + 1) ** (2 * d) <= min(budget, lattice_size):
        n_axis += 1
    lattice = _lattice([np.linspace(-half, half, n_axis)] * (2 * d))
    spent = len(lattice)
    if spent > budget:
        lattice = lattice[:budget]
        spent = budget
    good = members(lattice)
    best_val, best_chain = -math.inf, None
    if len(good):
        C = FiniteOperator.from_arrays(good[:, :d], good[:, d:])
        F, idx = fitzpatrick_chain(C, p, q)
        best_val = F - q.pairing()
        best_chain = good[list(idx)]
        if best_val > tol:
            return _double_polar_fail(best_chain, best_val, tol, d, spent)

    rng = np.random.default_rng(seed)
    remaining = budget - spent
    sigma = half / 4
    qrow = np.concatenate([q.x, q.xstar])
    batch = 256
    while remaining > 0:
        b = min(batch, remaining)
        remaining -= b
        spent += b
        if best_chain is None:
            props = rng.uniform(-half, half, size=(b, p, 2 * d))
        else:
            props = np.repeat(best_chain[None], b, axis=0)
            slot = rng.integers(0, p, size=b)
            props[np.arange(b), slot] += sigma * rng.standard_normal((b, 2 * d))
        flat = props.reshape(-1, 2 * d)
        ok = (polar_excess(T, p, flat[:, :d], flat[:, d:]) <= tol)
        ok = ok.reshape(b, p).all(axis=1)
        if not ok.any():
            sigma *= 0.9
            continue
        cands = props[ok]
        full = np.concatenate([np.repeat(qrow[None, None], len(cands), 0),
                               cands], axis=1)
        xs, xss = full[..., :d], full[..., d:]
        vals = np.sum((np.roll(xs, -1, axis=1) - xs) * xss, axis=(1, 2))
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_chain = float(vals[k]), cands[k]
            if best_val > tol:
                return _double_polar_fail(best_chain, best_val, tol, d, spent)
        else:
            sigma *= 0.97
    return Verdict(Decision.INCONCLUSIVE, value=best_val, tol=tol,
                   note=f"no exclusion chain within {spent} candidates")


def _double_polar_fail(rows, value, tol, d, spent):
    chain = [Pair(r[:d], r[d:]) for r in rows]
    return Verdict(Decision.FAILS, certificate=chain, value=float(value),
                   tol=tol, note=f"{spent} candidates evaluated")


def normal_cone_membership(domain_points, x, ystar, tol: float = 1e-9) -> bool:
    """Is ``ystar`` normal at ``x`` to the convex hull of ``domain_points``?

    ``x`` must lie in the hull (checked with a small LP); then it suffices
    to test ``<ystar, v - x> <= tol`` on the generating points.
    """
    V = np.atleast_2d(np.asarray(domain_points, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ystar = np.atleast_1d(np.asarray(ystar, dtype=float))
    m = V.shape[0]
    A_eq = np.vstack([V.T, np.ones((1, m))])
    b_eq = np.concatenate([x, [1.0]])
    res = linprog(np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=(0, None),
                  method="highs")
    if res.status != 0:
        raise OutsideHullError(f"{x.tolist()} is outside the convex hull")
    return bool(np.max((V - x) @ ystar) <= tol)


def translate(T: FiniteOperator, shift) -> FiniteOperator:
    s = as_pair(shift)
    return FiniteOperator([p + s for p in T], dim=T.dim)


def inverse(T: FiniteOperator) -> FiniteOperator:
    return FiniteOperator([p.swapped() for p in T], dim=T.dim)


def ray_scale(T: FiniteOperator, index: int, lam: float) -> Pair:
    """``lam * (x_i, x_i*)``, a point of the conic hull of the graph."""
    if lam < 0:
        raise ValueError(f"ray scaling needs lam >= 0, got {lam}")
    return T[index].scaled(lam)
