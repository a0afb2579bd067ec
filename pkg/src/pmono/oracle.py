"""Brute-force references for the engines.

Nothing here touches the cached weight matrix or the dynamic programs:
edge values are recomputed from the points and every tuple or chain is
enumerated.  These functions are exponentially slow on purpose.
"""

from __future__ import annotations

import math

import numpy as np

from .finite_op import FiniteOperator, GridTooLarge, Pair, as_pair
from .verdict import Decision, Verdict

ENUM_CAP = 10**7


def _edges(T: FiniteOperator) -> np.ndarray:
    N = len(T)
    G = np.zeros((N, N))
    for i, a in enumerate(T):
        for j, b in enumerate(T):
            G[i, j] = np.dot(b.x - a.x, a.xstar)
    return G


def _enumerate_closed(G: np.ndarray, length: int) -> np.ndarray:
    """Tensor S[i_0, ..., i_{length-1}] of closed-walk weights."""
    N = G.shape[0]
    S = np.zeros((N,) * length)
    for k in range(length):
        shape = [1] * length
        a, b = k, (k + 1) % length
        if a < b:
            shape[a] = shape[b] = N
            S = S + G.reshape(shape)
        else:  # closing edge i_{last} -> i_0
            shape[a] = shape[b] = N
            S = S + G.T.reshape(shape)
    return S


def brute_p_monotone(T: FiniteOperator, p: int, tol: float = 1e-9) -> Verdict:
    """Maximum cyclic sum over every (p+1)-tuple, with its argmax tuple."""
    N = len(T)
    if N == 0:
        return Verdict(Decision.HOLDS, value=-math.inf, tol=tol)
    if N ** (p + 1) > ENUM_CAP:
        raise GridTooLarge(f"{N}^{p + 1} tuples exceed {ENUM_CAP}")
    if p == 0:
        return Verdict(Decision.HOLDS, value=0.0, tol=tol)
    S = _enumerate_closed(_edges(T), p + 1)
    flat = int(np.argmax(S))
    tup = tuple(int(i) for i in np.unravel_index(flat, S.shape))
    value = float(S.flat[flat])
    if value > tol:
        return Verdict(Decision.FAILS, certificate=tup, value=value, tol=tol)
    return Verdict(Decision.HOLDS, value=value, tol=tol)


def brute_fitzpatrick(T: FiniteOperator, p: int, q) -> float:
    """Fitzpatrick function of order p by enumerating all p-chains."""
    q = as_pair(q)
    N = len(T)
    if N == 0:
        return -math.inf
    if N ** p > ENUM_CAP:
        raise GridTooLarge(f"{N}^{p} chains exceed {ENUM_CAP}")
    G = _edges(T)
    entry = np.array([np.dot(b.x - q.x, q.xstar) for b in T])
    exit_ = np.array([np.dot(q.x - b.x, b.xstar) for b in T])
    S = np.zeros((N,) * p)
    for k in range(p):
        shape = [1] * p
        shape[k] = N
        if k == 0:
            S = S + entry.reshape(shape)
        if k == p - 1:
            S = S + exit_.reshape(shape)
        if k < p - 1:
            shape2 = [1] * p
            shape2[k] = shape2[k + 1] = N
            S = S + G.reshape(shape2)
    return float(np.max(S)) + q.pairing()


def classical_fitzpatrick(T: FiniteOperator, q) -> float:
    """Order-one closed form ``sup <x, y*> + <y, x*> - <y, y*>``."""
    q = as_pair(q)
    if len(T) == 0:
        return -math.inf
    return max(float(q.x @ b.xstar + b.x @ q.xstar - b.x @ b.xstar) for b in T)


def sample_linear_p_monotone(T, p: int, n_samples: int = 10_000,
                             tol: float = 1e-9, seed: int = 0,
                             witnesses=None) -> Verdict:
    """Random (p+1)-tuples from the graph of a linear relation.

    Coefficients on the graph basis are standard normal.  Each tuple in
    ``witnesses`` (sequences of :class:`Pair`) is evaluated first, which
    makes disagreement tests deterministic.  A violation is a cyclic sum
    above ``tol * (1 + sum ||x_i|| ||x_i*||)``.  Only ``FAILS`` is
    conclusive; ``HOLDS`` means no violation was sampled.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    d = T.dim
    B = T.graph.basis
    k = B.shape[0]
    best = -math.inf
    for w in witnesses or ():
        pairs = [as_pair(z) for z in w]
        v, scale = _tuple_sum(np.array([z.x for z in pairs]),
                              np.array([z.xstar for z in pairs]))
        if v > tol * (1 + scale):
            return Verdict(Decision.FAILS, certificate=pairs, value=v, tol=tol)
        best = max(best, v)
    if k == 0:
        return Verdict(Decision.HOLDS, value=max(best, 0.0), tol=tol,
                       note="sample-verified")
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((n_samples, p + 1, k))
    Z = coeffs @ B                                   # (n, p+1, 2d)
    xs, xss = Z[..., :d], Z[..., d:]
    vals = np.sum((np.roll(xs, -1, axis=1) - xs) * xss, axis=(1, 2))
    scales = np.sum(np.linalg.norm(xs, axis=2) * np.linalg.norm(xss, axis=2),
                    axis=1)
    bad = np.flatnonzero(vals > tol * (1 + scales))
    if bad.size:
        i = int(bad[np.argmax(vals[bad])])
        pairs = [Pair(a, b) for a, b in zip(xs[i], xss[i])]
        return Verdict(Decision.FAILS, certificate=pairs, value=float(vals[i]),
                       tol=tol)
    return Verdict(Decision.HOLDS, value=max(best, float(vals.max())), tol=tol,
                   note="sample-verified")


def _tuple_sum(xs, xss):
    v = float(np.sum((np.roll(xs, -1, axis=0) - xs) * xss))
    scale = float(np.sum(np.linalg.norm(xs, axis=1)
                         * np.linalg.norm(xss, axis=1)))
    return v, scale


__all__ = ["brute_p_monotone", "brute_fitzpatrick", "classical_fitzpatrick",
           "sample_linear_p_monotone", "ENUM_CAP"]
