"""Named and seeded random operators used by the CLI and the test suite."""

from __future__ import annotations

import numpy as np

from . import subspace as ss
from .finite_op import FiniteOperator, Pair
from .linear_rel import LinearRelation

ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])

NAMED = ("singleton", "rotation", "rotation-samples", "psd", "cubic-samples",
         "zero")


def named(name: str, dim: int = 1):
    """Fixed instances: ``singleton`` is {(0, 0)} in R^dim, ``rotation`` the
    quarter-turn graph in R^2, ``rotation-samples`` three of its points,
    ``psd`` a symmetric positive definite matrix graph, ``cubic-samples``
    points of x -> x^3 and ``zero`` the relation {(0, 0)} as a subspace."""
    if name == "singleton":
        return FiniteOperator([Pair(np.zeros(dim), np.zeros(dim))])
    if name == "rotation":
        return LinearRelation.from_matrix(ROTATION)
    if name == "rotation-samples":
        return rotation_samples()
    if name == "psd":
        return LinearRelation.from_matrix([[2.0, 1.0], [1.0, 2.0]])
    if name == "cubic-samples":
        return FiniteOperator([Pair([t], [t ** 3]) for t in (-1.0, 0.0, 1.0, 2.0)])
    if name == "zero":
        return LinearRelation.zero(dim)
    raise KeyError(f"unknown instance {name!r}; choose from {', '.join(NAMED)}")


def rotation_samples() -> FiniteOperator:
    xs = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    return FiniteOperator.from_arrays(xs, xs @ ROTATION.T)


def random_finite(rng, n: int, d: int, kind: str = "any") -> FiniteOperator:
    """``any``: Gaussian pairs; ``gradient``: pairs of x -> Ax with A
    positive semidefinite (cyclically monotone); ``affine``: x -> (S+K)x
    with S PSD and K skew (monotone, often not 2-monotone)."""
    xs = rng.standard_normal((n, d))
    if kind == "any":
        return FiniteOperator.from_arrays(xs, rng.standard_normal((n, d)))
    G = rng.standard_normal((d, d))
    A = G @ G.T
    if kind == "affine":
        K = rng.standard_normal((d, d))
        A = A + rng.uniform(0, 3) * (K - K.T)
    elif kind != "gradient":
        raise ValueError(f"unknown finite family {kind!r}")
    return FiniteOperator.from_arrays(xs, xs @ A.T)


def random_linear(rng, d: int, family: str = "monotone") -> LinearRelation:
    """Random linear relation in R^d x R^d.

    ``general`` spans random vectors (usually not monotone).  ``monotone``
    takes a random domain D, a map ``x -> (S + cK)x`` with S PSD of random
    rank and K skew, and values at zero in a random subspace of D^perp;
    the skew weight c in [0, 3] makes p-monotonicity hit or miss.
    ``maximal`` is ``monotone`` with values at zero all of D^perp.
    """
    if family == "general":
        k = int(rng.integers(0, 2 * d + 1))
        return LinearRelation.from_basis(rng.standard_normal((k, 2 * d)), d) \
            if k else LinearRelation.zero(d)
    if family not in ("monotone", "maximal"):
        raise ValueError(f"unknown linear family {family!r}")
    r = int(rng.integers(0, d + 1))
    D = ss.span(rng.standard_normal((r, d)), n=d) if r else ss.Subspace.zero(d)
    rank = int(rng.integers(0, d + 1))
    G = rng.standard_normal((d, rank))
    K = rng.standard_normal((d, d))
    A = G @ G.T + rng.uniform(0, 3) * (K - K.T)
    perp = ss.ortho_complement(D).basis
    if family == "maximal":
        N = perp
    else:
        m = int(rng.integers(0, perp.shape[0] + 1))
        N = rng.standard_normal((m, perp.shape[0])) @ perp if m else \
            np.zeros((0, d))
    rows = [np.concatenate([u, A @ u]) for u in D.basis]
    rows += [np.concatenate([np.zeros(d), n]) for n in N]
    return LinearRelation(d, ss.span(rows, n=2 * d))
