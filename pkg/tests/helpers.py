"""Small constructors shared by the test modules."""

import numpy as np

from pmono.finite_op import FiniteOperator, Pair


def finite(points):
    """Finite operator from ``[(x, xstar), ...]`` with scalar or vector parts."""
    return FiniteOperator([Pair(np.atleast_1d(x), np.atleast_1d(s))
                           for x, s in points])


def lattice(lo, hi, step, ndim):
    axis = np.arange(lo, hi + step / 2, step)
    mesh = np.meshgrid(*([axis] * ndim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def p_monotone_instance(rng, p, n, d, tries=200):
    """Random finite operator that is p-monotone (mixing skew parts so
    that not all of them are cyclically monotone)."""
    from pmono import instances
    from pmono.finite_op import is_p_monotone

    for _ in range(tries):
        kind = "affine" if rng.random() < 0.6 else "gradient"
        T = instances.random_finite(rng, n, d, kind)
        if is_p_monotone(T, p).holds:
            return T
    return instances.random_finite(rng, n, d, "gradient")


def polar_suite(seed):
    """Violation counts of the polar calculus rules on one seeded instance.

    Checks nesting in p, antitonicity under graph inclusion, translation
    equivariance, graph-in-polar and normal-cone augmentation on a lattice
    in R^{2d}.
    """
    from pmono import finite_op as fo

    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 3))
    p = int(rng.integers(1, 4))
    n = int(rng.integers(2, 6))
    T = p_monotone_instance(rng, p, n, d)
    step = 0.1 if d == 1 else 0.5
    pts = lattice(-2.0, 2.0, step, 2 * d)
    X, XS = pts[:, :d], pts[:, d:]
    tol = 1e-9
    out = {}

    ex_p = fo.polar_excess(T, p, X, XS)
    ex_next = fo.polar_excess(T, p + 1, X, XS)
    out["nesting"] = int(np.sum((ex_next <= tol) & ~(ex_p <= tol)))

    keep = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
    ex_sub = fo.polar_excess(T.subset(sorted(keep)), p, X, XS)
    out["antitonicity"] = int(np.sum((ex_p <= tol) & ~(ex_sub <= tol)))

    s = rng.uniform(-1, 1, size=2 * d)
    ex_tr = fo.polar_excess(fo.translate(T, Pair(s[:d], s[d:])), p,
                            X + s[:d], XS + s[d:])
    band = 1e-7 * (1 + np.abs(ex_p))
    decided = np.abs(ex_p) > band
    out["translation"] = int(np.sum(decided & ((ex_p <= tol) != (ex_tr <= tol)))
                             + np.sum(np.abs(ex_tr - ex_p) > band))

    out["graph_in_polar"] = sum(
        not fo.polar_membership(T, p, q).holds for q in T)

    bad = 0
    for _ in range(5):
        u = rng.standard_normal(d)
        i = int(np.argmax(T.xs @ u))
        ystar = rng.uniform(0.1, 2.0) * u
        if not fo.normal_cone_membership(T.xs, T.xs[i], ystar):
            bad += 1
            continue
        q = Pair(T.xs[i], T.xstars[i] + ystar)
        bad += not fo.polar_membership(T, p, q).holds
    out["normal_cone"] = bad
    return out


def linear_polar_conditions(T, p, rng, n_probes=8):
    """Four conditions that coincide for a linear relation T.

    eigen: the cyclic-form eigenvalue test.
    zero_slice: the polar at 0 equals dom(T)^perp, probed on a basis of
        dom(T)^perp (members) and a basis of dom(T) (non-members).
    nonempty: some probe, (0, 0) or random, lies in the polar.
    origin: (0, 0) lies in the polar.
    """
    from pmono import linear_rel as lr
    from pmono import subspace as ss

    d = T.dim
    zero = np.zeros(d)
    member = lambda x, xs: lr.polar_membership_linear(T, p, Pair(x, xs)).holds  # noqa: E731
    dom = lr.domain(T)
    perp = ss.ortho_complement(dom)
    zero_slice = (member(zero, zero)
                  and all(member(zero, u) for u in perp.basis)
                  and not any(member(zero, u) for u in dom.basis))
    probes = [(zero, zero)] + [tuple(rng.standard_normal((2, d)))
                               for _ in range(n_probes)]
    return {"eigen": lr.is_p_monotone_linear(T, p).holds,
            "zero_slice": zero_slice,
            "nonempty": any(member(x, xs) for x, xs in probes),
            "origin": member(zero, zero)}
