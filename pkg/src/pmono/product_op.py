"""Product relations ``T_{p+}`` and ``T_{p-}`` on the (p+1)-fold product space.

For a linear relation T, a point of ``T_{p+-}`` is
``((x_0, ..., x_p), (z_i* - z_{i+-1}* + a_i*)_i)`` with ``z_i* in T(x_i)``
and ``a_i* in T(0)``.  Indices are cyclic: ``x_{p+1}`` is ``x_0`` and
``x_{-1}`` is ``x_p``.  The product pairing is the Euclidean inner product
of the concatenations, so product relations are ordinary
:class:`~pmono.linear_rel.LinearRelation` objects of dimension ``(p+1)d``.

The ``verify_*`` functions check the transfer results between T and its
products on concrete relations and return JSON-ready reports.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linear_rel as lr
from . import subspace as ss
from .finite_op import FiniteOperator, GridTooLarge, cyclic_sum, inverse_cyclic_sum
from .linear_rel import LinearRelation
from .subspace import Subspace
from .verdict import jsonable

__all__ = [
    "ProductRelation",
    "build_product",
    "product_pairing",
    "chain_pairing",
    "verify_transfer",
    "verify_transfer_finite",
    "verify_maxtp",
    "verify_adjoint_inclusion",
    "brezis_browder_verify",
]

PLUS, MINUS = "plus", "minus"


@dataclass(frozen=True, eq=False)
class ProductRelation:
    p: int
    inner_dim: int
    relation: LinearRelation
    sign: str


def _shift(sign):
    if sign in (PLUS, "+", 1):
        return 1
    if sign in (MINUS, "-", -1):
        return -1
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


def build_product(T: LinearRelation, p: int, sign) -> ProductRelation:
    """Graph of ``T_{p+}`` (``sign="plus"``) or ``T_{p-}``."""
    if int(p) != p or p < 1:
        raise ValueError(f"order p must be a positive integer, got {p}")
    s = _shift(sign)
    d = T.dim
    n = p + 1
    D = n * d
    gens = []
    for i in range(n):
        # z_i enters x_i* positively and x_j* negatively where j + s = i
        j = (i - s) % n
        for b in T.basis:
            g = np.zeros(2 * D)
            g[i * d:(i + 1) * d] = b[:d]
            g[D + i * d:D + (i + 1) * d] += b[d:]
            g[D + j * d:D + (j + 1) * d] -= b[d:]
            gens.append(g)
    for i in range(n):
        for a in lr.value_at_zero(T).basis:
            g = np.zeros(2 * D)
            g[D + i * d:D + (i + 1) * d] = a
            gens.append(g)
    graph = ss.span(gens, atol=ss.TOL_RANK, n=2 * D)
    return ProductRelation(int(p), d, LinearRelation(D, graph),
                           PLUS if s == 1 else MINUS)


def product_pairing(xbar, xbar_star, d: int) -> float:
    """``sum_i <x_i, x_i*>`` computed block by block."""
    xbar = np.asarray(xbar, dtype=float).reshape(-1, d)
    xbar_star = np.asarray(xbar_star, dtype=float).reshape(-1, d)
    return float(sum(a @ b for a, b in zip(xbar, xbar_star)))


def _block_product(S: Subspace, n: int) -> Subspace:
    """n-fold product of a subspace of R^d, inside R^{nd}."""
    d = S.ambient_dim
    rows = []
    for i in range(n):
        for b in S.basis:
            r = np.zeros(n * d)
            r[i * d:(i + 1) * d] = b
            rows.append(r)
    return ss.span(rows, n=n * d)


def chain_pairing(chain, sign, anchor=None) -> float:
    """Pairing ``<xbar - ybar, xbar* - ybar*>`` built from a finite chain.

    ``xbar = (x_0, ..., x_p)``, ``xbar*_i = x_i* - x_{i+-1}*`` and
    ``ybar = (a, ..., a)`` with ``ybar* = 0`` for an anchor point ``a``.
    For ``minus`` this equals minus the cyclic sum of the chain; for
    ``plus`` it equals minus the cyclic sum of the inverse chain.
    """
    s = _shift(sign)
    xs = np.array([c.x for c in chain])
    xss = np.array([c.xstar for c in chain])
    a = xs[0] if anchor is None else np.asarray(anchor, dtype=float)
    xbs = xss - np.roll(xss, -s, axis=0)
    return float(np.sum((xs - a) * xbs))


def verify_transfer(T: LinearRelation, p: int, tol: float | None = None) -> dict:
    """T p-monotone iff ``T_{p+}`` monotone iff ``T_{p-}`` monotone."""
    pm = lr.is_p_monotone_linear(T, p, tol)
    plus = lr.is_monotone_linear(build_product(T, p, PLUS).relation, tol)
    minus = lr.is_monotone_linear(build_product(T, p, MINUS).relation, tol)
    preds = {"T_p_monotone": pm, "T_plus_monotone": plus,
             "T_minus_monotone": minus}
    return _report(T, p, preds)


def verify_transfer_finite(T: FiniteOperator, p: int,
                           tol: float | None = None) -> dict:
    """Finite counterpart: every (p+1)-tuple yields product pairs whose
    pairing is the negated cyclic sum (``minus``) or negated inverse
    cyclic sum (``plus``).  Sampled monotonicity of ``T_{p-}`` then forces
    p-monotonicity of T, and of ``T_{p+}`` that of the inverse."""
    from .finite_op import default_tol, is_p_monotone, inverse

    tol = default_tol(T) if tol is None else tol
    N = len(T)
    if N ** (p + 1) > 10**6:
        raise GridTooLarge(f"{N}^{p + 1} tuples exceed 10^6")
    min_plus = min_minus = 0.0
    identity_gap = 0.0
    for tup in itertools.product(range(N), repeat=p + 1):
        chain = [T[i] for i in tup]
        m = chain_pairing(chain, MINUS)
        pl = chain_pairing(chain, PLUS)
        identity_gap = max(identity_gap, abs(m + cyclic_sum(chain)),
                           abs(pl + inverse_cyclic_sum(chain)))
        min_minus = min(min_minus, m)
        min_plus = min(min_plus, pl)
    minus_mono = min_minus >= -tol
    plus_mono = min_plus >= -tol
    pm = is_p_monotone(T, p, tol).holds
    pm_inv = is_p_monotone(inverse(T), p, tol).holds
    ok = (not minus_mono or pm) and (not plus_mono or pm_inv) \
        and identity_gap <= tol
    return {"instance": jsonable(T.to_dict()), "p": p,
            "predicates": {"minus_pairs_monotone": minus_mono,
                           "plus_pairs_monotone": plus_mono,
                           "T_p_monotone": pm,
                           "T_inverse_p_monotone": pm_inv},
            "identity_gap": identity_gap,
            "equivalence": "pass" if ok else "fail",
            "certificates": []}


def verify_maxtp(T: LinearRelation, p: int, tol: float | None = None) -> dict:
    """T maximal p-monotone iff ``T_{p+}`` (and ``T_{p-}``) maximal monotone.

    Also records the product identities ``T_{p+-}(0) = prod T(0)`` and
    ``dom(T_{p+-})^perp = prod dom(T)^perp``.
    """
    n = p + 1
    preds = {"T_maximal_p_monotone": lr.is_maximal_p_monotone_linear(T, p, tol)}
    t0 = _block_product(lr.value_at_zero(T), n)
    dperp = _block_product(ss.ortho_complement(lr.domain(T)), n)
    identities = {}
    for sign in (PLUS, MINUS):
        P = build_product(T, p, sign).relation
        preds[f"T_{sign}_maximal_monotone"] = \
            lr.is_maximal_p_monotone_linear(P, 1, tol)
        identities[f"{sign}_value_at_zero"] = ss.equal(lr.value_at_zero(P), t0)
        identities[f"{sign}_domain_perp"] = ss.equal(
            ss.ortho_complement(lr.domain(P)), dperp)
    rep = _report(T, p, preds)
    rep["identities"] = identities
    if not all(identities.values()):
        rep["equivalence"] = "fail"
    return rep


def verify_adjoint_inclusion(T: LinearRelation, p: int,
                             tol: float = ss.TOL_MEMBER) -> dict:
    """``(T*)_{p+} ⊂ (T_{p-})*`` and ``(T*)_{p-} ⊂ (T_{p+})*``."""
    Ts = lr.adjoint(T)
    out = {}
    certs = []
    ok = True
    for left, right in ((PLUS, MINUS), (MINUS, PLUS)):
        L = build_product(Ts, p, left).relation
        R = lr.adjoint(build_product(T, p, right).relation)
        bad = [b for b in L.basis if not ss.contains(R.graph, b, tol)]
        out[f"adjoint_{left}_in_{right}_adjoint"] = {
            "included": not bad, "dim_left": L.graph.dim,
            "dim_right": R.graph.dim,
            "equal": ss.equal(L.graph, R.graph)}
        if bad:
            ok = False
            certs.append(jsonable(bad[0]))
    return {"instance": T.to_dict(), "p": p, "predicates": out,
            "equivalence": "pass" if ok else "fail", "certificates": certs}


def brezis_browder_verify(T: LinearRelation, p: int,
                          tol: float | None = None) -> dict:
    """T maximal p-monotone iff T* maximal p-monotone iff T* p-monotone.

    The equivalence is claimed for p-monotone T.  ``hypothesis`` records
    whether T is p-monotone; a mixed outcome under the hypothesis is
    reported as ``"fail"`` with every certificate.  Without it a mixed
    outcome is no counterexample (the full space has the zero relation as
    adjoint) and the report says ``"pass"`` with a note.
    """
    Ts = lr.adjoint(T)
    preds = {"T_maximal_p_monotone": lr.is_maximal_p_monotone_linear(T, p, tol),
             "adjoint_maximal_p_monotone":
                 lr.is_maximal_p_monotone_linear(Ts, p, tol),
             "adjoint_p_monotone": lr.is_p_monotone_linear(Ts, p, tol)}
    rep = _report(T, p, preds)
    hyp = lr.is_p_monotone_linear(T, p, tol).holds
    rep["hypothesis"] = {"T_p_monotone": hyp}
    if not hyp and rep["equivalence"] == "fail":
        rep["equivalence"] = "pass"
        rep["note"] = "T is not p-monotone; mixed outcome outside the hypothesis"
    rep["adjoint"] = Ts.to_dict()
    return rep


def _report(T, p, preds: dict) -> dict:
    decisions = {v.decision for v in preds.values()}
    return {"instance": T.to_dict(), "p": p,
            "predicates": {k: v.to_dict() for k, v in preds.items()},
            "equivalence": "pass" if len(decisions) == 1 else "fail",
            "certificates": [{"predicate": k, "certificate":
                              jsonable(v.certificate)}
                             for k, v in preds.items()
                             if v.certificate is not None]}
