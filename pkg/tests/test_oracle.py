import itertools
import math

import numpy as np
import pytest

from helpers import finite
from pmono import finite_op as fo
from pmono import instances, oracle
from pmono.finite_op import FiniteOperator, GridTooLarge, Pair
from pmono.linear_rel import LinearRelation, is_p_monotone_linear


def loop_max_cyclic_sum(T, p):
    """Plain-Python enumeration; a second reference for the vectorized oracle."""
    best = -math.inf
    for tup in itertools.product(range(len(T)), repeat=p + 1):
        best = max(best, fo.cyclic_sum([T[i] for i in tup]))
    return best


class TestBrutePMonotone:
    def test_singleton(self, singleton):
        v = oracle.brute_p_monotone(singleton, 3)
        assert v.holds and v.value == 0.0

    def test_rotation_samples(self, rotation_samples):
        v = oracle.brute_p_monotone(rotation_samples, 2)
        assert v.fails and v.value == 2.0
        assert fo.cyclic_sum([rotation_samples[i] for i in v.certificate]) == 2.0

    @pytest.mark.parametrize("seed", range(25))
    def test_matches_loop(self, seed):
        rng = np.random.default_rng(seed)
        T = instances.random_finite(rng, int(rng.integers(1, 5)), 2)
        p = int(rng.integers(1, 4))
        assert math.isclose(oracle.brute_p_monotone(T, p).value,
                            loop_max_cyclic_sum(T, p), abs_tol=1e-12)

    def test_cap(self):
        T = FiniteOperator([Pair([float(i)], [0.0]) for i in range(40)])
        with pytest.raises(GridTooLarge):
            oracle.brute_p_monotone(T, 4)


class TestBruteFitzpatrick:
    def test_singleton(self, singleton):
        assert oracle.brute_fitzpatrick(singleton, 3, Pair([2], [-5])) == 0.0

    @pytest.mark.parametrize("seed", range(20))
    def test_order_one_closed_form(self, seed):
        rng = np.random.default_rng(seed)
        T = instances.random_finite(rng, 6, 2)
        q = Pair(rng.standard_normal(2), rng.standard_normal(2))
        assert math.isclose(oracle.brute_fitzpatrick(T, 1, q),
                            oracle.classical_fitzpatrick(T, q), abs_tol=1e-12)

    def test_hand_value(self):
        # T = {(1, 1)}, q = (0, 2): chain term <1 - 0, 2> + <0 - 1, 1> = 1
        T = finite([(1, 1)])
        assert oracle.brute_fitzpatrick(T, 1, Pair([0], [2])) == 1.0
        assert oracle.brute_fitzpatrick(T, 3, Pair([0], [2])) == 1.0


class TestSampleLinear:
    def test_identity(self):
        T = LinearRelation.from_matrix(np.eye(3))
        for p in (1, 3, 5):
            assert oracle.sample_linear_p_monotone(T, p, 10_000).holds

    def test_rotation_with_witness(self, rotation):
        eig = is_p_monotone_linear(rotation, 2)
        assert eig.fails
        v = oracle.sample_linear_p_monotone(rotation, 2, 100,
                                            witnesses=[eig.certificate])
        assert v.fails
        assert fo.cyclic_sum(v.certificate) > 0

    def test_rotation_random(self, rotation):
        assert oracle.sample_linear_p_monotone(rotation, 2, 10_000).fails

    def test_zero(self):
        assert oracle.sample_linear_p_monotone(LinearRelation.zero(2), 3).holds

    def test_bad_budget(self, rotation):
        with pytest.raises(ValueError):
            oracle.sample_linear_p_monotone(rotation, 1, 0)
