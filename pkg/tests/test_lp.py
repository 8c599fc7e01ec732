import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog as scipy_linprog

from qcut.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, linprog


@st.composite
def bounded_lps(draw):
    nv = draw(st.integers(1, 6))
    mu = draw(st.integers(1, 6))
    me = draw(st.integers(0, 2))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    c = rng.integers(-3, 6, nv).astype(float)
    A = rng.integers(-3, 5, (mu, nv)).astype(float)
    # a box row keeps every instance bounded
    A = np.vstack([A, np.ones(nv)])
    x0 = rng.uniform(0, 1, nv)
    b = A @ x0 + rng.uniform(0, 2, mu + 1)
    Aeq = rng.integers(-2, 4, (me, nv)).astype(float)
    beq = Aeq @ x0
    return c, A, b, Aeq, beq


@given(bounded_lps())
@settings(max_examples=150, deadline=None)
def test_matches_scipy(lp):
    c, A, b, Aeq, beq = lp
    ours = linprog(c, A, b, Aeq if len(Aeq) else None, beq if len(Aeq) else None)
    ref = scipy_linprog(c, A, b, Aeq if len(Aeq) else None, beq if len(Aeq) else None,
                        bounds=(0, None), method="highs")
    assert ref.status == 0
    assert ours.status == OPTIMAL
    assert ours.fun == pytest.approx(ref.fun, abs=1e-6, rel=1e-6)
    assert np.all(A @ ours.x <= b + 1e-7)
    if len(Aeq):
        np.testing.assert_allclose(Aeq @ ours.x, beq, atol=1e-7)


def test_negative_right_hand_side():
    # x >= 2, y >= 1 written as -x <= -2, -y <= -1
    res = linprog([1.0, 1.0], [[-1.0, 0.0], [0.0, -1.0]], [-2.0, -1.0])
    assert res.success and res.fun == pytest.approx(3.0)


def test_infeasible():
    res = linprog([1.0], [[1.0], [-1.0]], [1.0, -2.0])
    assert res.status == INFEASIBLE and not res.success
    assert res.message == "infeasible"


def test_unbounded():
    res = linprog([-1.0, 0.0], [[0.0, 1.0]], [1.0])
    assert res.status == UNBOUNDED and res.fun == -np.inf


def test_redundant_equalities():
    res = linprog([1.0, 2.0], A_eq=[[1.0, 1.0], [2.0, 2.0]], b_eq=[1.0, 2.0])
    assert res.success and res.fun == pytest.approx(1.0)
    np.testing.assert_allclose(res.x, [1.0, 0.0])
