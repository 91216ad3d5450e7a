"""Two-phase simplex solver cross-checked against scipy's HiGHS backend."""

import numpy as np
import pytest
import scipy.optimize

from spherebound.simplex import (
    InfeasibleError,
    UnboundedError,
    lp_solve,
    lp_solve_with_duals,
)


def _random_lp(rng, n, m):
    c = rng.uniform(-1.0, 2.0, size=n)
    constraints = []
    for _ in range(m):
        a = rng.uniform(-1.0, 1.0, size=n)
        rel = rng.choice(["<=", ">=", "="], p=[0.45, 0.45, 0.1])
        # keep equality rows satisfiable from the nonnegative orthant
        b = rng.uniform(0.05, 0.8) if rel == "=" else rng.uniform(-1.0, 2.0)
        constraints.append((a, rel, float(b)))
    # a box keeps every instance bounded so scipy and the solver agree on status
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        constraints.append((e, "<=", 10.0))
    return c, constraints


def _scipy_solve(c, constraints):
    n = len(c)
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for a, rel, b in constraints:
        if rel == "<=":
            a_ub.append(a)
            b_ub.append(b)
        elif rel == ">=":
            a_ub.append(-np.asarray(a))
            b_ub.append(-b)
        else:
            a_eq.append(a)
            b_eq.append(b)
    return scipy.optimize.linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=(0, None),
        method="highs",
    )


def _check_feasible(x, constraints, tol=1e-8):
    assert np.all(x >= -tol)
    for a, rel, b in constraints:
        lhs = float(np.dot(a, x))
        if rel == "<=":
            assert lhs <= b + tol
        elif rel == ">=":
            assert lhs >= b - tol
        else:
            assert abs(lhs - b) <= tol


def test_random_battery_matches_scipy():
    rng = np.random.default_rng(2024)
    solved = 0
    infeasible = 0
    for _ in range(60):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(1, 9))
        c, constraints = _random_lp(rng, n, m)
        ref = _scipy_solve(c, constraints)
        if ref.status == 2:
            with pytest.raises(InfeasibleError):
                lp_solve(c, constraints)
            infeasible += 1
            continue
        assert ref.status == 0
        x = lp_solve(c, constraints)
        _check_feasible(x, constraints)
        assert float(np.dot(c, x)) == pytest.approx(ref.fun, abs=1e-8)
        solved += 1
    # the battery must actually exercise both outcomes
    assert solved >= 20 and infeasible >= 3


def test_duals_satisfy_strong_duality_and_signs():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(40):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(1, 7))
        c, constraints = _random_lp(rng, n, m)
        ref = _scipy_solve(c, constraints)
        if ref.status != 0:
            continue
        x, y = lp_solve_with_duals(c, constraints)
        b = np.array([t[2] for t in constraints])
        assert float(np.dot(c, x)) == pytest.approx(float(np.dot(y, b)), abs=1e-7)
        for yi, (_, rel, _) in zip(y, constraints):
            if rel == "<=":
                assert yi <= 1e-9
            elif rel == ">=":
                assert yi >= -1e-9
        checked += 1
    assert checked >= 20


def test_textbook_examples():
    x = lp_solve(np.array([1.0]), [(np.array([1.0]), ">=", 3.0)])
    assert x[0] == pytest.approx(3.0, abs=1e-12)
    x = lp_solve(
        np.array([1.0, 1.0]),
        [(np.array([1.0, 0.0]), ">=", 1.0), (np.array([0.0, 1.0]), ">=", 2.0)],
    )
    assert np.allclose(x, [1.0, 2.0], atol=1e-12)


def test_degenerate_tie_picks_lowest_index_vertex():
    # both (1,0) and (0,1) are optimal; Bland's rule enters x_0 first
    x = lp_solve(np.array([1.0, 1.0]), [(np.array([1.0, 1.0]), ">=", 1.0)])
    assert np.allclose(x, [1.0, 0.0], atol=1e-12)


def test_determinism_bitwise():
    rng = np.random.default_rng(107)
    c, constraints = _random_lp(rng, 5, 6)
    x1, y1 = lp_solve_with_duals(c, constraints)
    x2, y2 = lp_solve_with_duals(c, constraints)
    assert np.array_equal(x1, x2) and np.array_equal(y1, y2)


def test_infeasible_systems_raise():
    with pytest.raises(InfeasibleError):
        lp_solve(np.array([1.0]), [(np.array([1.0]), "<=", -1.0)])
    with pytest.raises(InfeasibleError):
        lp_solve(
            np.array([1.0, 1.0]),
            [
                (np.array([1.0, 1.0]), "=", 1.0),
                (np.array([1.0, 1.0]), "=", 2.0),
            ],
        )


def test_unbounded_problems_raise():
    with pytest.raises(UnboundedError):
        lp_solve(np.array([-1.0, 0.0]), [(np.array([0.0, 1.0]), "<=", 1.0)])
    with pytest.raises(UnboundedError):
        lp_solve(np.array([-1.0]), [])


def test_empty_constraint_list_with_nonnegative_costs():
    x = lp_solve(np.array([1.0, 0.0]), [])
    assert np.array_equal(x, np.zeros(2))


def test_input_validation():
    with pytest.raises(ValueError):
        lp_solve(np.array([[1.0]]), [])
    with pytest.raises(ValueError):
        lp_solve(np.array([1.0]), [(np.array([1.0, 2.0]), "<=", 1.0)])
    with pytest.raises(ValueError):
        lp_solve(np.array([1.0]), [(np.array([1.0]), "<", 1.0)])
    with pytest.raises(ValueError):
        lp_solve(np.array([np.inf]), [])
    with pytest.raises(ValueError):
        lp_solve(np.array([1.0]), [(np.array([np.nan]), "<=", 1.0)])
