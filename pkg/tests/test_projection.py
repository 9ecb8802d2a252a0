import json
import math
from pathlib import Path

import numpy as np
import pytest

from alphaproj.divergences import alpha_relative_entropy, ialpha
from alphaproj.errors import (
    AllDivergencesInfiniteError,
    InfeasibleError,
    NotNestedError,
    ParseError,
    SupportTooLargeError,
)
from alphaproj.measures import Density, WeightedSpace, total_variation, uniform
from alphaproj.polytope import enumerate_vertices_exact, exact_rank, exact_solve, project_polytope
from alphaproj.projection import (
    ConstraintSet,
    SolverOptions,
    brute_force_project,
    iterated_projection_check,
    moment_set,
    objective_transform,
    project,
    projection_characterization_check,
    ratio_objective,
    uniqueness_probe,
)

FIXTURES = Path(__file__).parent / "fixtures"
X = [1.0, 2.0, 3.0]


def three_point():
    space = WeightedSpace(["1", "2", "3"])
    return space, uniform(space), moment_set(space, [X], [2.4])


# -- polytope helpers -------------------------------------------------------

def test_exact_linear_algebra():
    from fractions import Fraction as F

    assert exact_solve([[F(1), F(1)], [F(1), F(-1)]], [F(1), F(0)]) == [F(1, 2), F(1, 2)]
    assert exact_solve([[F(1), F(1)]], [F(1)]) is None
    assert exact_rank([[F(1), F(2)], [F(2), F(4)]]) == 1


def test_vertices_of_moment_slice_are_exact():
    space, _, e = three_point()
    V = e.vertices()
    # E[X] = 2.4 cuts the simplex in the segment between these two points
    expected = np.array([[0.0, 0.6, 0.4], [0.3, 0.0, 0.7]])
    assert np.allclose(V, expected, rtol=0, atol=1e-15)


def test_vertex_enumeration_with_inequality():
    A = np.ones((1, 3))
    G = np.array([[1.0, 0.0, 0.0]])
    V = enumerate_vertices_exact(A, np.array([1.0]), G, np.array([0.5]))
    assert V.shape == (4, 3)


def test_project_polytope_is_euclidean_projection():
    A = np.ones((1, 3))
    y = np.array([0.9, 0.5, -0.6])
    x = project_polytope(y, np.full(3, 1 / 3), A, np.zeros((0, 3)), np.zeros(0))
    # simplex projection by hand: shift by tau = 0.2, clip at zero
    assert np.allclose(x, (0.7, 0.3, 0.0), atol=1e-14)


# -- constraint sets --------------------------------------------------------

def test_constraint_set_rejects_infeasible():
    space = WeightedSpace.counting(3)
    with pytest.raises(InfeasibleError):
        moment_set(space, [X], [3.5])
    with pytest.raises(InfeasibleError):
        ConstraintSet(space, [(X, 2.0)], [(X, 1.5)])


def test_constraint_json_round_trip_and_strictness():
    space, _, e = three_point()
    again = ConstraintSet.from_json(space, json.dumps(e.to_dict()))
    assert again.to_dict() == e.to_dict()
    with pytest.raises(ParseError):
        ConstraintSet.from_json(space, '{"equalities": [], "bogus": 1}')
    with pytest.raises(ParseError):
        ConstraintSet.from_json(space, '{"equalities": [{"statistic": [1, 2, 3]}]}')
    with pytest.raises(ParseError):
        ConstraintSet.from_json(space, '{"zero_support": ["9"]}')
    z = ConstraintSet.from_json(space, '{"zero_support": ["1"]}')
    assert z.zero_support == (0,)


def test_contains_and_sampling():
    space, _, e = three_point()
    rng = np.random.default_rng(0)
    P = e.sample(rng, 100)
    assert P.shape[0] == 100
    assert all(e.contains(p) for p in P)
    assert not e.contains(np.array([1 / 3, 1 / 3, 1 / 3]))


# -- solver -----------------------------------------------------------------

def test_objective_transform_examples():
    u = uniform(WeightedSpace.counting(2))
    g = objective_transform(u, 2)
    assert np.allclose(g, (0.7071067811865476,) * 2, rtol=1e-15)
    g = objective_transform(Density(WeightedSpace.counting(2), [1.0, 0.0]), 0.5)
    assert g[0] == 1.0 and g[1] == math.inf
    g = objective_transform(Density(WeightedSpace.counting(2), [1.0, 0.0]), 2)
    assert g[1] == 0.0


@pytest.mark.parametrize("alpha", [0.5, 0.9, 1.1, 2.0, 5.0])
def test_ratio_objective_consistency(alpha):
    rng = np.random.default_rng(1)
    space = WeightedSpace.counting(6)
    for _ in range(20):
        p = Density(space, rng.dirichlet(np.ones(6)))
        r = Density(space, rng.dirichlet(np.ones(6)))
        a = 1.0 if alpha < 1 else -1.0
        jr = ratio_objective(p.values, objective_transform(r, alpha), p.weights, alpha)
        rho = (1 - alpha) / alpha
        assert math.log(a * jr) / rho == pytest.approx(alpha_relative_entropy(p, r, alpha).value, abs=1e-11)
        pr = ratio_objective(r.values, objective_transform(r, alpha), r.weights, alpha)
        assert a * pr == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_fixture_three_point_example(alpha):
    space, r, e = three_point()
    res = project(r, e, alpha)
    oracle = json.loads((FIXTURES / "project_3pt_oracle.json").read_text())
    case = next(c for c in oracle["cases"] if c["alpha"] == alpha)
    q_oracle = Density(space, case["q"])
    assert total_variation(res.q, q_oracle) <= 1e-4
    assert abs(res.value - case["value"]) <= 1e-6
    assert res.converged
    assert res.restarts_agreement <= 1e-6
    assert res.worst_certificate >= -1e-6
    assert e.contains(res.q)


def test_three_point_closed_form_alpha2():
    # for alpha = 2 the stationarity condition is linear: q = (2/15, 1/3, 8/15)
    _, r, e = three_point()
    res = project(r, e, 2.0)
    assert np.allclose(res.q.values, (2 / 15, 1 / 3, 8 / 15), atol=1e-7)


def test_reference_inside_set_is_its_own_projection():
    space = WeightedSpace.counting(3)
    r = Density(space, [0.2, 0.3, 0.5])
    e = moment_set(space, [X], [float(np.dot(X, r.values))])
    for alpha in (0.5, 2.0):
        res = project(r, e, alpha)
        assert total_variation(res.q, r) <= 1e-6
        assert abs(res.value) <= 1e-10


def test_singleton_set():
    space = WeightedSpace.counting(3)
    r = Density(space, [0.2, 0.3, 0.5])
    e = moment_set(space, [X, [1.0, 4.0, 9.0]], [2.4, 6.0])
    assert e.vertices().shape[0] == 1
    for alpha in (0.5, 2.0):
        res = project(r, e, alpha)
        assert np.allclose(res.q.values, (0.0, 0.6, 0.4), atol=1e-15)
        assert res.value == pytest.approx(ialpha(res.q, r, alpha))
        assert uniqueness_probe(r, e, alpha) <= 1e-12


def test_all_divergences_infinite():
    space = WeightedSpace.counting(3)
    r = Density(space, [1.0, 0.0, 0.0])
    e = ConstraintSet(space, zero_support=[0])
    with pytest.raises(AllDivergencesInfiniteError):
        project(r, e, 0.5)
    with pytest.raises(AllDivergencesInfiniteError):
        project(r, e, 2.0)


def test_alpha_below_one_avoids_zero_reference_points():
    space = WeightedSpace.counting(3)
    r = Density(space, [0.5, 0.5, 0.0])
    e = ConstraintSet(space, [([0.0, 1.0, 1.0], 0.6)])
    res = project(r, e, 0.5)
    assert res.q.values[2] == 0.0
    assert math.isfinite(res.value)


def test_value_invariant_under_weight_rescaling():
    rng = np.random.default_rng(3)
    w = rng.uniform(0.5, 2.0, 4)
    stat = rng.normal(size=4)
    masses_r = rng.dirichlet(np.ones(4))
    t = float(stat @ rng.dirichlet(np.ones(4)))
    for alpha in (0.5, 2.0):
        vals = []
        for c in (1.0, 3.7):
            space = WeightedSpace(range(4), c * w)
            r = Density(space, masses_r / (c * w))
            e = moment_set(space, [stat], [t])
            vals.append(project(r, e, alpha).value)
        assert abs(vals[0] - vals[1]) <= 1e-10


def test_monotone_restriction():
    rng = np.random.default_rng(9)
    space = WeightedSpace.counting(5)
    for _ in range(5):
        r = Density(space, rng.dirichlet(np.ones(5)))
        c = rng.dirichlet(np.ones(5))
        s1, s2 = rng.normal(size=(2, 5))
        e = moment_set(space, [s1], [float(s1 @ c)])
        e1 = e.restrict([(s2, float(s2 @ c))])
        for alpha in (0.5, 2.0):
            opts = SolverOptions(n_restarts=4, n_cert=20)
            assert project(r, e1, alpha, opts).value >= project(r, e, alpha, opts).value - 1e-10


def test_solver_is_deterministic():
    _, r, e = three_point()
    a = project(r, e, 0.5, SolverOptions(seed=7))
    b = project(r, e, 0.5, SolverOptions(seed=7))
    assert np.array_equal(a.q.values, b.q.values)
    assert a.certificate_residuals == b.certificate_residuals


def test_result_serialization():
    _, r, e = three_point()
    d = project(r, e, 2.0).to_dict()
    assert set(d) >= {"q", "value", "iterations", "converged", "restarts_agreement", "restart_values"}
    assert len(d["restart_values"]) == 16


# -- oracle -----------------------------------------------------------------

def test_brute_force_examples():
    space = WeightedSpace.counting(3)
    r = Density(space, [0.2, 0.3, 0.5])
    whole = ConstraintSet(space)
    q = brute_force_project(r, whole, 2.0, 0.1)
    assert np.allclose(q.values, r.values, atol=1e-12)
    single = moment_set(space, [X, [1.0, 4.0, 9.0]], [2.4, 6.0])
    assert np.allclose(brute_force_project(r, single, 0.5, 0.01).values, (0.0, 0.6, 0.4), atol=1e-12)
    with pytest.raises(SupportTooLargeError):
        brute_force_project(uniform(WeightedSpace.counting(5)), ConstraintSet(WeightedSpace.counting(5)), 2, 0.1)
    with pytest.raises(ValueError):
        brute_force_project(r, whole, 2.0, 1e-6)


def test_oracle_refinement_converges_to_solver():
    _, r, e = three_point()
    res = project(r, e, 2.0)
    o = brute_force_project(r, e, 2.0, 1e-3, refine_to=1e-5)
    assert abs(ialpha(o, r, 2.0) - res.value) <= 1e-6


# -- certificates and iterated projections ----------------------------------

def test_characterization_examples():
    space = WeightedSpace.counting(3)
    r = Density(space, [0.2, 0.3, 0.5])
    e = moment_set(space, [X], [float(np.dot(X, r.values))])
    assert projection_characterization_check(r, r, e, 2.0) >= -1e-12
    _, u, e3 = three_point()
    for alpha in (0.5, 2.0):
        q = project(u, e3, alpha).q
        assert projection_characterization_check(q, u, e3, alpha) >= -1e-6
        # move q by TV 0.01 along the slice
        v = e3.vertices()[0]
        d = 0.5 * np.abs(v - q.values).sum()
        qt = Density(u.space, q.values + 0.01 / d * (v - q.values))
        assert projection_characterization_check(qt, u, e3, alpha) < -1e-4
    with pytest.raises(InfeasibleError):
        projection_characterization_check(u, u, e3, 2.0)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_iterated_projection_examples(alpha):
    space, r, e = three_point()
    e1 = e.restrict([([1.0, 4.0, 9.0], 6.0)])
    it = iterated_projection_check(r, e, e1, alpha)
    assert it.tv_gap <= 1e-5
    same = iterated_projection_check(r, e, e, alpha)
    assert same.tv_gap <= 1e-8
    with pytest.raises(NotNestedError):
        iterated_projection_check(r, e1, moment_set(space, [X], [2.0]), alpha)
