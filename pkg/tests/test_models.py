import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from identifiability.errors import DomainError, SchemaError
from identifiability.models import (REGISTRY, ParameterVector, ProcessModelSpec, advection_diffusion_solution,
                                    cooling_solution, evaluate_model, model_info, morphogen_bvp_solution,
                                    morphogen_reparam_solution, reparam_map)

from oracles import erf_quadrature

T0 = {"T0": 180.0}
PDE = {"u_b": 1.0, "t": 50.0}


class TestParameterVector:
    def test_lookup_and_bounds(self):
        pv = ParameterVector(("a", "b"), (1.0, 2.0), (0.0, 0.0), (5.0, 5.0))
        assert pv["b"] == 2.0
        assert pv.index("a") == 0
        lo, hi = pv.bounds()
        assert lo.tolist() == [0, 0] and hi.tolist() == [5, 5]
        assert pv.midpoint().values == (2.5, 2.5)
        assert pv.with_values([3, 4]).as_dict() == {"a": 3.0, "b": 4.0}

    @pytest.mark.parametrize("kwargs", [
        dict(names=("a",), values=(1.0, 2.0), lower=(0.0,), upper=(1.0,)),
        dict(names=("a", "a"), values=(1.0, 1.0), lower=(0.0, 0.0), upper=(2.0, 2.0)),
        dict(names=("a",), values=(3.0,), lower=(0.0,), upper=(2.0,)),
        dict(names=("a",), values=(1.0,), lower=(0.0,), upper=(math.inf,)),
        dict(names=("a",), values=(1.0,), lower=(2.0,), upper=(0.0,)),
    ])
    def test_invariants(self, kwargs):
        with pytest.raises(SchemaError):
            ParameterVector(**kwargs)

    def test_missing_name(self):
        pv = ParameterVector(("a",), (1.0,), (0.0,), (2.0,))
        with pytest.raises(KeyError):
            pv["z"]


class TestCooling:
    def test_initial_condition(self):
        assert cooling_solution((20, 0.05), 0.0, T0) == 180.0

    def test_high_precision(self):
        ref = 160 * mpmath.exp(mpmath.mpf("-0.5")) + 20
        assert abs(cooling_solution((20, 0.05), 10.0, T0) - float(ref)) < 1e-12
        assert cooling_solution((20, 0.05), 10.0, T0) == pytest.approx(117.0449, abs=1e-4)

    def test_ambient_limit(self):
        assert abs(cooling_solution((20, 0.05), 1e6, T0) - 20) < 1e-10

    def test_negative_time(self):
        with pytest.raises(DomainError):
            cooling_solution((20, 0.05), -1.0, T0)

    def test_schema(self):
        with pytest.raises(SchemaError):
            cooling_solution((20, 0.05, 1.0), 1.0, T0)

    @given(st.floats(0, 50), st.floats(0.001, 0.5), st.floats(0, 200), st.floats(0, 200))
    def test_monotone_and_between(self, T_a, k, t1, t2):
        a, b = cooling_solution((T_a, k), np.array(sorted((t1, t2))), T0)
        assert min(T_a, 180) - 1e-9 <= a <= max(T_a, 180) + 1e-9
        assert b <= a + 1e-12  # T0 > T_a: decreasing

    def test_strictly_monotone_dense(self):
        t = np.linspace(0, 100, 1001)
        assert np.all(np.diff(cooling_solution((20, 0.05), t, T0)) < 0)
        assert np.all(np.diff(cooling_solution((250, 0.05), t, T0)) > 0)

    def test_ode_residual(self):
        rng = np.random.default_rng(3)
        h = 1e-4
        for _ in range(20):
            T_a, k, t = rng.uniform(0, 50), rng.uniform(0.001, 0.5), rng.uniform(0.01, 100)
            f = lambda s: cooling_solution((T_a, k), s, T0)
            dT = (f(t + h) - f(t - h)) / (2 * h)
            assert abs(dT + k * (f(t) - T_a)) < 1e-6


class TestAdvectionDiffusion:
    def test_quadrature_oracle(self):
        ref = 1 + erf_quadrature(50 / (2 * math.sqrt(500)))
        val = advection_diffusion_solution((1, 50, 10, 1), 50.0, PDE)
        assert abs(val - ref) < 1e-12
        assert val == pytest.approx(1.8862, abs=1e-4)

    @pytest.mark.parametrize("x", [-1e6, 1e6])
    def test_far_field(self, x):
        assert abs(advection_diffusion_solution((1, 50, 10, 1), x, PDE) - 1.0) < 1e-12

    def test_even_without_advection(self):
        f = lambda x: advection_diffusion_solution((1, 50, 10, 0), x, PDE)
        assert f(25.0) == f(-25.0)

    @pytest.mark.parametrize("theta,ctx", [((1, 50, 0, 1), PDE), ((1, 50, -1, 1), PDE)])
    def test_domain(self, theta, ctx):
        with pytest.raises(DomainError):
            advection_diffusion_solution(theta, 0.0, ctx)

    def test_bad_time_context(self):
        with pytest.raises(DomainError):
            ProcessModelSpec.create("advection_diffusion", {"u_b": 1.0, "t": 0.0})

    @pytest.mark.parametrize("t", [1.0, 50.0, 200.0])
    @pytest.mark.parametrize("theta", [(1, 50, 10, 1), (2.5, 20, 3, 0.4), (0.3, 70, 25, 2.0)])
    def test_mass_conservation(self, theta, t):
        u0, h, D, v = theta
        ctx = {"u_b": 1.0, "t": t}
        w = 40 * math.sqrt(D * t) + h
        x = np.linspace(v * t - w, v * t + w, 400001)
        mass = np.trapezoid(advection_diffusion_solution(theta, x, ctx) - 1.0, x)
        assert abs(mass - 2 * h * u0) / (2 * h * u0) < 1e-8

    @pytest.mark.parametrize("theta", [(1, 50, 10, 1), (2.5, 20, 3, 0.4), (0.3, 70, 25, 2.0)])
    def test_maximum_principle(self, theta):
        x = np.linspace(-200, 300, 5001)
        u = advection_diffusion_solution(theta, x, PDE)
        assert np.all(u >= 1.0) and np.all(u < 1.0 + theta[0])
        # strictly above background where the pulse is resolvable in double precision
        near = np.abs(x - theta[3] * 50) < theta[1] + 10 * math.sqrt(theta[2] * 50)
        assert np.all(u[near] > 1.0)

    @given(st.floats(0.1, 3), st.floats(20, 80), st.floats(1, 30), st.floats(0.1, 3), st.floats(-300, 300))
    @settings(max_examples=200)
    def test_translation(self, u0, h, D, v, x):
        lhs = advection_diffusion_solution((u0, h, D, v), x, PDE)
        rhs = advection_diffusion_solution((u0, h, D, 0.0), x - v * 50.0, PDE)
        assert abs(lhs - rhs) < 1e-12


class TestMorphogen:
    def test_origin(self):
        assert abs(morphogen_bvp_solution((1, 1, 0.1), 0.0) - float(1 / mpmath.sqrt(mpmath.mpf("0.1")))) < 1e-12

    def test_decay(self):
        assert abs(morphogen_bvp_solution((1, 1, 0.1), 1e3)) < 1e-12

    @pytest.mark.parametrize("c", [0.1, 3, 7, 40])
    def test_structural_invariance(self, c):
        x = np.linspace(0, 20, 41)
        a = morphogen_bvp_solution((c * 1, c * 1, c * 0.1), x)
        b = morphogen_bvp_solution((1, 1, 0.1), x)
        assert np.max(np.abs(a - b)) < 1e-12

    @pytest.mark.parametrize("theta,x", [((0, 1, 0.1), 0.0), ((1, -1, 0.1), 0.0), ((1, 1, 0.1), -1.0)])
    def test_domain(self, theta, x):
        with pytest.raises(DomainError):
            morphogen_bvp_solution(theta, x)

    @pytest.mark.parametrize("theta", [(1, 1, 0.1), (3, 0.5, 0.02), (0.2, 8, 0.9)])
    def test_flux_condition(self, theta):
        J, D, k = theta
        h = 1e-7
        f = lambda x: morphogen_bvp_solution(theta, x)
        # second-order one-sided difference
        dU = (-3 * f(0.0) + 4 * f(h) - f(2 * h)) / (2 * h)
        assert abs(-D * dU - J) / J < 1e-6

    @pytest.mark.parametrize("theta", [(1, 1, 0.1), (3, 0.5, 0.02), (0.2, 8, 0.9)])
    def test_ode_residual(self, theta):
        J, D, k = theta
        h = 1e-3
        x = np.linspace(0.5, 19.5, 39)
        f = lambda s: morphogen_bvp_solution(theta, s)
        d2 = (f(x + h) - 2 * f(x) + f(x - h)) / h ** 2
        assert np.max(np.abs(D * d2 - k * f(x))) < 1e-5


class TestReparam:
    def test_consistency_at_origin(self):
        r = reparam_map((1, 1, 0.1))
        assert morphogen_reparam_solution(r, 0.0) == pytest.approx(3.16228, abs=1e-5)

    def test_prefactor(self):
        assert morphogen_reparam_solution((3.389, 0.3141), 0.0) == 3.389

    @given(st.floats(0.1, 20), st.floats(0.01, 2))
    def test_half_life(self, a, b):
        assert morphogen_reparam_solution((a, b), math.log(2) / b) == pytest.approx(a / 2, rel=1e-14)

    def test_map_high_precision(self):
        r = reparam_map((1, 1, 0.1))
        k = mpmath.mpf("0.1")
        assert abs(r["alpha"] - float(1 / mpmath.sqrt(k))) < 1e-14
        assert abs(r["beta"] - float(mpmath.sqrt(k))) < 1e-14
        assert r.names == ("alpha", "beta")

    def test_map_scaling(self):
        a, b = reparam_map((3, 3, 0.3)), reparam_map((1, 1, 0.1))
        assert a.as_array() == pytest.approx(b.as_array(), abs=1e-15)

    def test_map_identity_point(self):
        assert reparam_map((1, 1, 1)).values == (1.0, 1.0)

    def test_map_widens_box(self):
        r = reparam_map((100, 0.01, 0.01))
        assert r["alpha"] == pytest.approx(10000)
        assert r.upper[0] >= r["alpha"]

    @pytest.mark.parametrize("theta", [(0, 1, 1), (1, -1, 1)])
    def test_map_domain(self, theta):
        with pytest.raises(DomainError):
            reparam_map(theta)

    def test_reparam_domain(self):
        with pytest.raises(DomainError):
            morphogen_reparam_solution((0, 1), 1.0)

    @given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.001, 1))
    @settings(max_examples=200)
    def test_composition(self, J, D, k):
        x = np.linspace(0, 20, 11)
        a = morphogen_bvp_solution((J, D, k), x)
        b = morphogen_reparam_solution(reparam_map((J, D, k)), x)
        assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(a)))


class TestRegistry:
    def test_evaluate_dispatch(self):
        assert evaluate_model(ProcessModelSpec.create("cooling"), (20, 0.05), 0.0) == 180.0
        bvp = ProcessModelSpec.create("morphogen_bvp")
        assert evaluate_model(bvp, (1, 1, 0.1), 0.0) == pytest.approx(3.16228, abs=1e-5)
        pde = ProcessModelSpec.create("advection_diffusion", PDE)
        assert evaluate_model(pde, (1, 50, 10, 1), -1e6) == pytest.approx(1.0, abs=1e-12)

    def test_evaluate_with_vector(self):
        spec = ProcessModelSpec.create("cooling")
        theta = spec.parameters({"T_a": 20, "k": 0.05})
        assert evaluate_model(spec, theta, np.array([0.0, 10.0]))[0] == 180.0

    def test_schema_mismatch(self):
        spec = ProcessModelSpec.create("cooling")
        bad = ParameterVector(("k", "T_a"), (0.05, 20), (0, 0), (1, 50))
        with pytest.raises(SchemaError):
            evaluate_model(spec, bad, 0.0)

    def test_unknown_model(self):
        with pytest.raises(SchemaError):
            model_info("lotka_volterra")
        with pytest.raises(SchemaError):
            ProcessModelSpec.create("nope")

    def test_default_bounds(self):
        spec = ProcessModelSpec.create("advection_diffusion")
        assert spec.lower == (0.1, 20.0, 1.0, 0.1)
        assert spec.upper == (3.0, 80.0, 30.0, 3.0)
        assert ProcessModelSpec.create("cooling").box().bounds()[1].tolist() == [50.0, 0.5]

    def test_bound_override_and_errors(self):
        spec = ProcessModelSpec.create("cooling", bounds={"T_a": [5, 30]})
        assert spec.lower[0] == 5 and spec.upper[0] == 30
        with pytest.raises(SchemaError):
            ProcessModelSpec.create("cooling", bounds={"zz": [0, 1]})
        with pytest.raises(SchemaError):
            spec.parameters({"T_a": 20})

    def test_kernel_broadcasts(self):
        spec = ProcessModelSpec.create("cooling")
        out = spec.kernel(np.array([[20, 0.05], [10, 0.1], [30, 0.01]]), np.arange(5.0))
        assert out.shape == (3, 5)

    @pytest.mark.parametrize("model_id", sorted(REGISTRY))
    def test_registry_arity(self, model_id):
        info = model_info(model_id)
        assert len(info.parameter_names) == len(info.default_bounds)
