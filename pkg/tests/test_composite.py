"""Bipartite composites: products, marginals, conditioning, steering,
purity preservation."""

import numpy as np
import pytest

from conelab import composite as cp
from conelab import eja
from conelab.axioms import FAILS, HOLDS
from conelab.cones import (ConeError, PolyhedralCone, System,
                          UnsupportedQuery, is_extremal_ray)
from conftest import make_eja_system

SQUARE = [[1, 1, 0], [0, 1, 1], [-1, 1, 0], [0, 1, -1]]


@pytest.fixture
def two_qubit(qubit):
    return cp.CompositeSystem(qubit, qubit, cp.HILBERT)


@pytest.fixture
def bit_bit():
    bit = make_eja_system(eja.classical(2), "bit")
    return cp.CompositeSystem(bit, bit, cp.CLASSICAL)


@pytest.fixture
def min_square():
    sq = System(PolyhedralCone(SQUARE), np.array([0.0, 1.0, 0.0]), "square")
    return cp.CompositeSystem(sq, sq, cp.MIN_TENSOR)


@pytest.fixture
def max_rebit():
    rs = make_eja_system(eja.real_sym(2), "rebit")
    return cp.CompositeSystem(rs, rs, cp.MAX_TENSOR)


class TestProducts:
    def test_pairing_law(self, two_qubit, rng):
        for _ in range(50):
            wa, wb = rng.standard_normal(4), rng.standard_normal(4)
            ea, eb = rng.standard_normal(4), rng.standard_normal(4)
            lhs = two_qubit.product_effect(ea, eb) @ \
                two_qubit.product_state(wa, wb)
            assert abs(lhs - (ea @ wa) * (eb @ wb)) < 1e-12

    def test_unit_is_product(self, two_qubit):
        assert np.allclose(two_qubit.unit,
                           two_qubit.product_effect(two_qubit.factorA.unit,
                                                    two_qubit.factorB.unit))

    def test_basis_vector(self, bit_bit):
        w = bit_bit.product_state(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        assert np.allclose(w, [0.0, 1.0, 0.0, 0.0])

    def test_dimension_mismatch(self, two_qubit):
        with pytest.raises(ConeError):
            two_qubit.product_state(np.zeros(3), np.zeros(4))

    def test_frame_tensoring(self, two_qubit):
        alg = two_qubit.factorA.cone.algebra
        states, effects = alg.canonical_frame()
        for i, wi in enumerate(states):
            for j, wj in enumerate(states):
                w = two_qubit.product_state(wi, wj)
                for k, ek in enumerate(effects):
                    for l, el in enumerate(effects):
                        e = two_qubit.product_effect(ek, el)
                        expect = 1.0 if (i == k and j == l) else 0.0
                        assert abs(float(e @ w) - expect) < 1e-12
        total = sum(two_qubit.product_effect(ek, el)
                    for ek in effects for el in effects)
        assert np.max(np.abs(total - two_qubit.unit)) < 1e-12


class TestMarginals:
    def test_product_state_marginals(self, two_qubit, rng):
        wa = two_qubit.factorA.sample_pure(rng)
        wb = two_qubit.factorB.sample_pure(rng)
        w = two_qubit.product_state(wa, wb)
        assert np.max(np.abs(cp.marginal_of(two_qubit, w, "A") - wa)) < 1e-12
        assert np.max(np.abs(cp.marginal_of(two_qubit, w, "B") - wb)) < 1e-12

    def test_entangled_marginal(self, two_qubit):
        ment = cp.canonical_self_steering_state(two_qubit)
        half_id = np.array([0.5, 0.5, 0.0, 0.0])
        for side in "AB":
            assert np.max(np.abs(cp.marginal_of(two_qubit, ment, side)
                                 - half_id)) < 1e-12

    def test_conditioning_identity_exact(self, two_qubit, rng):
        for _ in range(100):
            w = two_qubit.sample_state(rng)
            cmap = cp.conditioning_map(two_qubit, w)
            assert np.array_equal(cmap(two_qubit.factorA.unit),
                                  cp.marginal_of(two_qubit, w, "B"))

    def test_conditioning_positivity(self, two_qubit, rng):
        w = cp.canonical_self_steering_state(two_qubit)
        cmap = cp.conditioning_map(two_qubit, w)
        for _ in range(20):
            e = two_qubit.factorA.sample_pure(rng)  # pure effects = pure states
            assert two_qubit.factorB.cone.member(cmap(e), 1e-9)

    def test_maximally_entangled_is_scaled_transpose(self, two_qubit):
        ment = cp.canonical_self_steering_state(two_qubit)
        cmap = cp.conditioning_map(two_qubit, ment)
        # the transpose flips the imaginary coordinate in this basis
        assert np.allclose(cmap.matrix, np.diag([0.5, 0.5, 0.5, -0.5]))

    def test_classical_correlated_is_scaled_identity(self, bit_bit):
        w = cp.canonical_self_steering_state(bit_bit)
        cmap = cp.conditioning_map(bit_bit, w)
        assert np.allclose(cmap.matrix, 0.5 * np.eye(2))

    def test_product_conditioning_rank_one(self, two_qubit, rng):
        wa = two_qubit.factorA.sample_pure(rng)
        wb = two_qubit.factorB.sample_pure(rng)
        cmap = cp.conditioning_map(two_qubit,
                                   two_qubit.product_state(wa, wb))
        assert np.linalg.matrix_rank(cmap.matrix, tol=1e-10) == 1


class TestSteering:
    def test_classical_correlated_bit(self, bit_bit):
        w = cp.canonical_self_steering_state(bit_bit)
        ens = [np.array([0.5, 0.0]), np.array([0.0, 0.5])]
        effects = cp.steer(bit_bit, w, ens)
        assert not isinstance(effects, str)
        assert np.allclose(effects[0], [1.0, 0.0])
        assert np.allclose(effects[1], [0.0, 1.0])

    def test_maximally_entangled_random_ensembles(self, two_qubit, rng):
        w = cp.canonical_self_steering_state(two_qubit)
        cmap = cp.conditioning_map(two_qubit, w)
        wb = cp.marginal_of(two_qubit, w, "B")
        for _ in range(10):
            ens = cp.random_ensemble(two_qubit.factorB, wb, 3, rng)
            effects = cp.steer(two_qubit, w, ens)
            assert not isinstance(effects, str)
            from conelab.cones import validate_measurement
            assert validate_measurement(two_qubit.factorA, effects, 1e-8)
            for e, t in zip(effects, ens):
                assert np.max(np.abs(cmap(e) - t)) < 1e-8

    def test_product_state_infeasible(self, two_qubit, rng):
        wb = np.array([0.5, 0.5, 0.0, 0.0])
        prod = two_qubit.product_state(np.array([0.5, 0.5, 0.0, 0.0]), wb)
        ens = cp.random_ensemble(two_qubit.factorB, wb, 2, rng)
        assert cp.steer(two_qubit, prod, ens) == cp.INFEASIBLE

    def test_inconsistent_ensemble_rejected(self, two_qubit, rng):
        w = cp.canonical_self_steering_state(two_qubit)
        bad = [np.array([0.5, 0.5, 0.0, 0.0]), np.array([0.5, 0.5, 0.0, 0.0])]
        with pytest.raises(ConeError):
            cp.steer(two_qubit, w, bad)

    def test_order_iso_check_holds(self, two_qubit, bit_bit):
        for comp in (two_qubit, bit_bit):
            w = cp.canonical_self_steering_state(comp)
            v = cp.steering_order_iso_check(comp, w)
            assert v.status == HOLDS
            assert v.margin < 1e-8

    def test_order_iso_check_product_fails(self, two_qubit):
        half = np.array([0.5, 0.5, 0.0, 0.0])
        prod = two_qubit.product_state(half, half)
        v = cp.steering_order_iso_check(two_qubit, prod)
        assert v.status == FAILS
        assert v.violation["rank"] == 1

    def test_boundary_marginal_rejected(self, two_qubit):
        pure = np.array([1.0, 0.0, 0.0, 0.0])
        prod = two_qubit.product_state(pure, pure)
        with pytest.raises(ConeError):
            cp.steering_order_iso_check(two_qubit, prod)


class TestCanonicalStates:
    def test_hilbert_membership(self, two_qubit):
        w = cp.canonical_self_steering_state(two_qubit)
        assert two_qubit.cone.member(w)
        assert is_extremal_ray(two_qubit.cone, w)

    def test_max_tensor_certificate(self, max_rebit):
        w = cp.canonical_self_steering_state(max_rebit)
        assert max_rebit.cone.margin(w) > -1e-9
        v = cp.steering_order_iso_check(max_rebit, w)
        assert v.status == HOLDS

    def test_non_simple_factor_rejected(self, bit_bit):
        comp = cp.CompositeSystem(bit_bit.factorA, bit_bit.factorB,
                                  cp.MAX_TENSOR)
        with pytest.raises(ConeError):
            cp.canonical_self_steering_state(comp)


class TestPurityPreservation:
    def test_hilbert(self, two_qubit, rng):
        for _ in range(10):
            wa = two_qubit.factorA.sample_pure(rng)
            wb = two_qubit.factorB.sample_pure(rng)
            assert cp.purity_preservation_check(two_qubit, wa, wb)

    def test_min_tensor_exact(self, min_square, rng):
        for _ in range(10):
            wa = min_square.factorA.sample_pure(rng)
            wb = min_square.factorB.sample_pure(rng)
            assert cp.purity_preservation_check(min_square, wa, wb)

    def test_classical(self, bit_bit):
        assert cp.purity_preservation_check(bit_bit, np.array([1.0, 0.0]),
                                            np.array([0.0, 1.0]))

    def test_max_tensor(self, max_rebit, rng):
        wa = max_rebit.factorA.sample_pure(rng)
        wb = max_rebit.factorB.sample_pure(rng)
        assert cp.purity_preservation_check(max_rebit, wa, wb)

    def test_rejects_mixed_input(self, two_qubit):
        mixed = np.array([0.5, 0.5, 0.0, 0.0])
        pure = np.array([1.0, 0.0, 0.0, 0.0])
        with pytest.raises(ConeError):
            cp.purity_preservation_check(two_qubit, mixed, pure)


class TestPureMarginalLemma:
    def test_pure_product_states_factorize(self, two_qubit, rng):
        for _ in range(20):
            wa = two_qubit.factorA.sample_pure(rng)
            wb = two_qubit.factorB.sample_pure(rng)
            w = two_qubit.product_state(wa, wb)
            ma = cp.marginal_of(two_qubit, w, "A")
            mb = cp.marginal_of(two_qubit, w, "B")
            assert is_extremal_ray(two_qubit.factorA.cone, ma)
            assert np.max(np.abs(two_qubit.product_state(ma, mb) - w)) < 1e-9

    def test_entangled_pure_has_mixed_marginal(self, two_qubit):
        w = cp.canonical_self_steering_state(two_qubit)
        assert is_extremal_ray(two_qubit.cone, w)
        ma = cp.marginal_of(two_qubit, w, "A")
        assert not is_extremal_ray(two_qubit.factorA.cone, ma)


def test_local_tomography(two_qubit, bit_bit, min_square, max_rebit):
    for comp in (two_qubit, bit_bit, min_square, max_rebit):
        rep = cp.local_tomography_report(comp)
        assert rep["locally_tomographic"]
        assert rep["dim_AB"] == rep["dim_A"] * rep["dim_B"]


def test_max_tensor_rejects_negative(max_rebit):
    assert not max_rebit.cone.member(-np.eye(3).ravel())


def test_min_tensor_needs_polyhedral(qubit):
    with pytest.raises(UnsupportedQuery):
        cp.CompositeSystem(qubit, qubit, cp.MIN_TENSOR)
