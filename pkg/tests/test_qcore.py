import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from delocgames import qcore
from delocgames.qcore import (
    DensityMatrix,
    DimensionError,
    PureState,
    ValidationError,
    X,
    Y,
    Z,
    bell_state,
    herm_eig,
    named_state,
    partial_trace,
    partial_trace_array,
    positive_eig_sum,
    schmidt,
    tensor,
    trace_distance,
    werner_state,
)


class TestTensor:
    def test_identity(self):
        assert_allclose(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_xx_fixes_psi_plus(self):
        # oracle: direct 4x4 multiplication
        xx = tensor(X, X)
        psi = bell_state("psi+").amplitudes
        assert_allclose(xx @ psi, psi, atol=1e-15)

    def test_z_on_phi_plus_gives_phi_minus(self):
        out = tensor(Z, np.eye(2)) @ bell_state("phi+").amplitudes
        target = bell_state("phi-").amplitudes
        assert abs(abs(np.vdot(out, target)) - 1.0) < 1e-12

    def test_associativity_and_mixed_product(self, rng):
        for _ in range(20):
            a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
            assert_allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), atol=1e-10)
            assert_allclose(tensor(a, b) @ tensor(c, d), tensor(a @ c, b @ d), atol=1e-10)


class TestStates:
    def test_pure_state_norm_enforced(self):
        with pytest.raises(ValidationError):
            PureState((2,), [1.0, 1.0])

    def test_pure_state_dims_enforced(self):
        with pytest.raises(DimensionError):
            PureState((2, 2), [1.0, 0.0])

    def test_density_matrix_validation(self):
        with pytest.raises(ValidationError):
            DensityMatrix((2,), [[1.0, 1.0], [0.0, 0.0]])  # not Hermitian
        with pytest.raises(ValidationError):
            DensityMatrix((2,), [[2.0, 0.0], [0.0, -1.0]])  # not PSD
        with pytest.raises(ValidationError):
            DensityMatrix((2,), [[0.7, 0.0], [0.0, 0.7]])  # trace != 1

    def test_immutable(self):
        rho = werner_state(0.5)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 2.0


class TestPartialTrace:
    def test_bell_reduction_maximally_mixed(self):
        rho = bell_state("phi+").density()
        assert_allclose(partial_trace(rho, [0]).matrix, np.eye(2) / 2, atol=1e-14)

    def test_product_case(self):
        rho = named_state("basis", {"bits": "00"}).density()
        reduced = partial_trace(rho, [0])
        assert_allclose(reduced.matrix, [[1, 0], [0, 0]], atol=1e-15)

    def test_schmidt_state_reduction(self):
        # oracle: explicit index contraction
        psi = qcore.schmidt_state(0.2)
        mat = psi.density().matrix.reshape(2, 2, 2, 2)
        manual = np.einsum("ikjk->ij", mat)
        reduced = partial_trace(psi.density(), [0])
        assert_allclose(reduced.matrix, manual, atol=1e-14)
        assert_allclose(np.diag(reduced.matrix).real, [0.2, 0.8], atol=1e-12)

    def test_recovers_factors_of_product_state(self, rng):
        for _ in range(10):
            a = qcore.random_density_matrix(rng, (2,))
            b = qcore.random_density_matrix(rng, (2,))
            joint = DensityMatrix((2, 2), tensor(a.matrix, b.matrix))
            assert_allclose(partial_trace(joint, [0]).matrix, a.matrix, atol=1e-10)
            assert_allclose(partial_trace(joint, [1]).matrix, b.matrix, atol=1e-10)

    def test_invalid_index(self):
        rho = werner_state(0.3)
        with pytest.raises(DimensionError):
            partial_trace(rho, [2])
        with pytest.raises(DimensionError):
            partial_trace(rho, [])

    def test_trace_preserved(self, rng):
        rho = qcore.random_density_matrix(rng, (2, 2, 2))
        reduced = partial_trace_array(rho.matrix, (2, 2, 2), keep=(0, 2))
        assert abs(np.trace(reduced).real - 1.0) < 1e-12


class TestHermEig:
    def test_pauli_z(self):
        w, _ = herm_eig(Z)
        assert_allclose(w, [-1.0, 1.0], atol=1e-15)

    def test_maximally_mixed(self):
        w, _ = herm_eig(np.eye(4) / 4)
        assert_allclose(w, [0.25] * 4, atol=1e-15)

    def test_werner_spectrum(self):
        # eigenvalues are (1-a)/4 three times and (1+3a)/4
        w, _ = herm_eig(werner_state(0.6).matrix)
        assert_allclose(w, [0.1, 0.1, 0.1, 0.7], atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_reconstruction_16(self, rng):
        g = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        h = (g + g.conj().T) / 2
        w, v = herm_eig(h)
        assert_allclose((v * w) @ v.conj().T, h, atol=1e-8)
        assert_allclose(h @ v, v * w, atol=1e-8)
        assert np.all(np.diff(w) >= -1e-12)


class TestPositiveEigSum:
    def test_density_matrix_sums_to_one(self, rng):
        rho = qcore.random_density_matrix(rng)
        assert abs(positive_eig_sum(rho.matrix) - 1.0) < 1e-12

    def test_negated_density_matrix(self, rng):
        rho = qcore.random_density_matrix(rng)
        assert positive_eig_sum(-rho.matrix) == 0.0

    def test_fixed_point_difference_vanishes(self):
        # X (x) X fixes phi+, so the flip-conditional operator equals the state
        rho = bell_state("phi+").density().matrix
        xx = tensor(X, X)
        k = 0.5 * (tensor(X, np.eye(2)) + tensor(np.eye(2), X))
        sigma = k @ rho @ k.conj().T
        assert np.max(np.abs(xx @ bell_state("phi+").amplitudes - bell_state("phi+").amplitudes)) < 1e-15
        assert positive_eig_sum(sigma - sigma) == 0.0


class TestTraceDistance:
    def test_self_distance_zero(self, rng):
        rho = qcore.random_density_matrix(rng)
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        a = named_state("basis", {"bits": "0"}).density()
        b = named_state("basis", {"bits": "1"}).density()
        assert abs(trace_distance(a, b) - 1.0) < 1e-14

    def test_pure_state_overlap_formula(self):
        # |0> vs |+>: sqrt(1 - |<phi|psi>|^2) = 1/sqrt(2)
        zero = np.array([1.0, 0.0])
        plus = np.array([1.0, 1.0]) / math.sqrt(2)
        t = trace_distance(np.outer(zero, zero), np.outer(plus, plus))
        assert abs(t - 1.0 / math.sqrt(2)) < 1e-12

    def test_metric_properties(self, rng):
        states = [qcore.random_density_matrix(rng) for _ in range(6)]
        for a in states:
            for b in states:
                tab = trace_distance(a, b)
                assert abs(tab - trace_distance(b, a)) < 1e-12
                assert tab >= 0.0
                assert tab <= 1.0 + 1e-12
                for c in states:
                    assert tab <= trace_distance(a, c) + trace_distance(c, b) + 1e-9


class TestSchmidt:
    def test_bell(self):
        lams, _ = schmidt(bell_state("phi+"))
        assert_allclose(lams, [0.5, 0.5], atol=1e-12)

    def test_product(self):
        lams, _ = schmidt(named_state("basis", {"bits": "01"}))
        assert_allclose(lams, [1.0, 0.0], atol=1e-12)

    def test_schmidt_state(self):
        # oracle: singular values of the reshaped amplitude matrix
        lams, _ = schmidt(qcore.schmidt_state(0.2))
        assert_allclose(lams, [0.8, 0.2], atol=1e-12)

    def test_reconstruction_and_normalization(self, rng):
        for _ in range(20):
            psi = qcore.random_pure_state(rng)
            lams, (a, b) = schmidt(psi)
            assert abs(lams.sum() - 1.0) < 1e-10
            rebuilt = sum(
                math.sqrt(lams[k]) * np.kron(a[:, k], b[:, k]) for k in range(2)
            )
            overlap = abs(np.vdot(rebuilt, psi.amplitudes))
            assert abs(overlap - 1.0) < 1e-8

    def test_product_invariant_under_local_unitaries(self, rng):
        for _ in range(20):
            psi = qcore.random_pure_state(rng)
            u = qcore.random_unitary(rng)
            v = qcore.random_unitary(rng)
            rotated = PureState((2, 2), tensor(u, v) @ psi.amplitudes)
            p1 = np.prod(schmidt(psi)[0])
            p2 = np.prod(schmidt(rotated)[0])
            assert abs(p1 - p2) < 1e-9


class TestNamedStates:
    def test_werner_limits(self):
        pure = named_state("werner", {"k": "psi+", "a": 1})
        assert_allclose(pure.matrix, bell_state("psi+").density().matrix, atol=1e-15)
        mixed = named_state("werner", {"a": 0})
        assert_allclose(mixed.matrix, np.eye(4) / 4, atol=1e-15)

    def test_bell_diagonal_spectrum(self):
        rho = named_state("bell_diagonal", {"p1": 0.7, "p2": 0.1, "p3": 0.1, "p4": 0.1})
        w, _ = herm_eig(rho.matrix)
        assert_allclose(np.sort(w), [0.1, 0.1, 0.1, 0.7], atol=1e-12)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError, match="a="):
            named_state("werner", {"a": 1.5})
        with pytest.raises(ValidationError, match="rho01"):
            named_state("sa", {"rho00": 0.1, "rho01_re": 0.9})
        with pytest.raises(ValidationError):
            named_state("bell_diagonal", {"p1": 0.9, "p2": 0.9, "p3": 0.1, "p4": 0.1})

    def test_unknown_name_and_params(self):
        with pytest.raises(ValidationError):
            named_state("ghz", {})
        with pytest.raises(ValidationError):
            named_state("bell", {"k": "phi+", "bogus": 1})

    def test_sa_boundary_is_valid(self):
        rho = named_state("sa", {"rho00": 0.5, "rho01_re": 0.5})
        assert isinstance(rho, DensityMatrix)


@settings(max_examples=40, deadline=None)
@given(
    r=st.floats(min_value=0.0, max_value=1.0),
    a=st.floats(min_value=0.0, max_value=1.0),
)
def test_constructors_satisfy_invariants(r, a):
    qcore.schmidt_state(r)
    qcore.werner_state(a)
    qcore.two_bell_mixture_state(a)
