import numpy as np
import pytest
from numpy.testing import assert_allclose

from delocgames import games, measures, qcore, tactics
from delocgames.games import GameSpec
from delocgames.qcore import (
    ValidationError,
    bell_state,
    named_state,
    schmidt_state,
    tensor,
    two_bell_mixture_state,
    werner_state,
)


class TestOrthogonalSchmidtFlip:
    def test_bell_achieves_one(self):
        t = tactics.orthogonal_schmidt_flip(bell_state("phi+"))
        rep = games.pnp_win(bell_state("phi+").density(), t, 0.5)
        assert abs(rep.win_probability - 1.0) < 1e-9

    def test_product_achieves_classical(self):
        psi = named_state("basis", {"bits": "00"})
        t = tactics.orthogonal_schmidt_flip(psi)
        rep = games.pnp_win(psi.density(), t, 0.5)
        assert abs(rep.win_probability - 0.75) < 1e-9

    def test_schmidt_value(self):
        psi = schmidt_state(0.2)
        t = tactics.orthogonal_schmidt_flip(psi)
        rep = games.pnp_win(psi.density(), t, 0.5)
        assert abs(rep.win_probability - 0.95) < 1e-9

    def test_orthogonality_and_real_cross_term(self, rng):
        for _ in range(50):
            psi = qcore.random_pure_state(rng)
            t = tactics.orthogonal_schmidt_flip(psi)
            v = psi.amplitudes
            ua = tensor(t.u_a, np.eye(2))
            vb = tensor(np.eye(2), t.v_b)
            assert abs(np.vdot(v, ua @ v)) < 1e-10
            assert abs(np.vdot(v, vb @ v)) < 1e-10
            p_perp = np.eye(4) - np.outer(v, v.conj())
            cross = np.vdot(v, ua @ p_perp @ vb.conj().T @ v)
            c = measures.concurrence_pure(psi)
            assert abs(cross.real - c) < 1e-9
            assert abs(cross.imag) < 1e-9


class TestWernerFlip:
    def test_pure_bell_limit(self):
        rho = werner_state(1.0, "psi+")
        rep = games.pnp_win(rho, tactics.werner_flip("psi+", rho), 0.5)
        assert abs(rep.win_probability - 1.0) < 1e-10

    def test_guessing_at_zero(self):
        rho = werner_state(0.0)
        rep = games.pnp_win(rho, tactics.werner_flip("psi+", rho), 0.5)
        assert abs(rep.win_probability - 0.5) < 1e-12

    def test_saturates_record_bound(self):
        rho = werner_state(0.6)
        rep = games.pnp_win(rho, tactics.werner_flip("psi+", rho), 0.5)
        assert abs(rep.win_probability - 0.8) < 1e-10
        assert rep.saturation["record_bound"]

    def test_sign_choice_per_bell_label(self):
        for k, sign in (("phi+", 1), ("phi-", -1), ("psi+", 1), ("psi-", -1)):
            t = tactics.werner_flip(k, werner_state(0.7, k))
            assert_allclose(t.v_b, sign * qcore.X, atol=1e-15)

    def test_rejects_non_werner(self):
        with pytest.raises(ValidationError):
            tactics.werner_flip("psi+", two_bell_mixture_state(0.3))

    def test_werner_grid_exact_and_below_concurrence_bound(self):
        for a in np.linspace(0.0, 1.0, 21):
            rho = werner_state(float(a))
            rep = games.pnp_win(rho, tactics.werner_flip("psi+", rho), 0.5)
            assert abs(rep.win_probability - 0.5 * (1 + a)) < 1e-12
            assert abs(rep.win_probability - measures.record_bound(rho)) < 1e-12
            if a < 1.0:
                c = measures.concurrence_mixed(rho)
                assert rep.win_probability < 0.75 + c / 4.0


class TestTwoBellMixture:
    @pytest.mark.parametrize("a,expected", [(0.3, 0.85), (0.5, 0.75), (0.8, 0.9)])
    def test_grid_values(self, a, expected):
        rho = two_bell_mixture_state(a)
        rep = games.pnp_win(rho, tactics.two_bell_mixture(a), 0.5)
        assert abs(rep.win_probability - expected) < 1e-10

    def test_saturates_concurrence_bound_on_grid(self):
        for a in np.linspace(0.0, 1.0, 21):
            rho = two_bell_mixture_state(float(a))
            rep = games.pnp_win(rho, tactics.two_bell_mixture(float(a)), 0.5)
            c = measures.concurrence_mixed(rho)
            assert abs(rep.win_probability - (0.75 + c / 4.0)) < 1e-12

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            tactics.two_bell_mixture(1.2)


class TestFefTactic:
    def test_bell_diagonal_saturation(self):
        rho = named_state("bell_diagonal", {"p1": 0.7, "p2": 0.1, "p3": 0.1, "p4": 0.1})
        rep = games.bd_win(rho, tactics.fef_tactic(rho))
        assert rep.win_probability >= 0.7 - 1e-8
        assert abs(rep.win_probability - 0.7) < 1e-8  # = 1/2 + C/2 here

    def test_werner(self):
        rho = werner_state(0.6)
        rep = games.bd_win(rho, tactics.fef_tactic(rho))
        assert abs(rep.win_probability - 0.7) < 1e-8

    def test_maximally_mixed_reports_guess(self):
        rho = werner_state(0.0)
        rep = tactics.evaluate("fef", rho, GameSpec.bd())
        assert rep.win_probability == 0.5

    def test_teleportation_corollary(self, rng):
        # any state with F > 1/2 wins the BD game beyond guessing
        count = 0
        while count < 100:
            rho = qcore.random_density_matrix(rng)
            f, _ = measures.fully_entangled_fraction(rho)
            if f <= 0.5:
                continue
            count += 1
            rep = tactics.evaluate("fef", rho, GameSpec.bd())
            assert rep.win_probability >= f - 1e-8
            assert rep.win_probability > 0.5 + 1e-10


class TestEvaluate:
    def test_werner_flip_flags(self):
        rep = tactics.evaluate("werner_flip", werner_state(0.6), GameSpec.pnp(0.5))
        assert rep.saturation["record_bound"]

    def test_orthogonal_flip_flags(self, rng):
        psi = qcore.random_pure_state(rng)
        rep = tactics.evaluate("orthogonal_schmidt_flip", psi.density(), GameSpec.pnp(0.5))
        assert rep.saturation["concurrence_bound"]

    def test_identity_guesses_bd(self, rng):
        rho = qcore.random_density_matrix(rng)
        rep = tactics.evaluate("identity", rho, GameSpec.bd())
        assert abs(rep.win_probability - 0.5) < 1e-12

    def test_inapplicable_recipe_rejected(self):
        with pytest.raises(ValidationError):
            tactics.evaluate("werner_flip", two_bell_mixture_state(0.2), GameSpec.pnp(0.5))
        with pytest.raises(ValidationError):
            tactics.evaluate("unknown", werner_state(0.5), GameSpec.pnp(0.5))
