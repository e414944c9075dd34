import numpy as np
import pytest
from numpy.testing import assert_allclose

from delocgames import circuits, games, qcore
from delocgames.circuits import (
    Circuit,
    Gate,
    NoiseModel,
    build_circuit,
    demo_csv_rows,
    run_demo,
    sample_counts,
    score,
    simulate,
)
from delocgames.qcore import ValidationError


def statevector(circuit):
    """Independent oracle: pure statevector evolution of the gate list."""
    psi = np.zeros(16, dtype=complex)
    psi[0] = 1.0
    mats = {
        "H": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
        "X": np.array([[0, 1], [1, 0]]),
        "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
        "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
    }
    for gate in circuit.gates:
        if gate.kind == "MEASURE_ALL":
            break
        full = circuits._embed(mats[gate.kind].astype(complex), gate.qubits)
        psi = full @ psi
    return psi


class TestBuildCircuit:
    def test_stage_structure_bd_phi(self):
        c = build_circuit("bd", "phi+", "entangled")
        kinds = [g.kind for g in c.gates]
        assert kinds == ["H", "CX", "X", "SWAP", "SWAP", "H", "CX", "CX", "CX", "CX", "H", "MEASURE_ALL"]
        assert [g.kind for g in c.stages["interaction"]] == ["CX", "CX"]

    def test_pnp_00_has_empty_prep_and_decode(self):
        c = build_circuit("pnp", "00", "entangled")
        assert c.stages["c_prep"] == ()
        assert [g.kind for g in c.stages["measurement"]] == ["MEASURE_ALL"]

    def test_separable_omits_ab_prep(self):
        c = build_circuit("bd", "psi+", "separable")
        assert c.stages["ab_prep"] == ()

    def test_incompatible_pair_rejected(self):
        with pytest.raises(ValidationError):
            build_circuit("bd", "00", "entangled")
        with pytest.raises(ValidationError):
            build_circuit("pnp", "phi+", "entangled")

    def test_gate_validation(self):
        with pytest.raises(ValidationError):
            Gate("H", (4,))
        with pytest.raises(ValidationError):
            Gate("CX", (1, 1))
        with pytest.raises(ValidationError):
            Circuit({"ab_prep": (), "c_prep": (), "interaction": (), "measurement": ()})


class TestSimulate:
    def test_resource_preparation(self):
        # after stage 1 the players share psi+ on (q0, q3)
        c = build_circuit("pnp", "00", "entangled")
        psi = statevector(c)
        rho = np.outer(psi, psi.conj())
        resource = qcore.partial_trace_array(rho, (2, 2, 2, 2), keep=(0, 3))
        assert_allclose(resource, qcore.bell_state("psi+").density().matrix, atol=1e-12)

    @pytest.mark.parametrize(
        "question,check_bits,parity",
        [("phi+", (0, 0), 1), ("psi+", (0, 1), 0)],
    )
    def test_noiseless_bd_outcomes(self, question, check_bits, parity):
        dist = simulate(build_circuit("bd", question, "entangled"))
        oracle = np.abs(statevector(build_circuit("bd", question, "entangled"))) ** 2
        assert_allclose(dist, oracle, atol=1e-12)
        for outcome in range(16):
            q0, q1, q2, q3 = circuits._bits(outcome)
            if dist[outcome] > 1e-12:
                assert (q1, q2) == check_bits
                assert q0 ^ q3 == parity

    def test_noiseless_pnp_00(self):
        dist = simulate(build_circuit("pnp", "00", "entangled"))
        for outcome in range(16):
            q0, q1, q2, q3 = circuits._bits(outcome)
            if dist[outcome] > 1e-12:
                assert (q1, q2) == (0, 0)
                assert q0 ^ q3 == 1

    def test_distribution_normalized_with_noise(self, rng):
        noise = NoiseModel(p1=0.1, p2=0.2, pm=0.05)
        for game, question in (("bd", "phi+"), ("pnp", "00")):
            dist = simulate(build_circuit(game, question, "entangled"), noise)
            assert abs(dist.sum() - 1.0) < 1e-12
            assert np.all(dist >= 0)

    def test_full_depolarization_mixes_touched_qubits(self):
        dist = simulate(build_circuit("bd", "phi+", "entangled"), NoiseModel(p1=1.0, p2=1.0))
        assert_allclose(dist, np.full(16, 1 / 16), atol=1e-12)


class TestSampleCounts:
    def test_point_distribution(self):
        dist = np.zeros(16)
        dist[5] = 1.0
        counts = sample_counts(dist, 1000, 1)
        assert counts[5] == 1000 and counts.sum() == 1000

    def test_uniform_within_5_sigma(self):
        counts = sample_counts(np.full(16, 1 / 16), 8192, 7)
        expected = 8192 / 16
        sigma = np.sqrt(8192 * (1 / 16) * (15 / 16))
        assert np.all(np.abs(counts - expected) < 5 * sigma)

    def test_seed_reproducibility(self):
        dist = np.full(16, 1 / 16)
        assert_allclose(sample_counts(dist, 100, 3), sample_counts(dist, 100, 3))

    def test_bad_inputs(self):
        with pytest.raises(ValidationError):
            sample_counts(np.full(16, 1 / 16), 0, 1)


class TestScore:
    def test_ideal_entangled_bd(self):
        for question in circuits.BD_QUESTIONS:
            dist = simulate(build_circuit("bd", question, "entangled"))
            assert abs(score(dist, "bd", question, "entangled") - 1.0) < 1e-12

    def test_ideal_separable_bd(self):
        total = 0.0
        for question in circuits.BD_QUESTIONS:
            dist = simulate(build_circuit("bd", question, "separable"))
            total += 0.5 * score(dist, "bd", question, "separable")
        assert abs(total - 0.5) < 1e-12

    def test_pnp_asymmetric_total_beats_classical(self):
        priors = {"psi+": 2 / 3, "00": 1 / 3}
        total = 0.0
        for question in circuits.PNP_QUESTIONS:
            dist = simulate(build_circuit("pnp", question, "entangled"))
            total += priors[question] * score(dist, "pnp", question, "entangled")
        assert abs(total - 1.0) < 1e-12
        assert total > 2 / 3

    def test_local_parity_rule_equivalent(self, rng):
        # answers need only local Z results: recompute the score from the
        # per-outcome local bits instead of the joint bitstring index
        dist = simulate(build_circuit("bd", "psi+", "entangled"), NoiseModel(0.02, 0.04, 0.01))
        direct = score(dist, "bd", "psi+", "entangled")
        won = 0.0
        for outcome in range(16):
            alice_bit = (outcome >> 3) & 1
            bob_bit = outcome & 1
            check = ((outcome >> 2) & 1, (outcome >> 1) & 1) == (0, 1)
            answer_is_psi = (alice_bit + bob_bit) % 2 == 0
            if check and answer_is_psi:
                won += dist[outcome]
        assert abs(direct - won / dist.sum()) < 1e-15


class TestRunDemo:
    def test_noiseless_exact_totals(self):
        bd = run_demo("bd", shots=None)
        assert abs(bd.totals["entangled"] - 1.0) < 1e-10
        assert abs(bd.totals["separable"] - 0.5) < 1e-10
        pnp = run_demo("pnp", shots=None)
        assert abs(pnp.totals["entangled"] - 1.0) < 1e-10
        assert abs(pnp.totals["separable"] - 0.75) < 1e-10

    def test_matches_game_engine_predictions(self):
        # cross-module consistency against the exact engine
        flip = games.Tactic(qcore.X, qcore.X)
        bd = run_demo("bd", shots=None)
        engine = games.bd_win(qcore.bell_state("psi+").density(), flip)
        assert abs(bd.totals["entangled"] - engine.win_probability) < 1e-10
        pnp = run_demo("pnp", shots=None, p_first=0.6)
        spec = games.GameSpec.pnp(0.6)
        assert abs(pnp.totals["separable"] - games.classical_limit(spec)) < 1e-10

    def test_reference_noise_shape(self):
        rep = run_demo("bd", circuits.reference_noise(), shots=None)
        assert 0.5 < rep.totals["entangled"] < 1.0
        assert rep.totals["entangled"] > rep.totals["separable"]
        assert abs(rep.usable_concurrence - 2 * (rep.totals["entangled"] - 0.5)) < 1e-12

    def test_annotations_present(self):
        rep = run_demo("bd", shots=None)
        assert rep.annotations["bd_entangled_total"] == 0.71
        assert rep.annotations["bd_usable_concurrence"] == 0.42
        assert rep.annotations["pnp_total_at_pp_2_3"] == 0.72

    def test_total_is_prior_weighted_sum(self):
        rep = run_demo("pnp", NoiseModel(0.01, 0.02, 0.01), shots=4096, seed=5, p_first=2 / 3)
        for resource in circuits.RESOURCES:
            manual = sum(rep.priors[q] * rep.per_question[(resource, q)] for q in rep.priors)
            assert abs(manual - rep.totals[resource]) < 1e-12

    def test_sampling_deterministic(self):
        a = run_demo("bd", circuits.reference_noise(), shots=2048, seed=11)
        b = run_demo("bd", circuits.reference_noise(), shots=2048, seed=11)
        assert a.per_question == b.per_question

    def test_monotone_in_noise(self):
        # exact totals fall as each noise knob grows
        for knob in ("p1", "p2", "pm"):
            values = []
            for level in (0.0, 0.05, 0.1):
                rep = run_demo("bd", NoiseModel(**{knob: level}), shots=None)
                values.append(rep.totals["entangled"])
            assert values[0] >= values[1] >= values[2]

    def test_csv_rows(self):
        rep = run_demo("bd", shots=None)
        rows = demo_csv_rows(rep)
        assert len(rows) == 4
        assert set(rows[0]) == {"resource", "question", "per_question_win", "total_win", "classical_limit"}
