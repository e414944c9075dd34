"""Density-matrix simulation of the four-qubit demonstration circuits.

Qubit layout: ``q0`` and ``q3`` hold the players' resource pair, ``q1`` and
``q2`` carry the referee's question (and are reused to distribute the
entangled resource before the question is prepared).  ``q0`` is the most
significant bit of an outcome bitstring.

Stages: AB preparation, question preparation, interaction (a CX from each
question qubit onto its local resource qubit), and measurement, where
entangled questions are decoded back to the computational basis first.

Noise: depolarizing on each gate's support (``p1`` single-qubit, ``p2``
two-qubit, a SWAP counting as one two-qubit gate) plus an independent
readout bit flip ``pm`` per qubit applied to the outcome distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import games
from .qcore import (
    DimensionError,
    ValidationError,
    partial_trace_array,
    permute_subsystems,
    tensor,
)

N_QUBITS = 4

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

_GATE_MATRICES = {"H": _H, "X": _X, "CX": _CX, "SWAP": _SWAP}

BD_QUESTIONS = ("psi+", "phi+")
PNP_QUESTIONS = ("psi+", "00")
RESOURCES = ("entangled", "separable")

# Stand-in device imperfection, not calibrated against any hardware.
REFERENCE_NOISE_PROFILE = {"p1": 0.015, "p2": 0.03, "pm": 0.025}

HARDWARE_REFERENCE = {
    "bd_entangled_total": 0.71,
    "bd_usable_concurrence": 0.42,
    "pnp_total_at_pp_2_3": 0.72,
    "note": "superconducting-device runs at 8192 shots; reference points only, "
    "not reproduced by the stand-in noise profile",
}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("H", "X", "CX", "SWAP", "MEASURE_ALL"):
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        if any(q < 0 or q >= N_QUBITS for q in qubits):
            raise ValidationError(f"gate {self.kind} references invalid qubits {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValidationError(f"gate {self.kind} repeats qubits {qubits}")
        want = {"H": 1, "X": 1, "CX": 2, "SWAP": 2, "MEASURE_ALL": 0}[self.kind]
        if len(qubits) != want:
            raise ValidationError(f"gate {self.kind} takes {want} qubits, got {qubits}")
        object.__setattr__(self, "qubits", qubits)


@dataclass(frozen=True)
class Circuit:
    stages: dict

    def __post_init__(self):
        expected = ("ab_prep", "c_prep", "interaction", "measurement")
        if tuple(self.stages) != expected:
            raise ValidationError(f"stages must be {expected}, got {tuple(self.stages)}")
        gates = self.gates
        measures_seen = [g for g in gates if g.kind == "MEASURE_ALL"]
        if len(measures_seen) != 1 or gates[-1].kind != "MEASURE_ALL":
            raise ValidationError("MEASURE_ALL must appear exactly once, last")

    @property
    def gates(self) -> tuple[Gate, ...]:
        return tuple(g for stage in self.stages.values() for g in stage)


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0
    pm: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "pm"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name}={v!r} outside [0, 1]")
            object.__setattr__(self, name, v)


def reference_noise() -> NoiseModel:
    return NoiseModel(**REFERENCE_NOISE_PROFILE)


def build_circuit(game: str, question: str, resource: str) -> Circuit:
    """Assemble the staged demonstration circuit for one (game, question) case."""
    if game not in ("pnp", "bd"):
        raise ValidationError(f"game must be 'pnp' or 'bd', got {game!r}")
    if resource not in RESOURCES:
        raise ValidationError(f"resource must be one of {RESOURCES}, got {resource!r}")
    allowed = BD_QUESTIONS if game == "bd" else PNP_QUESTIONS
    if question not in allowed:
        raise ValidationError(f"game {game!r} takes questions {allowed}, got {question!r}")

    ab_prep: tuple[Gate, ...] = ()
    if resource == "entangled":
        ab_prep = (
            Gate("H", (1,)),
            Gate("CX", (1, 2)),
            Gate("X", (1,)),
            Gate("SWAP", (1, 0)),
            Gate("SWAP", (2, 3)),
        )
    c_prep = {
        "phi+": (Gate("H", (1,)), Gate("CX", (1, 2))),
        "psi+": (Gate("H", (1,)), Gate("CX", (1, 2)), Gate("X", (1,))),
        "00": (),
    }[question]
    interaction = (Gate("CX", (1, 0)), Gate("CX", (2, 3)))
    measurement: tuple[Gate, ...] = (Gate("MEASURE_ALL", ()),)
    if question in ("phi+", "psi+"):
        measurement = (Gate("CX", (1, 2)), Gate("H", (1,)), Gate("MEASURE_ALL", ()))
    return Circuit(
        {
            "ab_prep": ab_prep,
            "c_prep": c_prep,
            "interaction": interaction,
            "measurement": measurement,
        }
    )


def _embed(op: np.ndarray, targets: tuple[int, ...]) -> np.ndarray:
    """Lift an operator on ``targets`` to the full four-qubit register."""
    others = tuple(q for q in range(N_QUBITS) if q not in targets)
    seq = targets + others
    full = tensor(op, np.eye(2 ** len(others))) if others else np.asarray(op, dtype=complex)
    order = tuple(seq.index(j) for j in range(N_QUBITS))
    return permute_subsystems(full, (2,) * N_QUBITS, order)


def _depolarize(rho: np.ndarray, qubits: tuple[int, ...], p: float) -> np.ndarray:
    if p == 0.0 or not qubits:
        return rho
    others = tuple(q for q in range(N_QUBITS) if q not in qubits)
    reduced = partial_trace_array(rho, (2,) * N_QUBITS, keep=others)
    k = len(qubits)
    mixed = tensor(np.eye(2**k) / 2**k, reduced)
    seq = qubits + others
    order = tuple(seq.index(j) for j in range(N_QUBITS))
    return (1.0 - p) * rho + p * permute_subsystems(mixed, (2,) * N_QUBITS, order)


def _readout_matrix(pm: float) -> np.ndarray:
    c = np.array([[1.0 - pm, pm], [pm, 1.0 - pm]])
    out = c
    for _ in range(N_QUBITS - 1):
        out = np.kron(out, c)
    return out


def simulate(circuit: Circuit, noise: NoiseModel = NoiseModel()) -> np.ndarray:
    """Exact outcome distribution over the 16 bitstrings (q0 most significant)."""
    dim = 2**N_QUBITS
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    for gate in circuit.gates:
        if gate.kind == "MEASURE_ALL":
            break
        full = _embed(_GATE_MATRICES[gate.kind], gate.qubits)
        rho = full @ rho @ full.conj().T
        p = noise.p1 if len(gate.qubits) == 1 else noise.p2
        rho = _depolarize(rho, gate.qubits, p)
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > 1e-12:
            raise ValidationError(f"trace drifted to {tr!r} during simulation")
    probs = np.clip(np.diag(rho).real, 0.0, None)
    if noise.pm > 0.0:
        probs = _readout_matrix(noise.pm) @ probs
    total = probs.sum()
    if abs(total - 1.0) > 1e-12:
        raise ValidationError(f"outcome probabilities sum to {total!r}")
    return probs / total


def sample_counts(dist: np.ndarray, shots: int, seed) -> np.ndarray:
    """Multinomial counts over the 16 bitstrings, deterministic per seed."""
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (16,):
        raise DimensionError(f"distribution must have 16 entries, got {dist.shape}")
    if shots <= 0:
        raise ValidationError(f"shots must be positive, got {shots}")
    rng = np.random.default_rng(seed)
    return rng.multinomial(int(shots), dist / dist.sum())


def _bits(outcome: int) -> tuple[int, int, int, int]:
    return ((outcome >> 3) & 1, (outcome >> 2) & 1, (outcome >> 1) & 1, outcome & 1)


_CHECK_PATTERN = {"phi+": (0, 0), "psi+": (0, 1), "00": (0, 0)}

# Parity of the resource pair decides the answer; with the entangled psi+
# resource the flips leave parity 1 for {phi+ sent, no particle} and produce
# parity 0 for {psi+ sent, particle}, while the separable |00> resource maps
# the questions the opposite way.
_ANSWER = {
    ("bd", "entangled"): {1: "phi+", 0: "psi+"},
    ("pnp", "entangled"): {1: "00", 0: "psi+"},
    ("bd", "separable"): {1: "psi+", 0: "phi+"},
    ("pnp", "separable"): {1: "psi+", 0: "00"},
}


def score(counts, game: str, question: str, resource: str = "entangled") -> float:
    """Win fraction: the question register checks out and the parity answer is right.

    ``counts`` may be shot counts or an exact outcome distribution.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (16,) or np.any(counts < 0):
        raise ValidationError("counts must be 16 nonnegative values")
    allowed = BD_QUESTIONS if game == "bd" else PNP_QUESTIONS
    if question not in allowed:
        raise ValidationError(f"game {game!r} takes questions {allowed}, got {question!r}")
    answer_rule = _ANSWER[(game, resource)]
    check = _CHECK_PATTERN[question]
    won = 0.0
    for outcome in range(16):
        q0, q1, q2, q3 = _bits(outcome)
        if (q1, q2) != check:
            continue
        if answer_rule[q0 ^ q3] == question:
            won += counts[outcome]
    return float(won / counts.sum())


@dataclass(frozen=True)
class DemoReport:
    game: str
    priors: dict
    per_question: dict
    totals: dict
    classical_limit: float
    usable_concurrence: float | None
    annotations: dict

    def __post_init__(self):
        for resource, total in self.totals.items():
            recomputed = sum(
                self.priors[q] * self.per_question[(resource, q)] for q in self.priors
            )
            if abs(recomputed - total) > 1e-12:
                raise ValidationError(f"total for {resource!r} is not the prior-weighted sum")


def run_demo(
    game: str,
    noise: NoiseModel = NoiseModel(),
    shots: int | None = 8192,
    seed: int = 0,
    p_first: float = 0.5,
) -> DemoReport:
    """Simulate all circuit variants of one game and score them.

    ``p_first`` is the prior of the first question (``psi+`` in both games).
    ``shots=None`` scores the exact outcome distributions.
    """
    questions = BD_QUESTIONS if game == "bd" else PNP_QUESTIONS
    if not 0.0 < p_first < 1.0:
        raise ValidationError(f"p_first={p_first!r} outside (0, 1)")
    priors = {questions[0]: float(p_first), questions[1]: 1.0 - float(p_first)}
    per_question = {}
    totals = {}
    for res_index, resource in enumerate(RESOURCES):
        total = 0.0
        for q_index, question in enumerate(questions):
            dist = simulate(build_circuit(game, question, resource), noise)
            if shots is None:
                data = dist
            else:
                stream = np.random.SeedSequence(
                    entropy=int(seed), spawn_key=(res_index * len(questions) + q_index,)
                )
                data = sample_counts(dist, shots, stream)
            win = score(data, game, question, resource)
            per_question[(resource, question)] = win
            total += priors[question] * win
        totals[resource] = total

    if game == "bd":
        limit = 0.5
        usable = 2.0 * (totals["entangled"] - 0.5)
    else:
        spec = games.GameSpec.pnp(priors["psi+"])
        limit = games.classical_limit(spec)
        usable = None
    return DemoReport(
        game=game,
        priors=priors,
        per_question=per_question,
        totals=totals,
        classical_limit=limit,
        usable_concurrence=usable,
        annotations=dict(HARDWARE_REFERENCE),
    )


def demo_csv_rows(report: DemoReport) -> list[dict]:
    """Rows for the demo CSV: resource, question, per_question_win, total_win, classical_limit."""
    rows = []
    for resource in RESOURCES:
        for question in report.priors:
            rows.append(
                {
                    "resource": resource,
                    "question": question,
                    "per_question_win": report.per_question[(resource, question)],
                    "total_win": report.totals[resource],
                    "classical_limit": report.classical_limit,
                }
            )
    return rows
