"""The delocalised-interaction game engine.

A round works on a resource pair AB plus a two-qubit question register
A_p B_p.  The referee prepares a question state, the players apply local
controlled unitaries (identity on the ``|0>`` control branch, so free
evolution is factored out), the referee projects the question register back
onto the question, and the players answer with the optimal two-hypothesis
measurement.  Supported games:

* ``pnp`` -- questions ``(|01> + |10>)/sqrt(2)`` (particle) and ``|00>``
  (no particle),
* ``bd``  -- questions ``psi+`` and ``phi+`` (Bell distinguishing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import measures
from .qcore import (
    ConsistencyError,
    DensityMatrix,
    DimensionError,
    EIG_ZERO_TOL,
    PureState,
    ValidationError,
    as_matrix,
    basis_state,
    bell_state,
    is_unitary,
    partial_trace_array,
    tensor,
    trace_distance,
)

PNP_LABELS = ("p", "np")
BD_LABELS = ("psi+", "phi+")

_FORM_CHECK_TOL = 1e-9
_BOUND_SLACK = 1e-8


@dataclass(frozen=True)
class GameSpec:
    """A two-question delocalised-interaction game with its priors."""

    kind: str
    priors: tuple[float, float]

    def __post_init__(self):
        if self.kind not in ("pnp", "bd"):
            raise ValidationError(f"kind must be 'pnp' or 'bd', got {self.kind!r}")
        priors = tuple(float(p) for p in self.priors)
        if len(priors) != 2:
            raise ValidationError("exactly two questions are supported")
        if min(priors) <= 0.0 or abs(sum(priors) - 1.0) > 1e-10:
            raise ValidationError(f"priors {priors} must be positive and sum to 1")
        object.__setattr__(self, "priors", priors)

    @classmethod
    def pnp(cls, p_particle: float = 0.5) -> "GameSpec":
        return cls("pnp", (p_particle, 1.0 - p_particle))

    @classmethod
    def bd(cls, p_psi: float = 0.5) -> "GameSpec":
        return cls("bd", (p_psi, 1.0 - p_psi))

    @property
    def labels(self) -> tuple[str, str]:
        return PNP_LABELS if self.kind == "pnp" else BD_LABELS

    @property
    def questions(self) -> tuple[PureState, PureState]:
        if self.kind == "pnp":
            return (bell_state("psi+"), basis_state("00"))
        return (bell_state("psi+"), bell_state("phi+"))


@dataclass(frozen=True)
class Tactic:
    """A pair of local unitaries, optionally on ancilla-extended 4x4 spaces."""

    u_a: np.ndarray
    v_b: np.ndarray
    label: str = ""

    def __post_init__(self):
        u = np.asarray(self.u_a, dtype=complex)
        v = np.asarray(self.v_b, dtype=complex)
        if u.shape != v.shape or u.shape not in ((2, 2), (4, 4)):
            raise DimensionError(f"tactic unitaries must both be 2x2 or 4x4, got {u.shape}/{v.shape}")
        for name, m in (("u_a", u), ("v_b", v)):
            if not is_unitary(m):
                raise ValidationError(f"{name} is not unitary within tolerance")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u_a", u)
        object.__setattr__(self, "v_b", v)

    @property
    def dim(self) -> int:
        return self.u_a.shape[0]


@dataclass(frozen=True)
class GameReport:
    game: str
    priors: tuple[float, float]
    win_probability: float
    conditional_ops: dict
    no_disturb: dict
    bounds: dict
    saturation: dict

    def __post_init__(self):
        # the classical limit caps separable play only, so it is reported but
        # not enforced against the achieved value
        applicable = [
            b for k, b in self.bounds.items() if b is not None and k != "classical_limit"
        ]
        if applicable and self.win_probability > min(applicable) + _BOUND_SLACK:
            raise ConsistencyError(
                f"win probability {self.win_probability!r} exceeds bound {min(applicable)!r}"
            )


def _lift_sides(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(u (x) 1, 1 (x) v)`` assembled directly (np.kron is slow at this size)."""
    d = u.shape[0]
    ua = np.zeros((d * d, d * d), dtype=complex)
    vb = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        ua[k::d, k::d] = u
        vb[k * d : (k + 1) * d, k * d : (k + 1) * d] = v
    return ua, vb


def build_interaction(t: Tactic) -> np.ndarray:
    """The controlled interaction on ``AB (x) A_p B_p``.

    ``W = 1 (x) |00><00| + U_A (x) 1 (x) |10><10| + 1 (x) V_B (x) |01><01|
    + U_A (x) V_B (x) |11><11|`` with the question qubits least significant.
    """
    d = t.dim
    eye = np.eye(d, dtype=complex)
    proj = [np.zeros((4, 4), dtype=complex) for _ in range(4)]
    for z in range(4):
        proj[z][z, z] = 1.0
    w = (
        tensor(eye, eye, proj[0])
        + tensor(t.u_a, eye, proj[2])
        + tensor(eye, t.v_b, proj[1])
        + tensor(t.u_a, t.v_b, proj[3])
    )
    if not is_unitary(w):
        raise ConsistencyError("assembled interaction is not unitary")
    return w


def conditional_operators(rho, t: Tactic, g: GameSpec) -> dict:
    """Post-selected subnormalized operators, one per question.

    ``sigma_z = Tr_{A_p B_p}[(1 (x) |z><z|) W (rho (x) |z><z|) W^dag]``.
    """
    rho = as_matrix(rho)
    d = t.dim
    if rho.shape != (d * d, d * d):
        raise DimensionError(f"resource shape {rho.shape} incompatible with tactic dim {d}")
    w = build_interaction(t)
    dims = (d, d, 2, 2)
    out = {}
    for label, question in zip(g.labels, g.questions):
        qproj = as_matrix(question)
        evolved = w @ tensor(rho, qproj) @ w.conj().T
        projected = tensor(np.eye(d * d), qproj) @ evolved
        out[label] = partial_trace_array(projected, dims, keep=(0, 1))
    return out


def kraus_operators(u: np.ndarray, v: np.ndarray, kind: str) -> dict:
    """Closed forms of the conditional maps: one Kraus operator per question."""
    ua, vb = _lift_sides(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))
    k1 = 0.5 * (ua + vb)
    if kind == "pnp":
        return {"p": k1, "np": np.eye(ua.shape[0], dtype=complex)}
    k2 = 0.5 * (ua @ vb + np.eye(ua.shape[0]))
    return {"psi+": k1, "phi+": k2}


def _positive_part_sum(m: np.ndarray) -> float:
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return float(w[w > EIG_ZERO_TOL].sum())


def helstrom_win(sigma1, sigma2, p1: float, p2: float) -> float:
    """Optimal two-hypothesis win probability for subnormalized conditionals.

    ``p2 Tr(sigma2) + eigs_+(p1 sigma1 - p2 sigma2)``; symmetric under
    swapping ``(sigma1, p1) <-> (sigma2, p2)``.
    """
    p1, p2 = float(p1), float(p2)
    if min(p1, p2) <= 0.0 or abs(p1 + p2 - 1.0) > 1e-10:
        raise ValidationError(f"priors ({p1}, {p2}) must be positive and sum to 1")
    s1 = as_matrix(sigma1)
    s2 = as_matrix(sigma2)
    if s1.shape != s2.shape:
        raise DimensionError(f"shape mismatch {s1.shape} vs {s2.shape}")
    return p2 * float(np.trace(s2).real) + _positive_part_sum(p1 * s1 - p2 * s2)


def pnp_value(rho: np.ndarray, u: np.ndarray, v: np.ndarray, p_particle: float = 0.5) -> float:
    """Fast particle/no-particle win probability for raw arrays."""
    ua, vb = _lift_sides(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))
    k1 = 0.5 * (ua + vb)
    sig = k1 @ rho @ k1.conj().T
    return (1.0 - p_particle) + _positive_part_sum(p_particle * sig - (1.0 - p_particle) * rho)


def bd_value(rho: np.ndarray, u: np.ndarray, v: np.ndarray, p_psi: float = 0.5) -> float:
    """Fast Bell-distinguishing win probability for raw arrays."""
    ua, vb = _lift_sides(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))
    k1 = 0.5 * (ua + vb)
    k2 = 0.5 * (ua @ vb + np.eye(ua.shape[0]))
    s_psi = k1 @ rho @ k1.conj().T
    s_phi = k2 @ rho @ k2.conj().T
    p_phi = 1.0 - p_psi
    return p_phi * float(np.trace(s_phi).real) + _positive_part_sum(p_psi * s_psi - p_phi * s_phi)


def classical_limit(g: GameSpec) -> float:
    """Best separable-resource win probability."""
    if g.kind == "pnp":
        p_particle, p_np = g.priors
        return max(p_particle, p_np + 0.5 * p_particle)
    return 0.5


def eig_pair_formula(k11: complex, k22: complex, k12: complex, k21: complex) -> tuple[float, float]:
    """Both eigenvalues of ``K1|psi><psi|K1^dag - K2|psi><psi|K2^dag``.

    ``m = (k11 - k22 +/- sqrt((k11 + k22)^2 - 4 k12 k21)) / 2`` with the
    ``k_ij`` from the Gram data of ``K1|psi>`` and ``K2|psi>``.
    """
    disc = (complex(k11) + complex(k22)) ** 2 - 4.0 * complex(k12) * complex(k21)
    if abs(disc.imag) > 1e-10 or disc.real < -1e-10:
        raise ConsistencyError(f"discriminant {disc!r} is not a nonnegative real")
    root = math.sqrt(max(disc.real, 0.0))
    diff = complex(k11) - complex(k22)
    if abs(diff.imag) > 1e-10:
        raise ConsistencyError(f"k11 - k22 = {diff!r} is not real")
    return (0.5 * (diff.real + root), 0.5 * (diff.real - root))


def win_bound(rho, kind: str) -> float:
    """Tightest equal-prior entanglement bound for a two-qubit resource."""
    c = measures.concurrence_mixed(rho)
    if kind == "pnp":
        return min(0.75 + c / 4.0, measures.record_bound(rho))
    return 0.5 + c / 2.0


def _report(g: GameSpec, rho, t: Tactic, win: float, sigmas: dict) -> GameReport:
    no_disturb = {lbl: float(np.trace(s).real) for lbl, s in sigmas.items()}
    equal_priors = abs(g.priors[0] - 0.5) < 1e-15
    bounds = {"classical_limit": classical_limit(g)}
    rho_arr = as_matrix(rho)
    if equal_priors:
        bounds["record_bound"] = measures.record_bound(rho_arr) if g.kind == "pnp" else None
        if t.dim == 2:
            c = measures.concurrence_mixed(rho_arr)
            bounds["concurrence_bound"] = (
                0.75 + c / 4.0 if g.kind == "pnp" else 0.5 + c / 2.0
            )
    bounds = {k: v for k, v in bounds.items() if v is not None}
    # the classical limit is a bound on separable play, not on this resource
    hard = {k: v for k, v in bounds.items() if k != "classical_limit"}
    saturation = {k: bool(v - win <= _BOUND_SLACK) for k, v in bounds.items()}
    report = GameReport(
        game=g.kind,
        priors=g.priors,
        win_probability=float(win),
        conditional_ops=sigmas,
        no_disturb=no_disturb,
        bounds=bounds,
        saturation=saturation,
    )
    if hard and win > min(hard.values()) + _BOUND_SLACK:
        raise ConsistencyError(f"win {win!r} exceeds bound {min(hard.values())!r}")
    return report


def pnp_win(rho, t: Tactic, p_particle: float = 0.5) -> GameReport:
    """Particle/no-particle game report for a fixed tactic.

    At equal priors the trace-distance form
    ``1/4 + T(sigma_tilde, rho)/2 + Tr(sigma_tilde)/4`` is evaluated as well
    and must agree with the eigenvalue form.
    """
    g = GameSpec.pnp(p_particle)
    rho_arr = as_matrix(rho)
    sigmas = conditional_operators(rho_arr, t, g)
    win = helstrom_win(sigmas["p"], sigmas["np"], *g.priors)
    if abs(p_particle - 0.5) < 1e-15:
        sig = sigmas["p"]
        alt = 0.25 + 0.5 * trace_distance(sig, rho_arr) + 0.25 * float(np.trace(sig).real)
        if abs(alt - win) > _FORM_CHECK_TOL:
            raise ConsistencyError(f"trace-distance form {alt!r} disagrees with {win!r}")
    return _report(g, rho_arr, t, win, sigmas)


def bd_win(rho, t: Tactic, p_psi: float = 0.5) -> GameReport:
    """Bell-distinguishing game report for a fixed tactic.

    For a pure resource at equal priors the closed Gram form
    ``(k11 + k22 + sqrt((k11 + k22)^2 - 4 k12 k21))/4`` is evaluated as well
    and must agree.
    """
    g = GameSpec.bd(p_psi)
    rho_arr = as_matrix(rho)
    sigmas = conditional_operators(rho_arr, t, g)
    win = helstrom_win(sigmas["psi+"], sigmas["phi+"], *g.priors)
    purity = float(np.trace(rho_arr @ rho_arr).real)
    if abs(p_psi - 0.5) < 1e-15 and purity > 1.0 - 1e-10:
        w, vecs = np.linalg.eigh((rho_arr + rho_arr.conj().T) / 2)
        psi = vecs[:, -1]
        ks = kraus_operators(t.u_a, t.v_b, "bd")
        k1_psi = ks["psi+"] @ psi
        k2_psi = ks["phi+"] @ psi
        k11 = np.vdot(k1_psi, k1_psi)
        k22 = np.vdot(k2_psi, k2_psi)
        k12 = np.vdot(k1_psi, k2_psi)
        k21 = np.vdot(k2_psi, k1_psi)
        m_plus, _ = eig_pair_formula(k11, k22, k12, k21)
        # (k11 + k22 + sqrt(disc))/4 written through the positive root
        closed = 0.5 * (k22.real + m_plus)
        if abs(closed - win) > _FORM_CHECK_TOL:
            raise ConsistencyError(f"Gram closed form {closed!r} disagrees with {win!r}")
    return _report(g, rho_arr, t, win, sigmas)
