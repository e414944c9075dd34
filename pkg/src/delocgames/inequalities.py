"""Spectral bound on trace distance, the purification trace-distance
inequality, strongly anonymous states, and the four conditioned games.

The central lemma bounds the quantum trace distance of two states by the
Kolmogorov distance of their spectra sorted in opposite orders.  The
purification inequality compares how visible a one-sided unitary is locally
versus how distinguishable it is from an other-sided unitary on a purified
state; separable states always satisfy it, entangled ones need not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from . import measures, optimizer
from .games import Tactic
from .measures import kolmogorov
from .qcore import (
    ConsistencyError,
    DensityMatrix,
    DimensionError,
    PureState,
    ValidationError,
    as_matrix,
    herm_eig,
    partial_trace_array,
    tensor,
    trace_distance,
    werner_state,
)

HOLDS_TOL = 1e-10
CONSTRAINT_TOL = 1e-8


class ConstraintError(ValidationError):
    """A conditioned-game tactic misses its equality constraint."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = float(residual)


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    slack: float = None  # type: ignore[assignment]
    holds: bool = None  # type: ignore[assignment]

    def __post_init__(self):
        slack = float(self.rhs) - float(self.lhs)
        object.__setattr__(self, "slack", slack)
        object.__setattr__(self, "holds", bool(slack >= -HOLDS_TOL))


def lemma1_check(rho, sigma) -> InequalityReport:
    """``T(rho, sigma) <= T_c(lam_up, mu_down)`` including zero eigenvalues."""
    a = as_matrix(rho)
    b = as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    lam = np.clip(herm_eig(a)[0], 0.0, None)
    mu = np.clip(herm_eig(b)[0], 0.0, None)
    return InequalityReport(lhs=trace_distance(a, b), rhs=kolmogorov(lam, mu[::-1]))


def purify(rho: DensityMatrix) -> PureState:
    """Spectral purification on a reference of dimension equal to the rank."""
    w, v = herm_eig(rho.matrix)
    keep = w > 1e-12
    w, v = w[keep], v[:, keep]
    rank = int(w.size)
    vec = np.zeros(rho.dim * rank, dtype=complex)
    for i in range(rank):
        vec += math.sqrt(w[i]) * np.kron(v[:, i], _unit(rank, i))
    return PureState((*rho.dims, rank), vec)


def _unit(d: int, i: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


def _lift(u: np.ndarray, side: str, ref_dim: int = 1) -> np.ndarray:
    ops = [u, np.eye(2)] if side == "a" else [np.eye(2), u]
    if ref_dim > 1:
        ops.append(np.eye(ref_dim))
    return tensor(*ops)


def td_inequality(rho: DensityMatrix, u_a: np.ndarray, v_b: np.ndarray) -> InequalityReport:
    """Local-visibility vs purified-distinguishability comparison.

    ``lhs = T(U_A rho U_A^dag, rho)``;
    ``rhs = sqrt(1 - |<Psi| V_B^dag U_A |Psi>|^2)`` on a purification.
    Violations are possible only for entangled states.
    """
    if tuple(rho.dims) != (2, 2):
        raise DimensionError(f"state must live on two qubits, got dims {rho.dims}")
    for name, m in (("u_a", u_a), ("v_b", v_b)):
        mm = np.asarray(m, dtype=complex)
        if mm.shape != (2, 2) or np.max(np.abs(mm.conj().T @ mm - np.eye(2))) > 1e-9:
            raise ValidationError(f"{name} must be a 2x2 unitary")
    ua_local = _lift(u_a, "a")
    lhs = trace_distance(ua_local @ rho.matrix @ ua_local.conj().T, rho.matrix)
    psi = purify(rho)
    ref_dim = psi.dims[-1]
    ua = _lift(u_a, "a", ref_dim)
    vb = _lift(v_b, "b", ref_dim)
    overlap = complex(np.vdot(vb @ psi.amplitudes, ua @ psi.amplitudes))
    rhs = math.sqrt(max(1.0 - abs(overlap) ** 2, 0.0))
    return InequalityReport(lhs=lhs, rhs=rhs)


def violation_objective(rho: DensityMatrix):
    """Objective ``lhs - rhs`` of the purification inequality over raw tactic params."""
    mat = rho.matrix
    tensor_form = mat.reshape(2, 2, 2, 2)

    def objective(raw):
        u, v = optimizer.unitaries_from_raw(raw, 2)
        rotated = np.einsum("im,mknl,jn->ikjl", u, tensor_form, u.conj()).reshape(4, 4)
        diff = rotated - mat
        lhs = 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())
        # <Psi| V_B^dag U_A |Psi> on any purification equals Tr((U (x) V^dag) rho)
        overlap = np.einsum("ij,lk,jlik->", u, v.conj(), tensor_form)
        rhs = math.sqrt(max(1.0 - abs(overlap) ** 2, 0.0))
        return lhs - rhs

    return objective


def werner_violation_scan(
    step: float = 0.01,
    cfg: optimizer.OptimizerConfig | None = None,
    bell_label: str = "psi+",
) -> tuple[float | None, list[tuple[float, float]]]:
    """Maximal inequality violation across the Werner family.

    Returns the smallest grid weight with a positive maximum of ``lhs - rhs``
    (None if none violates) plus the per-point maxima.
    """
    cfg = cfg or optimizer.OptimizerConfig(restarts=24, max_iter=60)
    n_grid = round(1.0 / step)
    if abs(n_grid * step - 1.0) > 1e-12:
        raise ValidationError(f"step {step!r} must divide [0, 1] evenly")
    grid = np.linspace(0.0, 1.0, n_grid + 1)
    rows: list[tuple[float, float]] = []
    threshold = None
    carry = None
    for a in grid:
        rho = werner_state(float(a), bell_label)
        objective = violation_objective(rho)
        extra = () if carry is None else (carry,)
        best_x, best, _, _ = optimizer.multistart_maximize(
            objective, lambda rng: optimizer.random_tactic_raw(rng, 2), cfg, extra
        )
        carry = best_x
        rows.append((float(a), float(best)))
        # sqrt(1 - |overlap|^2) loses half the digits where the optimum
        # degenerates to zero, so positivity is called above roundoff scale
        if threshold is None and best > 1e-6:
            threshold = float(a)
    return threshold, rows


@dataclass(frozen=True)
class SAState:
    """Two-qubit strongly anonymous (maximally correlated) state.

    ``rho00 |00><00| + rho01 |00><11| + h.c. + (1 - rho00)|11><11|`` in the
    shared eigenbasis of the phase unitaries that can act on it identically
    from either side.
    """

    rho00: float
    rho01: complex

    def __post_init__(self):
        rho00 = float(self.rho00)
        rho01 = complex(self.rho01)
        if not 0.0 <= rho00 <= 1.0:
            raise ValidationError(f"rho00={rho00!r} outside [0, 1]")
        if abs(rho01) > math.sqrt(rho00 * (1.0 - rho00)) + 1e-12:
            raise ValidationError(
                f"rho01={rho01!r} violates |rho01| <= sqrt(rho00 (1 - rho00))"
            )
        object.__setattr__(self, "rho00", rho00)
        object.__setattr__(self, "rho01", rho01)

    def density(self) -> DensityMatrix:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = self.rho00
        m[0, 3] = self.rho01
        m[3, 0] = np.conj(self.rho01)
        m[3, 3] = 1.0 - self.rho00
        return DensityMatrix((2, 2), m)


def _phase_tactic(phi: float) -> Tactic:
    u = np.diag([1.0, np.exp(1j * phi)])
    return Tactic(u, u, label=f"phase[{phi:g}]")


def sa_pnp2_optimum(s: SAState) -> tuple[float, float]:
    """Maximal one-sided phase disturbance and concurrence of an SA state.

    Both equal ``2 |rho01|``; the disturbance maximum is cross-checked by a
    numeric scan over diagonal-phase unitaries and the concurrence comes from
    the independent spin-flip formula.  Also verifies that the optimal-phase
    tactic achieves the record-then-distinguish value ``(1 + C)/2``.
    """
    rho = s.density()
    analytic = 2.0 * abs(s.rho01)

    def disturbance(phi: float) -> float:
        u = np.diag([1.0, np.exp(1j * phi)])
        ua = tensor(u, np.eye(2))
        return trace_distance(ua @ rho.matrix @ ua.conj().T, rho.matrix)

    coarse = max(np.linspace(0.0, 2.0 * math.pi, 97), key=disturbance)
    res = minimize_scalar(
        lambda phi: -disturbance(phi),
        bounds=(coarse - 0.2, coarse + 0.2),
        method="bounded",
        options={"xatol": 1e-12},
    )
    numeric = -float(res.fun)
    if abs(numeric - analytic) > 1e-9:
        raise ConsistencyError(f"phase-scan maximum {numeric!r} disagrees with {analytic!r}")

    concurrence = measures.concurrence_mixed(rho)
    value = conditioned_game_check("pnp2", rho, _phase_tactic(math.pi)).value
    if abs(value - 0.5 * (1.0 + analytic)) > 1e-9:
        raise ConsistencyError(f"pnp2 value {value!r} misses (1 + C)/2")
    return analytic, concurrence


@dataclass(frozen=True)
class ConditionedGameReport:
    variant: str
    value: float
    constraint_residual: float


_VARIANTS = ("pnp1", "pnp2", "bd1", "bd2")


def conditioned_game_check(variant: str, rho, tactic: Tactic) -> ConditionedGameReport:
    """Evaluate one of the conditioned games.

    ``pnp1``/``bd1`` require a perfect record (the averaged conditional state
    must be orthogonal to the reference), ``pnp2``/``bd2`` require perfect
    non-disturbance (unit real overlap traces).  A tactic that misses its
    constraint beyond 1e-8 raises ``ConstraintError`` with the residual.
    """
    if variant not in _VARIANTS:
        raise ValidationError(f"variant must be one of {_VARIANTS}, got {variant!r}")
    mat = as_matrix(rho)
    if mat.shape != (4, 4):
        raise DimensionError(f"state must be two-qubit, got shape {mat.shape}")
    if tactic.dim != 2:
        raise DimensionError("conditioned games use 2x2 tactics")
    ua = tensor(tactic.u_a, np.eye(2))
    vb = tensor(np.eye(2), tactic.v_b)
    rho_u = ua @ mat @ ua.conj().T
    rho_v = vb @ mat @ vb.conj().T

    if variant == "pnp1":
        residual = abs(trace_distance(mat, 0.5 * (rho_u + rho_v)) - 1.0)
        value = 0.75 + 0.25 * float(np.trace(ua @ mat @ vb.conj().T).real)
    elif variant == "pnp2":
        residual = abs(float(np.trace(ua @ mat @ vb.conj().T).real) - 1.0)
        value = 0.5 * (1.0 + trace_distance(rho_u, mat))
    elif variant == "bd1":
        uv = ua @ vb
        kept = 0.5 * (mat + uv @ mat @ uv.conj().T)
        residual = abs(trace_distance(kept, 0.5 * (rho_u + rho_v)) - 1.0)
        value = 0.5 + 0.25 * float(
            np.trace(ua @ mat @ vb.conj().T).real + np.trace(ua @ mat @ vb).real
        )
    else:  # bd2
        residual = max(
            abs(float(np.trace(ua @ mat @ vb.conj().T).real) - 1.0),
            abs(float(np.trace(ua @ mat @ vb).real) - 1.0),
        )
        value = 0.5 * (1.0 + trace_distance(rho_u, mat))

    if residual > CONSTRAINT_TOL:
        raise ConstraintError(f"tactic violates the {variant} constraint", residual)
    return ConditionedGameReport(variant=variant, value=float(value), constraint_residual=float(residual))
