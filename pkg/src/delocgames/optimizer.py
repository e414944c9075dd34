"""Numerical maximization of win probabilities over local unitaries.

The search is derivative-free local optimization (Powell's direction-set
method) restarted from seeded random points.  Restart streams are keyed by
``(seed, restart index)`` so results are deterministic and the best value
over the first ``n`` restarts is non-decreasing in ``n``.

Parametrizations:

* ``U(2)``: ``exp(i phi) (a0 I + i a1 X + i a2 Y + i a3 Z)`` with the axis
  ``(a0, a1, a2, a3)`` on the unit 3-sphere.  The raw search chart keeps the
  phase plus the unnormalized axis and renormalizes on evaluation.
* ``U(4)``: exponential of a Hermitian generator with 16 real coefficients.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .qcore import ID2, X, Y, Z, DimensionError, ValidationError, as_matrix, tensor

AXIS_NORM_TOL = 1e-12


@dataclass(frozen=True)
class UnitaryParams:
    """Phase plus Pauli-axis weights for a single-qubit unitary."""

    phase: float
    axis: tuple[float, float, float, float]

    def __post_init__(self):
        axis = tuple(float(a) for a in self.axis)
        if len(axis) != 4:
            raise ValidationError(f"axis must have 4 components, got {len(axis)}")
        norm_sq = sum(a * a for a in axis)
        if abs(norm_sq - 1.0) > AXIS_NORM_TOL:
            raise ValidationError(f"axis norm^2 {norm_sq!r} differs from 1 beyond {AXIS_NORM_TOL}")
        object.__setattr__(self, "phase", float(self.phase))
        object.__setattr__(self, "axis", axis)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iter: int = 2000
    tol: float = 1e-9
    seed: int = 0
    dimension: int = 2

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1:
            raise ValidationError("restarts and max_iter must be positive")
        if self.tol <= 0:
            raise ValidationError("tol must be positive")
        if self.dimension not in (2, 4):
            raise ValidationError(f"dimension must be 2 or 4, got {self.dimension}")


@dataclass(frozen=True)
class OptimizationResult:
    best_value: float
    best_tactic: object
    per_restart: np.ndarray
    evaluations: int
    best_raw: np.ndarray | None = None

    def __post_init__(self):
        per = np.asarray(self.per_restart, dtype=float)
        per.setflags(write=False)
        object.__setattr__(self, "per_restart", per)
        if per.size and self.best_value < per.max() - 1e-15:
            raise ValidationError("best_value must not fall below any restart value")


def param_to_unitary(p: UnitaryParams) -> np.ndarray:
    """``exp(i phase)(a0 I + i a1 X + i a2 Y + i a3 Z)``."""
    axis = np.asarray(p.axis, dtype=float)
    norm = float(np.linalg.norm(axis))
    if abs(norm - 1.0) > AXIS_NORM_TOL:
        warnings.warn(f"axis norm {norm!r} differs from 1; normalizing", stacklevel=2)
        axis = axis / norm
    return _su2(axis) * np.exp(1j * p.phase)


def _su2(axis: np.ndarray) -> np.ndarray:
    # a0 I + i a1 X + i a2 Y + i a3 Z, written out entrywise for speed
    a0, a1, a2, a3 = axis
    return np.array(
        [[a0 + 1j * a3, a2 + 1j * a1], [-a2 + 1j * a1, a0 - 1j * a3]], dtype=complex
    )


def _unitary_from_raw_u2(raw: np.ndarray) -> np.ndarray:
    """Search-chart version: raw = (phase, a0..a3), axis normalized silently."""
    axis = raw[1:5]
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        axis = np.array([1.0, 0.0, 0.0, 0.0])
        norm = 1.0
    return _su2(axis / norm) * np.exp(1j * raw[0])


def hermitian_from_coeffs(c: np.ndarray, d: int = 4) -> np.ndarray:
    """Hermitian matrix from its d^2 real coefficients (diagonal, then re/im pairs)."""
    c = np.asarray(c, dtype=float)
    if c.size != d * d:
        raise DimensionError(f"need {d * d} coefficients for a {d}x{d} Hermitian, got {c.size}")
    h = np.zeros((d, d), dtype=complex)
    h[np.diag_indices(d)] = c[:d]
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            h[i, j] = c[k] + 1j * c[k + 1]
            h[j, i] = c[k] - 1j * c[k + 1]
            k += 2
    return h


def expi_hermitian(h: np.ndarray) -> np.ndarray:
    """``exp(i h)`` for Hermitian ``h`` via eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def _unitary_from_raw_u4(raw: np.ndarray) -> np.ndarray:
    return expi_hermitian(hermitian_from_coeffs(raw, 4))


def tactic_params_dim(dimension: int) -> int:
    """Raw chart size for one side's unitary."""
    return 5 if dimension == 2 else 16


def unitaries_from_raw(raw: np.ndarray, dimension: int) -> tuple[np.ndarray, np.ndarray]:
    n = tactic_params_dim(dimension)
    raw = np.asarray(raw, dtype=float)
    if raw.size != 2 * n:
        raise DimensionError(f"expected {2 * n} raw parameters, got {raw.size}")
    build = _unitary_from_raw_u2 if dimension == 2 else _unitary_from_raw_u4
    return build(raw[:n]), build(raw[n:])


def random_tactic_raw(rng: np.random.Generator, dimension: int) -> np.ndarray:
    """Random start: uniform phase and spherical axis for U(2), normal generator for U(4)."""
    if dimension == 2:
        out = np.empty(10)
        for side in range(2):
            axis = rng.standard_normal(4)
            axis /= np.linalg.norm(axis)
            out[side * 5] = rng.uniform(0.0, 2.0 * math.pi)
            out[side * 5 + 1 : side * 5 + 5] = axis
        return out
    return rng.standard_normal(32)


def _restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),)))


def multistart_maximize(
    objective,
    start_sampler,
    cfg: OptimizerConfig,
    extra_starts: tuple = (),
) -> tuple[np.ndarray, float, np.ndarray, int]:
    """Maximize ``objective`` by Powell's method from seeded random starts.

    ``extra_starts`` are deterministic additional start points (used by sweeps
    for warm starting); they do not consume restart indices.
    Returns ``(best_x, best_value, per_restart_values, evaluations)`` where
    ``per_restart_values`` covers only the seeded random restarts.
    """
    evals = 0

    def negated(x):
        nonlocal evals
        evals += 1
        return -objective(x)

    def run(x0):
        res = minimize(
            negated,
            np.asarray(x0, dtype=float),
            method="Powell",
            options={"maxiter": cfg.max_iter, "ftol": cfg.tol, "xtol": 1e-9},
        )
        return res.x, -float(res.fun)

    best_x, best_val = None, -np.inf
    per_restart = np.empty(cfg.restarts)
    for i in range(cfg.restarts):
        x, val = run(start_sampler(_restart_rng(cfg.seed, i)))
        per_restart[i] = val
        if val > best_val:
            best_x, best_val = x, val
    for x0 in extra_starts:
        x, val = run(x0)
        if val > best_val:
            best_x, best_val = x, val
    return best_x, best_val, per_restart, evals


def _embed_with_ancilla(rho: np.ndarray) -> np.ndarray:
    """Adjoin the pure ancilla pair |00> and reorder to (A, A', B, B')."""
    from .qcore import permute_subsystems

    zero = np.zeros((4, 4), dtype=complex)
    zero[0, 0] = 1.0
    full = tensor(rho, zero)  # ordering (A, B, A', B')
    return permute_subsystems(full, (2, 2, 2, 2), (0, 2, 1, 3))


def _game_objective(rho: np.ndarray, game, dimension: int):
    from . import games

    rho_full = rho if dimension == 2 else _embed_with_ancilla(rho)
    if game.kind == "pnp":
        p_particle = game.priors[0]

        def objective(raw):
            u, v = unitaries_from_raw(raw, dimension)
            return games.pnp_value(rho_full, u, v, p_particle)

    else:

        def objective(raw):
            u, v = unitaries_from_raw(raw, dimension)
            return games.bd_value(rho_full, u, v, game.priors[0])

    return objective, rho_full


def _result_tactic(best_x, dimension: int, label: str):
    from .games import Tactic

    u, v = unitaries_from_raw(best_x, dimension)
    return Tactic(u, v, label=label)


def optimize(rho, game, cfg: OptimizerConfig = OptimizerConfig(), extra_starts: tuple = ()) -> OptimizationResult:
    """Maximize the win probability of ``game`` on ``rho`` over local unitaries.

    With ``cfg.dimension == 4`` the players additionally hold the pure ancilla
    pair ``|00>`` and each side's unitary ranges over U(4).
    """
    from . import games

    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise DimensionError(f"resource state must be two-qubit (4x4), got {rho.shape}")
    objective, rho_full = _game_objective(rho, game, cfg.dimension)
    best_x, best_val, per_restart, evals = multistart_maximize(
        objective, lambda rng: random_tactic_raw(rng, cfg.dimension), cfg, extra_starts
    )
    if cfg.dimension == 2 and abs(game.priors[0] - 0.5) < 1e-15:
        bound = games.win_bound(rho, game.kind)
        if best_val > bound + 1e-6:
            raise ValidationError(
                f"optimized value {best_val!r} exceeds the {game.kind} bound {bound!r}"
            )
    best_x = np.array(best_x)
    best_x.setflags(write=False)
    return OptimizationResult(
        best_value=best_val,
        best_tactic=_result_tactic(best_x, cfg.dimension, f"optimized-{game.kind}"),
        per_restart=per_restart,
        evaluations=evals,
        best_raw=best_x,
    )


def _product_state(raw4: np.ndarray) -> np.ndarray:
    """Pure two-qubit product state from two pairs of Bloch angles."""
    th_a, ph_a, th_b, ph_b = raw4
    qa = np.array([math.cos(th_a / 2), np.exp(1j * ph_a) * math.sin(th_a / 2)])
    qb = np.array([math.cos(th_b / 2), np.exp(1j * ph_b) * math.sin(th_b / 2)])
    v = np.kron(qa, qb)
    return np.outer(v, v.conj())


def optimize_separable(game, cfg: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    """Maximize over pure product resource states jointly with local tactics."""
    from . import games

    n_tac = 2 * tactic_params_dim(2)

    if game.kind == "pnp":
        p_particle = game.priors[0]

        def objective(raw):
            rho = _product_state(raw[:4])
            u, v = unitaries_from_raw(raw[4:], 2)
            return games.pnp_value(rho, u, v, p_particle)

    else:

        def objective(raw):
            rho = _product_state(raw[:4])
            u, v = unitaries_from_raw(raw[4:], 2)
            return games.bd_value(rho, u, v, game.priors[0])

    def sampler(rng):
        angles = np.array(
            [
                math.acos(rng.uniform(-1.0, 1.0)),
                rng.uniform(0.0, 2.0 * math.pi),
                math.acos(rng.uniform(-1.0, 1.0)),
                rng.uniform(0.0, 2.0 * math.pi),
            ]
        )
        return np.concatenate([angles, random_tactic_raw(rng, 2)])

    best_x, best_val, per_restart, evals = multistart_maximize(objective, sampler, cfg)
    return OptimizationResult(
        best_value=best_val,
        best_tactic=_result_tactic(best_x[4:], 2, f"optimized-separable-{game.kind}"),
        per_restart=per_restart,
        evaluations=evals,
    )


@dataclass(frozen=True)
class SweepPoint:
    a: float
    p_opt: float
    record_bound: float
    concurrence_bound: float


def werner_sweep(
    kind: str,
    step: float = 0.01,
    cfg: OptimizerConfig = OptimizerConfig(),
    bell_label: str = "psi+",
) -> list[SweepPoint]:
    """Optimized PNP win probability across the Werner family.

    ``kind`` is ``"bare"`` (U(2) tactics) or ``"with_ancilla"`` (players also
    hold the pure pair |00> and optimize over U(4)).  In addition to the
    seeded random restarts, each grid point is warm started from its
    neighbours' optima (one ascending and one descending pass); the grid
    continuity of the optimum makes this reliable without extra restarts.
    """
    from . import games, measures
    from .qcore import werner_state

    if kind not in ("bare", "with_ancilla"):
        raise ValidationError(f"kind must be 'bare' or 'with_ancilla', got {kind!r}")
    n_grid = round(1.0 / step)
    if abs(n_grid * step - 1.0) > 1e-12:
        raise ValidationError(f"step {step!r} must divide [0, 1] evenly")
    grid = np.linspace(0.0, 1.0, n_grid + 1)
    dimension = 2 if kind == "bare" else 4
    cfg = replace(cfg, dimension=dimension)
    game = games.GameSpec.pnp(0.5)

    best_vals = np.full(grid.size, -np.inf)
    best_xs: list = [None] * grid.size
    for direction in (range(grid.size), range(grid.size - 1, -1, -1)):
        carry = None
        for i in direction:
            rho = werner_state(float(grid[i]), bell_label)
            extra = tuple(x for x in (carry, best_xs[i]) if x is not None)
            res = optimize(rho, game, cfg, extra_starts=extra)
            if res.best_value > best_vals[i]:
                best_vals[i] = res.best_value
                best_xs[i] = res.best_raw
            carry = best_xs[i]

    points = []
    for a, p_opt in zip(grid, best_vals):
        rho = werner_state(float(a), bell_label)
        points.append(
            SweepPoint(
                a=float(a),
                p_opt=float(p_opt),
                record_bound=measures.record_bound(rho),
                concurrence_bound=0.75 + measures.concurrence_mixed(rho) / 4.0,
            )
        )
    return points
