"""Two-qubit entanglement measures and bound ingredients.

Concurrence (pure and mixed), entanglement entropy, fully entangled fraction,
the maximal orthogonal-overlap quantity G, Kolmogorov distance, and the
record-quality bound that limits how well a mixed resource can register which
question was asked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import optimizer
from .qcore import (
    DensityMatrix,
    DimensionError,
    PureState,
    ValidationError,
    Y,
    as_matrix,
    herm_eig,
    schmidt,
    tensor,
)

_YY = tensor(Y, Y)

# Columns are the magic basis: phi+, -i phi-, psi-, -i psi+.  Maximally
# entangled two-qubit states are exactly the real unit vectors in this basis.
MAGIC_BASIS = np.array(
    [
        [1, -1j, 0, 0],
        [0, 0, 1, -1j],
        [0, 0, -1, -1j],
        [1, 1j, 0, 0],
    ],
    dtype=complex,
) / math.sqrt(2)


def _require_two_qubit(state, what: str = "state") -> None:
    dims = getattr(state, "dims", None)
    if dims is not None and tuple(dims) != (2, 2):
        raise DimensionError(f"{what} must live on two qubits, got dims {dims}")


@dataclass(frozen=True)
class SpectrumPair:
    """Eigenvalues of a state sorted both ways, zero values included."""

    ascending: np.ndarray
    descending: np.ndarray

    def __post_init__(self):
        asc = np.asarray(self.ascending, dtype=float)
        desc = np.asarray(self.descending, dtype=float)
        if asc.shape != desc.shape:
            raise ValidationError("ascending and descending must have equal length")
        if not np.array_equal(desc, asc[::-1]):
            raise ValidationError("descending must be the reverse of ascending")
        for name, vec in (("ascending", asc), ("descending", desc)):
            if abs(vec.sum() - 1.0) > 1e-10:
                raise ValidationError(f"{name} spectrum must sum to 1")
        asc.setflags(write=False)
        desc.setflags(write=False)
        object.__setattr__(self, "ascending", asc)
        object.__setattr__(self, "descending", desc)


def spectrum_pair(rho) -> SpectrumPair:
    w, _ = herm_eig(as_matrix(rho))
    w = np.clip(w, 0.0, None)
    return SpectrumPair(w, w[::-1])


@dataclass(frozen=True)
class MeasureReport:
    concurrence: float
    entropy: float | None
    fef: float
    g: float | None = None


def concurrence_pure(psi: PureState) -> float:
    """``2 sqrt(lam0 lam1)`` from the Schmidt coefficients."""
    _require_two_qubit(psi)
    lams, _ = schmidt(psi)
    return float(2.0 * math.sqrt(max(lams[0] * lams[1], 0.0)))


def concurrence_mixed(rho) -> float:
    """Spin-flip concurrence ``max(0, sqrt(mu1) - sqrt(mu2) - sqrt(mu3) - sqrt(mu4))``.

    The ``mu_i`` are the descending eigenvalues of ``rho (Y x Y) rho* (Y x Y)``,
    computed from the Hermitian similar product ``sqrt(rho) rho~ sqrt(rho)``
    (same spectrum, but Hermitian solver accuracy); negative roundoff is
    clipped before the square roots.
    """
    _require_two_qubit(rho)
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 state, got {m.shape}")
    flipped = _YY @ m.conj() @ _YY
    w, v = herm_eig(m)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    mu = np.linalg.eigvalsh(root @ flipped @ root)[::-1]
    # eigensolver noise in the null space would be amplified by the square
    # root, so values at roundoff scale count as zero
    mu = np.where(mu > 1e-12, mu, 0.0)
    roots = np.sqrt(mu)
    return float(max(0.0, roots[0] - roots[1] - roots[2] - roots[3]))


def entanglement_entropy(psi: PureState) -> float:
    """Base-2 entropy of the Schmidt coefficients, with ``0 log 0 := 0``."""
    _require_two_qubit(psi)
    lams, _ = schmidt(psi)
    out = 0.0
    for lam in lams:
        if lam > 1e-300:
            out -= lam * math.log2(lam)
    return float(out)


def fully_entangled_fraction(rho) -> tuple[float, PureState]:
    """Maximal overlap with a maximally entangled state, and its maximizer.

    In the magic basis the maximally entangled states are the real unit
    vectors, so the maximum is the top eigenvalue of the real part of the
    state expressed there.
    """
    _require_two_qubit(rho)
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 state, got {m.shape}")
    rho_magic = MAGIC_BASIS.conj().T @ m @ MAGIC_BASIS
    sym = (rho_magic + rho_magic.T).real / 2
    w, v = np.linalg.eigh(sym)
    best = MAGIC_BASIS @ v[:, -1].astype(complex)
    return float(w[-1]), PureState((2, 2), best / np.linalg.norm(best))


def fef_direct(rho, cfg: optimizer.OptimizerConfig | None = None) -> float:
    """Oracle for the fully entangled fraction: search over ``(I x U)|phi+>``."""
    _require_two_qubit(rho)
    m = as_matrix(rho)
    phi_plus = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    cfg = cfg or optimizer.OptimizerConfig(restarts=16, max_iter=400)

    def objective(raw):
        u = optimizer._unitary_from_raw_u2(raw)
        psi = tensor(np.eye(2), u) @ phi_plus
        return float(np.vdot(psi, m @ psi).real)

    def sampler(rng):
        axis = rng.standard_normal(4)
        axis /= np.linalg.norm(axis)
        return np.concatenate([[rng.uniform(0, 2 * math.pi)], axis])

    _, best, _, _ = optimizer.multistart_maximize(objective, sampler, cfg)
    return best


def g_quantity(psi: PureState, cfg: optimizer.OptimizerConfig | None = None) -> float:
    """Numerical maximum of ``|<psi| U_A^dag P_perp V_B |psi>|`` over local unitaries.

    ``P_perp`` projects off ``psi``; the maximum equals the pure-state
    concurrence, which the default search budget recovers to about 1e-6.
    """
    _require_two_qubit(psi)
    v = psi.amplitudes
    p_perp = np.eye(4, dtype=complex) - np.outer(v, v.conj())
    cfg = cfg or optimizer.OptimizerConfig(restarts=16, max_iter=600)

    def objective(raw):
        u, w = optimizer.unitaries_from_raw(raw, 2)
        left = tensor(u, np.eye(2)) @ v
        right = (tensor(np.eye(2), w) @ v)
        return float(abs(np.vdot(left, p_perp @ right)))

    _, best, _, _ = optimizer.multistart_maximize(
        objective, lambda rng: optimizer.random_tactic_raw(rng, 2), cfg
    )
    return best


def kolmogorov(p, q) -> float:
    """Classical trace distance ``(1/2) sum_i |p_i - q_i|``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionError(f"length mismatch {p.shape} vs {q.shape}")
    if np.any(p < -1e-12) or np.any(q < -1e-12):
        raise ValidationError("probability vectors must be nonnegative")
    return float(0.5 * np.abs(p - q).sum())


def record_bound(rho) -> float:
    """``1/2 + 1/2 T_c(lam_up, lam_down)`` over the state's full spectrum."""
    pair = spectrum_pair(rho)
    return 0.5 + 0.5 * kolmogorov(pair.ascending, pair.descending)


def measure_state(state, cfg: optimizer.OptimizerConfig | None = None, with_g: bool = True) -> MeasureReport:
    """Bundle the measures for a state; entropy and G apply to pure states only."""
    if isinstance(state, PureState):
        psi = state
        rho = state.density()
    else:
        rho = state if isinstance(state, DensityMatrix) else DensityMatrix((2, 2), as_matrix(state))
        psi = rho.to_pure() if rho.is_pure() else None
    fef, _ = fully_entangled_fraction(rho)
    if psi is None:
        return MeasureReport(concurrence=concurrence_mixed(rho), entropy=None, fef=fef)
    return MeasureReport(
        concurrence=concurrence_pure(psi),
        entropy=entanglement_entropy(psi),
        fef=fef,
        g=g_quantity(psi, cfg) if with_g else None,
    )
