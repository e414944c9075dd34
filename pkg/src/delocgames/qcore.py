"""Dense complex linear algebra and small quantum-state primitives.

Conventions used throughout the package:

* Subsystem ordering is big-endian: the first entry of ``dims`` is the most
  significant index.  Alice's side comes before Bob's side, and on each side
  the system qubit comes before any ancilla qubit.
* Bell states: ``phi+/- = (|00> +/- |11>)/sqrt(2)``,
  ``psi+/- = (|01> +/- |10>)/sqrt(2)``.
* States validate their invariants on construction and are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-10
UNITARITY_TOL = 1e-9
EIG_ZERO_TOL = 1e-12


class ValidationError(ValueError):
    """An input violates a documented precondition or invariant."""


class DimensionError(ValidationError):
    """Subsystem dimensions are inconsistent or out of range."""


class ConsistencyError(RuntimeError):
    """Two redundant computation routes disagree beyond tolerance."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


ID2 = _frozen(np.eye(2, dtype=complex))
X = _frozen(np.array([[0, 1], [1, 0]], dtype=complex))
Y = _frozen(np.array([[0, -1j], [1j, 0]], dtype=complex))
Z = _frozen(np.array([[1, 0], [0, -1]], dtype=complex))

BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")

_BELL_VECTORS = {
    "phi+": _frozen(np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)),
    "phi-": _frozen(np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2)),
    "psi+": _frozen(np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)),
    "psi-": _frozen(np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)),
}


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product with big-endian ordering (first factor most significant)."""
    if not ops:
        raise ValidationError("tensor() needs at least one factor")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(m: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


@dataclass(frozen=True)
class PureState:
    """A normalized complex vector together with its subsystem dimensions."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if any(d < 1 for d in dims):
            raise DimensionError(f"invalid subsystem dims {dims}")
        if math.prod(dims) != amps.size:
            raise DimensionError(
                f"dims {dims} imply length {math.prod(dims)}, got {amps.size}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes must be finite")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValidationError(f"squared norm {norm_sq!r} differs from 1 beyond {NORM_TOL}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        amps = self.amplitudes
        return DensityMatrix(self.dims, np.outer(amps, amps.conj()))

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semi-definite, unit-trace matrix with subsystem dims."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        mat = np.asarray(self.matrix, dtype=complex)
        d = math.prod(dims)
        if mat.shape != (d, d):
            raise DimensionError(f"dims {dims} imply shape {(d, d)}, got {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValidationError("matrix entries must be finite")
        if not is_hermitian(mat):
            raise ValidationError("matrix is not Hermitian within tolerance")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace {tr!r} differs from 1 beyond {TRACE_TOL}")
        w = np.linalg.eigvalsh((mat + mat.conj().T) / 2)
        if w[0] < -PSD_TOL:
            raise ValidationError(f"negative eigenvalue {w[0]!r} below -{PSD_TOL}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", _frozen(mat))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        m = self.matrix
        return float(np.trace(m @ m).real)

    def is_pure(self, tol: float = 1e-10) -> bool:
        return self.purity() > 1.0 - tol

    def to_pure(self, tol: float = 1e-8) -> PureState:
        """Extract the state vector of a rank-one density matrix."""
        w, v = herm_eig(self.matrix)
        if w[-1] < 1.0 - tol:
            raise ValidationError(f"state is mixed (largest eigenvalue {w[-1]!r})")
        return PureState(self.dims, v[:, -1] / np.linalg.norm(v[:, -1]))


def as_matrix(state) -> np.ndarray:
    """Coerce a DensityMatrix, PureState, or plain array to a square ndarray."""
    if isinstance(state, DensityMatrix):
        return np.asarray(state.matrix)
    if isinstance(state, PureState):
        amps = state.amplitudes
        return np.outer(amps, amps.conj())
    m = np.asarray(state, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def herm_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input must be Hermitian within ``HERMITICITY_TOL``; it is symmetrized
    as ``(m + m^dag)/2`` before decomposition so roundoff never leaks into the
    eigenvectors.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        raise ValidationError("matrix is not Hermitian within tolerance")
    return np.linalg.eigh((m + m.conj().T) / 2)


def positive_eig_sum(h: np.ndarray) -> float:
    """Sum of the strictly positive eigenvalues of a Hermitian matrix.

    Eigenvalues in ``[-EIG_ZERO_TOL, EIG_ZERO_TOL]`` count as zero.
    """
    w, _ = herm_eig(h)
    return float(w[w > EIG_ZERO_TOL].sum())


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``.

    Accepts subnormalized Hermitian operators as well as density matrices, so
    it can be applied directly to post-selected conditional operators.
    """
    a = as_matrix(rho)
    b = as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    w, _ = herm_eig(a - b)
    return float(0.5 * np.abs(w).sum())


def partial_trace_array(mat: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace of a square array over the subsystems not in ``keep``."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = tuple(sorted(set(int(k) for k in keep)))
    if not keep:
        raise DimensionError("keep must be nonempty")
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")
    mat = np.asarray(mat, dtype=complex)
    d = math.prod(dims)
    if mat.shape != (d, d):
        raise DimensionError(f"dims {dims} imply shape {(d, d)}, got {mat.shape}")
    traced = [i for i in range(n) if i not in keep]
    t = mat.reshape(dims + dims)
    # contract each traced subsystem's row index with its column index
    for offset, i in enumerate(traced):
        row = i - offset
        col = row + (n - offset)
        t = np.trace(t, axis1=row, axis2=col)
    d_keep = math.prod(dims[k] for k in keep)
    return t.reshape(d_keep, d_keep)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state of ``rho`` on the subsystems listed in ``keep``."""
    keep = tuple(sorted(set(int(k) for k in keep)))
    reduced = partial_trace_array(rho.matrix, rho.dims, keep)
    return DensityMatrix(tuple(rho.dims[k] for k in keep), reduced)


def permute_subsystems(mat: np.ndarray, dims, order) -> np.ndarray:
    """Reorder the tensor factors of a square array according to ``order``."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    order = tuple(int(o) for o in order)
    if sorted(order) != list(range(n)):
        raise DimensionError(f"order {order} is not a permutation of {n} subsystems")
    mat = np.asarray(mat, dtype=complex)
    t = mat.reshape(dims + dims)
    t = t.transpose(order + tuple(n + o for o in order))
    d = math.prod(dims)
    return t.reshape(d, d)


def schmidt(psi: PureState) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray]]:
    """Schmidt decomposition of a two-qubit pure state.

    Returns the Schmidt coefficients ``(lam0, lam1)`` with ``lam0 >= lam1``
    and the pair of 2x2 local basis unitaries ``(A, B)`` such that
    ``psi = sum_k sqrt(lam_k) A[:, k] (x) B[:, k]``.
    """
    if psi.dims != (2, 2):
        raise DimensionError(f"schmidt decomposition needs dims (2, 2), got {psi.dims}")
    m = psi.amplitudes.reshape(2, 2)
    u, s, vh = np.linalg.svd(m)
    lams = s**2
    return lams, (u, vh.T)


def random_pure_state(rng: np.random.Generator, dims=(2, 2)) -> PureState:
    """Haar-random pure state on the given subsystem dimensions."""
    dims = tuple(int(d) for d in dims)
    d = math.prod(dims)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(dims, v / np.linalg.norm(v))


def random_density_matrix(rng: np.random.Generator, dims=(2, 2), rank: int | None = None) -> DensityMatrix:
    """Random full-rank (or fixed-rank) density matrix via a Ginibre factor."""
    dims = tuple(int(d) for d in dims)
    d = math.prod(dims)
    k = d if rank is None else int(rank)
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityMatrix(dims, m / np.trace(m).real)


def random_unitary(rng: np.random.Generator, d: int = 2) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def bell_state(label: str) -> PureState:
    if label not in _BELL_VECTORS:
        raise ValidationError(f"unknown Bell label {label!r}; expected one of {BELL_LABELS}")
    return PureState((2, 2), _BELL_VECTORS[label])


def werner_state(a: float, k: str = "psi+") -> DensityMatrix:
    """``a |psi^k><psi^k| + (1 - a)/4 * identity`` for a Bell label ``k``."""
    a = float(a)
    if not 0.0 <= a <= 1.0:
        raise ValidationError(f"parameter a={a!r} outside [0, 1]")
    proj = as_matrix(bell_state(k))
    return DensityMatrix((2, 2), a * proj + (1.0 - a) / 4.0 * np.eye(4))


def schmidt_state(r: float) -> PureState:
    """``sqrt(r)|00> + sqrt(1-r)|11>``."""
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise ValidationError(f"parameter r={r!r} outside [0, 1]")
    v = np.zeros(4, dtype=complex)
    v[0] = math.sqrt(r)
    v[3] = math.sqrt(1.0 - r)
    return PureState((2, 2), v)


def two_bell_mixture_state(a: float) -> DensityMatrix:
    """``a |psi+><psi+| + (1 - a) |psi-><psi-|``."""
    a = float(a)
    if not 0.0 <= a <= 1.0:
        raise ValidationError(f"parameter a={a!r} outside [0, 1]")
    m = a * as_matrix(bell_state("psi+")) + (1.0 - a) * as_matrix(bell_state("psi-"))
    return DensityMatrix((2, 2), m)


def bell_diagonal_state(p1: float, p2: float, p3: float, p4: float) -> DensityMatrix:
    """Mixture of the four Bell states with weights ordered as ``BELL_LABELS``."""
    weights = np.array([p1, p2, p3, p4], dtype=float)
    if np.any(weights < -1e-12):
        raise ValidationError(f"weights {weights.tolist()} must be nonnegative")
    if abs(weights.sum() - 1.0) > 1e-10:
        raise ValidationError(f"weights {weights.tolist()} must sum to 1")
    m = sum(w * as_matrix(bell_state(lbl)) for w, lbl in zip(weights, BELL_LABELS))
    return DensityMatrix((2, 2), m)


def sa_state(rho00: float, rho01: complex) -> DensityMatrix:
    """Strongly anonymous (maximally correlated) two-qubit state.

    ``rho00 |00><00| + rho01 |00><11| + conj(rho01) |11><00| + (1-rho00)|11><11|``
    with positivity requiring ``|rho01| <= sqrt(rho00 (1 - rho00))``.
    """
    rho00 = float(rho00)
    rho01 = complex(rho01)
    if not 0.0 <= rho00 <= 1.0:
        raise ValidationError(f"parameter rho00={rho00!r} outside [0, 1]")
    if abs(rho01) > math.sqrt(rho00 * (1.0 - rho00)) + 1e-12:
        raise ValidationError(
            f"parameter rho01={rho01!r} violates |rho01| <= sqrt(rho00(1-rho00))"
        )
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = rho00
    m[0, 3] = rho01
    m[3, 0] = np.conj(rho01)
    m[3, 3] = 1.0 - rho00
    return DensityMatrix((2, 2), m)


def basis_state(bits: str) -> PureState:
    """Computational basis state on qubits, e.g. ``"00"``."""
    if not bits or any(b not in "01" for b in bits):
        raise ValidationError(f"bits {bits!r} must be a nonempty string of 0s and 1s")
    idx = int(bits, 2)
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[idx] = 1.0
    return PureState((2,) * len(bits), v)


def named_state(name: str, params: dict | None = None):
    """Constructor registry behind the ``name:params`` state syntax."""
    params = dict(params or {})
    builders = {
        "bell": lambda: bell_state(str(params.pop("k"))),
        "werner": lambda: werner_state(
            float(params.pop("a")), str(params.pop("k", "psi+"))
        ),
        "schmidt": lambda: schmidt_state(float(params.pop("r"))),
        "two_bell_mixture": lambda: two_bell_mixture_state(float(params.pop("a"))),
        "bell_diagonal": lambda: bell_diagonal_state(
            float(params.pop("p1")),
            float(params.pop("p2")),
            float(params.pop("p3")),
            float(params.pop("p4")),
        ),
        "sa": lambda: sa_state(
            float(params.pop("rho00")),
            complex(float(params.pop("rho01_re")), float(params.pop("rho01_im", 0.0))),
        ),
        "basis": lambda: basis_state(str(params.pop("bits"))),
        "maximally_mixed": lambda: werner_state(0.0),
    }
    if name not in builders:
        raise ValidationError(f"unknown state name {name!r}; expected one of {sorted(builders)}")
    try:
        state = builders[name]()
    except KeyError as exc:
        raise ValidationError(f"state {name!r} is missing parameter {exc.args[0]!r}") from None
    if params:
        raise ValidationError(f"state {name!r} got unexpected parameters {sorted(params)}")
    return state
