"""Dense complex linear algebra over registers of labeled qubits.

Basis ordering convention (used everywhere in this package): position 0 of a
register is the most significant bit of a basis-state index.  A register
[q0, q1, ..., q_{n-1}] therefore enumerates basis states |q0 q1 ... q_{n-1}>,
and ``np.kron(a, b)`` places ``a``'s qubits in the high bits.

All types are value-semantic and immutable after construction; every operation
is a pure function returning fresh objects.  States related by a global phase
are treated as equal; comparisons go through ``fidelity_pure`` or inner
products, never componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

ABS_TOL = 1e-9


@dataclass(frozen=True, order=True)
class QubitId:
    """A single labeled qubit: an opaque party label plus a slot number.

    The slot distinguishes multiple qubits held by one party; parties that
    hold a single qubit conventionally use slot 0.
    """

    party: str
    slot: int = 0

    def __post_init__(self) -> None:
        if self.slot < 0:
            raise ValueError(f"slot must be non-negative, got {self.slot}")

    def __str__(self) -> str:
        return f"{self.party}{self.slot}"


@dataclass(frozen=True)
class Register:
    """An ordered collection of distinct QubitIds defining tensor-index order."""

    qubits: tuple[QubitId, ...]

    def __post_init__(self) -> None:
        qs = tuple(self.qubits)
        object.__setattr__(self, "qubits", qs)
        if len(set(qs)) != len(qs):
            raise ValueError(f"duplicate qubits in register: {qs}")

    @property
    def n(self) -> int:
        return len(self.qubits)

    @property
    def dim(self) -> int:
        return 2 ** len(self.qubits)

    def index(self, q: QubitId) -> int:
        try:
            return self.qubits.index(q)
        except ValueError:
            raise ValueError(f"qubit {q} not in register {self}") from None

    def __contains__(self, q: QubitId) -> bool:
        return q in self.qubits

    def __iter__(self):
        return iter(self.qubits)

    def __len__(self) -> int:
        return len(self.qubits)

    def __str__(self) -> str:
        return "[" + " ".join(str(q) for q in self.qubits) + "]"


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PureState:
    """A complex amplitude vector over a register of labeled qubits."""

    register: Register
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.register.dim:
            raise ValueError(
                f"amplitude vector has length {amps.size}, register "
                f"{self.register} needs {self.register.dim}"
            )
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "PureState":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.register, self.amplitudes / n)

    def to_density(self) -> "DensityOperator":
        v = self.amplitudes
        return DensityOperator(self.register, np.outer(v, v.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """A dense Hermitian, trace-1, positive-semidefinite matrix on a register.

    The three invariants are checked at construction time (each within
    ABS_TOL); violating input is rejected rather than repaired.
    """

    register: Register
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        d = self.register.dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match register dim {d}")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > ABS_TOL:
            raise ValueError(f"matrix is not Hermitian (max deviation {herm_err:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > ABS_TOL:
            raise ValueError(f"trace is {tr}, expected 1")
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if lo < -ABS_TOL:
            raise ValueError(f"matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", _freeze(m))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class LocalOperator:
    """A k-qubit operator together with the ordered qubits it acts on."""

    targets: tuple[QubitId, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        ts = tuple(self.targets)
        object.__setattr__(self, "targets", ts)
        if len(set(ts)) != len(ts):
            raise ValueError(f"duplicate targets: {ts}")
        m = np.array(self.matrix, dtype=complex)
        d = 2 ** len(ts)
        if m.shape != (d, d):
            raise ValueError(
                f"matrix shape {m.shape} does not match {len(ts)} target(s)"
            )
        object.__setattr__(self, "matrix", _freeze(m))


# ---------------------------------------------------------------------------
# operations


def kron(a, b):
    """Tensor product of two PureStates or two DensityOperators.

    The result lives on the concatenated register, a's qubits first (and
    therefore in the high bits of basis indices).  Registers must be disjoint.
    """
    overlap = set(a.register.qubits) & set(b.register.qubits)
    if overlap:
        raise ValueError(f"registers overlap on {sorted(str(q) for q in overlap)}")
    reg = Register(a.register.qubits + b.register.qubits)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(reg, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(reg, np.kron(a.matrix, b.matrix))
    raise TypeError(f"kron needs two states of the same kind, got {type(a)} and {type(b)}")


def apply_local(s: PureState, op: LocalOperator) -> PureState:
    """Apply a local operator to the targeted qubits, identity elsewhere."""
    n = s.register.n
    pos = [s.register.index(q) for q in op.targets]
    k = len(pos)
    t = s.amplitudes.reshape((2,) * n)
    opt = op.matrix.reshape((2,) * (2 * k))
    t = np.tensordot(opt, t, axes=(list(range(k, 2 * k)), pos))
    t = np.moveaxis(t, list(range(k)), pos)
    return PureState(s.register, t.reshape(-1))


def _complete_perm(reg: Register, perm: Mapping[QubitId, QubitId]) -> dict:
    full = {}
    for q in reg:
        full[q] = perm.get(q, q)
    for q in perm:
        if q not in reg:
            raise ValueError(f"permutation references {q}, not in register {reg}")
    if set(full.values()) != set(full.keys()):
        raise ValueError("mapping is not a bijection of the register")
    return full


def permute_qubits(x, perm: Mapping[QubitId, QubitId]):
    """Relabel basis indices so the state held by qubit q moves to perm[q].

    ``perm`` may omit fixed points; it must restrict to a bijection of the
    register.  The register itself is unchanged and the spectrum is preserved.
    """
    reg = x.register
    full = _complete_perm(reg, perm)
    n = reg.n
    src = [reg.index(q) for q in full]
    dst = [reg.index(full[q]) for q in full]
    if isinstance(x, PureState):
        t = x.amplitudes.reshape((2,) * n)
        t = np.moveaxis(t, src, dst)
        return PureState(reg, t.reshape(-1))
    if isinstance(x, DensityOperator):
        t = x.matrix.reshape((2,) * (2 * n))
        t = np.moveaxis(t, src + [n + p for p in src], dst + [n + p for p in dst])
        return DensityOperator(reg, t.reshape(reg.dim, reg.dim))
    raise TypeError(f"cannot permute {type(x)}")


def reorder_register(x, new_order: Sequence[QubitId]):
    """Rewrite the same physical state with its register listed in a new order.

    Unlike ``permute_qubits`` this does not move any qubit's state; it only
    changes which axis of the amplitude tensor belongs to which qubit, so the
    result represents the identical state on a reordered register.
    """
    reg = x.register
    new_order = tuple(new_order)
    if set(new_order) != set(reg.qubits) or len(new_order) != reg.n:
        raise ValueError(f"new order {new_order} is not a reordering of {reg}")
    if new_order == reg.qubits:
        return x
    axes = [reg.index(q) for q in new_order]
    new_reg = Register(new_order)
    n = reg.n
    if isinstance(x, PureState):
        t = x.amplitudes.reshape((2,) * n)
        return PureState(new_reg, np.transpose(t, axes).reshape(-1))
    if isinstance(x, DensityOperator):
        t = x.matrix.reshape((2,) * (2 * n))
        t = np.transpose(t, axes + [n + p for p in axes])
        return DensityOperator(new_reg, t.reshape(new_reg.dim, new_reg.dim))
    raise TypeError(f"cannot reorder {type(x)}")


def partial_trace(rho: DensityOperator, keep: Iterable[QubitId]) -> DensityOperator:
    """Trace out everything but ``keep``; result keeps the original relative order."""
    reg = rho.register
    keep_set = set(keep)
    if not keep_set:
        raise ValueError("keep set must be non-empty")
    for q in keep_set:
        if q not in reg:
            raise ValueError(f"qubit {q} not in register {reg}")
    n = reg.n
    keep_pos = [p for p in range(n) if reg.qubits[p] in keep_set]
    kept = set(keep_pos)
    t = rho.matrix.reshape((2,) * (2 * n))
    row = list(range(n))
    col = [n + p if p in kept else p for p in range(n)]
    out = keep_pos + [n + p for p in keep_pos]
    reduced = np.einsum(t, row + col, out)
    sub = Register(tuple(reg.qubits[p] for p in keep_pos))
    return DensityOperator(sub, reduced.reshape(sub.dim, sub.dim))


def partial_transpose(rho: DensityOperator, part: Iterable[QubitId]) -> np.ndarray:
    """Transpose the indices of ``part``; returns a plain matrix.

    The result is Hermitian with the same trace but need not be positive,
    so it is returned as an ndarray rather than a DensityOperator.  Applying
    the same partial transpose twice returns the input exactly.
    """
    reg = rho.register
    part = list(part)
    for q in part:
        if q not in reg:
            raise ValueError(f"qubit {q} not in register {reg}")
    n = reg.n
    t = rho.matrix.reshape((2,) * (2 * n))
    for q in part:
        p = reg.index(q)
        t = np.swapaxes(t, p, n + p)
    return np.array(t.reshape(reg.dim, reg.dim))


def eig_hermitian(m) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    Accepts an ndarray or a DensityOperator.  Input within ABS_TOL of
    Hermitian is symmetrized as (m + m^dagger)/2 before solving; anything
    further from Hermitian is rejected.  The LAPACK solver behind
    ``np.linalg.eigvalsh`` is deterministic for a fixed input matrix.
    """
    if isinstance(m, DensityOperator):
        m = m.matrix
    m = np.asarray(m, dtype=complex)
    herm_err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if herm_err > ABS_TOL:
        raise ValueError(f"matrix is not Hermitian (max deviation {herm_err:.3e})")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def _aligned_target(rho_register: Register, target: PureState) -> np.ndarray:
    if target.register.qubits == rho_register.qubits:
        return target.amplitudes
    if set(target.register.qubits) != set(rho_register.qubits):
        raise ValueError(
            f"register mismatch: state on {rho_register}, target on {target.register}"
        )
    # same qubits, different order: permute the target into rho's axis order
    n = target.register.n
    t = target.amplitudes.reshape((2,) * n)
    dst = [rho_register.index(q) for q in target.register.qubits]
    t = np.moveaxis(t, list(range(n)), dst)
    return t.reshape(-1)


def fidelity_pure(rho, target: PureState) -> float:
    """Overlap <target| rho |target> with a pure target state.

    ``rho`` may be a PureState, a DensityOperator, or any ensemble object
    exposing ``components`` as (probability, PureState) pairs.  Registers
    must contain the same qubits; order differences are aligned internally.
    """
    if isinstance(rho, PureState):
        v = _aligned_target(rho.register, target)
        return float(abs(np.vdot(v, rho.amplitudes)) ** 2)
    if isinstance(rho, DensityOperator):
        v = _aligned_target(rho.register, target)
        return float(np.real(v.conj() @ rho.matrix @ v))
    comps = getattr(rho, "components", None)
    if comps is not None:
        return float(sum(p * fidelity_pure(s, target) for p, s in comps))
    raise TypeError(f"cannot compute fidelity against {type(rho)}")
