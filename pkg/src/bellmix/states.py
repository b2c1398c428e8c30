"""Constructors for the named states of the library.

Provides the Bell basis and the associated sigma operator set, the four-party
unlockable bound entangled state (commonly called the Smolin state), the
five-party product state M built from two overlapping copies of it, and the
symmetrized five-copy descriptor M_S which is never materialized densely.

Bell ordering is fixed once: index 0 is the singlet Psi-, then Psi+, Phi+,
Phi-.  The sigma set is kept exactly as {1, Z, XZ, X}; sigma_2 = XZ is the
real antisymmetric matrix [[0, -1], [1, 0]], so sigma_2^2 = -1 while the
other three square to +1.  Every identity the library relies on is insensitive
to these global signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from itertools import combinations

import numpy as np

from .tensor import (
    ABS_TOL,
    DensityOperator,
    LocalOperator,
    PureState,
    QubitId,
    Register,
    kron,
    reorder_register,
)

_S = 1.0 / np.sqrt(2.0)

_BELL_AMPLITUDES = np.array(
    [
        [0.0, _S, -_S, 0.0],  # Psi-
        [0.0, _S, _S, 0.0],  # Psi+
        [_S, 0.0, 0.0, _S],  # Phi+
        [_S, 0.0, 0.0, -_S],  # Phi-
    ],
    dtype=complex,
)

_SIGMA = (
    np.eye(2, dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
    np.array([[0, -1], [1, 0]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
)


class BellIndex(IntEnum):
    """The four Bell states in their fixed order; index 0 is the singlet."""

    PSI_MINUS = 0
    PSI_PLUS = 1
    PHI_PLUS = 2
    PHI_MINUS = 3


class PauliIndex(IntEnum):
    """Indices into the sigma set {1, Z, XZ, X} matching the Bell order."""

    I = 0
    Z = 1
    XZ = 2
    X = 3


def bell_state(i: BellIndex | int, q1: QubitId, q2: QubitId) -> PureState:
    """The i-th Bell state on the two given qubits."""
    if q1 == q2:
        raise ValueError(f"bell_state needs two distinct qubits, got {q1} twice")
    return PureState(Register((q1, q2)), _BELL_AMPLITUDES[BellIndex(i)])


def pauli(i: PauliIndex | int) -> np.ndarray:
    """The literal 2x2 matrix sigma_i as a read-only array.

    The bound form acting on a specific qubit is ``pauli_on``.
    """
    m = _SIGMA[PauliIndex(i)]
    m.setflags(write=False)
    return m


def pauli_on(i: PauliIndex | int, target: QubitId) -> LocalOperator:
    """sigma_i as a LocalOperator on one qubit."""
    return LocalOperator((target,), pauli(i))


@dataclass(frozen=True)
class MixedEnsemble:
    """A probability-weighted list of pure states on a common register."""

    components: tuple[tuple[float, PureState], ...] = field(repr=False)

    def __post_init__(self) -> None:
        comps = tuple((float(p), s) for p, s in self.components)
        if not comps:
            raise ValueError("ensemble needs at least one component")
        reg = comps[0][1].register
        total = 0.0
        for k, (p, s) in enumerate(comps):
            if not 0.0 < p <= 1.0:
                raise ValueError(f"component {k} has probability {p} outside (0, 1]")
            if s.register != reg:
                raise ValueError(
                    f"component {k} register {s.register} differs from {reg}"
                )
            total += p
        if abs(total - 1.0) > ABS_TOL:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        object.__setattr__(self, "components", comps)

    @property
    def register(self) -> Register:
        return self.components[0][1].register

    def to_density(self) -> DensityOperator:
        d = self.register.dim
        m = np.zeros((d, d), dtype=complex)
        for p, s in self.components:
            v = s.amplitudes
            m += p * np.outer(v, v.conj())
        return DensityOperator(self.register, m)


def _q(party: str, slot: int = 0) -> QubitId:
    return QubitId(party, slot)


def smolin_state(p1: str, p2: str, p3: str, p4: str) -> MixedEnsemble:
    """The four-party unlockable bound entangled state.

    An equal mixture over i of |Psi_i> shared by (p1, p2) times |Psi_i>
    shared by (p3, p4).  The dense form does not depend on which pairing is
    chosen and is invariant under every permutation of the four parties.
    """
    parties = (p1, p2, p3, p4)
    if len(set(parties)) != 4:
        raise ValueError(f"smolin_state needs four distinct parties, got {parties}")
    comps = []
    for i in BellIndex:
        s = kron(bell_state(i, _q(p1), _q(p2)), bell_state(i, _q(p3), _q(p4)))
        comps.append((0.25, s))
    return MixedEnsemble(tuple(comps))


M_REGISTER = Register(
    (
        _q("A", 0),
        _q("A", 1),
        _q("B", 0),
        _q("B", 1),
        _q("C", 0),
        _q("C", 1),
        _q("D", 0),
        _q("E", 0),
    )
)

# Slot assignment for the three two-qubit parties of M:
#   A: slot 0 pairs with C, slot 1 pairs with B
#   B: slot 0 pairs with D, slot 1 pairs with A
#   C: slot 0 pairs with A, slot 1 pairs with E
M_PAIRING_1 = ((_q("A", 0), _q("C", 0)), (_q("B", 0), _q("D", 0)))
M_PAIRING_2 = ((_q("A", 1), _q("B", 1)), (_q("C", 1), _q("E", 0)))

# Qubit relabeling that swaps the two four-party factors of M, exchanging
# D with E while twisting the helper slots accordingly.  It is an exact
# symmetry of the dense form.
M_DE_EXCHANGE = {
    _q("A", 0): _q("A", 1),
    _q("A", 1): _q("A", 0),
    _q("B", 0): _q("C", 1),
    _q("C", 1): _q("B", 0),
    _q("B", 1): _q("C", 0),
    _q("C", 0): _q("B", 1),
    _q("D", 0): _q("E", 0),
    _q("E", 0): _q("D", 0),
}


def m_state() -> MixedEnsemble:
    """The five-party state M: two four-party mixtures sharing helpers A, B, C.

    Component (i, j), probability 1/16, puts Bell state i on the pairs
    (A0, C0) and (B0, D0) and Bell state j on (A1, B1) and (C1, E0).  Parties
    A, B, C hold two qubits each and D, E one each, so the party Hilbert
    spaces have sizes 4, 4, 4, 2, 2 and the dense form is 256 x 256 with the
    16 components mutually orthogonal.
    """
    comps = []
    for i in BellIndex:
        for j in BellIndex:
            s = bell_state(i, *M_PAIRING_1[0])
            s = kron(s, bell_state(i, *M_PAIRING_1[1]))
            s = kron(s, bell_state(j, *M_PAIRING_2[0]))
            s = kron(s, bell_state(j, *M_PAIRING_2[1]))
            comps.append((1.0 / 16.0, reorder_register(s, M_REGISTER.qubits)))
    return MixedEnsemble(tuple(comps))


MS_PARTIES = ("A", "B", "C", "D", "E")


@dataclass(frozen=True)
class MsPairPlan:
    """How to serve one target pair from the five-copy descriptor.

    ``copies`` are indices into MsDescriptor.copies: first the copy omitting
    the second target party, then the copy omitting the first.  ``roles``
    maps each canonical role of the two-copy protocol (helpers A, B, C and
    endpoints D, E) to the actual party playing it.
    """

    target: tuple[str, str]
    copies: tuple[int, int]
    roles: dict[str, str]


@dataclass(frozen=True)
class MsDescriptor:
    """The symmetrized five-copy state, one copy omitting each party.

    Kept as a placement list only; the dense twenty-qubit matrix is never
    built.  Every verification goes through ``plan_for_pair``, which selects
    the two copies avoiding a target pair and relabels them into the
    canonical two-copy form.
    """

    copies: tuple[tuple[str, str, str, str], ...]

    def __post_init__(self) -> None:
        expected = {frozenset(MS_PARTIES) - {p} for p in MS_PARTIES}
        got = [frozenset(c) for c in self.copies]
        if len(self.copies) != 5 or set(got) != expected or len(set(got)) != 5:
            raise ValueError(
                "descriptor must hold five copies, one omitting each party"
            )

    def copy_omitting(self, party: str) -> int:
        for k, c in enumerate(self.copies):
            if party not in c:
                return k
        raise ValueError(f"unknown party {party!r}")

    def plan_for_pair(self, target: tuple[str, str]) -> MsPairPlan:
        """Select and relabel the two copies that avoid the target pair."""
        x, y = target
        if x == y or x not in MS_PARTIES or y not in MS_PARTIES:
            raise ValueError(f"target must be two distinct parties, got {target}")
        helpers = sorted(set(MS_PARTIES) - {x, y})
        copies = (self.copy_omitting(y), self.copy_omitting(x))
        roles = dict(zip(("A", "B", "C"), helpers))
        roles["D"] = x
        roles["E"] = y
        # sanity: the selected copies must cover exactly helpers + one endpoint
        if set(self.copies[copies[0]]) != set(helpers) | {x}:
            raise ValueError(f"copy selection failed for target {target}")
        if set(self.copies[copies[1]]) != set(helpers) | {y}:
            raise ValueError(f"copy selection failed for target {target}")
        return MsPairPlan(target=(x, y), copies=copies, roles=roles)


def ms_descriptor() -> MsDescriptor:
    """The canonical five-copy placement list."""
    return MsDescriptor(
        tuple(tuple(c) for c in combinations(MS_PARTIES, 4))  # type: ignore[arg-type]
    )


def fixture(key: str):
    """Resolve a named fixture key to its state object.

    Keys: ``smolin:WXYZ`` (four distinct party letters), ``m``, ``ms``.
    """
    if key == "m":
        return m_state()
    if key == "ms":
        return ms_descriptor()
    if key.startswith("smolin:"):
        parties = key.split(":", 1)[1]
        if len(parties) != 4:
            raise KeyError(f"smolin fixture needs four parties, got {key!r}")
        return smolin_state(*parties)
    raise KeyError(f"unknown fixture {key!r}")
