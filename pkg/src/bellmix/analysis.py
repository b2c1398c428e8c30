"""Cut analysis and claim verification.

Computes partial-transpose spectra across bipartitions of a register, checks
explicit separable decompositions by reconstruction, and reports party
permutation symmetries.  Deciding separability in general is intractable, so
the module never searches for certificates; it only verifies decompositions
handed to it, which for the states of this library can be read off their
construction and transported by symmetry.

A negative partial-transpose minimum eigenvalue (below -tol) certifies
entanglement across a cut; a positive one is a necessary condition for
separability only, and reports distinguish the two accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .states import BellIndex, bell_state, smolin_state
from .tensor import (
    ABS_TOL,
    DensityOperator,
    QubitId,
    Register,
    eig_hermitian,
    kron,
    partial_transpose,
    permute_qubits,
    reorder_register,
)

CERT_TOL = 1e-9

PPT = "PPT"
NPT = "NPT"


class CertificateError(ValueError):
    """Raised when a separable decomposition is malformed."""


@dataclass(frozen=True)
class Bipartition:
    """A two-sided split of a register into disjoint, exhaustive sides."""

    side_a: tuple[QubitId, ...]
    side_b: tuple[QubitId, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "side_a", tuple(self.side_a))
        object.__setattr__(self, "side_b", tuple(self.side_b))
        if not self.side_a or not self.side_b:
            raise ValueError("both sides of a bipartition must be non-empty")
        if set(self.side_a) & set(self.side_b):
            raise ValueError("bipartition sides overlap")

    @classmethod
    def of(cls, register: Register, side_a: Iterable[QubitId]) -> "Bipartition":
        """Build a cut from one side; the other side is the complement."""
        a = tuple(side_a)
        a_set = set(a)
        b = tuple(q for q in register if q not in a_set)
        return cls(a, b)

    def check_against(self, register: Register) -> None:
        if set(self.side_a) | set(self.side_b) != set(register.qubits):
            raise ValueError(f"cut does not partition register {register}")


def cut_label(cut: Bipartition, register: Register) -> str:
    """Canonical text label for a cut, e.g. ``AB:CD``.

    Slot numbers are shown only for parties holding more than one qubit in
    the register, so four single-qubit parties read naturally.
    """
    counts: dict[str, int] = {}
    for q in register:
        counts[q.party] = counts.get(q.party, 0) + 1

    def side(qs: tuple[QubitId, ...]) -> str:
        return "".join(
            q.party if counts.get(q.party, 0) == 1 else str(q) for q in sorted(qs)
        )

    return f"{side(cut.side_a)}:{side(cut.side_b)}"


@dataclass(frozen=True)
class SeparableDecomposition:
    """An explicit mixture of products across a cut: sum_k p_k A_k x B_k."""

    terms: tuple[tuple[float, DensityOperator, DensityOperator], ...]

    def __post_init__(self) -> None:
        terms = tuple((float(p), fa, fb) for p, fa, fb in self.terms)
        if not terms:
            raise CertificateError("decomposition has no terms")
        total = 0.0
        for k, (p, _, _) in enumerate(terms):
            if not 0.0 < p <= 1.0:
                raise CertificateError(f"term {k}: probability {p} outside (0, 1]")
            total += p
        if abs(total - 1.0) > ABS_TOL:
            raise CertificateError(f"probabilities sum to {total}, expected 1")
        object.__setattr__(self, "terms", terms)


@dataclass(frozen=True)
class CutReport:
    """PPT spectrum summary for one cut, with an optional verified certificate."""

    label: str
    bipartition: Bipartition
    min_ppt_eigenvalue: float
    ppt_verdict: str
    certificate: Optional[SeparableDecomposition] = None
    reconstruction_error: Optional[float] = None


def ppt_check(
    rho: DensityOperator, cut: Bipartition, tol: float = ABS_TOL
) -> tuple[float, str]:
    """Minimum eigenvalue of the partial transpose over side_a, with verdict.

    NPT means the minimum lies below -tol; anything at or above that is
    reported PPT with the raw value preserved.  The verdict does not depend
    on which side is transposed.
    """
    cut.check_against(rho.register)
    spectrum = eig_hermitian(partial_transpose(rho, cut.side_a))
    lo = float(spectrum[0])
    return lo, (NPT if lo < -tol else PPT)


def verify_certificate(
    rho: DensityOperator, cut: Bipartition, cert: SeparableDecomposition
) -> float:
    """Frobenius distance between rho and the decomposition's reconstruction.

    Factor registers must match the cut sides exactly (same qubits, same
    order); the reconstruction is aligned to rho's register before comparing.
    Success means the returned error is below CERT_TOL.
    """
    cut.check_against(rho.register)
    recon = np.zeros((rho.register.dim, rho.register.dim), dtype=complex)
    for k, (p, fa, fb) in enumerate(cert.terms):
        if fa.register.qubits != cut.side_a:
            raise CertificateError(
                f"term {k}: factor register {fa.register} does not match side {cut.side_a}"
            )
        if fb.register.qubits != cut.side_b:
            raise CertificateError(
                f"term {k}: factor register {fb.register} does not match side {cut.side_b}"
            )
        recon += p * np.kron(fa.matrix, fb.matrix)
    prod_reg = Register(cut.side_a + cut.side_b)
    want = reorder_register(rho, prod_reg.qubits)
    return float(np.linalg.norm(recon - want.matrix))


@dataclass(frozen=True)
class SymmetryReport:
    """Frobenius distances to each party-permuted image of a state."""

    entries: tuple[tuple[dict, float], ...]
    max_distance: float


def symmetry_report(
    rho: DensityOperator, party_groups: Sequence[Sequence[str]]
) -> SymmetryReport:
    """Distance of rho to its image under every whole-party permutation.

    ``party_groups`` lists groups of interchangeable parties; the report
    covers the product of all permutations within each group, moving every
    slot of a party together.
    """
    reg = rho.register
    entries = []
    group_perms = [list(permutations(g)) for g in party_groups]
    for combo in product(*group_perms):
        mapping: dict[str, str] = {}
        for g, permuted in zip(party_groups, combo):
            mapping.update(dict(zip(g, permuted)))
        qubit_map = {
            q: QubitId(mapping[q.party], q.slot) for q in reg if q.party in mapping
        }
        image = permute_qubits(rho, qubit_map)
        dist = float(np.linalg.norm(image.matrix - rho.matrix))
        entries.append((dict(mapping), dist))
    top = max(d for _, d in entries) if entries else 0.0
    return SymmetryReport(entries=tuple(entries), max_distance=top)


def qubit_map_distance(rho: DensityOperator, mapping: Mapping[QubitId, QubitId]) -> float:
    """Frobenius distance of rho to its image under a qubit relabeling.

    Covers symmetries that move slots between parties, which whole-party
    permutations cannot express.
    """
    image = permute_qubits(rho, mapping)
    return float(np.linalg.norm(image.matrix - rho.matrix))


def cut_survey(
    rho: DensityOperator,
    cuts: Iterable[Bipartition],
    certificates: Optional[Mapping[str, SeparableDecomposition]] = None,
    tol: float = ABS_TOL,
) -> list[CutReport]:
    """PPT spectra for each cut, verifying registered certificates.

    ``certificates`` maps cut labels (as produced by ``cut_label``) to
    decompositions.  A verified certificate on an NPT-verdict cut would be
    contradictory and raises CertificateError.  Reports come back sorted by
    label regardless of input order.
    """
    certificates = dict(certificates or {})
    reports = []
    for cut in cuts:
        label = cut_label(cut, rho.register)
        lo, verdict = ppt_check(rho, cut, tol=tol)
        cert = certificates.get(label)
        err = None
        if cert is not None:
            err = verify_certificate(rho, cut, cert)
            if err < CERT_TOL and verdict == NPT:
                raise CertificateError(
                    f"cut {label}: verified certificate on an NPT cut "
                    f"(min eigenvalue {lo:.3e})"
                )
        reports.append(
            CutReport(
                label=label,
                bipartition=cut,
                min_ppt_eigenvalue=lo,
                ppt_verdict=verdict,
                certificate=cert,
                reconstruction_error=err,
            )
        )
    reports.sort(key=lambda r: r.label)
    return reports


# ---------------------------------------------------------------------------
# certificate builders (constructed, never searched)

def smolin_cut_certificate(
    parties: Sequence[str], cut: Bipartition
) -> SeparableDecomposition:
    """The four-term Bell-projector decomposition across any 2:2 party cut.

    The four-party state is an equal mixture of Bell-pair products in every
    2:2 pairing (the dense form does not depend on the pairing), so for each
    such cut the mixture itself is the certificate.
    """
    if len(cut.side_a) != 2 or len(cut.side_b) != 2:
        raise CertificateError("the Bell-projector certificate needs a 2:2 cut")
    if {q.party for q in cut.side_a} | {q.party for q in cut.side_b} != set(parties):
        raise CertificateError(f"cut does not cover parties {tuple(parties)}")
    terms = []
    for i in BellIndex:
        fa = bell_state(i, cut.side_a[0], cut.side_a[1]).to_density()
        fb = bell_state(i, cut.side_b[0], cut.side_b[1]).to_density()
        terms.append((0.25, fa, fb))
    return SeparableDecomposition(tuple(terms))


def product_certificate(
    rho_a: DensityOperator, rho_b: DensityOperator
) -> SeparableDecomposition:
    """The one-term certificate of a literal tensor product."""
    return SeparableDecomposition(((1.0, rho_a, rho_b),))


def disconnected_fixture() -> tuple[DensityOperator, Bipartition, SeparableDecomposition]:
    """Two four-party mixtures on disjoint party sets, as one eight-party state.

    No protocol can distill across the cut separating the two sets, and the
    cut carries the trivial product certificate.
    """
    left = smolin_state("A", "B", "C", "D").to_density()
    right = smolin_state("E", "F", "G", "H").to_density()
    whole = kron(left, right)
    cut = Bipartition(left.register.qubits, right.register.qubits)
    return whole, cut, product_certificate(left, right)
