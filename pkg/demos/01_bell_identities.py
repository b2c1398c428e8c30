"""Walk through the Bell basis and the sigma operators that generate it.

Run:  python demos/01_bell_identities.py
"""

import numpy as np

from bellmix import (
    BellIndex,
    QubitId,
    apply_local,
    bell_state,
    fidelity_pure,
    pauli,
    pauli_on,
)

qa, qb = QubitId("a"), QubitId("b")

print("The four Bell states on qubits (a, b), in the library's fixed order:")
for i in BellIndex:
    amps = bell_state(i, qa, qb).amplitudes
    row = "  ".join(f"{z.real:+.4f}" for z in amps)
    print(f"  {i.name:<9} [{row}]")

print()
print("The sigma set {1, Z, XZ, X}.  Note sigma_2 squares to minus one:")
for i in range(4):
    m = pauli(i)
    sq = m @ m
    print(f"  sigma_{i} = {m.real.astype(int).tolist()}   square: {sq.real.astype(int).tolist()}")

print()
print("Acting with sigma_i on either half of the singlet reaches Bell state i.")
print("Signs are absorbed into a global phase, so we compare by fidelity:")
singlet = bell_state(BellIndex.PSI_MINUS, qa, qb)
for i in BellIndex:
    via_b = apply_local(singlet, pauli_on(i, qb))
    via_a = apply_local(singlet, pauli_on(i, qa))
    fb = fidelity_pure(via_b, bell_state(i, qa, qb))
    fa = fidelity_pure(via_a, bell_state(i, qa, qb))
    print(f"  i={int(i)}:  (1 x sigma_i) fidelity {fb:.12f}   (sigma_i x 1) fidelity {fa:.12f}")

print()
print("Because of this, one uniformly random Bell pair looks the same no matter")
print("which side a sigma is applied to; that fact powers everything that follows.")
