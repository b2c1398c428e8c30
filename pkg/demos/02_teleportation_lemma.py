"""Teleportation through the right resource, then through the wrong one.

The point of the second half: if the shared pair is Bell state i rather
than the singlet, the standard protocol still runs, and every branch
delivers sigma_i applied to the input.  The error is a known unitary,
not noise.

Run:  python demos/02_teleportation_lemma.py
"""

import numpy as np

from bellmix import (
    BellIndex,
    PureState,
    QubitId,
    Register,
    apply_local,
    fidelity_pure,
    pauli_on,
    run,
    teleport_script,
)

rng = np.random.default_rng(42)
v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
psi = PureState(Register((QubitId("s", 0),)), v).normalized()
print("Random input state on the sender's qubit s0:")
print("  ", np.array2string(psi.amplitudes, precision=4))

print()
print("Teleporting through the singlet.  Four outcomes, each probability 1/4,")
print("and after the sigma_m correction every branch carries the input exactly:")
target = PureState(Register((QubitId("r", 0),)), psi.amplitudes)
for b in run(teleport_script(psi, BellIndex.PSI_MINUS, "s", "r")):
    fid = fidelity_pure(b.final_state, target)
    print(f"  outcome m={int(b.outcomes['m'])}  p={b.probability:.4f}  fidelity with input = {fid:.12f}")

print()
print("Now the same protocol with each wrong resource pair:")
q_out = QubitId("r", 0)
for r in BellIndex:
    predicted = apply_local(target, pauli_on(r, q_out))
    worst = min(
        fidelity_pure(b.final_state, predicted)
        for b in run(teleport_script(psi, r, "s", "r"))
    )
    print(f"  resource {r.name:<9} worst branch fidelity with sigma_{int(r)}|psi> = {worst:.12f}")

print()
print("A party who later learns i can undo sigma_i locally.  Teleporting through")
print("an unknown Bell pair therefore moves entanglement without destroying it.")
