"""Acceptance gate: the library's headline claims, one test per claim.

Each test prints a single [PASS] or [FAIL] line (visible under ``pytest -s``)
and then asserts, so the suite doubles as a readable checklist.  Tolerances
are fixed here rather than configurable; these are the values the library
promises by default.
"""

from itertools import combinations

import numpy as np

from bellmix.analysis import (
    NPT,
    PPT,
    Bipartition,
    disconnected_fixture,
    ppt_check,
    smolin_cut_certificate,
    symmetry_report,
    verify_certificate,
)
from bellmix.locc import (
    LoccScript,
    run,
    superactivation_for_pair,
    superactivation_script,
    teleport_script,
    unlock_script,
)
from bellmix.states import (
    MS_PARTIES,
    BellIndex,
    MixedEnsemble,
    bell_state,
    ms_descriptor,
    pauli_on,
    smolin_state,
)
from bellmix.tensor import (
    DensityOperator,
    PureState,
    QubitId,
    Register,
    apply_local,
    fidelity_pure,
    kron,
    partial_transpose,
    reorder_register,
)

TOL = 1e-9


def _report(line: str, failures: list) -> None:
    status = "PASS" if not failures else "FAIL"
    print(f"[{status}] {line}")
    assert not failures, "; ".join(str(f) for f in failures[:5])


def _random_qubit(rng, q):
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return PureState(Register((q,)), v / np.linalg.norm(v))


def _random_density(rng, n_qubits, label="r"):
    d = 2**n_qubits
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    m /= np.trace(m)
    return DensityOperator(Register(tuple(QubitId(label, k) for k in range(n_qubits))), m)


def _weighted(branches):
    acc = 0
    for b in branches:
        if isinstance(b.final_state, PureState):
            v = b.final_state.amplitudes
            acc = acc + b.probability * np.outer(v, v.conj())
        else:
            acc = acc + b.probability * b.final_state.matrix
    return acc


def test_01_bell_pauli_identities():
    qa, qb = QubitId("a"), QubitId("b")
    singlet = bell_state(0, qa, qb)
    failures = []
    for i in BellIndex:
        for side, q in (("second", qb), ("first", qa)):
            fid = fidelity_pure(apply_local(singlet, pauli_on(i, q)), bell_state(i, qa, qb))
            if fid < 1 - TOL:
                failures.append(f"sigma{int(i)} on {side} qubit: fidelity {fid}")
    _report("Bell basis from sigma action on the singlet, both factor orders, 8 identities", failures)


def test_02_standard_teleportation():
    rng = np.random.default_rng(2024)
    failures = []
    for t in range(20):
        psi = _random_qubit(rng, QubitId("s", 0))
        branches = run(teleport_script(psi, BellIndex.PSI_MINUS, "s", "r"))
        if len(branches) != 4:
            failures.append(f"state {t}: {len(branches)} branches")
            continue
        target = PureState(Register((QubitId("r", 0),)), psi.amplitudes)
        for b in branches:
            if abs(b.probability - 0.25) > TOL:
                failures.append(f"state {t}: branch probability {b.probability}")
            fid = fidelity_pure(b.final_state, target)
            if fid < 1 - TOL:
                failures.append(f"state {t}: fidelity {fid}")
    _report("standard teleportation exact on 20 random states, 4 branches at p=1/4 each", failures)


def test_03_wrong_bell_lemma():
    rng = np.random.default_rng(2025)
    failures = []
    q_out = QubitId("r", 0)
    for r in BellIndex:
        for t in range(20):
            psi = _random_qubit(rng, QubitId("s", 0))
            predicted = apply_local(
                PureState(Register((q_out,)), psi.amplitudes), pauli_on(r, q_out)
            )
            for b in run(teleport_script(psi, r, "s", "r")):
                fid = fidelity_pure(b.final_state, predicted)
                if fid < 1 - TOL:
                    failures.append(f"resource {int(r)}, state {t}: fidelity {fid}")
    _report("teleportation through Bell resource i yields sigma_i on the input, 4x20x4 branches", failures)


def test_04_smolin_symmetry():
    rho = smolin_state("A", "B", "C", "D").to_density()
    rep = symmetry_report(rho, [["A", "B", "C", "D"]])
    failures = []
    if len(rep.entries) != 24:
        failures.append(f"{len(rep.entries)} permutations")
    if rep.max_distance >= TOL:
        failures.append(f"max distance {rep.max_distance}")
    _report("four-party mixture invariant under all 24 party permutations", failures)


def test_05_smolin_cuts():
    rho = smolin_state("A", "B", "C", "D").to_density()
    reg = rho.register
    failures = []
    for pair in (("A", "B"), ("A", "C"), ("A", "D")):
        cut = Bipartition.of(reg, tuple(QubitId(p) for p in pair))
        err = verify_certificate(rho, cut, smolin_cut_certificate("ABCD", cut))
        if err >= TOL:
            failures.append(f"{pair}: certificate error {err}")
        lo, verdict = ppt_check(rho, cut, tol=TOL)
        if verdict != PPT or lo < -TOL:
            failures.append(f"{pair}: min eigenvalue {lo} verdict {verdict}")
    ones = []
    for p in "ABCD":
        lo, verdict = ppt_check(rho, Bipartition.of(reg, (QubitId(p),)), tol=TOL)
        ones.append(lo)
        if verdict != NPT:
            failures.append(f"{p}:rest verdict {verdict}, min eigenvalue {lo}")
    _report(
        "2:2 cuts separable with verified certificates; 1:3 cuts NPT "
        f"(min eigenvalues {['%.4f' % v for v in ones]})",
        failures,
    )


def test_06_unlockability():
    state = smolin_state("A", "B", "C", "D")
    failures = []
    for helpers in combinations("ABCD", 2):
        remaining = sorted(set("ABCD") - set(helpers))
        target = bell_state(0, QubitId(remaining[0]), QubitId(remaining[1]))
        branches = run(unlock_script(state, helpers))
        total = sum(b.probability for b in branches)
        if abs(total - 1.0) > TOL:
            failures.append(f"{helpers}: probability sum {total}")
        for b in branches:
            fid = fidelity_pure(b.final_state, target)
            if fid < 1 - TOL:
                failures.append(f"{helpers}: branch fidelity {fid}")
    _report("any two colocated parties unlock a singlet for the other two, all 6 pairs", failures)


def test_07_superactivation():
    script = superactivation_script()
    branches = run(script)
    d0, e0 = QubitId("D", 0), QubitId("E", 0)
    target = bell_state(0, d0, e0)
    failures = []
    if len(branches) != 1024:
        failures.append(f"{len(branches)} branches")
    worst = min(fidelity_pure(b.final_state, target) for b in branches)
    if worst < 1 - TOL:
        failures.append(f"worst branch fidelity {worst}")
    proj = np.outer(target.amplitudes, target.amplitudes.conj())
    dist = float(np.linalg.norm(_weighted(branches) - proj))
    if dist >= TOL:
        failures.append(f"weighted density vs singlet projector {dist}")

    c0, c1 = QubitId("C", 0), QubitId("C", 1)
    mid = LoccScript(initial=script.initial, steps=script.steps[:4], keep=(c0, c1, d0, e0))
    mid_branches = run(mid)
    comps = []
    for k in BellIndex:
        s = kron(bell_state(k, c0, d0), bell_state(k, c1, e0))
        comps.append((0.25, reorder_register(s, (c0, c1, d0, e0))))
    want = MixedEnsemble(tuple(comps)).to_density()
    want = reorder_register(want, mid_branches[0].final_state.register.qubits)
    mid_dist = float(np.linalg.norm(_weighted(mid_branches) - want.matrix))
    if mid_dist >= TOL:
        failures.append(f"post-step-2 four-party form deviation {mid_dist}")
    _report(
        "two-copy protocol leaves (D,E) a perfect singlet on all 1024 branches, "
        "intermediate four-party form confirmed",
        failures,
    )


def test_08_all_pairs_reduction():
    desc = ms_descriptor()
    failures = []
    for pair in combinations(MS_PARTIES, 2):
        plan = desc.plan_for_pair(pair)
        if plan.roles["D"] != pair[0] or plan.roles["E"] != pair[1]:
            failures.append(f"{pair}: bad plan roles {plan.roles}")
        branches = run(superactivation_for_pair(pair))
        target = bell_state(0, QubitId(pair[0], 0), QubitId(pair[1], 0))
        worst = min(fidelity_pure(b.final_state, target) for b in branches)
        if worst < 1 - TOL:
            failures.append(f"{pair}: worst fidelity {worst}")
        if len(branches) != 1024:
            failures.append(f"{pair}: {len(branches)} branches")
    _report("five-copy symmetrized state serves a singlet to every one of the 10 pairs", failures)


def test_09_engine_invariants():
    failures = []

    # probability sums on every scripted run exercised here
    rng = np.random.default_rng(2026)
    runs = []
    psi = _random_qubit(rng, QubitId("s", 0))
    runs.append(run(teleport_script(psi, BellIndex.PHI_PLUS, "s", "r")))
    state = smolin_state("A", "B", "C", "D")
    for helpers in combinations("ABCD", 2):
        runs.append(run(unlock_script(state, helpers)))
    runs.append(run(superactivation_script()))
    for k, branches in enumerate(runs):
        total = sum(b.probability for b in branches)
        if abs(total - 1.0) > TOL:
            failures.append(f"run {k}: probability sum {total}")

    # PPT verdict must not depend on which side is transposed
    for t in range(50):
        n = 2 if t % 2 == 0 else 3
        rho = _random_density(rng, n)
        reg = rho.register
        side = reg.qubits[: 1 + (t % n % 2)]
        cut = Bipartition.of(reg, side)
        lo_a, v_a = ppt_check(rho, cut)
        lo_b, v_b = ppt_check(rho, Bipartition(cut.side_b, cut.side_a))
        if v_a != v_b or abs(lo_a - lo_b) > TOL:
            failures.append(f"state {t}: sides disagree ({lo_a}, {v_a}) vs ({lo_b}, {v_b})")

    # applying the same partial transpose twice is bitwise identity
    for t in range(10):
        rho = _random_density(rng, 3)
        part = rho.register.qubits[: 1 + t % 2]
        once = partial_transpose(rho, part)
        tens = once.reshape((2,) * 6)
        for q in part:
            p = rho.register.index(q)
            tens = np.swapaxes(tens, p, 3 + p)
        if not np.array_equal(tens.reshape(8, 8), rho.matrix):
            failures.append(f"state {t}: involution not exact")

    _report(
        "engine invariants: branch probabilities sum to 1, PPT verdict is side "
        "symmetric on 50 random states, partial transpose involution exact",
        failures,
    )


def test_10_negative_control():
    rho, cut, cert = disconnected_fixture()
    failures = []
    err = verify_certificate(rho, cut, cert)
    if err >= TOL:
        failures.append(f"certificate error {err}")
    lo, verdict = ppt_check(rho, cut)
    if verdict != PPT:
        failures.append(f"verdict {verdict}, min eigenvalue {lo}")
    _report(
        "disconnected two-factor control state carries a verified product "
        "certificate across its separating cut",
        failures,
    )
