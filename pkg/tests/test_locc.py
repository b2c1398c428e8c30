import numpy as np
import pytest

from bellmix.locc import (
    PRUNE_TOL,
    BellMeasure,
    ConditionalPauli,
    LoccScript,
    LoccValidationError,
    bell_measure,
    eval_expr,
    expr_names,
    run,
    superactivation_script,
    teleport_script,
    unlock_script,
    validate,
)
from bellmix.states import (
    BellIndex,
    MixedEnsemble,
    bell_state,
    pauli_on,
    smolin_state,
)
from bellmix.tensor import (
    ABS_TOL,
    PureState,
    QubitId,
    Register,
    apply_local,
    fidelity_pure,
    kron,
)

QA = QubitId("a")
QB = QubitId("b")
QC = QubitId("c")
QD = QubitId("d")


def _random_qubit(rng, q):
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return PureState(Register((q,)), v / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# bell_measure

def test_bell_measure_eigenstate_is_deterministic():
    for i in BellIndex:
        results = bell_measure(bell_state(i, QA, QB), QA, QB)
        assert len(results) == 1
        k, p, post = results[0]
        assert k == i
        assert abs(p - 1.0) < ABS_TOL
        assert abs(fidelity_pure(post, bell_state(i, QA, QB)) - 1.0) < ABS_TOL


def test_bell_measure_of_cross_pair_is_uniform():
    # measuring across two independent singlets gives four outcomes at 1/4
    s = kron(bell_state(0, QA, QB), bell_state(0, QC, QD))
    results = bell_measure(s, QB, QC)
    assert len(results) == 4
    for k, p, post in results:
        assert abs(p - 0.25) < ABS_TOL
        # the unmeasured pair is steered into a Bell state as well
        assert post.register.n == 4


def test_bell_measure_product_with_ancilla():
    s = kron(bell_state(2, QA, QB), PureState(Register((QC,)), [1, 0]))
    results = bell_measure(s, QA, QB)
    assert len(results) == 1
    assert results[0][0] == BellIndex.PHI_PLUS


def test_bell_measure_probabilities_sum_to_one():
    rng = np.random.default_rng(7)
    for _ in range(5):
        v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        s = PureState(Register((QA, QB, QC)), v / np.linalg.norm(v))
        total = sum(p for _, p, _ in bell_measure(s, QA, QC))
        assert abs(total - 1.0) < ABS_TOL


def test_bell_measure_rejects_same_qubit():
    with pytest.raises(ValueError):
        bell_measure(bell_state(0, QA, QB), QA, QA)


# ---------------------------------------------------------------------------
# expressions

def test_expr_names_and_eval():
    assert expr_names("(a + 1) % 4") == {"a"}
    env = {"a": BellIndex.PHI_MINUS}
    assert int(eval_expr("(a + 1) % 4", env)) == 0
    assert int(eval_expr("a", env)) == 3
    assert int(eval_expr("2", {})) == 2


def test_expr_rejects_calls_and_attributes():
    with pytest.raises(ValueError):
        expr_names("__import__('os')")
    with pytest.raises(ValueError):
        expr_names("a.b")
    with pytest.raises(ValueError):
        expr_names("a if a else 0")


def test_expr_rejects_float_constants():
    with pytest.raises(ValueError):
        expr_names("1.5")


def test_expr_range_check():
    with pytest.raises(ValueError, match="sigma index"):
        eval_expr("7", {})


# ---------------------------------------------------------------------------
# validation

def _one_component(s):
    return MixedEnsemble(((1.0, s),))


def test_validate_rejects_cross_party_measurement():
    init = _one_component(kron(bell_state(0, QA, QB), bell_state(0, QC, QD)))
    script = LoccScript(
        initial=init,
        steps=(BellMeasure("a", QA, QB, "m"),),
        keep=(QC,),
    )
    with pytest.raises(LoccValidationError, match="does not hold"):
        validate(script)


def test_validate_accepts_colocated_measurement():
    init = _one_component(kron(bell_state(0, QA, QB), bell_state(0, QC, QD)))
    script = LoccScript(
        initial=init,
        steps=(BellMeasure("ab", QA, QB, "m"),),
        keep=(QC, QD),
        colocations=(("a", "b"),),
    )
    validate(script)


def test_validate_rejects_unbound_variable():
    init = _one_component(bell_state(0, QA, QB))
    script = LoccScript(
        initial=init,
        steps=(ConditionalPauli("b", QB, "m"),),
        keep=(QA,),
    )
    with pytest.raises(LoccValidationError, match="unbound"):
        validate(script)


def test_validate_rejects_rebound_variable():
    init = _one_component(kron(bell_state(0, QubitId("a", 0), QubitId("a", 1)),
                               bell_state(0, QubitId("b", 0), QubitId("b", 1))))
    script = LoccScript(
        initial=init,
        steps=(
            BellMeasure("a", QubitId("a", 0), QubitId("a", 1), "m"),
            BellMeasure("b", QubitId("b", 0), QubitId("b", 1), "m"),
        ),
        keep=(QubitId("a", 0),),
    )
    with pytest.raises(LoccValidationError, match="rebound"):
        validate(script)


def test_validate_rejects_empty_keep():
    init = _one_component(bell_state(0, QA, QB))
    script = LoccScript(initial=init, steps=(), keep=())
    with pytest.raises(LoccValidationError, match="keep"):
        validate(script)


def test_validation_error_reports_step():
    err = LoccValidationError(3, "boom")
    assert "step 3" in str(err)
    assert LoccValidationError(None, "boom").step is None


# ---------------------------------------------------------------------------
# run

def test_run_with_no_steps_restricts_components():
    init = smolin_state("a", "b", "c", "d")
    script = LoccScript(initial=init, steps=(), keep=(QA, QB))
    branches = run(script)
    assert len(branches) == 4
    assert abs(sum(b.probability for b in branches) - 1.0) < ABS_TOL
    for k, b in enumerate(branches):
        assert b.component == k
        assert abs(fidelity_pure(b.final_state, bell_state(k, QA, QB)) - 1.0) < ABS_TOL


def test_run_returns_canonical_branch_order():
    init = _one_component(kron(bell_state(0, QA, QB), bell_state(0, QC, QD)))
    script = LoccScript(
        initial=init,
        steps=(BellMeasure("bc", QB, QC, "m"),),
        keep=(QA, QD),
        colocations=(("b", "c"),),
    )
    branches = run(script)
    assert [int(b.outcomes["m"]) for b in branches] == [0, 1, 2, 3]
    assert abs(sum(b.probability for b in branches) - 1.0) < ABS_TOL


# ---------------------------------------------------------------------------
# teleportation

def test_teleport_standard_resource_reproduces_input():
    rng = np.random.default_rng(0)
    psi = _random_qubit(rng, QubitId("s", 0))
    branches = run(teleport_script(psi, BellIndex.PSI_MINUS, "s", "r"))
    assert len(branches) == 4
    target = PureState(Register((QubitId("r", 0),)), psi.amplitudes)
    for b in branches:
        assert abs(b.probability - 0.25) < ABS_TOL
        assert abs(fidelity_pure(b.final_state, target) - 1.0) < ABS_TOL


@pytest.mark.parametrize("r", list(BellIndex))
def test_teleport_wrong_resource_applies_sigma_r(r):
    rng = np.random.default_rng(int(r) + 1)
    for _ in range(5):
        psi = _random_qubit(rng, QubitId("s", 0))
        q_out = QubitId("r", 0)
        predicted = apply_local(
            PureState(Register((q_out,)), psi.amplitudes), pauli_on(r, q_out)
        )
        for b in run(teleport_script(psi, r, "s", "r")):
            assert abs(b.probability - 0.25) < ABS_TOL
            assert abs(fidelity_pure(b.final_state, predicted) - 1.0) < ABS_TOL


def test_teleport_basis_state_through_psi_plus():
    # |0> through resource 1 comes out as Z|0> = |0>
    psi = PureState(Register((QubitId("s", 0),)), [1, 0])
    out = PureState(Register((QubitId("r", 0),)), [1, 0])
    for b in run(teleport_script(psi, BellIndex.PSI_PLUS, "s", "r")):
        assert abs(fidelity_pure(b.final_state, out) - 1.0) < ABS_TOL


def test_teleport_rejects_bad_input():
    psi2 = bell_state(0, QubitId("s", 0), QubitId("s", 5))
    with pytest.raises(ValueError):
        teleport_script(psi2, 0, "s", "r")
    psi = PureState(Register((QubitId("x", 0),)), [1, 0])
    with pytest.raises(ValueError):
        teleport_script(psi, 0, "s", "r")
    with pytest.raises(ValueError):
        teleport_script(psi, 0, "x", "x")


# ---------------------------------------------------------------------------
# unlocking

def test_unlock_ab_leaves_cd_singlet():
    state = smolin_state("A", "B", "C", "D")
    branches = run(unlock_script(state, ("A", "B")))
    # helper pair matches a mixture pairing: each component collapses cleanly
    assert len(branches) == 4
    target = bell_state(0, QubitId("C"), QubitId("D"))
    assert abs(sum(b.probability for b in branches) - 1.0) < ABS_TOL
    for b in branches:
        assert abs(fidelity_pure(b.final_state, target) - 1.0) < ABS_TOL


def test_unlock_ac_leaves_bd_singlet():
    state = smolin_state("A", "B", "C", "D")
    branches = run(unlock_script(state, ("A", "C")))
    # helper pair straddles the pairing: every component branches four ways
    assert len(branches) == 16
    target = bell_state(0, QubitId("B"), QubitId("D"))
    assert abs(sum(b.probability for b in branches) - 1.0) < ABS_TOL
    for b in branches:
        assert abs(fidelity_pure(b.final_state, target) - 1.0) < ABS_TOL


def test_unlock_without_correction_yields_outcome_bell_state():
    state = smolin_state("A", "B", "C", "D")
    script = unlock_script(state, ("A", "B"))
    stripped = LoccScript(
        initial=script.initial,
        steps=script.steps[:1],
        keep=script.keep,
        colocations=script.colocations,
    )
    for b in run(stripped):
        m = b.outcomes["m"]
        target = bell_state(m, QubitId("C"), QubitId("D"))
        assert abs(fidelity_pure(b.final_state, target) - 1.0) < ABS_TOL


def test_unlock_rejects_wrong_helper_count():
    state = smolin_state("A", "B", "C", "D")
    with pytest.raises(ValueError):
        unlock_script(state, ("A",))
    with pytest.raises(ValueError):
        unlock_script(state, ("A", "Q"))


# ---------------------------------------------------------------------------
# correction-order transparency

def test_constant_corrections_commute_up_to_phase():
    # sigma_1 then sigma_3 versus sigma_3 then sigma_1 on the same qubit:
    # the results differ by a sign only, so every branch overlap is 1.
    psi = PureState(Register((QubitId("s", 0),)), [0.6, 0.8])
    base = teleport_script(psi, 0, "s", "r")
    extra_a = (
        ConditionalPauli("r", QubitId("r", 0), "1"),
        ConditionalPauli("r", QubitId("r", 0), "3"),
    )
    extra_b = (extra_a[1], extra_a[0])
    runs = []
    for extra in (extra_a, extra_b):
        script = LoccScript(
            initial=base.initial, steps=base.steps + extra, keep=base.keep
        )
        runs.append(run(script))
    for ba, bb in zip(*runs):
        assert ba.outcomes == bb.outcomes
        ip = abs(np.vdot(ba.final_state.amplitudes, bb.final_state.amplitudes))
        assert abs(ip - 1.0) < ABS_TOL


# ---------------------------------------------------------------------------
# superactivation script shape

def test_superactivation_script_validates():
    script = superactivation_script()
    validate(script)
    assert script.keep == (QubitId("D", 0), QubitId("E", 0))
    assert len(script.steps) == 6
    owners = [s.owner for s in script.steps]
    assert owners == ["A", "C", "B", "D", "C", "D"]


def test_superactivation_branch_count_and_probabilities():
    branches = run(superactivation_script())
    assert len(branches) == 1024
    assert abs(sum(b.probability for b in branches) - 1.0) < 1e-9
    probs = {round(b.probability, 15) for b in branches}
    assert all(abs(p - 1 / 1024) < 1e-12 for p in probs)


def test_prune_tol_positive_and_small():
    assert 0 < PRUNE_TOL < 1e-9
