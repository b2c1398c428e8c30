"""LOCC protocol engine.

Scripts are ordered lists of two step kinds: a Bell-basis measurement of two
qubits held by one owner, and a conditional sigma correction whose index is a
classical expression over previously bound outcome variables.  Classical
communication is modeled as free global broadcast, so any later step may
reference any earlier outcome.  Parties that come together for a joint
measurement are recorded as a colocation, which merges their qubits under one
owner label for locality validation.

``run`` enumerates every measurement branch exactly, one depth-first walk per
ensemble component, and returns the branches in a canonical order that does
not depend on evaluation schedule.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .states import (
    M_PAIRING_1,
    M_PAIRING_2,
    M_REGISTER,
    BellIndex,
    MixedEnsemble,
    PauliIndex,
    bell_state,
    m_state,
    ms_descriptor,
    pauli_on,
)
from .tensor import (
    ABS_TOL,
    DensityOperator,
    PureState,
    QubitId,
    Register,
    apply_local,
    kron,
    reorder_register,
)

PRUNE_TOL = 1e-12


class LoccValidationError(ValueError):
    """Raised when a script fails locality or well-formedness validation."""

    def __init__(self, step: int | None, reason: str) -> None:
        self.step = step
        where = "script" if step is None else f"step {step}"
        super().__init__(f"{where}: {reason}")


@dataclass(frozen=True)
class BellMeasure:
    """Joint Bell-basis measurement of (q1, q2), binding ``outcome_var``."""

    owner: str
    q1: QubitId
    q2: QubitId
    outcome_var: str


@dataclass(frozen=True)
class ConditionalPauli:
    """Apply sigma_k on ``target`` where k evaluates ``index_expr``."""

    owner: str
    target: QubitId
    index_expr: str


LoccStep = Union[BellMeasure, ConditionalPauli]


@dataclass(frozen=True)
class LoccScript:
    """A validated LOCC protocol: initial ensemble, steps, and kept qubits."""

    initial: MixedEnsemble
    steps: tuple[LoccStep, ...]
    keep: tuple[QubitId, ...]
    colocations: tuple[tuple[str, ...], ...] = ()


@dataclass(frozen=True)
class Branch:
    """One outcome-resolved execution path.

    ``component`` indexes the initial ensemble component the path started
    from; ``final_state`` is the kept part, a PureState when the discarded
    qubits are unentangled with it and a DensityOperator otherwise.
    """

    component: int
    probability: float
    outcomes: dict[str, BellIndex] = field(repr=False)
    final_state: Union[PureState, DensityOperator] = field(repr=False)


# ---------------------------------------------------------------------------
# classical expressions

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Mod, ast.FloorDiv)


def _expr_tree(expr: str) -> ast.Expression:
    try:
        return ast.parse(expr, mode="eval")
    except SyntaxError as e:
        raise ValueError(f"bad expression {expr!r}: {e.msg}") from None


def expr_names(expr: str) -> set[str]:
    """The outcome variables referenced by a correction expression."""
    tree = _expr_tree(expr)
    names = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Name):
            names.add(node.id)
        elif isinstance(node, ast.Expression):
            continue
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, int):
                raise ValueError(f"non-integer constant in {expr!r}")
        elif isinstance(node, ast.BinOp):
            if not isinstance(node.op, _ALLOWED_BINOPS):
                raise ValueError(f"operator not allowed in {expr!r}")
        elif isinstance(node, (ast.UnaryOp, ast.USub, ast.UAdd, ast.Load)):
            continue
        elif isinstance(node, tuple(_ALLOWED_BINOPS)):
            continue
        else:
            raise ValueError(f"construct {type(node).__name__} not allowed in {expr!r}")
    return names


def eval_expr(expr: str, env: dict[str, BellIndex]) -> PauliIndex:
    """Evaluate a correction expression to a sigma index."""

    def ev(node) -> int:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Name):
            return int(env[node.id])
        if isinstance(node, ast.Constant):
            return int(node.value)
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Mod):
                return a % b
            if isinstance(node.op, ast.FloorDiv):
                return a // b
        raise ValueError(f"construct {type(node).__name__} not allowed in {expr!r}")

    value = ev(_expr_tree(expr))
    if not 0 <= value <= 3:
        raise ValueError(f"expression {expr!r} evaluated to {value}, not a sigma index")
    return PauliIndex(value)


# ---------------------------------------------------------------------------
# validation

def _owner_map(script: LoccScript) -> dict[str, frozenset[str]]:
    parties = {q.party for q in script.initial.register}
    allowed = {p: frozenset({p}) for p in parties}
    for group in script.colocations:
        if len(group) < 2 or len(set(group)) != len(group):
            raise LoccValidationError(None, f"bad colocation group {group}")
        for p in group:
            if p not in parties:
                raise LoccValidationError(None, f"colocated party {p!r} holds no qubit")
        label = "".join(sorted(group))
        allowed[label] = frozenset(group)
    return allowed


def validate(script: LoccScript) -> None:
    """Check locality, ownership, variable binding, and the keep set."""
    reg = script.initial.register
    allowed = _owner_map(script)
    bound: set[str] = set()
    for k, step in enumerate(script.steps):
        if step.owner not in allowed:
            raise LoccValidationError(k, f"unknown owner {step.owner!r}")
        holds = allowed[step.owner]
        if isinstance(step, BellMeasure):
            if step.q1 == step.q2:
                raise LoccValidationError(k, f"measurement of {step.q1} against itself")
            for q in (step.q1, step.q2):
                if q not in reg:
                    raise LoccValidationError(k, f"qubit {q} not in register")
                if q.party not in holds:
                    raise LoccValidationError(
                        k, f"owner {step.owner!r} does not hold qubit {q}"
                    )
            if not step.outcome_var.isidentifier():
                raise LoccValidationError(k, f"bad outcome variable {step.outcome_var!r}")
            if step.outcome_var in bound:
                raise LoccValidationError(k, f"outcome variable {step.outcome_var!r} rebound")
            bound.add(step.outcome_var)
        elif isinstance(step, ConditionalPauli):
            if step.target not in reg:
                raise LoccValidationError(k, f"qubit {step.target} not in register")
            if step.target.party not in holds:
                raise LoccValidationError(
                    k, f"owner {step.owner!r} does not hold qubit {step.target}"
                )
            try:
                names = expr_names(step.index_expr)
            except ValueError as e:
                raise LoccValidationError(k, str(e)) from None
            missing = names - bound
            if missing:
                raise LoccValidationError(
                    k, f"expression references unbound variable(s) {sorted(missing)}"
                )
        else:
            raise LoccValidationError(k, f"unknown step kind {type(step).__name__}")
    if not script.keep:
        raise LoccValidationError(None, "keep set is empty")
    for q in script.keep:
        if q not in reg:
            raise LoccValidationError(None, f"keep qubit {q} not in register")
    if len(set(script.keep)) != len(script.keep):
        raise LoccValidationError(None, "duplicate qubits in keep set")


# ---------------------------------------------------------------------------
# measurement and execution

def bell_measure(
    s: PureState, q1: QubitId, q2: QubitId
) -> list[tuple[BellIndex, float, PureState]]:
    """Project (q1, q2) onto each Bell state; keep outcomes above PRUNE_TOL.

    Post-states live on the full register with the measured pair collapsed
    to the outcome Bell state; probabilities of a normalized input sum to 1.
    """
    reg = s.register
    if q1 == q2:
        raise ValueError(f"cannot measure {q1} against itself")
    p1, p2 = reg.index(q1), reg.index(q2)
    n = reg.n
    t = s.amplitudes.reshape((2,) * n)
    rest = [p for p in range(n) if p not in (p1, p2)]
    results = []
    for k in BellIndex:
        bk = bell_state(k, q1, q2).amplitudes.reshape(2, 2)
        coeff = np.tensordot(bk.conj(), t, axes=([0, 1], [p1, p2]))
        prob = float(np.real(np.vdot(coeff, coeff)))
        if prob <= PRUNE_TOL:
            continue
        coeff = coeff / np.sqrt(prob)
        post = np.tensordot(bk, coeff, axes=0)
        post = np.moveaxis(post, list(range(n)), [p1, p2] + rest)
        results.append((k, prob, PureState(reg, post.reshape(-1))))
    return results


def _restrict(state: PureState, keep: tuple[QubitId, ...]):
    """Reduce a pure state to the kept qubits, staying pure when possible."""
    reg = state.register
    n = reg.n
    keep_set = set(keep)
    keep_pos = [p for p in range(n) if reg.qubits[p] in keep_set]
    rest = [p for p in range(n) if p not in keep_pos]
    if not rest:
        return state
    t = state.amplitudes.reshape((2,) * n)
    mat = np.transpose(t, keep_pos + rest).reshape(2 ** len(keep_pos), -1)
    red = mat @ mat.conj().T
    sub = Register(tuple(reg.qubits[p] for p in keep_pos))
    purity = float(np.real(np.trace(red @ red)))
    if abs(purity - 1.0) <= ABS_TOL:
        _, vecs = np.linalg.eigh(red)
        vec = vecs[:, -1]
        lead = int(np.argmax(np.abs(vec)))
        vec = vec * (vec[lead].conjugate() / abs(vec[lead]))
        return PureState(sub, vec)
    return DensityOperator(sub, red)


def run(script: LoccScript) -> list[Branch]:
    """Enumerate every branch of the script exactly.

    One Branch per (ensemble component, outcome assignment) with probability
    component weight times the product of outcome probabilities; branches
    below PRUNE_TOL are dropped.  The list is sorted by outcome tuple then
    component index, independent of evaluation order.
    """
    validate(script)
    branches: list[Branch] = []

    def walk(ci: int, state: PureState, prob: float, env: dict, step_idx: int) -> None:
        if step_idx == len(script.steps):
            branches.append(
                Branch(
                    component=ci,
                    probability=prob,
                    outcomes=dict(env),
                    final_state=_restrict(state, script.keep),
                )
            )
            return
        step = script.steps[step_idx]
        if isinstance(step, BellMeasure):
            for k, p, post in bell_measure(state, step.q1, step.q2):
                newprob = prob * p
                if newprob < PRUNE_TOL:
                    continue
                env[step.outcome_var] = k
                walk(ci, post, newprob, env, step_idx + 1)
                del env[step.outcome_var]
        else:
            idx = eval_expr(step.index_expr, env)
            walk(ci, apply_local(state, pauli_on(idx, step.target)), prob, env, step_idx + 1)

    for ci, (w, comp) in enumerate(script.initial.components):
        walk(ci, comp, w, {}, 0)

    order = [s.outcome_var for s in script.steps if isinstance(s, BellMeasure)]
    branches.sort(key=lambda b: (tuple(int(b.outcomes[v]) for v in order), b.component))
    return branches


# ---------------------------------------------------------------------------
# the four protocols

def teleport_script(
    psi: PureState, resource: BellIndex | int, sender: str, receiver: str
) -> LoccScript:
    """Teleport a one-qubit state through the given Bell resource.

    The sender measures (input, resource half) in the Bell basis and the
    receiver applies sigma_m.  With the singlet resource every branch
    reproduces the input; with resource i every branch yields sigma_i applied
    to the input.
    """
    if sender == receiver:
        raise ValueError("sender and receiver must differ")
    if psi.register.n != 1:
        raise ValueError(f"input must be a single qubit, got {psi.register}")
    q_in = psi.register.qubits[0]
    if q_in.party != sender:
        raise ValueError(f"input qubit {q_in} is not held by sender {sender!r}")
    q_s = QubitId(sender, q_in.slot + 1)
    q_r = QubitId(receiver, 0)
    resource_pair = bell_state(BellIndex(resource), q_s, q_r)
    initial = MixedEnsemble(((1.0, kron(psi, resource_pair)),))
    steps = (
        BellMeasure(sender, q_in, q_s, "m"),
        ConditionalPauli(receiver, q_r, "m"),
    )
    return LoccScript(initial=initial, steps=steps, keep=(q_r,))


def unlock_script(state: MixedEnsemble, helpers) -> LoccScript:
    """Two colocated helper parties measure jointly to leave the other two
    parties a singlet.

    The helpers' qubits are merged under one owner, measured in the Bell
    basis, and the outcome correction is applied by the lexicographically
    last remaining party.  Both remaining qubits are kept.
    """
    helpers = tuple(sorted(set(helpers)))
    if len(helpers) != 2:
        raise ValueError(f"need exactly two helper parties, got {helpers}")
    reg = state.register
    parties = [q.party for q in reg]
    if len(set(parties)) != len(parties) or len(parties) != 4:
        raise ValueError(f"expected four single-qubit parties, got {reg}")
    for h in helpers:
        if h not in parties:
            raise ValueError(f"helper {h!r} holds no qubit in {reg}")
    by_party = {q.party: q for q in reg}
    remaining = sorted(set(parties) - set(helpers))
    corrector = remaining[-1]
    owner = "".join(helpers)
    steps = (
        BellMeasure(owner, by_party[helpers[0]], by_party[helpers[1]], "m"),
        ConditionalPauli(corrector, by_party[corrector], "m"),
    )
    keep = tuple(by_party[p] for p in remaining)
    return LoccScript(initial=state, steps=steps, keep=keep, colocations=(helpers,))


def _superactivation_steps(roles: dict[str, str]) -> tuple[LoccStep, ...]:
    a, b, c, d = roles["A"], roles["B"], roles["C"], roles["D"]
    return (
        BellMeasure(a, QubitId(a, 1), QubitId(a, 0), "a"),
        ConditionalPauli(c, QubitId(c, 0), "a"),
        BellMeasure(b, QubitId(b, 1), QubitId(b, 0), "b"),
        ConditionalPauli(d, QubitId(d, 0), "b"),
        BellMeasure(c, QubitId(c, 0), QubitId(c, 1), "c"),
        ConditionalPauli(d, QubitId(d, 0), "c"),
    )


def _m_state_for_roles(roles: dict[str, str]) -> MixedEnsemble:
    relabel = {
        QubitId(canon, s): QubitId(actual, s)
        for canon, actual in roles.items()
        for s in (0, 1)
    }

    def r(q: QubitId) -> QubitId:
        return relabel[q]

    register = tuple(r(q) for q in M_REGISTER)
    comps = []
    for i in BellIndex:
        for j in BellIndex:
            s = bell_state(i, r(M_PAIRING_1[0][0]), r(M_PAIRING_1[0][1]))
            s = kron(s, bell_state(i, r(M_PAIRING_1[1][0]), r(M_PAIRING_1[1][1])))
            s = kron(s, bell_state(j, r(M_PAIRING_2[0][0]), r(M_PAIRING_2[0][1])))
            s = kron(s, bell_state(j, r(M_PAIRING_2[1][0]), r(M_PAIRING_2[1][1])))
            comps.append((1.0 / 16.0, reorder_register(s, register)))
    return MixedEnsemble(tuple(comps))


def superactivation_script() -> LoccScript:
    """The two-copy distillation protocol leaving a singlet with D and E.

    A teleports her half of the unknown pair she shares with B over to C,
    using the unknown pair she shares with C as the resource; B does the same
    toward D; C then measures her two qubits and D applies the final
    correction.  Every branch ends with (D, E) in the singlet state.
    """
    roles = {p: p for p in ("A", "B", "C", "D", "E")}
    return LoccScript(
        initial=m_state(),
        steps=_superactivation_steps(roles),
        keep=(QubitId("D", 0), QubitId("E", 0)),
    )


def superactivation_for_pair(target: tuple[str, str]) -> LoccScript:
    """The distillation protocol relabeled to serve any target pair.

    Selects the two five-copy placements avoiding the target pair and runs
    the two-copy protocol under the recorded role relabeling; all branches
    yield the singlet on the target pair.
    """
    plan = ms_descriptor().plan_for_pair(tuple(target))
    roles = plan.roles
    return LoccScript(
        initial=_m_state_for_roles(roles),
        steps=_superactivation_steps(roles),
        keep=(QubitId(roles["D"], 0), QubitId(roles["E"], 0)),
    )
