"""Command line entry point.

Three subcommands:

* ``verify <target>`` runs one verification suite and reports each check
  with its measured value, threshold, and pass/fail status.
* ``export <fixture>`` writes a named state to JSON.
* ``run <script.json>`` executes a serialized protocol script, either by
  exact branch enumeration or by seeded sampling.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage or
input errors.  With identical flags the JSON output is byte identical
between runs.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import analysis, locc, serialize, states
from .analysis import Bipartition, cut_label, cut_survey, disconnected_fixture
from .locc import Branch, LoccScript, LoccValidationError, bell_measure, run
from .states import (
    M_DE_EXCHANGE,
    M_REGISTER,
    BellIndex,
    MixedEnsemble,
    MsDescriptor,
    bell_state,
    m_state,
    ms_descriptor,
    pauli_on,
    smolin_state,
)
from .tensor import (
    DensityOperator,
    PureState,
    QubitId,
    Register,
    apply_local,
    eig_hermitian,
    fidelity_pure,
    kron,
    partial_trace,
    reorder_register,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

VERIFY_TARGETS = (
    "bell-identities",
    "lemma",
    "smolin",
    "m",
    "superactivation",
    "ms-all-pairs",
    "cuts",
)


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-9
    seed: int = 0
    output_path: str | None = None
    format: str = "text"

    def __post_init__(self) -> None:
        if not 0.0 < self.tolerance <= 1e-3:
            raise ValueError(f"tolerance must be in (0, 1e-3], got {self.tolerance}")
        if self.format not in ("text", "json"):
            raise ValueError(f"format must be text or json, got {self.format!r}")


@dataclass(frozen=True)
class Check:
    """One verified quantity: ``measured <op> threshold`` must hold."""

    name: str
    measured: float
    op: str
    threshold: float

    @property
    def passed(self) -> bool:
        if self.op == "<=":
            return self.measured <= self.threshold
        if self.op == ">=":
            return self.measured >= self.threshold
        if self.op == "==":
            return self.measured == self.threshold
        raise ValueError(f"unknown comparator {self.op!r}")


def _random_qubit_state(rng: np.random.Generator, q: QubitId) -> PureState:
    amps = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return PureState(Register((q,)), amps).normalized()


def _weighted_density(branches: list[Branch]) -> np.ndarray:
    acc = None
    for b in branches:
        if isinstance(b.final_state, PureState):
            v = b.final_state.amplitudes
            m = np.outer(v, v.conj())
        else:
            m = b.final_state.matrix
        acc = b.probability * m if acc is None else acc + b.probability * m
    return acc


# ---------------------------------------------------------------------------
# verification suites

def _checks_bell_identities(cfg: RunConfig) -> list[Check]:
    qa, qb = QubitId("a"), QubitId("b")
    singlet = bell_state(BellIndex.PSI_MINUS, qa, qb)
    checks = []
    for i in BellIndex:
        right = apply_local(singlet, pauli_on(i, qb))
        left = apply_local(singlet, pauli_on(i, qa))
        checks.append(
            Check(f"identity-one-sigma{int(i)}", fidelity_pure(right, bell_state(i, qa, qb)), ">=", 1 - cfg.tolerance)
        )
        checks.append(
            Check(f"identity-sigma{int(i)}-one", fidelity_pure(left, bell_state(i, qa, qb)), ">=", 1 - cfg.tolerance)
        )
    return checks


def _checks_lemma(cfg: RunConfig, n_states: int = 20) -> list[Check]:
    rng = np.random.default_rng(cfg.seed)
    q_in = QubitId("S", 0)
    inputs = [_random_qubit_state(rng, q_in) for _ in range(n_states)]
    checks = []
    for r in BellIndex:
        worst_fid = 1.0
        worst_prob_dev = 0.0
        n_branches = 0
        for psi in inputs:
            script = locc.teleport_script(psi, r, "S", "R")
            branches = run(script)
            n_branches += len(branches)
            expect = apply_local(
                PureState(Register((QubitId("R", 0),)), psi.amplitudes),
                pauli_on(r, QubitId("R", 0)),
            )
            for b in branches:
                worst_fid = min(worst_fid, fidelity_pure(b.final_state, expect))
                worst_prob_dev = max(worst_prob_dev, abs(b.probability - 0.25))
        checks.append(Check(f"teleport-sigma{int(r)}-min-fidelity", worst_fid, ">=", 1 - cfg.tolerance))
        checks.append(Check(f"teleport-sigma{int(r)}-max-prob-deviation", worst_prob_dev, "<=", cfg.tolerance))
        checks.append(Check(f"teleport-sigma{int(r)}-branches", float(n_branches), "==", float(4 * n_states)))
    return checks


def _smolin_22_cuts(reg: Register) -> list[Bipartition]:
    a, b, c, d = reg.qubits
    return [
        Bipartition((a, b), (c, d)),
        Bipartition((a, c), (b, d)),
        Bipartition((a, d), (b, c)),
    ]


def _smolin_13_cuts(reg: Register) -> list[Bipartition]:
    return [Bipartition.of(reg, (q,)) for q in reg.qubits]


def _checks_smolin(cfg: RunConfig) -> list[Check]:
    ens = smolin_state("A", "B", "C", "D")
    rho = ens.to_density()
    checks = []

    report = analysis.symmetry_report(rho, [["A", "B", "C", "D"]])
    checks.append(Check("symmetry-24-perms-max-distance", report.max_distance, "<=", cfg.tolerance))

    for cut in _smolin_22_cuts(rho.register):
        label = cut_label(cut, rho.register)
        cert = analysis.smolin_cut_certificate("ABCD", cut)
        err = analysis.verify_certificate(rho, cut, cert)
        lo, _ = analysis.ppt_check(rho, cut, tol=cfg.tolerance)
        checks.append(Check(f"cut-{label}-certificate-error", err, "<=", cfg.tolerance))
        checks.append(Check(f"cut-{label}-min-ppt-eigenvalue", lo, ">=", -cfg.tolerance))

    for cut in _smolin_13_cuts(rho.register):
        label = cut_label(cut, rho.register)
        lo, _ = analysis.ppt_check(rho, cut, tol=cfg.tolerance)
        # computed spectra: entangled across every 1:3 split
        checks.append(Check(f"cut-{label}-min-ppt-eigenvalue-npt", lo, "<=", -cfg.tolerance))

    parties = [q.party for q in rho.register]
    for k1 in range(4):
        for k2 in range(k1 + 1, 4):
            helpers = (parties[k1], parties[k2])
            script = locc.unlock_script(ens, helpers)
            branches = run(script)
            remaining = [q for q in rho.register if q.party not in helpers]
            target = bell_state(BellIndex.PSI_MINUS, remaining[0], remaining[1])
            worst = min(fidelity_pure(b.final_state, target) for b in branches)
            total = sum(b.probability for b in branches)
            name = "".join(helpers)
            checks.append(Check(f"unlock-{name}-min-fidelity", worst, ">=", 1 - cfg.tolerance))
            checks.append(Check(f"unlock-{name}-probability-sum-deviation", abs(total - 1.0), "<=", cfg.tolerance))
    return checks


def _m_cuts(reg: Register) -> list[Bipartition]:
    d = QubitId("D", 0)
    e = QubitId("E", 0)
    return [
        Bipartition.of(reg, (d,)),
        Bipartition.of(reg, (e,)),
        Bipartition.of(reg, (d, e)),
    ]


def _checks_m(cfg: RunConfig) -> list[Check]:
    ens = m_state()
    rho = ens.to_density()
    checks = []

    checks.append(Check("trace-deviation", abs(float(np.real(np.trace(rho.matrix))) - 1.0), "<=", cfg.tolerance))

    spectrum = eig_hermitian(rho)
    rank = int(np.sum(spectrum > cfg.tolerance))
    checks.append(Check("rank", float(rank), "==", 16.0))

    vs = [s.amplitudes for _, s in ens.components]
    gram = np.array([[np.vdot(u, v) for v in vs] for u in vs])
    checks.append(Check("component-gram-identity-deviation", float(np.max(np.abs(gram - np.eye(16)))), "<=", cfg.tolerance))

    de = partial_trace(rho, (QubitId("D", 0), QubitId("E", 0)))
    checks.append(Check("de-marginal-maximally-mixed-deviation", float(np.linalg.norm(de.matrix - np.eye(4) / 4)), "<=", cfg.tolerance))

    factor1 = _factor_density(states.M_PAIRING_1)
    factor2 = _factor_density(states.M_PAIRING_2)
    prod = kron(factor1, factor2)
    aligned = reorder_register(prod, M_REGISTER.qubits)
    checks.append(Check("equals-factor-product-deviation", float(np.linalg.norm(aligned.matrix - rho.matrix)), "<=", cfg.tolerance))

    checks.append(Check("de-exchange-symmetry-distance", analysis.qubit_map_distance(rho, M_DE_EXCHANGE), "<=", cfg.tolerance))

    for cut in _m_cuts(rho.register):
        label = cut_label(cut, rho.register)
        lo, _ = analysis.ppt_check(rho, cut, tol=cfg.tolerance)
        checks.append(Check(f"cut-{label}-min-ppt-eigenvalue-npt", lo, "<=", -cfg.tolerance))
    return checks


def _factor_density(pairs) -> DensityOperator:
    """Dense four-party mixture on one factor of the two-copy product state."""
    comps = []
    for i in BellIndex:
        s = kron(bell_state(i, *pairs[0]), bell_state(i, *pairs[1]))
        comps.append((0.25, s))
    return MixedEnsemble(tuple(comps)).to_density()


def _checks_superactivation(cfg: RunConfig) -> list[Check]:
    checks = []
    script = locc.superactivation_script()
    branches = run(script)
    d0, e0 = QubitId("D", 0), QubitId("E", 0)
    target = bell_state(BellIndex.PSI_MINUS, d0, e0)

    checks.append(Check("branches", float(len(branches)), "==", 1024.0))
    total = sum(b.probability for b in branches)
    checks.append(Check("probability-sum-deviation", abs(total - 1.0), "<=", cfg.tolerance))
    worst = min(fidelity_pure(b.final_state, target) for b in branches)
    checks.append(Check("min-branch-fidelity", worst, ">=", 1 - cfg.tolerance))

    avg = _weighted_density(branches)
    proj = np.outer(target.amplitudes, target.amplitudes.conj())
    checks.append(Check("weighted-de-vs-singlet-projector", float(np.linalg.norm(avg - proj)), "<=", cfg.tolerance))

    # after the two teleportation rounds the helpers' partner qubits carry
    # the same four-party mixture with C holding two slots
    c0, c1 = QubitId("C", 0), QubitId("C", 1)
    mid = LoccScript(initial=script.initial, steps=script.steps[:4], keep=(c0, c1, d0, e0))
    mid_branches = run(mid)
    mid_avg = _weighted_density(mid_branches)
    ccde = []
    for k in BellIndex:
        s = kron(bell_state(k, c0, d0), bell_state(k, c1, e0))
        ccde.append((0.25, reorder_register(s, (c0, c1, d0, e0))))
    ccde_dense = MixedEnsemble(tuple(ccde)).to_density()
    mid_reg = mid_branches[0].final_state.register
    ccde_aligned = reorder_register(ccde_dense, mid_reg.qubits)
    checks.append(Check("post-step-2-ccde-form-deviation", float(np.linalg.norm(mid_avg - ccde_aligned.matrix)), "<=", cfg.tolerance))

    # after the first teleportation the transported pair has picked up the
    # sigma of the unknown resource Bell state
    b1 = QubitId("B", 1)
    one = LoccScript(initial=script.initial, steps=script.steps[:2], keep=(c0, b1))
    worst_lemma = 1.0
    for b in run(one):
        i, j = b.component // 4, b.component % 4
        predicted = apply_local(bell_state(j, c0, b1), pauli_on(i, c0))
        worst_lemma = min(worst_lemma, fidelity_pure(b.final_state, predicted))
    checks.append(Check("post-step-1-lemma-min-fidelity", worst_lemma, ">=", 1 - cfg.tolerance))
    return checks


def _checks_ms_all_pairs(cfg: RunConfig) -> list[Check]:
    checks = []
    desc = ms_descriptor()
    pairs = [
        (x, y)
        for k1, x in enumerate(states.MS_PARTIES)
        for y in states.MS_PARTIES[k1 + 1 :]
    ]
    for pair in pairs:
        desc.plan_for_pair(pair)
        script = locc.superactivation_for_pair(pair)
        branches = run(script)
        target = bell_state(BellIndex.PSI_MINUS, QubitId(pair[0], 0), QubitId(pair[1], 0))
        worst = min(fidelity_pure(b.final_state, target) for b in branches)
        total = sum(b.probability for b in branches)
        name = "".join(pair)
        checks.append(Check(f"pair-{name}-branches", float(len(branches)), "==", 1024.0))
        checks.append(Check(f"pair-{name}-min-fidelity", worst, ">=", 1 - cfg.tolerance))
        checks.append(Check(f"pair-{name}-probability-sum-deviation", abs(total - 1.0), "<=", cfg.tolerance))
    return checks


def _cut_reports_smolin(cfg: RunConfig) -> list:
    rho = smolin_state("A", "B", "C", "D").to_density()
    cuts = _smolin_22_cuts(rho.register) + _smolin_13_cuts(rho.register)
    certs = {
        cut_label(cut, rho.register): analysis.smolin_cut_certificate("ABCD", cut)
        for cut in _smolin_22_cuts(rho.register)
    }
    return cut_survey(rho, cuts, certs, tol=cfg.tolerance)


def _cut_reports_m(cfg: RunConfig) -> list:
    rho = m_state().to_density()
    return cut_survey(rho, _m_cuts(rho.register), tol=cfg.tolerance)


def _checks_cuts(cfg: RunConfig) -> list[Check]:
    checks = []
    for rep in _cut_reports_smolin(cfg):
        if rep.reconstruction_error is not None:
            checks.append(Check(f"smolin-{rep.label}-certificate-error", rep.reconstruction_error, "<=", cfg.tolerance))
            checks.append(Check(f"smolin-{rep.label}-min-ppt-eigenvalue", rep.min_ppt_eigenvalue, ">=", -cfg.tolerance))
        else:
            checks.append(Check(f"smolin-{rep.label}-min-ppt-eigenvalue-npt", rep.min_ppt_eigenvalue, "<=", -cfg.tolerance))
    for rep in _cut_reports_m(cfg):
        checks.append(Check(f"m-{rep.label}-min-ppt-eigenvalue-npt", rep.min_ppt_eigenvalue, "<=", -cfg.tolerance))
    rho, cut, cert = disconnected_fixture()
    reports = cut_survey(rho, [cut], {cut_label(cut, rho.register): cert}, tol=cfg.tolerance)
    rep = reports[0]
    checks.append(Check(f"disconnected-{rep.label}-certificate-error", rep.reconstruction_error, "<=", cfg.tolerance))
    checks.append(Check(f"disconnected-{rep.label}-min-ppt-eigenvalue", rep.min_ppt_eigenvalue, ">=", -cfg.tolerance))
    return checks


_SUITES = {
    "bell-identities": _checks_bell_identities,
    "lemma": _checks_lemma,
    "smolin": _checks_smolin,
    "m": _checks_m,
    "superactivation": _checks_superactivation,
    "ms-all-pairs": _checks_ms_all_pairs,
    "cuts": _checks_cuts,
}


# ---------------------------------------------------------------------------
# report emission

def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w") as f:
            f.write(text)
            if not text.endswith("\n"):
                f.write("\n")
    else:
        print(text)


def _verify_report(target: str, checks: list[Check], cfg: RunConfig) -> str:
    passed = all(c.passed for c in checks)
    if cfg.format == "json":
        doc = {
            "schema_version": serialize.SCHEMA_VERSION,
            "target": target,
            "config": {"tolerance": cfg.tolerance, "seed": cfg.seed},
            "checks": [
                {
                    "name": c.name,
                    "measured": c.measured,
                    "op": c.op,
                    "threshold": c.threshold,
                    "passed": c.passed,
                }
                for c in checks
            ],
            "passed": passed,
        }
        return serialize.dumps(doc)
    lines = [f"verify {target}  (tol={cfg.tolerance:g}, seed={cfg.seed})"]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"  {status}  {c.name}: {c.measured!r} {c.op} {c.threshold!r}")
    lines.append(f"{'PASS' if passed else 'FAIL'}: {sum(c.passed for c in checks)}/{len(checks)} checks")
    return "\n".join(lines)


def cmd_verify(target: str, cfg: RunConfig) -> int:
    checks = _SUITES[target](cfg)
    _emit(_verify_report(target, checks, cfg), cfg)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def cmd_export(key: str, form: str | None, cfg: RunConfig) -> int:
    try:
        obj = states.fixture(key)
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(obj, MsDescriptor):
        if form is not None:
            print(
                "error: the symmetrized five-copy state is descriptor-only and has "
                "no dense or ensemble form",
                file=sys.stderr,
            )
            return EXIT_USAGE
    elif isinstance(obj, MixedEnsemble) and form != "ensemble":
        obj = obj.to_density()
    _emit(serialize.dumps(serialize.export_document(obj)), cfg)
    return EXIT_OK


def _sample_run(script: LoccScript, n: int, rng: np.random.Generator) -> dict:
    locc.validate(script)
    weights = np.array([p for p, _ in script.initial.components])
    counts: dict[tuple, int] = {}
    for _ in range(n):
        ci = int(rng.choice(len(weights), p=weights / weights.sum()))
        state = script.initial.components[ci][1]
        env: dict[str, BellIndex] = {}
        for step in script.steps:
            if isinstance(step, locc.BellMeasure):
                outs = bell_measure(state, step.q1, step.q2)
                probs = np.array([p for _, p, _ in outs])
                pick = int(rng.choice(len(outs), p=probs / probs.sum()))
                k, _, state = outs[pick]
                env[step.outcome_var] = k
            else:
                idx = locc.eval_expr(step.index_expr, env)
                state = apply_local(state, pauli_on(idx, step.target))
        key = tuple(sorted((v, int(k)) for v, k in env.items()))
        counts[key] = counts.get(key, 0) + 1
    freq = {
        " ".join(f"{v}={k}" for v, k in key): c / n for key, c in sorted(counts.items())
    }
    return {"shots": n, "frequencies": freq}


def cmd_run(path: str, sample: int | None, cfg: RunConfig) -> int:
    try:
        with open(path) as f:
            script = serialize.loads(f.read())
    except (OSError, ValueError, KeyError) as e:
        print(f"error: cannot load script: {e}", file=sys.stderr)
        return EXIT_USAGE
    if not isinstance(script, LoccScript):
        print("error: file does not contain a protocol script", file=sys.stderr)
        return EXIT_USAGE
    try:
        if sample:
            doc = _sample_run(script, sample, np.random.default_rng(cfg.seed))
            doc = {"schema_version": serialize.SCHEMA_VERSION, "mode": "sample", **doc}
            branches = None
        else:
            branches = run(script)
            doc = {
                "schema_version": serialize.SCHEMA_VERSION,
                "mode": "exact",
                "branch_count": len(branches),
                "probability_sum": float(sum(b.probability for b in branches)),
                "branches": [serialize.branch_to_jsonable(b) for b in branches],
            }
    except LoccValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.format == "json":
        _emit(serialize.dumps(doc), cfg)
    else:
        lines = []
        if branches is None:
            lines.append(f"sampled {doc['shots']} shots")
            for k, v in doc["frequencies"].items():
                lines.append(f"  {k}: {v:.4f}")
        else:
            lines.append(f"{doc['branch_count']} branches, probability sum {doc['probability_sum']:.12f}")
            for b in doc["branches"]:
                outs = " ".join(f"{v}={k}" for v, k in sorted(b["outcomes"].items()))
                lines.append(f"  component={b['component']} p={b['probability']:.6g} {outs}")
        _emit("\n".join(lines), cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellmix",
        description="Build the library's named states, run its protocols, and verify their properties.",
    )
    parser.add_argument("--tol", type=float, default=1e-9, help="check tolerance (default 1e-9)")
    parser.add_argument("--seed", type=int, default=0, help="seed for random test states (default 0)")
    parser.add_argument("--out", default=None, help="write output to this file instead of stdout")
    parser.add_argument("--format", choices=("text", "json"), default="text", help="report format")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run one verification suite")
    p_verify.add_argument("target", choices=VERIFY_TARGETS)

    p_export = sub.add_parser("export", help="serialize a named fixture")
    p_export.add_argument("fixture", help='fixture key: "smolin:ABCD", "m", or "ms"')
    p_export.add_argument(
        "--form",
        choices=("dense", "ensemble"),
        default=None,
        help="dense matrix or component ensemble (default dense where one exists)",
    )

    p_run = sub.add_parser("run", help="execute a protocol script from JSON")
    p_run.add_argument("script", help="path to a serialized script")
    p_run.add_argument(
        "--sample",
        type=int,
        default=None,
        metavar="N",
        help="sample N shots instead of exact enumeration",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            tolerance=args.tol,
            seed=args.seed,
            output_path=args.out,
            format=args.format,
        )
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "verify":
        return cmd_verify(args.target, cfg)
    if args.command == "export":
        return cmd_export(args.fixture, args.form, cfg)
    if args.command == "run":
        return cmd_run(args.script, args.sample, cfg)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
