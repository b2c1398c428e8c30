"""JSON serialization for states, scripts, and reports.

The format is a stable contract used by golden files and the command line:

* complex number: two-element array ``[re, im]``
* vector: array of complex numbers
* matrix: row-major array of rows of complex numbers
* qubit: two-element array ``[party, slot]``
* register: array of qubits
* objects carry a ``kind`` discriminator; exported documents carry
  ``schema_version`` so format drift fails loudly instead of silently

``dumps`` emits canonical JSON (sorted keys, fixed separators), so identical
objects serialize to identical bytes.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .analysis import CutReport, SymmetryReport
from .locc import BellMeasure, Branch, ConditionalPauli, LoccScript
from .states import MixedEnsemble, MsDescriptor, fixture
from .tensor import DensityOperator, PureState, QubitId, Register

SCHEMA_VERSION = 1


def _c(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _vector(v: np.ndarray) -> list:
    return [_c(z) for z in v]


def _matrix(m: np.ndarray) -> list:
    return [[_c(z) for z in row] for row in m]


def _qubit(q: QubitId) -> list:
    return [q.party, q.slot]


def _register(reg: Register) -> list:
    return [_qubit(q) for q in reg]


def _read_vector(doc: list) -> np.ndarray:
    return np.array([complex(re, im) for re, im in doc], dtype=complex)


def _read_matrix(doc: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in doc], dtype=complex)


def _read_register(doc: list) -> Register:
    return Register(tuple(QubitId(party, int(slot)) for party, slot in doc))


def to_jsonable(obj: Any) -> dict:
    """Encode a library object as JSON-ready plain data."""
    if isinstance(obj, PureState):
        return {
            "kind": "pure_state",
            "register": _register(obj.register),
            "amplitudes": _vector(obj.amplitudes),
        }
    if isinstance(obj, DensityOperator):
        return {
            "kind": "density_operator",
            "register": _register(obj.register),
            "matrix": _matrix(obj.matrix),
            "trace": float(np.real(np.trace(obj.matrix))),
        }
    if isinstance(obj, MixedEnsemble):
        return {
            "kind": "mixed_ensemble",
            "register": _register(obj.register),
            "components": [
                {"probability": float(p), "amplitudes": _vector(s.amplitudes)}
                for p, s in obj.components
            ],
        }
    if isinstance(obj, MsDescriptor):
        return {"kind": "ms_descriptor", "copies": [list(c) for c in obj.copies]}
    if isinstance(obj, BellMeasure):
        return {
            "kind": "bell_measure",
            "owner": obj.owner,
            "q1": _qubit(obj.q1),
            "q2": _qubit(obj.q2),
            "outcome_var": obj.outcome_var,
        }
    if isinstance(obj, ConditionalPauli):
        return {
            "kind": "conditional_pauli",
            "owner": obj.owner,
            "target": _qubit(obj.target),
            "index_expr": obj.index_expr,
        }
    if isinstance(obj, LoccScript):
        return {
            "kind": "locc_script",
            "initial": to_jsonable(obj.initial),
            "steps": [to_jsonable(s) for s in obj.steps],
            "keep": [_qubit(q) for q in obj.keep],
            "colocations": [list(g) for g in obj.colocations],
        }
    if isinstance(obj, CutReport):
        doc = {
            "kind": "cut_report",
            "label": obj.label,
            "side_a": [_qubit(q) for q in obj.bipartition.side_a],
            "side_b": [_qubit(q) for q in obj.bipartition.side_b],
            "min_ppt_eigenvalue": float(obj.min_ppt_eigenvalue),
            "ppt_verdict": obj.ppt_verdict,
            "has_certificate": obj.certificate is not None,
        }
        if obj.reconstruction_error is not None:
            doc["reconstruction_error"] = float(obj.reconstruction_error)
        return doc
    if isinstance(obj, SymmetryReport):
        return {
            "kind": "symmetry_report",
            "max_distance": float(obj.max_distance),
            "entries": [
                {"permutation": dict(sorted(m.items())), "distance": float(d)}
                for m, d in obj.entries
            ],
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def branch_to_jsonable(branch: Branch, fidelity: float | None = None) -> dict:
    """Encode one branch: outcomes, probability, and optionally a fidelity."""
    doc = {
        "kind": "branch",
        "component": branch.component,
        "probability": float(branch.probability),
        "outcomes": {v: int(k) for v, k in branch.outcomes.items()},
    }
    if fidelity is not None:
        doc["fidelity"] = float(fidelity)
    return doc


def from_jsonable(doc: dict) -> Any:
    """Decode plain data produced by ``to_jsonable`` (or a fixture reference)."""
    kind = doc.get("kind")
    if kind == "pure_state":
        return PureState(_read_register(doc["register"]), _read_vector(doc["amplitudes"]))
    if kind == "density_operator":
        return DensityOperator(_read_register(doc["register"]), _read_matrix(doc["matrix"]))
    if kind == "mixed_ensemble":
        reg = _read_register(doc["register"])
        comps = tuple(
            (float(c["probability"]), PureState(reg, _read_vector(c["amplitudes"])))
            for c in doc["components"]
        )
        return MixedEnsemble(comps)
    if kind == "ms_descriptor":
        return MsDescriptor(tuple(tuple(c) for c in doc["copies"]))
    if kind == "fixture":
        return fixture(doc["key"])
    if kind == "bell_measure":
        return BellMeasure(
            owner=doc["owner"],
            q1=QubitId(doc["q1"][0], int(doc["q1"][1])),
            q2=QubitId(doc["q2"][0], int(doc["q2"][1])),
            outcome_var=doc["outcome_var"],
        )
    if kind == "conditional_pauli":
        return ConditionalPauli(
            owner=doc["owner"],
            target=QubitId(doc["target"][0], int(doc["target"][1])),
            index_expr=doc["index_expr"],
        )
    if kind == "locc_script":
        return LoccScript(
            initial=from_jsonable(doc["initial"]),
            steps=tuple(from_jsonable(s) for s in doc["steps"]),
            keep=tuple(QubitId(p, int(s)) for p, s in doc["keep"]),
            colocations=tuple(tuple(g) for g in doc.get("colocations", [])),
        )
    raise ValueError(f"cannot deserialize kind {kind!r}")


def dumps(doc: Any) -> str:
    """Canonical JSON text: sorted keys, no whitespace variance."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def export_document(obj: Any) -> dict:
    """Wrap an object for file export, stamping the schema version."""
    doc = to_jsonable(obj)
    doc["schema_version"] = SCHEMA_VERSION
    return doc


def loads(text: str) -> Any:
    """Decode a document produced by ``export_document`` or ``to_jsonable``."""
    doc = json.loads(text)
    version = doc.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version}")
    return from_jsonable(doc)
