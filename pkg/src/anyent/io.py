"""JSON documents for systems, states, operators, bipartitions and reduced operators.

All parsers are strict: unknown keys are rejected.  Serialisers emit a canonical
layout (fixed key order, entries in labelling order, floats via ``repr``) so that
parse/serialise round trips are byte-identical.

Labelling strings
-----------------
A labelling of one tree is written as its internal charges joined by ``/``.  When
a leaf may carry several charges the leaf charges are prefixed as ``l1,l2,...:``;
when the root charge is not fixed it is appended as ``>root``.  Labellings of a
forest are joined by `` ; `` and an operator entry key is ``ket|bra``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import AnyonModel, ModelError, ModelSyntaxError, builtin_model, model_from_dict, model_to_dict
from .ops import (
    AnyonicOperator,
    AnyonicState,
    BasisDescriptor,
    GeometryError,
    SystemGeometry,
    full_operator,
    make_state,
)
from .reduce import Bipartition
from .tree import Labelling, TreeShape, enumerate_labellings

GENUS_ZERO = ("disc", "sphere")


class DocumentError(ValueError):
    """Malformed or inconsistent input document."""


class UnsupportedFeature(ValueError):
    """Well-formed request outside the supported scope (e.g. genus > 0)."""


def load_json(text: str, what: str = "document"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelSyntaxError(f"invalid JSON in {what}: {err.msg}", err.lineno, err.colno) from None


def read_json(path, what: str = "document"):
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise DocumentError(f"cannot read {what} {str(path)!r}: {err.strerror}") from None
    return load_json(text, what)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _strict(doc, allowed, required, what):
    if not isinstance(doc, dict):
        raise DocumentError(f"{what} must be a JSON object")
    unknown = set(doc) - set(allowed)
    if unknown:
        raise DocumentError(f"unknown keys in {what}: {sorted(unknown)}")
    missing = set(required) - set(doc)
    if missing:
        raise DocumentError(f"missing keys in {what}: {sorted(missing)}")


# --- models and systems -------------------------------------------------------------


def model_from_spec(spec) -> AnyonModel:
    """A built-in name (``"ising"``, ``"fibonacci"``, ``"z_3"``), ``{"builtin", "parameter"}``
    or an inline model document."""
    if isinstance(spec, str):
        try:
            return builtin_model(spec)
        except ModelError as err:
            raise DocumentError(str(err)) from None
    if isinstance(spec, dict) and "builtin" in spec:
        _strict(spec, {"builtin", "parameter"}, {"builtin"}, "model reference")
        try:
            return builtin_model(spec["builtin"], spec.get("parameter"))
        except ModelError as err:
            raise DocumentError(str(err)) from None
    return model_from_dict(spec)


def model_spec(model: AnyonModel):
    for name in ("ising", "fibonacci"):
        if model == builtin_model(name):
            return name
    if model.name.startswith("z_") and model == builtin_model(model.name):
        return model.name
    return model_to_dict(model)


def system_from_dict(doc, model: AnyonModel | None = None) -> SystemGeometry:
    _strict(doc, {"model", "manifold", "anyons", "boundary"}, {"anyons"}, "system document")
    manifold = doc.get("manifold", "disc")
    if manifold not in GENUS_ZERO:
        raise UnsupportedFeature(f"unsupported topology {manifold!r}: only genus-0 manifolds (disc, sphere)")
    if "model" in doc:
        model = model_from_spec(doc["model"])
    if model is None:
        raise DocumentError("system document names no model (use --model)")
    anyons = []
    for entry in doc["anyons"]:
        _strict(entry, {"id", "charge"}, {"id", "charge"}, "anyon entry")
        ch = entry["charge"]
        anyons.append((str(entry["id"]), ch if isinstance(ch, str) else tuple(ch)))
    boundary = doc.get("boundary")
    try:
        return SystemGeometry.build(model, anyons, manifold, boundary)
    except (ModelError, GeometryError, KeyError) as err:
        raise DocumentError(f"invalid system: {err}") from None


def system_to_dict(system: SystemGeometry) -> dict:
    m = system.model
    anyons = []
    for aid, charges in system.anyons:
        if len(charges) == 1:
            ch = m.label(charges[0])
        elif len(charges) == m.num_charges:
            ch = "*"
        else:
            ch = [m.label(c) for c in charges]
        anyons.append({"id": aid, "charge": ch})
    b = system.boundary
    return {
        "model": model_spec(m),
        "manifold": system.manifold,
        "anyons": anyons,
        "boundary": b if b in (None, "free") else m.label(int(b)),
    }


def basis_from_dict(doc, system: SystemGeometry) -> BasisDescriptor:
    if doc is None:
        return system.default_basis()
    _strict(doc, {"tree_order", "word"}, {"tree_order"}, "basis")
    word = []
    for letter in doc.get("word", []):
        if not (isinstance(letter, list) and len(letter) == 2):
            raise DocumentError(f"braid letters are [position, sign] pairs, got {letter!r}")
        word.append((letter[0], letter[1]))
    try:
        return BasisDescriptor(tuple(map(str, doc["tree_order"])), tuple(word)).validate(system)
    except ValueError as err:
        raise DocumentError(f"invalid basis: {err}") from None


def basis_to_dict(basis: BasisDescriptor) -> dict:
    return {"tree_order": list(basis.tree_order), "word": [list(x) for x in basis.word]}


def parse_word(text: str) -> tuple:
    """``"3,-3,2"`` -> ``((3, 1), (3, -1), (2, 1))``."""
    out = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            v = int(tok)
        except ValueError:
            raise DocumentError(f"invalid braid letter {tok!r}") from None
        if v == 0:
            raise DocumentError("braid letters are non-zero signed positions")
        out.append((abs(v), 1 if v > 0 else -1))
    return tuple(out)


# --- labelling strings --------------------------------------------------------------


def format_labelling(model: AnyonModel, shape: TreeShape, lab: Labelling) -> str:
    s = "/".join(model.label(c) for c in lab.internal)
    if any(len(c) > 1 for c in shape.leaves):
        s = ",".join(model.label(c) for c in lab.leaves) + ":" + s
    if len(shape.totals) > 1:
        s += ">" + model.label(lab.total)
    return s


def format_label(model: AnyonModel, trees, label) -> str:
    return " ; ".join(format_labelling(model, sh, lab) for sh, lab in zip(trees, label))


def _label_lookup(model, trees, labels) -> dict:
    return {format_label(model, trees, lab): lab for lab in labels}


# --- states and operators -----------------------------------------------------------


def _num(v):
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v)):
        raise DocumentError(f"amplitudes are [re, im] pairs, got {v!r}")
    return complex(float(v[0]), float(v[1]))


def _pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _entries_dict(keys, values) -> dict:
    return {k: _pair(v) for k, v in zip(keys, values)}


def state_to_dict(psi: AnyonicState) -> dict:
    m = psi.model
    trees = (psi.shape,)
    keep = [k for k, a in enumerate(psi.amp) if a != 0]
    return {
        "kind": "state",
        "system": system_to_dict(psi.geometry),
        "basis": basis_to_dict(psi.basis),
        "total": m.label(psi.shape.totals[0]),
        "entries": _entries_dict([format_label(m, trees, (psi.labels[k],)) for k in keep],
                                 [psi.amp[k] for k in keep]),
    }


def operator_to_dict(op: AnyonicOperator) -> dict:
    m = op.model
    doc = {
        "kind": "operator",
        "system": system_to_dict(op.geometry),
        "basis": basis_to_dict(op.basis),
    }
    if op.is_full_system:
        totals = op.shape.totals
        doc["total"] = m.label(totals[0]) if len(totals) == 1 else "free"
    else:
        doc["kind"] = "reduced"
        doc["trees"] = [
            {"leaves": list(ids), "charges": [[m.label(c) for c in cs] for cs in sh.leaves],
             "totals": [m.label(c) for c in sh.totals]}
            for sh, ids in zip(op.trees, op.leaf_ids)
        ]
        doc["holes"] = list(op.holes)
    names = [format_label(m, op.trees, lab) for lab in op.labels]
    nz = np.argwhere(op.matrix != 0)
    doc["entries"] = {f"{names[i]}|{names[j]}": _pair(op.matrix[i, j]) for i, j in nz}
    return doc


def document_from_dict(doc, system: SystemGeometry | None = None):
    """Parse a state, operator or reduced-operator document."""
    _strict(doc, {"kind", "system", "basis", "total", "entries", "trees", "holes"},
            {"kind", "entries"}, "state/operator document")
    kind = doc["kind"]
    if kind not in ("state", "operator", "reduced"):
        raise DocumentError(f"unknown document kind {kind!r}")
    if "system" in doc:
        own = system_from_dict(doc["system"], system.model if system else None)
        if system is not None and (own.ids != system.ids or own != system):
            raise DocumentError("state document and system document describe different systems")
        system = own
    if system is None:
        raise DocumentError("no system given for the state document")
    basis = basis_from_dict(doc.get("basis"), system)
    m = system.model
    if not isinstance(doc["entries"], dict):
        raise DocumentError("entries must be an object")
    if kind == "reduced":
        return _reduced_from_dict(doc, system, basis)
    total = doc.get("total", "free" if kind == "operator" else None)
    try:
        totals = None if total == "free" else (m.index(total),)
    except (ModelError, KeyError, ValueError):
        raise DocumentError(f"unknown total charge {total!r}") from None
    if kind == "state":
        if totals is None:
            raise DocumentError("a state needs a definite total charge")
        shape = system.shape(basis.tree_order)
        shape = TreeShape(shape.leaves, totals)
        lookup = _label_lookup(m, (shape,), [(l,) for l in enumerate_labellings(m, shape)])
        amps = {}
        for key, v in doc["entries"].items():
            if key not in lookup:
                raise DocumentError(f"labelling {key!r} is not admissible")
            amps[lookup[key][0]] = _num(v)
        try:
            return make_state(system, amps, basis, total=totals[0], normalize=False)
        except ValueError as err:
            raise DocumentError(str(err)) from None
    try:
        shape = system.shape(basis.tree_order)
        if totals is not None:
            shape = TreeShape(shape.leaves, totals)
        labels = [(l,) for l in enumerate_labellings(m, shape)]
        X = _fill(doc["entries"], m, (shape,), labels)
        return full_operator(system, X, basis, totals)
    except GeometryError as err:
        raise DocumentError(str(err)) from None


def _fill(entries, m, trees, labels) -> np.ndarray:
    lookup = {format_label(m, trees, lab): k for k, lab in enumerate(labels)}
    X = np.zeros((len(labels), len(labels)), dtype=complex)
    for key, v in entries.items():
        ket, sep, bra = key.partition("|")
        if not sep or ket not in lookup or bra not in lookup:
            raise DocumentError(f"operator entry {key!r} does not name two admissible labellings")
        X[lookup[ket], lookup[bra]] = _num(v)
    return X


def _reduced_from_dict(doc, system, basis) -> AnyonicOperator:
    import itertools

    m = system.model
    trees, leaf_ids = [], []
    for t in doc.get("trees", []):
        _strict(t, {"leaves", "charges", "totals"}, {"leaves", "charges", "totals"}, "tree")
        try:
            leaves = tuple(tuple(sorted(m.index(c) for c in cs)) for cs in t["charges"])
            totals = tuple(sorted(m.index(c) for c in t["totals"]))
        except (ModelError, KeyError, ValueError) as err:
            raise DocumentError(f"invalid tree: {err}") from None
        if len(leaves) != len(t["leaves"]):
            raise DocumentError("tree leaves and charges differ in length")
        trees.append(TreeShape(leaves, totals))
        leaf_ids.append(tuple(map(str, t["leaves"])))
    labels = list(itertools.product(*(enumerate_labellings(m, s) for s in trees)))
    X = _fill(doc["entries"], m, tuple(trees), labels)
    return AnyonicOperator(system, basis, tuple(trees), tuple(leaf_ids), tuple(labels), X,
                           tuple(map(str, doc.get("holes", []))))


def serialize(obj) -> str:
    if isinstance(obj, AnyonicState):
        return dumps(state_to_dict(obj))
    if isinstance(obj, AnyonicOperator):
        return dumps(operator_to_dict(obj))
    if isinstance(obj, SystemGeometry):
        return dumps(system_to_dict(obj))
    if isinstance(obj, Bipartition):
        return dumps(bipartition_to_dict(obj))
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# --- bipartitions -------------------------------------------------------------------


def bipartition_from_dict(doc, system: SystemGeometry | None = None) -> Bipartition:
    _strict(doc, {"A", "B", "boundary", "sections"}, {"A", "B"}, "bipartition document")
    boundary = doc.get("boundary", "B")
    if boundary not in ("A", "B"):
        raise DocumentError(f"boundary must be 'A' or 'B', got {boundary!r}")
    sections = doc.get("sections")
    if sections is not None:
        sections = tuple(tuple(map(str, s)) for s in sections)
    part = Bipartition(tuple(map(str, doc["A"])), tuple(map(str, doc["B"])), boundary, sections)
    if system is not None:
        try:
            part.validate(system)
        except GeometryError as err:
            raise DocumentError(f"bipartition does not match the system: {err}") from None
    return part


def bipartition_to_dict(part: Bipartition) -> dict:
    doc = {"A": list(part.A), "B": list(part.B), "boundary": part.boundary}
    if part.sections is not None:
        doc["sections"] = [list(s) for s in part.sections]
    return doc
