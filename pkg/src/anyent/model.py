"""Multiplicity-free anyon models: fusion rules, quantum dimensions, F- and R-symbols.

Gauge of the built-in models
----------------------------
All built-ins are triangle-normalised: every F-symbol with a trivial upper index
equals 1, and every R-symbol involving the trivial charge equals 1.

ising
    charges ``1, sigma, psi``.  ``F^{sigma sigma sigma}_sigma = [[1, 1], [1, -1]] / sqrt(2)``,
    ``F^{sigma psi sigma}_psi = F^{psi sigma psi}_sigma = -1``.
    ``R^{sigma sigma}_1 = exp(-i pi/8)``, ``R^{sigma sigma}_psi = exp(3i pi/8)``,
    ``R^{sigma psi}_sigma = R^{psi sigma}_sigma = -i``, ``R^{psi psi}_1 = -1``.
fibonacci
    charges ``1, tau``.  ``F^{tau tau tau}_tau = [[1/phi, 1/sqrt(phi)], [1/sqrt(phi), -1/phi]]``,
    ``R^{tau tau}_1 = exp(-4i pi/5)``, ``R^{tau tau}_tau = exp(3i pi/5)``.
z_n
    charges ``0 .. N-1`` (trivial charge ``0``), addition mod N, all F = R = 1.
    Trivial braiding makes charge strings behave exactly like an N-level qudit register.

F-symbol index convention: ``F[a, b, c, d, e, f]`` is the amplitude in

    |(a b)_e c; d>  =  sum_f  F[a, b, c, d, e, f]  |a (b c)_f; d>

and ``R[a, b, c]`` is the phase picked up when ``a`` and ``b`` (fusing to ``c``) are
exchanged counter-clockwise.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

TOL = 1e-10


class ModelError(ValueError):
    """Structurally invalid model data (unknown charge, missing dual, bad parameter)."""


class ModelSyntaxError(ModelError):
    """The model document could not be parsed."""

    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)


class AxiomViolation(ModelError):
    """Model data fails one of the category axioms."""

    def __init__(self, axiom: str, residual: float):
        self.axiom = axiom
        self.residual = residual
        super().__init__(f"{axiom} violated: residual {residual:.3e}")


@dataclass(frozen=True, eq=False)
class AnyonModel:
    """Immutable data of a multiplicity-free unitary braided fusion category.

    Charges are addressed internally by their index in ``charges``.
    """

    name: str
    charges: tuple[str, ...]
    trivial: int
    dual: tuple[int, ...]
    N: np.ndarray  # N[a, b, c] in {0, 1}
    qdim: np.ndarray
    F: dict = field(repr=False)  # (a, b, c, d, e, f) -> complex
    R: dict = field(repr=False)  # (a, b, c) -> complex

    def __post_init__(self):
        self.N.setflags(write=False)
        self.qdim.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, AnyonModel):
            return NotImplemented
        if (self.name, self.charges, self.trivial, self.dual) != (
            other.name, other.charges, other.trivial, other.dual
        ):
            return False
        if not np.array_equal(self.N, other.N) or not np.array_equal(self.qdim, other.qdim):
            return False
        return self.F == other.F and self.R == other.R

    def __hash__(self):
        return hash((self.name, self.charges))

    @property
    def num_charges(self) -> int:
        return len(self.charges)

    def index(self, label: str) -> int:
        try:
            return self.charges.index(label)
        except ValueError:
            raise ModelError(f"unknown charge {label!r} in model {self.name!r}") from None

    def label(self, a: int) -> str:
        return self.charges[a]

    def fusion_outcomes(self, a: int, b: int) -> tuple:
        return _outcomes(self, a, b)

    def admissible(self, a: int, b: int, c: int) -> bool:
        return bool(self.N[a, b, c])

    def d(self, a: int) -> float:
        return float(self.qdim[a])

    def f_symbol(self, a, b, c, d, e, f) -> complex:
        return self.F.get((a, b, c, d, e, f), 0.0)

    def r_symbol(self, a, b, c) -> complex:
        return self.R.get((a, b, c), 0.0)

    def f_matrix(self, a: int, b: int, c: int, d: int):
        """Return ``(es, fs, M)`` with ``M[i, j] = F[a, b, c, d, es[i], fs[j]]``."""
        return _f_matrix(self, a, b, c, d)

    @property
    def is_abelian(self) -> bool:
        return bool(np.all(np.abs(self.qdim - 1.0) < TOL))


@lru_cache(maxsize=None)
def _outcomes(model: AnyonModel, a: int, b: int) -> tuple:
    return tuple(c for c in range(model.num_charges) if model.N[a, b, c])


@lru_cache(maxsize=None)
def _f_matrix(model: AnyonModel, a, b, c, d):
    es = tuple(e for e in model.fusion_outcomes(a, b) if model.N[e, c, d])
    fs = tuple(f for f in model.fusion_outcomes(b, c) if model.N[a, f, d])
    M = np.zeros((len(es), len(fs)), dtype=complex)
    for i, e in enumerate(es):
        for j, f in enumerate(fs):
            M[i, j] = model.f_symbol(a, b, c, d, e, f)
    M.setflags(write=False)
    return es, fs, M


def _fusion_tensor(n: int, triples) -> np.ndarray:
    N = np.zeros((n, n, n), dtype=int)
    for a, b, c in triples:
        N[a, b, c] = 1
    return N


def _fill_trivial_f(N: np.ndarray, F: dict) -> dict:
    """Every admissible F-symbol not set explicitly is 1 (its block is 1x1 in these models)."""
    n = N.shape[0]
    out = {}
    for a, b, c, d in itertools.product(range(n), repeat=4):
        for e in range(n):
            if not (N[a, b, e] and N[e, c, d]):
                continue
            for f in range(n):
                if N[b, c, f] and N[a, f, d]:
                    out[(a, b, c, d, e, f)] = complex(F.get((a, b, c, d, e, f), 1.0))
    return out


def _ising() -> AnyonModel:
    one, s, p = 0, 1, 2
    triples = [(one, x, x) for x in range(3)] + [(x, one, x) for x in (s, p)]
    triples += [(s, s, one), (s, s, p), (s, p, s), (p, s, s), (p, p, one)]
    N = _fusion_tensor(3, triples)
    r2 = 1 / math.sqrt(2)
    F = {
        (s, s, s, s, one, one): r2, (s, s, s, s, one, p): r2,
        (s, s, s, s, p, one): r2, (s, s, s, s, p, p): -r2,
        (s, p, s, p, s, s): -1.0,
        (p, s, p, s, s, s): -1.0,
    }
    R = {(one, x, x): 1.0 for x in range(3)}
    R.update({(x, one, x): 1.0 for x in range(3)})
    R[(s, s, one)] = cmath.exp(-1j * math.pi / 8)
    R[(s, s, p)] = cmath.exp(3j * math.pi / 8)
    R[(s, p, s)] = -1j
    R[(p, s, s)] = -1j
    R[(p, p, one)] = -1.0
    return AnyonModel(
        name="ising",
        charges=("1", "sigma", "psi"),
        trivial=one,
        dual=(0, 1, 2),
        N=N,
        qdim=np.array([1.0, math.sqrt(2), 1.0]),
        F=_fill_trivial_f(N, F),
        R={k: complex(v) for k, v in R.items()},
    )


def _fibonacci() -> AnyonModel:
    one, t = 0, 1
    N = _fusion_tensor(2, [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)])
    phi = (1 + math.sqrt(5)) / 2
    F = {
        (t, t, t, t, one, one): 1 / phi,
        (t, t, t, t, one, t): 1 / math.sqrt(phi),
        (t, t, t, t, t, one): 1 / math.sqrt(phi),
        (t, t, t, t, t, t): -1 / phi,
    }
    R = {(0, 0, 0): 1.0, (0, 1, 1): 1.0, (1, 0, 1): 1.0}
    R[(t, t, one)] = cmath.exp(-4j * math.pi / 5)
    R[(t, t, t)] = cmath.exp(3j * math.pi / 5)
    return AnyonModel(
        name="fibonacci",
        charges=("1", "tau"),
        trivial=one,
        dual=(0, 1),
        N=N,
        qdim=np.array([1.0, phi]),
        F=_fill_trivial_f(N, F),
        R={k: complex(v) for k, v in R.items()},
    )


def _z_n(n: int) -> AnyonModel:
    N = _fusion_tensor(n, [(a, b, (a + b) % n) for a in range(n) for b in range(n)])
    R = {(a, b, (a + b) % n): 1.0 + 0j for a in range(n) for b in range(n)}
    return AnyonModel(
        name=f"z_{n}",
        charges=tuple(str(a) for a in range(n)),
        trivial=0,
        dual=tuple((-a) % n for a in range(n)),
        N=N,
        qdim=np.ones(n),
        F=_fill_trivial_f(N, {}),
        R=R,
    )


@lru_cache(maxsize=None)
def builtin_model(name: str, parameter: int | None = None) -> AnyonModel:
    """Return one of the built-in models: ``ising``, ``fibonacci`` or ``z_n`` (needs N >= 2)."""
    key = name.lower()
    if key == "ising":
        return _ising()
    if key == "fibonacci":
        return _fibonacci()
    if key in ("z_n", "zn"):
        if parameter is None or int(parameter) != parameter or parameter < 2:
            raise ModelError(f"z_n needs an integer parameter N >= 2, got {parameter!r}")
        return _z_n(int(parameter))
    if key.startswith("z_") and key[2:].isdigit():
        return builtin_model("z_n", int(key[2:]))
    raise ModelError(f"unknown built-in model {name!r}")


# --- axiom checks -------------------------------------------------------------


def check_pentagon(model: AnyonModel) -> float:
    """Maximum absolute residual over all pentagon-equation instances."""
    n = model.num_charges
    Nt = model.N
    Fs = model.f_symbol
    worst = 0.0
    for a, b, c, d in itertools.product(range(n), repeat=4):
        for f in model.fusion_outcomes(a, b):
            for g in model.fusion_outcomes(f, c):
                for e in model.fusion_outcomes(g, d):
                    for l in model.fusion_outcomes(c, d):
                        if not Nt[f, l, e]:
                            continue
                        for k in model.fusion_outcomes(b, l):
                            if not Nt[a, k, e]:
                                continue
                            lhs = Fs(f, c, d, e, g, l) * Fs(a, b, l, e, f, k)
                            rhs = 0j
                            for h in model.fusion_outcomes(b, c):
                                rhs += Fs(a, b, c, g, f, h) * Fs(a, h, d, e, g, k) * Fs(b, c, d, k, h, l)
                            worst = max(worst, abs(lhs - rhs))
    return worst


def check_hexagon(model: AnyonModel) -> float:
    """Maximum residual over both hexagon orientations."""
    n = model.num_charges
    Fs, Rs = model.f_symbol, model.r_symbol
    worst = 0.0
    for a, b, c in itertools.product(range(n), repeat=3):
        for d in range(n):
            es, fs, _ = model.f_matrix(c, a, b, d)
            if not es:
                continue
            for e in model.fusion_outcomes(c, a):
                for g in model.fusion_outcomes(b, c):
                    if not (model.N[e, b, d] and model.N[a, g, d]):
                        continue
                    for sign in (1, -1):
                        def r(x, y, z):
                            v = Rs(x, y, z)
                            return v if sign == 1 else v.conjugate()

                        lhs = r(c, a, e) * Fs(a, c, b, d, e, g) * r(c, b, g)
                        rhs = 0j
                        for f in model.fusion_outcomes(a, b):
                            rhs += Fs(c, a, b, d, e, f) * r(c, f, d) * Fs(a, b, c, d, f, g)
                        worst = max(worst, abs(lhs - rhs))
    return worst


def check_qdim(model: AnyonModel) -> float:
    worst = 0.0
    d = model.qdim
    for a, b in itertools.product(range(model.num_charges), repeat=2):
        worst = max(worst, abs(d[a] * d[b] - float(np.dot(model.N[a, b], d))))
    return worst


def check_f_unitarity(model: AnyonModel) -> float:
    n = model.num_charges
    worst = 0.0
    for a, b, c, d in itertools.product(range(n), repeat=4):
        es, fs, M = model.f_matrix(a, b, c, d)
        if not es and not fs:
            continue
        if len(es) != len(fs):
            return math.inf
        worst = max(worst, float(np.max(np.abs(M.conj().T @ M - np.eye(len(es))))))
    return worst


def check_r_unitarity(model: AnyonModel) -> float:
    worst = 0.0
    for a, b in itertools.product(range(model.num_charges), repeat=2):
        for c in model.fusion_outcomes(a, b):
            worst = max(worst, abs(abs(model.r_symbol(a, b, c)) - 1.0))
    return worst


def check_normalization(model: AnyonModel) -> float:
    """Residual of the triangle gauge: F-symbols with a trivial outer index equal 1."""
    one = model.trivial
    worst = 0.0
    for (a, b, c, d, e, f), v in model.F.items():
        if one in (a, b, c):
            worst = max(worst, abs(v - 1.0))
    return worst


def check_fusion_structure(model: AnyonModel) -> None:
    n, one, N = model.num_charges, model.trivial, model.N
    if N.shape != (n, n, n) or np.any((N != 0) & (N != 1)):
        raise ModelError("fusion multiplicities must be 0 or 1")
    for a in range(n):
        if not (N[a, one, a] and N[one, a, a]):
            raise ModelError(f"trivial charge does not act as identity on {model.charges[a]!r}")
        if model.dual[model.dual[a]] != a:
            raise ModelError(f"dual is not an involution at {model.charges[a]!r}")
        if not N[a, model.dual[a], one]:
            raise ModelError(f"{model.charges[a]!r} does not fuse with its dual to the trivial charge")
    if model.dual[one] != one:
        raise ModelError("dual of the trivial charge must be trivial")
    if np.any(model.qdim <= 0):
        raise ModelError("quantum dimensions must be positive")


AXIOMS = {
    "qdim-consistency": check_qdim,
    "F-unitarity": check_f_unitarity,
    "R-unitarity": check_r_unitarity,
    "F-normalization": check_normalization,
    "pentagon": check_pentagon,
    "hexagon": check_hexagon,
}


def axiom_residuals(model: AnyonModel) -> dict[str, float]:
    return {name: check(model) for name, check in AXIOMS.items()}


def verify_model(model: AnyonModel, tol: float = TOL) -> None:
    """Raise :class:`AxiomViolation` for the first failing axiom."""
    check_fusion_structure(model)
    for name, check in AXIOMS.items():
        res = check(model)
        if not res < tol:
            raise AxiomViolation(name, res)


# --- model documents ----------------------------------------------------------

_MODEL_KEYS = {"name", "charges", "trivial", "dual", "fusion", "qdim", "F", "R"}


def model_to_dict(model: AnyonModel) -> dict:
    lab = model.charges
    n = model.num_charges
    fusion = [
        [lab[a], lab[b], lab[c]]
        for a in range(n) for b in range(n) for c in range(n) if model.N[a, b, c]
    ]
    F = [
        {"a": lab[a], "b": lab[b], "c": lab[c], "d": lab[d], "e": lab[e], "f": lab[f],
         "re": v.real, "im": v.imag}
        for (a, b, c, d, e, f), v in sorted(model.F.items())
    ]
    R = [
        {"a": lab[a], "b": lab[b], "c": lab[c], "re": v.real, "im": v.imag}
        for (a, b, c), v in sorted(model.R.items())
    ]
    return {
        "name": model.name,
        "charges": list(lab),
        "trivial": lab[model.trivial],
        "dual": {lab[a]: lab[model.dual[a]] for a in range(n)},
        "fusion": fusion,
        "qdim": {lab[a]: float(model.qdim[a]) for a in range(n)},
        "F": F,
        "R": R,
    }


def serialize_model(model: AnyonModel) -> str:
    return json.dumps(model_to_dict(model), indent=2, ensure_ascii=False) + "\n"


def _load_json(document: str):
    try:
        return json.loads(document)
    except json.JSONDecodeError as err:
        raise ModelSyntaxError(f"invalid JSON: {err.msg}", err.lineno, err.colno) from None


def model_from_dict(doc: dict, verify: bool = True) -> AnyonModel:
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise ModelError(f"unknown keys in model document: {sorted(unknown)}")
    missing = _MODEL_KEYS - {"F", "R"} - set(doc)
    if missing:
        raise ModelError(f"missing keys in model document: {sorted(missing)}")
    charges = tuple(str(c) for c in doc["charges"])
    if len(set(charges)) != len(charges) or not charges:
        raise ModelError("charges must be a non-empty list of distinct labels")
    idx = {c: i for i, c in enumerate(charges)}

    def ix(label, what):
        try:
            return idx[label]
        except (KeyError, TypeError):
            raise ModelError(f"unknown charge {label!r} in {what}") from None

    trivial = ix(doc["trivial"], "trivial")
    dual_doc = doc["dual"]
    if not isinstance(dual_doc, dict):
        raise ModelError("dual must be an object")
    dual = []
    for c in charges:
        if c not in dual_doc:
            raise ModelError(f"missing dual entry for charge {c!r}")
        dual.append(ix(dual_doc[c], f"dual of {c!r}"))
    triples = []
    for entry in doc["fusion"]:
        if not (isinstance(entry, list) and len(entry) == 3):
            raise ModelError(f"fusion entries must be [a, b, c] triples, got {entry!r}")
        triples.append(tuple(ix(x, "fusion") for x in entry))
    N = _fusion_tensor(len(charges), triples)
    qd = doc["qdim"]
    for c in charges:
        if c not in qd:
            raise ModelError(f"missing qdim entry for charge {c!r}")
    qdim = np.array([float(qd[c]) for c in charges])

    F = {}
    for entry in doc.get("F", []):
        keys = ("a", "b", "c", "d", "e", "f")
        if set(entry) != set(keys) | {"re", "im"}:
            raise ModelError(f"malformed F entry {entry!r}")
        F[tuple(ix(entry[k], "F") for k in keys)] = complex(entry["re"], entry["im"])
    R = {}
    for entry in doc.get("R", []):
        if set(entry) != {"a", "b", "c", "re", "im"}:
            raise ModelError(f"malformed R entry {entry!r}")
        R[tuple(ix(entry[k], "R") for k in "abc")] = complex(entry["re"], entry["im"])

    model = AnyonModel(
        name=str(doc["name"]), charges=charges, trivial=trivial, dual=tuple(dual),
        N=N, qdim=qdim, F=F, R=R,
    )
    if verify:
        verify_model(model)
    return model


def parse_model(document: str, verify: bool = True) -> AnyonModel:
    """Parse a JSON model document; axioms are checked at load time unless ``verify=False``."""
    return model_from_dict(_load_json(document), verify=verify)
