"""States and operators of anyons on genus-0 manifolds, in explicit fusion-tree bases.

Coefficient convention
----------------------
Operators are stored as dense coefficient matrices over canonically ordered
labellings, ket index first.  Composition is the matrix product inside each
total-charge sector, and the quantum trace closes every root line::

    qtrace(X) = sum_c d_c tr(X_c)

A density matrix ``rho`` with physical (ordinary, trace-one) matrix ``P`` therefore
has coefficients ``X_c = P_c / d_c``.  Observables are stored unscaled, so
``qtrace(rho o O) = Tr(P O)`` is the usual expectation value.

Every operator carries the :class:`BasisDescriptor` of its basis: the fusion-tree
leaf order together with a braid word that moves the anyons from the reference
order of the manifold into that leaf order.  Coefficients in two descriptors are
related by ``c_2 = M(w_2) M(w_1)^{-1} c_1`` with ``M`` the braid-word matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .model import AnyonModel, ModelError
from .tree import (
    Labelling,
    TreeShape,
    braid_word_matrix,
    enumerate_labellings,
    invert_word,
    make_shape,
    permute_by_word,
    reduce_word,
    validate_word,
)

PRUNE = 1e-14
MANIFOLDS = ("disc", "sphere")
BOUNDARY_ID = "@boundary"


class GeometryError(ValueError):
    pass


class BasisMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SystemGeometry:
    """Anyons in reference order on a disc or sphere.

    ``boundary`` is ``None`` (trivial boundary charge / sphere), ``"free"``, or the
    index of a fixed boundary charge.  Each anyon carries a tuple of allowed charges.
    """

    model: AnyonModel
    manifold: str
    anyons: tuple  # ((id, (charge, ...)), ...)
    boundary: object = None

    def __post_init__(self):
        if self.manifold not in MANIFOLDS:
            raise GeometryError(f"unsupported manifold {self.manifold!r}")
        if self.manifold == "sphere" and self.boundary is not None:
            raise GeometryError("a sphere has no boundary charge")
        ids = self.ids
        if len(set(ids)) != len(ids):
            raise GeometryError("anyon ids must be unique")
        if not ids:
            raise GeometryError("a system needs at least one anyon")
        if BOUNDARY_ID in ids:
            raise GeometryError(f"{BOUNDARY_ID!r} is reserved")
        for aid, charges in self.anyons:
            if not charges or any(not 0 <= c < self.model.num_charges for c in charges):
                raise GeometryError(f"invalid charges for anyon {aid!r}")
        if self.boundary not in (None, "free"):
            if not 0 <= int(self.boundary) < self.model.num_charges:
                raise GeometryError("invalid boundary charge")

    @classmethod
    def build(cls, model: AnyonModel, anyons, manifold: str = "disc", boundary=None):
        """Convenience constructor taking charge labels; ``"*"`` allows every charge."""
        items = []
        for aid, ch in anyons:
            if ch == "*":
                charges = tuple(range(model.num_charges))
            elif isinstance(ch, str):
                charges = (model.index(ch),)
            else:
                charges = tuple(sorted(model.index(c) for c in ch))
            items.append((str(aid), charges))
        if isinstance(boundary, str) and boundary != "free":
            boundary = model.index(boundary)
        return cls(model, manifold, tuple(items), boundary)

    @property
    def ids(self) -> tuple:
        return tuple(a for a, _ in self.anyons)

    @cached_property
    def charges_of(self) -> dict:
        return dict(self.anyons)

    @property
    def anyon_totals(self) -> tuple:
        m = self.model
        if self.boundary is None:
            return (m.trivial,)
        if self.boundary == "free":
            return tuple(range(m.num_charges))
        return (m.dual[int(self.boundary)],)

    @property
    def has_boundary_leaf(self) -> bool:
        return self.boundary == "free" or (
            self.boundary is not None and int(self.boundary) != self.model.trivial
        )

    @property
    def boundary_charges(self) -> tuple:
        if self.boundary == "free":
            return tuple(range(self.model.num_charges))
        return (int(self.boundary),)

    def shape(self, tree_order) -> TreeShape:
        return make_shape(self.model, [self.charges_of[a] for a in tree_order], self.anyon_totals)

    def default_basis(self) -> "BasisDescriptor":
        return BasisDescriptor(self.ids, ())


@dataclass(frozen=True)
class BasisDescriptor:
    """Leaf order of the fusion tree plus the braid word realising it from the reference order."""

    tree_order: tuple
    word: tuple = ()

    def validate(self, geometry: SystemGeometry) -> "BasisDescriptor":
        word = validate_word(self.word, len(geometry.ids))
        if permute_by_word(geometry.ids, word) != tuple(self.tree_order):
            raise GeometryError(
                f"braid word does not carry the reference order to tree order {self.tree_order}"
            )
        return BasisDescriptor(tuple(self.tree_order), word)


def relative_word(source: BasisDescriptor, target: BasisDescriptor) -> tuple:
    """Braid word acting on the source tree that yields the target basis coefficients."""
    return reduce_word(invert_word(source.word) + tuple(target.word))


_LAYOUT_CACHES = ("index", "weights", "_hole_positions", "sectors", "_sector_ids")


@dataclass(frozen=True, eq=False)
class AnyonicOperator:
    """Operator on one or more caterpillar trees (several trees = disjoint sections).

    ``labels`` holds one tuple of :class:`Labelling` (one per tree) per basis
    element; ``holes`` lists leaf ids that stand for cut boundaries whose charges
    label superselection sectors.
    """

    geometry: SystemGeometry
    basis: BasisDescriptor
    trees: tuple  # tuple[TreeShape, ...]
    leaf_ids: tuple  # tuple[tuple[str, ...], ...]
    labels: tuple
    matrix: np.ndarray = field(repr=False)
    holes: tuple = ()

    @property
    def model(self) -> AnyonModel:
        return self.geometry.model

    @property
    def shape(self) -> TreeShape:
        if len(self.trees) != 1:
            raise ValueError("operator lives on several trees")
        return self.trees[0]

    @property
    def dim(self) -> int:
        return len(self.labels)

    @cached_property
    def index(self) -> dict:
        return {lab: k for k, lab in enumerate(self.labels)}

    @cached_property
    def weights(self) -> np.ndarray:
        d = self.model.qdim
        return np.array([np.prod([d[t.total] for t in lab]) for lab in self.labels])

    @cached_property
    def _hole_positions(self) -> tuple:
        pos = []
        for t, ids in enumerate(self.leaf_ids):
            for j, lid in enumerate(ids):
                if lid in self.holes:
                    pos.append((t, j))
        return tuple(pos)

    def sector_key(self, label) -> tuple:
        """Superselection sector: hole charges followed by the root charges."""
        holes = tuple(label[t].leaves[j] for t, j in self._hole_positions)
        return holes + tuple(lab.total for lab in label)

    def sector_label(self, label) -> tuple:
        """Boundary charges of the region: hole charges and duals of free root charges."""
        m = self.model
        out = [label[t].leaves[j] for t, j in self._hole_positions]
        for tree, lab in zip(self.trees, label):
            if len(tree.totals) > 1:
                out.append(m.dual[lab.total])
        return tuple(out) if out else (m.trivial,)

    @cached_property
    def sectors(self) -> dict:
        out = {}
        for k, lab in enumerate(self.labels):
            out.setdefault(self.sector_key(lab), []).append(k)
        return out

    @property
    def is_full_system(self) -> bool:
        return len(self.trees) == 1 and not self.holes and tuple(self.leaf_ids[0]) == tuple(
            self.basis.tree_order
        ) and set(self.leaf_ids[0]) == set(self.geometry.ids)

    def coeff(self) -> dict:
        """Sparse view ``{(ket, bra): value}`` with entries below the pruning threshold dropped."""
        nz = np.argwhere(np.abs(self.matrix) > PRUNE)
        return {(self.labels[i], self.labels[j]): complex(self.matrix[i, j]) for i, j in nz}

    @cached_property
    def _sector_ids(self) -> np.ndarray:
        ids = np.empty(self.dim, dtype=int)
        for s, members in enumerate(self.sectors.values()):
            ids[members] = s
        return ids

    def with_matrix(self, matrix: np.ndarray) -> "AnyonicOperator":
        out = AnyonicOperator(
            self.geometry, self.basis, self.trees, self.leaf_ids, self.labels, matrix, self.holes
        )
        # layout-only caches carry over
        for name in _LAYOUT_CACHES:
            if name in self.__dict__:
                out.__dict__[name] = self.__dict__[name]
        return out

    def dagger(self) -> "AnyonicOperator":
        return self.with_matrix(self.matrix.conj().T)

    def cross_sector_norm(self) -> float:
        """Largest coefficient connecting two different sectors (zero for physical operators)."""
        ids = self._sector_ids
        off = ids[:, None] != ids[None, :]
        return float(np.abs(self.matrix[off]).max(initial=0.0))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) < tol)


@dataclass(frozen=True, eq=False)
class AnyonicState:
    geometry: SystemGeometry
    basis: BasisDescriptor
    shape: TreeShape
    labels: tuple
    amp: np.ndarray = field(repr=False)

    @property
    def model(self) -> AnyonModel:
        return self.geometry.model

    def normalized(self) -> "AnyonicState":
        norm = np.linalg.norm(self.amp)
        if norm == 0:
            raise ValueError("cannot normalise the zero state")
        return AnyonicState(self.geometry, self.basis, self.shape, self.labels, self.amp / norm)

    def amplitudes(self) -> dict:
        return {lab: complex(a) for lab, a in zip(self.labels, self.amp) if abs(a) > PRUNE}


# --- constructors ---------------------------------------------------------------


def _full_layout(geometry: SystemGeometry, basis: BasisDescriptor, totals=None):
    basis = basis.validate(geometry)
    shape = geometry.shape(basis.tree_order)
    if totals is not None:
        allowed = set(geometry.anyon_totals)
        if not set(totals) <= allowed:
            raise GeometryError("requested total charge is not allowed by the boundary")
        shape = TreeShape(shape.leaves, tuple(sorted(totals)))
    return basis, shape, enumerate_labellings(geometry.model, shape)


def make_state(geometry: SystemGeometry, amplitudes, basis: BasisDescriptor | None = None,
               total: int | None = None, normalize: bool = True) -> AnyonicState:
    """Build a state from ``{Labelling: amplitude}`` or a vector over the sector's labellings."""
    basis = basis or geometry.default_basis()
    if total is None:
        if len(geometry.anyon_totals) != 1:
            raise GeometryError("a state needs a definite total charge")
        total = geometry.anyon_totals[0]
    basis, shape, labels = _full_layout(geometry, basis, (total,))
    if isinstance(amplitudes, dict):
        idx = {lab: k for k, lab in enumerate(labels)}
        amp = np.zeros(len(labels), dtype=complex)
        for lab, v in amplitudes.items():
            if lab not in idx:
                raise BasisMismatch(f"labelling {lab} is not admissible")
            amp[idx[lab]] = v
    else:
        amp = np.asarray(amplitudes, dtype=complex)
        if amp.shape != (len(labels),):
            raise BasisMismatch(f"expected {len(labels)} amplitudes, got {amp.shape}")
    st = AnyonicState(geometry, basis, shape, labels, amp)
    return st.normalized() if normalize else st


def full_operator(geometry: SystemGeometry, matrix, basis: BasisDescriptor | None = None,
                  totals=None) -> AnyonicOperator:
    basis = basis or geometry.default_basis()
    basis, shape, labels = _full_layout(geometry, basis, totals)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (len(labels), len(labels)):
        raise BasisMismatch(f"expected a {len(labels)}x{len(labels)} matrix, got {matrix.shape}")
    return AnyonicOperator(
        geometry, basis, (shape,), (tuple(basis.tree_order),), tuple((l,) for l in labels), matrix
    )


def identity_operator(geometry: SystemGeometry, basis: BasisDescriptor | None = None) -> AnyonicOperator:
    basis = basis or geometry.default_basis()
    _, _, labels = _full_layout(geometry, basis)
    return full_operator(geometry, np.eye(len(labels)), basis)


def outer_product(psi: AnyonicState, phi: AnyonicState) -> AnyonicOperator:
    """``|psi><phi|`` as a coefficient map, normalised so that ``psi = phi`` has qtrace 1.

    For a non-trivial total charge ``c`` the closed root line contributes ``d_c``, so
    the coefficients carry a compensating ``1 / d_c``.
    """
    if psi.geometry != phi.geometry or psi.basis != phi.basis or psi.shape != phi.shape:
        raise BasisMismatch("outer product needs states in the same geometry and basis")
    geometry = psi.geometry
    _, shape, labels = _full_layout(geometry, psi.basis)
    idx = {lab: k for k, lab in enumerate(labels)}
    rows = [idx[l] for l in psi.labels]
    X = np.zeros((len(labels), len(labels)), dtype=complex)
    c = psi.shape.totals[0]
    X[np.ix_(rows, rows)] = np.outer(psi.amp, phi.amp.conj()) / geometry.model.d(c)
    return AnyonicOperator(
        geometry, psi.basis, (shape,), (tuple(psi.basis.tree_order),), tuple((l,) for l in labels), X
    )


def density_matrix(psi: AnyonicState) -> AnyonicOperator:
    return outer_product(psi, psi)


def mixture(ops, probs) -> AnyonicOperator:
    ops = list(ops)
    X = sum(p * o.matrix for o, p in zip(ops, probs))
    return ops[0].with_matrix(X)


# --- algebra --------------------------------------------------------------------


def _same_layout(a: AnyonicOperator, b: AnyonicOperator) -> bool:
    return (a.geometry == b.geometry and a.basis == b.basis and a.trees == b.trees
            and a.leaf_ids == b.leaf_ids and a.holes == b.holes)


def compose(a: AnyonicOperator, b: AnyonicOperator) -> AnyonicOperator:
    """Diagrammatic stacking ``a o b`` (``b`` acts first)."""
    if not _same_layout(a, b):
        raise BasisMismatch("operators live in different bases; call change_basis first")
    return a.with_matrix(a.matrix @ b.matrix)


def qtrace(op: AnyonicOperator) -> complex:
    """Quantum trace: every root line closed into a loop of weight ``d``."""
    return complex(np.dot(op.weights, np.diag(op.matrix)))


def change_basis(op: AnyonicOperator, target: BasisDescriptor) -> AnyonicOperator:
    """Re-express a full-system operator in another basis descriptor (braid conjugation)."""
    if not op.is_full_system:
        raise BasisMismatch("change_basis applies to full-system operators")
    geometry = op.geometry
    target = target.validate(geometry)
    if target == op.basis:
        return op
    word = relative_word(op.basis, target)
    totals = op.shape.totals
    U, out_shape = braid_word_matrix(geometry.model, op.shape, word)
    if tuple(target.tree_order) != permute_by_word(op.basis.tree_order, word):
        raise BasisMismatch("target basis unreachable")  # pragma: no cover
    labels = enumerate_labellings(geometry.model, out_shape)
    assert out_shape.totals == totals
    return AnyonicOperator(
        geometry, target, (out_shape,), (tuple(target.tree_order),), tuple((l,) for l in labels),
        U @ op.matrix @ U.conj().T,
    )


def change_state_basis(psi: AnyonicState, target: BasisDescriptor) -> AnyonicState:
    target = target.validate(psi.geometry)
    word = relative_word(psi.basis, target)
    U, out_shape = braid_word_matrix(psi.model, psi.shape, word)
    return AnyonicState(psi.geometry, target, out_shape, enumerate_labellings(psi.model, out_shape),
                        U @ psi.amp)


def expectation(rho: AnyonicOperator, obs: AnyonicOperator) -> complex:
    """``qTr(rho o obs)``; a full-system ``rho`` is first moved into the basis of ``obs``."""
    if rho.geometry != obs.geometry:
        raise GeometryError("expectation needs operators on the same system")
    if rho.basis != obs.basis and rho.is_full_system and obs.is_full_system:
        if rho.shape.totals != obs.shape.totals:
            raise BasisMismatch("operators restrict the total charge differently")
        rho = change_basis(rho, obs.basis)
    return qtrace(compose(rho, obs))


def to_physical(op: AnyonicOperator) -> np.ndarray:
    """Ordinary matrix of the operator when read as a density matrix (``d``-weights absorbed)."""
    return op.matrix * op.weights[:, None]


def embed_local_operator(obs: AnyonicOperator, system: SystemGeometry, basis: BasisDescriptor,
                         part=None) -> AnyonicOperator:
    """Embed an operator local to one region (in the layout produced by ``reduce``) into
    the whole system, acting as the identity elsewhere, expressed in ``basis``.

    ``part`` is the :class:`~anyent.reduce.Bipartition` defining the region on the
    manifold; by default the region is the set of the operator's anyons with the
    standard geometry.
    """
    from .reduce import embed_in_system

    return embed_in_system(obs, system, basis, part)


def charge_labels(model: AnyonModel, charges) -> str:
    return ",".join(model.label(c) for c in charges)


def check_model_of(geometry: SystemGeometry, model: AnyonModel) -> None:
    if geometry.model != model:
        raise ModelError("geometry belongs to a different model")
