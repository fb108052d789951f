"""Reduced density matrices for bipartitions of genus-0 anyonic systems.

Region geometry
---------------
A bipartition assigns each anyon to region A or B and names the region that
contains the manifold boundary (on a sphere: the region treated as "outer").
The other region is *inner*.  Unless split into explicit ``sections``, the inner
region is a single disc that contains its anyons and excludes every outer anyon
lying between them in reference order; such outer anyons sit in notches entered
from below, i.e. in the compatible linearisation every inner anyon passes behind
the outer anyons it is gathered across.  Each inner section is a separate disc.
The outer region is the connected complement and keeps the manifold boundary.

The compatible basis of a bipartition gathers every inner section into a block of
consecutive leaves.  Reduction then proceeds without further braiding: the state is
moved into that basis, the outer anyons are traced (quantum trace with
``d``-weights), and finally the cut boundary charges are traced, leaving one charge
line ``a_t`` per section.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ops import (
    BOUNDARY_ID,
    AnyonicOperator,
    BasisDescriptor,
    GeometryError,
    SystemGeometry,
    change_basis,
    relative_word,
    to_physical,
)
from .tree import (
    Labelling,
    TreeShape,
    enumerate_labellings,
    group_blocks,
    make_shape,
    permute_by_word,
    validate_word,
)

REGIONS = ("A", "B")


class ReductionError(ValueError):
    pass


class UnsupportedTopology(ReductionError):
    pass


@dataclass(frozen=True)
class Bipartition:
    """Region assignment of a genus-0 system.

    ``sections`` optionally splits the inner region (the one without the boundary)
    into disjoint discs, listed as tuples of anyon ids.
    """

    A: tuple
    B: tuple
    boundary: str = "B"
    sections: tuple | None = None

    @classmethod
    def from_region_map(cls, region_of: dict, boundary: str = "B", sections=None):
        A = tuple(a for a, r in region_of.items() if r == "A")
        B = tuple(a for a, r in region_of.items() if r == "B")
        return cls(A, B, boundary, sections)

    @property
    def inner(self) -> str:
        return "A" if self.boundary == "B" else "B"

    @property
    def outer(self) -> str:
        return self.boundary

    def region(self, name: str) -> tuple:
        return self.A if name == "A" else self.B

    def region_of(self, anyon_id) -> str:
        return "A" if anyon_id in self.A else "B"

    def validate(self, geometry: SystemGeometry) -> "Bipartition":
        ids = geometry.ids
        if self.boundary not in REGIONS:
            raise GeometryError(f"boundary region must be 'A' or 'B', got {self.boundary!r}")
        A, B = tuple(map(str, self.A)), tuple(map(str, self.B))
        if set(A) & set(B):
            raise GeometryError(f"anyons assigned to both regions: {sorted(set(A) & set(B))}")
        if set(A) | set(B) != set(ids) or len(A) + len(B) != len(ids):
            raise GeometryError("bipartition must assign every anyon of the system exactly once")
        pos = {a: k for k, a in enumerate(ids)}
        A = tuple(sorted(A, key=pos.get))
        B = tuple(sorted(B, key=pos.get))
        inner = A if self.inner == "A" else B
        if self.sections is None:
            sections = (inner,) if inner else ()
        else:
            sections = tuple(tuple(sorted(map(str, s), key=pos.get)) for s in self.sections)
            flat = [a for s in sections for a in s]
            if sorted(flat, key=pos.get) != list(inner) or any(not s for s in sections):
                raise GeometryError("sections must partition the inner region into non-empty parts")
            sections = tuple(sorted(sections, key=lambda s: pos[s[0]]))
        return Bipartition(A, B, self.boundary, sections if self.sections is not None else None), sections


def canonical_compatible_basis(geometry: SystemGeometry, sections) -> BasisDescriptor:
    """Basis in which every inner section occupies consecutive leaves.

    Members of a section are gathered leftwards onto its first member; each step is
    the generator ``(i, +1)`` with the outer leaf ``i`` passing in front of the
    inner leaf ``i + 1``.
    """
    order = list(geometry.ids)
    word = []
    for sec in sections:
        members = set(sec)
        first = min(order.index(a) for a in sec)
        slot = first
        for a in sorted(sec, key=order.index):
            p = order.index(a)
            while p > slot:
                word.append((p, 1))
                order[p - 1], order[p] = order[p], order[p - 1]
                p -= 1
            slot += 1
        assert all(a in members for a in order[first:slot])
    return BasisDescriptor(tuple(order), tuple(word))


def _blocks(order, sections) -> tuple:
    out = []
    for sec in sections:
        pos = sorted(order.index(a) for a in sec)
        out.append((pos[0], pos[-1] + 1))
    return tuple(sorted(out))


@dataclass(frozen=True)
class ReductionPlan:
    keep: str
    keep_inner: bool
    sections: tuple
    target_basis: BasisDescriptor
    embed_word: tuple
    trace_schedule: tuple  # 0-based half-open leaf ranges (target order) that are traced
    boundary_trace: bool

    @property
    def blocks(self) -> tuple:
        return _blocks(list(self.target_basis.tree_order), self.sections)

    @property
    def section_ids(self) -> tuple:
        """Anyon ids of each inner section in tree order of the target basis."""
        order = self.target_basis.tree_order
        return tuple(tuple(order[s:t]) for s, t in self.blocks)

    @property
    def extremity_only(self) -> bool:
        """True when every traced range touches an end of the tree."""
        n = len(self.target_basis.tree_order)
        return all(start == 0 or stop == n for start, stop in self.trace_schedule)


def _check_local_word(word, order, sections, n) -> None:
    blocks = _blocks(list(order), sections)
    inner_pos = {p for s, t in blocks for p in range(s, t)}
    for i, _ in word:
        p, q = i - 1, i
        same_block = any(s <= p and q < t for s, t in blocks)
        both_outer = p not in inner_pos and q not in inner_pos
        if not (same_block or both_outer):
            raise ReductionError(f"letter {(i, _)} is not local to either region")


def is_compatible(system: SystemGeometry, basis: BasisDescriptor, sections) -> bool:
    """True if ``basis`` differs from the canonical compatible basis by local braids only."""
    canon = canonical_compatible_basis(system, sections)
    word = relative_word(canon, basis)
    try:
        _check_local_word(word, canon.tree_order, sections, len(system.ids))
    except ReductionError:
        return False
    return True


def plan_reduction(system: SystemGeometry, basis: BasisDescriptor, part: Bipartition,
                   keep: str, local_word=()) -> ReductionPlan:
    """Plan the reduction onto region ``keep``.

    ``local_word`` optionally appends braids local to the two regions to the target
    basis, giving a different pairs-of-pants decomposition of the same bipartition.
    """
    if system.manifold not in ("disc", "sphere"):
        raise UnsupportedTopology(f"unsupported topology {system.manifold!r}")
    if keep not in REGIONS:
        raise ReductionError(f"keep must be 'A' or 'B', got {keep!r}")
    basis = basis.validate(system)
    _, sections = part.validate(system)
    target = canonical_compatible_basis(system, sections)
    if local_word:
        local_word = validate_word(local_word, len(system.ids))
        _check_local_word(local_word, target.tree_order, sections, len(system.ids))
        target = BasisDescriptor(permute_by_word(target.tree_order, local_word),
                                 target.word + tuple(local_word))
    elif is_compatible(system, basis, sections):
        target = basis
    order = list(target.tree_order)
    blocks = _blocks(order, sections)
    n = len(order)
    keep_inner = keep == part.inner
    if keep_inner:
        schedule, q = [], 0
        for s, t in blocks:
            if s > q:
                schedule.append((q, s))
            q = t
        if q < n:
            schedule.append((q, n))
        if not blocks and n:
            schedule = [(0, n)]
    else:
        schedule = list(blocks)
    return ReductionPlan(
        keep=keep,
        keep_inner=keep_inner,
        sections=sections,
        target_basis=target,
        embed_word=relative_word(basis, target),
        trace_schedule=tuple(schedule),
        boundary_trace=bool(schedule) or (keep_inner and system.has_boundary_leaf),
    )


# --- diagrammatic traces on a single caterpillar ------------------------------------


def _single_tree(rho: AnyonicOperator):
    if len(rho.trees) != 1:
        raise ReductionError("expected an operator on a single fusion tree")
    return rho.trees[0], tuple(rho.leaf_ids[0])


def _accumulate(n_out, groups, X, weights=None):
    out = np.zeros((n_out, n_out), dtype=complex)
    for (src, dst), w in zip(groups, weights if weights is not None else [None] * len(groups)):
        blk = X[np.ix_(src, src)]
        out[np.ix_(dst, dst)] += blk if w is None else w * blk
    return out


def partial_trace_leaves(rho: AnyonicOperator, leaf_ids) -> AnyonicOperator:
    """Quantum-trace a block of leaves at the left or right end of the tree.

    Right end: the running charge ``x`` in front of the block becomes the new root
    and sector ``c`` contributes with weight ``d_c / d_x``.  Left end: the charge
    ``u`` of the traced block stays behind as a cut-boundary leaf (a hole), so the
    result still carries open cut-boundary charges.
    """
    shape, ids = _single_tree(rho)
    model = rho.model
    traced = set(leaf_ids)
    if not traced:
        return rho
    if traced & set(rho.holes):
        raise ReductionError("cannot trace a cut-boundary leaf")
    n = len(ids)
    pos = sorted(ids.index(a) for a in traced)
    k = len(pos)
    if pos == list(range(n - k, n)):
        side = "right"
    elif pos == list(range(k)):
        side = "left"
    else:
        raise ReductionError("traced leaves must form a block at an end of the tree (re-plan)")
    if k == n:
        raise ReductionError("tracing every leaf leaves nothing behind")
    d = model.qdim
    groups = {}
    if side == "right":
        new_ids = ids[: n - k]
        new_shape = TreeShape(shape.leaves[: n - k], tuple(range(model.num_charges)))
        new_labels = enumerate_labellings(model, new_shape)
        new_idx = {l: j for j, l in enumerate(new_labels)}
        for j, (lab,) in enumerate(rho.labels):
            path = lab.path
            x = path[n - k - 1]
            key = (lab.leaves[n - k:], path[n - k - 1:])
            trunc = Labelling.from_path(lab.leaves[: n - k], path[: n - k])
            g = groups.setdefault(key, ([], [], d[lab.total] / d[x]))
            g[0].append(j)
            g[1].append(new_idx[trunc])
        new_holes = rho.holes
    else:
        hole = f"@cut{len(rho.holes)}"
        new_ids = (hole,) + ids[k:]
        new_shape = TreeShape(((tuple(range(model.num_charges))),) + shape.leaves[k:], shape.totals)
        new_labels = enumerate_labellings(model, new_shape)
        new_idx = {l: j for j, l in enumerate(new_labels)}
        for j, (lab,) in enumerate(rho.labels):
            path = lab.path
            u = path[k - 1]
            key = (lab.leaves[:k], path[:k])
            trunc = Labelling.from_path((u,) + lab.leaves[k:], (u,) + path[k:])
            g = groups.setdefault(key, ([], [], 1.0))
            g[0].append(j)
            g[1].append(new_idx[trunc])
        new_holes = rho.holes + (hole,)
    grp = list(groups.values())
    X = _accumulate(len(new_labels), [(s, t) for s, t, _ in grp], rho.matrix, [w for _, _, w in grp])
    return AnyonicOperator(rho.geometry, rho.basis, (new_shape,), (new_ids,),
                           tuple((l,) for l in new_labels), X, new_holes)


def trace_boundary_charges(rho: AnyonicOperator) -> AnyonicOperator:
    """Trace the open cut-boundary charges, leaving a charge-conserving region operator.

    The anyons are fused into their own subtree (F-moves, no braiding) with total
    ``s``; the leading hole charge ``u`` and the root ``x`` are then traced with
    weight ``d_x / d_s``.  Only the single line ``a_t = dual(s)`` remains.
    """
    shape, ids = _single_tree(rho)
    model = rho.model
    d = model.qdim
    holes = [j for j, a in enumerate(ids) if a in rho.holes]
    if holes not in ([], [0]):
        raise ReductionError("expected at most one cut-boundary leaf, in front of the anyons")
    h = len(holes)
    kept_ids = ids[h:]
    if not kept_ids:
        raise ReductionError("no anyons left to keep")
    G, grouped = group_blocks(model, shape, ((h, len(ids)),))
    Xg = G @ rho.matrix @ G.conj().T
    new_shape = TreeShape(shape.leaves[h:], tuple(range(model.num_charges)))
    new_labels = enumerate_labellings(model, new_shape)
    new_idx = {l: j for j, l in enumerate(new_labels)}
    groups = {}
    for j, g in enumerate(grouped):
        sec = g.sections[0]
        ent = groups.setdefault(g.outer, ([], [], d[g.outer.total] / d[sec.total]))
        ent[0].append(j)
        ent[1].append(new_idx[sec])
    grp = list(groups.values())
    X = _accumulate(len(new_labels), [(s, t) for s, t, _ in grp], Xg, [w for _, _, w in grp])
    return AnyonicOperator(rho.geometry, rho.basis, (new_shape,), (kept_ids,),
                           tuple((l,) for l in new_labels), X, ())


# --- sphere form and the grouped (sector) route -------------------------------------


def sphere_layout(geometry: SystemGeometry, tree_order):
    """Shape with the boundary as an explicit last leaf (root trivial) plus the map
    from anyon-tree labellings to sphere labellings."""
    model = geometry.model
    shape = geometry.shape(tree_order)
    labels = enumerate_labellings(model, shape)
    if not geometry.has_boundary_leaf:
        return shape, tuple(tree_order), labels, list(range(len(labels)))
    leaves = shape.leaves + (geometry.boundary_charges,)
    sshape = TreeShape(leaves, (model.trivial,))
    slabels = enumerate_labellings(model, sshape)
    sidx = {l: j for j, l in enumerate(slabels)}
    perm = []
    for lab in labels:
        path = lab.path + (model.trivial,)
        perm.append(sidx[Labelling.from_path(lab.leaves + (model.dual[lab.total],), path)])
    assert len(perm) == len(slabels)
    return sshape, tuple(tree_order) + (BOUNDARY_ID,), slabels, perm


def _grouped_physical(rho_t: AnyonicOperator, blocks):
    """Physical density matrix in the grouped basis of the target tree."""
    geometry = rho_t.geometry
    sshape, sids, slabels, perm = sphere_layout(geometry, rho_t.basis.tree_order)
    P = np.zeros((len(slabels), len(slabels)), dtype=complex)
    P[np.ix_(perm, perm)] = to_physical(rho_t)
    G, grouped = group_blocks(geometry.model, sshape, tuple(blocks))
    return G @ P @ G.conj().T, grouped, sshape, sids


def _outer_unit_layout(model, sshape, sids, blocks):
    units, q, hole_ids, charge_sets = [], 0, [], []
    allc = tuple(range(model.num_charges))
    for j, (s, t) in enumerate(blocks):
        for p in range(q, s):
            units.append(sids[p])
            charge_sets.append(sshape.leaves[p])
        hid = f"@hole{j}"
        units.append(hid)
        hole_ids.append(hid)
        charge_sets.append(allc)
        q = t
    for p in range(q, len(sids)):
        units.append(sids[p])
        charge_sets.append(sshape.leaves[p])
    return tuple(units), tuple(hole_ids), TreeShape(tuple(charge_sets), sshape.totals)


def _section_layout(model, rho_geometry, sections):
    shapes = tuple(
        make_shape(model, [rho_geometry.charges_of[a] for a in sec]) for sec in sections
    )
    import itertools

    labels = tuple(itertools.product(*(enumerate_labellings(model, s) for s in shapes)))
    return shapes, labels


def _sector_reduce(rho_t: AnyonicOperator, plan: ReductionPlan) -> AnyonicOperator:
    model = rho_t.model
    blocks = plan.blocks
    Pg, grouped, sshape, sids = _grouped_physical(rho_t, blocks)
    if plan.keep_inner:
        shapes, labels = _section_layout(model, rho_t.geometry, plan.section_ids)
        idx = {l: j for j, l in enumerate(labels)}
        groups = {}
        for j, g in enumerate(grouped):
            ent = groups.setdefault(g.outer, ([], []))
            ent[0].append(j)
            ent[1].append(idx[g.sections])
        P = _accumulate(len(labels), list(groups.values()), Pg)
        op = AnyonicOperator(rho_t.geometry, plan.target_basis, shapes, plan.section_ids,
                             labels, P, ())
        return op.with_matrix(P / op.weights[:, None])
    units, hole_ids, oshape = _outer_unit_layout(model, sshape, sids, blocks)
    labels = tuple((l,) for l in enumerate_labellings(model, oshape))
    idx = {l: j for j, l in enumerate(labels)}
    groups = {}
    for j, g in enumerate(grouped):
        ent = groups.setdefault(g.sections, ([], []))
        ent[0].append(j)
        ent[1].append(idx[(g.outer,)])
    P = _accumulate(len(labels), list(groups.values()), Pg)
    return AnyonicOperator(rho_t.geometry, plan.target_basis, (oshape,), (units,), labels, P,
                           hole_ids)


def _trivial_region(rho: AnyonicOperator, plan: ReductionPlan) -> AnyonicOperator:
    # empty kept region: one-dimensional, trivial boundary charge
    return AnyonicOperator(rho.geometry, plan.target_basis, (), (), ((),), np.ones((1, 1), complex), ())


def reduced_density_matrix(rho: AnyonicOperator, part: Bipartition, keep: str,
                           plan: ReductionPlan | None = None, route: str = "auto") -> AnyonicOperator:
    """Reduced density matrix of region ``keep``, block diagonal in its boundary charges.

    ``route`` selects ``"extremity"`` (leaf traces at the ends of the tree followed by
    the boundary trace; only for a single kept inner section), ``"sector"`` (trace in
    the grouped basis, always available) or ``"auto"``.
    """
    if not rho.is_full_system:
        raise ReductionError("reduced_density_matrix expects a full-system density matrix")
    system = rho.geometry
    plan = plan or plan_reduction(system, rho.basis, part, keep)
    rho_t = change_basis(rho, plan.target_basis)
    if plan.keep_inner and not plan.sections:
        return _trivial_region(rho, plan)
    if not plan.keep_inner and not plan.sections:
        return rho_t
    if plan.keep_inner and sum(len(s) for s in plan.sections) == len(system.ids):
        # the region is the whole system: its total charge is the system's
        return rho_t
    single = plan.keep_inner and len(plan.sections) == 1
    if route == "auto":
        route = "extremity" if single else "sector"
    if route == "sector":
        return _sector_reduce(rho_t, plan)
    if not single:
        raise ReductionError("the extremity route needs a single kept inner section")
    order = plan.target_basis.tree_order
    (start, stop), = plan.blocks
    out = rho_t
    if stop < len(order):
        out = partial_trace_leaves(out, order[stop:])
    if start > 0:
        out = partial_trace_leaves(out, order[:start])
    return trace_boundary_charges(out)


def reduced_density_matrices(rho: AnyonicOperator, part: Bipartition):
    return {r: reduced_density_matrix(rho, part, r) for r in REGIONS}


# --- embedding of local operators ---------------------------------------------------


def _region_of_operator(obs: AnyonicOperator) -> tuple:
    ids = [a for t in obs.leaf_ids for a in t]
    return tuple(a for a in ids if a not in obs.holes and a != BOUNDARY_ID)


def embed_in_system(obs: AnyonicOperator, system: SystemGeometry, basis: BasisDescriptor,
                    part: Bipartition | None = None, tol: float = 1e-10) -> AnyonicOperator:
    """See :func:`anyent.ops.embed_local_operator`."""
    region_ids = set(_region_of_operator(obs))
    if part is None:
        rest = tuple(a for a in system.ids if a not in region_ids)
        part = Bipartition(tuple(a for a in system.ids if a in region_ids), rest, "B")
    part_v, sections = part.validate(system)
    if region_ids == set(part_v.A):
        keep = "A"
    elif region_ids == set(part_v.B):
        keep = "B"
    else:
        raise ReductionError("operator does not act on a region of the bipartition")
    if obs.cross_sector_norm() > tol:
        raise ReductionError("operator changes the charge on its region's boundary, so it is not local")
    plan = plan_reduction(system, basis, part, keep)
    model = system.model
    target = plan.target_basis
    if plan.keep_inner and not plan.sections:
        from .ops import identity_operator

        I = identity_operator(system, target)
        return change_basis(I.with_matrix(obs.matrix[0, 0] * I.matrix), basis)
    sshape, sids, slabels, perm = sphere_layout(system, target.tree_order)
    G, grouped = group_blocks(model, sshape, plan.blocks)
    if not plan.keep_inner and not plan.sections:
        Osph = np.zeros((len(slabels), len(slabels)), dtype=complex)
        Osph[np.ix_(perm, perm)] = obs.matrix if obs.basis == target else change_basis(obs, target).matrix
    else:
        Og = np.zeros((len(grouped), len(grouped)), dtype=complex)
        if plan.keep_inner:
            if tuple(map(tuple, obs.leaf_ids)) != plan.section_ids:
                raise ReductionError("operator leaf order does not match the region's compatible basis")
            key = [g.sections for g in grouped]
            env = [g.outer for g in grouped]
        else:
            units, _, _ = _outer_unit_layout(model, sshape, sids, plan.blocks)
            if tuple(obs.leaf_ids[0]) != units:
                raise ReductionError("operator leaf order does not match the region's compatible basis")
            key = [(g.outer,) for g in grouped]
            env = [g.sections for g in grouped]
        oi = obs.index
        by_env = {}
        for j, e in enumerate(env):
            by_env.setdefault(e, []).append(j)
        for rows in by_env.values():
            sub = [oi[key[j]] for j in rows]
            Og[np.ix_(rows, rows)] = obs.matrix[np.ix_(sub, sub)]
        Osph = G.conj().T @ Og @ G
    from .ops import full_operator

    full = full_operator(system, Osph[np.ix_(perm, perm)], target)
    return change_basis(full, basis)
