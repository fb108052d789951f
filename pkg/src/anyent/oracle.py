"""Brute-force verifiers and the seeded random trial corpus.

``check_defining_property`` tests a reduced density matrix against its definition:
for every matrix unit ``O`` of the region's boundary-charge-preserving operators,
``qTr(rho_A O)`` must equal ``qTr(rho O_hat)`` with ``O_hat`` the embedding of ``O``
into the full system.  ``abelian_reference_entropy`` recomputes entropies of
``z_n`` systems as ordinary qudit registers with dense ``einsum`` partial traces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .entropy import CLIP_TOL, EntropyReport, SectorSpectrum, renyi_entropy, sector_blocks, von_neumann_entropy
from .model import builtin_model
from .ops import (
    BOUNDARY_ID,
    AnyonicOperator,
    AnyonicState,
    BasisDescriptor,
    SystemGeometry,
    change_basis,
    compose,
    density_matrix,
    embed_local_operator,
    expectation,
    full_operator,
    identity_operator,
    make_state,
    qtrace,
    to_physical,
)
from .reduce import Bipartition, plan_reduction, reduced_density_matrix, sphere_layout
from .tree import braid_word_matrix, enumerate_labellings, group_blocks, permute_by_word


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorBasis:
    """Matrix units spanning the boundary-charge-preserving operators of a region."""

    elements: tuple
    region: str

    def __len__(self) -> int:
        return len(self.elements)

    def gram_rank(self) -> int:
        vecs = np.array([e.matrix.ravel() for e in self.elements])
        if not len(vecs):
            return 0
        return int(np.linalg.matrix_rank(vecs.conj() @ vecs.T))


def _matrix_units(template: AnyonicOperator) -> tuple:
    template.weights, template._sector_ids  # computed once, shared by every unit
    out = []
    for _, idx in sector_blocks(template):
        for i in idx:
            for j in idx:
                E = np.zeros((template.dim, template.dim), dtype=complex)
                E[i, j] = 1.0
                out.append(template.with_matrix(E))
    return tuple(out)


def operator_basis_local(system: SystemGeometry, part: Bipartition, region: str,
                         basis: BasisDescriptor | None = None) -> OperatorBasis:
    """Matrix-unit basis of the charge-conserving operators local to ``region``, in the
    layout produced by ``reduce``."""
    basis = basis or system.default_basis()
    I = identity_operator(system, basis)
    template = reduced_density_matrix(I.with_matrix(I.matrix / qtrace(I)), part, region)
    return OperatorBasis(_matrix_units(template), region)


def check_defining_property(rho: AnyonicOperator, rho_A: AnyonicOperator, part: Bipartition,
                            region: str) -> float:
    """Largest deviation ``|qTr(rho_A O) - qTr(rho O_hat)|`` over the matrix units of rho_A's space.

    Returns ``inf`` when ``rho_A`` does not describe ``region`` of ``part``.
    """
    if rho_A.is_full_system:
        if set(part.region(region)) != set(rho.geometry.ids):
            return float("inf")
        return _full_region_check(rho, rho_A)
    worst = 0.0
    try:
        for E in _matrix_units(rho_A):
            lhs = qtrace(compose(rho_A, E))
            rhs = expectation(rho, embed_local_operator(E, rho.geometry, rho.basis, part))
            worst = max(worst, abs(lhs - rhs))
    except ValueError:
        return float("inf")
    return float(worst)


def _full_region_check(rho, rho_A) -> float:
    worst = 0.0
    for E in _matrix_units(rho_A):
        worst = max(worst, abs(qtrace(compose(rho_A, E)) - expectation(rho, E)))
    return float(worst)


# --- Abelian qudit reference --------------------------------------------------------


def _qudit_density(rho: AnyonicOperator) -> tuple:
    """Physical density matrix as a tensor over per-anyon charges in reference order.

    With a free boundary the total charge is one more qudit, listed last under the
    boundary id.
    """
    system = rho.geometry
    N = system.model.num_charges
    ids = tuple(system.ids)
    order = rho.basis.tree_order
    to_ref = [order.index(a) for a in ids]
    free = system.boundary == "free"
    keys = [tuple(lab.leaves[p] for p in to_ref) + ((lab.total,) if free else ())
            for lab, in rho.labels]
    if free:
        ids = ids + (BOUNDARY_ID,)
    flat = np.ravel_multi_index(np.array(keys).T, (N,) * len(ids))
    D = N ** len(ids)
    M = np.zeros((D, D), dtype=complex)
    M[np.ix_(flat, flat)] = to_physical(rho)
    return M.reshape((N,) * (2 * len(ids))), ids


def abelian_reference_entropy(rho, part: Bipartition, region: str = "A",
                              orders=(0.5, 2.0, 3.0)) -> EntropyReport:
    """Entropies of region ``region`` treating a ``z_n`` system as a qudit register."""
    if isinstance(rho, AnyonicState):
        rho = density_matrix(rho)
    model = rho.model
    if not model.is_abelian or any(v != 1 for v in model.R.values()):
        raise OracleError("the qudit reference needs an Abelian model with trivial braiding")
    T, ids = _qudit_density(rho)
    n = len(ids)
    owned = set(map(str, part.region(region)))
    if region == part.boundary:
        owned.add(BOUNDARY_ID)
    keep = [k for k, a in enumerate(ids) if a in owned]
    letters = "abcdefghijklmnopqrstuvwxyz"
    ket = list(letters[:n])
    bra = list(letters[n:2 * n].upper())
    for k in range(n):
        if k not in keep:
            bra[k] = ket[k]
    out = "".join(ket[k] for k in keep) + "".join(bra[k] for k in keep)
    R = np.einsum("".join(ket) + "".join(bra) + "->" + out, T)
    D = model.num_charges ** len(keep)
    ev = np.linalg.eigvalsh(R.reshape(D, D))
    ev = np.where(ev < CLIP_TOL, 0.0, ev)
    spec = (SectorSpectrum((), tuple(float(x) for x in np.sort(ev)[::-1])),)
    return EntropyReport(spec, von_neumann_entropy(spec), {float(q): renyi_entropy(spec, q) for q in orders})


# --- random ingredients -------------------------------------------------------------


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(dim, random_state=rng)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = rank or dim
    A = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    P = A @ A.conj().T
    return P / np.trace(P).real


def random_word(n: int, length: int, rng: np.random.Generator) -> tuple:
    if n < 2:
        return ()
    return tuple((int(rng.integers(1, n)), int(rng.choice((-1, 1)))) for _ in range(length))


def random_basis(system: SystemGeometry, rng: np.random.Generator, max_len: int = 4) -> BasisDescriptor:
    word = random_word(len(system.ids), int(rng.integers(0, max_len + 1)), rng)
    return BasisDescriptor(permute_by_word(system.ids, word), word)


def random_density_operator(system: SystemGeometry, basis: BasisDescriptor,
                            rng: np.random.Generator, pure: bool = False) -> AnyonicOperator:
    """Random density matrix, block diagonal in the total charge (superselection)."""
    I = identity_operator(system, basis)
    totals = sorted({lab[0].total for lab in I.labels})
    if pure:
        c = totals[int(rng.integers(len(totals)))]
        dim = sum(1 for lab in I.labels if lab[0].total == c)
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return density_matrix(make_state(system, v, basis, total=c))
    P = np.zeros((I.dim, I.dim), dtype=complex)
    probs = rng.dirichlet(np.ones(len(totals)))
    for c, p in zip(totals, probs):
        idx = [k for k, lab in enumerate(I.labels) if lab[0].total == c]
        P[np.ix_(idx, idx)] = p * random_density(len(idx), rng, rank=int(rng.integers(1, len(idx) + 1)))
    return I.with_matrix(P / I.weights[:, None])


def random_bipartition(system: SystemGeometry, rng: np.random.Generator,
                       allow_sections: bool = True) -> Bipartition:
    ids = list(system.ids)
    n = len(ids)
    while True:
        mask = rng.random(n) < 0.5
        if 0 < mask.sum() < n:
            break
    inner = [a for a, m in zip(ids, mask) if m]
    outer = [a for a, m in zip(ids, mask) if not m]
    boundary = str(rng.choice(("A", "B")))
    inner_name = "A" if boundary == "B" else "B"
    sections = None
    if allow_sections and len(inner) >= 2 and rng.random() < 0.35:
        cut = int(rng.integers(1, len(inner)))
        perm = list(rng.permutation(inner))
        sections = (tuple(perm[:cut]), tuple(perm[cut:]))
    A, B = (inner, outer) if inner_name == "A" else (outer, inner)
    return Bipartition(tuple(A), tuple(B), boundary, sections)


def local_unitary(system: SystemGeometry, part: Bipartition, basis: BasisDescriptor,
                  rng: np.random.Generator, braids: int = 2) -> AnyonicOperator:
    """Random product of unitaries local to A and to B, returned as a full-system operator in ``basis``.

    In the grouped compatible basis it acts as ``sum_s U_in(s) x U_out(s)`` (one factor
    per inner section), followed by pure braids ``sigma_i^{+-2}`` local to one region.
    """
    model = system.model
    plan = plan_reduction(system, basis, part, "A")
    target = plan.target_basis
    sshape, _, slabels, perm = sphere_layout(system, target.tree_order)
    G, grouped = group_blocks(model, sshape, plan.blocks)
    sec_u = {}
    out_u = {}

    def unitary_for(store, key, members):
        if key not in store:
            store[key] = ({m: k for k, m in enumerate(members)}, random_unitary(len(members), rng))
        return store[key]

    edge = system.has_boundary_leaf

    def outer_key(g):
        # the manifold boundary charge is superselected as well
        return tuple(sec.total for sec in g.sections) + ((g.outer.leaves[-1],) if edge else ())

    sec_members, out_members = {}, {}
    for g in grouped:
        s = tuple(sec.total for sec in g.sections)
        for j, sec in enumerate(g.sections):
            sec_members.setdefault((j, sec.total), set()).add(sec)
        out_members.setdefault(outer_key(g), set()).add(g.outer)
    for key, members in sec_members.items():
        unitary_for(sec_u, key, sorted(members))
    for key, members in out_members.items():
        unitary_for(out_u, key, sorted(members))
    D = len(grouped)
    U = np.zeros((D, D), dtype=complex)
    for a, ga in enumerate(grouped):
        ka = outer_key(ga)
        ia, Vo = out_u[ka]
        for b, gb in enumerate(grouped):
            if outer_key(gb) != ka:
                continue
            amp = Vo[ia[ga.outer], ia[gb.outer]]
            for j, (x, y) in enumerate(zip(ga.sections, gb.sections)):
                ij, Uj = sec_u[(j, x.total)]
                amp *= Uj[ij[x], ij[y]]
            U[a, b] = amp
    Usph = G.conj().T @ U @ G
    Uful = Usph[np.ix_(perm, perm)]
    blocks = plan.blocks
    inner = {p for s, t in blocks for p in range(s, t)}
    n = len(target.tree_order)
    local = [i for i in range(1, n)
             if any(s <= i - 1 and i < t for s, t in blocks) or (i - 1 not in inner and i not in inner)]
    shape = system.shape(target.tree_order)
    for _ in range(braids if local else 0):
        i = int(rng.choice(local))
        s = int(rng.choice((-1, 1)))
        M, out_shape = braid_word_matrix(model, shape, ((i, s), (i, s)))
        assert out_shape == shape
        Uful = M @ Uful
    return change_basis(full_operator(system, Uful, target), basis)


def conjugate(rho: AnyonicOperator, U: AnyonicOperator) -> AnyonicOperator:
    return compose(compose(U, rho), U.dagger())


# --- corpus -------------------------------------------------------------------------


CORPUS_MODELS = ("ising", "fibonacci", "z_2", "z_3")

_CHARGE_CHOICES = {
    "ising": (("sigma",), ("sigma",), ("sigma",), ("psi",), ("1", "sigma"), ("sigma", "psi")),
    "fibonacci": (("tau",), ("tau",), ("tau",), ("1", "tau")),
    "z_2": (("1",), ("0",), ("0", "1")),
    "z_3": (("1",), ("2",), ("0", "1", "2"), ("1", "2")),
}


@dataclass(frozen=True)
class Trial:
    system: SystemGeometry
    rho: AnyonicOperator
    part: Bipartition
    keep: str
    pure: bool


def random_system(model_name: str, rng: np.random.Generator, n_min: int = 3, n_max: int = 6,
                  max_dim: int = 48) -> SystemGeometry:
    model = builtin_model(model_name)
    choices = _CHARGE_CHOICES[model_name]
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        anyons = [(str(k + 1), choices[int(rng.integers(len(choices)))]) for k in range(n)]
        kind = rng.choice(("trivial", "free", "fixed"))
        boundary = None
        if kind == "free":
            boundary = "free"
        elif kind == "fixed":
            boundary = model.label(int(rng.integers(model.num_charges)))
        system = SystemGeometry.build(model, anyons, "disc", boundary)
        dim = len(enumerate_labellings(model, system.shape(system.ids)))
        if 0 < dim <= max_dim:
            return system


def trial_corpus(model_name: str, count: int = 200, seed: int = 0):
    """Deterministic list of random trials for one model."""
    rng = np.random.default_rng([seed, CORPUS_MODELS.index(model_name)])
    out = []
    for _ in range(count):
        system = random_system(model_name, rng)
        basis = random_basis(system, rng)
        pure = bool(rng.random() < 0.5)
        rho = random_density_operator(system, basis, rng, pure=pure)
        part = random_bipartition(system, rng)
        keep = str(rng.choice(("A", "B")))
        out.append(Trial(system, rho, part, keep, pure))
    return out


def qudit_system(N: int, n: int, boundary=None) -> SystemGeometry:
    model = builtin_model("z_n", N)
    return SystemGeometry.build(model, [(str(k + 1), "*") for k in range(n)], "disc", boundary)

