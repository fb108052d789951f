"""Left-combed ("caterpillar") fusion trees and the linear maps acting on them.

A caterpillar over leaves ``l_1 .. l_n`` is labelled by its running fusion path
``y_1 = l_1, y_k in y_{k-1} x l_k``; ``y_n`` is the root (total) charge and
``y_2 .. y_{n-1}`` are the internal edges.  Leaves may carry a *set* of allowed
charges, in which case the leaf charge is part of the labelling.

Braid generators follow the Artin convention: ``(i, +1)`` exchanges leaves ``i``
and ``i + 1`` (1-based) counter-clockwise, leaf ``i`` passing in front of leaf
``i + 1``; it is realised as ``F^dagger R F`` on the adjacent pair.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .model import AnyonModel

BraidWord = tuple  # tuple of (position, sign) pairs


class TreeError(ValueError):
    pass


class TreeShape(NamedTuple):
    """Allowed charges of each leaf plus the allowed root charges."""

    leaves: tuple  # tuple[tuple[int, ...], ...]
    totals: tuple  # tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.leaves)

    def swapped(self, i: int) -> "TreeShape":
        lv = list(self.leaves)
        lv[i - 1], lv[i] = lv[i], lv[i - 1]
        return TreeShape(tuple(lv), self.totals)


class Labelling(NamedTuple):
    """One admissible labelling.  Field order gives the canonical sort (root first)."""

    total: int
    leaves: tuple
    internal: tuple

    @property
    def path(self) -> tuple:
        if len(self.leaves) == 1:
            return (self.total,)
        return (self.leaves[0],) + self.internal + (self.total,)

    @classmethod
    def from_path(cls, leaves, path) -> "Labelling":
        return cls(path[-1], tuple(leaves), tuple(path[1:-1]))


def make_shape(model: AnyonModel, leaves, totals=None) -> TreeShape:
    """Build a shape from charge indices or sets of indices; ``totals=None`` means free."""
    lv = []
    for x in leaves:
        if isinstance(x, (int, np.integer)):
            lv.append((int(x),))
        else:
            lv.append(tuple(sorted(int(c) for c in x)))
    if totals is None:
        tt = tuple(range(model.num_charges))
    elif isinstance(totals, (int, np.integer)):
        tt = (int(totals),)
    else:
        tt = tuple(sorted(int(c) for c in totals))
    if not lv:
        raise TreeError("a tree needs at least one leaf")
    return TreeShape(tuple(lv), tt)


@lru_cache(maxsize=None)
def enumerate_labellings(model: AnyonModel, shape: TreeShape) -> tuple:
    """All admissible labellings of ``shape`` in canonical (lexicographic) order."""
    out = []
    totals = set(shape.totals)
    for leaves in itertools.product(*shape.leaves):
        paths = [(leaves[0],)]
        for a in leaves[1:]:
            paths = [p + (c,) for p in paths for c in model.fusion_outcomes(p[-1], a)]
        out.extend(Labelling.from_path(leaves, p) for p in paths if p[-1] in totals)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def label_index(model: AnyonModel, shape: TreeShape) -> dict:
    return {lab: k for k, lab in enumerate(enumerate_labellings(model, shape))}


def _check_position(shape: TreeShape, i: int) -> None:
    if not 1 <= i < shape.n:
        raise TreeError(f"generator position {i} out of range for {shape.n} leaves")


def _pair_amplitudes(model, before, x, y, after, mid):
    """Amplitudes ``{e: F^{before x y}_{after}[mid, e]}`` for grouping leaves x, y."""
    es, fs, M = model.f_matrix(before, x, y, after)
    if mid not in es:
        return {}
    row = M[es.index(mid)]
    return {f: row[j] for j, f in enumerate(fs) if row[j] != 0}


@lru_cache(maxsize=None)
def f_move_matrix(model: AnyonModel, shape: TreeShape, position: int):
    """Recoupling at vertex ``position`` (1-based, ``1 <= position < n``).

    Maps the caterpillar basis to the basis in which leaves ``position`` and
    ``position + 1`` first fuse to a pair channel ``e``.  The returned labels are
    caterpillar-like labellings whose path entry ``position - 1`` (0-based) holds
    ``e`` instead of the running product.  Returns ``(matrix, out_labels)``.
    """
    _check_position(shape, position)
    p = position - 1
    labels = enumerate_labellings(model, shape)
    rows = {}
    entries = []
    for col, lab in enumerate(labels):
        path = lab.path
        before = path[p - 1] if p > 0 else model.trivial
        amps = _pair_amplitudes(model, before, lab.leaves[p], lab.leaves[p + 1], path[p + 1], path[p])
        for e, amp in amps.items():
            new = list(path)
            new[p] = e
            out = Labelling.from_path(lab.leaves, tuple(new))
            rows.setdefault(out, None)
            entries.append((out, col, amp))
    out_labels = tuple(sorted(rows))
    idx = {lab: k for k, lab in enumerate(out_labels)}
    M = np.zeros((len(out_labels), len(labels)), dtype=complex)
    for out, col, amp in entries:
        M[idx[out], col] += amp
    M.setflags(write=False)
    return M, out_labels


@lru_cache(maxsize=None)
def _generator_plus(model: AnyonModel, shape: TreeShape, i: int) -> np.ndarray:
    p = i - 1
    target = shape.swapped(i)
    src = enumerate_labellings(model, shape)
    dst = label_index(model, target)
    M = np.zeros((len(dst), len(src)), dtype=complex)
    for col, lab in enumerate(src):
        path = lab.path
        x, y = lab.leaves[p], lab.leaves[p + 1]
        before = path[p - 1] if p > 0 else model.trivial
        after = path[p + 1]
        leaves = list(lab.leaves)
        leaves[p], leaves[p + 1] = y, x
        es_back, ys_back, Mback = model.f_matrix(before, y, x, after)
        for e, amp in _pair_amplitudes(model, before, x, y, after, path[p]).items():
            phase = model.r_symbol(x, y, e)
            if e not in ys_back:
                continue
            j = ys_back.index(e)
            for k, ymid in enumerate(es_back):
                back = Mback[k, j]
                if back == 0:
                    continue
                new = list(path)
                new[p] = ymid
                out = Labelling.from_path(leaves, tuple(new))
                M[dst[out], col] += amp * phase * np.conj(back)
    return M


@lru_cache(maxsize=None)
def braid_generator_matrix(model: AnyonModel, shape: TreeShape, i: int, sign: int):
    """Matrix of the Artin generator ``sigma_i^{sign}``; returns ``(matrix, out_shape)``.

    Columns index the labellings of ``shape``, rows those of the output shape (leaves
    ``i`` and ``i + 1`` swapped).
    """
    _check_position(shape, i)
    if sign == 1:
        M = _generator_plus(model, shape, i)
    elif sign == -1:
        M = _generator_plus(model, shape.swapped(i), i).conj().T.copy()
    else:
        raise TreeError(f"generator sign must be +1 or -1, got {sign!r}")
    M.setflags(write=False)
    return M, shape.swapped(i)


def braid_word_matrix(model: AnyonModel, shape: TreeShape, word: BraidWord):
    """Ordered composition (first letter acts first).  Returns ``(matrix, out_shape)``."""
    n = len(enumerate_labellings(model, shape))
    M = np.eye(n, dtype=complex)
    cur = shape
    for i, s in word:
        G, cur = braid_generator_matrix(model, cur, int(i), int(s))
        M = G @ M
    return M, cur


# --- braid words --------------------------------------------------------------


def validate_word(word, n_leaves: int) -> BraidWord:
    out = []
    for letter in word:
        i, s = letter
        if int(i) != i or not 1 <= int(i) < n_leaves or s not in (1, -1):
            raise TreeError(f"invalid braid letter {letter!r} for {n_leaves} leaves")
        out.append((int(i), int(s)))
    return tuple(out)


def invert_word(word: BraidWord) -> BraidWord:
    return tuple((i, -s) for i, s in reversed(word))


def reduce_word(word: BraidWord) -> BraidWord:
    """Free reduction: cancel adjacent ``sigma_i sigma_i^{-1}`` pairs."""
    stack = []
    for i, s in word:
        if stack and stack[-1] == (i, -s):
            stack.pop()
        else:
            stack.append((i, s))
    return tuple(stack)


def permute_by_word(order, word: BraidWord) -> tuple:
    """Leaf order obtained from ``order`` after applying ``word``."""
    out = list(order)
    for i, _ in word:
        out[i - 1], out[i] = out[i], out[i - 1]
    return tuple(out)


# --- grouping contiguous blocks into subtrees -----------------------------------


class GroupedLabel(NamedTuple):
    """Labelling after grouping blocks: an outer caterpillar over units plus one
    caterpillar per grouped block (whose root is the block's total charge)."""

    outer: Labelling
    sections: tuple


def _unit_layout(n: int, blocks):
    units = []
    q = 0
    for start, stop in blocks:
        units.extend((j, j + 1) for j in range(q, start))
        units.append((start, stop))
        q = stop
    units.extend((j, j + 1) for j in range(q, n))
    return units


@lru_cache(maxsize=None)
def group_blocks(model: AnyonModel, shape: TreeShape, blocks: tuple):
    """Unitary from the caterpillar basis to the basis with each block fused first.

    ``blocks`` are disjoint, sorted, 0-based half-open leaf ranges.  Each block
    becomes its own caterpillar (root = block charge); the remaining tree is a
    caterpillar over units (single leaves and block charges) with the same path
    values as the original outside the blocks.  The map consists of F-moves only,
    with no braiding.  Returns ``(matrix, grouped_labels)``.
    """
    labels = enumerate_labellings(model, shape)
    units = _unit_layout(shape.n, blocks)
    block_set = set(blocks)
    entries = []
    for col, lab in enumerate(labels):
        path, lv = lab.path, lab.leaves
        options = []
        for start, stop in blocks:
            u = path[start - 1] if start > 0 else model.trivial
            z = path[start:stop]
            a = lv[start:stop]
            partial = [((a[0],), 1.0 + 0j)]
            for j in range(len(a) - 1):
                nxt = []
                for ws, amp in partial:
                    for w2, f in _pair_amplitudes(model, u, ws[-1], a[j + 1], z[j + 1], z[j]).items():
                        nxt.append((ws + (w2,), amp * f))
                partial = nxt
            options.append([(Labelling.from_path(a, ws), amp) for ws, amp in partial])
        for combo in itertools.product(*options):
            amp = 1.0 + 0j
            secs = []
            for sec, f in combo:
                secs.append(sec)
                amp *= f
            unit_charges, unit_path = [], []
            k = 0
            for start, stop in units:
                if (start, stop) in block_set:
                    unit_charges.append(secs[k].total)
                    k += 1
                else:
                    unit_charges.append(lv[start])
                unit_path.append(path[stop - 1])
            outer = Labelling.from_path(tuple(unit_charges), tuple(unit_path))
            entries.append((GroupedLabel(outer, tuple(secs)), col, amp))
    grouped = tuple(sorted({g for g, _, _ in entries}))
    idx = {g: k for k, g in enumerate(grouped)}
    G = np.zeros((len(grouped), len(labels)), dtype=complex)
    for g, col, amp in entries:
        G[idx[g], col] += amp
    G.setflags(write=False)
    return G, grouped
