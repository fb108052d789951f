"""Spectra and Renyi / von Neumann entropies of (reduced) anyonic density matrices.

All logarithms are base 2.  The quantum-dimension weights of the fusion-tree
normalisation are absorbed into an ordinary matrix whose trace equals the quantum
trace; the sector eigenvalues are then pooled into one probability distribution.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .ops import AnyonicOperator

CLIP_TOL = 1e-10
RENORM_TOL = 1e-8
DEFAULT_ORDERS = (0.5, 2.0, 3.0)


class EntropyError(ValueError):
    pass


class PositivityError(EntropyError):
    pass


@dataclass(frozen=True)
class SectorSpectrum:
    """Eigenvalues (descending) of one superselection sector.

    ``sector`` holds the boundary charge labels of the region, i.e. ``a_t`` for a
    connected region with a single cut.
    """

    sector: tuple
    eigenvalues: tuple


@dataclass(frozen=True)
class EntropyReport:
    spectra: tuple
    s1: float
    renyi: dict = field(default_factory=dict)

    @property
    def probabilities(self) -> np.ndarray:
        return pooled(self.spectra)


def to_matrix(rho: AnyonicOperator) -> np.ndarray:
    """Ordinary matrix of ``rho`` with the sector weights ``d_{a}`` absorbed.

    Rows and columns follow the labelling order of ``rho``; coherences between
    different sectors are zero for physical operators, so the result is block
    diagonal with trace ``qtrace(rho)``.
    """
    return rho.matrix * rho.weights[:, None]


def sector_blocks(rho: AnyonicOperator):
    """``[(sector_label, indices)]`` sorted by sector."""
    out = {}
    for k, lab in enumerate(rho.labels):
        out.setdefault(rho.sector_key(lab), (rho.sector_label(lab), []))[1].append(k)
    return [out[k] for k in sorted(out)]


def spectrum(rho: AnyonicOperator, tol: float = CLIP_TOL) -> tuple:
    """Per-sector eigenvalues of the absorbed matrix of a hermitian ``rho``."""
    if not rho.is_hermitian(1e-9):
        raise EntropyError("spectrum needs a hermitian operator")
    P = to_matrix(rho)
    P = 0.5 * (P + P.conj().T)
    parts = []
    for label, idx in sector_blocks(rho):
        ev = np.linalg.eigvalsh(P[np.ix_(idx, idx)])
        if ev.size and ev.min() < -tol:
            raise PositivityError(f"eigenvalue {ev.min():.3e} in sector {label} is negative")
        # anything within tol of zero is numerical noise; S_n for n < 1 would amplify it
        parts.append((label, np.where(ev < tol, 0.0, ev)))
    total = sum(float(ev.sum()) for _, ev in parts)
    if abs(total - 1.0) < RENORM_TOL and total > 0:
        parts = [(label, ev / total) for label, ev in parts]
    return tuple(
        SectorSpectrum(label, tuple(float(x) for x in np.sort(ev)[::-1])) for label, ev in parts
    )


def pooled(spec) -> np.ndarray:
    vals = [p for s in spec for p in s.eigenvalues]
    return np.array(vals, dtype=float)


def renyi_entropy(spec, n: float) -> float:
    """``S_n = log2(sum p^n) / (1 - n)`` over the pooled spectrum; ``n = 1`` gives ``S_1``."""
    n = float(n)
    if not n > 0:
        raise EntropyError(f"Renyi order must be positive, got {n}")
    if n == 1.0:
        return von_neumann_entropy(spec)
    p = pooled(spec)
    p = p[p > 0]
    return float(np.log2(np.sum(p**n)) / (1.0 - n))


def von_neumann_entropy(spec) -> float:
    """``S_1 = -sum p log2 p`` with ``0 log 0 = 0``."""
    p = pooled(spec)
    p = p[p > 0]
    return max(float(-np.sum(p * np.log2(p))), 0.0) + 0.0  # + 0.0 turns -0.0 into 0.0


def entropy_report(rho: AnyonicOperator, orders=DEFAULT_ORDERS) -> EntropyReport:
    spec = spectrum(rho)
    return EntropyReport(spec, von_neumann_entropy(spec),
                         {float(n): renyi_entropy(spec, n) for n in orders})


def fmt(x: float) -> str:
    """Fixed scientific format with 12 significant digits."""
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop negative zero
    return f"{x:.11e}"


def _order_name(n: float) -> str:
    return f"S_{n:g}"


def format_report(report: EntropyReport, sector_name=str) -> str:
    """Aligned-column table: one row per eigenvalue, then the entropies."""
    rows = [("sector", "index", "eigenvalue")]
    for s in report.spectra:
        for k, p in enumerate(s.eigenvalues):
            rows.append((sector_name(s.sector), str(k), fmt(p)))
    widths = [max(len(r[j]) for r in rows) for j in range(3)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.append("")
    lines.append(f"S_1 = {fmt(report.s1)}")
    for n, v in sorted(report.renyi.items()):
        if n != 1.0:
            lines.append(f"{_order_name(n)} = {fmt(v)}")
    return "\n".join(lines) + "\n"


def report_csv(report: EntropyReport, sector_name=str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sector", "index", "eigenvalue"])
    for s in report.spectra:
        for k, p in enumerate(s.eigenvalues):
            w.writerow([sector_name(s.sector), k, fmt(p)])
    w.writerow(["S_1", "", fmt(report.s1)])
    for n, v in sorted(report.renyi.items()):
        if n != 1.0:
            w.writerow([_order_name(n), "", fmt(v)])
    return buf.getvalue()
