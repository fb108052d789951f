import csv
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anyent.entropy import (
    EntropyError,
    PositivityError,
    SectorSpectrum,
    entropy_report,
    fmt,
    format_report,
    pooled,
    renyi_entropy,
    report_csv,
    spectrum,
    to_matrix,
    von_neumann_entropy,
)
from anyent.ops import SystemGeometry, density_matrix, full_operator, identity_operator, make_state, qtrace
from anyent.oracle import random_density_operator
from anyent.reduce import Bipartition, reduced_density_matrix


def _spec(*values):
    return (SectorSpectrum((0,), tuple(values)),)


def test_two_equal_weights_is_one_bit():
    for n in (0.5, 1, 2, 3):
        assert renyi_entropy(_spec(0.5, 0.5), n) == pytest.approx(1.0, abs=1e-12)


def test_quarter_three_quarters():
    s = _spec(0.75, 0.25)
    assert renyi_entropy(s, 2) == pytest.approx(0.678072, abs=1e-6)
    assert von_neumann_entropy(s) == pytest.approx(0.811278, abs=1e-6)


def test_pure_is_zero():
    assert von_neumann_entropy(_spec(1.0, 0.0)) == 0.0
    assert renyi_entropy(_spec(1.0), 2) == 0.0


def test_order_must_be_positive():
    for n in (0, -1):
        with pytest.raises(EntropyError):
            renyi_entropy(_spec(1.0), n)


probs = st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=12).map(lambda v: np.array(v) / sum(v))


@given(probs)
def test_renyi_tends_to_von_neumann(p):
    s = _spec(*p)
    s1 = von_neumann_entropy(s)
    for eps in (1e-4, -1e-4):
        assert renyi_entropy(s, 1 + eps) == pytest.approx(s1, abs=1e-3)


@given(probs)
def test_renyi_non_increasing_in_order(p):
    s = _spec(*p)
    values = [renyi_entropy(s, n) for n in (0.5, 1, 2, 3, 5)]
    assert all(a >= b - 1e-10 for a, b in zip(values, values[1:]))
    assert values[0] <= np.log2(len(p)) + 1e-10


def test_sectors_are_pooled(ising):
    g = SystemGeometry.build(ising, [(str(k), "sigma") for k in range(1, 5)], boundary="free")
    I = identity_operator(g)
    spec = spectrum(I.with_matrix(I.matrix / qtrace(I)))
    assert len(spec) == 2 and [s.sector for s in spec] == sorted(s.sector for s in spec)
    assert von_neumann_entropy(spec) == pytest.approx(2)


def test_weighted_matrix_matches_dense_eigensolver(six_sigma, basis_under, rng):
    rho = random_density_operator(six_sigma, basis_under, rng)
    rho_A = reduced_density_matrix(rho, Bipartition(("1", "2", "4"), ("3", "5", "6")), "A")
    ours = np.sort(pooled(spectrum(rho_A)))
    dense = np.sort(np.linalg.eigvals(to_matrix(rho_A)).real)
    assert np.allclose(ours, np.clip(dense, 0, None), atol=1e-12)
    assert np.trace(to_matrix(rho_A)).real == pytest.approx(qtrace(rho_A))


def test_negative_eigenvalue_rejected(six_sigma):
    rho = full_operator(six_sigma, np.diag([0.6, 0.6, -0.2, 0.0]))
    with pytest.raises(PositivityError):
        spectrum(rho)


def test_non_hermitian_rejected(six_sigma):
    m = np.zeros((4, 4), complex)
    m[0, 1] = 1
    with pytest.raises(EntropyError):
        spectrum(full_operator(six_sigma, m))


def test_tiny_negative_is_clipped(six_sigma):
    rho = full_operator(six_sigma, np.diag([1.0 + 1e-12, 0.0, -1e-12, 0.0]))
    spec = spectrum(rho)
    assert sorted(pooled(spec)) == [0.0, 0.0, 0.0, 1.0]


def test_format_is_twelve_significant_digits():
    assert fmt(1) == "1.00000000000e+00"
    assert fmt(-0.0) == "0.00000000000e+00"
    assert fmt(0.811278124459) == "8.11278124459e-01"


def test_report_table_and_csv(six_sigma, basis_over):
    rho = density_matrix(make_state(six_sigma, np.ones(4), basis_over))
    rho_A = reduced_density_matrix(rho, Bipartition(("1", "2", "3"), ("4", "5", "6")), "A")
    report = entropy_report(rho_A, (0.5, 2))
    name = lambda sector: ",".join(six_sigma.model.label(c) for c in sector)
    text = format_report(report, name)
    assert text.splitlines()[0].split() == ["sector", "index", "eigenvalue"]
    assert "S_1 = 1.00000000000e+00" in text and "S_0.5 = " in text and "S_2 = " in text
    rows = list(csv.reader(io.StringIO(report_csv(report, name))))
    assert rows[0] == ["sector", "index", "eigenvalue"]
    assert rows[-3][0] == "S_1" and float(rows[-3][2]) == pytest.approx(1)
    assert report.probabilities.sum() == pytest.approx(1)
