import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anyent.model import builtin_model
from anyent.ops import (
    BasisDescriptor,
    BasisMismatch,
    GeometryError,
    SystemGeometry,
    change_basis,
    change_state_basis,
    density_matrix,
    embed_local_operator,
    expectation,
    full_operator,
    identity_operator,
    make_state,
    outer_product,
    qtrace,
    relative_word,
)
from anyent.oracle import random_basis, random_density_operator, random_system
from anyent.reduce import Bipartition, reduced_density_matrix
from anyent.tree import braid_word_matrix, enumerate_labellings

from conftest import MODELS


def test_geometry_validation(ising):
    with pytest.raises(GeometryError):
        SystemGeometry.build(ising, [("1", "sigma"), ("1", "sigma")])
    with pytest.raises(GeometryError):
        SystemGeometry.build(ising, [("1", "sigma")], manifold="sphere", boundary="free")
    with pytest.raises(GeometryError):
        SystemGeometry.build(ising, [("1", "sigma")], manifold="torus")


def test_basis_descriptor_endpoint(six_sigma):
    with pytest.raises(GeometryError):
        BasisDescriptor(("1", "2", "3", "4", "5", "6"), ((3, 1),)).validate(six_sigma)


def test_qtrace_identity_six_sigma(six_sigma):
    assert qtrace(identity_operator(six_sigma)) == pytest.approx(4)


@pytest.mark.parametrize("name,label", [("ising", "sigma"), ("fibonacci", "tau"), ("ising", "psi")])
def test_qtrace_identity_single_anyon_free_total(name, label):
    m = builtin_model(name)
    g = SystemGeometry.build(m, [("a", label)], boundary="free")
    assert qtrace(identity_operator(g)) == pytest.approx(m.d(m.index(label)))


def test_outer_product_equal_amplitudes(six_sigma):
    psi = make_state(six_sigma, np.ones(4))
    rho = outer_product(psi, psi)
    assert np.allclose(rho.matrix, 0.25)
    assert qtrace(rho) == pytest.approx(1)
    assert np.linalg.matrix_rank(rho.matrix) == 1 and rho.is_hermitian()


def test_orthogonal_outer_product_has_zero_trace(six_sigma):
    a = make_state(six_sigma, [1, 0, 0, 0])
    b = make_state(six_sigma, [0, 1, 0, 0])
    assert abs(qtrace(outer_product(a, b))) < 1e-15


def test_outer_product_basis_mismatch(six_sigma, basis_over):
    with pytest.raises(BasisMismatch):
        outer_product(make_state(six_sigma, np.ones(4)), make_state(six_sigma, np.ones(4), basis_over))


def test_nontrivial_total_outer_product_normalised(fib):
    t = fib.index("tau")
    g = SystemGeometry.build(fib, [(str(k), "tau") for k in range(3)], boundary="free")
    psi = make_state(g, [1.0, 2.0], total=t)
    assert qtrace(density_matrix(psi)) == pytest.approx(1)


def test_change_basis_round_trip_and_phases(six_sigma, basis_over, basis_under):
    rho = density_matrix(make_state(six_sigma, np.ones(4), basis_over))
    assert change_basis(rho, basis_over) is rho
    back = change_basis(change_basis(rho, basis_under), basis_over)
    assert np.abs(back.matrix - rho.matrix).max() < 1e-12
    psi = make_state(six_sigma, np.ones(4), basis_over)
    moved = change_state_basis(psi, basis_under)
    ratio = moved.amp / psi.amp
    assert np.allclose(np.abs(ratio), 1)
    assert relative_word(basis_over, basis_under) == ((3, -1), (3, -1))


def test_expectation_basics(six_sigma, basis_over, rng):
    rho = random_density_operator(six_sigma, basis_over, rng)
    assert expectation(rho, identity_operator(six_sigma, basis_over)) == pytest.approx(1)
    psi = make_state(six_sigma, rng.normal(size=4) + 1j * rng.normal(size=4))
    proj = density_matrix(psi)
    assert expectation(proj, proj) == pytest.approx(1)


def test_expectation_of_braided_projector(six_sigma, basis_under, rng):
    # dense check: <psi| U P U^dagger |psi> computed directly on vectors
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    w = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi = make_state(six_sigma, v)
    phi = make_state(six_sigma, w, basis_under)
    P = density_matrix(phi)
    U, _ = braid_word_matrix(six_sigma.model, six_sigma.shape(six_sigma.ids), relative_word(six_sigma.default_basis(), basis_under))
    direct = abs(np.vdot(phi.amp, U @ psi.amp)) ** 2
    assert expectation(density_matrix(psi), P) == pytest.approx(direct)


@st.composite
def systems_and_ops(draw):
    name = draw(st.sampled_from(MODELS))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    g = random_system(name, rng, 2, 5, max_dim=24)
    basis = random_basis(g, rng)
    return g, basis, random_density_operator(g, basis, rng), rng


@given(systems_and_ops())
def test_qtrace_basis_invariant(data):
    g, basis, rho, rng = data
    other = random_basis(g, rng)
    assert abs(qtrace(rho) - qtrace(change_basis(rho, other))) < 1e-12


@given(systems_and_ops())
def test_superselection_of_constructors(data):
    g, basis, rho, rng = data
    assert rho.cross_sector_norm() == 0.0
    moved = change_basis(rho, random_basis(g, rng))
    assert moved.cross_sector_norm() < 1e-14


@given(systems_and_ops())
def test_expectation_conjugate_symmetric(data):
    g, basis, rho, rng = data
    I = identity_operator(g, basis)
    O = I.with_matrix(rng.normal(size=I.matrix.shape) + 1j * rng.normal(size=I.matrix.shape))
    other = random_basis(g, rng)
    O = change_basis(O, other)
    assert abs(expectation(rho, O.dagger()) - np.conj(expectation(rho, O))) < 1e-12


@pytest.mark.parametrize("N", [2, 3])
def test_abelian_expectations_match_qudit_register(N, rng):
    m = builtin_model("z_n", N)
    g = SystemGeometry.build(m, [(str(k), "*") for k in range(3)], boundary="free")
    I = identity_operator(g)
    labels = [lab[0] for lab in I.labels]
    assert len(labels) == N**3  # labellings are charge strings
    rho = random_density_operator(g, g.default_basis(), rng)
    # a diagonal observable Z on the first qudit
    z = np.exp(2j * np.pi * np.array([lab.leaves[0] for lab in labels]) / N)
    O = I.with_matrix(np.diag(z))
    P = rho.matrix * rho.weights[:, None]
    assert expectation(rho, O) == pytest.approx(np.trace(P @ np.diag(z)))


def test_embed_identity_and_compatible_padding(six_sigma, basis_over, rng):
    part = Bipartition(("1", "2", "4"), ("3", "5", "6"))
    rho = random_density_operator(six_sigma, basis_over, rng)
    rho_A = reduced_density_matrix(rho, part, "A")
    I_A = rho_A.with_matrix(np.eye(rho_A.dim))
    I = embed_local_operator(I_A, six_sigma, basis_over, part)
    assert np.abs(I.matrix - np.eye(I.dim)).max() < 1e-12


def test_embed_local_braid_matches_tree_braid(six_sigma, rng):
    # a double exchange of anyons 1 and 2 is local to A = {1, 2}
    part = Bipartition(("1", "2"), ("3", "4", "5", "6"))
    basis = six_sigma.default_basis()
    rho = random_density_operator(six_sigma, basis, rng)
    rho_A = reduced_density_matrix(rho, part, "A")
    B, _ = braid_word_matrix(six_sigma.model, rho_A.trees[0], ((1, 1), (1, 1)))
    O = embed_local_operator(rho_A.with_matrix(B), six_sigma, basis, part)
    full, _ = braid_word_matrix(six_sigma.model, six_sigma.shape(basis.tree_order), ((1, 1), (1, 1)))
    assert np.abs(O.matrix - full).max() < 1e-12


def test_embed_rejects_boundary_changing_operator(ising):
    g = SystemGeometry.build(ising, [(str(k), "sigma") for k in range(1, 5)])
    part = Bipartition(("1", "2"), ("3", "4"))
    I = identity_operator(g)
    rho_A = reduced_density_matrix(I.with_matrix(I.matrix / qtrace(I)), part, "A")
    X = np.ones((rho_A.dim, rho_A.dim))
    with pytest.raises(ValueError, match="not local"):
        embed_local_operator(rho_A.with_matrix(X), g, g.default_basis(), part)


def test_full_operator_shape_check(six_sigma):
    with pytest.raises(BasisMismatch):
        full_operator(six_sigma, np.eye(3))
    assert len(enumerate_labellings(six_sigma.model, six_sigma.shape(six_sigma.ids))) == 4
