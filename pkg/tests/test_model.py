import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anyent.model import (
    AnyonModel,
    AxiomViolation,
    ModelError,
    ModelSyntaxError,
    axiom_residuals,
    builtin_model,
    check_hexagon,
    check_pentagon,
    check_qdim,
    model_to_dict,
    parse_model,
    serialize_model,
)

from conftest import MODELS

PHI = (1 + 5**0.5) / 2


def _perturbed(model, **changes):
    fields = dict(name=model.name, charges=model.charges, trivial=model.trivial, dual=model.dual,
                  N=model.N, qdim=model.qdim, F=dict(model.F), R=dict(model.R))
    fields.update(changes)
    return AnyonModel(**fields)


@pytest.mark.parametrize("name", MODELS)
def test_builtin_axioms(name):
    res = axiom_residuals(builtin_model(name))
    assert all(v < 1e-12 for v in res.values()), res


def test_ising_data(ising):
    s, one, psi = (ising.index(x) for x in ("sigma", "1", "psi"))
    assert ising.fusion_outcomes(s, s) == (one, psi)
    assert ising.d(s) == pytest.approx(2**0.5)
    assert ising.r_symbol(s, s, one) == pytest.approx(np.exp(-1j * np.pi / 8))
    assert ising.r_symbol(s, s, psi) == pytest.approx(np.exp(3j * np.pi / 8))
    _, _, M = ising.f_matrix(s, s, s, s)
    assert np.allclose(M, np.array([[1, 1], [1, -1]]) / 2**0.5)


def test_fibonacci_data(fib):
    t = fib.index("tau")
    assert fib.d(t) == pytest.approx(PHI)
    _, _, M = fib.f_matrix(t, t, t, t)
    assert np.allclose(M, [[1 / PHI, PHI**-0.5], [PHI**-0.5, -1 / PHI]])


@pytest.mark.parametrize("N", [2, 3, 5])
def test_z_n_is_abelian(N):
    m = builtin_model("z_n", N)
    assert m.charges == tuple(str(k) for k in range(N))
    assert m.is_abelian and np.allclose(m.qdim, 1)
    for a in range(N):
        for b in range(N):
            assert m.fusion_outcomes(a, b) == ((a + b) % N,)
    assert all(abs(abs(v) - 1) < 1e-14 for v in list(m.F.values()) + list(m.R.values()))


@pytest.mark.parametrize("bad", [("z_n", 1), ("z_n", None), ("potts", None)])
def test_builtin_errors(bad):
    with pytest.raises(ModelError):
        builtin_model(*bad)


def test_pentagon_detects_perturbed_f(fib):
    t = fib.index("tau")
    F = dict(fib.F)
    F[(t, t, t, t, t, t)] += 0.1
    assert check_pentagon(_perturbed(fib, F=F)) > 0.01


def test_hexagon_detects_negated_r(ising):
    s, one = ising.index("sigma"), ising.index("1")
    R = dict(ising.R)
    R[(s, s, one)] = -R[(s, s, one)]
    assert check_hexagon(_perturbed(ising, R=R)) > 0.01


def test_qdim_consistency_detects_wrong_dimension(fib):
    assert check_qdim(_perturbed(fib, qdim=np.array([1.0, 1.5]))) > 0.01


@pytest.mark.parametrize("name", MODELS)
def test_serialization_round_trip(name):
    m = builtin_model(name)
    text = serialize_model(m)
    back = parse_model(text)
    assert back == m
    assert serialize_model(back) == text


def test_missing_dual_names_charge(ising):
    doc = model_to_dict(ising)
    del doc["dual"]["psi"]
    with pytest.raises(ModelError, match="psi"):
        parse_model(json.dumps(doc))


def test_non_unitary_f_block_is_rejected(ising):
    doc = model_to_dict(ising)
    for e in doc["F"]:
        if [e[k] for k in "abcdef"] == ["sigma"] * 4 + ["1", "1"]:
            e["re"] = 0.9
    with pytest.raises(AxiomViolation, match="F-unitarity"):
        parse_model(json.dumps(doc))


def test_syntax_error_reports_position():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model('{"name": "x",\n  "charges": [1 2]}')
    assert info.value.line == 2 and info.value.column is not None


def test_unknown_keys_rejected(ising):
    doc = model_to_dict(ising)
    doc["gauge"] = "mine"
    with pytest.raises(ModelError, match="unknown keys"):
        parse_model(json.dumps(doc))


@given(st.sampled_from(MODELS), st.data())
def test_dual_is_involution_and_vacuum_channel(name, data):
    m = builtin_model(name)
    a = data.draw(st.integers(0, m.num_charges - 1))
    assert m.dual[m.dual[a]] == a
    assert m.admissible(a, m.dual[a], m.trivial)
    assert m.admissible(a, m.trivial, a) and m.admissible(m.trivial, a, a)
