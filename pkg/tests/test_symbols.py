import json

import numpy as np
import pytest

from conftest import golden_symbol, small_term
from qtop.errors import (
    ChiralViolation,
    DimensionMismatch,
    DuplicateExponent,
    InputError,
    SymmetryViolation,
    ZeroCoordinate,
)
from qtop.symbols import (
    LaurentSymbol,
    assemble_chiral,
    az_class,
    check_symmetry,
    chiral_projector,
    det_on_circle,
    load_symbol,
    save_symbol,
    split_chiral,
)


def random_symbol(rng, num_vars=2, n=2, reach=1):
    terms = []
    for e0 in range(-reach, reach + 1):
        for e1 in range(-reach, reach + 1):
            exp = (e0, e1)[:num_vars]
            terms.append((exp, small_term(rng, n, 0.5)))
    return LaurentSymbol(num_vars, n, terms)


def test_construction_validation():
    with pytest.raises(InputError):
        LaurentSymbol(0, 2, [])
    with pytest.raises(InputError):
        LaurentSymbol(1, 0, [])
    with pytest.raises(DuplicateExponent):
        LaurentSymbol(1, 1, [((0,), np.eye(1)), ((0,), np.eye(1))])
    with pytest.raises(DimensionMismatch):
        LaurentSymbol(1, 2, [((0,), np.eye(3))])


def test_eval_matches_eval_grid(rng):
    f = random_symbol(rng)
    zs = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    ws = np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
    grid = f.eval_grid([zs, ws])
    assert grid.shape == (4, 3, 2, 2)
    for i, z in enumerate(zs):
        for j, w in enumerate(ws):
            assert np.allclose(grid[i, j], f.eval((z, w)))


def test_product_and_sum_are_pointwise(rng):
    f = random_symbol(rng)
    g = random_symbol(rng)
    z, w = np.exp(0.3j), np.exp(-1.1j)
    assert np.allclose((f * g).eval((z, w)), f.eval((z, w)) @ g.eval((z, w)))
    assert np.allclose((f + g).eval((z, w)), f.eval((z, w)) + g.eval((z, w)))
    assert np.allclose((f - g).eval((z, w)), f.eval((z, w)) - g.eval((z, w)))


def test_adjoint_is_pointwise_hermitian_conjugate(rng):
    f = random_symbol(rng)
    z, w = np.exp(0.7j), np.exp(2.3j)
    assert np.allclose(f.adjoint().eval((z, w)), f.eval((z, w)).conj().T)


def test_golden_det_is_constant_two():
    dets = det_on_circle(golden_symbol().slice(0, (np.exp(0.4j),)).symbol)
    assert np.allclose(dets, 2.0)


def test_slice_freezes_other_variable():
    f = golden_symbol()
    w0 = np.exp(0.9j)
    sl = f.slice(0, (w0,))
    z0 = np.exp(-0.2j)
    assert np.allclose(sl.symbol.eval((z0,)), f.eval((z0, w0)))
    with pytest.raises(ZeroCoordinate):
        f.slice(0, (0.0,))
    with pytest.raises(DimensionMismatch):
        f.slice(0, (w0, w0))


def test_shift_multiplies_by_monomial(rng):
    f = random_symbol(rng)
    shifted = f.shift((2, -1))
    z, w = np.exp(0.5j), np.exp(1.7j)
    assert np.allclose(shifted.eval((z, w)), z**2 * w**-1 * f.eval((z, w)))


def test_save_load_roundtrip(tmp_path, rng):
    f = random_symbol(rng)
    path = tmp_path / "sym.json"
    save_symbol(f, path)
    g = load_symbol(path)
    assert f.distance(g) == 0.0
    assert g.num_vars == f.num_vars and g.band_dim == f.band_dim


def test_load_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError, match="line 1"):
        load_symbol(bad)
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"num_vars": 1, "band_dim": 2, "terms": [
        {"exponents": [0], "matrix": [[[1, 0]]]}
    ]}))
    with pytest.raises(InputError, match="term 0"):
        load_symbol(wrong)


def test_az_class_table():
    spec = az_class("AIII")
    assert spec.degree == 1 and spec.chiral and spec.antiunitary == "none"
    assert az_class("AI").degree == 0 and not az_class("AI").chiral
    assert az_class("CII").degree == 5
    assert az_class("CI").degree == -1
    with pytest.raises(InputError):
        az_class("nonsense")


def test_chiral_assembly_roundtrip(golden):
    H = assemble_chiral(golden)
    assert H.band_dim == 4
    h = split_chiral(H)
    assert h.distance(golden) == 0.0
    z, w = np.exp(0.3j), np.exp(-0.8j)
    val = H.eval((z, w))
    n = golden.band_dim
    assert np.allclose(val[n:, :n], golden.eval((z, w)))
    assert np.allclose(val[:n, n:], golden.eval((z, w)).conj().T)
    assert np.allclose(val[:n, :n], 0.0)
    with pytest.raises(ChiralViolation):
        split_chiral(H + LaurentSymbol.identity(2, 4))
    with pytest.raises(DimensionMismatch):
        chiral_projector(3)


def test_check_symmetry_classes(golden, golden_H):
    assert check_symmetry(golden_H, az_class("AIII")).passed
    # golden f is not hermitian, so class AI must fail on it
    with pytest.raises(SymmetryViolation):
        check_symmetry(golden, az_class("AI")).require()
    # the chiral H has real coefficients: BDI relations hold
    assert check_symmetry(golden_H, az_class("BDI")).passed


def test_check_symmetry_reports_violation_size(golden_H):
    broken = golden_H + LaurentSymbol.constant(2, 0.01 * np.eye(4))
    report = check_symmetry(broken, az_class("AIII"))
    assert not report.passed
    assert report.violations["chiral"] > 1e-4


def test_conjugate_by_unitary(rng, golden):
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    g = golden.conjugate_by(q)
    z, w = np.exp(1.1j), np.exp(0.2j)
    assert np.allclose(g.eval((z, w)), q @ golden.eval((z, w)) @ q.conj().T)


def test_block_diag_eval(golden):
    two = golden.block_diag(golden.adjoint())
    z, w = np.exp(0.25j), np.exp(-1.4j)
    val = two.eval((z, w))
    assert np.allclose(val[:2, :2], golden.eval((z, w)))
    assert np.allclose(val[2:, 2:], golden.eval((z, w)).conj().T)
    assert np.allclose(val[:2, 2:], 0.0)
