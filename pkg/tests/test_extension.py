import numpy as np
import pytest

from conftest import (
    gap_closing_family,
    golden_closed_form,
    golden_symbol,
    promote_to_family,
)
from qtop.errors import InputError, NotFredholm, OutOfDomain
from qtop.extension import (
    ChartPoint,
    ClosedFormExtension,
    ExtendedSymbol,
    bott_generator,
    build_extended,
    build_extended_family,
    check_equivariance,
    check_hermitian,
    seam_residual,
)
from qtop.symbols import LaurentSymbol, assemble_chiral


def test_chart_point_validation():
    with pytest.raises(OutOfDomain):
        ChartPoint("TD", 0.0, 1.2, 0.0)
    with pytest.raises(OutOfDomain):
        ChartPoint("XX", 0.0, 0.5, 0.0)
    z, w = ChartPoint("DT", 0.3, 0.5, 1.0).coordinates()
    assert abs(z - 0.5 * np.exp(0.3j)) < 1e-15
    assert abs(w - np.exp(1.0j)) < 1e-15


def test_golden_extension_matches_closed_form():
    ext = build_extended(golden_symbol())
    ref = golden_closed_form()
    thetas = 2 * np.pi * np.arange(8) / 8
    rhos = np.linspace(0.0, 1.0, 5)
    for chart in ("TD", "DT"):
        got = ext.chart_grid(chart, thetas, rhos, thetas)
        want = ref.chart_grid(chart, thetas, rhos, thetas)
        assert np.max(np.abs(got - want)) <= 1e-6


def test_golden_extension_point_values():
    ext = build_extended(golden_symbol())
    # disk center of the DT chart: z = 0, w = e^{i/2}
    val = ext.value(ChartPoint("DT", 0.0, 0.0, 0.5))
    want = np.array([
        [0.0, -np.exp(-0.5j)],
        [2.0 * np.exp(0.5j), 0.0],
    ])
    assert np.max(np.abs(val - want)) <= 1e-8
    # disk center of the TD chart: diag(2 z, 1/z)
    for th in (0.0, 0.9, 2.2):
        val = ext.value(ChartPoint("TD", th, 0.0, 1.3))
        want = np.diag([2.0 * np.exp(1j * th), np.exp(-1j * th)])
        assert np.max(np.abs(val - want)) <= 1e-8


def test_seam_agreement_for_golden():
    ext = build_extended(golden_symbol())
    assert seam_residual(ext, samples=48) <= 1e-8
    assert ext.seam_residuals[None] <= 1e-8


def test_interpolator_tracks_exact_values():
    ext = build_extended(golden_symbol())
    interp = ext.interpolator()
    pt = ChartPoint("TD", 0.77, 0.41, 2.6)
    assert np.max(np.abs(interp.value(pt) - ext.value(pt))) <= 1e-8


def test_bott_generator_values():
    g = bott_generator()
    z, w = np.exp(0.4j), 0.3 * np.exp(1.1j)
    val = g.fn(np.asarray(z), np.asarray(w))
    want = np.array([[z, -np.conj(w)], [w, np.conj(z)]])
    assert np.allclose(val, want)
    rev = bott_generator(reversed_orientation=True)
    val = rev.fn(np.asarray(z), np.asarray(w))
    want = np.array([[z, -w], [np.conj(w), np.conj(z)]])
    assert np.allclose(val, want)


def test_hermitian_symbol_extends_hermitian(golden_H):
    ext = build_extended(golden_H, samples_per_circle=8)
    assert check_hermitian(ext, grid=(8, 5, 8)) <= 1e-8


def test_real_coefficients_give_ai_equivariance(golden_H):
    ext = build_extended(golden_H, samples_per_circle=8)
    assert check_equivariance(ext, "AI", grid=(8, 5, 8)) <= 1e-8
    with pytest.raises(InputError):
        check_equivariance(ext, "A", grid=(8, 5, 8))


def test_noncanonical_slice_aborts_with_direction():
    sym = LaurentSymbol(2, 2, [
        ((1, 0), np.diag([1.0, 0.0])),
        ((-1, 0), np.diag([0.0, 1.0])),
    ])
    with pytest.raises(NotFredholm) as err:
        build_extended(sym, samples_per_circle=4)
    assert err.value.direction == 0
    assert err.value.indices == (1, -1)


def test_family_detects_gap_closing_within_one_spacing():
    fam = gap_closing_family()
    t_samples = 16
    with pytest.raises(NotFredholm) as err:
        build_extended_family(fam, t_samples=t_samples, samples_per_circle=4)
    t_hit = err.value.where[-1]
    # det of the scalar block vanishes once 1.5 + cos t enters the unit
    # circle, first at t = 2 pi / 3
    assert abs(t_hit - 2 * np.pi / 3) <= 2 * np.pi / t_samples


def test_family_evaluation_matches_static_extension():
    fam = promote_to_family(golden_symbol())
    ext3 = build_extended_family(fam, t_samples=4, samples_per_circle=8)
    ext2 = build_extended(golden_symbol(), samples_per_circle=8)
    pt3 = ChartPoint("DT", 1.9, 0.35, 0.6, t=np.pi / 2)
    pt2 = ChartPoint("DT", 1.9, 0.35, 0.6)
    assert np.max(np.abs(ext3.value(pt3) - ext2.value(pt2))) <= 1e-10
    with pytest.raises(OutOfDomain):
        ext3.factor_at("TD", 0.0, t=None)
    with pytest.raises(OutOfDomain):
        ext2.factor_at("TD", 0.0, t=1.0)


def test_constructor_rejects_wrong_arity():
    from qtop.errors import DimensionMismatch

    with pytest.raises(DimensionMismatch):
        ExtendedSymbol(golden_symbol(), family_var=2)
    with pytest.raises(DimensionMismatch):
        build_extended_family(golden_symbol())
