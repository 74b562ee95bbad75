import numpy as np
import pytest

from conftest import (
    gap_closing_family,
    golden_symbol,
    promote_to_family,
    sin_mass_family,
)
from qtop.errors import (
    ChiralViolation,
    DimensionMismatch,
    InputError,
    NotFredholm,
    NotHermitian,
    SizeOverflow,
)
from qtop.operators import (
    HalfPlaneRect,
    Quarter,
    Segment,
    assemble,
    certify_fredholm,
    corner_spectrum,
    dump_operator,
    half_plane_gap,
    kernel_dim,
    numerical_index,
    spectral_flow,
)
from qtop.symbols import LaurentSymbol, assemble_chiral


def scalar_1d(terms):
    return LaurentSymbol(1, 1, [((k,), np.array([[c]])) for k, c in terms])


def test_segment_assembly_puts_shift_below_diagonal():
    op = assemble(scalar_1d([(1, 1.0)]), Segment(5))
    want = np.zeros((5, 5))
    want[np.arange(1, 5), np.arange(4)] = 1.0
    assert np.array_equal(op.matrix, want)


def test_quarter_assembly_layout(golden):
    op = assemble(golden, Quarter(3))
    assert op.matrix.shape == (18, 18)
    # hop z: site (x, y) -> (x+1, y); site order is lexicographic in (x, y)
    sites = [tuple(s) for s in op.col_sites]
    a = op.matrix.reshape(9, 2, 9, 2)
    i, j = sites.index((1, 2)), sites.index((0, 2))
    assert np.allclose(a[i, :, j, :], np.array([[1.0, 0.0], [0.0, 0.0]]))
    # Dirichlet: no wraparound from the last column
    i, j = sites.index((0, 0)), sites.index((2, 0))
    assert np.allclose(a[i, :, j, :], 0.0)


def test_assembly_validation(golden):
    with pytest.raises(DimensionMismatch):
        assemble(golden, Segment(4))
    with pytest.raises(DimensionMismatch):
        assemble(scalar_1d([(1, 1.0)]), Quarter(4))
    with pytest.raises(InputError):
        assemble(golden, HalfPlaneRect(direction=2, parallel=4, perp=4))
    with pytest.raises(InputError):
        assemble(golden, "quarter")
    with pytest.raises(SizeOverflow):
        assemble(golden, Quarter(200))


def test_kernel_dim_of_finite_shift():
    assert kernel_dim(assemble(scalar_1d([(1, 1.0)]), Segment(8))) == 1
    assert kernel_dim(assemble(scalar_1d([(0, 1.0)]), Segment(8))) == 0


def test_numerical_index_golden(golden):
    rep = numerical_index(golden)
    assert rep.value == 1
    assert rep.kernel_counts == (1, 1, 1)
    assert rep.cokernel_counts == (0, 0, 0)
    assert rep.to_dict()["index"] == 1


def test_numerical_index_related_symbols(golden):
    assert numerical_index(golden.adjoint()).value == -1
    assert numerical_index(LaurentSymbol.identity(2, 2)).value == 0
    assert numerical_index(golden.block_diag(golden), sizes=(8, 10)).value == 2


def test_segment_index_is_minus_winding():
    assert numerical_index(scalar_1d([(1, 1.0), (0, -0.5)])).value == -1
    assert numerical_index(scalar_1d([(-1, 1.0), (0, -0.5)])).value == 1
    assert numerical_index(scalar_1d([(1, 0.3), (0, 1.0)])).value == 0


def test_certify_fredholm_reports_direction():
    sym = LaurentSymbol(2, 2, [
        ((1, 0), np.diag([1.0, 0.0])),
        ((-1, 0), np.diag([0.0, 1.0])),
    ])
    with pytest.raises(NotFredholm) as err:
        certify_fredholm(sym)
    assert err.value.direction == 0
    assert err.value.indices == (1, -1)
    certify_fredholm(golden_symbol())  # does not raise


def test_half_plane_gap_golden(golden):
    for direction in (0, 1):
        rep = half_plane_gap(golden, direction, parallel=16, perp=8)
        assert rep.gap >= 0.5
        assert not rep.gapless_trend


def test_half_plane_gap_flags_gapless():
    sym = LaurentSymbol(2, 1, [
        ((1, 0), np.array([[1.0]])),
        ((-1, 0), np.array([[1.0]])),
    ])
    rep = half_plane_gap(sym, 0, parallel=4, perp=8)
    assert rep.gapless_trend
    assert rep.gap < 0.2


def test_corner_spectrum_golden(golden_H):
    res = corner_spectrum(golden_H, side=14)
    assert len(res.corner_modes) == 1
    assert res.signed_count == 1
    assert res.corner_modes[0].chirality >= 0.99
    assert abs(res.corner_modes[0].value) <= 1e-10
    assert res.spectral_gap >= 0.1
    assert res.separation_ok
    # the three artificial corners carry the compensating partners
    assert len(res.zero_modes) == 4
    assert sum(1 if m.chirality >= 0 else -1 for m in res.zero_modes) == 0


def test_corner_spectrum_adjoint(golden):
    res = corner_spectrum(assemble_chiral(golden.adjoint()), side=14)
    assert res.signed_count == -1


def test_corner_spectrum_trivial_symbol():
    res = corner_spectrum(assemble_chiral(LaurentSymbol.identity(2, 2)), side=8)
    assert res.signed_count == 0
    assert len(res.zero_modes) == 0
    assert res.spectral_gap >= 0.9


def test_corner_spectrum_validation(golden, golden_H):
    with pytest.raises(NotHermitian):
        corner_spectrum(golden, side=8)
    shifted = golden_H + LaurentSymbol(2, 4, [((0, 0), 0.01 * np.eye(4))])
    with pytest.raises(ChiralViolation):
        corner_spectrum(shifted, side=8)
    res = corner_spectrum(shifted, side=8, chiral=False)
    assert res.signed_count is None


def test_chiral_spectra_pair_up(golden_H):
    res = corner_spectrum(golden_H, side=10)
    vals = res.eigenvalues
    assert np.max(np.abs(vals + vals[::-1])) <= 1e-9


def test_spectral_flow_constant_family(golden_H):
    res = spectral_flow(promote_to_family(golden_H), t_samples=8, side=6)
    assert res.flow == 0
    assert res.crossings == ()
    assert len(res.tracks) == 1


def test_spectral_flow_sin_mass(golden_H):
    res = spectral_flow(sin_mass_family(golden_H), t_samples=16, side=6)
    assert res.flow == 0
    assert len(res.crossings) == 2
    signs = sorted(s for _, s in res.crossings)
    assert signs == [-1, 1]
    ts = sorted(t for t, _ in res.crossings)
    assert abs(ts[0] - 0.0) <= 1e-9
    assert abs(ts[1] - np.pi) <= 2 * np.pi / 16 + 1e-9


def test_spectral_flow_stable_under_refinement(golden_H):
    a = spectral_flow(sin_mass_family(golden_H), t_samples=16, side=6)
    b = spectral_flow(sin_mass_family(golden_H), t_samples=32, side=6)
    assert a.flow == b.flow == 0
    assert len(a.crossings) == len(b.crossings) == 2


def test_spectral_flow_validation(golden, golden_H):
    with pytest.raises(NotHermitian):
        spectral_flow(promote_to_family(golden), t_samples=4, side=4)
    with pytest.raises(NotFredholm):
        spectral_flow(gap_closing_family(), t_samples=16, side=4)
    with pytest.raises(DimensionMismatch):
        spectral_flow(golden_H)


def test_dump_operator_roundtrip(tmp_path, golden):
    op = assemble(golden, Quarter(3))
    path = tmp_path / "op.bin"
    dump_operator(op, path)
    raw = path.read_bytes()
    header = np.frombuffer(raw[:24], dtype=np.int64)
    assert tuple(header) == (18, 18, 2)
    data = np.frombuffer(raw[24:], dtype=np.float64).reshape(18, 18, 2)
    assert np.array_equal(data[..., 0] + 1j * data[..., 1], op.matrix)
