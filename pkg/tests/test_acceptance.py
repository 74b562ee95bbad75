"""End-to-end acceptance gate.

One test per acceptance criterion, in order; each prints a single
``[criterion n] PASS`` line once every assertion in it has held at the
stated tolerance.
"""

import json
import time

import numpy as np
import pytest

from conftest import (
    gap_closing_family,
    golden_closed_form,
    golden_symbol,
    promote_to_family,
    random_canonical_1d,
    random_canonical_2d,
    random_nonzero_winding_1d,
    sin_mass_family,
)
from qtop import cli
from qtop.errors import NotFredholm
from qtop.extension import (
    bott_generator,
    build_extended,
    build_extended_family,
    check_equivariance,
    check_hermitian,
)
from qtop.invariants import DEFAULT_GRID, w3
from qtop.operators import corner_spectrum, numerical_index, spectral_flow
from qtop.symbols import LaurentSymbol, assemble_chiral, save_symbol, split_chiral
from qtop.wiener_hopf import (
    canonical_factorize,
    partial_indices,
    radial_scan,
    verify_factorization,
    winding_of_det,
)


def test_criterion_1_golden_pipeline(golden):
    start = time.monotonic()
    for var in (0, 1):
        for j in range(8):
            sl = golden.slice(var, (np.exp(2.0j * np.pi * j / 8),))
            fact = canonical_factorize(sl)
            assert fact.partial_indices == (0, 0)
            assert fact.residual <= 1e-8

    ext = build_extended(golden)
    ref = golden_closed_form()
    thetas = 2 * np.pi * np.arange(16) / 16
    rhos = np.linspace(0.0, 1.0, 16)
    worst = 0.0
    for chart in ("TD", "DT"):
        got = ext.chart_grid(chart, thetas, rhos, thetas)
        want = ref.chart_grid(chart, thetas, rhos, thetas)
        worst = max(worst, float(np.max(np.abs(got - want))))
    assert worst <= 1e-6

    res = w3(ext, grid=(64, 33, 64))
    assert abs(res.raw_value - 1.0) <= 1e-3

    idx = numerical_index(golden, sizes=(10, 14, 18))
    assert idx.value == 1

    elapsed = time.monotonic() - start
    assert elapsed < 300.0
    print(
        f"[criterion 1] PASS golden pipeline: slices canonical (res <= 1e-8), "
        f"extension matches closed form to {worst:.2e}, "
        f"W3 = {res.raw_value:.6f}, truncation index = {idx.value}, "
        f"{elapsed:.1f}s"
    )


def test_criterion_2_closure_corpus(golden, rng):
    corpus = [
        ("golden", golden),
        ("adjoint", golden.adjoint()),
        ("identity", LaurentSymbol.identity(2, 2)),
        ("golden + golden", golden.block_diag(golden)),
        ("golden + adjoint", golden.block_diag(golden.adjoint())),
    ]
    for k in range(2):
        q, _ = np.linalg.qr(
            rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        )
        corpus.append((f"conjugate {k}", golden.conjugate_by(q)))
    for k in range(3):
        corpus.append((f"canonical product {k}", random_canonical_2d(rng)))
    assert len(corpus) >= 10

    for name, sym in corpus:
        res = w3(build_extended(sym), grid=DEFAULT_GRID)
        idx = numerical_index(sym)
        assert res.rounded == idx.value, name
        assert res.residual <= 1e-2, name
    print(
        f"[criterion 2] PASS closure corpus: {len(corpus)} symbols, "
        f"W3 = truncation index for each, residuals <= 1e-2"
    )


def test_criterion_3_bott_generator():
    res = w3(bott_generator(), grid=DEFAULT_GRID)
    assert res.rounded == 1
    assert res.residual <= 1e-3
    rev = w3(bott_generator(reversed_orientation=True), grid=DEFAULT_GRID)
    assert rev.rounded == -1
    assert rev.residual <= 1e-3
    print(
        f"[criterion 3] PASS Bott generator: W3 = {res.raw_value:.6f}, "
        f"orientation-reversed W3 = {rev.raw_value:.6f}"
    )


def test_criterion_4_one_dimensional_suite(rng):
    zs = np.exp(2j * np.pi * np.arange(17) / 17)
    n_canonical = 0
    total = 0
    for trial in range(50):
        if trial % 5 < 3:
            sym = random_canonical_1d(
                rng, int(rng.integers(1, 4)), int(rng.integers(1, 3))
            )
            expected_winding = 0
        else:
            sym, expected_winding = random_nonzero_winding_1d(
                rng, int(rng.integers(1, 4))
            )
        total += 1
        wind = winding_of_det(sym)
        assert wind == expected_winding
        kappa = partial_indices(sym)
        assert sum(kappa) == wind
        assert numerical_index(sym).value == -wind
        if all(k == 0 for k in kappa):
            n_canonical += 1
            a = canonical_factorize(sym, truncation=32)
            b = canonical_factorize(sym, truncation=64)
            assert a.residual <= 1e-8
            assert verify_factorization(a).residual <= 1e-8
            assert np.max(np.abs(a.minus_values(zs) - b.minus_values(zs))) <= 1e-8
            assert np.max(np.abs(a.plus_values(zs) - b.plus_values(zs))) <= 1e-8
    assert total == 50
    print(
        f"[criterion 4] PASS one-dimensional suite: 50 randomized symbols, "
        f"sum(kappa) = winding and segment index = -winding for each; "
        f"{n_canonical} canonical cases factor to residual <= 1e-8, "
        f"factors unique under truncation change"
    )


def test_criterion_5_symmetric_extensions(golden, golden_H):
    herm = equi = 0.0
    for sym in (golden_H, assemble_chiral(golden.adjoint())):
        ext = build_extended(sym)
        herm = max(herm, check_hermitian(ext, grid=(16, 9, 16)))
        # both symbols have real coefficients
        equi = max(equi, check_equivariance(ext, "AI", grid=(16, 9, 16)))
    assert herm <= 1e-8
    assert equi <= 1e-8
    print(
        f"[criterion 5] PASS symmetry preservation: hermiticity deviation "
        f"{herm:.2e}, AI equivariance deviation {equi:.2e} over two "
        f"hermitian gapped symbols"
    )


def test_criterion_6_radial_gap(golden):
    radii = np.linspace(0.0, 1.0, 9)
    worst = np.inf
    for var in (0, 1):
        for j in range(4):
            sl = golden.slice(var, (np.exp(2.0j * np.pi * j / 4),))
            scan = radial_scan(canonical_factorize(sl), radii=radii)
            worst = min(worst, scan.worst)
    assert worst >= 0.1
    print(
        f"[criterion 6] PASS radial interpolation gap: sigma_min >= "
        f"{worst:.3f} over the 9-point radius grid in both variables"
    )


def test_criterion_7_corner_modes(golden_H):
    res = corner_spectrum(golden_H, side=20)
    assert len(res.corner_modes) == 1
    mode = res.corner_modes[0]
    assert abs(mode.value) <= 1e-6
    assert mode.chirality >= 0.99
    assert res.spectral_gap >= 0.1
    assert res.signed_count == 1
    h = split_chiral(golden_H)
    w3_res = w3(build_extended(h), grid=DEFAULT_GRID)
    assert w3_res.rounded == res.signed_count == 1
    print(
        f"[criterion 7] PASS corner modes at L=20: one corner-attached "
        f"eigenvalue ({mode.value:.1e}, chirality {mode.chirality:.4f}), "
        f"next eigenvalue {res.spectral_gap:.3f}, signed count = W3 = 1"
    )


def test_criterion_8_spectral_flow(golden_H):
    static = spectral_flow(promote_to_family(golden_H), t_samples=16, side=6)
    assert static.flow == 0
    assert static.crossings == ()

    fam = sin_mass_family(golden_H)
    res = spectral_flow(fam, t_samples=16, side=6)
    assert res.flow == 0
    assert len(res.crossings) == 2
    assert sorted(s for _, s in res.crossings) == [-1, 1]
    doubled = spectral_flow(fam, t_samples=32, side=6)
    assert doubled.flow == 0
    assert len(doubled.crossings) == 2
    print(
        f"[criterion 8] PASS spectral flow: t-independent family flows 0; "
        f"sin-mass family nets 0 through crossings at t = "
        f"{', '.join(f'{t:.3f} ({s:+d})' for t, s in res.crossings)}, "
        f"stable under doubled sampling"
    )


def test_criterion_9_failure_modes(tmp_path, capsys):
    path = tmp_path / "diag.json"
    save_symbol(
        LaurentSymbol(2, 2, [
            ((1, 0), np.diag([1.0, 0.0])),
            ((-1, 0), np.diag([0.0, 1.0])),
        ]),
        path,
    )
    code = cli.main(["index", str(path), "--mode", "truncation"])
    out = capsys.readouterr().out
    assert code == 2
    body = json.loads("\n".join(out.splitlines()[1:]))
    assert body["error"] == "NotFredholm"
    assert body["indices"] == [1, -1]

    t_samples = 16
    with pytest.raises(NotFredholm) as err:
        build_extended_family(
            gap_closing_family(), t_samples=t_samples, samples_per_circle=4
        )
    t_hit = err.value.where[-1]
    assert abs(t_hit - 2 * np.pi / 3) <= 2 * np.pi / t_samples
    print(
        f"[criterion 9] PASS failure modes: non-Fredholm input exits 2 with "
        f"indices [1, -1]; gap-closing family rejected at t = {t_hit:.4f} "
        f"(true closing 2pi/3 = {2 * np.pi / 3:.4f}, spacing "
        f"{2 * np.pi / t_samples:.4f})"
    )
