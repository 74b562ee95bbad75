"""Wiener-Hopf factorization of one-variable matrix symbols on the circle.

For an invertible matrix Laurent polynomial f on the unit circle this module
computes the partial indices of the right factorization f = f_- Lambda f_+
and, in the canonical case (all indices zero), the factors themselves with
the normalization f_-(infinity) = I that makes them unique.

Method: the coefficients h_k of f_+^{-1} = sum_k h_k z^k solve the
block-Toeplitz system  sum_j fhat(i - j) h_j = delta_{i0} I, i = 0..m,
which is the finite section of T_f applied to the coefficient sequence.
f_- = f f_+^{-1} is then a polynomial in 1/z recovered by FFT; its constant
term is exactly I by construction.  Partial indices are recovered without
factorizing, from kernel dimensions of the shifted operators T_{z^m f}:
dim ker T_{z^m f} = sum_i max(-(kappa_i + m), 0), so the multiplicity of the
index value -m is the second difference of that count in m.

Kernel dimensions come from tall rectangular compressions: columns are the
sites 0..L-1, rows all sites that receive band contributions from them.  A
vector in the kernel of that matrix is annihilated by every row the infinite
operator could populate, so small singular values correspond to genuine
approximate kernel vectors and corner artifacts of square sections never
appear.  Counts must agree across L and 2L before they are believed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    IllConditioned,
    InputError,
    NonConvergent,
    NotCanonical,
    SingularOnTorus,
    Unstable,
    WindowTooSmall,
)
from .symbols import LaurentSymbol, SliceSymbol

__all__ = [
    "FactorizationResult",
    "VerificationReport",
    "RadialScanResult",
    "partial_indices",
    "canonical_factorize",
    "verify_factorization",
    "radial_scan",
    "toeplitz_kernel_dim",
    "sigma_min_section",
    "winding_of_det",
    "certify_invertible",
]

KERNEL_RELTOL = 1e-8        # singular values below this times sigma_max count as zero
COND_CAP = 1e12
SECTION_CAP = 1536          # largest kernel-scan section before giving up


def _as_one_var(symbol):
    if isinstance(symbol, SliceSymbol):
        symbol = symbol.symbol
    if symbol.num_vars != 1:
        raise DimensionMismatch("a one-variable symbol is required here")
    return symbol


def _poly_values(coeff_stack, u):
    """sum_k coeff_stack[k] * u^k by Horner, broadcast over the array u."""
    u = np.asarray(u, dtype=complex)
    out = np.broadcast_to(coeff_stack[-1], u.shape + coeff_stack.shape[1:]).copy()
    for k in range(len(coeff_stack) - 2, -1, -1):
        out *= u[..., None, None]
        out += coeff_stack[k]
    return out


def certify_invertible(symbol, samples=1024, tol=1e-8):
    """Check min |det f| on a dense circle grid; SingularOnTorus below tol."""
    symbol = _as_one_var(symbol)
    zs = np.exp(2j * np.pi * np.arange(samples) / samples)
    dets = np.linalg.det(symbol.eval_grid([zs]))
    dmin = float(np.abs(dets).min())
    if dmin <= tol:
        raise SingularOnTorus(
            f"min |det f| = {dmin:.3e} on a {samples}-point grid (tol {tol:.1e})"
        )
    return dets


def winding_of_det(symbol, samples=1024, tol=1e-8):
    """Winding number of det f around the origin (certifies invertibility first)."""
    dets = certify_invertible(symbol, samples=samples, tol=tol)
    steps = np.angle(np.roll(dets, -1) / dets)
    total = float(steps.sum()) / (2.0 * np.pi)
    w = int(round(total))
    if abs(total - w) > 0.25:
        raise Unstable(f"det winding sum {total:.3f} is not close to an integer")
    return w


# --------------------------------------------------------- tall sections


def _tall_matrix(coeffs, band_dim, cols):
    """Rectangular compression of T_g: columns 0..cols-1, all reachable rows."""
    keys = sorted(coeffs)
    m_max = max(0, keys[-1])
    rows = cols + m_max
    a4 = np.zeros((rows, band_dim, cols, band_dim), dtype=complex)
    for k in keys:
        js = np.arange(max(0, -k), min(cols, rows - k))
        if js.size:
            a4[js + k, :, js, :] = coeffs[k]
    return a4.reshape(rows * band_dim, cols * band_dim)


def _kernel_count(mat, rel_tol=KERNEL_RELTOL):
    """Kernel count of a section, with the relative size of the smallest
    retained singular value (the margin separating kernel from bulk)."""
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return mat.shape[1], float("inf")
    cut = rel_tol * sv[0]
    count = int(np.count_nonzero(sv < cut))
    above = sv[sv >= cut]
    margin = float(above[-1] / sv[0]) if above.size else float("inf")
    return count, margin


def _stable_kernel_dim(coeffs, band_dim, start, cap=SECTION_CAP,
                       rel_tol=KERNEL_RELTOL):
    """Tall-section kernel dimension, escalated until trustworthy.

    Agreement of two consecutive doublings is not enough: a slowly decaying
    kernel vector keeps its section residual above the cutoff at small
    sizes, and the count then stabilizes at the wrong value.  The count is
    accepted only when the margin is not collapsing geometrically; a margin
    shrinking by more than a factor of 3 per doubling signals a direction
    heading under the cutoff, so the doubling continues until it crosses
    (the count increments) or levels off.
    """
    length = start
    prev = None
    while length <= cap:
        count, margin = _kernel_count(
            _tall_matrix(coeffs, band_dim, length), rel_tol
        )
        if prev is not None and count == prev[0] and margin >= 0.3 * prev[1]:
            return count
        prev = (count, margin)
        length *= 2
    raise Unstable(
        f"kernel dimension did not stabilize below section length {cap}"
    )


def toeplitz_kernel_dim(symbol, start=None, cap=SECTION_CAP, rel_tol=KERNEL_RELTOL):
    """Stabilized dim ker of the half-line Toeplitz operator T_f."""
    symbol = _as_one_var(symbol)
    coeffs = {k[0]: a for k, a in symbol.coeffs.items()}
    if not coeffs:
        return symbol.band_dim  # zero symbol: everything is kernel
    lo, hi = min(coeffs), max(coeffs)
    spread = max(hi - lo, 1)
    length = start if start is not None else max(24, 4 * spread)
    return _stable_kernel_dim(coeffs, symbol.band_dim, length, cap, rel_tol)


# -------------------------------------------------------- partial indices


def partial_indices(symbol, window=None, det_samples=1024, det_tol=1e-8):
    """Partial indices of the right factorization, descending with multiplicity.

    Scans m over [-M-1, M+1] with M = band_dim * exponent spread (indices of
    a Laurent polynomial cannot exceed its exponent range, so this window is
    always wide enough) and reads multiplicities off second differences of
    d(m) = dim ker T_{z^m f}.  Linear tails of d at the window ends are
    required; their absence raises WindowTooSmall.
    """
    symbol = _as_one_var(symbol)
    certify_invertible(symbol, samples=det_samples, tol=det_tol)
    n = symbol.band_dim
    lo, hi = symbol.exponent_range(0)
    if lo == hi:
        # single monomial a z^lo with a invertible: indices are all lo
        return tuple([lo] * n)
    if window is None:
        window = n * (hi - lo)
    m_values = np.arange(-window - 1, window + 2)
    coeffs = {k[0]: a for k, a in symbol.coeffs.items()}
    d = {}
    for m in m_values:
        shifted = {k + int(m): a for k, a in coeffs.items()}
        spread = max(hi - lo + abs(int(m)), 1)
        try:
            d[int(m)] = _stable_kernel_dim(shifted, n, max(24, 4 * spread))
        except Unstable as exc:
            raise Unstable(f"kernel count for shift {m}: {exc}") from exc

    # tails: d must be exactly linear with slope -n at the negative end and
    # identically zero at the positive end, else the window missed an index
    if d[window + 1] != 0 or d[window] != 0:
        raise WindowTooSmall("d(m) does not vanish at the positive window end")
    if d[-window - 1] - d[-window] != n:
        raise WindowTooSmall("d(m) is not n-linear at the negative window end")

    indices = []
    for c in range(-window, window + 1):
        mult = d[-c - 1] - 2 * d[-c] + d[-c + 1]
        if mult < 0:
            raise Unstable(f"negative multiplicity at index value {c}")
        indices.extend([c] * mult)
    if len(indices) != n:
        raise Unstable(
            f"index multiplicities sum to {len(indices)}, expected {n}"
        )
    indices.sort(reverse=True)
    total = sum(indices)
    wind = winding_of_det(symbol, samples=det_samples, tol=det_tol)
    if total != wind:
        raise Unstable(
            f"sum of partial indices {total} disagrees with det winding {wind}"
        )
    return tuple(indices)


def _certified_canonical(symbol, det_samples=1024, det_tol=1e-8):
    """Cheap exact certificate: winding(det) = 0 and trivial T_f kernel.

    dim ker T_f = sum_i max(-kappa_i, 0), so a trivial kernel forces all
    indices >= 0; winding zero is their sum, hence all are zero.
    """
    if winding_of_det(symbol, samples=det_samples, tol=det_tol) != 0:
        return False
    return toeplitz_kernel_dim(symbol) == 0


# ----------------------------------------------------------- factorization


@dataclass(frozen=True)
class FactorizationResult:
    """Canonical right factorization f = f_- f_+ with f_-(infinity) = I.

    ``plus_inv_coeffs[k]`` is the coefficient of z^k in f_+^{-1};
    ``minus_coeffs[k]`` the coefficient of z^{-k} in f_- (index 0 is I).
    """

    symbol: LaurentSymbol
    partial_indices: tuple
    minus_coeffs: np.ndarray
    plus_inv_coeffs: np.ndarray
    truncation: int
    residual: float
    condition: float

    @property
    def band_dim(self):
        return self.symbol.band_dim

    def plus_inv_values(self, z):
        """f_+^{-1}(z) = sum_k h_k z^k on arrays of |z| <= 1."""
        return _poly_values(self.plus_inv_coeffs, z)

    def plus_values(self, z):
        return np.linalg.inv(self.plus_inv_values(z))

    def minus_conj_values(self, zbar):
        """f_-(1/conj(z)) written as sum_k c_k zbar^k, regular on |zbar| <= 1."""
        return _poly_values(self.minus_coeffs, zbar)

    def minus_values(self, z):
        z = np.asarray(z, dtype=complex)
        return _poly_values(self.minus_coeffs, 1.0 / z)

    def scaled_symbol_coeffs(self, t, grid=1024):
        """Fourier coefficients of z -> f_-(z/t) f_+(t z) for 0 <= t <= 1.

        The series form kills the apparent 1/t: f_-(z/t) = sum_k c_k t^k z^{-k},
        so t = 0 degenerates smoothly to the constant f_+(0).
        """
        zs = np.exp(2j * np.pi * np.arange(grid) / grid)
        c_scaled = self.minus_coeffs * (t ** np.arange(len(self.minus_coeffs)))[:, None, None]
        h_scaled = self.plus_inv_coeffs * (t ** np.arange(len(self.plus_inv_coeffs)))[:, None, None]
        vals = _poly_values(c_scaled, np.conj(zs)) @ np.linalg.inv(_poly_values(h_scaled, zs))
        return np.fft.fft(vals, axis=0) / grid


def _condition_estimate(mat, lu=None, exact_limit=2048):
    if mat.shape[0] <= exact_limit:
        return float(np.linalg.cond(mat))
    # beyond the SVD budget: probe ||A^{-1}|| through the LU factors and pair
    # it with the Frobenius norm; a lower bound is enough for the cap decision
    if lu is None:
        lu = scipy.linalg.lu_factor(mat)
    rng = np.random.default_rng(7)
    est = 0.0
    for _ in range(3):
        x = rng.standard_normal(mat.shape[0]) + 1j * rng.standard_normal(mat.shape[0])
        x /= np.linalg.norm(x)
        est = max(est, float(np.linalg.norm(scipy.linalg.lu_solve(lu, x))))
    return est * float(np.linalg.norm(mat))


def _solve_plus_inverse(symbol, m):
    """Solve the (m+1)-block Toeplitz system for the f_+^{-1} coefficients."""
    n = symbol.band_dim
    coeffs = {k[0]: a for k, a in symbol.coeffs.items()}
    a4 = np.zeros((m + 1, n, m + 1, n), dtype=complex)
    for k, a in coeffs.items():
        js = np.arange(max(0, -k), min(m + 1, m + 1 - k))
        if js.size:
            a4[js + k, :, js, :] = a
    mat = a4.reshape((m + 1) * n, (m + 1) * n)
    rhs = np.zeros(((m + 1) * n, n), dtype=complex)
    rhs[:n, :n] = np.eye(n)
    lu = scipy.linalg.lu_factor(mat)
    sol = scipy.linalg.lu_solve(lu, rhs)
    cond = _condition_estimate(mat, lu=lu)
    return sol.reshape(m + 1, n, n), cond


def _factor_residual(symbol, h_stack, grid=512):
    """Recover f_- by FFT and measure sup |f_- f_+ - f| on a circle grid."""
    n = symbol.band_dim
    lo, hi = symbol.exponent_range(0)
    m = len(h_stack) - 1
    span = (hi + m) - lo + 1
    size = max(grid, int(2 ** np.ceil(np.log2(max(span + 1, 2)))))
    zs = np.exp(2j * np.pi * np.arange(size) / size)
    fvals = symbol.eval_grid([zs])
    pvals = _poly_values(h_stack, zs)
    prod = fvals @ pvals
    fourier = np.fft.fft(prod, axis=0) / size
    k_minus = max(0, -lo)
    c_stack = np.empty((k_minus + 1, n, n), dtype=complex)
    c_stack[0] = fourier[0]
    for k in range(1, k_minus + 1):
        c_stack[k] = fourier[size - k]
    # the solved rows force c_0 = I up to roundoff; pin it exactly
    c_stack[0] = np.eye(n)
    minus_vals = _poly_values(c_stack, np.conj(zs))
    resid_vals = minus_vals @ np.linalg.inv(pvals) - fvals
    residual = float(np.linalg.norm(resid_vals, axis=(-2, -1)).max())
    return c_stack, residual


def canonical_factorize(
    symbol,
    truncation=None,
    tol=1e-10,
    max_truncation=4096,
    det_samples=1024,
    det_tol=1e-8,
):
    """Compute the canonical factorization of a one-variable symbol.

    Raises SingularOnTorus / NotCanonical when f is not invertible on the
    circle or has nonzero partial indices; NonConvergent when the residual
    stays above ``tol`` at the truncation cap; IllConditioned when the
    Toeplitz section crosses the condition bound.
    """
    symbol = _as_one_var(symbol)
    certify_invertible(symbol, samples=det_samples, tol=det_tol)
    n = symbol.band_dim
    lo, hi = symbol.exponent_range(0)
    if lo == hi == 0:
        a = symbol.coeff((0,))
        return FactorizationResult(
            symbol=symbol,
            partial_indices=tuple([0] * n),
            minus_coeffs=np.eye(n, dtype=complex)[None, :, :],
            plus_inv_coeffs=np.linalg.inv(a)[None, :, :],
            truncation=0,
            residual=0.0,
            condition=float(np.linalg.cond(a)),
        )
    if not _certified_canonical(symbol, det_samples=det_samples, det_tol=det_tol):
        raise NotCanonical(partial_indices(symbol, det_samples=det_samples, det_tol=det_tol))

    m = truncation if truncation is not None else 32
    best = None
    while True:
        h_stack, cond = _solve_plus_inverse(symbol, m)
        if cond > COND_CAP:
            raise IllConditioned(
                f"Toeplitz section condition {cond:.3e} exceeds {COND_CAP:.1e}"
            )
        c_stack, residual = _factor_residual(symbol, h_stack)
        if best is None or residual < best[3]:
            best = (h_stack, cond, c_stack, residual, m)
        if residual <= tol:
            break
        if truncation is not None or 2 * m > max_truncation:
            if residual > tol and truncation is None:
                raise NonConvergent(
                    f"residual {residual:.3e} above {tol:.1e} at truncation cap {m}"
                )
            break
        m *= 2
    h_stack, cond, c_stack, residual, m = best
    return FactorizationResult(
        symbol=symbol,
        partial_indices=tuple([0] * n),
        minus_coeffs=c_stack,
        plus_inv_coeffs=h_stack,
        truncation=m,
        residual=residual,
        condition=cond,
    )


# ------------------------------------------------------------ verification


@dataclass(frozen=True)
class VerificationReport:
    residual: float
    tail_ratio: float
    grid: int

    def ok(self, tol=1e-8, tail_tol=1e-6):
        return self.residual <= tol and self.tail_ratio <= tail_tol


def verify_factorization(fact, grid=512):
    """Independent residual + tail-decay check of a FactorizationResult."""
    zs = np.exp(2j * np.pi * np.arange(grid) / grid)
    fvals = fact.symbol.eval_grid([zs])
    recon = fact.minus_values(zs) @ fact.plus_values(zs)
    residual = float(np.linalg.norm(recon - fvals, axis=(-2, -1)).max())
    h = fact.plus_inv_coeffs
    head = float(np.linalg.norm(h[0]))
    tail = float(np.linalg.norm(h[-1])) / max(head, 1e-300) if len(h) > 1 else 0.0
    return VerificationReport(residual=residual, tail_ratio=tail, grid=grid)


# ------------------------------------------------------------- radial scan


@dataclass(frozen=True)
class RadialScanResult:
    radii: tuple
    sigma_min: tuple
    section: int

    @property
    def worst(self):
        return min(self.sigma_min)


def sigma_min_section(symbol, section=64):
    """Smallest singular value of the square block-Toeplitz section of T_f."""
    symbol = _as_one_var(symbol)
    coeffs = {k[0]: a for k, a in symbol.coeffs.items()}
    n = symbol.band_dim
    a4 = np.zeros((section, n, section, n), dtype=complex)
    for k, a in coeffs.items():
        js = np.arange(max(0, -k), min(section, section - k))
        if js.size:
            a4[js + k, :, js, :] = a
    sv = np.linalg.svd(a4.reshape(section * n, section * n), compute_uv=False)
    return float(sv[-1])


def _section_from_fourier(fourier, section):
    grid, n = fourier.shape[0], fourier.shape[1]
    a4 = np.zeros((section, n, section, n), dtype=complex)
    for k in range(-(section - 1), section):
        a = fourier[k % grid]
        js = np.arange(max(0, -k), min(section, section - k))
        a4[js + k, :, js, :] = a
    return a4.reshape(section * n, section * n)


def radial_scan(fact, radii=None, section=64, grid=1024):
    """sigma_min of the Toeplitz sections with symbol f_-(z/t) f_+(tz).

    These interpolate between T_f at t = 1 and the invertible constant
    f_+(0) at t = 0; uniformly positive values certify the whole family.
    """
    if radii is None:
        radii = np.linspace(0.0, 1.0, 9)
    sigmas = []
    for t in radii:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise InputError(f"radius {t} outside [0, 1]")
        fourier = fact.scaled_symbol_coeffs(t, grid=grid)
        mat = _section_from_fourier(fourier, section)
        sv = np.linalg.svd(mat, compute_uv=False)
        sigmas.append(float(sv[-1]))
    return RadialScanResult(
        radii=tuple(float(t) for t in radii),
        sigma_min=tuple(sigmas),
        section=section,
    )
