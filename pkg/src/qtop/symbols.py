"""Finite-hopping lattice symbols: matrix Laurent polynomials on the torus.

Contents
--------
LaurentSymbol   coefficient-level container with eval / product / adjoint
SliceSymbol     one variable kept active, the others frozen to torus points
az_class        Altland-Zirnbauer class table (degree, relations, block rule)
check_symmetry  validate the class relations at coefficient level and on grids
assemble_chiral build H = [[0, h*], [h, 0]] from an arbitrary symbol h
split_chiral    recover h from a chiral H and verify the block structure
det_on_circle   det samples on the torus (input to winding counts)
load_symbol / save_symbol / symbol_to_dict / symbol_from_dict   file format

Coefficients are stored exactly (complex double matrices keyed by integer
exponent vectors); nothing is sampled until an operation asks for values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ChiralViolation,
    DimensionMismatch,
    DuplicateExponent,
    InputError,
    NotHermitian,
    SymmetryViolation,
    ZeroCoordinate,
)

__all__ = [
    "LaurentSymbol",
    "SliceSymbol",
    "AZClassSpec",
    "SymmetryReport",
    "az_class",
    "check_symmetry",
    "assemble_chiral",
    "split_chiral",
    "det_on_circle",
    "load_symbol",
    "save_symbol",
    "symbol_to_dict",
    "symbol_from_dict",
]


def _as_coeff(matrix, band_dim):
    a = np.asarray(matrix, dtype=complex)
    if a.shape != (band_dim, band_dim):
        raise DimensionMismatch(
            f"coefficient has shape {a.shape}, expected ({band_dim}, {band_dim})"
        )
    a = a.copy()
    a.setflags(write=False)
    return a


class LaurentSymbol:
    """Matrix Laurent polynomial f(z_1, ..., z_d) = sum_j a_j z^j.

    Parameters
    ----------
    num_vars : int
        Number of torus variables d >= 1.
    band_dim : int
        Matrix size N of the coefficients.
    terms : iterable of (exponents, matrix)
        Exponent vectors are length-d integer tuples; duplicate vectors are
        a hard error (no silent summing).  Exact-zero matrices are dropped.
    """

    def __init__(self, num_vars, band_dim, terms):
        if num_vars < 1:
            raise InputError("num_vars must be >= 1")
        if band_dim < 1:
            raise InputError("band_dim must be >= 1")
        self.num_vars = int(num_vars)
        self.band_dim = int(band_dim)
        coeffs = {}
        for exponents, matrix in terms:
            key = tuple(int(e) for e in exponents)
            if len(key) != self.num_vars:
                raise DimensionMismatch(
                    f"exponent vector {key} has length {len(key)}, expected {self.num_vars}"
                )
            if key in coeffs:
                raise DuplicateExponent(key)
            a = _as_coeff(matrix, self.band_dim)
            if np.any(a != 0):
                coeffs[key] = a
        self._coeffs = coeffs

    # ------------------------------------------------------------ basics

    @classmethod
    def identity(cls, num_vars, band_dim):
        return cls(num_vars, band_dim, [((0,) * num_vars, np.eye(band_dim))])

    @classmethod
    def constant(cls, num_vars, matrix):
        a = np.asarray(matrix, dtype=complex)
        return cls(num_vars, a.shape[0], [((0,) * num_vars, a)])

    @property
    def coeffs(self):
        """Read-only view of the coefficient dictionary."""
        return dict(self._coeffs)

    @property
    def exponents(self):
        return sorted(self._coeffs)

    def coeff(self, exponents):
        """Coefficient at an exponent vector (zero matrix if absent)."""
        key = tuple(int(e) for e in exponents)
        a = self._coeffs.get(key)
        if a is None:
            return np.zeros((self.band_dim, self.band_dim), dtype=complex)
        return a

    def exponent_range(self, var):
        """(min, max) exponent appearing in variable ``var`` (0 if empty)."""
        if not self._coeffs:
            return (0, 0)
        es = [key[var] for key in self._coeffs]
        return (min(es), max(es))

    def coeff_norm(self):
        """Sum of Frobenius norms of all coefficients (scale of the symbol)."""
        if not self._coeffs:
            return 0.0
        return float(sum(np.linalg.norm(a) for a in self._coeffs.values()))

    def __eq__(self, other):
        if not isinstance(other, LaurentSymbol):
            return NotImplemented
        if (self.num_vars, self.band_dim) != (other.num_vars, other.band_dim):
            return False
        if set(self._coeffs) != set(other._coeffs):
            return False
        return all(np.array_equal(self._coeffs[k], other._coeffs[k]) for k in self._coeffs)

    def __repr__(self):
        return (
            f"LaurentSymbol(num_vars={self.num_vars}, band_dim={self.band_dim}, "
            f"terms={len(self._coeffs)})"
        )

    def distance(self, other):
        """Max Frobenius distance between coefficients."""
        if (self.num_vars, self.band_dim) != (other.num_vars, other.band_dim):
            raise DimensionMismatch("symbols not comparable")
        keys = set(self._coeffs) | set(other._coeffs)
        if not keys:
            return 0.0
        return max(float(np.linalg.norm(self.coeff(k) - other.coeff(k))) for k in keys)

    # -------------------------------------------------------- evaluation

    def eval(self, point):
        """Evaluate at a point with nonzero complex coordinates.

        Negative exponents are honest inverse powers, so any zero coordinate
        they touch raises ZeroCoordinate.
        """
        pt = tuple(complex(p) for p in point)
        if len(pt) != self.num_vars:
            raise DimensionMismatch(
                f"point has {len(pt)} coordinates, expected {self.num_vars}"
            )
        out = np.zeros((self.band_dim, self.band_dim), dtype=complex)
        for key, a in self._coeffs.items():
            factor = 1.0 + 0.0j
            for e, p in zip(key, pt):
                if e != 0 and p == 0:
                    raise ZeroCoordinate(
                        f"exponent {e} at zero coordinate (exponent vector {key})"
                    )
                if e != 0:
                    factor *= p**e
            out += factor * a
        return out

    def eval_grid(self, axes):
        """Evaluate on a tensor grid of points.

        ``axes`` is a sequence of d one-dimensional complex arrays; the result
        has shape ``(len(axes[0]), ..., len(axes[d-1]), N, N)``.
        """
        if len(axes) != self.num_vars:
            raise DimensionMismatch("one axis per variable required")
        axes = [np.asarray(ax, dtype=complex) for ax in axes]
        shape = tuple(ax.size for ax in axes)
        out = np.zeros(shape + (self.band_dim, self.band_dim), dtype=complex)
        for key, a in self._coeffs.items():
            factor = np.ones(shape, dtype=complex)
            for axis, (e, ax) in enumerate(zip(key, axes)):
                if e == 0:
                    continue
                if np.any(ax == 0):
                    raise ZeroCoordinate(f"exponent {e} at zero grid coordinate")
                pw = ax**e
                expand = [None] * len(shape)
                expand[axis] = slice(None)
                factor = factor * pw[tuple(expand)]
            out += factor[..., None, None] * a
        return out

    # -------------------------------------------------------- arithmetic

    def _binary_guard(self, other):
        if (self.num_vars, self.band_dim) != (other.num_vars, other.band_dim):
            raise DimensionMismatch("operands differ in num_vars or band_dim")

    def __add__(self, other):
        if not isinstance(other, LaurentSymbol):
            return NotImplemented
        self._binary_guard(other)
        keys = set(self._coeffs) | set(other._coeffs)
        terms = [(k, self.coeff(k) + other.coeff(k)) for k in keys]
        return LaurentSymbol(self.num_vars, self.band_dim, terms)

    def __sub__(self, other):
        if not isinstance(other, LaurentSymbol):
            return NotImplemented
        return self + other.scale(-1.0)

    def scale(self, c):
        terms = [(k, c * a) for k, a in self._coeffs.items()]
        return LaurentSymbol(self.num_vars, self.band_dim, terms)

    def __mul__(self, other):
        """Pointwise matrix product, carried out as exponent convolution."""
        if not isinstance(other, LaurentSymbol):
            return NotImplemented
        self._binary_guard(other)
        acc = {}
        for ka, a in self._coeffs.items():
            for kb, b in other._coeffs.items():
                key = tuple(ea + eb for ea, eb in zip(ka, kb))
                prod = a @ b
                if key in acc:
                    acc[key] = acc[key] + prod
                else:
                    acc[key] = prod
        return LaurentSymbol(self.num_vars, self.band_dim, acc.items())

    def shift(self, exponents):
        """Multiply by the scalar monomial z^exponents."""
        off = tuple(int(e) for e in exponents)
        if len(off) != self.num_vars:
            raise DimensionMismatch("shift vector length mismatch")
        terms = [
            (tuple(e + o for e, o in zip(k, off)), a) for k, a in self._coeffs.items()
        ]
        return LaurentSymbol(self.num_vars, self.band_dim, terms)

    def adjoint(self):
        """Pointwise conjugate transpose on the torus: a_j -> a_{-j}^H."""
        terms = [
            (tuple(-e for e in k), a.conj().T) for k, a in self._coeffs.items()
        ]
        return LaurentSymbol(self.num_vars, self.band_dim, terms)

    def transpose_flip(self):
        """The transposition a_j -> a_{-j}^T (transpose composed with z -> conj(z))."""
        terms = [(tuple(-e for e in k), a.T) for k, a in self._coeffs.items()]
        return LaurentSymbol(self.num_vars, self.band_dim, terms)

    def conj_coeffs(self):
        """Entrywise conjugation of every coefficient (no exponent flip)."""
        terms = [(k, a.conj()) for k, a in self._coeffs.items()]
        return LaurentSymbol(self.num_vars, self.band_dim, terms)

    def block_diag(self, other):
        """Direct sum with another symbol over the same variables."""
        if self.num_vars != other.num_vars:
            raise DimensionMismatch("operands differ in num_vars")
        n, m = self.band_dim, other.band_dim
        keys = set(self._coeffs) | set(other._coeffs)
        terms = []
        for k in keys:
            a = np.zeros((n + m, n + m), dtype=complex)
            a[:n, :n] = self.coeff(k)
            a[n:, n:] = other.coeff(k) if k in other._coeffs else 0.0
            terms.append((k, a))
        return LaurentSymbol(self.num_vars, n + m, terms)

    def conjugate_by(self, u):
        """U f U^{-1} for a constant invertible matrix U."""
        u = np.asarray(u, dtype=complex)
        uinv = np.linalg.inv(u)
        terms = [(k, u @ a @ uinv) for k, a in self._coeffs.items()]
        return LaurentSymbol(self.num_vars, self.band_dim, terms)

    # ------------------------------------------------------------ slices

    def slice(self, active_var, fixed_point):
        """Freeze all variables except ``active_var`` at torus values.

        ``fixed_point`` lists the values of the d-1 frozen variables in
        variable order.  Returns a SliceSymbol wrapping the collapsed
        one-variable symbol.
        """
        if not 0 <= active_var < self.num_vars:
            raise InputError(f"active_var {active_var} out of range")
        fixed = tuple(complex(p) for p in fixed_point)
        if len(fixed) != self.num_vars - 1:
            raise DimensionMismatch(
                f"need {self.num_vars - 1} frozen values, got {len(fixed)}"
            )
        frozen_vars = [v for v in range(self.num_vars) if v != active_var]
        acc = {}
        for key, a in self._coeffs.items():
            factor = 1.0 + 0.0j
            for v, p in zip(frozen_vars, fixed):
                e = key[v]
                if e != 0 and p == 0:
                    raise ZeroCoordinate(f"frozen variable {v} at zero with exponent {e}")
                if e != 0:
                    factor *= p**e
            ka = (key[active_var],)
            if ka in acc:
                acc[ka] = acc[ka] + factor * a
            else:
                acc[ka] = factor * a
        collapsed = LaurentSymbol(1, self.band_dim, acc.items())
        return SliceSymbol(self, active_var, fixed, collapsed)

    # ------------------------------------------------------------- JSON

    def to_dict(self):
        return symbol_to_dict(self)


@dataclass(frozen=True)
class SliceSymbol:
    """One-variable slice of a multivariable symbol.

    Evaluating the slice at z equals evaluating the parent with z inserted
    at ``active_var`` and ``fixed_point`` elsewhere; the collapsed
    coefficients make that identity exact.
    """

    parent: LaurentSymbol
    active_var: int
    fixed_point: tuple
    symbol: LaurentSymbol = field(compare=False)

    def eval(self, z):
        return self.symbol.eval((z,))


# ----------------------------------------------------------------- dets


def det_on_circle(symbol, samples=256):
    """det f at ``samples`` uniform points of the unit circle (1D symbols)."""
    if symbol.num_vars != 1:
        raise DimensionMismatch("det_on_circle expects a one-variable symbol")
    if samples < 4:
        raise InputError("samples must be >= 4")
    zs = np.exp(2j * np.pi * np.arange(samples) / samples)
    vals = symbol.eval_grid([zs])
    return np.linalg.det(vals)


# ------------------------------------------------- symmetry class table

# Degree i and block rule per class.  ``antiunitary``: how coefficients
# transform under the real structure ('none' for the complex classes).
# Chiral classes carry their relation on the off-diagonal block h.
_CLASS_TABLE = {
    "A": dict(degree=0, chiral=False, antiunitary="none"),
    "AIII": dict(degree=1, chiral=True, antiunitary="none"),
    "AI": dict(degree=0, chiral=False, antiunitary="real"),
    "BDI": dict(degree=1, chiral=True, antiunitary="real"),
    "D": dict(degree=2, chiral=False, antiunitary="real"),
    "DIII": dict(degree=3, chiral=True, antiunitary="quaternionic"),
    "AII": dict(degree=4, chiral=False, antiunitary="quaternionic"),
    "CII": dict(degree=5, chiral=True, antiunitary="quaternionic"),
    "C": dict(degree=6, chiral=False, antiunitary="quaternionic"),
    "CI": dict(degree=-1, chiral=True, antiunitary="real"),
}


@dataclass(frozen=True)
class AZClassSpec:
    """One Altland-Zirnbauer symmetry class.

    ``degree`` is the K-theoretic degree i in {-1, ..., 6}; ``chiral`` says
    whether the invariant lives on the off-diagonal block h of
    H = [[0, h*], [h, 0]]; ``relations`` names the coefficient-level
    relations validated by check_symmetry.
    """

    label: str
    degree: int
    chiral: bool
    antiunitary: str
    relations: tuple


def _relations_for(label, info):
    rel = ["hermitian"]
    if info["chiral"]:
        rel.append("chiral")
    block = "h" if info["chiral"] else "H"
    i = info["degree"]
    if i == -1:
        rel.append(f"transpose_symmetric:{block}")
    elif i == 1 and info["antiunitary"] == "real":
        rel.append(f"real_coefficients:{block}")
    elif i == 0 and info["antiunitary"] == "real":
        rel.append(f"real_coefficients:{block}")
    elif i == 2:
        rel.append(f"transpose_antisymmetric:{block}")
    elif i == 3:
        rel.append(f"quaternion_transpose_symmetric:{block}")
    elif i == 4:
        rel.append(f"quaternion_real:{block}")
    elif i == 5:
        rel.append(f"quaternion_real:{block}")
    elif i == 6:
        rel.append(f"quaternion_transpose_antisymmetric:{block}")
    return tuple(rel)


def az_class(label):
    """Look up an AZClassSpec by its standard label (case-insensitive)."""
    key = str(label).strip()
    found = {k.lower(): k for k in _CLASS_TABLE}.get(key.lower())
    if found is None:
        raise InputError(f"unknown symmetry class {label!r}")
    info = _CLASS_TABLE[found]
    return AZClassSpec(
        label=found,
        degree=info["degree"],
        chiral=info["chiral"],
        antiunitary=info["antiunitary"],
        relations=_relations_for(found, info),
    )


def _quaternion_unit(n):
    """Block-diagonal symplectic unit diag([[0,-1],[1,0]], ...) of size n."""
    if n % 2 != 0:
        raise DimensionMismatch("quaternionic relation requires even matrix size")
    u = np.zeros((n, n))
    for b in range(n // 2):
        u[2 * b, 2 * b + 1] = -1.0
        u[2 * b + 1, 2 * b] = 1.0
    return u


def chiral_projector(band_dim):
    """Pi = diag(1_{N/2}, -1_{N/2}) used throughout for chiral structure."""
    if band_dim % 2 != 0:
        raise DimensionMismatch("chiral structure requires even band_dim")
    half = band_dim // 2
    return np.diag(np.concatenate([np.ones(half), -np.ones(half)]))


def assemble_chiral(h):
    """Chiral Hamiltonian H = [[0, h*], [h, 0]] from an arbitrary symbol h.

    The basis ordering puts the Pi = +1 components first, so with
    Pi = chiral_projector(2N): Pi H = -H Pi, and the lower-left block is h.
    """
    n = h.band_dim
    hstar = h.adjoint()
    keys = set(h.coeffs) | set(hstar.coeffs)
    terms = []
    for k in keys:
        a = np.zeros((2 * n, 2 * n), dtype=complex)
        a[:n, n:] = hstar.coeff(k)
        a[n:, :n] = h.coeff(k)
        terms.append((k, a))
    return LaurentSymbol(h.num_vars, 2 * n, terms)


def split_chiral(symbol, tol=1e-12):
    """Extract h from H = [[0, h*], [h, 0]]; errors when the structure fails."""
    n = symbol.band_dim
    if n % 2 != 0:
        raise ChiralViolation("band_dim must be even for a chiral block structure")
    half = n // 2
    scale = max(symbol.coeff_norm(), 1.0)
    terms = []
    for k, a in symbol.coeffs.items():
        offdiag = max(
            np.linalg.norm(a[:half, :half]), np.linalg.norm(a[half:, half:])
        )
        if offdiag > tol * scale:
            raise ChiralViolation(
                f"diagonal block of coefficient {k} has norm {offdiag:.3e}"
            )
        terms.append((k, a[half:, :half]))
    return LaurentSymbol(symbol.num_vars, half, terms)


# ------------------------------------------------------ relation checks


def _relation_violation(symbol, relation):
    """Max coefficient-level violation of one named relation on ``symbol``."""
    name = relation.split(":", 1)[0]
    scale = max(symbol.coeff_norm(), 1e-300)
    if name == "hermitian":
        return symbol.distance(symbol.adjoint()) / scale
    if name == "chiral":
        pi = chiral_projector(symbol.band_dim)
        worst = 0.0
        for _, a in symbol.coeffs.items():
            worst = max(worst, float(np.linalg.norm(pi @ a + a @ pi)))
        return worst / scale
    if name == "real_coefficients":
        return symbol.distance(symbol.conj_coeffs()) / scale
    if name == "transpose_symmetric":
        return symbol.distance(symbol.transpose_flip()) / scale
    if name == "transpose_antisymmetric":
        return symbol.distance(symbol.transpose_flip().scale(-1.0)) / scale
    u = _quaternion_unit(symbol.band_dim)
    uinv = u.T
    if name == "quaternion_transpose_symmetric":
        flipped = symbol.transpose_flip()
        terms = [(k, u @ a @ uinv) for k, a in flipped.coeffs.items()]
        return symbol.distance(LaurentSymbol(symbol.num_vars, symbol.band_dim, terms)) / scale
    if name == "quaternion_transpose_antisymmetric":
        flipped = symbol.transpose_flip()
        terms = [(k, -(u @ a @ uinv)) for k, a in flipped.coeffs.items()]
        return symbol.distance(LaurentSymbol(symbol.num_vars, symbol.band_dim, terms)) / scale
    if name == "quaternion_real":
        conj = symbol.conj_coeffs()
        terms = [(k, u @ a @ uinv) for k, a in conj.coeffs.items()]
        return symbol.distance(LaurentSymbol(symbol.num_vars, symbol.band_dim, terms)) / scale
    raise InputError(f"unknown relation {relation!r}")


def _grid_violation(symbol, relation, grid):
    """Same relation evaluated pointwise on a torus grid (rounding-level check)."""
    name = relation.split(":", 1)[0]
    axes = [
        np.exp(2j * np.pi * np.arange(grid) / grid) for _ in range(symbol.num_vars)
    ]
    vals = symbol.eval_grid(axes)
    scale = max(float(np.abs(vals).max()), 1e-300)
    if name == "hermitian":
        diff = vals - np.conj(np.swapaxes(vals, -1, -2))
        return float(np.linalg.norm(diff, axis=(-2, -1)).max()) / scale
    if name == "chiral":
        pi = chiral_projector(symbol.band_dim)
        diff = pi @ vals + vals @ pi
        return float(np.linalg.norm(diff, axis=(-2, -1)).max()) / scale
    vals_conj_pt = symbol.eval_grid([ax.conj() for ax in axes])
    if name == "real_coefficients":
        diff = vals_conj_pt - np.conj(vals)
    elif name == "transpose_symmetric":
        diff = vals_conj_pt - np.swapaxes(vals, -1, -2)
    elif name == "transpose_antisymmetric":
        diff = vals_conj_pt + np.swapaxes(vals, -1, -2)
    else:
        u = _quaternion_unit(symbol.band_dim)
        uinv = u.T
        if name == "quaternion_transpose_symmetric":
            diff = vals_conj_pt - u @ np.swapaxes(vals, -1, -2) @ uinv
        elif name == "quaternion_transpose_antisymmetric":
            diff = vals_conj_pt + u @ np.swapaxes(vals, -1, -2) @ uinv
        elif name == "quaternion_real":
            diff = vals_conj_pt - u @ np.conj(vals) @ uinv
        else:
            raise InputError(f"unknown relation {relation!r}")
    return float(np.linalg.norm(diff, axis=(-2, -1)).max()) / scale


@dataclass(frozen=True)
class SymmetryReport:
    """Outcome of check_symmetry: per-relation violations, overall verdict."""

    label: str
    violations: dict
    tol: float

    @property
    def passed(self):
        return all(v <= self.tol for v in self.violations.values())

    def require(self):
        if not self.passed:
            bad = {k: v for k, v in self.violations.items() if v > self.tol}
            raise SymmetryViolation(
                f"class {self.label} relations violated: "
                + ", ".join(f"{k}={v:.3e}" for k, v in bad.items())
            )
        return self


def check_symmetry(symbol, spec, grid=8, tol=1e-12):
    """Validate the relations of an AZ class on a symbol.

    The relations are checked exactly at coefficient level and once more on
    a ``grid``-per-variable torus grid; the reported violation of each
    relation is the max of the two, relative to the symbol scale.  Chiral
    classes check the block structure on H and the degree relation on h.
    """
    if isinstance(spec, str):
        spec = az_class(spec)
    violations = {}
    target_h = None
    for rel in spec.relations:
        where = rel.partition(":")[2]
        if where == "h":
            if target_h is None:
                target_h = split_chiral(symbol)
            target = target_h
        else:
            target = symbol
        v = _relation_violation(target, rel)
        v = max(v, _grid_violation(target, rel, grid))
        violations[rel] = v
    return SymmetryReport(label=spec.label, violations=violations, tol=tol)


def require_hermitian(symbol, tol=1e-12):
    scale = max(symbol.coeff_norm(), 1e-300)
    dev = symbol.distance(symbol.adjoint()) / scale
    if dev > tol:
        raise NotHermitian(f"symbol deviates from hermitian by {dev:.3e} (relative)")
    return symbol


# ------------------------------------------------------------ file I/O


def symbol_to_dict(symbol):
    terms = []
    for key in sorted(symbol.coeffs):
        a = symbol.coeff(key)
        matrix = [
            [[float(a[r, c].real), float(a[r, c].imag)] for c in range(symbol.band_dim)]
            for r in range(symbol.band_dim)
        ]
        terms.append({"exponents": list(key), "matrix": matrix})
    return {
        "num_vars": symbol.num_vars,
        "band_dim": symbol.band_dim,
        "terms": terms,
    }


def symbol_from_dict(data):
    if not isinstance(data, dict):
        raise InputError("symbol document must be a JSON object")
    for field_name in ("num_vars", "band_dim", "terms"):
        if field_name not in data:
            raise InputError(f"symbol document missing field {field_name!r}")
    try:
        num_vars = int(data["num_vars"])
        band_dim = int(data["band_dim"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"num_vars / band_dim must be integers: {exc}") from None
    terms = []
    for pos, term in enumerate(data["terms"]):
        if not isinstance(term, dict) or "exponents" not in term or "matrix" not in term:
            raise InputError(f"term {pos} must have 'exponents' and 'matrix'")
        exps = term["exponents"]
        try:
            ok = len(exps) == num_vars and all(float(e).is_integer() for e in exps)
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise InputError(
                f"term {pos}: exponents {exps} are not {num_vars} integers"
            )
        matrix = term["matrix"]
        try:
            arr = np.asarray(matrix, dtype=float)
        except (TypeError, ValueError):
            raise InputError(f"term {pos}: matrix entries must be [re, im] pairs") from None
        if arr.shape != (band_dim, band_dim, 2):
            raise InputError(
                f"term {pos}: matrix has shape {arr.shape}, "
                f"expected ({band_dim}, {band_dim}, 2)"
            )
        terms.append(([int(e) for e in exps], arr[..., 0] + 1j * arr[..., 1]))
    return LaurentSymbol(num_vars, band_dim, terms)


def save_symbol(symbol, path):
    import json

    with open(path, "w") as fh:
        json.dump(symbol_to_dict(symbol), fh, indent=1)
        fh.write("\n")


def load_symbol(path):
    import json

    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot parse symbol file {path}: {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read symbol file {path}: {exc}") from None
    return symbol_from_dict(data)
