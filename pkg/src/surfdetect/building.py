"""Lattices over the valuation ring of Q(t) and the 1-skeleton of the
Bruhat-Tits building of SL_n.

A lattice is stored by a basis: the columns of an n x n matrix over
:class:`~surfdetect.funcfield.RatFunc`.  All relative questions (inclusion,
homothety, adjacency, distance) reduce to the invariant-factor exponents of
one lattice with respect to another, computed by Smith normal form over the
valuation ring ``O_v = Q[t]_(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .funcfield import ONE, ZERO, RatFunc, laurent_prefix, monomial, parse

Matrix = list  # list[list[RatFunc]], row-major


class LatticeError(ValueError):
    """Singular basis, dimension mismatch and similar input errors."""


# -- matrix helpers ----------------------------------------------------------


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def diagonal(exps: Sequence[int]) -> Matrix:
    n = len(exps)
    return [[monomial(exps[i]) if i == j else ZERO for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0])
    out = [[ZERO] * p for _ in range(n)]
    for i in range(n):
        row = a[i]
        orow = out[i]
        for k in range(m):
            x = row[k]
            if not x:
                continue
            brow = b[k]
            for j in range(p):
                y = brow[j]
                if y:
                    orow[j] = orow[j] + x * y
    return out


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Return X with A X = B (A square, nonsingular)."""
    n = len(a)
    aug = [list(a[i]) + list(b[i]) for i in range(n)]
    width = len(aug[0])
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c]), None)
        if piv is None:
            raise LatticeError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = aug[c][c].inverse()
        prow = [x * inv if x else x for x in aug[c]]
        aug[c] = prow
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                row = aug[r]
                for j in range(c, width):
                    if prow[j]:
                        row[j] = row[j] - f * prow[j]
    return [row[n:] for row in aug]


def determinant(a: Matrix) -> RatFunc:
    n = len(a)
    m = [list(r) for r in a]
    det = ONE
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return ZERO
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        p = m[c][c]
        det = det * p
        inv = p.inverse()
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                for j in range(c, n):
                    if m[c][j]:
                        m[r][j] = m[r][j] - f * m[c][j]
    return det


def scale(a: Matrix, c: RatFunc) -> Matrix:
    return [[x * c if x else x for x in row] for row in a]


def block_diagonal(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = [[ZERO] * n for _ in range(n)]
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return out


def parse_matrix(text: str) -> Matrix:
    """Rows separated by ``;``, entries by ``,`` (e.g. ``"t, 0; 0, t^-1"``)."""
    rows = [[parse(e) for e in row.split(",")] for row in text.split(";") if row.strip()]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise LatticeError(f"not a square matrix: {text!r}")
    return rows


def format_matrix(a: Matrix) -> str:
    return "; ".join(", ".join(str(x) for x in row) for row in a)


# -- lattices ----------------------------------------------------------------


@dataclass(frozen=True)
class LatticeBasis:
    """Full-rank O_v-lattice in Q(t)^n given by the columns of ``columns``."""

    columns: tuple

    def __init__(self, columns: Iterable[Iterable[RatFunc]]):
        rows = tuple(tuple(r) for r in columns)
        object.__setattr__(self, "columns", rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise LatticeError("basis matrix must be square and nonempty")
        if not determinant(self.matrix()):
            raise LatticeError("singular lattice basis")

    @property
    def dim(self) -> int:
        return len(self.columns)

    def matrix(self) -> Matrix:
        return [list(r) for r in self.columns]

    @classmethod
    def diagonal(cls, exps: Sequence[int]) -> "LatticeBasis":
        return cls(diagonal(exps))

    def scaled(self, k: int) -> "LatticeBasis":
        return LatticeBasis(scale(self.matrix(), monomial(k)))

    def __str__(self) -> str:
        return f"[{format_matrix(self.matrix())}]"


def standard_lambda(n: int) -> LatticeBasis:
    """Span of t^n e1 and t^-n e2."""
    return LatticeBasis.diagonal((n, -n))


def standard_lambda_prime(n: int) -> LatticeBasis:
    """Span of t^n e1 and t^(-n-1) e2."""
    return LatticeBasis.diagonal((n, -n - 1))


def _smith_exponents(m: Matrix) -> list[int]:
    """Valuations of the elementary divisors of a nonsingular matrix over O_v.

    Pivot: entry of minimal valuation, ties broken row-major.
    """
    m = [list(r) for r in m]
    n = len(m)
    exps = []
    for k in range(n):
        best = None
        for i in range(k, n):
            row = m[i]
            for j in range(k, n):
                x = row[j]
                if x and (best is None or x.shift < best[0]):
                    best = (x.shift, i, j)
        if best is None:
            raise LatticeError("singular matrix in Smith reduction")
        _, i, j = best
        m[k], m[i] = m[i], m[k]
        if j != k:
            for row in m:
                row[k], row[j] = row[j], row[k]
        p = m[k][k]
        inv = p.inverse()
        prow = m[k]
        for i in range(k + 1, n):
            x = m[i][k]
            if x:
                f = x * inv
                row = m[i]
                for j in range(k + 1, n):
                    if prow[j]:
                        row[j] = row[j] - f * prow[j]
                row[k] = ZERO
        exps.append(p.shift)
    return sorted(exps)


def _check_dims(a: LatticeBasis, b: LatticeBasis) -> None:
    if a.dim != b.dim:
        raise LatticeError(f"dimension mismatch: {a.dim} vs {b.dim}")


def invariant_factor_exponents(a: LatticeBasis, b: LatticeBasis) -> tuple[int, ...]:
    """Sorted exponents (a_1 <= ... <= a_n) of ``b`` relative to ``a``.

    There is a basis (f_i) of ``a`` such that (t^{a_i} f_i) is a basis of
    ``b``.  Swapping the arguments negates and reverses the vector.
    """
    _check_dims(a, b)
    return tuple(_smith_exponents(solve(a.matrix(), b.matrix())))


def homothetic(a: LatticeBasis, b: LatticeBasis) -> bool:
    e = invariant_factor_exponents(a, b)
    return e[0] == e[-1]


def adjacent(a: LatticeBasis, b: LatticeBasis) -> bool:
    """True iff the classes span an edge of the building."""
    e = invariant_factor_exponents(a, b)
    return e[-1] - e[0] == 1


def graph_distance(a, b) -> int:
    """Distance in the 1-skeleton: max - min of the relative exponents."""
    if isinstance(a, DiagonalClass) and isinstance(b, DiagonalClass):
        return a.distance(b)
    e = invariant_factor_exponents(_as_basis(a), _as_basis(b))
    return e[-1] - e[0]


def contains(outer: LatticeBasis, inner: LatticeBasis) -> bool:
    """inner is a sublattice of outer."""
    _check_dims(outer, inner)
    x = solve(outer.matrix(), inner.matrix())
    return all(not v or v.shift >= 0 for row in x for v in row)


def strictly_contains(outer: LatticeBasis, inner: LatticeBasis) -> bool:
    if not contains(outer, inner):
        return False
    return determinant(solve(outer.matrix(), inner.matrix())).shift > 0


def flag_witness(a: LatticeBasis, b: LatticeBasis) -> tuple[LatticeBasis, LatticeBasis]:
    """Representatives (inner, outer) of the two classes with
    t*outer < inner < outer (both strict), checked by membership.

    ``outer`` is ``a`` itself; ``inner`` is a t-power rescaling of ``b``.
    """
    e = invariant_factor_exponents(a, b)
    if e[-1] - e[0] != 1:
        raise LatticeError(f"classes are not adjacent (exponents {e})")
    inner = b.scaled(-e[0])
    outer = a
    ok = strictly_contains(outer, inner) and strictly_contains(inner, outer.scaled(1))
    if not ok:
        raise AssertionError("flag membership check failed")
    return inner, outer


def vertex_type(a: LatticeBasis) -> int:
    """Valuation of the determinant modulo n."""
    d = determinant(a.matrix())
    if not d:
        raise LatticeError("singular lattice basis")
    return d.shift % a.dim


def act(g: Matrix, a: LatticeBasis) -> LatticeBasis:
    """Image g * a of a lattice under a nonsingular matrix."""
    if len(g) != a.dim:
        raise LatticeError("dimension mismatch")
    if not determinant(g):
        raise LatticeError("singular group element")
    return LatticeBasis(matmul(g, a.matrix()))


# -- canonical class keys -----------------------------------------------------


def _trunc_below(x: RatFunc, a: int) -> RatFunc:
    """Representative of x modulo t^a O_v: the Laurent expansion below degree a."""
    if not x or x.shift >= a:
        return ZERO
    v, coeffs = laurent_prefix(x, a - 1)
    out = ZERO
    for i, c in enumerate(coeffs):
        if c:
            out = out + monomial(v + i, c)
    return out


def hermite_form(a: LatticeBasis) -> tuple[tuple[int, ...], Matrix]:
    """Upper-triangular basis with diagonal t^{a_i} and reduced entries above.

    Entries in row i are truncated Laurent polynomials of degree < a_i.
    Unique for the lattice (not just its class).
    """
    m = a.matrix()
    n = a.dim
    cols = [[m[i][j] for i in range(n)] for j in range(n)]
    placed: list = [None] * n
    remaining = list(range(n))
    for r in range(n - 1, -1, -1):
        best = None
        for j in remaining:
            x = cols[j][r]
            if x and (best is None or x.shift < cols[best][r].shift):
                best = j
        if best is None:
            raise LatticeError("singular lattice basis")
        remaining.remove(best)
        piv = cols[best][r]
        unit = piv.unit_part().inverse()
        cols[best] = [x * unit if x else x for x in cols[best]]
        pv = cols[best][r]
        for j in remaining:
            x = cols[j][r]
            if x:
                f = x / pv
                cols[j] = [cols[j][i] - f * cols[best][i] if cols[best][i] else cols[j][i] for i in range(n)]
        placed[r] = cols[best]
    exps = [placed[r][r].shift for r in range(n)]
    for j in range(n):
        for i in range(j - 1, -1, -1):
            x = placed[j][i]
            rep = _trunc_below(x, exps[i])
            if rep != x:
                q = (x - rep) / placed[i][i]
                placed[j] = [placed[j][k] - q * placed[i][k] if placed[i][k] else placed[j][k] for k in range(n)]
    mat = [[placed[j][i] for j in range(n)] for i in range(n)]
    return tuple(exps), mat


@dataclass(frozen=True)
class LatticeClass:
    """Homothety class of a lattice, keyed by its normalized Hermite form."""

    dim: int
    key: tuple

    @classmethod
    def of(cls, a: LatticeBasis) -> "LatticeClass":
        exps, mat = hermite_form(a)
        lo = min(exps)
        if lo:
            exps, mat = hermite_form(a.scaled(-lo))
        entries = tuple(
            (i, j, str(mat[i][j])) for i in range(a.dim) for j in range(i + 1, a.dim) if mat[i][j]
        )
        return cls(a.dim, (exps, entries))

    def __str__(self) -> str:
        return f"LatticeClass(dim={self.dim}, exps={self.key[0]}, offdiag={len(self.key[1])})"


@dataclass(frozen=True)
class DiagonalClass:
    """Class of the diagonal lattice span(t^{e_i} e_i), min exponent 0."""

    exponents: tuple

    def __init__(self, exponents: Iterable[int]):
        e = tuple(int(x) for x in exponents)
        lo = min(e)
        object.__setattr__(self, "exponents", tuple(x - lo for x in e))

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def basis(self) -> LatticeBasis:
        return LatticeBasis.diagonal(self.exponents)

    def lattice_class(self) -> LatticeClass:
        return LatticeClass.of(self.basis())

    def distance(self, other: "DiagonalClass") -> int:
        if self.dim != other.dim:
            raise LatticeError("dimension mismatch")
        diff = [b - a for a, b in zip(self.exponents, other.exponents)]
        return max(diff) - min(diff)

    def vertex_type(self) -> int:
        return sum(self.exponents) % self.dim


def _as_basis(x: Union[LatticeBasis, DiagonalClass]) -> LatticeBasis:
    return x.basis() if isinstance(x, DiagonalClass) else x
