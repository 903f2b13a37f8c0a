"""Exact linear algebra over prime fields and the rationals.

Everything here is elementary and exact: Gaussian elimination mod p,
echelon enumeration of subspaces, Lagrange interpolation with Fraction
arithmetic, and back substitution for unitriangular matrices.  Matrices
are tuples (or lists) of row tuples; functions that must cope with a
matrix that has no rows take the column count explicitly, because a
0 x c matrix carries no shape information of its own.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .errors import InterpolationError

__all__ = [
    "primes",
    "gaussian_binomial",
    "rref_ff",
    "rank_ff",
    "kernel_basis_ff",
    "solve_ff",
    "solve_affine_ff",
    "matmul_ff",
    "mat_inverse_ff",
    "subspaces_ff",
    "complete_basis_ff",
    "row_space_basis_ff",
    "rank_exact",
    "matmul_exact",
    "identity_exact",
    "invert_unitriangular",
    "interpolate_eval_one",
]

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


def primes(count: int, start: int = 2) -> tuple[int, ...]:
    """The first `count` primes that are >= start."""
    out: list[int] = []
    cand = max(2, start)
    while len(out) < count:
        if all(cand % q for q in range(2, int(cand**0.5) + 1)):
            out.append(cand)
        cand += 1
    return tuple(out)


def gaussian_binomial(t: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of a t-dimensional space over F_q."""
    if k < 0 or k > t:
        return 0
    num = 1
    den = 1
    for j in range(1, k + 1):
        num *= q ** (t - k + j) - 1
        den *= q**j - 1
    assert num % den == 0
    return num // den


# ---------------------------------------------------------------------------
# prime field elimination


def rref_ff(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form mod p.  Returns (rows, pivot column list)."""
    mat = [[x % p for x in row] for row in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if mat else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if mat[i][c]), None)
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = pow(mat[r][c], -1, p)
        mat[r] = [(x * inv) % p for x in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return mat, pivots


def rank_ff(rows: Sequence[Sequence[int]], p: int) -> int:
    return len(rref_ff(rows, p)[1])


def kernel_basis_ff(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list[Vector]:
    """Basis of the right kernel of a matrix with `ncols` columns."""
    if ncols == 0:
        return []
    if not rows:
        return [tuple(1 if j == c else 0 for j in range(ncols)) for c in range(ncols)]
    red, pivots = rref_ff(rows, p)
    pivot_set = set(pivots)
    basis: list[Vector] = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [0] * ncols
        vec[free] = 1
        for r, c in enumerate(pivots):
            vec[c] = (-red[r][free]) % p
        basis.append(tuple(vec))
    return basis


def solve_ff(rows: Sequence[Sequence[int]], b: Sequence[int], ncols: int, p: int) -> Vector | None:
    """One solution of A x = b, or None when the system is inconsistent."""
    if not rows:
        return tuple([0] * ncols)
    aug = [list(row) + [bi] for row, bi in zip(rows, b)]
    red, pivots = rref_ff(aug, p)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][ncols]
    return tuple(x)


def solve_affine_ff(
    rows: Sequence[Sequence[int]],
    b: Sequence[int],
    ncols: int,
    p: int,
    rng: random.Random,
) -> Vector | None:
    """A random point of the solution space of A x = b, or None.

    The point is a particular solution plus a uniformly random combination
    of a kernel basis, so repeated calls sample the affine solution space.
    """
    part = solve_ff(rows, b, ncols, p)
    if part is None:
        return None
    x = list(part)
    for vec in kernel_basis_ff(rows, ncols, p):
        c = rng.randrange(p)
        if c:
            x = [(xi + c * vi) % p for xi, vi in zip(x, vec)]
    return tuple(x)


def matmul_ff(
    a: Sequence[Sequence[int]],
    b: Sequence[Sequence[int]],
    p: int,
    bcols: int | None = None,
) -> Matrix:
    """Matrix product mod p.  `bcols` is required when b has no rows."""
    if b:
        bcols = len(b[0])
    elif bcols is None:
        raise ValueError("column count needed for a matrix with no rows")
    bt = list(zip(*b)) if b else []
    out = []
    for row in a:
        if bt:
            out.append(tuple(sum(x * y for x, y in zip(row, col)) % p for col in bt))
        else:
            out.append(tuple([0] * bcols))
    return tuple(out)


def mat_inverse_ff(rows: Sequence[Sequence[int]], p: int) -> Matrix:
    """Inverse of a square matrix mod p (raises on a singular input)."""
    n = len(rows)
    aug = [list(row) + [1 if j == i else 0 for j in range(n)] for i, row in enumerate(rows)]
    red, pivots = rref_ff(aug, p)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return tuple(tuple(red[i][n:]) for i in range(n))


def row_space_basis_ff(rows: Sequence[Sequence[int]], p: int) -> list[Vector]:
    """Canonical (echelon) basis of the row space."""
    red, pivots = rref_ff(rows, p)
    return [tuple(red[i]) for i in range(len(pivots))]


def complete_basis_ff(vectors: Sequence[Sequence[int]], dim: int, p: int) -> list[Vector]:
    """Extend independent vectors to a basis of F_p^dim by standard vectors."""
    red, pivots = rref_ff(vectors, p) if vectors else ([], [])
    if len(pivots) != len(vectors):
        raise ValueError("vectors are not independent")
    extension = []
    pivot_set = set(pivots)
    for c in range(dim):
        if c not in pivot_set:
            extension.append(tuple(1 if j == c else 0 for j in range(dim)))
    return [tuple(v) for v in vectors] + extension


def subspaces_ff(basis: Sequence[Sequence[int]], k: int, p: int) -> Iterator[list[Vector]]:
    """All k-dimensional subspaces of the span of an independent family.

    Subspaces are enumerated exactly once via reduced echelon coordinate
    matrices relative to the given basis; each is yielded as a list of k
    spanning vectors in the ambient coordinates.
    """
    m = len(basis)
    if k < 0 or k > m:
        return
    if k == 0:
        yield []
        return
    for pivots in combinations(range(m), k):
        free_pos = [
            (r, c)
            for r in range(k)
            for c in range(pivots[r] + 1, m)
            if c not in pivots
        ]
        for values in product(range(p), repeat=len(free_pos)):
            coords = [[0] * m for _ in range(k)]
            for r in range(k):
                coords[r][pivots[r]] = 1
            for (r, c), v in zip(free_pos, values):
                coords[r][c] = v
            vecs = []
            for row in coords:
                vec = None
                for coef, bvec in zip(row, basis):
                    if coef:
                        term = tuple((coef * x) % p for x in bvec)
                        vec = term if vec is None else tuple((u + v) % p for u, v in zip(vec, term))
                if vec is None:
                    vec = tuple([0] * len(basis[0]))
                vecs.append(vec)
            yield vecs


# ---------------------------------------------------------------------------
# exact rational matrices


def rank_exact(rows: Sequence[Sequence[int | Fraction]]) -> int:
    """Rank over the rationals, by fraction-exact elimination."""
    mat = [[Fraction(x) for x in row] for row in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if mat else 0
    rank = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(rank, nrows) if mat[i][c]), None)
        if pivot_row is None:
            continue
        mat[rank], mat[pivot_row] = mat[pivot_row], mat[rank]
        inv = 1 / mat[rank][c]
        mat[rank] = [x * inv for x in mat[rank]]
        for i in range(nrows):
            if i != rank and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def matmul_exact(
    a: Sequence[Sequence[Fraction]],
    b: Sequence[Sequence[Fraction]],
    bcols: int | None = None,
) -> tuple[tuple[Fraction, ...], ...]:
    if b:
        bcols = len(b[0])
    elif bcols is None:
        raise ValueError("column count needed for a matrix with no rows")
    bt = list(zip(*b)) if b else []
    out = []
    for row in a:
        if bt:
            out.append(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt))
        else:
            out.append(tuple([Fraction(0)] * bcols))
    return tuple(out)


def identity_exact(n: int) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n))


def invert_unitriangular(
    rows: Sequence[Sequence[int | Fraction]],
) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse of an upper unitriangular matrix by back substitution.

    Raises ValueError unless the diagonal is all ones and everything below
    it vanishes; the inverse is again upper unitriangular.
    """
    n = len(rows)
    mat = [[Fraction(x) for x in row] for row in rows]
    for i, row in enumerate(mat):
        if len(row) != n:
            raise ValueError("matrix is not square")
        if row[i] != 1:
            raise ValueError(f"diagonal entry at {i} is {row[i]}, not 1")
        for j in range(i):
            if row[j] != 0:
                raise ValueError(f"nonzero entry below the diagonal at ({i},{j})")
    inv: list[list[Fraction]] = [
        [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)
    ]
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            c = mat[i][j]
            if c:
                inv[i] = [x - c * y for x, y in zip(inv[i], inv[j])]
    return tuple(tuple(row) for row in inv)


# ---------------------------------------------------------------------------
# Euler characteristic extraction


def interpolate_eval_one(points: Iterable[tuple[int, int]], bound: int) -> int:
    """Value at 1 of the degree <= bound polynomial through counted points.

    `points` are (prime, count) pairs with distinct primes; at least
    bound + 2 are required.  The polynomial is fitted through the first
    bound + 1 points and must reproduce every remaining point exactly,
    otherwise InterpolationError is raised.  The value at 1 must be an
    integer (it is an Euler characteristic in every use here).
    """
    pts = [(int(x), int(y)) for x, y in points]
    if len({x for x, _ in pts}) != len(pts):
        raise ValueError("sample points must be distinct")
    if bound < 0:
        raise ValueError("degree bound must be non-negative")
    if len(pts) < bound + 2:
        raise InterpolationError(
            f"need at least {bound + 2} points for degree bound {bound}, got {len(pts)}"
        )
    fit = pts[: bound + 1]

    def eval_at(x: int) -> Fraction:
        total = Fraction(0)
        for j, (xj, yj) in enumerate(fit):
            term = Fraction(yj)
            for k, (xk, _) in enumerate(fit):
                if k != j:
                    term *= Fraction(x - xk, xj - xk)
            total += term
        return total

    for x, y in pts[bound + 1 :]:
        got = eval_at(x)
        if got != y:
            raise InterpolationError(
                f"degree {bound} fit predicts {got} at {x}, observed {y}; "
                f"series {pts}"
            )
    value = eval_at(1)
    if value.denominator != 1:
        raise InterpolationError(f"value at 1 is not an integer: {value}")
    return int(value)
