"""The degenerate Hall algebra of the linear A_n quiver at q = 1.

PBW basis elements are indexed by multisegments.  The only product ever
needed is left multiplication by 1_{S_i^a}, the characteristic function
of the semisimple class S_i^a, which acts as the divided power e_i^{(a)}
of the Chevalley generator.  Orientation, fixed once for the whole
package: the product (f * g)(x) integrates f over the quotient and g
over the submodule, so

    1_{S_i^a} * P_N  =  sum over L of  #{ U <= L : U = N, L/U = S_i^a } * P_L

with the count taken at q = 1.  Counts over F_p are polynomial in p
(Hall polynomials exist for Dynkin quivers), so the q = 1 value is
obtained by counting over B + 2 primes, fitting the degree <= B
polynomial, verifying the spare points, and evaluating at 1.

Submodules U with semisimple quotient S_i^a correspond to codimension-a
subspaces of the top of L at vertex i, which makes the counts products
of Gaussian binomials and powers of p over a small set of profiles; the
closed form is what `hall_counts_simple_top` evaluates, and a literal
subspace enumeration is kept in the test suite as an oracle.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .errors import InternalCheckError
from .linalg import (
    gaussian_binomial,
    interpolate_eval_one,
    invert_unitriangular,
    matmul_ff,
    primes,
    rank_ff,
)
from .quiver import (
    Multisegment,
    Quiver,
    Segment,
    Word,
    deg_leq,
    enumerate_multisegments,
    refine_order,
    t_top,
    total_generic_flag,
    word_weight,
)

__all__ = [
    "Rep",
    "realize",
    "iso_class",
    "hall_counts_simple_top",
    "PBWVector",
    "WordCombo",
    "left_mul_divided_power",
    "word_to_pbw",
    "flag_word_matrix",
    "pbw_to_words",
    "SerreReport",
    "check_serre",
    "iter_dim_vectors",
]

# A word combination is a plain mapping word -> rational coefficient.
WordCombo = dict[Word, Fraction]


@dataclass(frozen=True)
class Rep:
    """Matrices of a representation: maps[k] is x_{k+1 -> k+2}.

    Column convention: the matrix of V_i -> V_{i+1} has shape
    d_{i+1} x d_i and acts on column vectors.
    """

    n: int
    dims: tuple[int, ...]
    maps: tuple[tuple[tuple[int, ...], ...], ...]


def realize(m: Multisegment, n: int) -> Rep:
    """The canonical point of the orbit of m: a direct sum of intervals.

    The basis of V_v is indexed by the segments of m containing v, in
    canonical order; each arrow matrix is 0/1 (a segment keeps its own
    coordinate while it lives).
    """
    dims = m.dim_vector(n)
    index = {
        v: [k for k, (a, b) in enumerate(m.segments) if a <= v <= b]
        for v in range(1, n + 1)
    }
    maps = []
    for v in range(1, n):
        rows = [
            tuple(1 if src == dst else 0 for src in index[v])
            for dst in index[v + 1]
        ]
        maps.append(tuple(rows))
    return Rep(n, dims, tuple(maps))


def _path_ranks(rep: Rep, p: int) -> dict[tuple[int, int], int]:
    # ranks of all composites V_a -> V_b, 1 <= a <= b <= n
    ranks: dict[tuple[int, int], int] = {}
    for a in range(1, rep.n + 1):
        da = rep.dims[a - 1]
        ranks[a, a] = da
        cur: tuple[tuple[int, ...], ...] = tuple(
            tuple(1 if i == j else 0 for j in range(da)) for i in range(da)
        )
        for b in range(a + 1, rep.n + 1):
            cur = matmul_ff(rep.maps[b - 2], cur, p, bcols=da)
            ranks[a, b] = rank_ff(cur, p)
    return ranks


def iso_class(rep: Rep, p: int) -> Multisegment:
    """Recover the multisegment of a representation from path ranks.

    The multiplicity of [a, b] is r(a,b) - r(a-1,b) - r(a,b+1) + r(a-1,b+1)
    where r(a, b) is the rank of the composite V_a -> V_b, r(a, a) = d_a,
    and out-of-range r is zero.
    """
    ranks = _path_ranks(rep, p)

    def r(a: int, b: int) -> int:
        if a < 1 or b > rep.n:
            return 0
        return ranks[a, b]

    segs: list[Segment] = []
    for a in range(1, rep.n + 1):
        for b in range(a, rep.n + 1):
            mult = r(a, b) - r(a - 1, b) - r(a, b + 1) + r(a - 1, b + 1)
            if mult < 0:
                raise InternalCheckError(
                    f"negative multiplicity {mult} for segment [{a},{b}]"
                )
            segs.extend([(a, b)] * mult)
    return Multisegment(segs)


# ---------------------------------------------------------------------------
# submodule counts


def _bounded_compositions(bounds: tuple[int, ...], total: int) -> Iterator[tuple[int, ...]]:
    # all (e_1, ..., e_r) with 0 <= e_j <= bounds[j] and sum e_j = total
    if not bounds:
        if total == 0:
            yield ()
        return
    for e in range(min(bounds[0], total) + 1):
        for tail in _bounded_compositions(bounds[1:], total - e):
            yield (e,) + tail


@lru_cache(maxsize=None)
def _simple_top_terms(
    segs: tuple[Segment, ...], i: int, a: int
) -> tuple[tuple[Multisegment, tuple[tuple[int, int], ...], int], ...]:
    """Profile decomposition of the codimension-a subspace count.

    The top of L at i is filtered by how far each top segment survives;
    a subspace with profile (e_j) keeps e_j of the m_j segments ending at
    the j-th level.  Returns (resulting class, ((m_j, e_j), ...), power
    of q) per profile; the count over F_q is q^power times the product
    of Gaussian binomials [m_j choose e_j]_q.
    """
    tops = sorted(b for s, b in segs if s == i)
    rest = [s for s in segs if s[0] != i]
    u = len(tops) - a
    if a < 0 or u < 0:
        return ()
    levels = sorted(Counter(tops).items())
    bounds = tuple(mult for _, mult in levels)
    terms = []
    for evec in _bounded_compositions(bounds, u):
        shift = 0
        seen = kept = 0
        new = list(rest)
        for (end, mult), e in zip(levels, evec):
            shift += e * (seen - kept)
            seen += mult
            kept += e
            new.extend([(i, end)] * e)
            if end > i:
                # segments losing their top at i survive as [i+1, end]
                new.extend([(i + 1, end)] * (mult - e))
        factors = tuple((mult, e) for (_, mult), e in zip(levels, evec))
        terms.append((Multisegment(new), factors, shift))
    return tuple(terms)


@lru_cache(maxsize=None)
def _counts_at_prime(
    segs: tuple[Segment, ...], i: int, a: int, p: int
) -> tuple[tuple[Multisegment, int], ...]:
    agg: dict[Multisegment, int] = {}
    for cls, factors, shift in _simple_top_terms(segs, i, a):
        c = p**shift
        for mult, e in factors:
            c *= gaussian_binomial(mult, e, p)
        agg[cls] = agg.get(cls, 0) + c
    return tuple(agg.items())


def hall_counts_simple_top(
    m: Multisegment, i: int, a: int, p: int
) -> dict[Multisegment, int]:
    """Count submodules of m over F_p with quotient the semisimple S_i^a.

    Keys are the isomorphism classes of the submodules; the total over
    all keys is the Gaussian binomial [t_top(m, i) choose a]_p.  Empty
    when a exceeds the number of segments starting at i.
    """
    if i < 1:
        raise ValueError(f"vertex {i} must be positive")
    return dict(_counts_at_prime(m.segments, i, a, p))


def _counts_cached(
    m: Multisegment, i: int, a: int, p: int, cache, n: int
) -> Mapping[Multisegment, int]:
    if cache is None:
        return dict(_counts_at_prime(m.segments, i, a, p))
    hit = cache.get(n, m, i, a, p)
    if hit is not None:
        return hit
    val = hall_counts_simple_top(m, i, a, p)
    cache.put(n, m, i, a, p, val)
    return val


# ---------------------------------------------------------------------------
# PBW vectors


class PBWVector:
    """A rational combination of PBW classes sharing one dimension vector."""

    __slots__ = ("n", "grade", "coeffs")

    def __init__(
        self,
        n: int,
        grade: Iterable[int],
        coeffs: Mapping[Multisegment, Fraction | int] | None = None,
    ):
        self.n = n
        self.grade = tuple(int(x) for x in grade)
        if len(self.grade) != n:
            raise ValueError(f"grade {self.grade} has length {len(self.grade)}, expected {n}")
        clean: dict[Multisegment, Fraction] = {}
        for cls, c in (coeffs or {}).items():
            c = Fraction(c)
            if not c:
                continue
            if cls.dim_vector(n) != self.grade:
                raise ValueError(f"class {cls} is not of grade {self.grade}")
            clean[cls] = c
        self.coeffs = clean

    @staticmethod
    def unit(n: int) -> "PBWVector":
        """The PBW class of the zero module, the algebra unit."""
        return PBWVector(n, (0,) * n, {Multisegment.zero(): Fraction(1)})

    def get(self, cls: Multisegment) -> Fraction:
        return self.coeffs.get(cls, Fraction(0))

    def items(self) -> list[tuple[Multisegment, Fraction]]:
        return sorted(self.coeffs.items(), key=lambda kv: kv[0].sort_key())

    def _combine(self, other: "PBWVector", sign: int) -> "PBWVector":
        if not isinstance(other, PBWVector):
            return NotImplemented
        if self.n != other.n or self.grade != other.grade:
            raise ValueError("grades differ")
        merged = dict(self.coeffs)
        for cls, c in other.coeffs.items():
            merged[cls] = merged.get(cls, Fraction(0)) + sign * c
        return PBWVector(self.n, self.grade, merged)

    def __add__(self, other: "PBWVector") -> "PBWVector":
        return self._combine(other, 1)

    def __sub__(self, other: "PBWVector") -> "PBWVector":
        return self._combine(other, -1)

    def __rmul__(self, scalar) -> "PBWVector":
        c = Fraction(scalar)
        return PBWVector(self.n, self.grade, {k: c * v for k, v in self.coeffs.items()})

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PBWVector)
            and self.n == other.n
            and self.grade == other.grade
            and self.coeffs == other.coeffs
        )

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for cls, c in self.items():
            parts.append(f"P({cls})" if c == 1 else f"{c}*P({cls})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"<PBWVector {self}>"


def _with_simple_tops(src: Multisegment, i: int, a: int) -> Iterator[Multisegment]:
    # every class L admitting src as a submodule with quotient S_i^a:
    # promote a sub-multiset of src's segments starting at i+1 to start
    # at i, and add [i,i] heads for the remainder of the a new tops
    promotable = Counter(b for s, b in src.segments if s == i + 1)
    ends = sorted(promotable)
    bounds = tuple(promotable[b] for b in ends)
    base = list(src.segments)
    for total in range(a + 1):
        for pick in _bounded_compositions(bounds, total):
            segs = list(base)
            for end, k in zip(ends, pick):
                for _ in range(k):
                    segs.remove((i + 1, end))
                segs.extend([(i, end)] * k)
            segs.extend([(i, i)] * (a - total))
            yield Multisegment(segs)


_chi_memo: dict[tuple, int] = {}


def _chi_simple_top(cls: Multisegment, i: int, a: int, src: Multisegment, cache, n: int) -> int:
    """The q = 1 value of the Hall count #{U <= cls : U = src, cls/U = S_i^a}."""
    # the memo key carries the backing store so a persistent cache is
    # still written through when the value was already seen cache-less
    store = None if cache is None else str(cache.path)
    key = (cls.segments, i, a, src.segments, store)
    hit = _chi_memo.get(key)
    if hit is not None:
        return hit
    t = t_top(cls, i)
    bound = a * (t - a)
    points = []
    for p in primes(bound + 2, 2):
        points.append((p, _counts_cached(cls, i, a, p, cache, n).get(src, 0)))
    chi = interpolate_eval_one(points, bound)
    _chi_memo[key] = chi
    return chi


def left_mul_divided_power(i: int, a: int, vec: PBWVector, cache=None) -> PBWVector:
    """Multiply a PBW vector on the left by 1_{S_i^a} = e_i^{(a)}.

    The optional cache is a disk-backed store of per-prime counts; the
    interpolated values themselves are memoized in process.
    """
    n = vec.n
    if not 1 <= i <= n:
        raise ValueError(f"vertex {i} out of range 1..{n}")
    if a < 0:
        raise ValueError(f"power {a} must be non-negative")
    if a == 0:
        return PBWVector(n, vec.grade, vec.coeffs)
    grade = tuple(d + (a if v == i else 0) for v, d in enumerate(vec.grade, start=1))
    out: dict[Multisegment, Fraction] = {}
    for src, coeff in vec.coeffs.items():
        for cls in _with_simple_tops(src, i, a):
            chi = _chi_simple_top(cls, i, a, src, cache, n)
            out[cls] = out.get(cls, Fraction(0)) + coeff * chi
    return PBWVector(n, grade, out)


def _as_combo(w: Word | Mapping[Word, Fraction | int]) -> WordCombo:
    if isinstance(w, tuple):
        return {w: Fraction(1)}
    return {word: Fraction(c) for word, c in w.items() if c}


def word_to_pbw(
    quiver: Quiver, w: Word | Mapping[Word, Fraction | int], cache=None
) -> PBWVector:
    """Expand a word combination into PBW coordinates.

    A word (i_1,a_1)...(i_k,a_k) denotes 1_{S_{i_1}^{a_1}} * ... *
    1_{S_{i_k}^{a_k}}, applied to the unit by folding from the right.
    All words of a combination must share one weight.
    """
    combo = _as_combo(w)
    if not combo:
        raise ValueError("empty word combination has no grade")
    weights = {word_weight(word, quiver.n) for word in combo}
    if len(weights) > 1:
        raise ValueError(f"mixed word weights {sorted(weights)}")
    total: PBWVector | None = None
    for word, c in combo.items():
        vec = PBWVector.unit(quiver.n)
        for letter in reversed(word):
            vec = left_mul_divided_power(letter[0], letter[1], vec, cache)
        vec = c * vec
        total = vec if total is None else total + vec
    return total


def flag_word_matrix(
    quiver: Quiver, d: Iterable[int], cache=None
) -> tuple[tuple[Multisegment, ...], tuple[Word, ...], tuple[tuple[Fraction, ...], ...]]:
    """Expansion matrix of the generic flag words of one grade.

    Returns (classes, words, T): classes in refined degeneration order,
    words[r] the total generic flag of classes[r], and T[r][c] the
    coefficient of P_{classes[c]} in word_to_pbw(words[r]).  T is upper
    unitriangular: the word of a class hits the class itself once and
    otherwise only proper degenerations of it.
    """
    classes = tuple(refine_order(enumerate_multisegments(quiver, d)))
    words = tuple(
        () if cls.is_zero() else total_generic_flag(cls) for cls in classes
    )
    rows = []
    for r, word in enumerate(words):
        vec = word_to_pbw(quiver, word, cache)
        for cls in vec.coeffs:
            if not deg_leq_cached(classes[r], cls):
                raise InternalCheckError(
                    f"word of {classes[r]} hits {cls}, not a degeneration of it"
                )
        rows.append(tuple(vec.get(cls) for cls in classes))
    return classes, words, tuple(rows)


# deg_leq is pure and gets hammered by flag_word_matrix and the
# certification checks, so route it through a small memo
@lru_cache(maxsize=None)
def _deg_leq_memo(m_segs: tuple[Segment, ...], n_segs: tuple[Segment, ...]) -> bool:
    return deg_leq(Multisegment(m_segs), Multisegment(n_segs))


def deg_leq_cached(m: Multisegment, n: Multisegment) -> bool:
    return _deg_leq_memo(m.segments, n.segments)


def pbw_to_words(
    quiver: Quiver, d: Iterable[int], cache=None
) -> dict[Multisegment, WordCombo]:
    """Express every PBW class of grade d in terms of generic flag words.

    Inverts the unitriangular expansion matrix of flag_word_matrix, so
    P_M = sum over classes N of T^{-1}[M][N] * word(N).
    """
    classes, words, t_mat = flag_word_matrix(quiver, d, cache)
    try:
        t_inv = invert_unitriangular(t_mat)
    except ValueError as exc:
        raise InternalCheckError(
            f"flag word expansions at grade {tuple(d)} are not unitriangular: {exc}"
        ) from exc
    out: dict[Multisegment, WordCombo] = {}
    for r, cls in enumerate(classes):
        combo: WordCombo = {}
        for c, word in enumerate(words):
            if t_inv[r][c]:
                combo[word] = combo.get(word, Fraction(0)) + t_inv[r][c]
        out[cls] = combo
    return out


# ---------------------------------------------------------------------------
# defining relations


def iter_dim_vectors(n: int, total_bound: int) -> Iterator[tuple[int, ...]]:
    """All dimension vectors of length n with entry sum at most total_bound."""
    for d in itertools.product(range(total_bound + 1), repeat=n):
        if sum(d) <= total_bound:
            yield d


@dataclass(frozen=True)
class SerreReport:
    n: int
    dim_bound: int
    relations_checked: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def check_serre(quiver: Quiver, dim_bound: int, cache=None) -> SerreReport:
    """Verify the defining relations on every PBW class up to a grade bound.

    For each adjacent ordered pair (i, j) and each class N with |grade|
    <= dim_bound, the residual e_i^{(2)} e_j P_N - e_i e_j e_i P_N +
    e_j e_i^{(2)} P_N must vanish identically.
    """
    n = quiver.n
    pairs = [(i, j) for i in quiver.vertices() for j in quiver.vertices() if abs(i - j) == 1]
    checked = 0
    failures: list[str] = []

    def lm(i: int, a: int, v: PBWVector) -> PBWVector:
        return left_mul_divided_power(i, a, v, cache)

    for d in iter_dim_vectors(n, dim_bound):
        for cls in enumerate_multisegments(quiver, d):
            v = PBWVector(n, d, {cls: Fraction(1)})
            for i, j in pairs:
                residual = (
                    lm(i, 2, lm(j, 1, v))
                    - lm(i, 1, lm(j, 1, lm(i, 1, v)))
                    + lm(j, 1, lm(i, 2, v))
                )
                checked += 1
                if residual:
                    failures.append(
                        f"(i={i}, j={j}) on P({cls}): residual {residual}"
                    )
    return SerreReport(n, dim_bound, checked, tuple(failures))
