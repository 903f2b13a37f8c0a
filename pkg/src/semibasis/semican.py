"""Semicanonical elements in PBW coordinates, built two ways and certified.

Each irreducible component Z of the nilpotent variety carries a unique
element f_Z with rho_{Z'}(f_Z) = delta_{Z,Z'} over the components Z' of
the same grade.  Two independent routes compute the matrix expressing
the f_Z in the PBW basis:

  * inversion: evaluate every PBW element at every component (the
    evaluation matrix E) and invert its transpose;

  * recursion: peel a simple top off the component, multiply the
    smaller element back, and subtract the evaluation at components
    with a strictly larger top, which restores the delta-conditions.

Both must produce the same unitriangular matrix, and a delta-check with
fresh sampling seeds must reproduce the identity; any mismatch is an
error, never papered over.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    CertificationError,
    DeltaCheckError,
    InternalCheckError,
    RouteDisagreementError,
)
from .hall import (
    PBWVector,
    WordCombo,
    deg_leq_cached,
    left_mul_divided_power,
    pbw_to_words,
    word_to_pbw,
)
from .linalg import identity_exact, invert_unitriangular, matmul_exact, primes
from .nilpotent import (
    RhoEvaluator,
    SampleConfig,
    flag_degree_bound,
    peel_component,
    t_component,
)
from .quiver import (
    Multisegment,
    Quiver,
    enumerate_multisegments,
    flag_vertex,
    peel_top,
    refine_order,
)

__all__ = [
    "SemicanElement",
    "SemicanBasis",
    "CertifiedTransition",
    "evaluation_matrix",
    "transition_via_inversion",
    "semican_recursive",
    "verify_delta",
    "transition_matrix",
]

log = logging.getLogger(__name__)

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class SemicanElement:
    """One semicanonical element in PBW and in word coordinates.

    The two views stay in lockstep through the recursion; the word form
    exists because only word monomials can be evaluated at points.
    """

    pbw: PBWVector
    words: WordCombo


def _combine_words(base: WordCombo, other: WordCombo, coeff: Fraction) -> WordCombo:
    out = dict(base)
    for word, c in other.items():
        val = out.get(word, Fraction(0)) + coeff * c
        if val:
            out[word] = val
        else:
            out.pop(word, None)
    return out


class SemicanBasis:
    """Recursive construction of semicanonical elements over one quiver.

    Shares one rho evaluator, one hall cache, and write-once memos for
    elements, per-vertex variants, and sampled t values, so a full
    transition matrix touches each expensive quantity once.
    """

    def __init__(
        self,
        quiver: Quiver,
        config: SampleConfig | None = None,
        hall_cache=None,
        evaluator: RhoEvaluator | None = None,
    ):
        self.quiver = quiver
        self.config = config or SampleConfig()
        self.hall_cache = hall_cache
        self.evaluator = evaluator or RhoEvaluator(quiver.n, self.config)
        self._elements: dict[tuple, SemicanElement] = {}
        self._components: dict[tuple, SemicanElement] = {}
        self._t: dict[tuple, int] = {}

    def t_at(self, m: Multisegment, i: int) -> int:
        """Memoized component-level t at vertex i."""
        key = (m.segments, i)
        if key not in self._t:
            self._t[key] = t_component(m, i, self.config, self.quiver.n)
        return self._t[key]

    def element(self, m: Multisegment) -> SemicanElement:
        """The semicanonical element of the component over the orbit of m."""
        key = m.segments
        found = self._elements.get(key)
        if found is not None:
            return found
        if m.is_semisimple():
            d = m.dim_vector(self.quiver.n)
            word = tuple((i, d[i - 1]) for i in range(self.quiver.n, 0, -1) if d[i - 1])
            elem = SemicanElement(
                word_to_pbw(self.quiver, word, self.hall_cache) if word
                else PBWVector.unit(self.quiver.n),
                {word: Fraction(1)},
            )
        else:
            i, mult = flag_vertex(m)
            elem = self._peel_and_correct(m, i, mult, peel_top(m, i))
        self._elements[key] = elem
        return elem

    def component_element(self, m: Multisegment, i: int) -> SemicanElement:
        """The same element, constructed by peeling at a prescribed vertex.

        Correction terms of the recursion at vertex i are themselves
        built at vertex i; their t there strictly exceeds the caller's,
        which bounds the depth by the dimension at i.
        """
        if flag_vertex(m)[0] == i:
            return self.element(m)
        key = (m.segments, i)
        found = self._components.get(key)
        if found is not None:
            return found
        mult = self.t_at(m, i)
        if mult <= 0:
            raise InternalCheckError(f"correction class {m} has no top at vertex {i}")
        peeled = peel_component(m, i, self.config, self.quiver.n)
        elem = self._peel_and_correct(m, i, mult, peeled)
        self._components[key] = elem
        return elem

    def _peel_and_correct(
        self, m: Multisegment, i: int, mult: int, peeled: Multisegment
    ) -> SemicanElement:
        base = self.element(peeled)
        pbw = left_mul_divided_power(i, mult, base.pbw, self.hall_cache)
        words: WordCombo = {((i, mult),) + w: c for w, c in base.words.items()}
        d = m.dim_vector(self.quiver.n)
        for cls in enumerate_multisegments(self.quiver, d):
            if self.t_at(cls, i) <= mult:
                continue
            coeff = self.evaluator.rho(cls, words)
            if not coeff:
                continue
            correction = self.component_element(cls, i)
            pbw = pbw - coeff * correction.pbw
            words = _combine_words(words, correction.words, -coeff)
        return SemicanElement(pbw, words)


def _ordered_classes(quiver: Quiver, d: Iterable[int]) -> tuple[Multisegment, ...]:
    return tuple(refine_order(enumerate_multisegments(quiver, d)))


def evaluation_matrix(
    quiver: Quiver,
    d: Iterable[int],
    config: SampleConfig | None = None,
    hall_cache=None,
    evaluator: RhoEvaluator | None = None,
) -> tuple[tuple[Multisegment, ...], Matrix]:
    """Values of every PBW element at every component of grade d.

    Row K, column N holds the generic value of P_N on Z_K; rows and
    columns share the refined degeneration order.
    """
    d = tuple(d)
    classes = _ordered_classes(quiver, d)
    combos = pbw_to_words(quiver, d, hall_cache)
    ev = evaluator or RhoEvaluator(quiver.n, config)
    rows = tuple(
        tuple(ev.rho(k_cls, combos[n_cls]) for n_cls in classes) for k_cls in classes
    )
    return classes, rows


def _certify_support(
    classes: tuple[Multisegment, ...], mat: Matrix, lower: bool, what: str
) -> None:
    # lower: nonzero (r, c) needs classes[c] <=deg classes[r]; upper is
    # the transpose condition.  diagonal must be exactly 1 either way
    for r, row in enumerate(mat):
        if row[r] != 1:
            raise CertificationError(
                f"{what} has diagonal entry {row[r]} at {classes[r]}"
            )
        for c, val in enumerate(row):
            if not val or r == c:
                continue
            small, big = (classes[c], classes[r]) if lower else (classes[r], classes[c])
            if not deg_leq_cached(small, big):
                raise CertificationError(
                    f"{what} entry at row {classes[r]}, column {classes[c]} is "
                    f"{val}, outside the degeneration order"
                )


def transition_via_inversion(
    quiver: Quiver,
    d: Iterable[int],
    config: SampleConfig | None = None,
    hall_cache=None,
    evaluator: RhoEvaluator | None = None,
) -> tuple[tuple[Multisegment, ...], Matrix, Matrix]:
    """The transition matrix A with f_M = sum_N A[M][N] P_N, by inversion.

    The delta-conditions say A is the inverse transpose of the
    evaluation matrix.  E is certified lower unitriangular and A upper
    unitriangular with respect to the degeneration order before
    returning; A times E-transposed is re-checked to be the identity.
    """
    d = tuple(d)
    classes, e_mat = evaluation_matrix(quiver, d, config, hall_cache, evaluator)
    _certify_support(classes, e_mat, lower=True, what="evaluation matrix")
    e_t = tuple(zip(*e_mat))
    try:
        a_mat = invert_unitriangular(e_t)
    except ValueError as exc:
        raise CertificationError(f"evaluation matrix not invertible: {exc}") from exc
    _certify_support(classes, a_mat, lower=False, what="transition matrix")
    if matmul_exact(a_mat, e_t) != identity_exact(len(classes)):
        raise CertificationError("A times E^T is not the identity")
    for row, cls in zip(a_mat, classes):
        for val in row:
            if val.denominator != 1:
                log.warning("non-integer transition entry %s in row %s", val, cls)
    return classes, a_mat, e_mat


def semican_recursive(
    quiver: Quiver,
    m: Multisegment,
    config: SampleConfig | None = None,
    hall_cache=None,
) -> PBWVector:
    """PBW coordinates of one semicanonical element via the peel recursion."""
    return SemicanBasis(quiver, config, hall_cache).element(m).pbw


@dataclass(frozen=True)
class DeltaReport:
    """Evaluation of every element at every component, with fresh seeds."""

    classes: tuple[Multisegment, ...]
    matrix: Matrix

    @property
    def ok(self) -> bool:
        return self.matrix == identity_exact(len(self.classes))


def _delta_report(
    basis: SemicanBasis,
    classes: tuple[Multisegment, ...],
    elements: Mapping[Multisegment, SemicanElement],
) -> DeltaReport:
    fresh = basis.evaluator.fresh("verify-delta")
    rows = tuple(
        tuple(fresh.rho(k_cls, elements[m_cls].words) for m_cls in classes)
        for k_cls in classes
    )
    return DeltaReport(classes, rows)


def verify_delta(
    quiver: Quiver,
    d: Iterable[int],
    config: SampleConfig | None = None,
    hall_cache=None,
) -> DeltaReport:
    """Recompute all elements of grade d and check the delta-property.

    The evaluations use seeds disjoint from those of the construction;
    the report passes iff the matrix is exactly the identity.
    """
    basis = SemicanBasis(quiver, config, hall_cache)
    classes = _ordered_classes(quiver, tuple(d))
    elements = {cls: basis.element(cls) for cls in classes}
    return _delta_report(basis, classes, elements)


@dataclass(frozen=True)
class CertifiedTransition:
    """A transition matrix together with everything that certifies it."""

    n: int
    dim: tuple[int, ...]
    classes: tuple[Multisegment, ...]
    matrix: Matrix
    recursion_matrix: Matrix
    evaluation: Matrix
    delta: DeltaReport
    root_seed: int
    interpolation_primes: tuple[int, ...]
    elapsed: float

    @property
    def routes_agree(self) -> bool:
        return self.matrix == self.recursion_matrix

    @property
    def delta_ok(self) -> bool:
        return self.delta.ok

    def to_payload(self) -> dict:
        """Report as plain data; deliberately excludes timing so equal
        inputs and seeds serialize byte-identically."""
        return {
            "n": self.n,
            "dim": list(self.dim),
            "order": [cls.text() for cls in self.classes],
            "matrix": [list(row) for row in self.matrix],
            "recursion_matrix": [list(row) for row in self.recursion_matrix],
            "evaluation_matrix": [list(row) for row in self.evaluation],
            "routes_agree": self.routes_agree,
            "delta_identity": self.delta_ok,
            "root_seed": self.root_seed,
            "interpolation_primes": list(self.interpolation_primes),
        }


def transition_matrix(
    quiver: Quiver,
    d: Iterable[int],
    config: SampleConfig | None = None,
    hall_cache=None,
) -> CertifiedTransition:
    """Both routes, the delta-check, and the certified result for grade d.

    Raises RouteDisagreementError if the recursion and the inversion
    differ anywhere, DeltaCheckError if the fresh-seed evaluation is not
    the identity, CertificationError on an order violation.
    """
    started = time.perf_counter()
    d = tuple(d)
    cfg = config or SampleConfig()
    basis = SemicanBasis(quiver, cfg, hall_cache)
    classes, a_mat, e_mat = transition_via_inversion(
        quiver, d, cfg, hall_cache, basis.evaluator
    )
    elements = {cls: basis.element(cls) for cls in classes}
    rec_mat = tuple(
        tuple(elements[m_cls].pbw.get(n_cls) for n_cls in classes) for m_cls in classes
    )
    if rec_mat != a_mat:
        diffs = [
            f"({classes[r]} : {classes[c]}) inversion={a_mat[r][c]} recursion={rec_mat[r][c]}"
            for r in range(len(classes))
            for c in range(len(classes))
            if a_mat[r][c] != rec_mat[r][c]
        ]
        raise RouteDisagreementError(
            "inversion and recursion disagree at " + "; ".join(diffs[:5])
        )
    delta = _delta_report(basis, classes, elements)
    if not delta.ok:
        raise DeltaCheckError(
            f"fresh-seed evaluation of grade {d} is not the identity: {delta.matrix}"
        )
    pool = cfg.prime_pool or primes(flag_degree_bound(d) + 2, cfg.prime_start)
    return CertifiedTransition(
        n=quiver.n,
        dim=d,
        classes=classes,
        matrix=a_mat,
        recursion_matrix=rec_mat,
        evaluation=e_mat,
        delta=delta,
        root_seed=cfg.root_seed,
        interpolation_primes=tuple(pool),
        elapsed=time.perf_counter() - started,
    )
