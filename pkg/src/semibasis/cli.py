"""Command-line interface: transitions, inspections, selftests, cache tools.

Exit codes separate the failure classes: 0 success, 10 bad input or
usage, 20 sampling consensus failure, 21 interpolation mismatch, 30
certification failure (route disagreement, delta-check, order
violation), 40 internal assertion or cache corruption.

JSON output is deterministic byte-for-byte for a fixed command line and
seed: keys are sorted, timing lives on standard error only, and exact
rationals appear as plain integers when integral and as "p/q" strings
otherwise.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import replace
from fractions import Fraction

from .cache import HallCache, cache_dir_from_env
from .errors import (
    CacheCorruptError,
    CertificationError,
    ConsensusError,
    InterpolationError,
    ParseError,
    SemibasisError,
)
from .hall import (
    PBWVector,
    check_serre,
    hall_counts_simple_top,
    iso_class,
    iter_dim_vectors,
    left_mul_divided_power,
    realize,
)
from .linalg import gaussian_binomial, rank_exact
from .nilpotent import SampleConfig, peel_component, t_component
from .quiver import (
    Multisegment,
    Quiver,
    deg_leq,
    enumerate_multisegments,
    format_word,
    generic_ext_simple,
    hom_dim,
    peel_top,
    refine_order,
    t_top,
    total_generic_flag,
)
from .semican import transition_matrix

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ParseError (exit 10)."""

    def error(self, message):
        raise ParseError(message)


def _build_parser() -> _Parser:
    top = _Parser(prog="semibasis", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "pretty"), default="pretty")

    sampling = _Parser(add_help=False)
    sampling.add_argument("--seed", type=int, default=0, help="root seed")
    sampling.add_argument("--samples", type=int, default=5, help="samples per prime")
    sampling.add_argument(
        "--primes", default=None, help="comma-separated prime pool override"
    )

    caching = _Parser(add_help=False)
    caching.add_argument("--cache-dir", default=None, help="hall count cache directory")

    tr = sub.add_parser("transition", parents=[fmt, sampling, caching])
    tr.add_argument("--n", type=int, default=None, help="number of vertices")
    tr.add_argument("--dim", required=True, help="dimension vector, e.g. 2,2")
    tr.set_defaults(func=_cmd_transition)

    ins = sub.add_parser("inspect", parents=[])
    ins_sub = ins.add_subparsers(dest="what", required=True)

    dg = ins_sub.add_parser("deg-order", parents=[fmt])
    dg.add_argument("--n", type=int, default=None)
    dg.add_argument("--dim", required=True)
    dg.set_defaults(func=_cmd_deg_order)

    fl = ins_sub.add_parser("flag", parents=[fmt])
    fl.add_argument("--n", type=int, default=None)
    fl.add_argument("--module", required=True)
    fl.set_defaults(func=_cmd_flag)

    ha = ins_sub.add_parser("hall", parents=[fmt, caching])
    ha.add_argument("--n", type=int, default=None)
    ha.add_argument("--module", required=True)
    ha.add_argument("--vertex", type=int, required=True)
    ha.add_argument("--size", type=int, required=True, help="top multiplicity a")
    ha.add_argument("--prime", type=int, required=True)
    ha.set_defaults(func=_cmd_hall)

    tv = ins_sub.add_parser("t", parents=[fmt, sampling])
    tv.add_argument("--n", type=int, default=None)
    tv.add_argument("--module", required=True)
    tv.add_argument("--vertex", type=int, required=True)
    tv.add_argument("--level", choices=("top", "component"), default="top")
    tv.set_defaults(func=_cmd_t)

    pe = ins_sub.add_parser("peel", parents=[fmt, sampling])
    pe.add_argument("--n", type=int, default=None)
    pe.add_argument("--module", required=True)
    pe.add_argument("--vertex", type=int, required=True)
    pe.add_argument("--level", choices=("top", "component"), default="top")
    pe.set_defaults(func=_cmd_peel)

    st = sub.add_parser("selftest", parents=[sampling, caching])
    st.add_argument("--dim-bound", type=int, default=5, help="grade bound for suites")
    st.set_defaults(func=_cmd_selftest)

    ca = sub.add_parser("cache", parents=[fmt, caching])
    ca.add_argument("action", choices=("stats", "clear"))
    ca.set_defaults(func=_cmd_cache)

    return top


# ---------------------------------------------------------------------------
# shared plumbing


def _parse_dim(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad dimension vector {text!r}") from exc
    if any(x < 0 for x in dims):
        raise ParseError(f"negative entry in dimension vector {text!r}")
    return dims


def _quiver_dim(args) -> tuple[Quiver, tuple[int, ...]]:
    dims = _parse_dim(args.dim)
    n = args.n if args.n is not None else len(dims)
    if n != len(dims):
        raise ParseError(f"--dim has {len(dims)} entries but --n is {n}")
    return Quiver(n), dims


def _module_arg(args) -> tuple[Multisegment, int]:
    m = Multisegment.parse(args.module)
    n = args.n if args.n is not None else max(m.max_end(), 1)
    if m.max_end() > n:
        raise ParseError(f"module {m} does not fit in {n} vertices")
    return m, n


def _config_from(args) -> SampleConfig:
    pool = None
    if getattr(args, "primes", None):
        try:
            pool = tuple(int(p) for p in args.primes.split(","))
        except ValueError as exc:
            raise ParseError(f"bad prime pool {args.primes!r}") from exc
    return SampleConfig(
        root_seed=args.seed, samples_per_prime=args.samples, prime_pool=pool
    )


def _cache_from(args) -> HallCache | None:
    directory = getattr(args, "cache_dir", None) or cache_dir_from_env()
    return HallCache(directory) if directory else None


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return int(obj) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(args, payload: dict, csv_rows: list[list], pretty_lines: list[str]) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in csv_rows:
            writer.writerow([_cell(v) for v in row])
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write("\n".join(pretty_lines) + "\n")


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return str(int(v)) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


# ---------------------------------------------------------------------------
# commands


def _cmd_transition(args) -> int:
    quiver, dims = _quiver_dim(args)
    cfg = _config_from(args)
    cache = _cache_from(args)
    result = transition_matrix(quiver, dims, cfg, cache)
    print(f"elapsed: {result.elapsed:.2f}s", file=sys.stderr)
    payload = result.to_payload()
    csv_rows = [["class"] + [c.text() for c in result.classes]]
    for cls, row in zip(result.classes, result.matrix):
        csv_rows.append([cls.text()] + list(row))
    width = max((len(c.text()) for c in result.classes), default=1)
    pretty = [f"grade {dims} over A_{quiver.n}: {len(result.classes)} classes"]
    for cls, row in zip(result.classes, result.matrix):
        pretty.append(f"  {cls.text():<{width}}  " + " ".join(_cell(v) for v in row))
    pretty.append(f"routes agree: {result.routes_agree}")
    pretty.append(f"delta identity: {result.delta_ok}")
    _emit(args, payload, csv_rows, pretty)
    return 0


def _cmd_deg_order(args) -> int:
    quiver, dims = _quiver_dim(args)
    classes = refine_order(enumerate_multisegments(quiver, dims))
    relations = [
        [a.text(), b.text()]
        for idx, a in enumerate(classes)
        for b in classes[idx + 1 :]
        if deg_leq(a, b)
    ]
    payload = {
        "n": quiver.n,
        "dim": list(dims),
        "order": [c.text() for c in classes],
        "degenerations": relations,
    }
    csv_rows = [[c.text()] for c in classes]
    pretty = [f"{len(classes)} classes, most generic first:"]
    pretty += [f"  {c.text()}" for c in classes]
    pretty += [f"degenerations: {len(relations)} ordered pairs"]
    _emit(args, payload, csv_rows, pretty)
    return 0


def _cmd_flag(args) -> int:
    m, _ = _module_arg(args)
    word = () if m.is_zero() else total_generic_flag(m)
    payload = {
        "module": m.text(),
        "word": format_word(word),
        "letters": [list(letter) for letter in word],
    }
    _emit(args, payload, [[format_word(word)]], [format_word(word)])
    return 0


def _cmd_hall(args) -> int:
    m, n = _module_arg(args)
    cache = _cache_from(args)
    counts = cache.get(n, m, args.vertex, args.size, args.prime) if cache else None
    if counts is None:
        counts = hall_counts_simple_top(m, args.vertex, args.size, args.prime)
        if cache:
            cache.put(n, m, args.vertex, args.size, args.prime, counts)
    if cache:
        cache.close()
    total = gaussian_binomial(t_top(m, args.vertex), args.size, args.prime)
    ordered = sorted(counts.items(), key=lambda kv: kv[0].sort_key())
    payload = {
        "module": m.text(),
        "vertex": args.vertex,
        "size": args.size,
        "prime": args.prime,
        "counts": {cls.text(): c for cls, c in ordered},
        "total": total,
    }
    csv_rows = [[cls.text(), c] for cls, c in ordered]
    pretty = [f"{cls.text()}: {c}" for cls, c in ordered] or ["no submodules"]
    pretty.append(f"total: {total}")
    _emit(args, payload, csv_rows, pretty)
    return 0


def _cmd_t(args) -> int:
    m, n = _module_arg(args)
    if args.level == "top":
        value = t_top(m, args.vertex)
    else:
        value = t_component(m, args.vertex, _config_from(args), n)
    payload = {
        "module": m.text(),
        "vertex": args.vertex,
        "level": args.level,
        "t": value,
    }
    _emit(args, payload, [[value]], [str(value)])
    return 0


def _cmd_peel(args) -> int:
    m, n = _module_arg(args)
    if args.level == "top":
        peeled = peel_top(m, args.vertex)
    else:
        peeled = peel_component(m, args.vertex, _config_from(args), n)
    payload = {
        "module": m.text(),
        "vertex": args.vertex,
        "level": args.level,
        "peeled": peeled.text(),
    }
    _emit(args, payload, [[peeled.text()]], [peeled.text()])
    return 0


def _cmd_cache(args) -> int:
    cache = _cache_from(args)
    if cache is None:
        raise ParseError(
            "no cache directory: pass --cache-dir or set SEMIBASIS_CACHE_DIR"
        )
    if args.action == "stats":
        stats = cache.stats()
        payload = dict(stats)
        pretty = [f"{k}: {v}" for k, v in stats.items()]
        _emit(args, payload, [[k, v] for k, v in stats.items()], pretty)
    else:
        removed = cache.clear()
        _emit(args, {"removed": removed}, [["removed", removed]], [f"removed {removed}"])
    return 0


# ---------------------------------------------------------------------------
# selftest suites


def _hom_rank_oracle(m: Multisegment, w: Multisegment, n: int) -> int:
    # dimension of the intertwiner space between the canonical
    # realizations, by exact rank over the rationals
    src = realize(m, n)
    dst = realize(w, n)
    cols = sum(a * b for a, b in zip(src.dims, dst.dims))
    if cols == 0:
        return 0
    offsets = [0]
    for a, b in zip(src.dims, dst.dims):
        offsets.append(offsets[-1] + a * b)

    def slot(v: int, r: int, c: int) -> int:
        # entry (r, c) of phi_v, shape dst.dims[v-1] x src.dims[v-1]
        return offsets[v - 1] + r * src.dims[v - 1] + c

    rows = []
    for v in range(1, n):
        a_src = src.maps[v - 1]
        a_dst = dst.maps[v - 1]
        for r in range(dst.dims[v]):
            for c in range(src.dims[v - 1]):
                row = [Fraction(0)] * cols
                # (phi_{v+1} a^M)[r][c]
                for k in range(src.dims[v]):
                    if a_src[k][c]:
                        row[slot(v + 1, r, k)] += a_src[k][c]
                # -(a^N phi_v)[r][c]
                for k in range(dst.dims[v - 1]):
                    if a_dst[r][k]:
                        row[slot(v, k, c)] -= a_dst[r][k]
                if any(row):
                    rows.append(tuple(row))
    return cols - rank_exact(rows)


def _suite_transition_regression(cfg: SampleConfig, cache) -> tuple[bool, str]:
    res = transition_matrix(Quiver(2), (2, 2), cfg, cache)
    want = ((1, 1, 1), (0, 1, 2), (0, 0, 1))
    got = tuple(tuple(v for v in row) for row in res.matrix)
    if got != want:
        return False, f"grade (2,2) matrix {got}"
    order = [c.text() for c in res.classes]
    if order != ["2[1,2]", "1[1,2]+1[1,1]+1[2,2]", "2[1,1]+2[2,2]"]:
        return False, f"grade (2,2) order {order}"
    res3 = transition_matrix(Quiver(3), (1, 1, 1), cfg, cache)
    if len(res3.classes) != 4:
        return False, f"grade (1,1,1) has {len(res3.classes)} classes, expected 4"
    return True, "grades (2,2) and (1,1,1) certified"


def _suite_serre(cfg: SampleConfig, cache, bound: int) -> tuple[bool, str]:
    report = check_serre(Quiver(3), bound, cache)
    detail = f"{report.relations_checked} relations at n=3, grades to {bound}"
    if not report.ok:
        return False, detail + "; failures: " + "; ".join(report.failures[:3])
    return True, detail


def _suite_top_identities(cfg: SampleConfig) -> tuple[bool, str]:
    forced = replace(cfg, force_sampling=True)
    cases = [
        ("2[1,1]+2[2,2]", 2, 2),
        ("2[1,1]+2[2,2]", 1, 2),
        ("1[1,2]+1[1,1]+1[2,2]", 2, 2),
        ("1[1,2]", 1, 2),
        ("1[2,3]+1[2,2]", 2, 3),
    ]
    checked = 0
    for text, i, n in cases:
        m = Multisegment.parse(text)
        fast = t_component(m, i, cfg, n)
        slow = t_component(m, i, forced, n)
        if fast != slow:
            return False, f"t at {i} of {text}: shortcut {fast}, sampled {slow}"
        if fast > 0:
            if peel_component(m, i, cfg, n) != peel_component(m, i, forced, n):
                return False, f"peel at {i} of {text} disagrees with sampling"
        checked += 1
    return True, f"{checked} shortcut/sampling agreements"


def _suite_hom_oracle(cfg: SampleConfig, bound: int) -> tuple[bool, str]:
    checked = 0
    for n in (2, 3):
        quiver = Quiver(n)
        mods = [
            m
            for d in iter_dim_vectors(n, min(bound, 4))
            for m in enumerate_multisegments(quiver, d)
        ]
        for m in mods:
            for w in mods:
                if hom_dim(m, w) != _hom_rank_oracle(m, w, n):
                    return False, f"hom({m}, {w}) disagrees with intertwiner rank"
                checked += 1
    return True, f"{checked} hom dimensions match intertwiner ranks"


def _suite_realize_roundtrip(cfg: SampleConfig, bound: int) -> tuple[bool, str]:
    checked = 0
    for n in (2, 3):
        quiver = Quiver(n)
        for d in iter_dim_vectors(n, min(bound, 4)):
            for m in enumerate_multisegments(quiver, d):
                if iso_class(realize(m, n), 5) != m:
                    return False, f"realize/iso round trip fails at {m}"
                checked += 1
    return True, f"{checked} classes round trip"


def _suite_generic_ext(cfg: SampleConfig, bound: int) -> tuple[bool, str]:
    checked = 0
    for n in (2, 3):
        quiver = Quiver(n)
        for d in iter_dim_vectors(n, min(bound, 4)):
            for m in enumerate_multisegments(quiver, d):
                for i in quiver.vertices():
                    for a in (1, 2):
                        if sum(d) + a > bound + 2:
                            continue
                        vec = PBWVector(n, d, {m: Fraction(1)})
                        support = [
                            cls for cls, _ in left_mul_divided_power(i, a, vec).items()
                        ]
                        generic = generic_ext_simple(m, i, a)
                        if generic not in support:
                            return False, f"generic extension of {m} by S_{i}^{a} missing"
                        if not all(deg_leq(generic, other) for other in support):
                            return False, f"generic extension of {m} by S_{i}^{a} not minimal"
                        checked += 1
    return True, f"{checked} generic extensions are degeneration-minimal"


def _suite_cache_verify(cache) -> tuple[bool, str]:
    return True, f"{cache.verify()} cached records verified"


def _cmd_selftest(args) -> int:
    cfg = _config_from(args)
    cache = _cache_from(args)
    bound = args.dim_bound
    suites = [
        ("transition-regression", lambda: _suite_transition_regression(cfg, cache)),
        ("serre-relations", lambda: _suite_serre(cfg, cache, bound)),
        ("top-identities", lambda: _suite_top_identities(cfg)),
        ("hom-intertwiner-oracle", lambda: _suite_hom_oracle(cfg, bound)),
        ("realize-roundtrip", lambda: _suite_realize_roundtrip(cfg, bound)),
        ("generic-ext-minimality", lambda: _suite_generic_ext(cfg, bound)),
    ]
    if cache is not None:
        suites.append(("hall-cache", lambda: _suite_cache_verify(cache)))
    started = time.perf_counter()
    exit_code = 0
    for name, run in suites:
        try:
            ok, detail = run()
        except SemibasisError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
            exit_code = exit_code or _exit_code_for(exc)
        print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
        if not ok and exit_code == 0:
            exit_code = 1
    print(f"elapsed: {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return exit_code


# ---------------------------------------------------------------------------
# entry point


def _exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ParseError):
        return 10
    if isinstance(exc, ConsensusError):
        return 20
    if isinstance(exc, InterpolationError):
        return 21
    if isinstance(exc, CertificationError):
        return 30
    if isinstance(exc, (CacheCorruptError, AssertionError)):
        return 40
    if isinstance(exc, ValueError):
        return 10
    return 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (SemibasisError, ValueError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
