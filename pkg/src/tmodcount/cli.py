"""Command-line front end.  Exit status: 0 ok, 2 validation, 3 budget."""

from __future__ import annotations

import argparse
import logging
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .counting import (
    CountReport,
    cover_by_hypersurfaces,
    enumerate_rationals,
    transcendent_points,
)
from .errors import BudgetError, ParseError, TmodError, ValidationError
from .expmap import exp_coeffs, verify_functional_equation
from .finitefield import gf, prime_power
from .hensel import AnalyticMap, implicit_solve, newton_solve, vbound
from .localfield import laurent, padic, render
from .parsing import Evaluator, split_top_level
from .polys import RationalFn
from .series import parse_series, render_series, scalar_ring
from .specfiles import load_module, load_set
from .tmodule import j_invariant, torsion_count, torsion_points

MAX_Q = 16
MAX_PRECISION = 200
MAX_T = 1 << 16
RESERVED = {"T", "g", "u", "p", "t", "sum"}


# ---------------------------------------------------------------- argument types


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def budget(text: str) -> tuple[int, int]:
    vals = int_list(text)
    if len(vals) != 2 or min(vals) < 1:
        raise argparse.ArgumentTypeError("expected e,f with e, f >= 1")
    return vals[0], vals[1]


def _check_bounds(args):
    q = getattr(args, "q", None)
    if q is not None and q > MAX_Q:
        raise ValidationError(f"q = {q} exceeds {MAX_Q}")
    prec = getattr(args, "precision", None)
    if prec is not None and not 1 <= prec <= MAX_PRECISION:
        raise ValidationError(f"precision must lie in 1..{MAX_PRECISION}")
    ts = getattr(args, "t", None)
    if ts and (min(ts) < 1 or max(ts) > MAX_T):
        raise ValidationError(f"heights must lie in 1..{MAX_T}")


def _field(args):
    if args.flavor == "fq":
        if args.q is None:
            raise ValidationError("--flavor fq needs --q")
        return laurent(args.q)
    if args.p is None:
        raise ValidationError("--flavor qp needs --p")
    return padic(args.p)


# ---------------------------------------------------------------- subcommands


def _poly_arg(text: str, q: int):
    """Parse a(T) given on the command line."""
    from .tmodule import as_fqpoly
    from .twisted import scalar_env

    number, name = scalar_env(gf(q))
    val = Evaluator(number, name, source="--a").parse(text)
    return as_fqpoly(val, gf(q))


def _a_list(values, q):
    items = []
    for v in values:
        items.extend(x for x in split_top_level(v, ";") if x.strip())
    return [(x.strip(), _poly_arg(x, q)) for x in items]


def _fmt_val(v):
    if v is None:
        return "inf"
    return str(v) if v.denominator != 1 else str(v.numerator)


def cmd_torsion(args, out):
    M = load_module(args.module, args.q, args.precision)
    out.write(f"# module {M.label or args.module}: Phi(T) = {M}\n")
    for text, a in _a_list(args.a, M.q):
        n = torsion_count(M, a)
        out.write(f"a = {a}: |A[a]| = {n}\n")
        if args.count_only:
            continue
        pts = torsion_points(M, a, args.precision, args.ext_budget)
        out.write(f"found {len(pts)} of {n} points within (e, f) <= {args.ext_budget}\n")
        for pt in pts:
            vals = ", ".join(_fmt_val(v) for v in pt.valuations)
            coords = "; ".join(render(x) for x in pt.coords)
            out.write(f"  v = ({vals})  field (e={pt.field.e}, f={pt.field.f})  x = ({coords})\n")
        if len(pts) < n:
            out.write(f"warning: {n - len(pts)} points lie outside the extension budget\n")
    return 0


def _points_arg(text: str, K, m: int, precision: int):
    """Points as ';'-separated vectors of ','-separated rational expressions in u."""
    ring = scalar_ring(K)
    pts = []
    for vec in split_top_level(text, ";"):
        comps = [c for c in vec.split(",")]
        if len(comps) != m:
            raise ValidationError(f"point {vec!r} does not have {m} coordinates")
        row = []
        for c in comps:
            v = parse_series(c, [], ring, source="--z")
            row.append(K.embed(v.coeff(()) if not v.is_zero() else 0, precision))
        pts.append(tuple(row))
    return pts


def cmd_exp_check(args, out):
    M = load_module(args.module, args.q, args.precision + 10)
    K = laurent(M.q)
    E = exp_coeffs(M, args.truncation)
    default = "u" if M.m == 1 else ",".join(f"u^{5 + 2 * i}" for i in range(M.m))
    pts = _points_arg(args.z or default, K, M.m, args.precision)
    out.write("a,z,residual,threshold,ok\n")
    ok_all = True
    for text, a in _a_list(args.a, M.q):
        for z in pts:
            r = verify_functional_equation(M, E, a, z, args.precision)
            ok = r >= args.precision - 5
            ok_all &= ok
            zs = " ; ".join(render(c) for c in z)
            rs = "inf" if r == float("inf") else str(r)
            out.write(f"{a},{zs},{rs},{args.precision - 5},{'yes' if ok else 'no'}\n")
    return 0 if ok_all else 1


def _identifiers(text: str):
    seen = []
    for tok in re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text):
        if tok not in RESERVED and tok not in seen:
            seen.append(tok)
    return seen


def cmd_hensel(args, out):
    K = _field(args)
    names = args.vars.split(",") if args.vars else _identifiers(args.system)
    ring = scalar_ring(K)
    eqs = [parse_series(e, names, ring, source="--system") for e in split_top_level(args.system, ";") if e.strip()]
    F = AnalyticMap(eqs)
    start = _start_values(args.start, K, len(names))
    D = args.digits
    if F.ncomp == F.nvars:
        res = newton_solve(F, start, K, D)
        for name, x in zip(names, res.point):
            x = x.truncate(D)
            out.write(f"{name} = {render(x)}\n")
            out.write(f"digits {name}: {','.join(str(d) for d in _digits_from(x, D))}\n")
        for k, st in enumerate(res.steps):
            out.write(
                f"step {k + 1}: v(F) {st.residual} -> {st.next_residual}, v(det J) = {st.det_val}, "
                f"quadratic {'ok' if st.quadratic_ok else 'FAILED'}\n"
            )
        v = min(vbound(c) for c in F(tuple(x.truncate(D) for x in res.point)))
        out.write(f"verification: v(F(x)) = {v} >= {D}: {'ok' if v >= D else 'FAILED'}\n")
        return 0 if v >= D else 1
    chart = implicit_solve(F, start, K, D)
    free = [names[i] for i in chart.free]
    dep = [names[i] for i in chart.dep]
    out.write(f"chart: solve for {', '.join(dep)} in terms of {', '.join(free)}; radius {chart.radius}\n")
    series = chart.series(args.series_degree)
    snames = [f"s{i + 1}" for i in range(len(free))]
    for name, S in zip(dep, series):
        out.write(f"{name} - {name}0 = {render_series(S, snames)} + O(deg {args.series_degree + 1})\n")
    return 0


def _start_values(text, K, n):
    if text is None:
        raise ValidationError("--start is required")
    ring = scalar_ring(K)
    vals = []
    for c in text.split(","):
        v = parse_series(c, [], ring, source="--start")
        vals.append(v.coeff(()) if not v.is_zero() else (Fraction(0) if K.kind == "padic" else K.exact_zero()))
    if len(vals) != n:
        raise ValidationError(f"--start gives {len(vals)} values for {n} unknowns")
    return tuple(vals)


def _digits_from(x, D):
    """Digits of x from u^0 (p^0) up to D - 1."""
    return [x.coefficient(k) if k >= (x.val or 0) or x.val is None else 0 for k in range(D)]


def cmd_enumerate(args, out):
    K = _field(args)
    out.write("t,count\n")
    for t in args.t:
        pts = list(enumerate_rationals(args.n, t, K))
        out.write(f"{t},{len(pts)}\n")
        if args.list:
            for z in pts:
                out.write("  (" + ", ".join(str(x) for x in z) + ")\n")
    return 0


def _set_from_args(args):
    q = args.q if args.flavor in (None, "fq") else None
    p = args.p if args.flavor in (None, "qp") else None
    return load_set(args.set, args.flavor, q, p)


def cmd_count(args, out):
    S = _set_from_args(args)
    rep = CountReport()
    for t in args.t:
        t0 = time.perf_counter()
        pts = transcendent_points(S.W, S.Walg, t, args.precision)
        cover = None
        if S.W.form == "image" and args.delta:
            cover = len(cover_by_hypersurfaces(S.W, t, args.delta, args.precision, pts))
        ms = (time.perf_counter() - t0) * 1000 if args.timing else None
        rep.add(t, len(pts), cover, args.precision, ms)
    out.write(rep.to_csv())
    return 0


def cmd_cover(args, out):
    S = _set_from_args(args)
    out.write("t,delta,points,cover_size\n")
    detail = []
    for t in args.t:
        pts = transcendent_points(S.W, S.Walg, t, args.precision)
        cover = cover_by_hypersurfaces(S.W, t, args.delta, args.precision, pts)
        out.write(f"{t},{args.delta},{len(pts)},{len(cover)}\n")
        detail.extend((t, H) for H in cover)
    for t, H in detail:
        out.write(f"# t={t}: {H.render()} = 0\n")
    return 0


def cmd_j_invariant(args, out):
    M = load_module(args.module, args.q, args.precision)
    out.write(f"{j_invariant(M)}\n")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tmodcount", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, precision=30):
        sp.add_argument("--config", help="key = value file supplying defaults for any flag")
        sp.add_argument("--out", default="-", help="output file ('-' for stdout)")
        sp.add_argument("--precision", type=int, default=precision)
        sp.add_argument("-v", "--verbose", action="store_true")

    def flavor(sp):
        sp.add_argument("--flavor", choices=("fq", "qp"))
        sp.add_argument("--q", type=int)
        sp.add_argument("--p", type=int)

    sp = sub.add_parser("torsion", help="torsion counts and points")
    common(sp)
    sp.add_argument("--module", required=False, help="a .tmod file or builtin name")
    sp.add_argument("--q", type=int)
    sp.add_argument("--a", action="append", help="a(T); repeat or separate with ';'")
    sp.add_argument("--ext-budget", type=budget, default=(2, 2))
    sp.add_argument("--count-only", action="store_true")
    sp.set_defaults(func=cmd_torsion, required=("module", "a"))

    sp = sub.add_parser("exp-check", help="functional-equation residual table")
    common(sp, 40)
    sp.add_argument("--module")
    sp.add_argument("--q", type=int)
    sp.add_argument("--a", action="append")
    sp.add_argument("--z", help="points: ';'-separated, coordinates ','-separated, in u = 1/T")
    sp.add_argument("--truncation", type=int, default=6)
    sp.set_defaults(func=cmd_exp_check, required=("module", "a"))

    sp = sub.add_parser("hensel", help="Newton/Hensel solve or implicit series")
    common(sp)
    flavor(sp)
    sp.add_argument("--system", help="equations separated by ';'")
    sp.add_argument("--vars", help="comma-separated unknowns (default: order of appearance)")
    sp.add_argument("--start", help="comma-separated starting point")
    sp.add_argument("--digits", type=int, default=10)
    sp.add_argument("--series-degree", type=int, default=8)
    sp.set_defaults(func=cmd_hensel, required=("flavor", "system", "start"))

    sp = sub.add_parser("enumerate", help="bounded-height rational points")
    common(sp)
    flavor(sp)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--t", type=int_list)
    sp.add_argument("--list", action="store_true")
    sp.set_defaults(func=cmd_enumerate, required=("flavor", "t"))

    sp = sub.add_parser("count", help="transcendent-part counts as CSV")
    common(sp)
    flavor(sp)
    sp.add_argument("--set")
    sp.add_argument("--t", type=int_list)
    sp.add_argument("--delta", type=int, default=1, help="degree for the cover_size column (0: skip)")
    sp.add_argument("--timing", action="store_true", help="fill the elapsed_ms column")
    sp.set_defaults(func=cmd_count, required=("set", "t"))

    sp = sub.add_parser("cover", help="hypersurface covers")
    common(sp)
    flavor(sp)
    sp.add_argument("--set")
    sp.add_argument("--t", type=int_list)
    sp.add_argument("--delta", type=int, default=2)
    sp.set_defaults(func=cmd_cover, required=("set", "t"))

    sp = sub.add_parser("j-invariant", help="smallest j with dPhi(T^j) scalar")
    common(sp)
    sp.add_argument("--module")
    sp.add_argument("--q", type=int)
    sp.set_defaults(func=cmd_j_invariant, required=("module",))
    return ap


def _apply_config(parser, args, argv):
    """Fill flags not given on the command line from a key = value file."""
    from .specfiles import read_kv

    path = Path(args.config)
    if not path.exists():
        raise ValidationError(f"no such config file: {args.config}")
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sp = sub.choices[args.command]
    given = {a for a in argv if a.startswith("--")}
    actions = {a.dest: a for a in sp._actions}
    for key, entries in read_kv(path.read_text(), str(path)).items():
        if key not in actions or key in ("config", "help"):
            e = entries[0]
            raise ParseError(f"unknown setting {key!r}", e.line, 1, str(path))
        act = actions[key]
        if any(opt in given for opt in act.option_strings):
            continue
        e = entries[-1]
        try:
            if isinstance(act, argparse._StoreTrueAction):
                val = e.value.lower() in ("1", "true", "yes", "on")
            elif isinstance(act, argparse._AppendAction):
                val = [x.value for x in entries]
            else:
                val = act.type(e.value) if act.type else e.value
                if act.choices and val not in act.choices:
                    raise ValueError(f"choose from {', '.join(act.choices)}")
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ParseError(f"bad value for {key}: {exc}", e.line, e.column, str(path)) from None
        setattr(args, key, val)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.config:
            _apply_config(parser, args, argv)
        for key in args.required:
            if getattr(args, key, None) in (None, []):
                raise ValidationError(f"--{key.replace('_', '-')} is required")
        if getattr(args, "q", None) is not None:
            prime_power(args.q)
        _check_bounds(args)
        if args.out == "-":
            return args.func(args, sys.stdout)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            return args.func(args, fh)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (TmodError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
