"""Readers for ``.tmod`` module files and ``.set`` analytic-set files.

Both are ``key = value`` documents; ``#`` starts a comment.  Keys may
repeat only where noted (``algebraic``).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .counting import AlgebraicPartSpec, AnalyticSetSpec, image_set, zero_locus_set
from .errors import ParseError, ValidationError
from .finitefield import prime_power
from .graphs import exp_graph
from .hensel import AnalyticMap
from .localfield import laurent, padic
from .parsing import split_top_level
from .series import parse_series, scalar_ring
from .tmodule import (
    TModule,
    anderson_coleman_example,
    carlitz,
    new_tmodule,
    nilpotent_example,
)
from .twisted import parse_twisted

REPEATABLE = {"algebraic"}


@dataclass
class Entry:
    value: str
    line: int
    column: int


def read_kv(text: str, source: str | None = None) -> dict[str, list[Entry]]:
    out: dict[str, list[Entry]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, 1, source)
        key, val = line.split("=", 1)
        key = key.strip().replace("-", "_")
        col = len(line) - len(line.lstrip()) + 1
        vcol = line.index("=") + 2 + (len(val) - len(val.lstrip()))
        if not key:
            raise ParseError("empty key", lineno, col, source)
        if key in out and key not in REPEATABLE:
            raise ParseError(f"duplicate key {key!r}", lineno, col, source)
        out.setdefault(key, []).append(Entry(val.strip(), lineno, vcol))
    return out


def _one(d, key, source, default=None, required=True):
    if key in d:
        return d[key][0]
    if default is not None or not required:
        return None if default is None else Entry(str(default), 0, 0)
    raise ParseError(f"missing key {key!r}", 1, 1, source)


def _int(entry: Entry, key, source):
    try:
        return int(entry.value)
    except ValueError:
        raise ParseError(f"{key} must be an integer, got {entry.value!r}", entry.line, entry.column, source) from None


BUILTIN_MODULES = ("carlitz", "nilpotent", "anderson-coleman")


def builtin_module(name: str, q: int, precision: int = 30) -> TModule:
    if name == "carlitz":
        return carlitz(q)
    if name == "nilpotent":
        return nilpotent_example(q)
    if name == "anderson-coleman":
        return anderson_coleman_example(q, precision)
    raise ValidationError(f"unknown builtin module {name!r} (choose from {', '.join(BUILTIN_MODULES)})")


def parse_tmod(text: str, q: int | None = None, source: str | None = None) -> TModule:
    """Module from a ``.tmod`` document; ``q`` fills in a missing q field and
    must agree with a present one."""
    d = read_kv(text, source)
    m = _int(_one(d, "m", source), "m", source)
    if "q" in d:
        fq = _int(d["q"][0], "q", source)
        if q is not None and q != fq:
            e = d["q"][0]
            raise ParseError(f"file declares q = {fq} but {q} was requested", e.line, e.column, source)
        q = fq
    if q is None:
        raise ParseError("q is neither in the file nor given", 1, 1, source)
    ph = _one(d, "phi_T", source)
    label = d["label"][0].value if "label" in d else Path(source).stem if source else ""
    rank = _int(d["rank"][0], "rank", source) if "rank" in d else None
    P = parse_twisted(ph.value, q, m, ph.line, ph.column, source)
    return new_tmodule(m, q, P, label, rank)


def load_module(spec: str, q: int | None, precision: int = 30) -> TModule:
    if spec in BUILTIN_MODULES:
        if q is None:
            raise ValidationError("a builtin module needs --q")
        return builtin_module(spec, q, precision)
    path = Path(spec)
    if not path.exists():
        raise ValidationError(f"no such module file or builtin: {spec}")
    return parse_tmod(path.read_text(), q, str(path))


@dataclass
class SetFile:
    W: AnalyticSetSpec
    Walg: AlgebraicPartSpec
    label: str


def _field(d, flavor, q, p, source):
    fl = d["flavor"][0].value if "flavor" in d else flavor
    if fl is None:
        raise ParseError("flavor is neither in the file nor given", 1, 1, source)
    if flavor is not None and fl != flavor:
        e = d["flavor"][0]
        raise ParseError(f"file declares flavor {fl} but {flavor} was requested", e.line, e.column, source)
    if fl == "fq":
        fq = _int(d["q"][0], "q", source) if "q" in d else q
        if q is not None and fq != q:
            e = d["q"][0]
            raise ParseError(f"file declares q = {fq} but {q} was requested", e.line, e.column, source)
        if fq is None:
            raise ParseError("q missing for flavor fq", 1, 1, source)
        prime_power(fq)
        return laurent(fq)
    if fl == "qp":
        fp = _int(d["p"][0], "p", source) if "p" in d else p
        if p is not None and fp != p:
            e = d["p"][0]
            raise ParseError(f"file declares p = {fp} but {p} was requested", e.line, e.column, source)
        if fp is None:
            raise ParseError("p missing for flavor qp", 1, 1, source)
        return padic(fp)
    e = d["flavor"][0]
    raise ParseError(f"unknown flavor {fl!r} (fq or qp)", e.line, e.column, source)


def _series_list(entry: Entry, names, K, source):
    ring = scalar_ring(K)
    out = []
    pieces = split_top_level(entry.value, ";")
    offset = 0
    for piece in pieces:
        col = entry.column + entry.value.index(piece, offset) if piece else entry.column
        offset = entry.value.index(piece, offset) + len(piece) if piece else offset
        if not piece.strip():
            raise ParseError("empty component", entry.line, col, source)
        out.append(parse_series(piece, names, ring, entry.line, col, source))
    return out


def parse_set(text: str, flavor=None, q=None, p=None, source: str | None = None) -> SetFile:
    d = read_kv(text, source)
    K = _field(d, flavor, q, p, source)
    label = d["label"][0].value if "label" in d else (Path(source).stem if source else "")
    if "exp_graph" in d:
        e = d["exp_graph"][0]
        if K.kind != "laurent":
            raise ParseError("exponential graphs need flavor fq", e.line, e.column, source)
        N = _int(d["truncation"][0], "truncation", source) if "truncation" in d else 4
        M = load_module(e.value, K.q)
        W = exp_graph(M, N, label)
        m = 2
    else:
        form = _one(d, "form", source)
        m = _int(_one(d, "ambient_dim", source), "ambient_dim", source)
        znames = [f"z{i + 1}" for i in range(m)]
        if form.value == "image":
            h = _int(_one(d, "source_dim", source), "source_dim", source)
            comps = _series_list(_one(d, "map", source), [f"x{i + 1}" for i in range(h)], K, source)
            if len(comps) != m:
                e = d["map"][0]
                raise ParseError(f"map has {len(comps)} components, ambient_dim is {m}", e.line, e.column, source)
            W = image_set(K, AnalyticMap(comps), label)
        elif form.value == "zero_locus":
            eqs = _series_list(_one(d, "equations", source), znames, K, source)
            W = zero_locus_set(K, AnalyticMap(eqs), label)
        else:
            raise ParseError(f"unknown form {form.value!r}", form.line, form.column, source)
    znames = [f"z{i + 1}" for i in range(m)]
    comps = tuple(tuple(_series_list(e, znames, K, source)) for e in d.get("algebraic", []))
    return SetFile(W, AlgebraicPartSpec(comps), label)


def load_set(path: str, flavor=None, q=None, p=None) -> SetFile:
    fp = Path(path)
    if not fp.exists():
        raise ValidationError(f"no such set file: {path}")
    return parse_set(fp.read_text(), flavor, q, p, str(fp))
