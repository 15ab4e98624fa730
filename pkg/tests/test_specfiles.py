import pytest

from tmodcount.errors import NotNilpotent, ParseError, ValidationError
from tmodcount.specfiles import load_module, load_set, parse_set, parse_tmod, read_kv
from tmodcount.tmodule import j_invariant

DATA = __import__("pathlib").Path(__file__).resolve().parents[1] / "data"


def test_read_kv_positions():
    d = read_kv("# c\nm = 2\n  phi_T =  T + t\n")
    assert d["m"][0].value == "2" and d["m"][0].line == 2
    e = d["phi_T"][0]
    assert (e.line, e.column) == (3, 12)


def test_read_kv_errors():
    with pytest.raises(ParseError) as ei:
        read_kv("m = 1\nm = 2\n", "x.tmod")
    assert ei.value.line == 2
    with pytest.raises(ParseError):
        read_kv("no equals sign\n")
    assert len(read_kv("algebraic = z1\nalgebraic = z2\n")["algebraic"]) == 2


def test_parse_tmod():
    M = parse_tmod("m = 1\nq = 3\nphi_T = T + t\n")
    assert M.q == 3 and M.m == 1
    M = parse_tmod("m = 1\nphi_T = T + t\n", q=5)
    assert M.q == 5
    with pytest.raises(ParseError):
        parse_tmod("m = 1\nq = 3\nphi_T = T + t\n", q=2)
    with pytest.raises(ParseError):
        parse_tmod("m = 1\nphi_T = T + t\n")
    with pytest.raises(NotNilpotent):
        parse_tmod("m = 2\nq = 2\nphi_T = [[T + 1, 0], [0, T]] + t\n")


def test_parse_error_location():
    with pytest.raises(ParseError) as ei:
        parse_tmod("m = 1\nq = 2\nphi_T = T + * t\n", source="bad.tmod")
    err = ei.value
    assert err.line == 3 and err.column > 8
    assert "bad.tmod" in str(err)


def test_data_files():
    assert j_invariant(load_module(str(DATA / "nilpotent.tmod"), None)) == 2
    assert load_module(str(DATA / "carlitz.tmod"), 3).rank == 1
    assert load_module("anderson-coleman", 2, 20).m == 2
    with pytest.raises(ValidationError):
        load_module("carlitz", None)
    with pytest.raises(ValidationError):
        load_module("no-such-thing", 2)
    for name in ("parabola.set", "parabola-zero-locus.set", "carlitz-exp-graph.set"):
        sf = load_set(str(DATA / name), q=2)
        assert sf.W.ambient_dim == 2
    assert load_set(str(DATA / "parabola-zero-locus.set"), q=2).Walg.components


def test_parse_set_errors():
    with pytest.raises(ParseError):
        parse_set("flavor = fq\nq = 2\nform = image\nambient_dim = 2\nsource_dim = 1\nmap = x1\n")
    with pytest.raises(ParseError):
        parse_set("flavor = fq\nform = image\n")  # no q anywhere
    with pytest.raises(ParseError):
        parse_set("flavor = xx\nq = 2\n")
    sf = parse_set("flavor = qp\nform = zero_locus\nambient_dim = 2\nequations = z2 - z1^2\n", p=5)
    assert sf.W.K.p == 5
