from fractions import Fraction

import pytest
from hypothesis import given

from diffn import dfn
from diffn.core import DiffMorphism, DiffObject, jordan_block, ses_inj, ses_proj
from diffn.errors import FormatError, NilpotencyError, NotAMorphism, NotExact
from diffn.exactla import Matrix
from diffn.generators import random_morphism
from diffn.rng import Xoshiro256
from helpers import F2, F97, Q, M, objects, seeds


def test_object_text_layout():
    text = dfn.dump_object(jordan_block(Q, 3, 2))
    assert text == "dfn-object v1 field=Q n=3 dim=2\n0 0\n1 0\n"


def test_rational_entries_round_trip():
    x = DiffObject(Q, 2, M(Q, [[0, 0], [Fraction(-3, 7), 0]]))
    text = dfn.dump_object(x)
    assert "-3/7" in text
    assert dfn.parse_object(text) == x


def test_comments_and_blank_lines_ignored():
    text = "# a comment\n\ndfn-object v1 field=2 n=2 dim=2\n  0 0\n# row two\n1 0\n\n"
    assert dfn.parse_object(text) == jordan_block(F2, 2, 2)


def test_zero_dimensional_object():
    x = DiffObject(F97, 4, Matrix.zeros(F97, 0, 0))
    assert dfn.parse_object(dfn.dump_object(x)) == x


@pytest.mark.parametrize(
    "text",
    [
        "",
        "dfn-object v2 field=Q n=2 dim=1\n0\n",
        "dfn-object v1 field=Q n=2\n0\n",
        "dfn-object v1 field=Q n=two dim=1\n0\n",
        "dfn-object v1 field=Q n=2 dim=-1\n",
        "dfn-object v1 field=4 n=2 dim=1\n0\n",
        "dfn-object v1 field=Q n=2 dim=2\n0 0\n",
        "dfn-object v1 field=Q n=2 dim=2\n0 0\n1\n",
        "dfn-object v1 field=Q n=2 dim=1\nx\n",
        "dfn-object v1 field=5 n=2 dim=1\n1/2\n",
        "dfn-object v1 field=Q n=2 dim=1\n1/0\n",
        "dfn-object v1 field=Q n=2 dim nope\n",
    ],
)
def test_malformed_objects(text):
    with pytest.raises(FormatError):
        dfn.parse_object(text)


def test_invalid_but_well_formed_object():
    with pytest.raises(NilpotencyError):
        dfn.parse_object("dfn-object v1 field=Q n=2 dim=1\n1\n")


@given(objects(max_dim=8))
def test_object_round_trip(xt):
    x, _ = xt
    assert dfn.parse_object(dfn.dump_object(x)) == x


@given(objects(max_dim=5), seeds)
def test_morphism_files_round_trip(tmp_path_factory, xt, seed):
    x, _ = xt
    d = tmp_path_factory.mktemp("mor")
    f = random_morphism(x, x, Xoshiro256(seed, "dfn", 0))
    paths = dfn.write_morphism_bundle(d / "f", f)
    assert dfn.read_morphism(paths["morphism"]) == f
    assert dfn.read_any(paths["src"]) == x


def test_morphism_references_are_relative(tmp_path):
    (tmp_path / "objs").mkdir()
    x = jordan_block(Q, 2, 2)
    xp = dfn.write_object(tmp_path / "objs" / "x.dfn", x)
    mp = dfn.write_morphism(tmp_path / "f.dfn", x.identity(), xp, xp)
    assert "src=objs/x.dfn" in mp.read_text()
    assert dfn.read_morphism(mp) == x.identity()


def test_morphism_errors(tmp_path):
    x = jordan_block(Q, 2, 2)
    xp = dfn.write_object(tmp_path / "x.dfn", x)
    bad = tmp_path / "bad.dfn"
    bad.write_text("dfn-morphism v1 field=Q n=2 rows=2 cols=2\nsrc=x.dfn\ndst=x.dfn\n1 0\n0 0\n")
    with pytest.raises(NotAMorphism):
        dfn.read_morphism(bad)
    bad.write_text("dfn-morphism v1 field=Q n=2 rows=2 cols=2\nsrc=x.dfn\n1 0\n0 1\n")
    with pytest.raises(FormatError):
        dfn.read_morphism(bad)
    bad.write_text("dfn-morphism v1 field=Q n=2 rows=2 cols=2\nsrc=x.dfn\ndst=missing.dfn\n1 0\n0 1\n")
    with pytest.raises(FormatError):
        dfn.read_morphism(bad)
    assert xp.exists()


def test_ses_files(tmp_path):
    x = jordan_block(F2, 3, 2)
    for build in (ses_proj, ses_inj):
        ses = build(x)
        a = dfn.write_object(tmp_path / "a.dfn", ses.a)
        b = dfn.write_object(tmp_path / "b.dfn", ses.b)
        c = dfn.write_object(tmp_path / "c.dfn", ses.c)
        i = dfn.write_morphism(tmp_path / "i.dfn", ses.i, a, b)
        p = dfn.write_morphism(tmp_path / "p.dfn", ses.p, b, c)
        s = dfn.write_ses(tmp_path / "s.dfn", ses, i, p)
        back = dfn.read_ses(s)
        assert back.i == ses.i and back.p == ses.p


def test_ses_not_exact(tmp_path):
    x = jordan_block(Q, 2, 2)
    xp = dfn.write_object(tmp_path / "x.dfn", x)
    dfn.write_morphism(tmp_path / "f.dfn", x.identity(), xp, xp)
    s = tmp_path / "s.dfn"
    s.write_text("dfn-ses v1\ni=f.dfn\np=f.dfn\n")
    with pytest.raises(NotExact):
        dfn.read_ses(s)
    s.write_text("dfn-ses v1\ni=f.dfn\n")
    with pytest.raises(FormatError):
        dfn.read_ses(s)


def test_read_errors(tmp_path):
    with pytest.raises(FormatError):
        dfn.read_any(tmp_path / "nope.dfn")
    junk = tmp_path / "junk.dfn"
    junk.write_bytes(b"\xff\xfe\x00")
    with pytest.raises(FormatError):
        dfn.read_any(junk)
    junk.write_text("hello\n")
    with pytest.raises(FormatError):
        dfn.read_any(junk)


def test_bundle_round_trip(tmp_path):
    x = jordan_block(Q, 3, 2)
    y = jordan_block(Q, 3, 3)
    f = DiffMorphism(x, y, M(Q, [[0, 0], [1, 0], [0, 1]]))
    text = dfn.dump_bundle({"X": x, "Y": y, "f": f})
    paths = dfn.split_bundle(text, tmp_path)
    assert [p.name for p in paths] == ["X.dfn", "Y.dfn", "f.dfn"]
    assert dfn.read_morphism(tmp_path / "f.dfn") == f


def test_bundle_requires_endpoints():
    x = jordan_block(Q, 2, 1)
    with pytest.raises(FormatError):
        dfn.dump_bundle({"f": x.identity()})


def test_split_bundle_stays_in_directory(tmp_path):
    (tmp_path / "inner").mkdir()
    paths = dfn.split_bundle("--- ../escape.dfn\ndfn-object v1 field=Q n=2 dim=0\n", tmp_path / "inner")
    assert paths == [tmp_path / "inner" / "escape.dfn"]
