import numpy as np
import pytest

from metatfr.grid import Field, Grid, hermite, tensor_product
from metatfr.io import (
    ParseError,
    read_field,
    read_matrix,
    word_from_json,
    word_to_json,
    write_field,
    write_matrix,
    write_pgm,
)
from metatfr.symplectic import random_symplectic, random_word


@pytest.mark.parametrize("vars_", [1, 2])
def test_field_round_trip(tmp_path, rng, vars_):
    g = Grid(16, vars_)
    f = Field(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    write_field(tmp_path / "f.csv", f)
    back = read_field(tmp_path / "f.csv")
    assert back.grid == g
    assert np.array_equal(back.values, f.values)
    assert (tmp_path / "f.csv").read_text().startswith(f"# field vars={vars_} N=16\n0,")


def test_matrix_round_trip(tmp_path):
    A = random_symplectic(4, 2)
    write_matrix(tmp_path / "a.csv", A)
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == "# symplectic D=2"
    assert np.array_equal(read_matrix(tmp_path / "a.csv"), A)


def test_word_round_trip():
    w = random_word(9, 2, 5)
    back = word_from_json(word_to_json(w))
    assert [f.kind for f in back] == [f.kind for f in w]
    assert np.array_equal(back.matrix(), w.matrix())


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("# field vars=1\n", 1),
        ("# field vars=1 N=16\n0,1,0\n1,x,0\n", 3),
        ("# field vars=1 N=16\n0,1,0\n2,1,0\n", 3),
        ("# field vars=1 N=16\n0,1\n", 2),
        ("# field vars=1 N=16\n0,1,0\n", 3),
        ("# field vars=1 N=15\n", 1),
    ],
)
def test_field_parse_errors(tmp_path, text, line):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ParseError) as info:
        read_field(p)
    assert info.value.line == line
    assert f"bad.csv:{line}:" in str(info.value)


def test_matrix_parse_errors(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("# symplectic D=1\n1,0\n0\n")
    with pytest.raises(ParseError) as info:
        read_matrix(p)
    assert info.value.line == 3


def test_pgm(tmp_path):
    g = Grid(16)
    write_pgm(tmp_path / "x.pgm", tensor_product(hermite(0, g), hermite(1, g)))
    data = (tmp_path / "x.pgm").read_bytes()
    assert data.startswith(b"P5\n16 16\n255\n")
    assert len(data) == len(b"P5\n16 16\n255\n") + 256
