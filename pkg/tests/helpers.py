"""Shared constants and hypothesis strategies for the test modules."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from diffn.exactla import FieldSpec, Matrix
from diffn.generators import random_diff_object_typed, random_invertible, random_matrix
from diffn.rng import Xoshiro256

# acceptance verdict lines, printed again in the terminal summary
ACCEPTANCE_KEY = pytest.StashKey[list]()

Q = FieldSpec.rationals()
F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)
F5 = FieldSpec.prime(5)
F97 = FieldSpec.prime(97)
FIELDS = [F2, F3, F5, F97, Q]


def M(field, rows, cols=None):
    return Matrix.from_rows(field, rows, cols=cols)


def plain(m: Matrix):
    """Entries as Python ints (GF(p)) or Fractions (Q), for the oracles."""
    if m.field.p is None:
        return [[Fraction(x) for x in row] for row in m.tolist()]
    return [[int(x) % m.field.p for x in row] for row in m.tolist()]


fields = st.sampled_from(FIELDS)
degrees = st.integers(min_value=2, max_value=4)
seeds = st.integers(min_value=0, max_value=2**64 - 1)


@st.composite
def objects(draw, field=None, n=None, max_dim=6):
    """A conjugated canonical object with its Jordan type."""
    field = field or draw(fields)
    n = n or draw(degrees)
    rng = Xoshiro256(draw(seeds), "hypothesis", 0)
    return random_diff_object_typed(rng, field, n, max_dim)


@st.composite
def matrices(draw, field=None, max_rows=5, max_cols=5):
    field = field or draw(fields)
    rows = draw(st.integers(0, max_rows))
    cols = draw(st.integers(0, max_cols))
    rng = Xoshiro256(draw(seeds), "hypothesis-matrix", 0)
    return random_matrix(rng, field, rows, cols)


@st.composite
def invertibles(draw, field=None, max_dim=5):
    field = field or draw(fields)
    d = draw(st.integers(1, max_dim))
    return random_invertible(Xoshiro256(draw(seeds), "hypothesis-inv", 0), field, d)
