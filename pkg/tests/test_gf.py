from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twounicastz import gf
from twounicastz.gf import FieldConfig, FieldMatrix


def fm(rows, p):
    return FieldMatrix(np.array(rows, dtype=np.int64), p)


def test_field_config_rejects_composite():
    with pytest.raises(ValueError):
        FieldConfig(65520)
    assert FieldConfig().p == 65521


def test_rank_examples():
    assert gf.rank(FieldMatrix.identity(3, 7)) == 3
    assert gf.rank(FieldMatrix.zeros(2, 2, 7)) == 0
    assert gf.rank(fm([[1, 1], [1, 1]], 2)) == 1


def test_rank_empty():
    assert gf.rank(FieldMatrix.zeros(0, 3, 5)) == 0
    assert gf.rank(FieldMatrix.zeros(3, 0, 5)) == 0


def test_nullspace_examples():
    b = gf.nullspace_basis(fm([[1, 1]], 2))
    assert b.cols == 1 and b.column(0).entries == (1, 1)
    assert gf.nullspace_basis(fm([[1, 2], [3, 4]], 5)).cols == 0
    b = gf.nullspace_basis(fm([[1, 1, 1], [0, 1, 2]], 5))
    assert b.cols == 1
    v = np.array(b.column(0).entries)
    # basis vector is a nonzero multiple of (1, 3, 1)
    c = v[0]
    assert c != 0 and tuple(v) == tuple((c * np.array([1, 3, 1])) % 5)


def test_in_colspan_examples():
    assert gf.in_colspan(FieldMatrix.identity(2, 5), FieldMatrix([1, 2], 5))
    assert not gf.in_colspan(FieldMatrix([1, 0], 5), FieldMatrix([0, 1], 5))
    assert gf.in_colspan(fm([[1, 1], [1, 2]], 5), FieldMatrix([4, 0], 5))


def test_in_colspan_shape_mismatch():
    with pytest.raises(ValueError):
        gf.in_colspan(FieldMatrix.identity(2, 5), FieldMatrix([1, 2, 3], 5))


def test_random_column_examples():
    rng = np.random.default_rng(0)
    assert gf.random_column(0, rng, 7).shape == (0, 1)
    a = gf.random_column(3, np.random.default_rng(42), 65521)
    b = gf.random_column(3, np.random.default_rng(42), 65521)
    assert a == b
    draws = gf.random_matrix(10_000, 1, np.random.default_rng(3), 65521).array
    assert abs(draws.mean() - 65520 / 2) / (65520 / 2) < 0.02


def test_mul_examples():
    a = fm([[1, 2], [3, 4]], 5)
    assert gf.mul(a, FieldMatrix.identity(2, 5)) == a
    assert gf.mul(a, FieldMatrix.zeros(2, 2, 5)).is_zero()
    assert gf.mul(a, fm([[1], [1]], 5)).entries == (3, 2)


def test_mul_large_entries_do_not_overflow():
    p = 65521
    a = FieldMatrix(np.full((3, 500), p - 1), p)
    b = FieldMatrix(np.full((500, 2), p - 1), p)
    assert gf.mul(a, b).entries == ((500 % p),) * 6


def test_inv_unitriangular_examples():
    p = 11
    assert gf.inv_unitriangular(FieldMatrix.identity(4, p)) == FieldMatrix.identity(4, p)
    assert gf.inv_unitriangular(fm([[1, 3], [0, 1]], p)) == fm([[1, -3], [0, 1]], p)
    with pytest.raises(ValueError):
        gf.inv_unitriangular(fm([[2, 0], [0, 1]], p))


def test_inv_unitriangular_round_trip():
    rng = np.random.default_rng(5)
    p = 65521
    for _ in range(5):
        u = np.triu(rng.integers(0, p, size=(6, 6)), 1) + np.eye(6, dtype=np.int64)
        u = FieldMatrix(u, p)
        assert gf.mul(u, gf.inv_unitriangular(u)) == FieldMatrix.identity(6, p)


def test_field_mismatch_raises():
    with pytest.raises(ValueError):
        gf.mul(FieldMatrix.identity(2, 5), FieldMatrix.identity(2, 7))


def test_field_matrix_is_read_only():
    m = FieldMatrix.identity(2, 5)
    with pytest.raises(ValueError):
        m.array[0, 0] = 3


primes = st.sampled_from([2, 3, 5, 65521])


@st.composite
def matrices(draw, max_dim=5):
    p = draw(primes)
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return FieldMatrix(np.array(vals, dtype=np.int64).reshape(r, c), p)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    assert gf.rank(m) + gf.nullspace_basis(m).cols == m.cols


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_nullspace_vectors_are_annihilated(m):
    basis = gf.nullspace_basis(m)
    assert gf.mul(m, basis).is_zero()
    assert gf.rank(basis) == basis.cols


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_of_transpose(m):
    assert gf.rank(m) == gf.rank(m.T)


@settings(max_examples=100, deadline=None)
@given(matrices(), st.integers(0, 2**32))
def test_combinations_of_columns_lie_in_colspan(m, seed):
    c = gf.random_column(m.cols, np.random.default_rng(seed), m.p)
    assert gf.in_colspan(m, gf.mul(m, c))
