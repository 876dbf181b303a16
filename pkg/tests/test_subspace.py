from math import comb, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_sector, small_sectors
from dickeprep.errors import BasisMismatch, DimensionCap, InvalidArgs, NotInSector
from dickeprep.subspace import (
    dicke_state,
    embed_state,
    enumerate_sector,
    parse_pattern,
    product_state,
    sector_dimension,
)


@pytest.mark.parametrize("n,m,dim", [(6, 2, 22), (1, 0, 1), (4, 2, 11)])
def test_sector_dimension_examples(n, m, dim):
    assert enumerate_sector(n, m).dim == dim


def test_empty_sector_single_state():
    b = enumerate_sector(1, 0)
    assert b.states[0].ions == 0 and b.states[0].phonons == 0


@pytest.mark.parametrize("n,m", small_sectors(8))
def test_dimension_matches_brute_force(n, m):
    b = enumerate_sector(n, m)
    brute = brute_force_sector(n, m)
    assert b.dim == len(brute) == sector_dimension(n, m)
    assert sorted((s.ions, s.phonons) for s in b.states) == sorted(brute)
    for mu in range(m + 1):
        sl = b.manifold_slice(mu)
        assert sl.stop - sl.start == comb(n, m - mu)


def test_ordering_descending_phonons_then_ascending_pattern():
    b = enumerate_sector(4, 2)
    keys = [(-s.phonons, s.ions) for s in b.states]
    assert keys == sorted(keys)
    assert (b.states[0].ions, b.states[0].phonons) == (0, 2)
    assert all(s.excitations == 2 for s in b.states)


def test_invalid_and_capped():
    with pytest.raises(InvalidArgs, match="excitations must not exceed ions"):
        enumerate_sector(2, 3)
    with pytest.raises(InvalidArgs):
        enumerate_sector(0, 0)
    with pytest.raises(DimensionCap):
        enumerate_sector(20, 10)
    with pytest.raises(DimensionCap):
        enumerate_sector(6, 2, cap=21)


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))))
@settings(max_examples=40, deadline=None)
def test_index_round_trip(nm):
    b = enumerate_sector(*nm)
    for i, s in enumerate(b.states):
        assert b.index_of(s.ions, s.phonons) == i
        assert b.state_at(i) == s


def test_dicke_examples():
    b = enumerate_sector(2, 1)
    w = dicke_state(b, 1)
    assert w.amplitudes[b.index_of(0b01, 0)] == pytest.approx(1 / sqrt(2))
    assert w.amplitudes[b.index_of(0b10, 0)] == pytest.approx(1 / sqrt(2))
    assert abs(w.amplitudes[b.index_of(0, 1)]) == 0

    b6 = enumerate_sector(6, 2)
    w6 = dicke_state(b6, 2)
    nz = w6.amplitudes[np.abs(w6.amplitudes) > 0]
    assert len(nz) == 15
    np.testing.assert_allclose(nz, 1 / sqrt(15), rtol=0, atol=1e-15)

    w0 = dicke_state(b6, 0)
    assert w0.amplitudes[0] == 1 and np.count_nonzero(w0.amplitudes) == 1

    with pytest.raises(InvalidArgs):
        dicke_state(b6, 3)


@given(
    st.integers(2, 6).flatmap(
        lambda n: st.tuples(st.just(n), st.integers(0, n), st.permutations(list(range(n))))
    )
)
@settings(max_examples=40, deadline=None)
def test_dicke_is_permutation_symmetric(args):
    n, m, perm = args
    b = enumerate_sector(n, m)
    for k in range(m + 1):
        w = dicke_state(b, k)
        np.testing.assert_array_equal(w.permuted(perm).amplitudes, w.amplitudes)
        assert w.norm == pytest.approx(1.0, abs=1e-15)


def test_product_state_examples():
    b = enumerate_sector(6, 2)
    psi = product_state(b, "110000", 0)
    i = b.index_of(0b000011, 0)
    assert psi.amplitudes[i] == 1 and np.count_nonzero(psi.amplitudes) == 1
    assert product_state(b, (1, 1, 0, 0, 0, 0), 0).amplitudes[i] == 1

    fock = product_state(b, 0, 2)
    assert fock.amplitudes[0] == 1

    with pytest.raises(NotInSector):
        product_state(enumerate_sector(2, 1), 0b11, 0)


def test_parse_pattern_reads_ion_one_first():
    assert parse_pattern("1000", 4) == 0b0001
    assert parse_pattern("|0,0,1,1>", 4) == 0b1100
    with pytest.raises(InvalidArgs):
        parse_pattern("101", 4)


def test_state_vector_shape_checked():
    b = enumerate_sector(3, 1)
    from dickeprep.subspace import StateVector

    with pytest.raises(BasisMismatch):
        StateVector(b, np.zeros(3))


def test_embed_places_spectators_in_ground():
    small = enumerate_sector(2, 2)
    big = enumerate_sector(5, 2)
    psi = embed_state(product_state(small, 0b11, 0), big)
    assert psi.amplitudes[big.index_of(0b00011, 0)] == 1
    psi = embed_state(product_state(small, 0b01, 1), big, ion_slots=[3, 4])
    assert psi.amplitudes[big.index_of(0b01000, 1)] == 1
