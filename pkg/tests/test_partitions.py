import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spidercalc.partitions import (
    Pairing,
    SetPartition,
    catalan,
    compose_partitions,
    enumerate_nc_pairings,
    enumerate_nc_partitions,
    fatten,
    identity_partition,
    is_noncrossing,
    partition_tensor,
    split,
)


def _all_partitions(points):
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for part in _all_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _crosses(blocks):
    for a, b in itertools.permutations(blocks, 2):
        for w, y in itertools.combinations(a, 2):
            if any(w < x < y for x in b) and any(x < w or x > y for x in b):
                return True
    return False


def _brute_nc(m, pairs_only=False):
    out = set()
    for part in _all_partitions(list(range(m))):
        if pairs_only and any(len(b) != 2 for b in part):
            continue
        if not _crosses(part):
            out.add(tuple(sorted(tuple(sorted(b)) for b in part)))
    return out


def _blocks(ps):
    return {p.blocks for p in ps}


def test_catalan_values():
    assert [catalan(k) for k in range(6)] == [1, 1, 2, 5, 14, 42]
    with pytest.raises(ValueError):
        catalan(-1)


@pytest.mark.parametrize("m", range(9))
def test_nc_partitions_against_brute_force(m):
    ps = enumerate_nc_partitions(m)
    assert len(ps) == catalan(m)
    assert _blocks(ps) == _brute_nc(m)


@pytest.mark.parametrize("m", range(9))
def test_nc_pairings_against_brute_force(m):
    ps = enumerate_nc_pairings(m)
    assert len(ps) == (catalan(m // 2) if m % 2 == 0 else 0)
    assert _blocks(ps) == _brute_nc(m, pairs_only=True)


def test_four_points_miss_only_the_crossing():
    assert len(enumerate_nc_partitions(4)) == 14
    assert ((0, 2), (1, 3)) not in _blocks(enumerate_nc_partitions(4))


def test_is_noncrossing_examples():
    assert is_noncrossing(SetPartition(4, 0, ((0, 1), (2, 3))))
    assert not is_noncrossing(SetPartition(4, 0, ((0, 2), (1, 3))))
    assert is_noncrossing(identity_partition(2))
    # boundary order reads the upper row backwards, so nested strands do not cross
    assert is_noncrossing(SetPartition.from_labels(2, 2, [["L1", "U1"], ["L2", "U2"]]))
    assert not is_noncrossing(SetPartition.from_labels(2, 2, [["L1", "U2"], ["L2", "U1"]]))


def _labels(p):
    return sorted(sorted(b) for b in p.labelled_blocks())


def test_fatten_examples():
    assert fatten(identity_partition(1)).blocks == identity_partition(2).blocks
    fork = SetPartition(2, 1, ((0, 1, 2),))
    assert _labels(fatten(fork)) == [["L1", "U1"], ["L2", "L3"], ["L4", "U2"]]
    eta = SetPartition(0, 1, ((0,),))
    assert _labels(fatten(eta)) == [["U1", "U2"]]
    with pytest.raises(ValueError):
        fatten(SetPartition(4, 0, ((0, 2), (1, 3))))


@pytest.mark.parametrize("m", range(7))
def test_fatten_injective_into_nc_pairings(m):
    images = set()
    for p in enumerate_nc_partitions(m):
        for k in range(m + 1):
            q = split(p, k)
            f = fatten(q)
            assert isinstance(f, Pairing) and is_noncrossing(f)
            assert (f.n_lower, f.n_upper) == (2 * k, 2 * (m - k))
            images.add((k, f.blocks))
    assert len(images) == (m + 1) * catalan(m)


def test_partition_tensor_examples():
    assert np.array_equal(partition_tensor(identity_partition(1), 3).matrix(), np.eye(3))
    pair = partition_tensor(SetPartition(0, 2, ((0, 1),)), 2)
    assert np.array_equal(pair.entries, np.eye(2))
    fork = partition_tensor(SetPartition(2, 1, ((0, 1, 2),)), 2).entries
    for i, j, k in itertools.product(range(2), repeat=3):
        assert fork[i, j, k] == (i == j == k)


def _small_partitions(k, l):
    for p in enumerate_nc_partitions(k + l):
        yield split(p, k)


@pytest.mark.parametrize("N", [2, 3])
def test_partition_tensor_respects_composition(N):
    for j, k, l in itertools.product(range(3), range(1, 4), range(3)):
        if j + k > 4 or k + l > 4:
            continue
        for q in _small_partitions(j, k):
            for p in _small_partitions(k, l):
                r, closed = compose_partitions(p, q)
                lhs = partition_tensor(p, N).compose(partition_tensor(q, N))
                assert lhs == partition_tensor(r, N).scaled(N ** closed)


@given(st.integers(0, 8).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, m))))
def test_split_keeps_noncrossing(mk):
    m, k = mk
    for p in enumerate_nc_partitions(m):
        assert is_noncrossing(split(p, k))


def test_dict_round_trip():
    p = SetPartition(2, 1, ((0, 2), (1,)))
    assert SetPartition.from_dict(p.to_dict()) == p
