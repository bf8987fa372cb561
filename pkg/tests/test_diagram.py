import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spidercalc import diagram as dg
from spidercalc.diagram import (
    BLACK,
    WHITE,
    DiagramFormatError,
    Prefactor,
    black_spider,
    canonical_code,
    cap,
    compose,
    crossing,
    cup,
    dagger,
    euler_counts,
    faces,
    identity,
    region_coloring_pair,
    tensor,
    white_spider,
)
from spidercalc.partitions import SetPartition, catalan
from spidercalc.rewrite import reduced_states

from helpers import snake, theta


def same(a, b):
    return canonical_code(a) == canonical_code(b)


def test_generators():
    i = identity(1)
    assert (i.n_lower, i.n_upper, i.edges) == (1, 1, ((("L", 0), ("U", 0)),))
    b = black_spider(2, 1)
    assert [v.color for v in b.vertices] == [BLACK] and b.vertices[0].degree == 3
    assert b.slot == (2, 1)
    c = cup()
    assert (c.n_lower, c.n_upper, len(c.edges)) == (0, 2, 1)
    assert not crossing().planar
    assert black_spider(0, 0).vertices[0].degree == 0


def test_compose_and_tensor_basics():
    assert compose(cap(), cup()).loops == 1
    assert same(compose(identity(2), black_spider(2, 2)), black_spider(2, 2))
    assert same(compose(black_spider(2, 2), identity(2)), black_spider(2, 2))
    assert same(tensor(identity(1), identity(1)), identity(2))
    assert same(snake(), identity(1))
    with pytest.raises(ValueError):
        compose(cup(), cup())
    assert not compose(crossing(), identity(2)).planar


def test_dagger():
    for k in range(4):
        for l in range(4):
            assert same(dagger(black_spider(k, l)), black_spider(l, k))
    assert same(dagger(cup()), cap())
    d = dg.with_prefactor(black_spider(1, 2), Prefactor(3, -1))
    assert dagger(d).prefactor == Prefactor(3, -1)


def _words(seed, n_ops=6):
    rng = random.Random(seed)
    gens = [lambda: black_spider(rng.randint(0, 2), rng.randint(0, 2)),
            lambda: white_spider(rng.randint(0, 2), rng.randint(0, 2)),
            cup, cap, lambda: identity(1)]
    d = rng.choice(gens)()
    for _ in range(n_ops):
        g = rng.choice(gens)()
        if rng.random() < 0.5 and g.n_lower == d.n_upper:
            d = compose(g, d)
        elif rng.random() < 0.2:
            d = dagger(d)
        elif d.n_lower + d.n_upper + g.n_lower + g.n_upper <= 8:
            d = tensor(d, g) if rng.random() < 0.5 else tensor(g, d)
    return d


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_category_laws_on_words(seed):
    d = _words(seed)
    assert d == dagger(dagger(d))
    assert same(compose(identity(d.n_upper), d), d)
    assert same(compose(d, identity(d.n_lower)), d)
    e, f = _words(seed + 1, 2), _words(seed + 2, 2)
    assert same(tensor(tensor(d, e), f), tensor(d, tensor(e, f)))
    counts = euler_counts(d)
    # every component, traced on its own, is a sphere
    assert counts["V"] - counts["E"] + counts["F"] == 2 * counts["components"]


def test_faces_examples():
    assert len(faces(identity(1))) == 2
    assert len(faces(compose(cap(), cup()))) == 2
    assert len(faces(theta())) == 4
    with pytest.raises(ValueError):
        faces(crossing())


def test_euler_on_theta():
    c = euler_counts(theta())
    assert (c["V"], c["E"], c["F"]) == (2, 4, 4)


def _pair(d):
    return tuple(sorted(sorted(b) for b in p.labelled_blocks()) for p in region_coloring_pair(d))


def test_region_coloring_examples():
    assert _pair(identity(2)) == ([["L1", "U1"]], [["L1", "U1"]])
    assert _pair(black_spider(2, 2)) == ([["L1", "U1"]], [["L1"], ["U1"]])
    assert _pair(white_spider(2, 2)) == ([["L1"], ["U1"]], [["L1", "U1"]])


def test_region_coloring_rejects():
    with pytest.raises(ValueError):
        region_coloring_pair(black_spider(1, 2))
    with pytest.raises(ValueError):
        region_coloring_pair(black_spider(1, 1))
    with pytest.raises(ValueError):
        region_coloring_pair(crossing())


def test_region_coloring_injective_on_small_states():
    states = reduced_states(4)
    for n, ds in states.items():
        if n % 2:
            continue
        images = {tuple(p.blocks for p in region_coloring_pair(d)) for d in ds}
        assert len(images) == len(ds) == catalan(n // 2) ** 2


def test_text_round_trip():
    d = compose(white_spider(2, 1), dg.with_prefactor(black_spider(1, 2), Prefactor(-2, 3)))
    back = dg.from_text(dg.to_text(d))
    assert back == d
    assert dg.from_record(dg.to_record(crossing())) == crossing()


@pytest.mark.parametrize("text", [
    "not json",
    '{"n_lower": 0}',
    '{"n_lower": 0, "n_upper": 1, "vertices": [], "edges": []}',
    '{"n_lower": 0, "n_upper": 0, "vertices": [], "edges": [], "prefactor": "x"}',
])
def test_text_rejects_bad_input(text):
    with pytest.raises(DiagramFormatError):
        dg.from_text(text)


def test_prefactor_parse():
    assert Prefactor.parse("3/4 * sqrtN^-3") == Prefactor(Fraction(3, 4), -3)
    assert Prefactor.parse(str(Prefactor(3, -3))) == Prefactor(3, -3)
    assert Prefactor(1, -2).at(4) == Prefactor(1, 0).at(4) / 4
