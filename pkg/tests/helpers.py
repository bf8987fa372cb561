"""Small diagram builders shared by the test modules."""

from spidercalc.diagram import black_spider, cap, compose, cup, identity, tensor, tensor_all, white_spider


def theta():
    """Black and white 4-valent vertices joined by four parallel edges."""
    return compose(white_spider(4, 0), black_spider(0, 4))


def snake():
    return compose(tensor(identity(1), cap()), tensor(cup(), identity(1)))


def nested_cup():
    """(0, 4) pairing legs 0-3 and 1-2."""
    return compose(tensor_all([identity(1), cup(), identity(1)]), cup())


def closure(f):
    """Trace of a (2, 2) diagram, closed with nested caps."""
    from spidercalc.diagram import dagger

    return compose(dagger(nested_cup()), compose(tensor(identity(2), f), nested_cup()))
