from hypothesis import given, strategies as st

from cliquefactor.rng import derive_seed, stream


@given(st.integers(0, 2**40), st.text(min_size=1, max_size=8))
def test_streams_are_reproducible(seed, name):
    a = stream(seed, name).random(4)
    b = stream(seed, name).random(4)
    assert (a == b).all()


def test_named_streams_differ():
    assert stream(1, "a").random() != stream(1, "b").random()
    assert stream(1, "a", 0).random() != stream(1, "a", 1).random()
    assert derive_seed(5, "x") == derive_seed(5, "x") != derive_seed(6, "x")
