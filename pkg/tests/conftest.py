import pytest

from hatlab import make_context


@pytest.fixture(scope="session")
def ctx256():
    return make_context(256, 32)


@pytest.fixture(scope="session")
def ctx512():
    return make_context(512, 64)


def ulp(ctx, k=1):
    """k units in the last place at unit scale."""
    return ctx.mp.ldexp(k, -ctx.bits)
