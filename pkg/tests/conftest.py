import pytest
from hypothesis import HealthCheck, settings, strategies as st

from dvfourfold.exactfield import GF, QQ, Matrix, make_rng

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

F101 = GF(101)
F10007 = GF(10007)

small_q = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def gf_elems(p):
    return st.integers(min_value=0, max_value=p - 1)


@st.composite
def matrices(draw, field, nrows, ncols):
    elem = small_q if field is QQ else gf_elems(field.modulus)
    rows = [[field(draw(elem)) for _ in range(ncols)] for _ in range(nrows)]
    return Matrix.from_rows(rows, field, ncols)


@pytest.fixture
def rng():
    return make_rng(12345)
