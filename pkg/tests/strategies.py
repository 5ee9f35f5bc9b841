"""Shared hypothesis strategies."""
from fractions import Fraction

from hypothesis import strategies as st

from robustorbits.exactlinalg.gaussian import GaussianRational


def rationals(max_num=30, max_den=12):
    return st.builds(Fraction, st.integers(-max_num, max_num), st.integers(1, max_den))


def positive_rationals(max_num=30, max_den=12):
    return st.builds(Fraction, st.integers(1, max_num), st.integers(1, max_den))


def int_matrices(rows, cols, bound=5):
    return st.lists(st.lists(st.integers(-bound, bound), min_size=cols, max_size=cols),
                    min_size=rows, max_size=rows)


@st.composite
def matrices(draw, max_rows=4, max_cols=4, bound=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return draw(int_matrices(r, c, bound))


def nonzero_gaussians(max_num=6, max_den=4):
    return st.builds(
        lambda a, b, c, d: GaussianRational(Fraction(a, b), Fraction(c, d)),
        st.integers(-max_num, max_num), st.integers(1, max_den),
        st.integers(-max_num, max_num), st.integers(1, max_den),
    ).filter(lambda z: bool(z))
