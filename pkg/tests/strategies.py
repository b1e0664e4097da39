from fractions import Fraction

from hypothesis import strategies as st

from okounkov.exact import GroupOrder, Polynomial


def exponents(n, lo=-3, hi=3):
    return st.tuples(*[st.integers(lo, hi)] * n)


def coefficients():
    return st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))


def polynomials(n, max_terms=4, lo=-3, hi=3):
    return st.dictionaries(exponents(n, lo, hi), coefficients(), max_size=max_terms).map(
        lambda t: Polynomial(n, t))


def nonzero_polynomials(n, max_terms=4, lo=-3, hi=3):
    return polynomials(n, max_terms, lo, hi).filter(lambda f: not f.is_zero())


def orders(n):
    return st.one_of(st.just(GroupOrder("lex")), st.just(GroupOrder("grlex")),
                     st.tuples(*[st.integers(-3, 3)] * n).map(lambda w: GroupOrder("weighted", w)))
