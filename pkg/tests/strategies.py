"""Hypothesis strategies for admissible problems."""

from hypothesis import strategies as st

from subordination import validate


@st.composite
def problems(draw, max_terms=3, alpha_max=2.0):
    alpha = draw(st.floats(1.05, alpha_max))
    if draw(st.booleans()):
        alpha = min(alpha_max, 2.0)
    c = draw(st.floats(0.2, 5.0))
    m = draw(st.integers(0, max_terms))
    lo = max(alpha - 1.0, 0.05)
    orders = sorted(draw(st.lists(st.floats(lo, alpha - 0.05), min_size=m, max_size=m,
                                  unique=True)), reverse=True)
    orders = [a for i, a in enumerate(orders) if i == 0 or orders[i - 1] - a > 1e-3]
    coeffs = draw(st.lists(st.floats(0.1, 5.0), min_size=len(orders), max_size=len(orders)))
    return validate(alpha, c, list(zip(orders, coeffs)))
