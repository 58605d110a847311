from hypothesis import strategies as st


@st.composite
def minimal_inputs(draw, max_points=6, start=10.0, min_gap=0.2, max_gap=3.0):
    """Strictly increasing t with gaps in [min_gap, max_gap] and one 0/1 label per interval."""
    l = draw(st.integers(min_value=2, max_value=max_points))
    t0 = draw(st.floats(min_value=-start, max_value=start))
    gaps = draw(st.lists(st.floats(min_value=min_gap, max_value=max_gap), min_size=l - 1, max_size=l - 1))
    t = [t0]
    for g in gaps:
        t.append(t[-1] + g)
    labels = draw(st.lists(st.integers(min_value=0, max_value=1), min_size=l - 1, max_size=l - 1))
    return tuple(t), tuple(labels)
