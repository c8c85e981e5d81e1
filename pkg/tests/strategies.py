"""Hypothesis strategies for small hypothesis classes and traces."""
from hypothesis import strategies as st

from aol.core import HypothesisClass


@st.composite
def classes(draw, max_instances=3, max_labels=3, max_size=4):
    nx = draw(st.integers(1, max_instances))
    ny = draw(st.integers(1, max_labels))
    row = st.tuples(*[st.integers(0, (1 << ny) - 1)] * nx).filter(any)
    rows = draw(st.lists(row, min_size=1, max_size=max_size, unique=True))
    return HypothesisClass.from_masks(nx, ny, rows)


@st.composite
def class_and_trace(draw, max_len=4, **kw):
    """A class with a trace compatible with one of its hypotheses."""
    H = draw(classes(**kw))
    h = draw(st.integers(0, len(H) - 1))
    row = H.table[h]
    xs = [x for x in range(H.num_instances) if row[x]]
    n = draw(st.integers(0, max_len))
    trace = []
    for _ in range(n):
        x = draw(st.sampled_from(xs))
        ys = [y for y in range(H.num_labels) if row[x] >> y & 1]
        trace.append((x, draw(st.sampled_from(ys))))
    return H, h, tuple(trace)
