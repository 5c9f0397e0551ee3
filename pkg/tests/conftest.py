import numpy as np
import pytest

from codecselect import BoundMethod, ConfidenceRectangle


def make_rect(intervals, codecs=None, criteria=None, delta=0.05, method=BoundMethod.HOEFFDING_UNION):
    """Rectangle from ``{(h, c): (lo, hi)}``."""
    codecs = codecs or list(dict.fromkeys(h for h, _ in intervals))
    criteria = criteria or list(dict.fromkeys(c for _, c in intervals))
    lo = np.array([[intervals[h, c][0] for c in criteria] for h in codecs])
    hi = np.array([[intervals[h, c][1] for c in criteria] for h in codecs])
    return ConfidenceRectangle(codecs, criteria, lo, hi, delta, method)


@pytest.fixture
def rect_factory():
    return make_rect
