import math

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from specpoint.core import (
    DiniQuad,
    NEG_INF,
    POS_INF,
    PreconditionError,
    RealIntervalSet,
    UnsupportedError,
)
from specpoint.dini import dini_estimate, dini_exact, point_spectrum_1d, spectrum_1d
from specpoint.maps import black_box, builtin

INF = POS_INF


def abs_map():
    return black_box(
        1,
        lambda x: np.abs(np.asarray(x, dtype=float)),
        name="abs",
        dini_exact=lambda p: DiniQuad(-1.0, -1.0, 1.0, 1.0)
        if p == 0
        else DiniQuad(*(math.copysign(1.0, p),) * 4),
    )


# ---------------------------------------------------------------------------
# exact quadruples


def test_exact_quads_at_zero():
    assert dini_exact(builtin("sqrt_abs"), 0.0).as_tuple() == (-INF, -INF, INF, INF)
    assert dini_exact(builtin("signed_sqrt_abs"), 0.0).as_tuple() == (INF,) * 4
    assert dini_exact(builtin("sqrt_abs_sin_inv"), 0.0).as_tuple() == (
        -INF,
        INF,
        -INF,
        INF,
    )
    assert dini_exact(builtin("xsq_sin_inv"), 0.0).as_tuple() == (0.0,) * 4


def test_exact_abs_quad():
    assert dini_exact(abs_map(), 0.0).as_tuple() == (-1.0, -1.0, 1.0, 1.0)


def test_exact_requires_provider():
    bare = black_box(1, lambda x: np.asarray(x, dtype=float), name="bare")
    with pytest.raises(UnsupportedError):
        dini_exact(bare, 0.0)


def test_exact_requires_1d():
    with pytest.raises(PreconditionError):
        dini_exact(builtin("abs_re_plus_i_im"), 0.0)


# ---------------------------------------------------------------------------
# numerical estimates


def test_estimate_sqrt_abs_flags_spec_grid():
    # oracle: the exact quadruple; the quotient 1/sqrt(h) crosses the threshold
    est = dini_estimate(builtin("sqrt_abs"), 0.0, h0=0.1, ratio=0.5, steps=40)
    assert est.quad.as_tuple() == (-INF, -INF, INF, INF)
    assert all(est.flagged)


def test_estimate_xsq_sin_inv_bounded():
    # analytic oracle: |quotient| = |h sin(1/h)| <= h, so the tail h bounds it
    est = dini_estimate(builtin("xsq_sin_inv"), 0.0, h0=0.1, ratio=0.5, steps=40)
    vals = est.quad.as_tuple()
    assert all(abs(v) <= 2e-2 for v in vals)
    assert all(abs(v) <= est.tail_h[1] * (1.0 + 1e-12) for v in vals)
    assert not any(est.flagged)


def test_estimate_linear_slope():
    # quotients are exactly 3 in real arithmetic; in floats the subtraction
    # f(p+h) - f(p) loses eps*|f(p)|/h, so the grid must not go below ~1e-5
    f = black_box(1, lambda x: 3.0 * np.asarray(x, dtype=float), name="3x")
    est = dini_estimate(f, 5.0, h0=0.1, ratio=0.5, steps=12)
    assert all(abs(v - 3.0) <= 1e-10 for v in est.quad.as_tuple())
    est_deep = dini_estimate(f, 5.0)
    assert all(abs(v - 3.0) <= 0.5 for v in est_deep.quad.as_tuple())


def test_estimate_matches_exact_on_catalogue():
    # module invariant: finite components within 1e-6, all divergence flags equal
    for name in ("sqrt_abs", "signed_sqrt_abs", "sqrt_abs_sin_inv", "xsq_sin_inv"):
        f = builtin(name)
        exact = dini_exact(f, 0.0).as_tuple()
        est = dini_estimate(f, 0.0, h0=0.1, ratio=0.6, steps=60).quad.as_tuple()
        for e, a in zip(exact, est):
            if math.isinf(e):
                assert a == e, name
            else:
                assert abs(a - e) <= 1e-6, name


def test_estimate_abs_exact_quotients():
    est = dini_estimate(abs_map(), 0.0)
    assert est.quad.as_tuple() == (-1.0, -1.0, 1.0, 1.0)


def test_estimate_preconditions():
    f = builtin("sqrt_abs")
    with pytest.raises(PreconditionError):
        dini_estimate(f, 0.0, h0=-1.0)
    with pytest.raises(PreconditionError):
        dini_estimate(f, 0.0, ratio=1.5)
    with pytest.raises(PreconditionError):
        dini_estimate(f, 0.0, steps=4)
    with pytest.raises(PreconditionError):
        dini_estimate(builtin("abs_re_plus_i_im"), 0.0)


def test_estimate_threshold_configurable():
    # a steep but finite slope must not be flagged with a higher threshold
    f = black_box(1, lambda x: 1e7 * np.asarray(x, dtype=float), name="steep")
    est = dini_estimate(f, 0.0, divergence_threshold=1e6)
    assert est.quad.d_plus_high == INF
    est2 = dini_estimate(f, 0.0, divergence_threshold=1e9)
    assert abs(est2.quad.d_plus_high - 1e7) < 1.0


# ---------------------------------------------------------------------------
# interval extraction


def test_spectrum_examples():
    assert spectrum_1d(DiniQuad(-INF, -INF, INF, INF)) == RealIntervalSet.reals()
    assert spectrum_1d(DiniQuad(INF, INF, INF, INF)).is_empty
    assert spectrum_1d(DiniQuad(0.0, 0.0, 0.0, 0.0)) == RealIntervalSet.point(0.0)


def test_point_spectrum_examples():
    assert point_spectrum_1d(DiniQuad(-INF, -INF, INF, INF)).is_empty
    assert point_spectrum_1d(DiniQuad(-INF, INF, -INF, INF)) == RealIntervalSet.reals()
    # derived: |x| quadruple gives two singletons, contained in sigma = [-1, 1]
    sig = spectrum_1d(DiniQuad(-1.0, -1.0, 1.0, 1.0))
    pts = point_spectrum_1d(DiniQuad(-1.0, -1.0, 1.0, 1.0))
    assert pts == RealIntervalSet.from_pairs([(-1, -1), (1, 1)])
    assert sig == RealIntervalSet.from_pairs([(-1, 1)])
    for lo, hi in pts.intervals:
        assert sig.contains(lo) and sig.contains(hi)


endpoint = st.one_of(
    st.floats(min_value=-100, max_value=100, allow_nan=False),
    st.just(POS_INF),
    st.just(NEG_INF),
)


@st.composite
def quads(draw):
    a, b = sorted([draw(endpoint), draw(endpoint)])
    c, d = sorted([draw(endpoint), draw(endpoint)])
    return DiniQuad(a, b, c, d)


@given(quads())
def test_point_spectrum_subset_of_spectrum(q):
    sig = spectrum_1d(q)
    pts = point_spectrum_1d(q)
    for lo, hi in pts.intervals:
        if math.isfinite(lo):
            assert sig.contains(lo)
        if math.isfinite(hi):
            assert sig.contains(hi)
        if math.isfinite(lo) and math.isfinite(hi):
            assert sig.contains(0.5 * (lo + hi))


@given(quads())
def test_spectrum_is_hull_of_point_spectrum_when_nonempty(q):
    # the hull identity holds whenever each side meets the real line; a side
    # collapsed to a single infinity is dropped from the point-spectrum part
    # but still stretches the full spectrum
    sides_real = not (
        (q.d_minus_low == q.d_minus_high and math.isinf(q.d_minus_low))
        or (q.d_plus_low == q.d_plus_high and math.isinf(q.d_plus_low))
    )
    sig = spectrum_1d(q)
    pts = point_spectrum_1d(q)
    if not pts.is_empty and sides_real:
        assert sig == pts.hull()


@given(quads(), st.sampled_from([-2.0, -1.0, 0.5, 3.0]))
def test_scaling_equivariance(q, c):
    scaled = spectrum_1d(q.scaled(c))
    want = [(min(c * lo, c * hi), max(c * lo, c * hi)) for lo, hi in spectrum_1d(q).intervals]
    want = [
        (lo, hi)
        for lo, hi in want
        if not (lo == hi and math.isinf(lo))
    ]
    assert scaled == RealIntervalSet.from_pairs(want)
