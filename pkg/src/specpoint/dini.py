"""One dimensional engine: derivative quadruples and spectral intervals.

For a real function the local spectrum at a point is read off the four
one-sided limit extremes of difference quotients:

    full spectrum       = closed interval from the smallest to the largest
                          of the four (empty when all four are +inf, or all
                          four are -inf)
    point-spectrum part = union of the closed interval spanned by the two
                          left extremes and the one spanned by the two right
                          extremes, dropping a side whose endpoints are both
                          infinite of the same sign

The numerical estimator samples difference quotients on a two-sided
geometric grid h = +-h0 * ratio^k and takes running extrema over the tail
half of the grid only; early large-h quotients otherwise poison the
estimate for oscillatory maps.  Maps that declare an inverse-argument
oscillation hint get extra samples snapped to the phases h = 1/(pi/2 + 2 pi m)
and h = 1/(3 pi/2 + 2 pi m), where a blind geometric grid provably misses
the oscillation extremes.

Divergence handling is a documented heuristic with no certification: any
tail quotient beyond the configurable threshold flags the corresponding
extreme as infinite, and a side whose quotients all share one sign while
its extreme diverges has both components flagged (monotone blow-up).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DiniQuad,
    EvaluationError,
    NEG_INF,
    POS_INF,
    PreconditionError,
    RealIntervalSet,
    UnsupportedError,
)
from .maps import MapSpec, evaluate


@dataclass(frozen=True)
class DiniEstimate:
    """Estimated quadruple plus which components were divergence-flagged."""

    quad: DiniQuad
    flagged: tuple[bool, bool, bool, bool]
    tail_h: tuple[float, float]  # (smallest, largest) |h| used for extrema


def dini_exact(f: MapSpec, p: float) -> DiniQuad:
    """Exact quadruple from the map's registered provider."""
    if f.dim != 1:
        raise PreconditionError("exact derivative quadruples are one dimensional")
    if f.dini_exact is None:
        raise UnsupportedError(f"map {f.name} has no exact derivative provider")
    return f.dini_exact(float(p))


def _osc_snaps(tail_h: np.ndarray, h0: float) -> np.ndarray:
    """Sample points snapped to the oscillation extremes nearest each tail h."""
    snaps = []
    for phase in (0.5 * np.pi, 1.5 * np.pi):
        m = np.maximum(1.0, np.round((1.0 / tail_h - phase) / (2.0 * np.pi)))
        snaps.append(1.0 / (phase + 2.0 * np.pi * m))
    out = np.concatenate(snaps)
    return np.unique(out[(out > 0.0) & (out <= h0)])


def _flag_side(quotients: np.ndarray, threshold: float):
    lo = float(np.min(quotients))
    hi = float(np.max(quotients))
    lo_flag = hi_flag = False
    if hi > threshold:
        hi, hi_flag = POS_INF, True
    elif hi < -threshold:
        hi, hi_flag = NEG_INF, True
    if lo < -threshold:
        lo, lo_flag = NEG_INF, True
    elif lo > threshold:
        lo, lo_flag = POS_INF, True
    # monotone blow-up: one extreme diverges and the whole tail shares its sign
    if hi == POS_INF and not lo_flag and lo > 0.0:
        lo, lo_flag = POS_INF, True
    if lo == NEG_INF and not hi_flag and hi < 0.0:
        hi, hi_flag = NEG_INF, True
    return lo, hi, lo_flag, hi_flag


def dini_estimate(
    f: MapSpec,
    p: float,
    h0: float = 0.1,
    ratio: float = 0.6,
    steps: int = 60,
    divergence_threshold: float = 1e6,
) -> DiniEstimate:
    """Numerical quadruple from two-sided geometric difference quotients."""
    if f.dim != 1:
        raise PreconditionError("difference-quotient estimation is one dimensional")
    if not (h0 > 0.0):
        raise PreconditionError("h0 must be positive")
    if not (0.0 < ratio < 1.0):
        raise PreconditionError("ratio must lie in (0, 1)")
    if steps < 8:
        raise PreconditionError("need at least 8 grid steps")
    p = float(p)
    fp = float(evaluate(f, p))

    hs = h0 * ratio ** np.arange(steps)
    tail = hs[steps // 2 :]
    if f.inv_oscillation_hint:
        tail = np.unique(np.concatenate([tail, _osc_snaps(tail, h0)]))

    sides = []
    flags = []
    for sign in (-1.0, 1.0):
        h = sign * tail
        try:
            vals = evaluate(f, p + h)
        except EvaluationError:
            # re-evaluate pointwise to report the offending step
            for hk in h:
                try:
                    evaluate(f, p + hk)
                except EvaluationError as exc:
                    raise EvaluationError(f"evaluation failed at h={hk!r}: {exc}") from exc
            raise
        quot = (np.asarray(vals, dtype=float) - fp) / h
        lo, hi, lo_flag, hi_flag = _flag_side(quot, divergence_threshold)
        sides.append((lo, hi))
        flags.extend([lo_flag, hi_flag])

    (dml, dmh), (dpl, dph) = sides
    return DiniEstimate(
        quad=DiniQuad(dml, dmh, dpl, dph),
        flagged=tuple(flags),
        tail_h=(float(tail.min()), float(tail.max())),
    )


def spectrum_1d(q: DiniQuad) -> RealIntervalSet:
    """Full spectrum: the closed interval spanned by all four extremes.

    Empty exactly when the smallest and largest extremes are infinite with
    the same sign (all four are +inf, or all four are -inf).
    """
    vals = q.as_tuple()
    lo, hi = min(vals), max(vals)
    return RealIntervalSet.from_pairs([(lo, hi)])


def point_spectrum_1d(q: DiniQuad) -> RealIntervalSet:
    """Point-spectrum part: one closed interval per side, normalized."""
    return RealIntervalSet.from_pairs(
        [(q.d_minus_low, q.d_minus_high), (q.d_plus_low, q.d_plus_high)]
    )
