"""Planar engine for positively homogeneous maps on R^2 viewed as the plane.

For a positively homogeneous planar map the point-spectrum part is exactly
the eigenvalue set {lam : lam z = f(z), |z| = 1}, traced as the closed curve
theta -> f(e^{i theta}) * e^{-i theta} (complex product).  Regularity of
lam*id - f away from that curve is decided by a winding-number proxy:

    winding of theta -> lam z - f(z) around 0 nonzero  => regular
    winding zero                                       => in the spectrum

The forward direction is sound (a nonzero degree certifies solvability of
all admissible perturbed equations); treating winding zero as membership is
a heuristic, recorded as a labeled assumption in classification metadata and
validated against the planar benchmark maps.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .core import (
    AdmissibilityError,
    NumericError,
    PreconditionError,
    SolverError,
    thread_count,
)
from .maps import MapSpec, evaluate
from .numerics import (
    disk_points,
    golden_min,
    nm_polish,
    pattern_search_2d,
    sphere_directions,
    sphere_polish,
)

TWO_PI = 2.0 * math.pi

ZERO_EPI_PROXY_NOTE = (
    "winding==0 is treated as 'in spectrum'; nonzero winding soundly implies "
    "regular, the converse is a heuristic validated on planar benchmark maps"
)


@dataclass(frozen=True)
class CurveConfig:
    samples: int = 1024
    chord_bound: float = 1e-3
    max_samples: int = 1 << 20


@dataclass(frozen=True)
class SigmaCurve:
    """Sampled eigenvalue curve: thetas strictly increasing in [0, 2pi)."""

    thetas: np.ndarray
    values: np.ndarray  # complex samples lam(theta)
    closed: bool
    chord_bound: float
    chord_met: bool
    label: str = "point-spectrum"

    def pairs(self) -> np.ndarray:
        return np.stack([self.values.real, self.values.imag], axis=-1)

    def max_gap(self) -> float:
        nxt = np.roll(self.values, -1)
        return float(np.max(np.abs(nxt - self.values)))

    def is_point(self, tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.values - self.values[0])) <= tol)


class CellLabel(IntEnum):
    IN_SPECTRUM = 0
    REGULAR = 1
    BAND = 2


@dataclass(frozen=True)
class WindingResult:
    turns: int
    margin: float
    samples_used: int
    max_increment: float


@dataclass(frozen=True)
class RoucheSolution:
    point: np.ndarray
    residual: float
    winding: int
    start_index: int


@dataclass(frozen=True)
class PlaneSpectrum:
    curve: SigmaCurve
    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray  # (ny, nx) CellLabel values
    band_radius: float
    violations: tuple = ()
    component_consistent: bool = True
    metadata: dict = field(default_factory=dict)

    def counts(self) -> dict:
        flat = self.labels.ravel()
        return {
            "in_spectrum": int(np.sum(flat == CellLabel.IN_SPECTRUM)),
            "regular": int(np.sum(flat == CellLabel.REGULAR)),
            "band": int(np.sum(flat == CellLabel.BAND)),
        }

    def cell_area(self) -> float:
        dx = float(self.xs[1] - self.xs[0]) if self.xs.size > 1 else 0.0
        dy = float(self.ys[1] - self.ys[0]) if self.ys.size > 1 else 0.0
        return dx * dy

    def summary(self) -> dict:
        c = self.counts()
        area = self.cell_area()
        inside = c["in_spectrum"] * area
        band = c["band"] * area
        mask = self.labels == CellLabel.IN_SPECTRUM
        if mask.any():
            gx, gy = np.meshgrid(self.xs, self.ys)
            max_abs = float(np.max(np.hypot(gx[mask], gy[mask])))
        else:
            max_abs = 0.0
        return {
            "counts": c,
            "cell_area": area,
            "in_spectrum_area_lower": inside,
            "in_spectrum_area_estimate": inside + 0.5 * band,
            "in_spectrum_area_upper": inside + band,
            "max_abs_in_spectrum": max_abs,
            "band_radius": self.band_radius,
            "component_consistent": self.component_consistent,
            "violations": len(self.violations),
            "assumptions": dict(self.metadata),
        }


def _require_planar_homogeneous(f: MapSpec):
    if f.dim != 2:
        raise PreconditionError(f"map {f.name} is not planar")
    if not f.homogeneous:
        raise PreconditionError(f"map {f.name} does not declare positive homogeneity")


def _unit_points(thetas: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)


def _curve_values(f: MapSpec, thetas: np.ndarray) -> np.ndarray:
    w = evaluate(f, _unit_points(thetas))
    return (w[..., 0] + 1j * w[..., 1]) * np.exp(-1j * thetas)


def sigma_curve(f: MapSpec, samples: int = 1024, chord_bound: float = 1e-3,
                max_samples: int = 1 << 20, label: str = "point-spectrum") -> SigmaCurve:
    """Trace the eigenvalue curve, bisecting arcs until the chord bound holds."""
    _require_planar_homogeneous(f)
    n0 = max(16, 4 * math.ceil(samples / 4))
    thetas = np.linspace(0.0, TWO_PI, n0, endpoint=False)
    vals = _curve_values(f, thetas)
    met = False
    while True:
        nxt_theta = np.concatenate([thetas[1:], [TWO_PI]])
        gaps = np.abs(np.roll(vals, -1) - vals)
        bad = gaps > chord_bound
        if not bad.any():
            met = True
            break
        room = max_samples - thetas.size
        if room <= 0:
            break
        mids = 0.5 * (thetas[bad] + nxt_theta[bad])
        if mids.size > room:
            mids = mids[:room]
        thetas = np.sort(np.concatenate([thetas, mids]))
        vals = _curve_values(f, thetas)
    return SigmaCurve(
        thetas=thetas,
        values=vals,
        closed=True,
        chord_bound=chord_bound,
        chord_met=met,
        label=label,
    )


def d_and_quasinorm(f: MapSpec, samples: int = 4096) -> tuple[float, float]:
    """Min and max of |f| on the unit circle (refined samples plus local polish)."""
    _require_planar_homogeneous(f)
    curve = sigma_curve(f, samples=samples)
    norms = np.abs(curve.values)

    def nrm(t: float) -> float:
        w = evaluate(f, np.array([math.cos(t), math.sin(t)]))
        return float(math.hypot(w[0], w[1]))

    delta = 2.0 * TWO_PI / curve.thetas.size
    i_lo = int(np.argmin(norms))
    i_hi = int(np.argmax(norms))
    t_lo = float(curve.thetas[i_lo])
    t_hi = float(curve.thetas[i_hi])
    _, d_ref = golden_min(nrm, t_lo - delta, t_lo + delta)
    _, q_ref = golden_min(lambda t: -nrm(t), t_hi - delta, t_hi + delta)
    d = min(float(norms[i_lo]), d_ref)
    q = max(float(norms[i_hi]), -q_ref)
    return d, q


def _curve_stats(gamma: np.ndarray):
    """(total signed angle, max |increment|, min |gamma|) for a closed curve."""
    steps = np.angle(np.roll(gamma, -1) * np.conj(gamma))
    return float(steps.sum()), float(np.max(np.abs(steps))), float(np.min(np.abs(gamma)))


def winding_number(
    f: MapSpec,
    lam,
    radius: float = 1.0,
    samples: int = 256,
    margin_tol: float = 1e-9,
    max_samples: int = 1 << 18,
) -> WindingResult:
    """Winding of theta -> lam * z - f(z) on |z| = radius around the origin.

    Samples are refined until every angular increment is below pi/2; the
    reported margin is the minimum distance of the curve to the origin.
    """
    if f.dim != 2:
        raise PreconditionError(f"map {f.name} is not planar")
    lam = complex(lam) if not isinstance(lam, complex) else lam
    n = max(16, int(samples))
    while True:
        thetas = np.linspace(0.0, TWO_PI, n, endpoint=False)
        pts = radius * _unit_points(thetas)
        w = evaluate(f, pts)
        gamma = lam * radius * np.exp(1j * thetas) - (w[..., 0] + 1j * w[..., 1])
        total, max_inc, margin = _curve_stats(gamma)
        if margin < margin_tol * max(1.0, radius):
            raise AdmissibilityError(
                f"boundary curve of {f.name} passes within {margin:.3e} of the origin"
            )
        if max_inc < 0.5 * math.pi:
            turns = int(round(total / TWO_PI))
            return WindingResult(turns, margin, n, max_inc)
        if n >= max_samples:
            raise NumericError(
                f"angular increments did not settle below pi/2 with {n} samples"
            )
        n *= 2


def _winding_of_boundary_values(gamma_fn, n0: int = 256, max_samples: int = 1 << 18,
                                margin_tol: float = 1e-9):
    """Same refinement loop for a caller-supplied closed curve sampler."""
    n = n0
    while True:
        thetas = np.linspace(0.0, TWO_PI, n, endpoint=False)
        gamma = gamma_fn(thetas)
        total, max_inc, margin = _curve_stats(gamma)
        if margin < margin_tol:
            raise AdmissibilityError("curve passes too near the origin")
        if max_inc < 0.5 * math.pi:
            return int(round(total / TWO_PI)), margin
        if n >= max_samples:
            raise NumericError("winding refinement hit the sample cap")
        n *= 2


@dataclass(frozen=True)
class ClassifyConfig:
    base_theta: int = 512
    max_theta: int = 1 << 15
    margin_tol: float = 1e-9
    chunk: int = 2048
    curve_samples: int = 2048


def _winding_bulk(f: MapSpec, lams: np.ndarray, cfg: ClassifyConfig):
    """Winding numbers for many lam values, sharing the boundary evaluations."""
    n_pts = lams.size
    turns = np.zeros(n_pts, dtype=int)
    ok = np.zeros(n_pts, dtype=bool)
    viol = np.zeros(n_pts, dtype=bool)
    pending = np.arange(n_pts)

    def curve_at(n):
        thetas = np.linspace(0.0, TWO_PI, n, endpoint=False)
        w = evaluate(f, _unit_points(thetas))
        return np.exp(1j * thetas), w[..., 0] + 1j * w[..., 1]

    n = cfg.base_theta
    while pending.size and n <= cfg.max_theta:
        z, fv = curve_at(n)

        def handle(idx_chunk):
            gamma = lams[idx_chunk, None] * z[None, :] - fv[None, :]
            steps = np.angle(np.roll(gamma, -1, axis=1) * np.conj(gamma))
            margins = np.abs(gamma).min(axis=1)
            max_inc = np.abs(steps).max(axis=1)
            totals = steps.sum(axis=1)
            return margins, max_inc, totals

        chunks = [pending[i : i + cfg.chunk] for i in range(0, pending.size, cfg.chunk)]
        workers = thread_count()
        if workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(handle, chunks))
        else:
            results = [handle(c) for c in chunks]

        still = []
        for idx_chunk, (margins, max_inc, totals) in zip(chunks, results):
            bad_margin = margins < cfg.margin_tol
            settled = (max_inc < 0.5 * math.pi) & ~bad_margin
            turns[idx_chunk[settled]] = np.round(totals[settled] / TWO_PI).astype(int)
            ok[idx_chunk[settled]] = True
            viol[idx_chunk[bad_margin]] = True
            rest = idx_chunk[~settled & ~bad_margin]
            if rest.size:
                still.append(rest)
        pending = np.concatenate(still) if still else np.empty(0, dtype=int)
        n *= 2

    if pending.size:
        viol[pending] = True  # could not settle below the cap; treat as band
    return turns, ok, viol


def classify_plane(
    f: MapSpec,
    bounds: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0),
    resolution: int = 200,
    band_radius: float | None = None,
    curve: SigmaCurve | None = None,
    config: ClassifyConfig = ClassifyConfig(),
) -> PlaneSpectrum:
    """Label a grid of candidate lam values as in-spectrum / regular / band."""
    _require_planar_homogeneous(f)
    x0, x1, y0, y1 = map(float, bounds)
    if not (x1 > x0 and y1 > y0) or resolution < 2:
        raise PreconditionError("need a nondegenerate grid")
    if curve is None:
        curve = sigma_curve(f, samples=config.curve_samples)
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    cell_diag = math.hypot(xs[1] - xs[0], ys[1] - ys[0])
    band = 2.0 * cell_diag if band_radius is None else float(band_radius)

    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=-1)
    tree = cKDTree(curve.pairs())
    dist, _ = tree.query(pts)
    labels = np.full(pts.shape[0], int(CellLabel.BAND), dtype=np.int8)
    off = dist > band

    lams = pts[off, 0] + 1j * pts[off, 1]
    turns, ok, viol = _winding_bulk(f, lams, config)
    off_idx = np.flatnonzero(off)
    violations = []
    for local_i in np.flatnonzero(viol):
        gi = off_idx[local_i]
        violations.append((int(gi % resolution), int(gi // resolution), "margin"))
    lab_off = np.where(turns != 0, int(CellLabel.REGULAR), int(CellLabel.IN_SPECTRUM))
    lab_off = np.where(viol, int(CellLabel.BAND), lab_off).astype(np.int8)
    labels[off_idx] = lab_off

    grid_labels = labels.reshape(resolution, resolution)

    # all-or-nothing on connected off-band components
    offband = grid_labels != int(CellLabel.BAND)
    structure = ndimage.generate_binary_structure(2, 1)
    comp, n_comp = ndimage.label(offband, structure=structure)
    consistent = True
    for cid in range(1, n_comp + 1):
        vals = np.unique(grid_labels[comp == cid])
        if vals.size > 1:
            consistent = False
            break

    return PlaneSpectrum(
        curve=curve,
        xs=xs,
        ys=ys,
        labels=grid_labels,
        band_radius=band,
        violations=tuple(violations),
        component_consistent=consistent,
        metadata={"zero_epi_proxy": ZERO_EPI_PROXY_NOTE},
    )


def spectral_radius_bound(f: MapSpec, p=None, samples: int = 4096, seed: int = 0) -> float:
    """Upper bound for |lam| over the spectrum: the local quasinorm at p.

    Every lam with modulus above the returned value is regular.  Homogeneous
    maps use the exact sup over the unit sphere; other maps fall back to the
    sampled limsup estimator.
    """
    if f.homogeneous:
        if f.dim == 2:
            return d_and_quasinorm(f, samples=samples)[1]
        dirs = sphere_directions(f.dim, samples, seed)
        norms = np.linalg.norm(evaluate(f, dirs), axis=-1)
        i_hi = int(np.argmax(norms))

        def neg(u):
            return -float(np.linalg.norm(evaluate(f, u)))

        _, best = sphere_polish(neg, dirs[i_hi], maxfev=200 * f.dim)
        return max(float(norms[i_hi]), -best)
    from . import estimators  # lazy: general maps use the rate estimator

    base = f.basepoint if p is None else p
    return estimators.estimate_rates(f, base).q_p


def bifurcation_set_homog(f: MapSpec, samples: int = 1024, chord_bound: float = 1e-3) -> SigmaCurve:
    """Bifurcation set of a homogeneous planar map: its eigenvalue curve.

    Eigenvalues are always bifurcation points; off the (empty, in finite
    dimension) compactness-defect part the converse holds as well.
    """
    return sigma_curve(f, samples=samples, chord_bound=chord_bound, label="bifurcation")


def rouche_coincidence(
    f: MapSpec,
    k: MapSpec,
    radius: float,
    *,
    starts: int = 64,
    tol: float = 1e-10,
    boundary_samples: int = 2048,
    disk_samples: int = 4096,
    seed: int = 0,
) -> RoucheSolution:
    """Solve f(x) = k(x) inside the disk, under the dominated-perturbation test.

    Preconditions checked by sampling: the boundary curve of f winds around
    the origin a nonzero number of times, and max |k| on the closed disk is
    below min |f| on the boundary circle.  The solver is a multistart damped
    fixed-direction descent on the squared residual.
    """
    if f.dim != 2 or k.dim != 2:
        raise PreconditionError("coincidence solving is planar")
    radius = float(radius)
    if radius <= 0:
        raise PreconditionError("radius must be positive")

    def boundary_gamma(thetas):
        w = evaluate(f, radius * _unit_points(thetas))
        return w[..., 0] + 1j * w[..., 1]

    turns, margin = _winding_of_boundary_values(boundary_gamma, n0=max(64, boundary_samples // 8))
    if turns == 0:
        raise PreconditionError("boundary winding of f is zero; solvability not certified")

    thetas = np.linspace(0.0, TWO_PI, boundary_samples, endpoint=False)
    f_bound = np.abs(boundary_gamma(thetas))
    i_lo = int(np.argmin(f_bound))

    def f_norm_at(t):
        w = evaluate(f, radius * np.array([math.cos(t), math.sin(t)]))
        return float(math.hypot(w[0], w[1]))

    dt = 2.0 * TWO_PI / boundary_samples
    _, min_f = golden_min(f_norm_at, thetas[i_lo] - dt, thetas[i_lo] + dt)
    min_f = min(min_f, float(f_bound[i_lo]))

    disk = np.concatenate([np.zeros((1, 2)), disk_points(disk_samples - 1, radius, seed)])
    k_disk = np.linalg.norm(evaluate(k, disk), axis=-1)
    i_hi = int(np.argmax(k_disk))

    def neg_k(x):
        x = np.asarray(x, dtype=float)
        if math.hypot(x[0], x[1]) > radius:
            return 0.0
        return -float(np.linalg.norm(evaluate(k, x)))

    _, neg_best = nm_polish(neg_k, disk[i_hi], maxfev=300)
    max_k = max(float(k_disk[i_hi]), -neg_best)
    if not (max_k < min_f):
        raise PreconditionError(
            f"dominance fails: max|k| on the disk = {max_k:.6g} is not below "
            f"min|f| on the boundary = {min_f:.6g}"
        )

    def sq_residual(x):
        d = evaluate(f, x) - evaluate(k, x)
        return float(d[0] * d[0] + d[1] * d[1])

    feasible = lambda x: math.hypot(x[0], x[1]) < radius
    start_pts = np.concatenate([np.zeros((1, 2)), disk_points(starts - 1, 0.9 * radius, seed)])
    best = None
    for i, x0 in enumerate(start_pts):
        x, val = pattern_search_2d(
            sq_residual, x0, step0=0.25 * radius, feasible=feasible, f_tol=tol * tol
        )
        res = math.sqrt(max(val, 0.0))
        if best is None or res < best[1]:
            best = (x, res, i)
        if res < tol:
            return RoucheSolution(point=x, residual=res, winding=turns, start_index=i)
    raise SolverError(
        f"coincidence solver stagnated; best residual {best[1]:.3e} from start {best[2]}"
    )
