from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist

from hyperdomain.domain import DomainSpec, SliceInterval, corners, slice_at
from hyperdomain.manifold import (
    ManifoldSystem,
    PointOnM,
    as_point,
    is_singular_point_of_f,
    lift_many,
    sample_domain,
    sample_manifold,
)

logger = logging.getLogger(__name__)


@dataclass
class FiberConfig:
    """Sampling policy for fiber connectivity estimates.

    - k: number of fiber samples
    - eps: neighbourhood radius; None means 3x the median nearest-neighbour distance
    - R: cut for unbounded slices; None means 10 * (t_l - t_1)
    - pad: relative padding of [t_1, t_l] when deciding nonemptiness
    """

    k: int = 200
    eps: float | None = None
    R: float | None = None
    seed: int = 0
    pad: float = 1e-9


@dataclass
class SingularConfig:
    samples: int = 200
    seed: int = 0
    tol: float = 1e-9


@dataclass
class FiberReport:
    t: float
    nonempty: bool
    bounded: bool
    sampled_components: int
    sample_count: int
    epsilon: float | None
    truncated: bool
    truncation: float | None
    single_point: bool
    regular: bool
    fiber_dim: int
    max_residual: float
    model: str
    slices: List[Tuple[int, float, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["slices"] = [dict(v=v, lo=lo, hi=hi) for v, lo, hi in self.slices]
        return out


@dataclass
class CornerCheck:
    x1: float
    factor: int
    pair: Tuple[int, int]
    verified: bool
    point: PointOnM


@dataclass
class SingularReport:
    predicted_values: List[float]
    corners: List[CornerCheck]
    off_corner_clean: float
    boundary_clean: float
    off_corner_samples: int
    boundary_samples: int

    @property
    def verified(self) -> List[bool]:
        return [c.verified for c in self.corners]

    @property
    def ok(self) -> bool:
        return all(self.verified) and self.off_corner_clean == 1.0 and self.boundary_clean == 1.0

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            ok=self.ok,
            predicted_values=list(self.predicted_values),
            corners=[
                dict(x1=c.x1, factor=c.factor, pair=list(c.pair), verified=c.verified, x=list(c.point.x), y=list(c.point.y))
                for c in self.corners
            ],
            off_corner_clean=self.off_corner_clean,
            off_corner_samples=self.off_corner_samples,
            boundary_clean=self.boundary_clean,
            boundary_samples=self.boundary_samples,
        )


@dataclass
class ImageEstimate:
    lo: float
    hi: float
    step: float
    grid_size: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _arcsine_cells(rng: np.random.Generator, m: int) -> np.ndarray:
    """m stratified samples in [0, 1] from the arcsine law (dense near both ends)."""
    v = (rng.permutation(m) + rng.uniform(0.0, 1.0, m)) / m
    return 0.5 * (1.0 - np.cos(np.pi * v))


def _fiber_base_points(
    d: DomainSpec, t: float, intervals: List[SliceInterval], m: int, R: float, pad: float, rng: np.random.Generator
) -> np.ndarray:
    X = np.zeros((m, d.n))
    X[:, 0] = t
    for iv in intervals:
        lo, hi = iv.lo, iv.hi
        if not math.isfinite(hi):
            hi = R if R > lo else lo + R
        if hi - lo <= pad:
            X[:, iv.v - 1] = 0.5 * (lo + hi)
        else:
            X[:, iv.v - 1] = lo + (hi - lo) * _arcsine_cells(rng, m)
    return X


def _sign_patterns(s: ManifoldSystem, k: int) -> Tuple[int, np.ndarray | None]:
    """All sign choices on the 0-sphere blocks when there are few enough of them."""
    zero_dim = [j for j, b in enumerate(s.blocks) if b == 1]
    count = 2 ** len(zero_dim)
    if not zero_dim or count > k // 4:
        return 1, None
    signs = np.ones((count, s.L))
    for i in range(count):
        for bit, j in enumerate(zero_dim):
            signs[i, j] = -1.0 if (i >> bit) & 1 else 1.0
    return count, signs


def count_components(Z: np.ndarray, eps: float | None) -> Tuple[int, float]:
    """Connected components of the eps-neighbourhood graph on the rows of Z."""
    if Z.shape[0] == 1:
        return 1, 0.0 if eps is None else float(eps)
    D = cdist(Z, Z)
    if eps is None:
        nn = np.where(np.eye(Z.shape[0], dtype=bool), np.inf, D).min(axis=1)
        eps = 3.0 * float(np.median(nn))
    n_comp, _ = connected_components(csr_matrix(D <= eps), directed=False)
    return int(n_comp), float(eps)


def _model_string(s: ManifoldSystem, t: float, intervals: List[SliceInterval], R: float | None) -> str:
    cell = " x ".join(
        f"x{iv.v} in [{iv.lo:.6g}, {iv.hi:.6g}]" if math.isfinite(iv.hi) else f"x{iv.v} in [{iv.lo:.6g}, +inf)"
        for iv in intervals
    )
    spheres = " x ".join(f"S^{b - 1}(sqrt f_{j + 1}(x))" for j, b in enumerate(s.blocks))
    text = f"x1 = {t:.6g}; cell {cell}; fiber = union over the cell of {spheres}"
    if R is not None:
        text += f"; sampled with x_v <= {R:.6g}"
    return text


def fiber_report(s: ManifoldSystem, t: float, cfg: FiberConfig | None = None) -> FiberReport:
    """Describe f^{-1}(t) exactly where possible and estimate its connectivity by sampling."""
    cfg = cfg or FiberConfig()
    if cfg.k < 1:
        raise ValueError(f"k must be >= 1, got {cfg.k}")
    d = s.domain
    t = float(t)
    t1, tl = d.t[0], d.t[-1]
    pad = cfg.pad * max(1.0, d.span)
    corner_values = {c.x1 for c in corners(d)}
    fiber_dim = s.manifold_dim - 1

    if t < t1 - pad or t > tl + pad:
        return FiberReport(
            t=t,
            nonempty=False,
            bounded=True,
            sampled_components=0,
            sample_count=0,
            epsilon=None,
            truncated=False,
            truncation=None,
            single_point=False,
            regular=True,
            fiber_dim=fiber_dim,
            max_residual=0.0,
            model="empty",
        )

    tc = min(max(t, t1), tl)
    intervals = slice_at(d, tc, tol=pad)
    bounded = all(math.isfinite(iv.hi) for iv in intervals)
    R = 10.0 * d.span if cfg.R is None else float(cfg.R)
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")

    rng = np.random.default_rng(cfg.seed)
    patterns, signs = _sign_patterns(s, cfg.k)
    m = max(1, cfg.k // patterns)
    X = _fiber_base_points(d, tc, intervals, m, R, pad, rng)
    if signs is not None:
        X = np.repeat(X, patterns, axis=0)
        signs = np.tile(signs, (m, 1))
    Z = lift_many(s, X, rng, signs=signs)

    residual = max(float(np.max(np.abs(p.eval(Z)))) for p in s.polys)
    n_comp, eps = count_components(Z, cfg.eps)
    single = bool(np.all(np.ptp(Z, axis=0) == 0.0))
    logger.debug("fiber t=%g: %d samples, eps=%.3g, %d components", t, Z.shape[0], eps, n_comp)

    return FiberReport(
        t=t,
        nonempty=True,
        bounded=bounded,
        sampled_components=n_comp,
        sample_count=int(Z.shape[0]),
        epsilon=eps,
        truncated=not bounded,
        truncation=None if bounded else R,
        single_point=single,
        regular=not any(abs(tc - c) <= pad for c in corner_values),
        fiber_dim=fiber_dim,
        max_residual=residual,
        model=_model_string(s, tc, intervals, None if bounded else R),
        slices=[(iv.v, iv.lo, iv.hi) for iv in intervals],
    )


def _interior_height(iv: SliceInterval, span: float) -> float:
    if math.isfinite(iv.hi):
        return 0.5 * (iv.lo + iv.hi)
    return iv.lo + span


def _boundary_rows(s: ManifoldSystem, count: int, rng: np.random.Generator) -> np.ndarray:
    """Domain points pushed onto one boundary branch, away from that branch's asymptote."""
    d = s.domain
    R = 10.0 * d.span
    X = sample_domain(d, count, R, rng)
    keep = np.ones(count, dtype=bool)
    choice = rng.integers(0, len(d.factors), count)
    upper = rng.uniform(0.0, 1.0, count) < 0.5
    for i in range(count):
        f = d.factors[choice[i]]
        lo, hi = f.envelopes(X[i : i + 1, 0])
        use_hi = bool(upper[i]) and math.isfinite(hi[0])
        X[i, f.v - 1] = hi[0] if use_hi else lo[0]
        bound = "upper" if use_hi else "lower"
        for h in f.hypersurfaces:
            hv = h.branch.height(X[i, 0])
            if h.bound == bound and hv is not None and hv == X[i, f.v - 1]:
                if abs(X[i, 0] - h.branch.a) < 1e-2 * d.span:
                    keep[i] = False
    return X[keep]


def singular_values(s: ManifoldSystem, cfg: SingularConfig | None = None) -> SingularReport:
    """Corner x1 values as predicted singular values of f, each confirmed at a lifted point."""
    cfg = cfg or SingularConfig()
    d = s.domain
    rng = np.random.default_rng(cfg.seed)
    records = corners(d)
    predicted = sorted({r.x1 for r in records})

    checks: List[CornerCheck] = []
    for rec in records:
        x = np.zeros(d.n)
        x[0] = rec.x1
        for p, iv in enumerate(slice_at(d, rec.x1, tol=cfg.tol)):
            x[iv.v - 1] = rec.xv if p == rec.factor else _interior_height(iv, d.span)
        z = lift_many(s, x[None, :], rng, zero_blocks=rec.pair)[0]
        point = as_point(s, z)
        verified = is_singular_point_of_f(s, point, tol=cfg.tol)
        if not verified:
            logger.info("corner at x1=%g (factor %d) is not critical for f", rec.x1, rec.factor)
        checks.append(CornerCheck(rec.x1, rec.factor, rec.pair, verified, point))

    samples = sample_manifold(s, cfg.samples, seed=rng)
    off_clean = sum(not is_singular_point_of_f(s, p, tol=cfg.tol) for p in samples) / len(samples)

    B = _boundary_rows(s, cfg.samples, rng)
    if B.shape[0]:
        lifted = [as_point(s, z) for z in lift_many(s, B, rng)]
        boundary_clean = sum(not is_singular_point_of_f(s, p, tol=cfg.tol) for p in lifted) / len(lifted)
    else:
        boundary_clean = 1.0

    return SingularReport(
        predicted_values=predicted,
        corners=checks,
        off_corner_clean=float(off_clean),
        boundary_clean=float(boundary_clean),
        off_corner_samples=len(samples),
        boundary_samples=int(B.shape[0]),
    )


def image_estimate(s: ManifoldSystem, grid_size: int = 401, pad: float = 0.5) -> ImageEstimate:
    """Hull of the grid points over which the closed slice is nonempty."""
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    d = s.domain
    t1, tl = d.t[0], d.t[-1]
    grid = np.linspace(t1 - pad * d.span, tl + pad * d.span, grid_size)
    tol = 1e-9 * max(1.0, d.span)
    ok = np.ones(grid_size, dtype=bool)
    for f in d.factors:
        lo, hi = f.envelopes(grid, tol)
        scale = 1.0 + np.where(np.isfinite(lo), np.abs(lo), 0.0)
        ok &= lo <= hi + tol * scale
    if not ok.any():
        raise ValueError("no grid point has a nonempty slice")
    hits = grid[ok]
    return ImageEstimate(float(hits.min()), float(hits.max()), float(grid[1] - grid[0]), grid_size)
