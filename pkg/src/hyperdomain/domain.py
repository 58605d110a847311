from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Literal, Sequence, Tuple

import numpy as np
import pandas as pd

from hyperdomain.algebra import Branch, HypersurfaceSpec, Polynomial, hypersurface_poly, intersect_branches

logger = logging.getLogger(__name__)

FactorKind = Literal["lens", "pinch", "open"]
Mode = Literal["minimal", "literal"]

# Spacing below MIN_GAP_REL * span is rejected as numerically degenerate.
MIN_GAP_REL = 1e-9
CORNER_TOL = 1e-9


@dataclass(frozen=True)
class FactorCorner:
    """A point where two branches of one factor meet, at height xv above x1."""

    x1: float
    xv: float
    pair: Tuple[int, int]


@dataclass(frozen=True)
class FactorDomain:
    """A planar region in (x1, x_v) cut out by a few hyperbola branches.

    t_lo/t_hi record the interval the recipe was built for: the lens window,
    the pinch point (t_lo == t_hi) or the labeled interval of an open factor.
    """

    kind: FactorKind
    v: int
    hypersurfaces: Tuple[HypersurfaceSpec, ...]
    corners: Tuple[FactorCorner, ...]
    t_lo: float
    t_hi: float
    rho: float
    first_interval: bool = False

    @property
    def plane(self) -> Tuple[int, int]:
        return (1, self.v)

    def envelopes(self, x1, tol: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper envelope of the slice over each x1.

        The lens is restricted to its window [t_lo, t_hi] (widened by tol);
        outside it the slice is reported empty as lo=+inf, hi=-inf.
        """
        u = np.atleast_1d(np.asarray(x1, dtype=float))
        lo = np.full(u.shape, -np.inf)
        hi = np.full(u.shape, np.inf)
        for h in self.hypersurfaces:
            hv = h.branch.heights(u)
            if h.bound == "lower":
                lo = np.fmax(lo, hv)
            else:
                hi = np.fmin(hi, hv)
        if self.kind == "lens":
            outside = (u < self.t_lo - tol) | (u > self.t_hi + tol)
            lo = np.where(outside, np.inf, lo)
            hi = np.where(outside, -np.inf, hi)
        return lo, hi


@dataclass(frozen=True)
class SliceInterval:
    v: int
    lo: float
    hi: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.hi) and math.isfinite(self.lo)

    def is_empty(self, closed: bool = False, tol: float = 0.0) -> bool:
        if closed:
            return not (self.lo <= self.hi + tol)
        return not (self.lo < self.hi)


@dataclass(frozen=True)
class CornerRecord:
    x1: float
    factor: int
    v: int
    xv: float
    pair: Tuple[int, int]

    @property
    def point(self) -> Tuple[float, float]:
        return (self.x1, self.xv)


@dataclass(frozen=True)
class DomainSpec:
    """Product-of-slices domain over the x1-axis.

    Factor 0 is always the lens in plane (x1, x2); factor p lives in plane
    (x1, x_{p+2}). Hypersurface j is numbered globally in factor order.
    """

    t: Tuple[float, ...]
    labels: Tuple[int, ...]
    mode: Mode
    factors: Tuple[FactorDomain, ...]
    n: int
    base_point: Tuple[float, ...]
    pinch_rho: float
    extensions: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def l(self) -> int:
        return len(self.t)

    @property
    def span(self) -> float:
        return self.t[-1] - self.t[0]

    @cached_property
    def hypersurfaces(self) -> Tuple[HypersurfaceSpec, ...]:
        return tuple(h for f in self.factors for h in f.hypersurfaces)

    @property
    def L(self) -> int:
        return len(self.hypersurfaces)

    @cached_property
    def hypersurface_offsets(self) -> Tuple[int, ...]:
        out, acc = [], 0
        for f in self.factors:
            out.append(acc)
            acc += len(f.hypersurfaces)
        return tuple(out)

    @cached_property
    def factor_of(self) -> Tuple[int, ...]:
        return tuple(p for p, f in enumerate(self.factors) for _ in f.hypersurfaces)

    @cached_property
    def polynomials(self) -> Tuple[Polynomial, ...]:
        return tuple(hypersurface_poly(h, self.n) for h in self.hypersurfaces)

    def hypersurface_table(self) -> pd.DataFrame:
        rows = []
        for j, h in enumerate(self.hypersurfaces):
            p = self.factor_of[j]
            rows.append(
                dict(
                    j=j,
                    factor=p,
                    kind=self.factors[p].kind,
                    v=h.v,
                    plane=f"(x{h.u}, x{h.v})",
                    a=h.branch.a,
                    b=h.branch.b,
                    c=h.branch.c,
                    side=h.branch.side,
                    sigma=h.sigma,
                    bound=h.bound,
                    support=f"({h.branch.support[0]:g}, {h.branch.support[1]:g})",
                    affine_factor_dim=self.n - 2,
                )
            )
        return pd.DataFrame(rows)


def _verify_corners(factor: FactorDomain) -> None:
    for corner in factor.corners:
        i, k = corner.pair
        b1 = factor.hypersurfaces[i].branch
        b2 = factor.hypersurfaces[k].branch
        scale = 1.0 + abs(corner.x1) + abs(corner.xv)
        hits = [
            (pt, tangent)
            for pt, tangent in intersect_branches(b1, b2)
            if abs(pt[0] - corner.x1) <= CORNER_TOL * scale and abs(pt[1] - corner.xv) <= CORNER_TOL * scale
        ]
        if not hits:
            raise ValueError(f"{factor.kind} factor: branches {corner.pair} do not meet at ({corner.x1}, {corner.xv})")
        if hits[0][1]:
            raise ValueError(f"{factor.kind} factor: branches {corner.pair} are tangent at ({corner.x1}, {corner.xv})")


def make_lens(t1: float, tl: float, v: int = 2) -> FactorDomain:
    """Bounded lens over [t1, tl] with corners at (t1, r) and (tl, -r), r = (tl - t1) / 2."""
    t1, tl = float(t1), float(tl)
    if not t1 < tl:
        raise ValueError(f"make_lens needs t1 < tl, got {t1}, {tl}")
    mu = 0.5 * (t1 + tl)
    r = 0.5 * (tl - t1)
    lower = HypersurfaceSpec((1, v), Branch(mu - 2.0 * r, -2.0 * r, 3.0 * r * r, "plus"), 1)
    upper = HypersurfaceSpec((1, v), Branch(mu + 2.0 * r, 2.0 * r, 3.0 * r * r, "minus"), 1)
    factor = FactorDomain(
        kind="lens",
        v=v,
        hypersurfaces=(lower, upper),
        corners=(FactorCorner(t1, r, (0, 1)), FactorCorner(tl, -r, (0, 1))),
        t_lo=t1,
        t_hi=tl,
        rho=r,
    )
    _verify_corners(factor)
    return factor


def make_pinch(tj: float, rho: float, v: int = 3) -> FactorDomain:
    """Unbounded-in-x1 region pinched to the segment {tj} x [-rho, rho]."""
    tj, rho = float(tj), float(rho)
    if not rho > 0:
        raise ValueError(f"pinch radius must be positive, got {rho}")
    r2 = rho * rho
    plane = (1, v)
    factor = FactorDomain(
        kind="pinch",
        v=v,
        hypersurfaces=(
            HypersurfaceSpec(plane, Branch(tj - rho, 0.0, r2, "plus"), -1),
            HypersurfaceSpec(plane, Branch(tj + rho, 0.0, -r2, "plus"), 1),
            HypersurfaceSpec(plane, Branch(tj + rho, 0.0, r2, "minus"), -1),
            HypersurfaceSpec(plane, Branch(tj - rho, 0.0, -r2, "minus"), 1),
        ),
        corners=(FactorCorner(tj, rho, (0, 1)), FactorCorner(tj, -rho, (2, 3))),
        t_lo=tj,
        t_hi=tj,
        rho=rho,
    )
    _verify_corners(factor)
    return factor


def make_open(tj: float, tj1: float, is_first: bool = False, tl: float | None = None, v: int = 3) -> FactorDomain:
    """Region whose slices are unbounded above exactly over the interval [tj, tj1].

    The four-branch recipe closes the region at (tj, -rho) with rho = 2(tj1 - tj).
    The first-interval variant (is_first) drops the two branches on the left,
    so slices stay unbounded for every x1 <= tj1 and the factor has no corner.
    """
    tj, tj1 = float(tj), float(tj1)
    if not tj < tj1:
        raise ValueError(f"make_open needs tj < tj1, got {tj}, {tj1}")
    plane = (1, v)

    if is_first:
        tl = tj1 if tl is None else float(tl)
        if tl < tj1:
            raise ValueError(f"make_open needs tj1 <= tl, got {tj1}, {tl}")
        rho = tl - tj
        r2 = rho * rho
        return FactorDomain(
            kind="open",
            v=v,
            hypersurfaces=(
                HypersurfaceSpec(plane, Branch(tj1, 0.0, r2, "plus"), -1),
                HypersurfaceSpec(plane, Branch(tl + rho, 0.0, r2, "minus"), -1),
            ),
            corners=(),
            t_lo=tj,
            t_hi=tj1,
            rho=rho,
            first_interval=True,
        )

    rho = 2.0 * (tj1 - tj)
    r2 = rho * rho
    factor = FactorDomain(
        kind="open",
        v=v,
        hypersurfaces=(
            HypersurfaceSpec(plane, Branch(tj1, 0.0, r2, "plus"), -1),
            HypersurfaceSpec(plane, Branch(tj, 0.0, -r2, "plus"), 1),
            HypersurfaceSpec(plane, Branch(tj + rho, 0.0, r2, "minus"), -1),
            HypersurfaceSpec(plane, Branch(tj - rho, 0.0, -r2, "minus"), 1),
        ),
        corners=(FactorCorner(tj, -rho, (2, 3)),),
        t_lo=tj,
        t_hi=tj1,
        rho=rho,
    )
    _verify_corners(factor)
    return factor


def validate_inputs(t: Sequence[float], labels: Sequence[int], mode: str) -> Tuple[Tuple[float, ...], Tuple[int, ...]]:
    ts = tuple(float(x) for x in t)
    if len(ts) < 2:
        raise ValueError(f"t needs at least 2 values, got {len(ts)}")
    if not all(math.isfinite(x) for x in ts):
        raise ValueError("t values must be finite")
    gaps = np.diff(ts)
    if np.any(gaps <= 0):
        raise ValueError(f"t must be strictly increasing, got {list(ts)}")
    span = ts[-1] - ts[0]
    if float(gaps.min()) < MIN_GAP_REL * span:
        raise ValueError(f"minimum gap {float(gaps.min())!r} is below {MIN_GAP_REL} * span")

    labs = tuple(labels)
    if len(labs) != len(ts) - 1:
        raise ValueError(f"labels needs {len(ts) - 1} entries (one per interval), got {len(labs)}")
    if any(x not in (0, 1) for x in labs):
        raise ValueError(f"labels must be 0 or 1, got {list(labs)}")
    labs = tuple(int(x) for x in labs)

    if mode not in ("minimal", "literal"):
        raise ValueError(f"mode must be 'minimal' or 'literal', got {mode!r}")
    if mode == "literal" and len(ts) == 2 and labs[0] == 1:
        raise ValueError("literal mode has no recipe for l = 2 with label 1; use mode='minimal'")
    return ts, labs


def build_domain(
    t: Sequence[float],
    labels: Sequence[int],
    mode: Mode = "minimal",
    pinch_rho: float | None = None,
) -> DomainSpec:
    """Assemble the lens plus one factor per pinch point or labeled interval.

    minimal: one pinch at each interior t_j with label(j) = 0 and one open
    factor per interval with label 1, so every t_j is a corner exactly once.
    literal: all-zero labels get a pinch at every interior t_j; otherwise
    plane 3 covers t_2 (pinch, or an open factor on [t_1, t_2]) and plane
    j + 2 covers t_j for j = 2..l-1.
    """
    ts, labs = validate_inputs(t, labels, mode)
    l = len(ts)
    span = ts[-1] - ts[0]
    rho = span / 4.0 if pinch_rho is None else float(pinch_rho)
    if not rho > 0:
        raise ValueError(f"pinch_rho must be positive, got {rho}")

    factors: List[FactorDomain] = [make_lens(ts[0], ts[-1], v=2)]
    extensions: List[str] = []

    def next_v() -> int:
        return len(factors) + 2

    if mode == "minimal":
        for j in range(1, l):
            if labs[j - 1] == 1:
                factors.append(make_open(ts[j - 1], ts[j], is_first=(j == 1), tl=ts[-1], v=next_v()))
            elif j >= 2:
                factors.append(make_pinch(ts[j - 1], rho, v=next_v()))
        if l == 2 and labs[0] == 1:
            extensions.append("l=2 with label 1 built with the first-interval open factor")
    elif any(labs):
        if labs[0] == 0:
            factors.append(make_pinch(ts[1], rho, v=3))
        else:
            factors.append(make_open(ts[0], ts[1], v=3))
        for j in range(2, l):
            if labs[j - 1] == 0:
                factors.append(make_pinch(ts[j - 1], rho, v=j + 2))
            else:
                factors.append(make_open(ts[j - 1], ts[j], v=j + 2))
    else:
        for j in range(2, l):
            factors.append(make_pinch(ts[j - 1], rho, v=j + 1))

    n = len(factors) + 1
    mu = 0.5 * (ts[0] + ts[-1])
    d = DomainSpec(
        t=ts,
        labels=labs,
        mode=mode,
        factors=tuple(factors),
        n=n,
        base_point=(mu,) + (0.0,) * (n - 1),
        pinch_rho=rho,
        extensions=tuple(extensions),
    )
    for note in extensions:
        logger.info("extension: %s", note)
    if not contains(d, d.base_point, closed=False, tol=0.0):
        raise RuntimeError(f"base point {d.base_point} is not inside the constructed domain")
    logger.debug("built %s domain: n=%d L=%d factors=%s", mode, n, d.L, [f.kind for f in factors])
    return d


def slice_at(d: DomainSpec, x1: float, tol: float = 0.0) -> List[SliceInterval]:
    """Per-factor interval of x_v values over a fixed x1 (lo > hi when empty)."""
    out = []
    for f in d.factors:
        lo, hi = f.envelopes(np.array([float(x1)]), tol)
        out.append(SliceInterval(f.v, float(lo[0]), float(hi[0])))
    return out


def slice_membership(d: DomainSpec, X, closed: bool = False, tol: float = 1e-9) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    x1 = X[:, 0]
    ok = np.ones(X.shape[0], dtype=bool)
    for f in d.factors:
        lo, hi = f.envelopes(x1, tol if closed else 0.0)
        xv = X[:, f.v - 1]
        if closed:
            ok &= (xv >= lo - tol) & (xv <= hi + tol)
        else:
            ok &= (xv > lo) & (xv < hi)
    return ok


def sign_membership(d: DomainSpec, X, closed: bool = False, tol: float = 1e-9) -> np.ndarray:
    """Rows where every defining polynomial is positive (or >= -tol when closed)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    vals = np.column_stack([p.eval(X) for p in d.polynomials])
    if closed:
        return np.all(vals >= -tol, axis=1)
    return np.all(vals > tol, axis=1)


def contains_many(d: DomainSpec, X, closed: bool = False, tol: float = 1e-9) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != d.n:
        raise ValueError(f"points need {d.n} coordinates, got {X.shape[1]}")
    return sign_membership(d, X, closed, tol) & slice_membership(d, X, closed, tol)


def contains(d: DomainSpec, x, closed: bool = False, tol: float = 1e-9) -> bool:
    """Membership in D (open) or its closure, by signs and by the lens window."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (d.n,):
        raise ValueError(f"point needs {d.n} coordinates, got shape {arr.shape}")
    return bool(contains_many(d, arr[None, :], closed, tol)[0])


def corners(d: DomainSpec) -> List[CornerRecord]:
    out = []
    for p, f in enumerate(d.factors):
        off = d.hypersurface_offsets[p]
        for c in f.corners:
            out.append(CornerRecord(c.x1, p, f.v, c.xv, (off + c.pair[0], off + c.pair[1])))
    out.sort(key=lambda r: (r.x1, r.factor, r.xv))
    return out
