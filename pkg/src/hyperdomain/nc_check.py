from __future__ import annotations

import itertools
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Literal, Sequence, Tuple

import numpy as np
import pandas as pd

from hyperdomain.algebra import intersect_branches, numerical_rank
from hyperdomain.domain import DomainSpec, contains_many, corners, sign_membership, slice_membership

logger = logging.getLogger(__name__)

Status = Literal["pass", "warn", "fail"]

CONDITION_TITLES = {
    "1": "polynomial inequalities",
    "2": "connected intersection",
    "3": "closure is the sign-closed set",
    "4": "non-singular, unused halves disjoint",
    "5": "transversality",
}

# Combinations sampled per x1 stratum in the transversality enumeration.
MAX_COMBOS = 64
# Branches closer than this (times span) to their asymptote are left out of a stratum.
ASYMPTOTE_GAP = 1e-4


@dataclass
class NcCheckConfig:
    """Sampling policy for the five NC conditions.

    - samples: probes per sampled condition
    - tol: margin below which a value counts as zero
    - box_radius: half-width of the probe box for spurious components; None means 5 * (t_l - t_1)
    - rank_rtol: relative singular-value threshold for rank decisions
    - max_witnesses: witnesses kept per condition
    """

    samples: int = 200
    tol: float = 1e-9
    box_radius: float | None = None
    seed: int = 0
    rank_rtol: float = 1e-10
    max_witnesses: int = 5


@dataclass
class ConditionResult:
    condition: str
    status: Status
    reasons: List[str] = field(default_factory=list)
    witnesses: List[List[float]] = field(default_factory=list)
    measured: Dict[str, Any] = field(default_factory=dict)

    @property
    def title(self) -> str:
        return CONDITION_TITLES[self.condition]


@dataclass
class NCReport:
    conditions: Dict[str, ConditionResult]
    rank_table: List[Dict[str, Any]]

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.conditions.values())

    def status(self, condition: str) -> Status:
        return self.conditions[condition].status

    def table(self) -> pd.DataFrame:
        rows = []
        for key, c in sorted(self.conditions.items()):
            rows.append(dict(condition=key, title=c.title, status=c.status, witnesses=len(c.witnesses), reasons="; ".join(c.reasons)))
        return pd.DataFrame(rows)

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            nc_ok=self.ok,
            conditions={k: dict(asdict(c), title=c.title) for k, c in sorted(self.conditions.items())},
            rank_table=self.rank_table,
        )


def _pt(x: Sequence[float]) -> List[float]:
    return [float(v) for v in x]


def _check_polynomials(d: DomainSpec) -> ConditionResult:
    degrees = [p.degree for p in d.polynomials]
    reasons = []
    if any(p.num_vars != d.n for p in d.polynomials):
        reasons.append("polynomial in the wrong number of variables")
    if max(degrees) > 2:
        reasons.append(f"degree {max(degrees)} > 2")
    return ConditionResult(
        "1",
        "fail" if reasons else "pass",
        reasons=reasons,
        measured=dict(L=d.L, n=d.n, max_degree=max(degrees)),
    )


def _spurious_probes(d: DomainSpec, cfg: NcCheckConfig, rng: np.random.Generator) -> np.ndarray:
    """Probe points for components of the sign set other than the base one.

    The first probe is the reflection of the lens through its lower-left
    asymptote corner; half of the rest fill the whole box, the other half the
    lens plane only.
    """
    R = 5.0 * d.span if cfg.box_radius is None else float(cfg.box_radius)
    base = np.asarray(d.base_point)
    lens = d.factors[0]
    mu, r = base[0], lens.rho
    reflected = base.copy()
    reflected[0], reflected[1] = mu - 5.0 * r, -5.0 * r

    full = cfg.samples // 2
    planar = cfg.samples - full
    box = base + rng.uniform(-R, R, (full, d.n))
    plane = np.tile(base, (planar, 1))
    plane[:, :2] += rng.uniform(-R, R, (planar, 2))
    return np.vstack([reflected[None, :], box, plane])


def _check_spurious(d: DomainSpec, cfg: NcCheckConfig, rng: np.random.Generator) -> ConditionResult:
    P = _spurious_probes(d, cfg, rng)
    spurious = sign_membership(d, P, closed=False, tol=cfg.tol) & ~slice_membership(d, P, closed=True, tol=cfg.tol)
    hits = P[spurious]
    if hits.shape[0]:
        return ConditionResult(
            "2",
            "warn",
            reasons=["sign set has components besides the base component (component reading applied)"],
            witnesses=[_pt(x) for x in hits[: cfg.max_witnesses]],
            measured=dict(probes=int(P.shape[0]), spurious=int(hits.shape[0])),
        )
    return ConditionResult("2", "pass", measured=dict(probes=int(P.shape[0]), spurious=0))


def _check_closure(d: DomainSpec, cfg: NcCheckConfig, rng: np.random.Generator) -> ConditionResult:
    t1, tl = d.t[0], d.t[-1]
    m = cfg.samples
    X = np.tile(np.asarray(d.base_point), (m, 1))
    X[:, 0] = rng.uniform(t1, tl, m)
    for f in d.factors:
        lo, hi = f.envelopes(X[:, 0])
        hi_eff = np.where(np.isfinite(hi), hi, lo + d.span)
        X[:, f.v - 1] = lo + (hi_eff - lo) * rng.uniform(0.05, 0.95, m)
    which = rng.integers(0, len(d.factors), m)
    upper = rng.uniform(0.0, 1.0, m) < 0.5
    for i in range(m):
        f = d.factors[which[i]]
        lo, hi = f.envelopes(X[i : i + 1, 0])
        X[i, f.v - 1] = hi[0] if (upper[i] and math.isfinite(hi[0])) else lo[0]
    extra = []
    for rec in corners(d):
        x = np.asarray(d.base_point, dtype=float).copy()
        x[0] = rec.x1
        for f in d.factors:
            lo, hi = f.envelopes(np.array([rec.x1]), cfg.tol)
            x[f.v - 1] = 0.5 * (lo[0] + hi[0]) if math.isfinite(hi[0]) else lo[0] + d.span
        x[rec.v - 1] = rec.xv
        extra.append(x)
    if extra:
        X = np.vstack([X, np.array(extra)])

    vals = np.column_stack([p.eval(X) for p in d.polynomials])
    coeff = max(p.coefficient_scale for p in d.polynomials)
    scale = (1.0 + coeff) * (1.0 + np.max(np.abs(X), axis=1)) ** 2
    mins = vals.min(axis=1)
    off = np.abs(mins) > cfg.tol * scale
    interior = contains_many(d, X, closed=False, tol=cfg.tol * float(scale.max()))
    outside = ~contains_many(d, X, closed=True, tol=cfg.tol * float(scale.max()))
    bad = off | interior | outside

    measured = dict(samples=int(X.shape[0]), max_abs_min_f=float(np.max(np.abs(mins) / scale)))
    if bad.any():
        return ConditionResult(
            "3",
            "fail",
            reasons=["boundary sample not on the zero set of some f_j"],
            witnesses=[_pt(x) for x in X[bad][: cfg.max_witnesses]],
            measured=measured,
        )
    return ConditionResult("3", "pass", measured=measured)


def _window_samples(lo: float, hi: float, m: int, rng: np.random.Generator) -> np.ndarray:
    if not hi > lo:
        return np.empty(0)
    u = rng.uniform(lo, hi, m)
    return u[(u > lo) & (u < hi)]


def _check_hypersurfaces(d: DomainSpec, cfg: NcCheckConfig, rng: np.random.Generator) -> ConditionResult:
    t1, tl, span = d.t[0], d.t[-1], d.span
    base = np.asarray(d.base_point, dtype=float)
    min_grad = math.inf
    min_margin = math.inf
    other_samples = 0
    reasons: List[str] = []
    witnesses: List[List[float]] = []

    for j, h in enumerate(d.hypersurfaces):
        p = d.factor_of[j]
        br = h.branch
        poly = d.polynomials[j]

        sup_lo, sup_hi = br.support
        u = _window_samples(max(t1 - span, sup_lo), min(tl + span, sup_hi), cfg.samples, rng)
        u = u[np.abs(u - br.a) > 1e-12 * span]
        for ui in u:
            x = base + rng.uniform(-span, span, d.n)
            x[0] = ui
            x[h.v - 1] = br.b + br.c / (ui - br.a)
            g = float(np.linalg.norm(poly.grad(x)))
            min_grad = min(min_grad, g)
            if g <= cfg.tol:
                witnesses.append(_pt(x))
                reasons.append(f"f_{j} has a singular point on its branch")

        other = br.other()
        o_lo, o_hi = other.support
        u = _window_samples(max(t1, o_lo), min(tl, o_hi), cfg.samples, rng)
        u = u[np.abs(u - br.a) > 1e-12 * span]
        same_factor = [k for k in range(d.L) if d.factor_of[k] == p and k != j]
        for ui in u:
            x = base.copy()
            x[0] = ui
            x[h.v - 1] = other.b + other.c / (ui - other.a)
            margin = -min(d.polynomials[k].eval(x) for k in same_factor)
            other_samples += 1
            min_margin = min(min_margin, margin)
            if not margin > cfg.tol:
                witnesses.append(_pt(x))
                reasons.append(f"unused half of f_{j} reaches the closure")

    measured = dict(
        min_gradient_norm=min_grad,
        min_other_branch_margin=min_margin if other_samples else None,
        other_branch_samples=other_samples,
    )
    if witnesses:
        return ConditionResult("4", "fail", reasons=sorted(set(reasons)), witnesses=witnesses[: cfg.max_witnesses], measured=measured)
    return ConditionResult("4", "pass", measured=measured)


@dataclass
class _Meeting:
    """Hypersurfaces of one factor passing through one point of its plane."""

    x1: float
    xv: float
    members: Tuple[int, ...]
    tangent: bool


def _factor_meetings(d: DomainSpec) -> List[List[_Meeting]]:
    out: List[List[_Meeting]] = []
    for p, f in enumerate(d.factors):
        off = d.hypersurface_offsets[p]
        meetings: List[_Meeting] = []
        for i, k in itertools.combinations(range(len(f.hypersurfaces)), 2):
            for (u, v), tangent in intersect_branches(f.hypersurfaces[i].branch, f.hypersurfaces[k].branch):
                scale = 1e-9 * (1.0 + abs(u) + abs(v))
                for mt in meetings:
                    if abs(mt.x1 - u) <= scale and abs(mt.xv - v) <= scale:
                        mt.members = tuple(sorted(set(mt.members) | {off + i, off + k}))
                        mt.tangent = mt.tangent or tangent
                        break
                else:
                    meetings.append(_Meeting(u, v, (off + i, off + k), tangent))
        out.append(meetings)
    return out


def _minimal_dependent(G: np.ndarray, rows: List[int], rtol: float) -> List[int]:
    """Greedily drop rows while the remaining set stays dependent."""
    keep = list(range(len(rows)))
    for idx in list(keep):
        trial = [i for i in keep if i != idx]
        if not trial:
            continue
        r, _ = numerical_rank(G[trial], rtol)
        if r < len(trial):
            keep = trial
    return [rows[i] for i in keep]


def _strata_x1(d: DomainSpec, meetings: List[List[_Meeting]]) -> Tuple[List[float], List[float]]:
    corner_x1 = sorted({mt.x1 for ms in meetings for mt in ms})
    breaks = sorted({h.branch.a for h in d.hypersurfaces} | set(corner_x1) | {d.t[0], d.t[-1]})
    generic = [0.5 * (a + b) for a, b in zip(breaks, breaks[1:])]
    generic += [breaks[0] - d.span, breaks[-1] + d.span]
    return corner_x1, sorted(generic)


def _choices_at(
    d: DomainSpec, p: int, x1: float, meetings: List[_Meeting], skipped: List[Dict[str, Any]]
) -> List[Tuple[float, Tuple[int, ...]]]:
    """(x_v, hypersurfaces) options for factor p over x1: a meeting point or a single branch.

    Branches within ASYMPTOTE_GAP * span of their asymptote are left out and
    appended to skipped.
    """
    f = d.factors[p]
    off = d.hypersurface_offsets[p]
    out: List[Tuple[float, Tuple[int, ...]]] = []
    for mt in meetings:
        if abs(mt.x1 - x1) <= 1e-9 * (1.0 + abs(x1)):
            out.append((mt.xv, mt.members))
    for i, h in enumerate(f.hypersurfaces):
        hv = h.branch.height(x1)
        if hv is None:
            continue
        if abs(x1 - h.branch.a) > ASYMPTOTE_GAP * d.span:
            out.append((hv, (off + i,)))
        else:
            skipped.append(dict(x1=float(x1), hypersurface=off + i))
    return out


def _check_transversality(
    d: DomainSpec, cfg: NcCheckConfig, rng: np.random.Generator
) -> Tuple[ConditionResult, List[Dict[str, Any]]]:
    meetings = _factor_meetings(d)
    tangents = [(mt.x1, mt.xv) for ms in meetings for mt in ms if mt.tangent]
    corner_x1, generic = _strata_x1(d, meetings)

    rank_table: List[Dict[str, Any]] = []
    deficient: List[Dict[str, Any]] = []
    witnesses: List[List[float]] = []
    skipped: List[Dict[str, Any]] = []
    base = np.asarray(d.base_point, dtype=float)

    for x1 in corner_x1 + generic:
        per_factor = [_choices_at(d, p, x1, meetings[p], skipped) for p in range(len(d.factors))]
        # Only strata that take every factor's options; subsets of an independent set stay independent.
        per_factor = [opts for opts in per_factor if opts]
        total = math.prod(len(opts) for opts in per_factor)
        if total <= MAX_COMBOS:
            combos = list(itertools.product(*per_factor))
        else:
            combos = [tuple(opts[rng.integers(len(opts))] for opts in per_factor) for _ in range(MAX_COMBOS)]

        worst = None
        for combo in combos:
            x = base.copy()
            x[0] = x1
            members: List[int] = []
            for xv, hs in combo:
                x[d.hypersurfaces[hs[0]].v - 1] = xv
                members.extend(hs)
            G = np.vstack([d.polynomials[j].grad(x) for j in members])
            rank, smallest = numerical_rank(G, cfg.rank_rtol)
            row = dict(x1=float(x1), hypersurfaces=sorted(members), size=len(members), rank=rank, smallest_sv=smallest)
            if worst is None or (row["size"] - row["rank"], row["size"]) > (worst["size"] - worst["rank"], worst["size"]):
                worst = row
            if rank < len(members):
                circuit = _minimal_dependent(G, members, cfg.rank_rtol)
                idx = [members.index(j) for j in circuit]
                c_rank, _ = numerical_rank(G[idx], cfg.rank_rtol)
                entry = dict(
                    x1=float(x1),
                    hypersurfaces=sorted(circuit),
                    size=len(circuit),
                    rank=c_rank,
                    stratum=sorted(members),
                    stratum_rank=rank,
                    point=_pt(x),
                )
                if entry["hypersurfaces"] not in [e["hypersurfaces"] for e in deficient]:
                    deficient.append(entry)
                    witnesses.append(_pt(x))
        if worst is not None:
            rank_table.append(worst)

    reasons = []
    if tangents:
        reasons.append("tangential meeting of two branches")
        witnesses = [[u, v] for u, v in tangents] + witnesses
    if deficient:
        reasons.append("rank-deficient intersection set")
        for e in deficient:
            logger.info("transversality: %s at x1=%g has rank %d < %d", e["hypersurfaces"], e["x1"], e["rank"], e["size"])
    if skipped:
        logger.info("transversality: %d branch(es) too close to an asymptote left out of strata", len(skipped))

    measured = dict(
        strata=len(rank_table),
        corner_x1=[float(u) for u in corner_x1],
        deficient=deficient,
        max_size=max((r["size"] for r in rank_table), default=0),
        asymptote_skipped=skipped,
    )
    status: Status = "fail" if reasons else "pass"
    return (
        ConditionResult("5", status, reasons=reasons, witnesses=witnesses[: cfg.max_witnesses], measured=measured),
        rank_table,
    )


def check_nc(d: DomainSpec, cfg: NcCheckConfig | None = None) -> NCReport:
    """Numerically verify the five NC conditions for a built domain.

    Failed checks never raise: each condition carries a status, reasons and
    witness points. Each sampled condition draws from its own child stream of
    cfg.seed, so conditions can be re-run independently.
    """
    cfg = cfg or NcCheckConfig()
    if cfg.samples < 1:
        raise ValueError(f"samples must be >= 1, got {cfg.samples}")
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(4)]

    results = {
        "1": _check_polynomials(d),
        "2": _check_spurious(d, cfg, streams[0]),
        "3": _check_closure(d, cfg, streams[1]),
        "4": _check_hypersurfaces(d, cfg, streams[2]),
    }
    results["5"], rank_table = _check_transversality(d, cfg, streams[3])

    for key, res in sorted(results.items()):
        logger.info("condition %s (%s): %s", key, CONDITION_TITLES[key], res.status)
    return NCReport(conditions=results, rank_table=rank_table)
