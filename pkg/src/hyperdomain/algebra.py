from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Literal, Mapping, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Side = Literal["plus", "minus"]
Bound = Literal["lower", "upper"]

# Relative tolerances for the closed-form intersection of two branches.
DISC_TOL = 1e-12
HEIGHT_TOL = 1e-9
TANGENT_TOL = 1e-9


class Polynomial:
    """Sparse multivariate polynomial with real coefficients.

    Terms are stored as an exponent matrix (one row per monomial) and a
    coefficient vector. Zero coefficients are dropped on construction and rows
    are kept sorted, so two polynomials with the same terms compare equal and
    evaluate bit-identically.
    """

    __slots__ = ("num_vars", "_exps", "_coeffs", "_active")

    def __init__(self, num_vars: int, terms: Mapping[Sequence[int], float]):
        num_vars = int(num_vars)
        if num_vars < 1:
            raise ValueError(f"num_vars must be >= 1, got {num_vars}")

        merged: Dict[Tuple[int, ...], float] = {}
        for exps, coeff in terms.items():
            e = tuple(int(k) for k in exps)
            if len(e) != num_vars:
                raise ValueError(f"exponent vector {e} has length {len(e)}, expected {num_vars}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            merged[e] = merged.get(e, 0.0) + float(coeff)

        items = sorted((e, c) for e, c in merged.items() if c != 0.0)
        exps_arr = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), num_vars)
        coeffs_arr = np.array([c for _, c in items], dtype=float)
        exps_arr.flags.writeable = False
        coeffs_arr.flags.writeable = False

        self.num_vars = num_vars
        self._exps = exps_arr
        self._coeffs = coeffs_arr
        self._active = tuple(int(k) for k in np.nonzero(exps_arr.any(axis=0))[0])

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls(num_vars, {})

    @property
    def terms(self) -> Dict[Tuple[int, ...], float]:
        return {tuple(int(k) for k in e): float(c) for e, c in zip(self._exps, self._coeffs)}

    @property
    def exponents(self) -> np.ndarray:
        return self._exps

    @property
    def coefficients(self) -> np.ndarray:
        return self._coeffs

    @property
    def degree(self) -> int:
        if self._coeffs.size == 0:
            return 0
        return int(self._exps.sum(axis=1).max())

    @property
    def variables(self) -> Tuple[int, ...]:
        """0-based indices of the variables that occur in some term."""
        return self._active

    @property
    def coefficient_scale(self) -> float:
        return float(np.abs(self._coeffs).max()) if self._coeffs.size else 0.0

    def eval(self, x) -> float | np.ndarray:
        """Evaluate at one point (1-D input) or at a batch of rows (2-D input)."""
        arr = np.asarray(x, dtype=float)
        if arr.ndim not in (1, 2) or arr.shape[-1] != self.num_vars:
            raise ValueError(f"expected points with {self.num_vars} coordinates, got shape {arr.shape}")
        if self._coeffs.size == 0:
            return 0.0 if arr.ndim == 1 else np.zeros(arr.shape[0])
        mons = np.prod(arr[..., None, :] ** self._exps, axis=-1)
        out = mons @ self._coeffs
        return float(out) if arr.ndim == 1 else out

    __call__ = eval

    def magnitude(self, x) -> float | np.ndarray:
        """Sum of |c_k x^e_k| over the terms; bounds the rounding error of eval."""
        arr = np.abs(np.asarray(x, dtype=float))
        if arr.ndim not in (1, 2) or arr.shape[-1] != self.num_vars:
            raise ValueError(f"expected points with {self.num_vars} coordinates, got shape {arr.shape}")
        if self._coeffs.size == 0:
            return 0.0 if arr.ndim == 1 else np.zeros(arr.shape[0])
        out = np.prod(arr[..., None, :] ** self._exps, axis=-1) @ np.abs(self._coeffs)
        return float(out) if arr.ndim == 1 else out

    def grad(self, x) -> np.ndarray:
        """Gradient at a single point. Only variables that occur are differentiated."""
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.num_vars,):
            raise ValueError(f"expected a point with {self.num_vars} coordinates, got shape {arr.shape}")
        out = np.zeros(self.num_vars)
        for k in self._active:
            e_k = self._exps[:, k]
            mask = e_k > 0
            reduced = np.array(self._exps[mask])
            reduced[:, k] -= 1
            out[k] = float(np.prod(arr ** reduced, axis=1) @ (self._coeffs[mask] * e_k[mask]))
        return out

    def embed(self, num_vars: int) -> "Polynomial":
        """Same polynomial viewed in a larger ambient space (new variables appended)."""
        if num_vars < self.num_vars:
            raise ValueError(f"cannot embed {self.num_vars} variables into {num_vars}")
        pad = (0,) * (num_vars - self.num_vars)
        return Polynomial(num_vars, {e + pad: c for e, c in self.terms.items()})

    def _check_same_space(self, other: "Polynomial") -> None:
        if other.num_vars != self.num_vars:
            raise ValueError(f"polynomials live in {self.num_vars} and {other.num_vars} variables")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_same_space(other)
        terms = self.terms
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return Polynomial(self.num_vars, terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, scalar: float) -> "Polynomial":
        return Polynomial(self.num_vars, {e: float(scalar) * c for e, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.num_vars, tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        return f"Polynomial(num_vars={self.num_vars}, terms={self.terms!r})"


@dataclass(frozen=True)
class Branch:
    """One connected component of the hyperbola (u - a)(v - b) = c.

    "plus" is the component on which (v - b) has the sign of c, "minus" the
    other one. Over its support the component is the graph v = b + c / (u - a).
    """

    a: float
    b: float
    c: float
    side: Side

    def __post_init__(self):
        for name in ("a", "b", "c"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"branch parameter {name} must be finite, got {val}")
            object.__setattr__(self, name, val)
        if self.c == 0.0:
            raise ValueError("branch needs c != 0")
        if self.side not in ("plus", "minus"):
            raise ValueError(f"side must be 'plus' or 'minus', got {self.side!r}")

    @property
    def orientation(self) -> int:
        """Sign of (u - a) over the support."""
        s = 1 if self.c > 0 else -1
        return s if self.side == "plus" else -s

    @property
    def support(self) -> Tuple[float, float]:
        return (self.a, math.inf) if self.orientation > 0 else (-math.inf, self.a)

    def other(self) -> "Branch":
        return Branch(self.a, self.b, self.c, "minus" if self.side == "plus" else "plus")

    def in_support(self, u: float) -> bool:
        return (u > self.a) if self.orientation > 0 else (u < self.a)

    def height(self, u: float) -> float | None:
        if not self.in_support(u):
            return None
        return self.b + self.c / (u - self.a)

    def heights(self, u) -> np.ndarray:
        """Vectorised height; NaN outside the support."""
        arr = np.asarray(u, dtype=float)
        inside = (arr > self.a) if self.orientation > 0 else (arr < self.a)
        with np.errstate(divide="ignore", invalid="ignore"):
            h = self.b + self.c / (arr - self.a)
        return np.where(inside, h, np.nan)

    def residual(self, u: float, v: float) -> float:
        return (u - self.a) * (v - self.b) - self.c


def branch_height(branch: Branch, u: float) -> float | None:
    return branch.height(u)


def branch_contains(branch: Branch, point: Sequence[float], tol: float = 1e-9) -> bool:
    """Whether (u, v) lies on the branch, up to a tolerance relative to the point's scale."""
    u, v = float(point[0]), float(point[1])
    if not branch.in_support(u):
        return False
    scale = 1.0 + abs(branch.c) + abs(u - branch.a) * (1.0 + abs(v - branch.b))
    return abs(branch.residual(u, v)) <= tol * scale


@dataclass(frozen=True)
class HypersurfaceSpec:
    """A branch placed in the coordinate plane (x_u, x_v) together with a sign.

    The defining polynomial is sigma * ((x_u - a)(x_v - b) - c); the open
    domain side is where it is positive.
    """

    plane: Tuple[int, int]
    branch: Branch
    sigma: int

    def __post_init__(self):
        u, v = (int(k) for k in self.plane)
        if u < 1 or v < 1 or u == v:
            raise ValueError(f"plane must be two distinct 1-based coordinates, got {self.plane}")
        object.__setattr__(self, "plane", (u, v))
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma}")

    @property
    def u(self) -> int:
        return self.plane[0]

    @property
    def v(self) -> int:
        return self.plane[1]

    @property
    def bound(self) -> Bound:
        """Whether the branch bounds the domain slice from below or from above."""
        return "lower" if self.sigma * self.branch.orientation > 0 else "upper"

    def value(self, xu: float, xv: float) -> float:
        return self.sigma * self.branch.residual(xu, xv)


def hypersurface_poly(h: HypersurfaceSpec, n: int) -> Polynomial:
    """Expand sigma * ((x_u - a)(x_v - b) - c) into a polynomial in n variables."""
    if max(h.plane) > n:
        raise IndexError(f"plane {h.plane} does not fit in {n} coordinates")
    a, b, c = h.branch.a, h.branch.b, h.branch.c
    s = float(h.sigma)

    def mono(*idx: int) -> Tuple[int, ...]:
        e = [0] * n
        for k in idx:
            e[k - 1] += 1
        return tuple(e)

    terms = {
        mono(h.u, h.v): s,
        mono(h.u): -s * b,
        mono(h.v): -s * a,
        mono(): s * (a * b - c),
    }
    return Polynomial(n, terms)


def _quadratic_roots(
    qa: float, qb: float, qc: float, disc_scale: float | None = None
) -> List[Tuple[float, bool]]:
    """Real roots of qa u^2 + qb u + qc, flagging near-double roots.

    The discriminant counts as zero within DISC_TOL * disc_scale; disc_scale
    defaults to max(qb^2, |4 qa qc|) and should bound the magnitude of the
    terms the coefficients were summed from.
    """
    if qa == 0.0:
        if qb == 0.0:
            return []
        return [(-qc / qb, False)]
    disc = qb * qb - 4.0 * qa * qc
    scale = max(qb * qb, abs(4.0 * qa * qc)) if disc_scale is None else disc_scale
    if disc < -DISC_TOL * scale:
        return []
    if abs(disc) <= DISC_TOL * scale:
        return [(-qb / (2.0 * qa), True)]
    sq = math.sqrt(disc)
    q = -0.5 * (qb + math.copysign(sq, qb))
    return [(q / qa, False), (qc / q, False)]


def intersect_branches(b1: Branch, b2: Branch) -> List[Tuple[Tuple[float, float], bool]]:
    """All intersection points of two branches in a common plane, sorted by u.

    Each entry is ((u, v), tangent). Identical branches overlap in a curve and
    raise ValueError.
    """
    if b1 == b2:
        raise ValueError(f"degenerate overlap: identical branches {b1}")

    # Solve in w = u - s with s the midpoint of the asymptotes.
    s = 0.5 * (b1.a + b2.a)
    d1 = s - b1.a
    d2 = s - b2.a
    db = b1.b - b2.b
    qa = db
    qb = db * (d1 + d2) + b1.c - b2.c
    qc = db * d1 * d2 + b1.c * d2 - b2.c * d1
    qb_mag = abs(db * (d1 + d2)) + abs(b1.c) + abs(b2.c)
    qc_mag = abs(db * d1 * d2) + abs(b1.c * d2) + abs(b2.c * d1)
    disc_scale = qb_mag * qb_mag + 4.0 * abs(qa) * qc_mag

    out: List[Tuple[Tuple[float, float], bool]] = []
    seen: List[float] = []
    for w, double_root in _quadratic_roots(qa, qb, qc, disc_scale):
        e1, e2 = w + d1, w + d2
        u = s + w
        if not (e1 * b1.orientation > 0 and e2 * b2.orientation > 0):
            continue
        h1 = b1.b + b1.c / e1
        h2 = b2.b + b2.c / e2
        if abs(h1 - h2) > HEIGHT_TOL * (1.0 + abs(h1) + abs(h2)):
            continue
        v = 0.5 * (h1 + h2)
        g1 = np.array([v - b1.b, e1])
        g2 = np.array([v - b2.b, e2])
        det = g1[0] * g2[1] - g1[1] * g2[0]
        tangent = double_root or abs(det) <= TANGENT_TOL * float(np.linalg.norm(g1) * np.linalg.norm(g2))
        if any(abs(w - p) <= HEIGHT_TOL * (1.0 + abs(w)) for p in seen):
            continue
        seen.append(w)
        out.append(((u, v), bool(tangent)))

    out.sort(key=lambda item: item[0][0])
    if any(t for _, t in out):
        logger.debug("tangential contact between %s and %s", b1, b2)
    return out


def numerical_rank(matrix, rtol: float = 1e-10, scale: float | None = None) -> Tuple[int, float]:
    """Rank from singular values above rtol * scale.

    scale defaults to the largest row norm. Returns (rank, smallest retained
    singular value); a zero matrix has rank 0.
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    if m.size == 0:
        return 0, 0.0
    if scale is None:
        scale = float(np.max(np.linalg.norm(m, axis=1)))
    if scale == 0.0:
        return 0, 0.0
    sv = np.linalg.svd(m, compute_uv=False)
    keep = sv > rtol * scale
    rank = int(keep.sum())
    return rank, (float(sv[keep].min()) if rank else 0.0)
