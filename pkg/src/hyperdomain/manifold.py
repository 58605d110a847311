from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from hyperdomain.algebra import Polynomial, numerical_rank
from hyperdomain.domain import DomainSpec, contains

logger = logging.getLogger(__name__)

# Values of f_j below SNAP_REL * scale are treated as exactly on the boundary.
SNAP_REL = 1e-12
RESIDUAL_TOL = 1e-9
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class PointOnM:
    x: Tuple[float, ...]
    y: Tuple[float, ...]

    @property
    def coords(self) -> np.ndarray:
        return np.array(self.x + self.y, dtype=float)


@dataclass(frozen=True)
class SphereBlock:
    j: int
    sphere_dim: int
    radius: float


@dataclass(frozen=True)
class PreimageModel:
    """f^{-1}(x) as a product of round spheres; radius 0 means the sphere collapsed to a point."""

    x: Tuple[float, ...]
    blocks: Tuple[SphereBlock, ...]

    @property
    def is_product_of_spheres(self) -> bool:
        return all(b.radius > 0 for b in self.blocks)

    @property
    def dimension(self) -> int:
        return sum(b.sphere_dim for b in self.blocks if b.radius > 0)

    def describe(self) -> str:
        parts = [f"S^{b.sphere_dim}({b.radius:.6g})" if b.radius > 0 else "pt" for b in self.blocks]
        return " x ".join(parts)


@dataclass(frozen=True)
class ManifoldSystem:
    """Equations F_j(x, y_j) = f_j(x) - |y_j|^2 = 0, one per hypersurface.

    Coordinates are ordered x_1..x_n followed by the blocks y_1..y_L.
    """

    domain: DomainSpec
    blocks: Tuple[int, ...]
    polys: Tuple[Polynomial, ...]

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def L(self) -> int:
        return len(self.blocks)

    @property
    def ambient_dim(self) -> int:
        return self.n + sum(self.blocks)

    @property
    def manifold_dim(self) -> int:
        return self.ambient_dim - self.L

    @property
    def m(self) -> int:
        """Dimension of the sphere S^m appearing in the level-set picture."""
        return self.ambient_dim - 1

    @property
    def fiber_dim(self) -> int:
        """Dimension of a regular fiber of f."""
        return self.manifold_dim - 1

    @property
    def is_compact(self) -> bool:
        """False as soon as some slice is unbounded, i.e. some interval carries label 1."""
        return not any(f.kind == "open" for f in self.domain.factors)

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        out, acc = [], self.n
        for d in self.blocks:
            out.append(acc)
            acc += d
        return tuple(out)

    def block(self, j: int) -> slice:
        return slice(self.offsets[j], self.offsets[j] + self.blocks[j])

    def variable_names(self) -> List[str]:
        names = [f"x{i + 1}" for i in range(self.n)]
        for j, d in enumerate(self.blocks):
            names += [f"y{j + 1}_{i + 1}" for i in range(d)]
        return names

    def residuals(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.array([p.eval(z) for p in self.polys])

    def jacobian(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.vstack([p.grad(z) for p in self.polys])

    def residual_scale(self, z) -> np.ndarray:
        """Per equation, 1 + the term magnitude of F_j at z."""
        z = np.asarray(z, dtype=float)
        return 1.0 + np.array([p.magnitude(z) for p in self.polys])


def build_system(d: DomainSpec, blocks: Sequence[int] | None = None) -> ManifoldSystem:
    L = d.L
    blocks = (2,) * L if blocks is None else tuple(int(b) for b in blocks)
    if len(blocks) != L:
        raise ValueError(f"need one block size per hypersurface ({L}), got {len(blocks)}")
    if any(b < 1 for b in blocks):
        raise ValueError(f"block sizes must be >= 1, got {list(blocks)}")

    N = d.n + sum(blocks)
    polys = []
    start = d.n
    for f, size in zip(d.polynomials, blocks):
        terms = f.embed(N).terms
        for i in range(size):
            e = [0] * N
            e[start + i] = 2
            terms[tuple(e)] = -1.0
        polys.append(Polynomial(N, terms))
        start += size

    s = ManifoldSystem(domain=d, blocks=blocks, polys=tuple(polys))
    logger.debug("system: n=%d L=%d N=%d dim=%d", d.n, L, N, s.manifold_dim)
    return s


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def boundary_radii(s: ManifoldSystem, X: np.ndarray) -> np.ndarray:
    """sqrt(f_j(x)) per row and hypersurface, with values lost in rounding snapped to 0."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    vals = np.column_stack([p.eval(X) for p in s.domain.polynomials])
    scale = np.column_stack([p.magnitude(X) for p in s.domain.polynomials])
    vals = np.where(vals <= SNAP_REL * scale, 0.0, vals)
    return np.sqrt(vals)


def lift_many(
    s: ManifoldSystem,
    X,
    rng: np.random.Generator,
    signs: np.ndarray | None = None,
    zero_blocks: Iterable[int] = (),
) -> np.ndarray:
    """Rows (x, y) on M above each row of X, y_j uniform on the sphere of radius sqrt(f_j(x)).

    signs (rows x L, entries +-1) fixes the point on every 0-sphere block.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    radii = boundary_radii(s, X)
    for j in zero_blocks:
        radii[:, j] = 0.0
    parts = [X]
    for j, d in enumerate(s.blocks):
        g = rng.standard_normal((X.shape[0], d))
        if d == 1 and signs is not None:
            g = np.abs(g) * signs[:, j : j + 1]
        direction = g / np.linalg.norm(g, axis=1, keepdims=True)
        parts.append(direction * radii[:, j : j + 1])
    return np.hstack(parts)


def as_point(s: ManifoldSystem, z: np.ndarray) -> PointOnM:
    return PointOnM(tuple(float(v) for v in z[: s.n]), tuple(float(v) for v in z[s.n :]))


def sample_fiber_point(s: ManifoldSystem, x, seed=None, tol: float = 1e-9) -> PointOnM:
    """A point of f^{-1}(x): y_j uniform on the sphere of radius sqrt(f_j(x))."""
    x = np.asarray(x, dtype=float)
    if x.shape != (s.n,):
        raise ValueError(f"x needs {s.n} coordinates, got shape {x.shape}")
    if not contains(s.domain, x, closed=True, tol=tol):
        raise ValueError(f"x = {x.tolist()} lies outside the closed domain")
    z = lift_many(s, x[None, :], _rng(seed))[0]
    return as_point(s, z)


def sample_domain(d: DomainSpec, count: int, R: float, rng: np.random.Generator) -> np.ndarray:
    """Points of the closed domain with x1 uniform on [t1, tl]; unbounded slices are cut at R."""
    t1, tl = d.t[0], d.t[-1]
    X = np.zeros((count, d.n))
    X[:, 0] = rng.uniform(t1, tl, count)
    for f in d.factors:
        lo, hi = f.envelopes(X[:, 0], tol=0.0)
        hi_eff = np.where(np.isfinite(hi), hi, np.where(lo < R, R, lo + R))
        X[:, f.v - 1] = lo + (hi_eff - lo) * rng.uniform(0.0, 1.0, count)
    return X


def sample_manifold(s: ManifoldSystem, count: int, R: float | None = None, seed=0) -> List[PointOnM]:
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    R = 10.0 * s.domain.span if R is None else float(R)
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    rng = _rng(seed)
    X = sample_domain(s.domain, count, R, rng)
    Z = lift_many(s, X, rng)
    return [as_point(s, z) for z in Z]


def _checked_jacobian(s: ManifoldSystem, p: PointOnM, tol: float) -> np.ndarray:
    z = p.coords
    if z.shape != (s.ambient_dim,):
        raise ValueError(f"point needs {s.ambient_dim} coordinates, got {z.shape[0]}")
    res = np.abs(s.residuals(z))
    worst = float(np.max(res))
    if np.any(res > tol * s.residual_scale(z)):
        raise ValueError(f"point is not on M: max |F_j| = {worst:.3g}")
    return s.jacobian(z)


def jacobian_rank(s: ManifoldSystem, p: PointOnM, tol: float = RESIDUAL_TOL, rtol: float = RANK_RTOL) -> Tuple[int, float]:
    J = _checked_jacobian(s, p, tol)
    return numerical_rank(J, rtol)


def _unit_rows(M: np.ndarray) -> np.ndarray:
    """Rows scaled to unit length; zero rows stay zero."""
    norms = np.linalg.norm(M, axis=1, keepdims=True)
    return M / np.where(norms > 0.0, norms, 1.0)


def is_singular_point_of_f(s: ManifoldSystem, p: PointOnM, tol: float = RESIDUAL_TOL, rtol: float = RANK_RTOL) -> bool:
    """Whether e_1 lies in the row space of dF, i.e. df_1 vanishes on T_pM.

    Rows are normalised to unit length before both rank tests.
    """
    J = _unit_rows(_checked_jacobian(s, p, tol))
    e1 = np.zeros((1, J.shape[1]))
    e1[0, 0] = 1.0
    r, _ = numerical_rank(J, rtol, 1.0)
    r_aug, _ = numerical_rank(np.vstack([J, e1]), rtol, 1.0)
    return r_aug == r


def is_singular_point_of_projection(
    s: ManifoldSystem, p: PointOnM, tol: float = RESIDUAL_TOL, rtol: float = RANK_RTOL
) -> bool:
    """Whether the full projection (x, y) -> x fails to be submersive at p."""
    J = _unit_rows(_checked_jacobian(s, p, tol))
    proj = np.hstack([np.eye(s.n), np.zeros((s.n, s.ambient_dim - s.n))])
    r_aug, _ = numerical_rank(np.vstack([J, proj]), rtol, 1.0)
    return r_aug < s.L + s.n


def preimage_model(s: ManifoldSystem, x, tol: float = 1e-9) -> PreimageModel:
    x = np.asarray(x, dtype=float)
    if x.shape != (s.n,):
        raise ValueError(f"x needs {s.n} coordinates, got shape {x.shape}")
    if not contains(s.domain, x, closed=True, tol=tol):
        raise ValueError(f"x = {x.tolist()} lies outside the closed domain")
    radii = boundary_radii(s, x[None, :])[0]
    blocks = tuple(SphereBlock(j, d - 1, float(r)) for j, (d, r) in enumerate(zip(s.blocks, radii)))
    return PreimageModel(tuple(float(v) for v in x), blocks)


