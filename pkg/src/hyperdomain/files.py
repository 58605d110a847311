from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from hyperdomain.algebra import Branch, HypersurfaceSpec, Polynomial
from hyperdomain.domain import DomainSpec, FactorCorner, FactorDomain, build_domain
from hyperdomain.manifold import ManifoldSystem, build_system

FILE_VERSION = 1


def _finite_or_none(obj: Any) -> Any:
    """Replace non-finite floats by None so the document stays strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating, np.integer)):
        return _finite_or_none(obj.item())
    if isinstance(obj, dict):
        return {str(k): _finite_or_none(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_or_none(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _finite_or_none(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, shortest round-trip floats, inf -> null."""
    return json.dumps(_finite_or_none(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(obj: Any, path: str | Path) -> Path:
    p = Path(path).expanduser()
    if p.parent != Path("."):
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(obj))
    return p


def read_json(path: str | Path) -> Dict[str, Any]:
    blob = json.loads(Path(path).expanduser().read_text())
    if not isinstance(blob, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return blob


def _factor_to_dict(f: FactorDomain) -> Dict[str, Any]:
    return dict(
        kind=f.kind,
        plane=list(f.plane),
        t_lo=f.t_lo,
        t_hi=f.t_hi,
        rho=f.rho,
        first_interval=f.first_interval,
        branches=[
            dict(a=h.branch.a, b=h.branch.b, c=h.branch.c, side=h.branch.side, sigma=h.sigma) for h in f.hypersurfaces
        ],
        corners=[dict(x1=c.x1, xv=c.xv, pair=list(c.pair)) for c in f.corners],
    )


def _factor_from_dict(blob: Dict[str, Any]) -> FactorDomain:
    u, v = (int(k) for k in blob["plane"])
    if u != 1:
        raise ValueError(f"factor plane must start at x1, got {blob['plane']}")
    hs = tuple(
        HypersurfaceSpec((u, v), Branch(float(b["a"]), float(b["b"]), float(b["c"]), b["side"]), int(b["sigma"]))
        for b in blob["branches"]
    )
    cs = tuple(FactorCorner(float(c["x1"]), float(c["xv"]), (int(c["pair"][0]), int(c["pair"][1]))) for c in blob["corners"])
    return FactorDomain(
        kind=blob["kind"],
        v=v,
        hypersurfaces=hs,
        corners=cs,
        t_lo=float(blob["t_lo"]),
        t_hi=float(blob["t_hi"]),
        rho=float(blob["rho"]),
        first_interval=bool(blob.get("first_interval", False)),
    )


def domain_to_dict(d: DomainSpec) -> Dict[str, Any]:
    return dict(
        version=FILE_VERSION,
        t=list(d.t),
        labels=list(d.labels),
        mode=d.mode,
        pinch_rho=d.pinch_rho,
        n=d.n,
        L=d.L,
        base_point=list(d.base_point),
        factors=[_factor_to_dict(f) for f in d.factors],
    )


def domain_from_dict(blob: Dict[str, Any]) -> DomainSpec:
    """Read a stored domain and check it against a fresh build from (t, labels, mode)."""
    try:
        version = int(blob["version"])
        if version != FILE_VERSION:
            raise ValueError(f"unsupported domain file version {version}")
        stored = DomainSpec(
            t=tuple(float(x) for x in blob["t"]),
            labels=tuple(int(x) for x in blob["labels"]),
            mode=blob["mode"],
            factors=tuple(_factor_from_dict(f) for f in blob["factors"]),
            n=int(blob["n"]),
            base_point=tuple(float(x) for x in blob["base_point"]),
            pinch_rho=float(blob["pinch_rho"]),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed domain file: {exc!r}") from None

    rebuilt = build_domain(stored.t, stored.labels, stored.mode, stored.pinch_rho)
    if rebuilt != stored:
        raise ValueError("domain file does not match the domain built from its t, labels and mode")
    return rebuilt


def write_domain(d: DomainSpec, path: str | Path) -> Path:
    return write_json(domain_to_dict(d), path)


def read_domain(path: str | Path) -> DomainSpec:
    blob = read_json(path)
    if "domain" in blob and "factors" not in blob:
        blob = blob["domain"]
    return domain_from_dict(blob)


def polynomial_to_dict(p: Polynomial, names: List[str]) -> Dict[str, Any]:
    terms = []
    for exps, coeff in sorted(p.terms.items(), reverse=True):
        terms.append(dict(coeff=coeff, exponents={names[i]: e for i, e in enumerate(exps) if e}))
    return dict(terms=terms)


def polynomial_from_dict(blob: Dict[str, Any], names: List[str]) -> Polynomial:
    index = {name: i for i, name in enumerate(names)}
    terms = {}
    for term in blob["terms"]:
        e = [0] * len(names)
        for name, power in term["exponents"].items():
            if name not in index:
                raise ValueError(f"unknown variable {name!r}")
            e[index[name]] = int(power)
        terms[tuple(e)] = float(term["coeff"])
    return Polynomial(len(names), terms)


def probe_point(s: ManifoldSystem) -> np.ndarray:
    """Fixed off-manifold point used to cross-check an exported system."""
    return np.concatenate([np.asarray(s.domain.base_point, dtype=float), np.full(sum(s.blocks), 0.5)])


def system_to_dict(s: ManifoldSystem) -> Dict[str, Any]:
    names = s.variable_names()
    z = probe_point(s)
    return dict(
        version=FILE_VERSION,
        domain=domain_to_dict(s.domain),
        blocks=list(s.blocks),
        ambient_dim=s.ambient_dim,
        manifold_dim=s.manifold_dim,
        variables=names,
        polynomials=[polynomial_to_dict(p, names) for p in s.polys],
        probe=dict(point=z.tolist(), values=[p.eval(z) for p in s.polys]),
    )


def system_from_dict(blob: Dict[str, Any]) -> ManifoldSystem:
    """Rebuild a system and confirm the stored polynomials agree with it at the probe point."""
    d = domain_from_dict(blob["domain"])
    s = build_system(d, blob["blocks"])
    names = list(blob["variables"])
    if names != s.variable_names():
        raise ValueError("variable list does not match the system layout")
    stored = [polynomial_from_dict(p, names) for p in blob["polynomials"]]
    if stored != list(s.polys):
        raise ValueError("stored polynomials differ from the rebuilt system")
    z = np.asarray(blob["probe"]["point"], dtype=float)
    if [p.eval(z) for p in stored] != [float(v) for v in blob["probe"]["values"]]:
        raise ValueError("stored polynomials do not reproduce the probe values")
    return s


def write_system(s: ManifoldSystem, path: str | Path) -> Path:
    return write_json(system_to_dict(s), path)
