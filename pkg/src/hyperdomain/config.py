from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

SEED_VAR = 'HYPERDOMAIN_SEED'


@dataclass
class Settings:
    seed: int = 0


def _env_file_value(path: Path, key: str) -> str | None:
    """Value of the last `key=value` (or `export key=value`) line, outer quotes removed."""
    value = None
    for line in path.read_text(encoding='utf-8').splitlines():
        name, sep, rest = line.strip().removeprefix('export ').partition('=')
        if not sep or name.strip() != key:
            continue
        rest = rest.strip()
        if len(rest) >= 2 and rest[0] == rest[-1] and rest[0] in '\'"':
            rest = rest[1:-1]
        value = rest
    return value


def load_settings(env_file: Path | None = None) -> Settings:
    """Load run settings.

    Priority:
    1) process environment variable HYPERDOMAIN_SEED
    2) fallback to reading ~/.hyperdomain.env (key=value per line)
    3) seed 0

    A --seed flag on the command line overrides whatever this returns.
    """
    raw = os.environ.get(SEED_VAR)
    if raw is None:
        p = env_file if env_file is not None else Path.home() / '.hyperdomain.env'
        if p.exists():
            raw = _env_file_value(p, SEED_VAR)
    if raw is None or raw == '':
        return Settings()
    try:
        seed = int(raw)
    except ValueError:
        raise ValueError(f"{SEED_VAR} must be an integer, got {raw!r}") from None
    return Settings(seed=seed)
