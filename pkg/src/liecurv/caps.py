"""Size caps for assembled operators, overridable through ``LIE_CURV_CAPS``.

The variable holds ``key=value`` pairs separated by commas, e.g.
``LIE_CURV_CAPS="sym2=20000,wedge4=5000000"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "LIE_CURV_CAPS"


class CapExceeded(RuntimeError):
    """An assembly would exceed a configured size cap."""


@dataclass(frozen=True)
class Caps:
    sym2: int = 10_000            # max d(d+1)/2 for an assembled Omega matrix
    wedge4: int = 2_000_000       # max C(d,4) for an assembled Lambda matrix
    exact_dim: int = 45           # max d for exact nullity work on Omega
    float_dim: int = 140          # max d for dense float eigenvalues


def caps(env: dict | None = None) -> Caps:
    raw = (env if env is not None else os.environ).get(ENV_VAR, "").strip()
    base = Caps()
    if not raw:
        return base
    known = {f.name for f in fields(Caps)}
    updates = {}
    for item in raw.split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in known:
            raise ValueError(f"bad {ENV_VAR} entry {item!r}; known keys: {sorted(known)}")
        updates[key] = int(value)
    return replace(base, **updates)


def check(name: str, value: int, limit: int, advice: str = "") -> None:
    if value > limit:
        msg = f"{name} = {value} exceeds cap {limit}"
        if advice:
            msg += f"; {advice}"
        raise CapExceeded(msg)
