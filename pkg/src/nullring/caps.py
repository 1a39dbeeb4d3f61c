"""Resource caps.

Defaults can be overridden with the ``NULLRING_CAPS`` environment variable,
e.g. ``NULLRING_CAPS="sumset_limit=1048576,enumeration=200000"``, or locally
with :func:`use_caps`.
"""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
import os
from dataclasses import dataclass

ENV_VAR = "NULLRING_CAPS"


@dataclass(frozen=True)
class Caps:
    enumeration: int = 10**6  # digit tuples / support products
    sumset_limit: int = 1 << 24  # largest sumset enumeration limit
    refine_depth: int = 20  # doublings in binary digit refinement
    bigint_bits: int = 1 << 20  # above this, cover bounds go to log space

    def replace(self, **changes) -> "Caps":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


def parse_caps(text: str, base: Caps | None = None) -> Caps:
    base = base or Caps()
    names = {f.name for f in dataclasses.fields(Caps)}
    changes = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in names:
            raise ValueError(f"bad {ENV_VAR} entry {item!r}; known caps: {sorted(names)}")
        number = int(value.strip())
        if number < 1:
            raise ValueError(f"cap {key} must be positive")
        changes[key] = number
    return dataclasses.replace(base, **changes)


def env_caps() -> Caps:
    return parse_caps(os.environ.get(ENV_VAR, ""))


_current: contextvars.ContextVar[Caps | None] = contextvars.ContextVar("nullring_caps", default=None)


def current_caps() -> Caps:
    caps = _current.get()
    return caps if caps is not None else env_caps()


@contextlib.contextmanager
def use_caps(caps: Caps):
    token = _current.set(caps)
    try:
        yield caps
    finally:
        _current.reset(token)
