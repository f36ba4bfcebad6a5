"""Shared result type for every verifier in the package."""

from __future__ import annotations

import functools
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

PASS = "pass"
FAIL = "fail"
ERROR = "error"

# name -> function, filled by @checker; the CLI registry is tested against it
CHECKERS: dict[str, Callable[..., "CheckReport"]] = {}


def to_jsonable(value: Any) -> Any:
    """Recursively convert witnesses/params to JSON-safe values.

    Fractions become ``"p/q"`` strings (integers stay ``"p"``), tuples and
    arrays become lists, numpy scalars become Python scalars.
    """
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, frozenset, set)):
        items = sorted(value, key=repr) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(v) for v in items]
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return repr(value)


@dataclass
class CheckReport:
    """Outcome of one check.

    ``status`` is ``"pass"``, ``"fail"`` or ``"error"``. A failing report
    always carries a witness; passing reports may carry one too, as a
    certificate (e.g. the separating pair found by ``is_separated``).
    """

    name: str
    status: str
    max_error: float | Fraction | None = None
    witness: Any = None
    params: dict[str, Any] = field(default_factory=dict)
    duration_ms: int = 0

    def __post_init__(self):
        if self.status not in (PASS, FAIL, ERROR):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == FAIL and self.witness is None:
            raise ValueError(f"failing report {self.name!r} needs a witness")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status,
            "max_error": to_jsonable(self.max_error),
            "witness": to_jsonable(self.witness),
            "params": to_jsonable(self.params),
            "duration_ms": self.duration_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def text_line(self) -> str:
        err = "-" if self.max_error is None else f"{float(self.max_error):.3e}"
        return f"{self.name} {self.status} {err}"


def report(name: str, ok: bool, *, max_error=None, witness=None, **params) -> CheckReport:
    return CheckReport(name, PASS if ok else FAIL, max_error=max_error,
                       witness=witness, params=params)


def checker(fn: Callable[..., CheckReport]) -> Callable[..., CheckReport]:
    """Register ``fn`` as a checker and stamp ``duration_ms`` on its report."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.duration_ms = int((time.perf_counter() - start) * 1000)
        return rep

    CHECKERS[f"{fn.__module__}.{fn.__qualname__}"] = wrapper
    return wrapper
