"""Small delay-distribution specs shared by the orchestrator and app models."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_PARAMS = {
    "fixed": ({"value"}, set()),
    "uniform": ({"low", "high"}, set()),
    "lognormal": ({"mean", "sigma"}, {"min", "max"}),
}


@dataclass(frozen=True)
class Distribution:
    """A non-negative delay distribution.

    ``lognormal`` is parameterised by its arithmetic ``mean`` and the
    log-space ``sigma``; optional ``min``/``max`` clip each draw.
    """

    kind: str
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _PARAMS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        required, optional = _PARAMS[self.kind]
        keys = set(self.params)
        if missing := required - keys:
            raise ValueError(f"{self.kind}: missing parameter(s) {sorted(missing)}")
        if extra := keys - required - optional:
            raise ValueError(f"{self.kind}: unknown parameter(s) {sorted(extra)}")
        p = self.params
        if self.kind == "fixed" and p["value"] < 0:
            raise ValueError("fixed delay must be >= 0")
        if self.kind == "uniform" and not 0 <= p["low"] <= p["high"]:
            raise ValueError("uniform needs 0 <= low <= high")
        if self.kind == "lognormal":
            if p["mean"] <= 0 or p["sigma"] < 0:
                raise ValueError("lognormal needs mean > 0 and sigma >= 0")
            if p.get("min", 0.0) < 0 or p.get("min", 0.0) > p.get("max", math.inf):
                raise ValueError("lognormal clip bounds need 0 <= min <= max")

    @classmethod
    def fixed(cls, value: float) -> "Distribution":
        return cls("fixed", {"value": float(value)})

    @classmethod
    def uniform(cls, low: float, high: float) -> "Distribution":
        return cls("uniform", {"low": float(low), "high": float(high)})

    @classmethod
    def lognormal(cls, mean: float, sigma: float, *, min: float | None = None,
                  max: float | None = None) -> "Distribution":
        params = {"mean": float(mean), "sigma": float(sigma)}
        if min is not None:
            params["min"] = float(min)
        if max is not None:
            params["max"] = float(max)
        return cls("lognormal", params)

    def draw(self, rng: np.random.Generator) -> float:
        p = self.params
        if self.kind == "fixed":
            return p["value"]
        if self.kind == "uniform":
            return float(rng.uniform(p["low"], p["high"]))
        sigma = p["sigma"]
        x = float(rng.lognormal(math.log(p["mean"]) - sigma * sigma / 2, sigma))
        return min(max(x, p.get("min", 0.0)), p.get("max", math.inf))

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, d: dict) -> "Distribution":
        d = dict(d)
        kind = d.pop("kind", None)
        if kind is None:
            raise ValueError("distribution needs a 'kind'")
        return cls(kind, {k: float(v) for k, v in d.items()})
