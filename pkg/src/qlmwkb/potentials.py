"""Catalogue of the exactly solvable potentials and their parameter validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import SingularPointError, UsageError

KINDS = (
    "ho1d",
    "ho3d",
    "coulomb",
    "cotangent",
    "pt_hole",
    "modified_pt",
    "hylleraas",
    "eckart1d",
    "eckart3d",
    "hulthen",
    "morse",
)

# parameter names accepted per kind, with defaults (the documented parameter sets)
DEFAULT_PARAMS = {
    "ho1d": {},
    "ho3d": {"l": 0},
    "coulomb": {"Z": 1.0, "l": 0},
    "cotangent": {"V0": 1.0, "a": 1.0},
    "pt_hole": {"V1": 1.0, "V2": 2.0, "a": 1.0},
    "modified_pt": {"V0": 6.0, "a": 1.0},
    "hylleraas": {"V0": 20.0, "a": 1.0},
    "eckart1d": {"A": 0.0, "B": 3.0, "a": 1.0},
    "eckart3d": {"lam": 10.0, "b": 0.5, "a": 1.0},
    "hulthen": {"lam": 2.0, "a": 1.0},
    "morse": {"A": 1.0, "B": 1.0, "a": 1.0},
}

ALIASES = {"lambda": "lam", "V_0": "V0", "V_1": "V1", "V_2": "V2"}

RADIAL = {"ho3d", "coulomb", "hylleraas", "eckart3d", "hulthen"}
WITH_L = {"ho3d", "coulomb"}


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    params: Mapping[str, float] = field(default_factory=dict, hash=False)
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown potential {self.kind!r}; choose from {', '.join(KINDS)}")
        merged = dict(DEFAULT_PARAMS[self.kind])
        for name, value in dict(self.params).items():
            name = ALIASES.get(name, name)
            if name not in DEFAULT_PARAMS[self.kind] and name != "l":
                raise UsageError(f"{self.kind} has no parameter {name!r}")
            merged[name] = value
        if "l" in merged:
            l_val = float(merged["l"])
            if l_val < 0 or not l_val.is_integer():
                raise UsageError(f"l must be a non-negative integer, got {merged['l']}")
            if l_val and self.kind not in WITH_L:
                raise UsageError(f"{self.kind} is treated for l = 0 only")
            merged["l"] = int(l_val)
        for name, value in merged.items():
            if name != "l":
                merged[name] = float(value)
        object.__setattr__(self, "params", MappingProxyType(merged))
        if self.hbar <= 0 or self.mass <= 0:
            raise UsageError("hbar and mass must be positive")
        _validate(self.kind, merged)

    def __getitem__(self, name):
        return self.params[name]

    @property
    def l(self) -> int:
        return int(self.params.get("l", 0))

    @property
    def radial(self) -> bool:
        return self.kind in RADIAL

    @property
    def index_base(self) -> int:
        """First valid quantum number (Hylleraas counts from 1)."""
        return 1 if self.kind == "hylleraas" else 0

    @property
    def z_scale(self) -> float:
        """lambda = sqrt(2m)/hbar, so that z = lambda * x."""
        return math.sqrt(2.0 * self.mass) / self.hbar

    @property
    def domain(self) -> tuple:
        if self.radial:
            return (0.0, math.inf)
        if self.kind == "cotangent":
            return (0.0, self["a"])
        if self.kind == "pt_hole":
            return (0.0, self["a"] / 2.0)
        return (-math.inf, math.inf)

    @property
    def asymptote(self) -> float:
        """Continuum threshold: lowest limit of V at an open end (inf if confining)."""
        if self.kind in ("ho1d", "ho3d", "cotangent", "pt_hole"):
            return math.inf
        if self.kind == "eckart1d":
            return min(0.0, -self["A"])
        return 0.0

    def V(self, x):
        """Potential at x (numpy, complex allowed)."""
        return _potential(self, np.asarray(x), derivative=False)

    def dV(self, x):
        return _potential(self, np.asarray(x), derivative=True)

    def centrifugal(self, x):
        l = self.l
        if not l:
            return np.zeros_like(np.asarray(x, dtype=complex))
        return self.hbar**2 * l * (l + 1) / (2.0 * self.mass * np.asarray(x) ** 2)

    def wall_exponent(self) -> float | None:
        """s with psi ~ (x - x_left)^s at a singular/hard left end, None for open ends."""
        hb2m = 2.0 * self.mass / self.hbar**2
        if self.kind in ("ho3d", "coulomb"):
            return self.l + 1.0
        if self.kind in ("hylleraas", "hulthen"):
            return 1.0
        if self.kind == "eckart3d":
            return 0.5 + 0.5 * math.sqrt(1.0 + 4.0 * hb2m * self["b"] * self["a"] ** 2)
        if self.kind == "cotangent":
            g = hb2m * self["V0"] * (self["a"] / math.pi) ** 2
            return 0.5 + math.sqrt(0.25 + g)
        if self.kind == "pt_hole":
            g = hb2m * self["V1"] * (self["a"] / math.pi) ** 2
            return 0.5 + math.sqrt(0.25 + g)
        return None

    def right_wall_exponent(self) -> float | None:
        hb2m = 2.0 * self.mass / self.hbar**2
        if self.kind == "cotangent":
            return self.wall_exponent()
        if self.kind == "pt_hole":
            g = hb2m * self["V2"] * (self["a"] / math.pi) ** 2
            return 0.5 + math.sqrt(0.25 + g)
        return None

    def describe(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "hbar": self.hbar, "mass": self.mass}


def make_potential(kind: str, hbar: float = 1.0, mass: float = 1.0, **params) -> PotentialSpec:
    return PotentialSpec(kind, params, hbar=hbar, mass=mass)


def _validate(kind: str, p: dict):
    def positive(*names):
        for n in names:
            if not p[n] > 0:
                raise UsageError(f"{kind}: {n} must be > 0, got {p[n]}")

    if "a" in p:
        positive("a")
    if kind in ("cotangent", "modified_pt", "hylleraas"):
        positive("V0")
    elif kind == "pt_hole":
        positive("V1", "V2")
    elif kind == "eckart1d":
        if not p["B"] > abs(p["A"]):
            raise UsageError(f"eckart1d requires B > |A|, got A={p['A']}, B={p['B']}")
    elif kind == "eckart3d":
        # b = 0 is the Hulthen special case and stays admissible
        positive("lam")
        if p["b"] < 0:
            raise UsageError(f"eckart3d: b must be >= 0, got {p['b']}")
    elif kind == "hulthen":
        positive("lam")
    elif kind == "morse":
        positive("A", "B")
    elif kind == "coulomb":
        positive("Z")


def _potential(spec: PotentialSpec, x, derivative: bool):
    p = spec.params
    kind = spec.kind
    if kind in ("ho1d", "ho3d"):
        return x if derivative else 0.5 * x**2
    if kind == "coulomb":
        if np.any(x == 0):
            raise SingularPointError("Coulomb potential is singular at r = 0")
        return p["Z"] / x**2 if derivative else -p["Z"] / x
    if kind == "cotangent":
        u = np.pi * x / p["a"]
        s, c = np.sin(u), np.cos(u)
        if np.any(s == 0):
            raise SingularPointError("cotangent potential is singular at its walls")
        if derivative:
            return -2.0 * p["V0"] * (np.pi / p["a"]) * c / s**3
        return p["V0"] * (c / s) ** 2
    if kind == "pt_hole":
        u = np.pi * x / p["a"]
        s, c = np.sin(u), np.cos(u)
        if np.any(s == 0) or np.any(c == 0):
            raise SingularPointError("Poschl-Teller hole is singular at its walls")
        if derivative:
            return (np.pi / p["a"]) * (-2.0 * p["V1"] * c / s**3 + 2.0 * p["V2"] * s / c**3)
        return p["V1"] / s**2 + p["V2"] / c**2
    if kind in ("modified_pt", "hylleraas"):
        u = x / p["a"]
        ch = np.cosh(u)
        if derivative:
            return 2.0 * p["V0"] * np.tanh(u) / (p["a"] * ch**2)
        return -p["V0"] / ch**2
    if kind == "eckart1d":
        # s = t/(1+t), r = 1/(1+t) with t = exp(-x/a); an overflowing exp just sends one factor to 0
        with np.errstate(over="ignore"):
            s = 1.0 / (1.0 + np.exp(x / p["a"]))
            r = 1.0 / (1.0 + np.exp(-x / p["a"]))
        if derivative:
            return s * r * (p["A"] + p["B"] * (r - s)) / p["a"]
        return -p["A"] * s - p["B"] * s * r
    if kind in ("eckart3d", "hulthen"):
        t = np.exp(-x / p["a"])
        if np.any(t == 1):
            raise SingularPointError(f"{kind} potential is singular at r = 0")
        lam = p["lam"]
        b = p.get("b", 0.0)
        if derivative:
            return (-lam / (1 - t) ** 2 + b * (1 + t) / (1 - t) ** 3) * (-t / p["a"])
        return -lam * t / (1 - t) + b * t / (1 - t) ** 2
    if kind == "morse":
        e1 = np.exp(-x / p["a"])
        if derivative:
            return (-2.0 * p["A"] * e1**2 + p["B"] * e1) / p["a"]
        return p["A"] * e1**2 - p["B"] * e1
    raise UsageError(kind)  # pragma: no cover
