"""Exact, WKB and QLM energy levels of the catalogued potentials.

Each potential carries a list of poles with residues and orientations.  The
quantization relation sums ``orientation * residue`` (times the cut factor) and
equates it to ``n`` for QLM or ``n + 1/2`` for WKB.  ``exact_levels`` uses the
textbook closed forms and is kept independent of the pole data on purpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np
from scipy import optimize

from .errors import UsageError
from .potentials import PotentialSpec

METHODS = ("exact", "wkb", "qlm")
LOCATIONS = ("zero", "one", "infinity")
INFINITE_KINDS = {"ho1d", "ho3d", "coulomb", "cotangent", "pt_hole"}
ROOT_FOUND = {"eckart1d", "eckart3d"}
# root tolerance on the energy; well inside the 1e-12 contract
ROOT_XTOL = 1e-15
ROOT_RTOL = 4 * float(np.finfo(float).eps)
COUNT_TOL = 1e-12


@dataclass(frozen=True)
class PoleDatum:
    location: str
    residue: Callable[[float], float]
    orientation: int
    label: str = ""
    depends_on_energy: bool = True

    def __post_init__(self):
        if self.orientation not in (-1, 1):
            raise UsageError(f"orientation must be +1 or -1, got {self.orientation}")
        if self.location not in LOCATIONS:
            raise UsageError(f"unknown pole location {self.location!r}")

    def contribution(self, E: float) -> float:
        return self.orientation * self.residue(E)


@dataclass(frozen=True)
class QuantizationRelation:
    poles: tuple
    cut_symmetry: Fraction
    mode: str
    index_base: int = 0

    def residue_sum(self, E: float) -> float:
        return sum(pole.contribution(E) for pole in self.poles)

    def rhs(self, n: int) -> float:
        return (n - self.index_base) + (0.5 if self.mode == "wkb" else 0.0)

    def constant_part(self) -> float:
        return sum(pole.contribution(0.0) for pole in self.poles if not pole.depends_on_energy)

    def mismatch(self, E: float, n: int) -> float:
        return float(self.cut_symmetry) * self.residue_sum(E) - self.rhs(n)


@dataclass(frozen=True)
class LevelResult:
    kind: str
    n: int
    l: int | None
    method: str
    energy: float
    status: str
    provenance: Mapping = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def assemble_quantization(poles, cut_symmetry=Fraction(1), mode: str = "qlm", index_base: int = 0):
    if not poles:
        raise UsageError("need at least one pole")
    if mode not in ("wkb", "qlm"):
        raise UsageError(f"mode must be wkb or qlm, got {mode!r}")
    return QuantizationRelation(tuple(poles), Fraction(cut_symmetry), mode, index_base)


# -- per-potential constants ---------------------------------------------------


def _c(p: PotentialSpec) -> float:
    """a sqrt(2m)/hbar."""
    return p["a"] * math.sqrt(2.0 * p.mass) / p.hbar


def _c2(p: PotentialSpec) -> float:
    """2 m a^2 / hbar^2, computed without an intermediate square root."""
    return 2.0 * p.mass * p["a"] ** 2 / p.hbar**2


def _omega_hbar(p: PotentialSpec) -> float:
    return p.hbar / math.sqrt(p.mass)


def _trig_unit(p: PotentialSpec) -> float:
    """pi^2 hbar^2 / (2 m a^2)."""
    return (math.pi * p.hbar / p["a"]) ** 2 / (2.0 * p.mass)


def _exp_unit(p: PotentialSpec) -> float:
    """hbar^2 / (2 m a^2)."""
    return p.hbar**2 / (2.0 * p.mass * p["a"] ** 2)


def _wall(strength_over_unit: float) -> float:
    """1/2 + sqrt(1/4 + g): the regular exponent of a g/x^2 wall."""
    return 0.5 + math.sqrt(0.25 + strength_over_unit)


def _sqrt_pos(x: float) -> float:
    return math.sqrt(x) if x >= 0 else math.nan


def pole_data(p: PotentialSpec, mode: str) -> list:
    """Poles of the iterate at the fixed point (qlm) or of the zero-order term (wkb)."""
    if mode not in ("wkb", "qlm"):
        raise UsageError(f"mode must be wkb or qlm, got {mode!r}")
    wkb = mode == "wkb"
    kind = p.kind
    l = p.l
    if kind == "ho1d":
        w = _omega_hbar(p)
        shift = 0.0 if wkb else 0.5
        return [PoleDatum("infinity", lambda E: E / w - shift, 1, "E/hw" + ("" if wkb else " - 1/2"))]
    if kind == "ho3d":
        w = _omega_hbar(p)
        origin = l + 0.5 if wkb else l + 1.0
        shift = 0.0 if wkb else 0.5
        return [
            PoleDatum("zero", lambda E: origin, -1, "l+1/2" if wkb else "l+1", False),
            PoleDatum("infinity", lambda E: E / w - shift, 1, "E/hw" + ("" if wkb else " - 1/2")),
        ]
    if kind == "coulomb":
        Z, m, hb = p["Z"], p.mass, p.hbar
        origin = l + 0.5 if wkb else l + 1.0
        return [
            PoleDatum("zero", lambda E: origin, -1, "l+1/2" if wkb else "l+1", False),
            PoleDatum(
                "infinity",
                lambda E: Z * math.sqrt(m) / (hb * _sqrt_pos(-2.0 * E)) if E < 0 else math.nan,
                1,
                "Z sqrt(m)/(hbar sqrt(2|E|))",
            ),
        ]
    if kind == "cotangent":
        unit = _trig_unit(p)
        V0 = p["V0"]
        wall = math.sqrt(V0 / unit) if wkb else _wall(V0 / unit)
        return [
            PoleDatum("zero", lambda E: wall, -1, "mu" if wkb else "lambda", False),
            PoleDatum("infinity", lambda E: _sqrt_pos((E + V0) / unit), 1, "sqrt((E+V0)/e_a)"),
        ]
    if kind == "pt_hole":
        unit = _trig_unit(p)
        if wkb:
            w1, w2 = math.sqrt(p["V1"] / unit), math.sqrt(p["V2"] / unit)
        else:
            w1, w2 = _wall(p["V1"] / unit), _wall(p["V2"] / unit)
        return [
            PoleDatum("zero", lambda E: w1 / 2.0, -1, "lambda1/2", False),
            PoleDatum("one", lambda E: w2 / 2.0, -1, "lambda2/2", False),
            PoleDatum("infinity", lambda E: _sqrt_pos(E / unit) / 2.0, 1, "sqrt(E/e_a)/2"),
        ]
    if kind in ("modified_pt", "hylleraas"):
        unit = _exp_unit(p)
        g = p["V0"] / unit
        if kind == "modified_pt":
            origin = math.sqrt(g) if wkb else _wall(g) - 1.0
            scale = 1.0
        else:
            origin = math.sqrt(g) if wkb else _wall(g) - 2.0
            scale = 0.5
        return [
            PoleDatum("zero", lambda E: -scale * origin, -1, "fixed point of the wall term", False),
            PoleDatum("infinity", lambda E: -scale * _sqrt_pos(-E / unit), 1, "-kappa"),
        ]
    if kind in ("eckart1d", "eckart3d", "hulthen"):
        c = _c(p)
        if kind == "eckart1d":
            A, B = p["A"], p["B"]
            middle = -c * math.sqrt(B) if wkb else -0.5 * (math.sqrt(1.0 + 4.0 * _c2(p) * B) - 1.0)
            return [
                PoleDatum("zero", lambda E: c * _sqrt_pos(-E), -1, "c sqrt(eps)"),
                PoleDatum("one", lambda E: middle, -1, "c sqrt(B)" if wkb else "-(sqrt(1+8ma^2B/hbar^2)-1)/2", False),
                PoleDatum("infinity", lambda E: -c * _sqrt_pos(-E - A), 1, "-c sqrt(eps-A)"),
            ]
        lam = p["lam"]
        b = p.params.get("b", 0.0)
        poles = [PoleDatum("zero", lambda E: c * _sqrt_pos(-E), -1, "c sqrt(eps)")]
        if wkb:
            if b:
                poles.append(PoleDatum("one", lambda E: c * math.sqrt(b), -1, "c sqrt(b)", False))
        else:
            one = 0.5 + 0.5 * math.sqrt(1.0 + 4.0 * _c2(p) * b)
            poles.append(PoleDatum("one", lambda E: one, -1, "(1+sqrt(1+8ma^2b/hbar^2))/2", False))
        poles.append(PoleDatum("infinity", lambda E: c * _sqrt_pos(lam - E), 1, "c sqrt(eps+lambda)"))
        return poles
    if kind == "morse":
        c = _c(p)
        depth = c * p["B"] / (2.0 * math.sqrt(p["A"]))
        origin = depth if wkb else depth - 0.5
        return [
            PoleDatum("zero", lambda E: -origin, -1, "-(cB/(2 sqrt A)" + (")" if wkb else " - 1/2)"), False),
            PoleDatum("infinity", lambda E: -c * _sqrt_pos(-E), 1, "-c sqrt(eps)"),
        ]
    raise UsageError(kind)  # pragma: no cover


def cut_symmetry(p: PotentialSpec) -> Fraction:
    return Fraction(1, 2) if p.kind == "ho3d" else Fraction(1)


def quantization_relation(p: PotentialSpec, mode: str) -> QuantizationRelation:
    return assemble_quantization(pole_data(p, mode), cut_symmetry(p), mode, p.index_base)


# -- bound-state counts --------------------------------------------------------


def _count_below(x: float) -> int:
    """Number of integers j >= 0 with j < x, treating x within rounding of an integer as that integer."""
    if not math.isfinite(x):
        raise UsageError(f"bound count undefined for x={x}")
    return max(0, math.ceil(x - COUNT_TOL * max(1.0, abs(x))))


def _eckart1d_G(p: PotentialSpec, eps: float) -> float:
    c = _c(p)
    return 0.5 * (math.sqrt(1.0 + 4.0 * _c2(p) * p["B"]) - 1.0) - c * math.sqrt(eps) - c * math.sqrt(eps - p["A"])


def bound_state_count(p: PotentialSpec):
    """Number of valid levels, or ``math.inf``."""
    kind = p.kind
    if kind in INFINITE_KINDS:
        return math.inf
    if kind in ("modified_pt", "hylleraas"):
        s = _wall(p["V0"] / _exp_unit(p)) - 0.5
        return _count_below(s - 0.5 if kind == "modified_pt" else (s - 1.5) / 2.0)
    c = _c(p)
    if kind == "morse":
        return _count_below(c * p["B"] / (2.0 * math.sqrt(p["A"])) - 0.5)
    if kind == "hulthen":
        return _count_below(math.sqrt(_c2(p) * p["lam"]) - 1.0)
    if kind == "eckart3d":
        k0 = 0.5 + 0.5 * math.sqrt(1.0 + 4.0 * _c2(p) * p["b"])
        return _count_below(math.sqrt(_c2(p) * p["lam"]) - k0)
    if kind == "eckart1d":
        eps_lo = max(0.0, p["A"])
        return _count_below(_eckart1d_G(p, eps_lo))
    raise UsageError(kind)  # pragma: no cover


# -- closed forms ----------------------------------------------------------------


def _exact_energy(p: PotentialSpec, n: int) -> tuple:
    kind, l = p.kind, p.l
    if kind == "ho1d":
        return _omega_hbar(p) * (n + 0.5), "ho1d.exact"
    if kind == "ho3d":
        return _omega_hbar(p) * (2 * n + l + 1.5), "ho3d.exact"
    if kind == "coulomb":
        return -p.mass * p["Z"] ** 2 / (2.0 * p.hbar**2 * (n + l + 1) ** 2), "coulomb.exact"
    if kind == "cotangent":
        unit = _trig_unit(p)
        return -p["V0"] + unit * (n + 0.5 + math.sqrt(p["V0"] / unit + 0.25)) ** 2, "cotangent.exact"
    if kind == "pt_hole":
        unit = _trig_unit(p)
        s1 = math.sqrt(p["V1"] / unit + 0.25)
        s2 = math.sqrt(p["V2"] / unit + 0.25)
        return unit * (2 * n + 1 + s1 + s2) ** 2, "pt_hole.exact"
    if kind == "modified_pt":
        unit = _exp_unit(p)
        return -unit * (math.sqrt(p["V0"] / unit + 0.25) - (n + 0.5)) ** 2, "modified_pt.exact"
    if kind == "hylleraas":
        unit = _exp_unit(p)
        return -unit * (math.sqrt(p["V0"] / unit + 0.25) - (2 * n - 0.5)) ** 2, "hylleraas.exact"
    c = _c(p)
    if kind == "hulthen":
        lam = 2.0 * p.mass * p["a"] ** 2 * p["lam"] / p.hbar**2
        return (
            -(p.hbar**2 / (2.0 * p.mass)) * ((n + 1) ** 2 - lam) ** 2 / (4.0 * p["a"] ** 2 * (n + 1) ** 2),
            "hulthen.exact",
        )
    if kind == "morse":
        A, B = p["A"], p["B"]
        return (
            -(B / 2.0) * (math.sqrt(B / (2.0 * A)) - p.hbar * (n + 0.5) / (p["a"] * math.sqrt(B * p.mass))) ** 2,
            "morse.exact",
        )
    if kind == "eckart1d":
        A, B = p["A"], p["B"]
        R = (0.5 * (math.sqrt(1.0 + 8.0 * p.mass * p["a"] ** 2 * B / p.hbar**2) - 1.0) - n) / c
        return -(((R * R + A) / (2.0 * R)) ** 2), "eckart1d.exact_inverse"
    if kind == "eckart3d":
        lam, b = p["lam"], p["b"]
        S = (n + 0.5 + 0.5 * math.sqrt(1.0 + 8.0 * p.mass * p["a"] ** 2 * b / p.hbar**2)) / c
        return -(((lam - S * S) / (2.0 * S)) ** 2), "eckart3d.exact_inverse"
    raise UsageError(kind)  # pragma: no cover


def _explicit_from_relation(p: PotentialSpec, n: int, mode: str) -> tuple:
    """Invert the quantization relation in closed form where it is explicit."""
    rel = quantization_relation(p, mode)
    # target = energy-dependent part of the residue sum at the level
    target = rel.rhs(n) / float(rel.cut_symmetry) - rel.constant_part()
    kind = p.kind
    if kind in ("ho1d", "ho3d"):
        shift = 0.0 if mode == "wkb" else 0.5
        return _omega_hbar(p) * (target + shift), f"{kind}.{mode}"
    if kind == "coulomb":
        # Z sqrt(m)/(hbar sqrt(2|E|)) = target
        return -p.mass * p["Z"] ** 2 / (2.0 * p.hbar**2 * target**2), f"coulomb.{mode}"
    if kind == "cotangent":
        return _trig_unit(p) * target**2 - p["V0"], f"cotangent.{mode}"
    if kind == "pt_hole":
        return _trig_unit(p) * (2.0 * target) ** 2, f"pt_hole.{mode}"
    if kind in ("modified_pt", "hylleraas"):
        scale = 1.0 if kind == "modified_pt" else 0.5
        kappa = -target / scale
        return -_exp_unit(p) * kappa**2, f"{kind}.{mode}"
    if kind == "morse":
        eps_root = -target / _c(p)
        return -(eps_root**2), f"morse.{mode}"
    if kind == "hulthen":
        # c (sqrt(eps + lam) - sqrt(eps)) = target
        S = target / _c(p)
        return -(((p["lam"] - S * S) / (2.0 * S)) ** 2), f"hulthen.{mode}"
    raise UsageError(f"no explicit relation for {kind}")  # pragma: no cover


def _energy_bracket(p: PotentialSpec, n: int, mode: str) -> tuple:
    if p.kind == "eckart1d":
        A, B = p["A"], p["B"]
        return -((A + B) ** 2) / (4.0 * B), -max(0.0, A)
    # eckart3d: c (sqrt(eps+lam) - sqrt(eps)) < c lam / (2 sqrt(eps)) bounds the root
    c = _c(p)
    rel = quantization_relation(p, mode)
    K = rel.rhs(n) - rel.constant_part()  # value of c(sqrt(eps+lam) - sqrt(eps)) at the root
    if K <= 0:
        return None
    eps_hi = (c * p["lam"] / (2.0 * K)) ** 2
    return -eps_hi, 0.0


def _root_found(p: PotentialSpec, n: int, mode: str) -> tuple:
    rel = quantization_relation(p, mode)
    bracket = _energy_bracket(p, n, mode)
    if bracket is None:
        return None, {"formula": f"{p.kind}.{mode}", "bracket": None}
    lo, hi = bracket
    f_lo, f_hi = rel.mismatch(lo, n), rel.mismatch(hi, n)
    prov = {"formula": f"{p.kind}.{mode}", "bracket": [lo, hi]}
    # the residue sum increases with E on the bracket; a root needs f_lo < 0 < f_hi
    if not (f_lo < 0.0 < f_hi):
        return None, prov
    root, info = optimize.bisect(
        lambda E: rel.mismatch(E, n), lo, hi, xtol=ROOT_XTOL, rtol=ROOT_RTOL, full_output=True
    )
    prov["iterations"] = info.iterations
    return root, prov


# -- public level API ----------------------------------------------------------


def _prepare(p: PotentialSpec, n: int, l):
    if not isinstance(p, PotentialSpec):
        raise UsageError("expected a PotentialSpec")
    if l is not None and l != p.l:
        params = dict(p.params)
        params["l"] = l
        p = PotentialSpec(p.kind, params, hbar=p.hbar, mass=p.mass)
    if isinstance(n, bool) or int(n) != n:
        raise UsageError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < p.index_base:
        raise UsageError(f"{p.kind} levels start at n = {p.index_base}, got {n}")
    return p, n


def _level(p: PotentialSpec, n: int, l, method: str) -> LevelResult:
    p, n = _prepare(p, n, l)
    l_out = p.l if p.kind in ("ho3d", "coulomb") else None
    if n - p.index_base >= bound_state_count(p):
        return LevelResult(p.kind, n, l_out, method, math.nan, "no_bound_state", {"reason": "beyond bound count"})
    if method == "exact":
        energy, formula = _exact_energy(p, n)
        prov = {"formula": formula}
    elif p.kind in ROOT_FOUND:
        energy, prov = _root_found(p, n, method)
        if energy is None:
            return LevelResult(p.kind, n, l_out, method, math.nan, "no_bound_state", prov)
    else:
        energy, formula = _explicit_from_relation(p, n, method)
        prov = {"formula": formula}
    return LevelResult(p.kind, n, l_out, method, float(energy), "ok", prov)


def exact_levels(p: PotentialSpec, n: int, l: int | None = None) -> LevelResult:
    return _level(p, n, l, "exact")


def qlm_levels(p: PotentialSpec, n: int, l: int | None = None) -> LevelResult:
    return _level(p, n, l, "qlm")


def wkb_levels(p: PotentialSpec, n: int, l: int | None = None) -> LevelResult:
    return _level(p, n, l, "wkb")


LEVEL_FUNCS = {"exact": exact_levels, "wkb": wkb_levels, "qlm": qlm_levels}


def level_table(p: PotentialSpec, n_max: int, methods=METHODS) -> list:
    """Rows ``n, E_exact, E_wkb, E_qlm, dE_qlm, dE_wkb`` plus per-method results."""
    if n_max < 0:
        raise UsageError(f"n_max must be >= 0, got {n_max}")
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}")
    rows = []
    for n in range(p.index_base, p.index_base + n_max + 1):
        results = {m: LEVEL_FUNCS[m](p, n) for m in methods}
        energy = {m: results[m].energy if m in results else math.nan for m in METHODS}
        rows.append(
            {
                "n": n,
                "E_exact": energy["exact"],
                "E_wkb": energy["wkb"],
                "E_qlm": energy["qlm"],
                "dE_qlm": abs(energy["qlm"] - energy["exact"]),
                "dE_wkb": abs(energy["wkb"] - energy["exact"]),
                "results": results,
            }
        )
    return rows
