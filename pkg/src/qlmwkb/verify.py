"""Verification suites run by ``qlmwkb verify``.

Each check returns a :class:`Check`; a suite is a list of them.  Checks never
raise: an unexpected exception becomes a failed check carrying the message.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from . import qlm_engine, wkb_engine
from .potentials import make_potential
from .spectra import exact_levels, qlm_levels, wkb_levels, bound_state_count
from .shooting import shooting_oracle

SUITES = ("formal", "spectra", "numeric")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "seconds": round(self.seconds, 3)}


def _run(name, fn) -> Check:
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, bool(passed), detail, time.perf_counter() - start)


# -- formal -------------------------------------------------------------------


def _golden(fixtures):
    def wkb():
        rows = wkb_engine.golden_compare(wkb_engine.wkb_terms(8), wkb_engine.load_fixture("wkb", fixtures))
        bad = [r["order"] for r in rows if not r["equal"]]
        return len(rows) == 8 and not bad, f"orders differing: {bad}"

    def qlm():
        bad = []
        for p, name in ((1, "qlm1"), (2, "qlm2")):
            got = qlm_engine.qlm_pth_series(p, 8).series
            rows = wkb_engine.golden_compare(got, wkb_engine.load_fixture(name, fixtures))
            bad += [(p, r["order"]) for r in rows if not r["equal"]]
        return not bad, f"(iterate, order) differing: {bad}"

    return wkb, qlm


def _two_p_law():
    wkb = wkb_engine.wkb_terms(8).series
    got = [qlm_engine.match_prefix(qlm_engine.qlm_pth_series(p, 8), wkb) for p in range(4)]
    full = qlm_engine.qlm_pth_series(3, 8).series == wkb
    return got == [1, 2, 4, 8] and full, f"match_prefix p=0..3: {got}; y_3 == WKB: {full}"


def _residuals():
    problems = []
    series = wkb_engine.wkb_terms(12).series
    res = wkb_engine.riccati_residual(series)
    problems += [f"wkb residual order {m}" for m in range(12) if not res[m].is_zero()]
    problems += [f"wkb {m}: {why}" for m, why in wkb_engine.structure_violations(series)]
    prev = qlm_engine.qlm_pth_series(0, 10).series
    for p in range(1, 4):
        cur = qlm_engine.qlm_iterate_series(prev)
        lin = qlm_engine.linearized_residual(cur, prev)
        problems += [f"qlm {p} linearized order {m}" for m in range(10) if not lin[m].is_zero()]
        problems += [f"qlm {p} order {m}: {why}" for m, why in wkb_engine.structure_violations(cur)]
        prev = cur
    return not problems, "; ".join(problems[:5]) or "all orders vanish"


def formal_checks(fixtures=None) -> list:
    wkb, qlm = _golden(fixtures)
    return [
        _run("golden WKB series", wkb),
        _run("golden QLM iterates 1 and 2", qlm),
        _run("2^p law", _two_p_law),
        _run("residual and structure properties", _residuals),
    ]


# -- spectra ------------------------------------------------------------------

DOCUMENTED_SETS = [
    ("ho1d", {}),
    ("ho3d", {"l": 0}),
    ("ho3d", {"l": 2}),
    ("coulomb", {"Z": 1, "l": 0}),
    ("coulomb", {"Z": 1, "l": 2}),
    ("cotangent", {"V0": 1, "a": 1}),
    ("pt_hole", {"V1": 1, "V2": 2, "a": 1}),
    ("modified_pt", {"V0": 6, "a": 1}),
    ("hylleraas", {"V0": 20, "a": 1}),
    ("eckart1d", {"A": 0, "B": 3, "a": 1}),
    ("eckart1d", {"A": 1, "B": 8, "a": 1}),
    ("eckart3d", {"lam": 10, "b": 0.5, "a": 1}),
    ("hulthen", {"lam": 2, "a": 1}),
    ("hulthen", {"lam": 8, "a": 1}),
]


def _valid_levels(p, limit):
    count = bound_state_count(p)
    top = limit if math.isinf(count) else min(limit, count)
    return range(p.index_base, p.index_base + top)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _exact_equals_qlm():
    worst = 0.0
    for kind, params in DOCUMENTED_SETS:
        p = make_potential(kind, **params)
        for n in _valid_levels(p, 6):
            worst = max(worst, _rel(qlm_levels(p, n).energy, exact_levels(p, n).energy))
    for params in ({"A": 1, "B": 1, "a": 1}, {"A": 1, "B": 6, "a": 1}):
        p = make_potential("morse", **params)
        for n in _valid_levels(p, 6):
            e = exact_levels(p, n).energy
            worst = max(worst, _rel(qlm_levels(p, n).energy, e), _rel(wkb_levels(p, n).energy, e))
    return worst <= 1e-12, f"worst relative gap {worst:.3g}"


ORACLE_SETS = [
    ("hulthen", {"lam": 2, "a": 1}),
    ("morse", {"A": 1, "B": 1, "a": 1}),
    ("modified_pt", {"V0": 6, "a": 1}),
    ("eckart1d", {"A": 0, "B": 3, "a": 1}),
]


def _oracle():
    worst = 0.0
    for kind, params in ORACLE_SETS:
        p = make_potential(kind, **params)
        for n in _valid_levels(p, 3):
            worst = max(worst, _rel(shooting_oracle(p, n), qlm_levels(p, n).energy))
    return worst <= 1e-6, f"worst relative gap {worst:.3g}"


def _discrepancy():
    p = make_potential("hulthen", a=1, lam=2)
    w, q = wkb_levels(p, 0).energy, qlm_levels(p, 0).energy
    ok = abs(w + 7.03125) <= 1e-12 * 7.03125 and abs(q + 1.125) <= 1e-12 * 1.125
    same = []
    for kind in ("ho1d", "coulomb"):
        pk = make_potential(kind)
        same += [abs(wkb_levels(pk, n).energy - qlm_levels(pk, n).energy) for n in range(4)]
    return ok and max(same) <= 1e-12, f"hulthen wkb={w!r} qlm={q!r}; ho1d/coulomb max gap {max(same):.3g}"


def _reductions():
    worst = 0.0
    for lam, a in ((2.0, 1.0), (8.0, 1.0), (5.0, 1.3)):
        e3 = make_potential("eckart3d", lam=lam, b=0.0, a=a)
        h = make_potential("hulthen", lam=lam, a=a)
        for n in _valid_levels(h, 3):
            worst = max(worst, _rel(qlm_levels(e3, n).energy, qlm_levels(h, n).energy))
    for W, a in ((6.0, 0.5), (7.0, 0.8), (2.5, 1.1)):
        e1 = make_potential("eckart1d", A=0.0, B=4 * W, a=a)
        m = make_potential("modified_pt", V0=W, a=2 * a)
        for n in _valid_levels(m, 3):
            worst = max(worst, _rel(qlm_levels(e1, n).energy, qlm_levels(m, n).energy))
    for W, a in ((1.0, 1.0), (3.0, 1.2), (0.4, 0.7)):
        pt = make_potential("pt_hole", V1=W, V2=W, a=a)
        cot = make_potential("cotangent", V0=W, a=a)
        for n in range(3):
            worst = max(worst, _rel(qlm_levels(pt, n).energy, 4 * (qlm_levels(cot, n).energy + W)))
    return worst <= 1e-12, f"worst relative gap {worst:.3g}"


def spectra_checks() -> list:
    return [
        _run("exact = QLM energy formulas", _exact_equals_qlm),
        _run("shooting oracle agreement", _oracle),
        _run("WKB vs QLM discrepancy", _discrepancy),
        _run("reduction identities", _reductions),
    ]


# -- numeric ------------------------------------------------------------------


def _numeric_oscillator():
    from .riccati_numeric import SolveConfig, asymptotic_residue_fit, first_iterate_closed_form, solve_qlm

    p = make_potential("ho1d")
    hist = solve_qlm(p, 2.5, 4, SolveConfig())
    alpha = asymptotic_residue_fit(hist.iterates[3], "oscillator")
    closed = first_iterate_closed_form(p, 2.5, SolveConfig())
    gap = closed.sup_diff(hist.iterates[1])
    wide = solve_qlm(p, 2.5, 4, SolveConfig(imag_shift=1.0))
    orders = wide.convergence_orders()
    ok = abs(alpha - 2.0) <= 1e-4 and gap <= 1e-6 and orders and min(orders) >= 1.8
    return ok, f"alpha={alpha:.8f}; closed-form gap {gap:.3g}; orders {[round(o, 3) for o in orders]}"


def numeric_checks() -> list:
    return [_run("numeric QLM on the oscillator", _numeric_oscillator)]


def run_suite(suite: str, fixtures=None) -> list:
    if suite == "all":
        return formal_checks(fixtures) + spectra_checks() + numeric_checks()
    if suite == "formal":
        return formal_checks(fixtures)
    if suite == "spectra":
        return spectra_checks()
    if suite == "numeric":
        return numeric_checks()
    raise ValueError(suite)
