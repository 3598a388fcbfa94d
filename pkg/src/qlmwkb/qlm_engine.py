"""Formal g-expansion of quasilinearization iterates.

Each iterate is the finite sum ``y_p = sum_n L_n`` with

    L_0 = f = (y_{p-1}^2 - k^2) / (2 y_{p-1}),
    L_n = -(g d/dr L_{n-1}) / (2 y_{p-1}),

which is exact through the order cap because ``g d/dr`` raises the order by one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UsageError
from .formal_series import GradedSeries, series_reciprocal
from .wkb_engine import K_SQUARED, Y0

MAX_ITERATE = 4
MAX_ORDER = 14


@dataclass(frozen=True)
class QlmFormalIterate:
    p: int
    series: GradedSeries


def _check_leading(y_prev: GradedSeries):
    if y_prev[0] != Y0:
        raise UsageError(f"iterate must start with i k, got {y_prev[0].to_text()}")


def qlm_f(y_prev: GradedSeries) -> GradedSeries:
    _check_leading(y_prev)
    k2 = GradedSeries.constant(K_SQUARED, y_prev.order_cap)
    return (y_prev * y_prev - k2) * series_reciprocal(2 * y_prev)


def qlm_iterate_series(y_prev: GradedSeries) -> GradedSeries:
    _check_leading(y_prev)
    n = y_prev.order_cap
    inv = series_reciprocal(2 * y_prev)
    k2 = GradedSeries.constant(K_SQUARED, n)
    term = (y_prev * y_prev - k2) * inv
    total = term
    for i in range(1, n):
        term = -(term.g_diff() * inv)
        # L_i starts at order >= i; terms past the cap vanish identically
        assert all(term[m].is_zero() for m in range(i)), "L_n below its leading order"
        total = total + term
    return total


def qlm_pth_series(p: int, order_cap: int) -> QlmFormalIterate:
    if p < 0:
        raise UsageError(f"iterate index must be >= 0, got {p}")
    if order_cap < 1:
        raise UsageError(f"order_cap must be >= 1, got {order_cap}")
    y = GradedSeries.constant(Y0, order_cap)
    for _ in range(p):
        y = qlm_iterate_series(y)
    return QlmFormalIterate(p, y)


def match_prefix(a: GradedSeries, b: GradedSeries) -> int:
    """Largest m with orders 0..m-1 identical."""
    if isinstance(a, QlmFormalIterate):
        a = a.series
    if isinstance(b, QlmFormalIterate):
        b = b.series
    if a.order_cap != b.order_cap:
        raise UsageError(f"order caps differ: {a.order_cap} vs {b.order_cap}")
    for m in range(a.order_cap):
        if a[m] != b[m]:
            return m
    return a.order_cap


def linearized_residual(y_p: GradedSeries, y_prev: GradedSeries) -> GradedSeries:
    """``g y_p' - (y_{p-1}^2 - 2 y_p y_{p-1} - k^2)``; zero through the cap for a true step."""
    k2 = GradedSeries.constant(K_SQUARED, y_p.order_cap)
    return y_p.g_diff() - (y_prev * y_prev - 2 * (y_p * y_prev) - k2)


def coefficient_ratios(approx: GradedSeries, exact: GradedSeries) -> list:
    """For each order, ``{key_text: approx/exact}`` over the exact coefficient's monomials.

    Orders past the exact prefix carry approximately right coefficients; this
    reports them without judging.
    """
    rows = []
    for m in range(min(approx.order_cap, exact.order_cap)):
        ratios = {}
        for mono in exact[m]:
            a = approx[m].coeff(mono.kpow, mono.dexp)
            ratio = complex(a) / complex(mono.coeff)
            label = " ".join(
                ([f"k^{mono.kpow}"] if mono.kpow else [])
                + [f"k{j}^{e}" if e != 1 else f"k{j}" for j, e in mono.dexp]
            )
            ratios[label or "1"] = ratio.real if abs(ratio.imag) < 1e-15 else ratio
        rows.append({"order": m, "ratios": ratios})
    return rows
