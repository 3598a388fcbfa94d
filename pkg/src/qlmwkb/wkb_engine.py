"""Formal WKB series of the Riccati equation ``g y' + k^2 + y^2 = 0``.

With ``y = sum_m g^m Y_m`` and ``Y_0 = i k`` the higher orders follow from

    Y_m = -(Y'_{m-1} + sum_{j=1}^{m-1} Y_j Y_{m-j}) / (2 Y_0)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .errors import UsageError
from .formal_series import (
    DiffPolynomial,
    GaussRational,
    GradedSeries,
    homogeneity_signature,
    is_pure_imaginary,
    is_pure_real,
    k_power,
)

FIXTURE_VERSION = "v1"
FIXTURE_FILES = {
    "wkb": "wkb_series.txt",
    "qlm1": "qlm_iterate1.txt",
    "qlm2": "qlm_iterate2.txt",
}

Y0 = k_power(1, GaussRational(0, 1))
K_SQUARED = k_power(2)
# 1/(2 Y0) = -i/(2k)
INV_TWO_Y0 = k_power(-1, GaussRational(0, Fraction(-1, 2)))


@dataclass(frozen=True)
class WkbSeries:
    series: GradedSeries
    generated_to: int

    def __getitem__(self, m):
        return self.series[m]


def wkb_terms(order_cap: int) -> WkbSeries:
    if order_cap < 1:
        raise UsageError(f"order_cap must be >= 1, got {order_cap}")
    ys = [Y0]
    for m in range(1, order_cap):
        acc = ys[m - 1].diff()
        for j in range(1, m):
            acc = acc + ys[j] * ys[m - j]
        ys.append(-(INV_TWO_Y0 * acc))
    return WkbSeries(GradedSeries(ys, order_cap), order_cap)


def riccati_residual(series: GradedSeries) -> GradedSeries:
    """``g dy/dr + k^2 + y^2``, order by order; zero everywhere for an exact solution."""
    if isinstance(series, WkbSeries):
        series = series.series
    k2 = GradedSeries.constant(K_SQUARED, series.order_cap)
    return series.g_diff() + k2 + series * series


def golden_compare(series, fixture: GradedSeries) -> list:
    """Per-order verdicts ``{"order", "equal", "lhs", "rhs"}`` (exact equality)."""
    if isinstance(series, WkbSeries):
        series = series.series
    n = min(series.order_cap, fixture.order_cap)
    rows = []
    for m in range(n):
        lhs, rhs = series[m], fixture[m]
        rows.append({"order": m, "equal": lhs == rhs, "lhs": lhs.to_text(), "rhs": rhs.to_text()})
    return rows


def structure_violations(series: GradedSeries) -> list:
    """Orders whose coefficient breaks homogeneity (degree 1-m, weight m) or parity."""
    bad = []
    for m, poly in enumerate(series):
        if poly.is_zero():
            bad.append((m, "zero coefficient"))
            continue
        if homogeneity_signature(poly) != (1 - m, m):
            bad.append((m, f"signature {homogeneity_signature(poly)}"))
        parity_ok = is_pure_imaginary(poly) if m % 2 == 0 else is_pure_real(poly)
        if not parity_ok:
            bad.append((m, "parity"))
    return bad


def load_fixture(name: str, directory=None) -> GradedSeries:
    """Read one of the transcribed golden series (``wkb``, ``qlm1``, ``qlm2``)."""
    filename = FIXTURE_FILES[name]
    if directory is None:
        text = (resources.files("qlmwkb") / "fixtures" / FIXTURE_VERSION / filename).read_text(
            encoding="utf-8"
        )
    else:
        from pathlib import Path

        text = (Path(directory) / filename).read_text(encoding="utf-8")
    return GradedSeries.from_text(text)
