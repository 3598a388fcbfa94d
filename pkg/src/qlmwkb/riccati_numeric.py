"""Numerical QLM iterates of ``y' + k^2 + y^2 = 0`` for a concrete potential.

Everything here lives in the scaled variable ``z = sqrt(2m) x / hbar`` where
``k^2(z) = E - V(z / lambda) - l(l+1)/z^2`` and ``g = 1``.  Samples are taken on
the line ``z = s + i*delta`` so that the branch points of ``y_0 = i k`` at the
turning points are passed at a safe distance.  Iterates are integrated inward
from ``z_max`` where ``y_p(z_max) = i k(z_max)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp

from .errors import FitQualityError, IntegrationError, PathError, SingularPointError, UsageError
from .potentials import PotentialSpec

Z_MAX_CAP = 40.0
DECAY_FRACTION = 1e-8
# points within this much decay action of z_max still remember the boundary value
BOUNDARY_ACTION = 30.0
FIT_RESIDUAL_LIMIT = 1e-3
# dense output of long steps is far less accurate than the steps themselves
MAX_STEP_FRACTION = 1.0 / 400.0
BOUNDED_DOMAIN = {"cotangent", "pt_hole"}
EVEN_FULL_LINE = {"ho1d", "modified_pt"}


@dataclass(frozen=True)
class SolveConfig:
    z_max: float | None = None
    z_min: float | None = None
    grid_points: int = 2001
    imag_shift: float = 0.05
    ode_rel_tol: float = 1e-10
    quadrature_order: int = 16

    def __post_init__(self):
        if self.z_max is not None and self.z_min is not None and not self.z_min < self.z_max:
            raise UsageError(f"z_min must be below z_max, got {self.z_min} >= {self.z_max}")
        if self.grid_points < 16:
            raise UsageError(f"grid_points must be >= 16, got {self.grid_points}")
        if not 0 < self.ode_rel_tol <= 1e-3:
            raise UsageError(f"ode_rel_tol must lie in (0, 1e-3], got {self.ode_rel_tol}")
        if self.imag_shift < 0:
            raise UsageError(f"imag_shift must be >= 0, got {self.imag_shift}")
        if self.quadrature_order < 2:
            raise UsageError(f"quadrature_order must be >= 2, got {self.quadrature_order}")

    def resolved(self, potential: PotentialSpec, E: float) -> "SolveConfig":
        z_max = self.z_max if self.z_max is not None else default_z_max(potential, E)
        z_min = self.z_min if self.z_min is not None else default_z_min(potential, E)
        if not z_min < z_max:
            raise UsageError(f"z_min={z_min} must be below z_max={z_max}")
        return replace(self, z_max=float(z_max), z_min=float(z_min))

    def grid(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.grid_points)

    def as_dict(self) -> dict:
        return {
            "z_max": self.z_max,
            "z_min": self.z_min,
            "grid_points": self.grid_points,
            "imag_shift": self.imag_shift,
            "ode_rel_tol": self.ode_rel_tol,
            "quadrature_order": self.quadrature_order,
        }


@dataclass(eq=False)
class SampledFunction:
    """Complex samples on the line ``grid + i*shift``."""

    grid: np.ndarray
    values: np.ndarray
    shift: float = 0.0
    interpolant: Callable | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise UsageError("grid and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.grid) <= 0):
            raise UsageError("grid must be strictly increasing")

    @property
    def path(self) -> np.ndarray:
        return self.grid + 1j * self.shift

    def __call__(self, s):
        if self.interpolant is not None:
            return self.interpolant(s)
        return np.interp(s, self.grid, self.values.real) + 1j * np.interp(s, self.grid, self.values.imag)

    def sup_diff(self, other: "SampledFunction") -> float:
        if self.grid.shape != other.grid.shape or not np.array_equal(self.grid, other.grid):
            raise UsageError("samples live on different grids")
        return float(np.max(np.abs(self.values - other.values)))

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
            "shift": self.shift,
        }


@dataclass
class IterateHistory:
    iterates: list
    sup_diffs: list

    def __post_init__(self):
        if len(self.sup_diffs) != max(len(self.iterates) - 1, 0):
            raise UsageError("need one sup difference per step")
        if any(d < 0 for d in self.sup_diffs):
            raise UsageError("sup differences are norms")

    def convergence_orders(self, threshold: float = 0.1, floor: float = 0.0) -> list:
        """``log d_{p+1} / log d_p`` for consecutive diffs with ``floor < d_p < threshold``."""
        out = []
        for a, b in zip(self.sup_diffs, self.sup_diffs[1:]):
            if floor < a < threshold and b > floor:
                out.append(math.log(b) / math.log(a))
        return out


# -- k^2 and the zeroth iterate -------------------------------------------------


def _scale(potential: PotentialSpec) -> float:
    return potential.z_scale


def k_squared(potential: PotentialSpec, E: float, z):
    """``E - V(z/lambda) - l(l+1)/z^2``; raises at poles of the potential."""
    z = np.asarray(z, dtype=complex)
    lam = _scale(potential)
    l = potential.l
    if (l or potential.radial) and np.any(z == 0):
        raise SingularPointError("k^2 is singular at z = 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        val = E - potential.V(z / lam)
        if l:
            val = val - l * (l + 1) / z**2
    if not np.all(np.isfinite(val)):
        raise SingularPointError(f"k^2 not finite for {potential.kind} on the requested points")
    return val[()] if val.ndim == 0 else val


def k_squared_prime(potential: PotentialSpec, E: float, z):
    z = np.asarray(z, dtype=complex)
    lam = _scale(potential)
    l = potential.l
    val = -potential.dV(z / lam) / lam
    if l:
        val = val + 2.0 * l * (l + 1) / z**3
    return val


class ZerothIterate:
    """``y_0 = i k = -w`` with ``w`` a continuous branch of ``sqrt(-k^2)`` along the path."""

    def __init__(self, potential: PotentialSpec, E: float, cfg: SolveConfig):
        self.potential = potential
        self.E = E
        self.shift = cfg.imag_shift
        self.grid = cfg.grid()
        path = self.grid + 1j * self.shift
        k2 = k_squared(potential, E, path)
        if self.shift == 0:
            near = np.abs(k2) < 1e-12 * max(1.0, abs(E))
            # a sign change of real k^2 between samples hides a turning point too
            near[:-1] |= np.sign(k2.real[:-1]) * np.sign(k2.real[1:]) < 0
            if np.any(near):
                raise PathError(f"turning point on the real path near z={self.grid[near][0]:.6g}")
        w = np.sqrt(-k2)
        # the outer boundary picks the decaying branch, Re w > 0 (w = -i k for k real)
        if w[-1].real < 0 or (w[-1].real == 0 and w[-1].imag > 0):
            w[-1] = -w[-1]
        for j in range(len(w) - 2, -1, -1):
            if abs(w[j] - w[j + 1]) > abs(w[j] + w[j + 1]):
                w[j] = -w[j]
        self.w_grid = w

    def _w(self, s):
        s = np.asarray(s, dtype=float)
        z = s + 1j * self.shift
        w = np.sqrt(-k_squared(self.potential, self.E, z))
        ref = np.interp(s, self.grid, self.w_grid.real) + 1j * np.interp(s, self.grid, self.w_grid.imag)
        return np.where(np.abs(w - ref) <= np.abs(w + ref), w, -w)

    def __call__(self, s):
        return -self._w(s)

    def derivative(self, s):
        """``y_0' = (k^2)'/(2 w)``."""
        s = np.asarray(s, dtype=float)
        return k_squared_prime(self.potential, self.E, s + 1j * self.shift) / (2.0 * self._w(s))

    def sampled(self) -> SampledFunction:
        return SampledFunction(self.grid, -self.w_grid, self.shift, interpolant=self, meta={"p": 0, "E": self.E})


# -- default path ----------------------------------------------------------------


def default_z_max(potential: PotentialSpec, E: float) -> float:
    """Where |V| falls to 1e-8 |E|, capped; confining potentials take the cap."""
    if potential.kind in BOUNDED_DOMAIN:
        raise UsageError(f"{potential.kind} lives on a finite interval; numeric solves need an open right end")
    if not math.isfinite(potential.asymptote) or potential.kind == "coulomb":
        return Z_MAX_CAP
    lam = _scale(potential)
    target = DECAY_FRACTION * max(abs(E), 1e-12)

    def excess(z):
        return abs(float(np.real(potential.V(z / lam)))) - target

    hi = 1.0
    while excess(hi) > 0 and hi < Z_MAX_CAP:
        hi *= 2.0
    if hi >= Z_MAX_CAP:
        return Z_MAX_CAP
    return float(optimize.brentq(excess, hi / 2.0, hi))


def default_z_min(potential: PotentialSpec, E: float) -> float:
    if potential.kind in BOUNDED_DOMAIN:
        raise UsageError(f"{potential.kind} lives on a finite interval; numeric solves need an open right end")
    if potential.kind in EVEN_FULL_LINE:
        return 0.0
    if potential.radial:
        return 0.05
    # morse / eckart1d: one unit beyond the left turning point
    lam = _scale(potential)

    def gap(z):
        return float(np.real(potential.V(z / lam))) - E

    lo = -1.0
    while gap(lo) < 0:
        lo *= 2.0
        if lo < -1e4:
            raise UsageError(f"no left turning point for {potential.kind} at E={E}")
    hi = lo / 2.0 if gap(lo / 2.0) < 0 else 0.0
    if gap(hi) > 0:
        # minimum lies to the right of zero: scan for the allowed region
        zs = np.linspace(lo, Z_MAX_CAP, 4001)
        allowed = np.nonzero([gap(z) < 0 for z in zs])[0]
        if not allowed.size:
            raise UsageError(f"E={E} lies below the minimum of {potential.kind}")
        hi = zs[allowed[0]]
    return float(optimize.brentq(gap, lo, hi)) - 1.0


# -- iterates --------------------------------------------------------------------


def _zeroth(potential, E, cfg) -> ZerothIterate:
    if cfg.z_min <= 0 and (potential.radial or potential.l):
        raise UsageError("radial problems need z_min > 0")
    return ZerothIterate(potential, E, cfg)


def first_iterate_closed_form(potential: PotentialSpec, E: float, cfg: SolveConfig | None = None) -> SampledFunction:
    """``y_1 = y_0 - int_{z_max}^z y_0'(s) exp(-2 int_s^z y_0) ds`` by nested Gauss-Legendre.

    The outer integral is accumulated interval by interval from z_max inward so
    that only exponentials of single-interval actions are ever formed.
    """
    cfg = (cfg or SolveConfig()).resolved(potential, E)
    y0 = _zeroth(potential, E, cfg)
    grid = y0.grid
    nodes, weights = np.polynomial.legendre.leggauss(cfg.quadrature_order)
    n = len(grid)
    u = np.zeros(n, dtype=complex)
    for j in range(n - 2, -1, -1):
        a, b = grid[j], grid[j + 1]
        half = 0.5 * (b - a)
        s = a + half * (nodes + 1.0)  # outer nodes in (a, b)
        ws = half * weights
        # whole-interval action I = int_b^a y0 = -int_a^b y0
        action = -np.sum(ws * y0(s))
        # inner actions int_s^a y0 = -int_a^s y0, one Gauss rule per outer node
        inner_half = 0.5 * (s - a)
        t = a + inner_half[:, None] * (nodes[None, :] + 1.0)
        inner = -np.sum((inner_half[:, None] * weights[None, :]) * y0(t.ravel()).reshape(t.shape), axis=1)
        # int_b^a y0'(s) exp(-2 int_s^a y0) ds = -int_a^b ...
        piece = -np.sum(ws * y0.derivative(s) * np.exp(-2.0 * inner))
        u[j] = np.exp(-2.0 * action) * u[j + 1] - piece
    values = y0.w_grid * -1 + u
    values[-1] = -y0.w_grid[-1]
    return SampledFunction(grid, values, cfg.imag_shift, meta={"p": 1, "E": E, "method": "closed_form"})


def qlm_step_numeric(
    y_prev: SampledFunction, potential: PotentialSpec, E: float, cfg: SolveConfig | None = None
) -> SampledFunction:
    """Solve ``y_p' = y_{p-1}^2 - 2 y_p y_{p-1} - k^2`` inward from ``y_p(z_max) = i k(z_max)``."""
    cfg = (cfg or SolveConfig()).resolved(potential, E)
    grid = cfg.grid()
    if y_prev.grid[0] > grid[0] or y_prev.grid[-1] < grid[-1]:
        raise UsageError("previous iterate does not cover the grid")
    if y_prev.shift != cfg.imag_shift:
        raise UsageError("previous iterate lives on a different path")
    shift = cfg.imag_shift
    y0 = _zeroth(potential, E, cfg)
    boundary = complex(-y0.w_grid[-1])

    def rhs(s, y):
        yp = complex(np.asarray(y_prev(s)).reshape(-1)[0])
        k2 = complex(k_squared(potential, E, s + 1j * shift))
        return [yp * yp - 2.0 * y[0] * yp - k2]

    sol = solve_ivp(
        rhs,
        (grid[-1], grid[0]),
        [boundary],
        method="DOP853",
        rtol=cfg.ode_rel_tol,
        atol=cfg.ode_rel_tol * 1e-3,
        dense_output=True,
        max_step=MAX_STEP_FRACTION * (grid[-1] - grid[0]),
    )
    if sol.status != 0:
        raise IntegrationError(f"QLM step failed: {sol.message}", z=float(sol.t[-1]))
    dense = sol.sol
    values = dense(grid)[0]
    values[-1] = boundary

    def interpolant(s, dense=dense):
        return dense(s)[0]

    p = int(y_prev.meta.get("p", 0)) + 1
    return SampledFunction(grid, values, shift, interpolant=interpolant, meta={"p": p, "E": E})


def solve_qlm(potential: PotentialSpec, E: float, p_max: int, cfg: SolveConfig | None = None) -> IterateHistory:
    if p_max < 1:
        raise UsageError(f"p_max must be >= 1, got {p_max}")
    cfg = (cfg or SolveConfig()).resolved(potential, E)
    current = _zeroth(potential, E, cfg).sampled()
    iterates = [current]
    diffs = []
    for _ in range(p_max):
        nxt = qlm_step_numeric(current, potential, E, cfg)
        diffs.append(nxt.sup_diff(current))
        iterates.append(nxt)
        current = nxt
    return IterateHistory(iterates, diffs)


# -- residue fit -----------------------------------------------------------------


def _leading_model(leading, y: SampledFunction, energy, hbar, mass):
    if callable(leading):
        return leading
    if leading in (None, "none"):
        return lambda z: np.zeros_like(z)
    if leading == "oscillator":
        slope = hbar / (2.0 * math.sqrt(mass))
        return lambda z: -slope * z
    if leading in ("coulomb", "constant"):
        E = energy if energy is not None else y.meta.get("E")
        if E is None or E >= 0:
            raise UsageError(f"{leading} model needs a negative energy")
        return lambda z: -math.sqrt(-E) * np.ones_like(z)
    raise UsageError(f"unknown leading model {leading!r}")


def boundary_layer_start(y: SampledFunction, action: float = BOUNDARY_ACTION) -> float:
    """Smallest grid point beyond which the boundary value still leaks in.

    The boundary error decays like ``exp(-2 int_z^{z_max} Re(-y))``; points with
    less than ``action`` of accumulated decay are excluded from fits.
    """
    decay = np.maximum(-y.values.real, 0.0)
    steps = 0.5 * (decay[1:] + decay[:-1]) * np.diff(y.grid)
    tail = np.concatenate([np.cumsum(steps[::-1])[::-1], [0.0]])
    usable = np.nonzero(2.0 * tail >= action)[0]
    if not usable.size:
        return y.grid[0]
    return float(y.grid[usable[-1]])


def asymptotic_residue_fit(
    y: SampledFunction,
    leading="oscillator",
    *,
    energy: float | None = None,
    hbar: float = 1.0,
    mass: float = 1.0,
    window: float = 0.2,
    side: str = "outer",
    span: tuple | None = None,
) -> float:
    """Coefficient of ``1/z`` after removing the leading behaviour.

    ``side="outer"`` fits ``a/z + ... + e/z^5`` over the outer ``window`` of the
    grid below the boundary layer; ``side="inner"`` fits ``a/z + b + c z + d z^2``
    next to ``z_min``.  ``span`` overrides the window with explicit limits on Re z.
    """
    model = _leading_model(leading, y, energy, hbar, mass)
    grid = y.grid
    if span is not None:
        lo, hi = span
    elif side == "outer":
        hi = min(boundary_layer_start(y), grid[-1])
        lo = hi - window * (grid[-1] - grid[0])
    elif side == "inner":
        lo = grid[0]
        hi = lo + window * (grid[-1] - grid[0])
    else:
        raise UsageError(f"side must be outer or inner, got {side!r}")
    mask = (grid >= lo) & (grid <= hi)
    if mask.sum() < 8:
        raise FitQualityError(f"only {int(mask.sum())} samples in the fit window [{lo:.4g}, {hi:.4g}]")
    z = y.path[mask]
    if np.any(z == 0):
        raise FitQualityError("fit window touches z = 0")
    target = y.values[mask] - model(z)
    powers = (-1, -2, -3, -4, -5) if side == "outer" else (-1, 0, 1, 2)
    basis = np.stack([z**k for k in powers], axis=1)
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    resid = np.linalg.norm(basis @ coef - target)
    # measured against y itself: the subtracted target may vanish identically
    scale = np.linalg.norm(y.values[mask])
    rel = resid / scale if scale > 0 else resid
    if rel > FIT_RESIDUAL_LIMIT:
        raise FitQualityError(f"relative fit residual {rel:.3g} exceeds {FIT_RESIDUAL_LIMIT}")
    return float(coef[0].real)
