"""Independent eigenvalue oracle: Pruefer-angle shooting with node counting.

With ``psi = R sin(theta)``, ``psi' = R cos(theta)`` the Schroedinger equation
``psi'' = -Q psi``, ``Q = (2m/hbar^2)(E - V_eff)``, becomes

    theta' = cos(theta)^2 + Q sin(theta)^2

The angle grows by pi per node, so the n-th level solves
``theta_left(x_m) - theta_right(x_m) = n pi`` with both sides started from
their boundary behaviour.  The left side minus right side is increasing in E.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp

from .errors import OracleError, UsageError
from .potentials import PotentialSpec

# decay exponent accumulated before a forbidden end is cut off
TAIL_ACTION = 40.0
WALL_OFFSET = 1e-7
ODE_RTOL = 1e-11
ODE_ATOL = 1e-12


def _length_scale(p: PotentialSpec) -> float:
    if "a" in p.params:
        return p["a"]
    if p.kind == "coulomb":
        return p.hbar**2 / (p.mass * p["Z"])
    return math.sqrt(p.hbar / math.sqrt(p.mass))


class _Problem:
    def __init__(self, p: PotentialSpec):
        self.p = p
        self.k = 2.0 * p.mass / p.hbar**2
        self.L = _length_scale(p)
        self.dx = self.L / 200.0
        lo, hi = p.domain
        self.left_wall = p.wall_exponent() if math.isfinite(lo) else None
        self.right_wall = p.right_wall_exponent() if math.isfinite(hi) else None
        self.x_left = lo + WALL_OFFSET * self.L if math.isfinite(lo) else None
        self.x_right = hi - WALL_OFFSET * self.L if math.isfinite(hi) else None
        self.x_ref, self.v_min = self._minimum()

    def veff(self, x):
        p = self.p
        x = np.asarray(x, dtype=float)
        return np.real(p.V(x) + p.centrifugal(x))

    def _minimum(self):
        lo, hi = self.p.domain
        if math.isfinite(lo) and math.isfinite(hi):
            xs = np.linspace(lo, hi, 4003)[1:-1]
        elif math.isfinite(lo):
            xs = lo + self.L * np.geomspace(1e-4, 60.0, 6000)
        else:
            xs = np.linspace(-60.0 * self.L, 60.0 * self.L, 12001)
        with np.errstate(all="ignore"):
            vs = self.veff(xs)
        vs = np.where(np.isfinite(vs), vs, np.inf)
        i = int(np.argmin(vs))
        x_ref = xs[i]
        if self.x_left is not None:
            # stay clear of the wall so the matching point is regular
            x_ref = max(x_ref, self.x_left + 0.02 * self.L)
        return x_ref, float(vs[i])

    def _march(self, E: float, direction: int) -> float:
        """Distance from x_ref until the decay exponent reaches TAIL_ACTION."""
        action = 0.0
        x0 = self.x_ref
        chunk = 2048
        total = 0
        while total < 20_000_000:
            xs = x0 + direction * self.dx * np.arange(1, chunk + 1)
            kappa = np.sqrt(np.maximum(self.k * (self.veff(xs) - E), 0.0))
            cum = action + np.cumsum(kappa) * self.dx
            hit = np.nonzero(cum >= TAIL_ACTION)[0]
            if hit.size:
                return float(xs[hit[0]])
            action = float(cum[-1])
            x0 = float(xs[-1])
            total += chunk
            chunk *= 2
        raise OracleError(f"tail of {self.p.kind} at E={E} does not decay")

    def ends(self, E: float):
        left = self.x_left if self.x_left is not None else self._march(E, -1)
        right = self.x_right if self.x_right is not None else self._march(E, +1)
        return left, right

    def _kappa(self, x, E):
        return math.sqrt(max(self.k * (float(self.veff(x)) - E), 0.0))

    def boundary_angles(self, E: float, left: float, right: float):
        lo, hi = self.p.domain
        if self.left_wall is not None:
            alpha = math.atan2(left - lo, self.left_wall)
        else:
            alpha = math.atan2(1.0, self._kappa(left, E))
        if self.right_wall is not None:
            beta = math.atan2(hi - right, -self.right_wall)
        else:
            beta = math.atan2(1.0, -self._kappa(right, E))
        return alpha, beta

    def _theta(self, E, x0, x1, theta0):
        k = self.k
        p = self.p

        def rhs(x, th):
            xa = np.asarray(x)
            q = k * (E - float(np.real(p.V(xa) + p.centrifugal(xa))))
            s, c = math.sin(th[0]), math.cos(th[0])
            return [c * c + q * s * s]

        sol = solve_ivp(rhs, (x0, x1), [theta0], method="DOP853", rtol=ODE_RTOL, atol=ODE_ATOL)
        if not sol.success:
            raise OracleError(f"angle integration failed at E={E}: {sol.message}")
        return float(sol.y[0, -1])

    def mismatch(self, E: float, n: int) -> float:
        left, right = self.ends(E)
        alpha, beta = self.boundary_angles(E, left, right)
        xm = min(max(self.x_ref, left), right)
        th_l = self._theta(E, left, xm, alpha)
        th_r = self._theta(E, right, xm, beta)
        return th_l - th_r - n * math.pi


def _upper_bracket(prob: _Problem, n: int):
    p = prob.p
    if math.isfinite(p.asymptote):
        depth = p.asymptote - prob.v_min
        for k in range(1, 7):
            E = p.asymptote - depth * 10.0 ** (-k)
            if prob.mismatch(E, n) > 0:
                return E
        raise OracleError(f"{p.kind}: level n={n} not below the continuum")
    step = max(1.0, abs(prob.v_min))
    E = prob.v_min + step
    for _ in range(80):
        if prob.mismatch(E, n) > 0:
            return E
        step *= 2.0
        E = prob.v_min + step
    raise OracleError(f"{p.kind}: could not bracket level n={n}")


def shooting_oracle(p: PotentialSpec, n: int, l: int | None = None, rtol: float = 1e-10) -> float:
    """n-th eigenvalue (n counted from the potential's first index) by shooting."""
    if l is not None and l != p.l:
        params = dict(p.params)
        params["l"] = l
        p = PotentialSpec(p.kind, params, hbar=p.hbar, mass=p.mass)
    nodes = int(n) - p.index_base
    if nodes < 0:
        raise UsageError(f"{p.kind} levels start at n = {p.index_base}")
    prob = _Problem(p)
    lo = prob.v_min + 1e-9 * max(1.0, abs(prob.v_min))
    if prob.mismatch(lo, nodes) >= 0:
        raise OracleError(f"{p.kind}: lower bracket already past level {n}")
    hi = _upper_bracket(prob, nodes)
    scale = max(abs(lo), abs(hi), 1e-300)
    return optimize.brentq(lambda E: prob.mismatch(E, nodes), lo, hi, xtol=rtol * scale * 1e-3, rtol=rtol)
