"""Fundamental solution on finite branches, with a kernel-based cross-check.

omega(x,k;h,V) solves y'' = (V - k^2) y with omega(0) = 1, omega'(0) = h.
The primary route integrates this IVP adaptively.  An independent route
evaluates the integral representation

    omega(x,k) = cos(kx) + h sin(kx)/k
                 + int_{-x}^{x} K(x,t) {cos(kt) + h sin(kt)/k} dt,

where the transformation kernel K solves a Goursat-type integral equation.
The kernel path exists purely as an oracle for the IVP path and for the
high-frequency asymptotics; it is never used by the network solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson, solve_ivp
from scipy.interpolate import CubicSpline, RegularGridInterpolator

from . import propagate
from .errors import AccuracyError, DivergenceError
from .line_model import PotentialFn

RTOL = 1e-9
ATOL = 1e-12


@dataclass(frozen=True)
class FundamentalData:
    """Endpoint value and derivative of omega at one frequency."""

    k: float
    omega_tau: complex
    domega_tau: complex


@dataclass(frozen=True, eq=False)
class KernelTable:
    """K(x,t) on the triangle |t| <= x <= tau.

    Internally stored in characteristic coordinates xi = (x+t)/2,
    eta = (x-t)/2 on a uniform square grid, where the Goursat equation
    becomes a pair of cumulative integrals.
    """

    tau: float
    grid_step: float
    xi: np.ndarray
    values: np.ndarray  # P[i, j] = K(xi_i + eta_j, xi_i - eta_j)
    l1_norm: float

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        interp = RegularGridInterpolator((self.xi, self.xi), self.values,
                                         bounds_error=False, fill_value=None)
        pts = np.stack([(x + t) / 2.0, (x - t) / 2.0], axis=-1)
        out = interp(pts)
        return out if out.ndim else float(out)

    def edge_slice(self, x: float, n: int = 801):
        """(t grid, K(x, t)) for t in [-x, x]."""
        t = np.linspace(-x, x, n)
        return t, self(np.full_like(t, x), t)


def fundamental_at(V: PotentialFn, tau: float, h: float,
                   k: float) -> FundamentalData:
    """Integrate the IVP omega(0)=1, omega'(0)=h from 0 to tau."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    max_step = tau
    if k != 0:
        max_step = min(tau, (2.0 * np.pi / abs(k)) / propagate.STEPS_PER_WAVELENGTH)

    def rhs(x, u):
        return [u[1], (V(x) - k * k) * u[0]]

    sol = solve_ivp(rhs, (0.0, tau), [1.0 + 0.0j, complex(h)], method="RK45",
                    rtol=RTOL, atol=ATOL, max_step=max_step)
    if not sol.success:
        raise AccuracyError(f"RK45 failed on [0, {tau}]: {sol.message}")
    return FundamentalData(float(k), sol.y[0][-1], sol.y[1][-1])


def fundamental_profile(V: PotentialFn, tau: float, h: float, k: float, xs):
    """omega and omega' sampled on xs in [0, tau]."""
    xs = np.asarray(xs, dtype=float)
    max_step = tau
    if k != 0:
        max_step = min(tau, (2.0 * np.pi / abs(k)) / propagate.STEPS_PER_WAVELENGTH)

    def rhs(x, u):
        return [u[1], (V(x) - k * k) * u[0]]

    sol = solve_ivp(rhs, (0.0, tau), [1.0 + 0.0j, complex(h)], method="RK45",
                    rtol=RTOL, atol=ATOL, max_step=max_step, t_eval=xs)
    if not sol.success:
        raise AccuracyError(f"RK45 failed: {sol.message}")
    return sol.y[0], sol.y[1]


def fundamental_batch(V: PotentialFn, tau: float, h: float, k,
                      n_steps: int | None = None):
    """Vectorized (omega(tau), omega'(tau)) over an array of frequencies."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    ones = np.ones_like(k, dtype=complex)
    return propagate.sweep(V, 0.0, tau, k, ones, complex(h) * ones,
                           n_steps=n_steps)


def solve_kernel(V: PotentialFn, tau: float,
                 grid_step: float | None = None,
                 sup_tol: float = 1e-10,
                 max_iter: int = 200) -> KernelTable:
    """Fixed-point solution of the kernel equation on the triangle.

    In xi = (x+t)/2, eta = (x-t)/2 the Goursat problem P_{xi eta} =
    V(xi+eta) P with P(xi,0) = 1/2 int_0^xi V and P(0,eta) = 0 integrates to

        P(xi, eta) = 1/2 int_0^xi V
                     + int_0^xi int_0^eta V(a+b) P(a,b) db da,

    which one cumulative integral per axis updates in O(N^2).  V is
    extended by zero outside [0, tau].  (Consistency of the double-integral
    coefficient was pinned down against the second-order Born term of the
    IVP for a constant well.)
    """
    if grid_step is None:
        # relative default tau/400, capped absolutely so long branches do not
        # lose the 1e-6 cross-representation agreement
        grid_step = min(tau / 400.0, 2.5e-3)
    n = max(int(np.ceil(tau / grid_step)), 8)
    xi = np.linspace(0.0, tau, n + 1)
    hstep = tau / n
    v_line = np.asarray(V(xi), dtype=float)
    source = 0.5 * cumulative_trapezoid(v_line, xi, initial=0.0)
    # sample V at beta-cell midpoints: the zero extension of V jumps exactly
    # on grid nodes, and midpoint sampling keeps the quadrature second order
    # across that jump instead of degrading to first order
    mids = 0.5 * (xi[:-1] + xi[1:])
    v_mid = np.asarray(V(xi[:, None] + mids[None, :]), dtype=float)
    P = np.tile(source[:, None], (1, n + 1))
    zeros = np.zeros((n + 1, 1))
    for _ in range(max_iter):
        w_cell = v_mid * 0.5 * (P[:, :-1] + P[:, 1:])
        inner = np.concatenate(
            [zeros, np.cumsum(w_cell, axis=1) * hstep], axis=1)
        outer = cumulative_trapezoid(inner, xi, axis=0, initial=0.0)
        new = source[:, None] + outer
        change = np.max(np.abs(new - P))
        P = new
        if change < sup_tol:
            return KernelTable(float(tau), float(grid_step), xi, P, V.l1_norm)
    raise DivergenceError(
        f"kernel iteration did not reach {sup_tol} in {max_iter} sweeps")


def _cos_term(k: float, t: np.ndarray, h: float) -> np.ndarray:
    """cos(kt) + h sin(kt)/k with the removable k -> 0 limit handled."""
    t = np.asarray(t, dtype=float)
    kt = k * t
    if k == 0:
        return np.cos(kt) + h * t
    sinc = np.sin(kt) / k
    small = np.abs(kt) < 1e-4
    if np.any(small):
        sinc = np.where(small, t * (1.0 - kt * kt / 6.0), sinc)
    return np.cos(kt) + h * sinc


def fundamental_via_kernel(K: KernelTable, h: float, k: float,
                           tau: float | None = None,
                           n_quad: int | None = None) -> complex:
    """Evaluate omega(tau, k) from the integral representation.

    At the edge x = tau the slice K(tau, .) lies on the anti-diagonal of the
    characteristic grid, so it is read off without interpolation, splined,
    and integrated against the trig factor by Simpson on a grid fine enough
    for the oscillation (about 40 samples per period).
    """
    if tau is None:
        tau = K.tau
    if abs(tau - K.tau) < 1e-12:
        n = K.values.shape[0] - 1
        idx = np.arange(n + 1)
        t_nodes = 2.0 * K.xi - K.tau
        slice_vals = K.values[idx, n - idx]
    else:
        t_nodes, slice_vals = K.edge_slice(tau, 4 * (K.values.shape[0] - 1) + 1)
    spline = CubicSpline(t_nodes, slice_vals)
    if n_quad is None:
        n_quad = max(4001, int(40.0 * abs(k) * tau) + 1)
    if n_quad % 2 == 0:
        n_quad += 1
    t = np.linspace(-tau, tau, n_quad)
    integrand = spline(t) * _cos_term(k, t, h)
    integral = simpson(integrand, x=t)
    return complex(_cos_term(k, np.asarray(tau), h) + integral)
