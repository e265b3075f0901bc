"""Jost solutions and half-line scattering data a(k), b(k).

f(x,k) is the solution of y'' = (V - k^2) y that tends to e^{ikx} at
infinity; ftilde is the solution with ftilde(0) = 1, ftilde'(0) = -ik, whose
far field a e^{-ikx} + b e^{ikx} carries the half-line transfer data.  (The
-ik initial slope is what the integral equation for ftilde implies.)

Two evaluation routes exist: an adaptive RK45 integration of the ODE form
(default, stable at high k), and a slow Volterra successive-approximation
reference used by tests at moderate k*X.  ``jost_batch`` is the vectorized
transfer-matrix route used by the network solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from . import propagate
from .errors import AccuracyError, NodeSingularityError, SingularFrequencyError
from .line_model import PotentialFn

RTOL = 1e-9
ATOL = 1e-12
TAIL_TOL = 1e-10


@dataclass(frozen=True)
class JostData:
    """Boundary values and asymptotic coefficients at one frequency."""

    k: float
    f0: complex
    df0: complex
    a: complex
    b: complex
    truncation_X: float


def truncation_point(V: PotentialFn, tol: float = TAIL_TOL) -> float:
    """Smallest grid point X with tail_bound(X) < tol (support end if the
    potential is compactly supported)."""
    if V.support_end <= 0.0:
        return 0.0
    below = np.nonzero(V._tail_vals < tol)[0]
    if below.size:
        return float(V._tail_x[below[0]])
    return float(V.support_end)


def _integrate(V, k, x0, x1, y0, dy0, max_step):
    def rhs(x, u):
        return [u[1], (V(x) - k * k) * u[0]]

    sol = solve_ivp(rhs, (x0, x1), [complex(y0), complex(dy0)],
                    method="RK45", rtol=RTOL, atol=ATOL, max_step=max_step)
    if not sol.success:
        raise AccuracyError(f"RK45 failed on [{x0}, {x1}]: {sol.message}")
    return sol.y[0][-1], sol.y[1][-1]


def jost_at_origin(V: PotentialFn, k: float, tol: float = TAIL_TOL) -> JostData:
    """f(0,k), f'(0,k) plus a(k), b(k) for one half-line potential.

    f is integrated backwards from the truncation point with exact free data;
    ftilde is integrated forwards from the node and matched to plane waves.
    """
    if k == 0:
        raise SingularFrequencyError("Jost data is singular at k = 0")
    X = truncation_point(V, tol)
    max_step = (2.0 * np.pi / abs(k)) / propagate.STEPS_PER_WAVELENGTH
    if X == 0.0:
        return JostData(k, 1.0 + 0.0j, 1j * k, 1.0 + 0.0j, 0.0j, 0.0)
    eikX = np.exp(1j * k * X)
    f0, df0 = _integrate(V, k, X, 0.0, eikX, 1j * k * eikX, max_step)
    ft, dft = _integrate(V, k, 0.0, X, 1.0, -1j * k, max_step)
    a = eikX * (1j * k * ft - dft) / (2j * k)
    b = (1j * k * ft + dft) / (2j * k * eikX)
    return JostData(float(k), f0, df0, a, b, X)


def jost_log_derivative(d: JostData) -> complex:
    """f'(0,k)/f(0,k); raises if f(0,k) = 0 (resonance at this k)."""
    if d.f0 == 0:
        raise NodeSingularityError(
            f"f(0, k={d.k}) vanished; perturb k and retry")
    return d.df0 / d.f0


def jost_profile(V: PotentialFn, k: float, xs, tol: float = TAIL_TOL):
    """f and f' sampled on xs (ascending, within [0, X])."""
    if k == 0:
        raise SingularFrequencyError("Jost data is singular at k = 0")
    xs = np.asarray(xs, dtype=float)
    X = max(truncation_point(V, tol), float(xs[-1]))
    max_step = (2.0 * np.pi / abs(k)) / propagate.STEPS_PER_WAVELENGTH
    eikX = np.exp(1j * k * X)

    def rhs(x, u):
        return [u[1], (V(x) - k * k) * u[0]]

    sol = solve_ivp(rhs, (X, 0.0), [eikX, 1j * k * eikX], method="RK45",
                    rtol=RTOL, atol=ATOL, max_step=max_step,
                    t_eval=xs[::-1])
    if not sol.success:
        raise AccuracyError(f"RK45 failed: {sol.message}")
    return sol.y[0][::-1], sol.y[1][::-1]


def jost_tilde_profile(V: PotentialFn, k: float, xs):
    """ftilde and ftilde' sampled on xs (ascending, starting at 0)."""
    if k == 0:
        raise SingularFrequencyError("Jost data is singular at k = 0")
    xs = np.asarray(xs, dtype=float)
    max_step = (2.0 * np.pi / abs(k)) / propagate.STEPS_PER_WAVELENGTH

    def rhs(x, u):
        return [u[1], (V(x) - k * k) * u[0]]

    sol = solve_ivp(rhs, (0.0, float(xs[-1]) or 1e-9), [1.0 + 0.0j, -1j * k],
                    method="RK45", rtol=RTOL, atol=ATOL, max_step=max_step,
                    t_eval=xs)
    if not sol.success:
        raise AccuracyError(f"RK45 failed: {sol.message}")
    return sol.y[0], sol.y[1]


def jost_batch(V: PotentialFn, k, tol: float = TAIL_TOL,
               with_ab: bool = False, n_steps: int | None = None):
    """Vectorized (f0, df0[, a, b]) over an array of frequencies.

    Uses midpoint transfer matrices; cross-validated against
    ``jost_at_origin`` in the test suite.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(k == 0):
        raise SingularFrequencyError("Jost data is singular at k = 0")
    X = truncation_point(V, tol)
    if X == 0.0:
        one = np.ones_like(k, dtype=complex)
        zero = np.zeros_like(k, dtype=complex)
        if with_ab:
            return one, 1j * k, one.copy(), zero, X
        return one, 1j * k, X
    eikX = np.exp(1j * k * X)
    f0, df0 = propagate.sweep(V, X, 0.0, k, eikX, 1j * k * eikX,
                              n_steps=n_steps)
    if not with_ab:
        return f0, df0, X
    ft, dft = propagate.sweep(V, 0.0, X, k, np.ones_like(k, dtype=complex),
                              -1j * k, n_steps=n_steps)
    a = eikX * (1j * k * ft - dft) / (2j * k)
    b = (1j * k * ft + dft) / (2j * k * eikX)
    return f0, df0, a, b, X


def jost_via_volterra(V: PotentialFn, k: float, X: float | None = None,
                      n_grid: int = 4000, max_iter: int = 60,
                      tol: float = 1e-12):
    """Successive approximations for the Jost integral equations.

    Returns (x_grid, f, ftilde).  Slow reference path; accuracy degrades as
    k*X grows, so tests use it at moderate frequencies only.
    """
    if k == 0:
        raise SingularFrequencyError("Jost data is singular at k = 0")
    if X is None:
        X = truncation_point(V)
    x = np.linspace(0.0, X, n_grid + 1)
    v = np.asarray(V(x), dtype=float)
    sin_kx, cos_kx = np.sin(k * x), np.cos(k * x)

    def forward_iterate(g0, weight):
        # int_0^x sin(k(x-y))/k w(y) dy via two cumulative trapezoids
        g = g0.copy()
        for _ in range(max_iter):
            w = weight * g
            ic = cumulative_trapezoid(cos_kx * w, x, initial=0.0)
            is_ = cumulative_trapezoid(sin_kx * w, x, initial=0.0)
            new = g0 + (sin_kx * ic - cos_kx * is_) / k
            if np.max(np.abs(new - g)) < tol:
                return new
            g = new
        return g

    def backward_iterate(g0, weight):
        g = g0.copy()
        for _ in range(max_iter):
            w = weight * g
            tc = cumulative_trapezoid((cos_kx * w)[::-1], x, initial=0.0)[::-1]
            ts = cumulative_trapezoid((sin_kx * w)[::-1], x, initial=0.0)[::-1]
            new = g0 - (sin_kx * tc - cos_kx * ts) / k
            if np.max(np.abs(new - g)) < tol:
                return new
            g = new
        return g

    ftilde = forward_iterate(np.exp(-1j * k * x), v)
    f = backward_iterate(np.exp(1j * k * x), v)
    return x, f, ftilde
