"""Central-node linear system and the full scattering solution.

A unit wave e^{-ikx} comes in on branch 1.  The solution is written as

    branch 1          y_1 = (1/a) ftilde + (R1 - b/a) f
    branches 2..m     y_j = T_j f_j
    finite branches   y_j(x) = alpha_j omega_j(tau_j - x)

and the node conditions (scaled value continuity plus the derivative
balance) give an (m+n) x (m+n) system in (R1, T_j, alpha_j) after the
common node value ybar is eliminated through branch 1.

Two sign choices matter and are validated against the uniform closed form
and the finite-difference oracle: the finite-branch chain rule
y_j'(0) = -alpha_j omega_j'(tau_j), and the reversed-coordinate terminal
slope omega'(0) = -h (the terminal condition y'(tau) = h y(tau) flips sign
under x -> tau - x).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import fundamental, jost, propagate
from .errors import DomainError, ProfileValidityError, ResonanceError
from .line_model import BranchGeometry, LineProfile, PotentialFn, \
    branch_geometry, potential_from_profile

K_FLOOR = 0.5
A_RESONANCE_TOL = 1e-12
COND_WARN = 1e12


class BranchKind(enum.Enum):
    INFINITE = "infinite"
    FINITE = "finite"


@dataclass(frozen=True, eq=False)
class Branch:
    id: int  # 1-based; branch 1 is the measurement branch
    kind: BranchKind
    potential: PotentialFn
    geometry: BranchGeometry

    def __post_init__(self):
        if self.kind is BranchKind.FINITE:
            if self.geometry.tau is None or self.geometry.h is None:
                raise ProfileValidityError(
                    f"branch {self.id}: finite branches need tau and h")
        else:
            if self.geometry.tau is not None or self.geometry.h is not None:
                raise ProfileValidityError(
                    f"branch {self.id}: infinite branches carry no tau or h")


@dataclass(eq=False)
class StarNetwork:
    """Ordered branches around the central node; branch 1 measures."""

    branches: list[Branch]
    a5_tolerance: float = 1e-6
    k_floor: float = K_FLOOR

    def __post_init__(self):
        if not self.branches:
            raise ProfileValidityError("network needs at least one branch")
        if self.branches[0].kind is not BranchKind.INFINITE:
            raise ProfileValidityError("branch 1 must be infinite")
        a0_ref = self.branches[0].geometry.A0
        for b in self.branches:
            if abs(b.geometry.A0 - a0_ref) > self.a5_tolerance * a0_ref:
                raise ProfileValidityError(
                    f"branch {b.id}: A(0)={b.geometry.A0} breaks the "
                    f"matched-node assumption (ref {a0_ref}, "
                    f"rel tol {self.a5_tolerance})")

    @property
    def m(self) -> int:
        return sum(1 for b in self.branches if b.kind is BranchKind.INFINITE)

    @property
    def n(self) -> int:
        return sum(1 for b in self.branches if b.kind is BranchKind.FINITE)

    @property
    def infinite_branches(self) -> list[Branch]:
        return [b for b in self.branches if b.kind is BranchKind.INFINITE]

    @property
    def finite_branches(self) -> list[Branch]:
        return [b for b in self.branches if b.kind is BranchKind.FINITE]


def network_from_profiles(profiles: Sequence[tuple[str, LineProfile]],
                          a5_tolerance: float = 1e-6,
                          k_floor: float = K_FLOOR,
                          grid_step: float = 1e-3) -> StarNetwork:
    """Build a StarNetwork from ("infinite"|"finite", LineProfile) pairs.

    Infinite branches are sorted first so that branch numbering follows the
    usual convention (1..m infinite, m+1..m+n finite); order within each
    group is preserved.
    """
    tagged = []
    for kind_name, profile in profiles:
        kind = BranchKind(kind_name)
        if kind is BranchKind.FINITE and not profile.is_finite:
            raise ProfileValidityError("finite branch built from an "
                                       "infinite-length profile")
        tagged.append((kind, profile))
    tagged.sort(key=lambda t: 0 if t[0] is BranchKind.INFINITE else 1)
    branches = []
    for i, (kind, profile) in enumerate(tagged, start=1):
        pot = potential_from_profile(profile, grid_step)
        geo = branch_geometry(profile, grid_step)
        if kind is BranchKind.INFINITE and profile.is_finite:
            raise ProfileValidityError(
                f"branch {i}: infinite branch with finite profile")
        branches.append(Branch(i, kind, pot, geo))
    return StarNetwork(branches, a5_tolerance, k_floor)


@dataclass(eq=False)
class ScatteringCoefficients:
    """Solution of the node system at one frequency."""

    k: float
    R1: complex
    T: list  # transmission onto infinite branches 2..m
    alpha: list  # finite-branch amplitudes, branches m+1..m+n
    ybar: complex
    condition_number: float
    node_values: list = field(repr=False, default_factory=list)  # (y(0), y'(0)) per branch
    warnings: list = field(default_factory=list)


def _reversed_potential(branch: Branch):
    tau = branch.geometry.tau
    V = branch.potential
    return lambda s: V(tau - np.asarray(s, dtype=float))


def _branch_data(net: StarNetwork, k: np.ndarray, method: str,
                 n_steps: int | None):
    """Per-branch node data arrays over k.

    Infinite branches yield (f0, df0); branch 1 additionally (a, b); finite
    branches yield (omega(tau), omega'(tau)) for the reversed potential with
    initial slope -h.
    """
    data = {}
    for b in net.branches:
        if b.kind is BranchKind.INFINITE:
            if method == "adaptive":
                rows = [jost.jost_at_origin(b.potential, float(kk))
                        for kk in k]
                f0 = np.array([r.f0 for r in rows])
                df0 = np.array([r.df0 for r in rows])
                a = np.array([r.a for r in rows])
                bb = np.array([r.b for r in rows])
            else:
                f0, df0, a, bb, _ = jost.jost_batch(
                    b.potential, k, with_ab=True, n_steps=n_steps)
            data[b.id] = (f0, df0, a, bb)
        else:
            tau, h = b.geometry.tau, b.geometry.h
            vrev = _reversed_potential(b)
            if method == "adaptive":
                rows = [fundamental.fundamental_at(
                    _PotentialView(vrev, b.potential), tau, -h, float(kk))
                    for kk in k]
                om = np.array([r.omega_tau for r in rows])
                dom = np.array([r.domega_tau for r in rows])
            else:
                ones = np.ones_like(k, dtype=complex)
                om, dom = propagate.sweep(vrev, 0.0, tau, k, ones,
                                          (-h) * ones, n_steps=n_steps)
            data[b.id] = (om, dom)
    return data


class _PotentialView:
    """Callable wrapper so adaptive paths can integrate a reversed potential."""

    def __init__(self, fn, base: PotentialFn):
        self._fn = fn
        self.support_end = base.support_end
        self.l1_norm = base.l1_norm

    def __call__(self, x):
        return self._fn(x)


def solve_scattering_batch(net: StarNetwork, k, method: str = "transfer",
                           n_steps: int | None = None,
                           check_k_floor: bool = True):
    """Solve the node system for every k in an array; returns a list of
    ScatteringCoefficients (None-safe entries are the caller's concern; a
    genuinely singular k raises ResonanceError in the scalar API and is
    flagged by ``reflectogram``)."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if check_k_floor and np.any(k < net.k_floor):
        raise DomainError(f"k below the k_floor {net.k_floor}")
    data = _branch_data(net, k, method, n_steps)
    N = len(net.branches)
    nk = k.size
    b1 = net.branches[0]
    f0_1, df0_1, a1, bb1 = data[b1.id]
    A1 = b1.geometry.A0
    saap = sum(b.geometry.A0 * b.geometry.A0prime for b in net.branches)

    c0 = 1.0 / a1 - (bb1 / a1) * f0_1
    d0 = -1j * k / a1 - (bb1 / a1) * df0_1

    # unknown column per branch: R1 for branch 1, then T_j / alpha_j in order
    val_coeff = np.zeros((nk, N), dtype=complex)
    der_coeff = np.zeros((nk, N), dtype=complex)
    val_coeff[:, 0] = f0_1
    der_coeff[:, 0] = df0_1
    for idx, b in enumerate(net.branches[1:], start=1):
        if b.kind is BranchKind.INFINITE:
            f0, df0, _, _ = data[b.id]
            val_coeff[:, idx] = f0
            der_coeff[:, idx] = df0
        else:
            om, dom = data[b.id]
            val_coeff[:, idx] = om
            der_coeff[:, idx] = -dom  # chain rule: y'(0) = -alpha omega'(tau)

    M = np.zeros((nk, N, N), dtype=complex)
    rhs = np.zeros((nk, N), dtype=complex)
    for idx, b in enumerate(net.branches[1:], start=1):
        Aj = b.geometry.A0
        M[:, idx - 1, idx] = val_coeff[:, idx] / Aj
        M[:, idx - 1, 0] = -f0_1 / A1
        rhs[:, idx - 1] = c0 / A1
    Acol = np.array([b.geometry.A0 for b in net.branches])
    M[:, N - 1, :] = der_coeff * Acol[None, :]
    M[:, N - 1, 0] += -saap * f0_1 / A1
    rhs[:, N - 1] = -A1 * d0 + saap * c0 / A1

    cond = np.linalg.cond(M)
    sol = np.linalg.solve(M, rhs[..., None])[..., 0]

    results = []
    m = net.m
    for i in range(nk):
        warns = []
        if abs(a1[i]) < A_RESONANCE_TOL:
            raise ResonanceError(f"a(k={k[i]}) ~ 0 on the measurement branch")
        if cond[i] > COND_WARN:
            warns.append(f"node system ill-conditioned (cond={cond[i]:.3e})")
        R1 = complex(sol[i, 0])
        T = [complex(sol[i, j]) for j in range(1, m)]
        alpha = [complex(sol[i, j]) for j in range(m, N)]
        y1 = complex(c0[i] + f0_1[i] * R1)
        dy1 = complex(d0[i] + df0_1[i] * R1)
        node_vals = [(y1, dy1)]
        for idx, b in enumerate(net.branches[1:], start=1):
            u = complex(sol[i, idx])
            node_vals.append((u * complex(val_coeff[i, idx]),
                              u * complex(der_coeff[i, idx])))
        results.append(ScatteringCoefficients(
            k=float(k[i]), R1=R1, T=T, alpha=alpha,
            ybar=y1 / A1, condition_number=float(cond[i]),
            node_values=node_vals, warnings=warns))
    return results


def solve_scattering(net: StarNetwork, k: float,
                     method: str = "transfer") -> ScatteringCoefficients:
    """Scattering coefficients at a single frequency (k >= k_floor)."""
    return solve_scattering_batch(net, float(k), method=method)[0]


def assemble_field(net: StarNetwork, coeffs: ScatteringCoefficients,
                   branch_id: int, x: float, derivative: bool = False):
    """Field y (optionally (y, y')) on one branch at position x.

    Propagates the stored node boundary values outward, so the result is
    consistent with the coefficients to solver accuracy.
    """
    if branch_id < 1 or branch_id > len(net.branches):
        raise DomainError(f"branch_id {branch_id} out of range")
    b = net.branches[branch_id - 1]
    if x < 0:
        raise DomainError("x must be nonnegative")
    if b.kind is BranchKind.FINITE and x > b.geometry.tau + 1e-12:
        raise DomainError(f"x={x} beyond tau={b.geometry.tau}")
    y0, dy0 = coeffs.node_values[branch_id - 1]
    k = np.array([coeffs.k])
    y, dy = propagate.sweep(b.potential, 0.0, float(x), k,
                            np.array([y0]), np.array([dy0]))
    if derivative:
        return complex(y[0]), complex(dy[0])
    return complex(y[0])


@dataclass(frozen=True)
class ReflectogramEntry:
    k: float
    coeffs: Optional[ScatteringCoefficients]
    resonant: bool = False

    @property
    def R1(self):
        return None if self.coeffs is None else self.coeffs.R1


def reflectogram(net: StarNetwork, k_grid, method: str = "transfer",
                 threads: int = 1) -> list[ReflectogramEntry]:
    """Map solve_scattering over an increasing frequency grid.

    Singular frequencies come back as flagged gap entries instead of
    aborting the sweep.
    """
    k_grid = np.asarray(k_grid, dtype=float)
    if k_grid.size == 0:
        raise DomainError("empty frequency grid")
    if np.any(np.diff(k_grid) <= 0):
        raise DomainError("frequency grid must be strictly increasing")
    if np.any(k_grid < net.k_floor):
        raise DomainError(f"grid extends below k_floor {net.k_floor}")

    def run_chunk(chunk):
        try:
            return solve_scattering_batch(net, chunk, method=method)
        except ResonanceError:
            # fall back to per-k so only the singular entries are lost
            out = []
            for kk in chunk:
                try:
                    out.append(solve_scattering_batch(net, kk, method=method)[0])
                except ResonanceError:
                    out.append(None)
            return out

    if threads > 1 and k_grid.size > 2 * threads:
        from concurrent.futures import ThreadPoolExecutor
        chunks = np.array_split(k_grid, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, chunks))
        flat = [c for part in parts for c in part]
    else:
        flat = run_chunk(k_grid)
    entries = []
    for kk, c in zip(k_grid, flat):
        if c is None or not math.isfinite(abs(c.R1)):
            entries.append(ReflectogramEntry(float(kk), None, resonant=True))
        else:
            entries.append(ReflectogramEntry(float(kk), c))
    return entries
