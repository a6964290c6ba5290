"""Discrete weighted Rayleigh quotient and its constrained minimization.

On a mesh ``s_0 < ... < s_N`` with density ``rho``, a nodal vector ``phi``
is read as the piecewise linear interpolant. The quotient is

    R[phi] = sum_cells h_c rho_c |phi'_c|^p / sum_nodes m_i |phi_i|^p

with ``rho_c`` the cell average of the nodal density and ``m_i`` the
trapezoid weights of ``rho``. The first nonzero eigenvalue is its minimum
under ``sum_i m_i |phi_i|^(p-2) phi_i = 0``.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from .errors import ConstantFunction, NonConvergence, ValidationError, ZeroFunction
from .ptrig import check_p


@dataclass
class WeightedInterval:
    """Mesh with nodal weight density; endpoint densities may vanish (poles)."""

    mesh: np.ndarray
    rho: np.ndarray
    p: float

    def __post_init__(self):
        self.mesh = np.asarray(self.mesh, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        self.p = check_p(self.p)
        if self.mesh.ndim != 1 or self.mesh.shape != self.rho.shape:
            raise ValidationError("mesh and rho must be 1-D arrays of equal length")
        if len(self.mesh) < 3:
            raise ValidationError("need at least two cells")
        if not np.all(np.diff(self.mesh) > 0):
            raise ValidationError("mesh must be strictly increasing")
        if not np.all(np.isfinite(self.rho)) or np.any(self.rho[1:-1] <= 0) or np.any(self.rho < 0):
            raise ValidationError("rho must be positive at interior nodes and nonnegative at the ends")

    @property
    def h(self):
        return np.diff(self.mesh)

    @property
    def cell_weights(self):
        """``h_c * rho_c`` (cell length times mean density)."""
        return self.h * 0.5 * (self.rho[:-1] + self.rho[1:])

    @property
    def node_weights(self):
        """Trapezoid weights ``m_i`` of the density."""
        m = np.zeros_like(self.rho)
        hr = 0.5 * self.h
        m[:-1] += hr * self.rho[:-1]
        m[1:] += hr * self.rho[1:]
        return m

    @property
    def n_cells(self):
        return len(self.mesh) - 1

    @classmethod
    def from_csv(cls, path, p):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows or set(rows[0]) != {"s", "rho"}:
            raise ValidationError("weighted interval CSV needs exactly the columns s, rho")
        return cls(np.array([float(r["s"]) for r in rows]), np.array([float(r["rho"]) for r in rows]), p)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["s", "rho"])
            for s, r in zip(self.mesh, self.rho):
                wr.writerow([repr(float(s)), repr(float(r))])


@dataclass
class DiscreteEigenpair:
    lambda_hat: float
    phi: np.ndarray
    constraint_residual: float
    iterations: int
    history: list = field(default_factory=list, repr=False)
    mesh: np.ndarray = field(default=None, repr=False)

    def to_dict(self):
        return {
            "lambda_hat": self.lambda_hat,
            "constraint_residual": self.constraint_residual,
            "iterations": self.iterations,
            "nodes": len(self.phi),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def phi_to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["s", "phi"])
            for s, v in zip(self.mesh, self.phi):
                wr.writerow([repr(float(s)), repr(float(v))])


def _spow(x, q):
    """Sign-preserving power ``|x|^(q-1) x``, written so that 0 maps to 0 for q < 1."""
    return np.sign(x) * np.abs(x) ** q


def _parts(phi, dom):
    p = dom.p
    g = np.diff(phi) / dom.h
    num = float(np.sum(dom.cell_weights * np.abs(g) ** p))
    den = float(np.sum(dom.node_weights * np.abs(phi) ** p))
    return g, num, den


def rayleigh_quotient(phi, dom):
    phi = np.asarray(phi, dtype=float)
    _, num, den = _parts(phi, dom)
    if den == 0.0:
        raise ZeroFunction("Rayleigh quotient of the zero function")
    return num / den


def constraint_value(phi, dom):
    return float(np.sum(dom.node_weights * _spow(phi, dom.p - 1.0)))


def p_norm(phi, dom):
    return float(np.sum(dom.node_weights * np.abs(phi) ** dom.p)) ** (1.0 / dom.p)


def constraint_scale(phi, dom):
    """``||phi||_p^(p-1) ||rho||_1``, the natural size of the constraint sum."""
    return p_norm(phi, dom) ** (dom.p - 1.0) * float(np.sum(dom.node_weights))


def project_constraint(phi, dom):
    """Shift ``phi - c`` onto ``sum m |phi - c|^(p-2) (phi - c) = 0``.

    The sum is continuous and strictly decreasing in ``c`` and changes sign on
    ``[min phi, max phi]``, so the root is unique.
    """
    phi = np.asarray(phi, dtype=float)
    m = dom.node_weights
    active = m > 0
    lo, hi = float(phi[active].min()), float(phi[active].max())
    if not hi > lo:
        raise ConstantFunction("cannot project a constant function")
    q = dom.p - 1.0
    S = lambda c: float(np.sum(m * _spow(phi - c, q)))
    s_lo, s_hi = S(lo), S(hi)
    if s_lo == 0.0:
        return phi - lo
    if s_hi == 0.0:
        return phi - hi
    c = brentq(S, lo, hi, xtol=1e-15 * max(1.0, abs(lo), abs(hi)), rtol=1e-15, maxiter=500)
    return phi - c


def _normalize(phi, dom):
    return phi / p_norm(phi, dom)


def _gradient(phi, dom, R):
    """Gradient of ``(N - R Den)/p`` (proportional to grad R on ||phi||_p = 1)."""
    p = dom.p
    g = np.diff(phi) / dom.h
    flux = dom.cell_weights * _spow(g, p - 1.0) / dom.h
    gn = np.zeros_like(phi)
    gn[:-1] -= flux
    gn[1:] += flux
    return gn - R * dom.node_weights * _spow(phi, p - 1.0)


def _preconditioner(phi, dom, R):
    """Banded ``(p-1)`` weighted stiffness plus ``R`` times the weighted mass."""
    p = dom.p
    g = np.diff(phi) / dom.h
    gs = np.sqrt(np.mean(g * g)) or 1.0
    ps = np.max(np.abs(phi)) or 1.0
    cw = (p - 1.0) * dom.cell_weights / dom.h ** 2 * (g * g + (1e-3 * gs) ** 2) ** (0.5 * (p - 2.0))
    nw = (p - 1.0) * dom.node_weights * (phi * phi + (1e-3 * ps) ** 2) ** (0.5 * (p - 2.0))
    n = len(phi)
    ab = np.zeros((3, n))
    ab[1, :-1] += cw
    ab[1, 1:] += cw
    ab[1] += max(R, 1e-12) * nw
    ab[0, 1:] = -cw
    ab[2, :-1] = -cw
    return ab


def minimize_rayleigh(dom, init="odd-linear", steps=2000, tol=1e-12, seed=0):
    """Minimize R under the p-mean-zero constraint.

    Projected descent along a preconditioned gradient: the search direction
    solves a tridiagonal system with the local Hessian of the numerator plus
    ``R`` times the weighted mass, minus its component along the linearized
    constraint. Each trial point is projected back onto the constraint and
    normalized to ``||phi||_p = 1``; Armijo backtracking accepts it. Stops when
    the relative decrease of R drops below ``tol``.
    """
    s = dom.mesh
    if len(s) < 17:
        raise ValidationError("minimize_rayleigh needs at least 16 cells")
    if isinstance(init, str):
        if init == "odd-linear":
            phi = s - 0.5 * (s[0] + s[-1])
        elif init == "random":
            phi = np.random.default_rng(seed).standard_normal(len(s))
        else:
            raise ValidationError(f"unknown init {init!r}")
    else:
        phi = np.array(init, dtype=float)
        if phi.shape != s.shape:
            raise ValidationError("init must have one value per mesh node")
        if not np.any(phi):
            raise ZeroFunction("initial function is zero")
    p = dom.p
    m = dom.node_weights
    phi = _normalize(project_constraint(phi, dom), dom)
    R = rayleigh_quotient(phi, dom)
    history = [R]
    rel = math.inf
    it = 0
    for it in range(1, steps + 1):
        grad = _gradient(phi, dom, R)
        ab = _preconditioner(phi, dom, R)
        d = -solve_banded((1, 1), ab, grad)
        # drop the component that moves the constraint to first order
        dc = (p - 1.0) * m * np.maximum(np.abs(phi), 1e-12) ** (p - 2.0)
        z = solve_banded((1, 1), ab, dc)
        d -= (dc @ d) / (dc @ z) * z
        slope = float(grad @ d)
        if slope >= 0:
            d = -grad
            slope = -float(grad @ grad)
        # tau = 1 is the shifted inverse-iteration step for p = 2; larger steps
        # stop damping the high-frequency modes
        tau = 1.0
        accepted = False
        while tau > 1e-14:
            trial = phi + tau * d
            try:
                trial = _normalize(project_constraint(trial, dom), dom)
            except ConstantFunction:
                tau *= 0.5
                continue
            Rt = rayleigh_quotient(trial, dom)
            if Rt <= R + 1e-4 * tau * p * slope:
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            rel = 0.0
            break
        rel = (R - Rt) / Rt
        phi, R = trial, Rt
        history.append(R)
        if rel < tol:
            break
    else:
        gnorm = float(np.linalg.norm(_gradient(phi, dom, R)) / max(np.linalg.norm(m), 1e-300))
        if rel > 10 * tol and gnorm > 1e-6:
            raise NonConvergence(f"relative decrease {rel:.3g} after {steps} steps (gradient {gnorm:.3g})")
    res = constraint_value(phi, dom)
    return DiscreteEigenpair(R, phi, res, it, history, mesh=s.copy())
