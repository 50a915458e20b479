"""Frequency-domain LQR machinery at a fixed real frequency k.

Writing the transformed state as a real 2-vector (real and imaginary
parts), the per-frequency plant is

    x' = A x + B u + C v,    v' = D(t) v,
    A = [[-w_Re, w_Im], [-w_Im, -w_Re]],  B = I2,  C = [I2 | 0],

with v = [Re v, Im v, 1] carrying the exogenous boundary input.  The
finite-horizon control is u* = -B'P x - B'R v where P (2x2) and R (2x3)
solve the backward system

    -P_t = I - P B B' P + P A + A' P,        P(T) = I (or 0),
    -R_t = P C + R D + A' R - P B B' R,      R(T) = 0.

As T grows P(k, 0) approaches p̂(k) I with p̂ = -w_Re + sqrt(w_Re²+1),
the positive root of I - P² + PA + A'P = 0, and the infinite-horizon
law in complex form is

    û*(k,t) = -p̂ φ̂(k,t) - p̂ ∫_t^∞ e^{ω̄(k)(t-τ)} v(k,τ) dτ,

with ω = w + p̂ and ω̄ its conjugate-type partner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepSizeUnderflow
from .quadrature import adaptive_quad
from .spectral import Dispersion, c_eval, w_eval

_I2 = np.eye(2)


@dataclass(frozen=True)
class FrequencyGain:
    """Infinite-horizon quantities at one real frequency."""

    k: float
    phat: float
    omega: complex
    omegabar: complex


def infinite_horizon_gain(d: Dispersion, k) -> FrequencyGain:
    w = complex(w_eval(d, float(k)))
    wre, wim = w.real, w.imag
    root = math.sqrt(wre * wre + 1.0)
    phat = 1.0 / (wre + root)
    return FrequencyGain(k=float(k), phat=phat,
                         omega=complex(root, wim),
                         omegabar=complex(root, -wim))


def system_matrices(d: Dispersion, k):
    """(A, B, C) of the per-frequency real plant."""
    w = complex(w_eval(d, float(k)))
    A = np.array([[-w.real, w.imag], [-w.imag, -w.real]])
    B = _I2.copy()
    C = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return A, B, C


# ── exogenous frequency inputs ───────────────────────────────────────

class ZeroInput:
    """v ≡ 0."""

    vanish_time = 0.0

    def value(self, t):
        return 0j

    def dvalue(self, t):
        return 0j


class CallableInput:
    """Wrap a closed-form v(t); derivative by central differences if absent."""

    def __init__(self, fn, dfn=None, vanish_time=math.inf, fd_step=1e-4):
        self._fn = fn
        self._dfn = dfn
        self._h = fd_step
        self.vanish_time = vanish_time

    def value(self, t):
        return complex(self._fn(t))

    def dvalue(self, t):
        if self._dfn is not None:
            return complex(self._dfn(t))
        h = self._h
        return (complex(self._fn(t + h)) - complex(self._fn(t - h))) / (2 * h)


class BoundaryInput:
    """v(k,t) = -Σ_j c_j(k) [g_j(t) - e^{-ikL} h_j(t)] at fixed k.

    ``pairs`` lists (g_j, h_j) TimeSignals for j = 0..n-1; derivatives
    come from the signals' own closed forms.
    """

    def __init__(self, d: Dispersion, pairs, L, k):
        self._coeffs = [complex(c_eval(d, j, float(k))) for j in range(d.order)]
        self._phase = complex(np.exp(-1j * float(k) * L))
        self._pairs = pairs
        self.vanish_time = max(
            [s.vanish_time for pair in pairs for s in pair if not s.is_zero()],
            default=0.0)

    def value(self, t):
        acc = 0j
        for cj, (gj, hj) in zip(self._coeffs, self._pairs):
            acc += cj * (complex(gj(t)) - self._phase * complex(hj(t)))
        return -acc

    def dvalue(self, t):
        acc = 0j
        for cj, (gj, hj) in zip(self._coeffs, self._pairs):
            acc += cj * (complex(gj.derivative(t)) -
                         self._phase * complex(hj.derivative(t)))
        return -acc


def _d_matrix(v_input, t):
    dv = v_input.dvalue(t)
    D = np.zeros((3, 3))
    D[0, 2] = dv.real
    D[1, 2] = dv.imag
    return D


# ── backward Riccati system ──────────────────────────────────────────

@dataclass
class RiccatiSolution:
    """Dense backward solution of the P and R equations on [0, T]."""

    ts: np.ndarray
    P: np.ndarray          # (n+1, 2, 2)
    R: np.ndarray          # (n+1, 2, 3)
    terminal: str          # "finite_horizon_identity" | "infinite_horizon_zero"
    richardson_error: float

    def _index(self, t):
        i = int(np.searchsorted(self.ts, t))
        return min(max(i, 0), len(self.ts) - 1)

    def P_at(self, t):
        return self._interp(self.P, t)

    def R_at(self, t):
        return self._interp(self.R, t)

    def _interp(self, arr, t):
        ts = self.ts
        if t <= ts[0]:
            return arr[0]
        if t >= ts[-1]:
            return arr[-1]
        i = int(np.searchsorted(ts, t)) - 1
        lam = (t - ts[i]) / (ts[i + 1] - ts[i])
        return (1 - lam) * arr[i] + lam * arr[i + 1]

    def symmetry_defect(self):
        return float(np.max(np.abs(self.P - np.transpose(self.P, (0, 2, 1)))))

    def control(self, phihat, v_input, t):
        """Complex û*(k,t) = c' (-P x - R v) with c = [1, i]."""
        x = np.array([np.real(phihat), np.imag(phihat)])
        v = complex(v_input.value(t))
        vvec = np.array([v.real, v.imag, 1.0])
        u = -self.P_at(t) @ x - self.R_at(t) @ vvec
        return complex(u[0], u[1])


def solve_riccati_finite(d: Dispersion, k, T, v_input=None, *,
                         terminal="finite_horizon_identity",
                         n_steps=None) -> RiccatiSolution:
    """Integrate the backward P/R system with classical RK4.

    Fixed step T/4000 by default; one coarse (halved step count) pass
    supplies a Richardson error estimate at t = 0.  ``v_input`` feeds the
    time-dependent D(t) block; None means v ≡ 0.
    """
    if T <= 0:
        raise ValueError("horizon must be positive")
    v_input = v_input or ZeroInput()
    n = n_steps or 4000
    A, B, C = system_matrices(d, k)

    def rhs(t, P, R):
        # backward equations written in forward time s = T - t
        dP = _I2 - P @ B @ B.T @ P + P @ A + A.T @ P
        dR = P @ C + R @ _d_matrix(v_input, t) + A.T @ R - P @ B @ B.T @ R
        return dP, dR

    def integrate(steps):
        h = T / steps
        ts = np.linspace(0.0, T, steps + 1)
        P = np.empty((steps + 1, 2, 2))
        R = np.empty((steps + 1, 2, 3))
        if terminal == "finite_horizon_identity":
            P[-1] = _I2
        elif terminal == "infinite_horizon_zero":
            P[-1] = 0.0
        else:
            raise ValueError(f"unknown terminal condition {terminal!r}")
        R[-1] = 0.0
        for i in range(steps, 0, -1):
            t = ts[i]
            p, r = P[i], R[i]
            k1p, k1r = rhs(t, p, r)
            k2p, k2r = rhs(t - h / 2, p + h / 2 * k1p, r + h / 2 * k1r)
            k3p, k3r = rhs(t - h / 2, p + h / 2 * k2p, r + h / 2 * k2r)
            k4p, k4r = rhs(t - h, p + h * k3p, r + h * k3r)
            P[i - 1] = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
            R[i - 1] = r + h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r)
            if not (np.all(np.isfinite(P[i - 1])) and np.all(np.isfinite(R[i - 1]))):
                raise StepSizeUnderflow(
                    f"backward integration blew up at t = {t - h:.6g}")
        return ts, P, R

    ts, P, R = integrate(n)
    _, Pc, Rc = integrate(max(n // 2, 2))
    rich = float(max(np.max(np.abs(P[0] - Pc[0])), np.max(np.abs(R[0] - Rc[0]))) / 15.0)
    return RiccatiSolution(ts=ts, P=P, R=R, terminal=terminal,
                           richardson_error=rich)


def rtilde_equilibrium(d: Dispersion, k):
    """R̃ limit -(A' - P)^{-1} P at the stationary gain."""
    A, _, _ = system_matrices(d, k)
    g = infinite_horizon_gain(d, k)
    M = A.T - g.phat * _I2
    return -np.linalg.solve(M, g.phat * _I2)


def rtilde_explicit(d: Dispersion, k, t, T):
    """Closed-form R̃(k,t) = (e^{-(A'-P)(t-T)} - I)(A'-P)^{-1} P.

    The matrix exponential of the rotation-plus-scaling block is
    e^{-(A'-P)s} = e^{(p̂+w_Re)s} [[cos(w_Im s), sin(w_Im s)],
                                   [-sin(w_Im s), cos(w_Im s)]].
    """
    w = complex(w_eval(d, float(k)))
    g = infinite_horizon_gain(d, k)
    A, _, _ = system_matrices(d, k)
    s = t - T
    grow = math.exp((g.phat + w.real) * s)
    rot = np.array([[math.cos(w.imag * s), math.sin(w.imag * s)],
                    [-math.sin(w.imag * s), math.cos(w.imag * s)]])
    M = A.T - g.phat * _I2
    return (grow * rot - _I2) @ np.linalg.solve(M, g.phat * _I2)


# ── infinite-horizon law ─────────────────────────────────────────────

def feedforward_integral(g: FrequencyGain, v_input, t, *, abs_tol=1e-12):
    """∫_t^∞ e^{ω̄(t-τ)} v(k,τ) dτ with the upper limit cut at the vanish time."""
    tbar = getattr(v_input, "vanish_time", 0.0)
    if not tbar > t:
        return 0j

    def f(tau):
        vals = np.array([complex(v_input.value(x)) for x in tau])
        return np.exp(g.omegabar * (t - tau)) * vals

    upper = tbar if math.isfinite(tbar) else t + 80.0 / max(g.omegabar.real, 1e-6)
    value, _, _ = adaptive_quad(f, t, upper, abs_tol=abs_tol, max_evals=40_000)
    return value


def control_from_state(g: FrequencyGain, phihat, v_input, t):
    """û*(k,t) = -p̂ φ̂ - p̂ ∫_t^∞ e^{ω̄(t-τ)} v dτ."""
    return -g.phat * (complex(phihat) + feedforward_integral(g, v_input, t))


def closedloop_solve(g: FrequencyGain, phihat0, v_input, t_grid):
    """Closed-loop trajectory of φ̂_t = -ω φ̂ + v - p̂ ∫_t^∞ e^{ω̄(t-τ)} v dτ.

    Exact exponential propagation of the linear part with trapezoidal
    treatment of the inhomogeneity on the supplied grid.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size < 1 or np.any(np.diff(ts) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    source = np.array([
        complex(v_input.value(t)) - g.phat * feedforward_integral(g, v_input, t)
        for t in ts])
    out = np.empty(ts.size, dtype=complex)
    out[0] = complex(phihat0)
    for i in range(ts.size - 1):
        h = ts[i + 1] - ts[i]
        prop = np.exp(-g.omega * h)
        out[i + 1] = prop * out[i] + 0.5 * h * (prop * source[i] + source[i + 1])
        if not np.isfinite(out[i + 1]):
            raise StepSizeUnderflow("closed-loop propagation lost finiteness")
    return out
