"""Dispersion-relation machinery for the evolution PDE family.

A dispersion is the polynomial symbol w(κ) = Σ α_j κ^j of the spatial
operator.  From it this module derives

* w_Re(κ), w_Im(κ): the polynomials with the real / imaginary parts of
  the α_j (the analytic continuations of Re w, Im w off the real line),
* the closed-loop decay rate ω(κ) = sqrt(w_Re(κ)² + 1) + i w_Im(κ),
* the stationary frequency-domain gain p̂(κ) = -w_Re(κ) + sqrt(w_Re(κ)²+1),
* the polynomials c_j(κ) from the divided difference i(w(κ)-w(l))/(κ-l),
* branch cuts of the square root and the admissible ray contours onto
  which real-line integrals are deformed.

The square root is evaluated on its principal branch with a sign flip
wherever analytic continuation along a radial path from the origin
demands it; for the reaction-diffusion symbol w(κ) = κ² + c the flip
condition is closed-form, elsewhere it is detected by sampling.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BranchCutViolation, InadmissibleContour

_WELLPOSED_K = 100.0
_WELLPOSED_SAMPLES = 1001


@dataclass(frozen=True)
class Dispersion:
    """Polynomial symbol w(κ) = Σ_{j=0}^{n} coeffs[j] κ^j with coeffs[n] != 0."""

    coeffs: tuple
    reaction_c: float | None = None
    deformation_unsupported: bool = field(default=False, compare=False)

    def __post_init__(self):
        coeffs = tuple(complex(a) for a in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 2 or coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        k = np.linspace(-_WELLPOSED_K, _WELLPOSED_K, _WELLPOSED_SAMPLES)
        wk = w_eval(self, k)
        scale = np.abs(wk).max() + 1.0
        if np.min(wk.real) < -1e-9 * scale:
            raise ValueError("ill-posed symbol: Re w(k) < 0 on the real line")
        has_imag = bool(np.abs(wk.imag).max() > 1e-12 * scale)
        object.__setattr__(self, "deformation_unsupported", has_imag)

    @property
    def order(self):
        return len(self.coeffs) - 1

    @classmethod
    def reaction_diffusion(cls, c):
        if c < 0:
            raise ValueError("reaction coefficient must be nonnegative")
        return cls(coeffs=(complex(c), 0j, 1 + 0j), reaction_c=float(c))

    @classmethod
    def heat(cls):
        return cls.reaction_diffusion(0.0)

    @classmethod
    def even_order(cls, n):
        if n < 2 or n % 2:
            raise ValueError("n must be a positive even integer")
        coeffs = [0j] * n + [1 + 0j]
        return cls(coeffs=tuple(coeffs), reaction_c=0.0 if n == 2 else None)

    def is_reaction_diffusion(self):
        return self.reaction_c is not None and self.order == 2


def _horner(coeffs, z):
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for a in reversed(coeffs):
        acc = acc * z + a
    return acc


def w_eval(d: Dispersion, kappa):
    """Symbol value w(κ)."""
    z = np.asarray(kappa, dtype=complex)
    out = _horner(d.coeffs, z)
    return out if out.shape else complex(out)


def w_re_eval(d: Dispersion, kappa):
    """Polynomial continuation of Re w off the real line."""
    z = np.asarray(kappa, dtype=complex)
    out = _horner([a.real for a in d.coeffs], z)
    return out if out.shape else complex(out)


def w_im_eval(d: Dispersion, kappa):
    z = np.asarray(kappa, dtype=complex)
    out = _horner([a.imag for a in d.coeffs], z)
    return out if out.shape else complex(out)


def c_coeffs(d: Dispersion):
    """Coefficient polynomials c_j(κ) of the divided difference.

    Expanding i (w(κ) - w(l)) / (κ - l) in powers of l and mapping
    l^j to the j-th spatial derivative gives
    c_j(κ) = i (-i)^j Σ_{a=j+1}^{n} α_a κ^{a-1-j}.
    Returned as ascending coefficient tuples, j = 0..n-1.
    """
    n = d.order
    out = []
    for j in range(n):
        pref = 1j * (-1j) ** j
        coeffs = tuple(pref * d.coeffs[a] for a in range(j + 1, n + 1))
        out.append(coeffs)
    return out


def c_eval(d: Dispersion, j, kappa):
    """c_j(κ) for a single derivative order j."""
    z = np.asarray(kappa, dtype=complex)
    out = _horner(c_coeffs(d)[j], z)
    return out if out.shape else complex(out)


# ── square root branch tracking ──────────────────────────────────────

def _principal_sqrt_radicand(d, kappa):
    wre = w_re_eval(d, kappa)
    return np.sqrt(np.asarray(wre, dtype=complex) ** 2 + 1.0)


def _rd_flip_mask(c, kappa):
    """Sign flips of the principal sqrt of (κ²+c)²+1 along radial paths.

    Along the ray from 0 to κ the radicand crosses the negative real axis
    at most once, at radius r* with r*² = -c / cos(2θ); the crossing lies
    below the branch point (no flip) unless c |tan 2θ| > 1.
    """
    z = np.asarray(kappa, dtype=complex)
    theta = np.angle(z)
    c2 = np.cos(2 * theta)
    s2 = np.sin(2 * theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        crossing = (c2 < 0) & (np.abs(z) ** 2 * (-c2) >= c)
        deep = np.abs(np.where(c2 != 0, s2 / c2, np.inf)) * c > 1.0
    return crossing & deep & (c > 0)


def omega_sqrt_eval(d: Dispersion, kappa):
    """sqrt(w_Re(κ)²+1) continued radially from the origin."""
    scalar = not np.asarray(kappa).shape
    if d.is_reaction_diffusion():
        val = _principal_sqrt_radicand(d, kappa)
        flip = _rd_flip_mask(d.reaction_c, kappa)
        out = np.where(flip, -val, val)
        return complex(out) if scalar else out
    z = np.atleast_1d(np.asarray(kappa, dtype=complex))
    out = np.empty(z.shape, dtype=complex)
    flat = out.ravel()
    for i, zi in enumerate(z.ravel()):
        path = zi * np.linspace(0.0, 1.0, 1024)
        flat[i] = omega_sqrt_along_path(d, path)[-1]
    return complex(flat[0]) if scalar else out


def omega_sqrt_along_path(d: Dispersion, path):
    """Continuity-tracked sqrt(w_Re²+1) along an ordered sample path.

    The first path point anchors the principal branch; a sign flip is
    recorded whenever the principal value jumps between adjacent samples
    (|Δ| > 0.5 |previous| with the flipped difference smaller).
    """
    vals = _principal_sqrt_radicand(d, np.asarray(path, dtype=complex))
    prev = vals[:-1]
    nxt = vals[1:]
    jump = (np.abs(nxt - prev) > 0.5 * np.abs(prev)) & \
           (np.abs(nxt + prev) < np.abs(nxt - prev))
    signs = np.concatenate(([1.0], np.cumprod(np.where(jump, -1.0, 1.0))))
    return vals * signs


def branch_cut_distance(cuts: "BranchCutSet", kappa):
    """Distance from κ to the nearest cut ray."""
    z = np.asarray(kappa, dtype=complex)
    dists = []
    for origin, angle in zip(cuts.branch_points, cuts.cut_angles):
        v = z - origin
        direction = cmath.exp(1j * angle)
        s = (v * np.conj(direction)).real
        perp = np.abs((v * np.conj(direction)).imag)
        dists.append(np.where(s <= 0, np.abs(v), perp))
    out = np.min(dists, axis=0)
    return out if out.shape else float(out)


def _check_off_cuts(d, cuts, kappa):
    if cuts is None:
        return
    tol = 1e-8 * (1.0 + np.abs(np.asarray(kappa)))
    if np.any(branch_cut_distance(cuts, kappa) < tol):
        raise BranchCutViolation("frequency point lies on a branch cut ray")


def omega_eval(d: Dispersion, kappa, *, cuts=None):
    """Closed-loop rate ω(κ) = sqrt(w_Re(κ)²+1) + i w_Im(κ)."""
    if cuts is None and (d.is_reaction_diffusion() or d.order <= 8):
        cuts = branch_cut_set(d)
    _check_off_cuts(d, cuts, kappa)
    return omega_sqrt_eval(d, kappa) + 1j * w_im_eval(d, kappa)


def omegabar_eval(d: Dispersion, kappa, *, cuts=None):
    """Conjugate-type partner ω̄(κ) = sqrt(w_Re(κ)²+1) - i w_Im(κ)."""
    if cuts is None and (d.is_reaction_diffusion() or d.order <= 8):
        cuts = branch_cut_set(d)
    _check_off_cuts(d, cuts, kappa)
    return omega_sqrt_eval(d, kappa) - 1j * w_im_eval(d, kappa)


def phat_eval(d: Dispersion, kappa, *, cuts=None):
    """Stationary gain p̂(κ) = -w_Re(κ) + sqrt(w_Re(κ)²+1).

    Uses the algebraic identity p̂ (w_Re + sqrt(w_Re²+1)) = 1 to avoid
    cancellation when w_Re is large on the principal sheet.
    """
    if cuts is None and (d.is_reaction_diffusion() or d.order <= 8):
        cuts = branch_cut_set(d)
    _check_off_cuts(d, cuts, kappa)
    wre = np.asarray(w_re_eval(d, kappa), dtype=complex)
    root = np.asarray(omega_sqrt_eval(d, kappa), dtype=complex)
    denom = wre + root
    use_recip = np.abs(denom) >= 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        recip = np.where(use_recip, 1.0 / np.where(use_recip, denom, 1.0), 0.0)
    out = np.where(use_recip, recip, root - wre)
    return out if out.shape else complex(out)


def phat_omega_real(d: Dispersion, k):
    """(p̂, ω) on the real line, where no branch concerns arise."""
    k = np.asarray(k, dtype=float)
    wre = _horner([a.real for a in d.coeffs], k.astype(complex)).real
    wim = _horner([a.imag for a in d.coeffs], k.astype(complex)).real
    root = np.sqrt(wre ** 2 + 1.0)
    return 1.0 / (wre + root), root + 1j * wim


def delta_eval(kappa, L):
    """Δ(κ) = e^{iκL} - e^{-iκL} = 2i sin(κL)."""
    z = np.asarray(kappa, dtype=complex)
    out = 2j * np.sin(z * L)
    return out if out.shape else complex(out)


def sin_ratio(kappa, a, L):
    """sin(κa)/sin(κL), stable for Im κ >= 0 and near κ = 0.

    For Im(κL) large the ratio is rewritten with decaying exponentials
    only; for |κL| small a three-term Taylor quotient is used.
    """
    scalar = not np.asarray(kappa).shape
    z = np.atleast_1d(np.asarray(kappa, dtype=complex))
    zl = z * L
    za = z * a
    out = np.empty(z.shape, dtype=complex)

    tiny = np.abs(zl) < 1e-3
    big = (zl.imag > 20.0) & ~tiny
    mid = ~tiny & ~big

    if np.any(tiny):
        zat, zlt = za[tiny], zl[tiny]
        num = 1.0 - zat ** 2 / 6.0 + zat ** 4 / 120.0
        den = 1.0 - zlt ** 2 / 6.0 + zlt ** 4 / 120.0
        out[tiny] = (a / L) * num / den
    if np.any(big):
        zb, zab = z[big], za[big]
        e2a = np.exp(2j * zab)
        e2l = np.exp(2j * zb * L)
        out[big] = np.exp(1j * zb * (L - a)) * (1.0 - e2a) / (1.0 - e2l)
    if np.any(mid):
        out[mid] = np.sin(za[mid]) / np.sin(zl[mid])
    return complex(out[0]) if scalar else out


# ── branch cuts and contours ─────────────────────────────────────────

@dataclass(frozen=True)
class BranchCutSet:
    """Finite branch points of sqrt(w_Re²+1) with radial cut rays."""

    branch_points: tuple
    cut_angles: tuple

    @property
    def cut_rays(self):
        return tuple(zip(self.branch_points, self.cut_angles))


@lru_cache(maxsize=64)
def branch_cut_set(d: Dispersion) -> BranchCutSet:
    """Branch points solve w_Re(κ)² = -1; cuts run radially to infinity.

    For the reaction-diffusion symbol the points solve κ² = -c ± i,
    giving modulus (c²+1)^{1/4}; the four radial cuts along their
    arguments leave the plane simply connected, so the tracked square
    root is single-valued off the cuts.
    """
    if d.is_reaction_diffusion():
        c = d.reaction_c
        r1 = cmath.sqrt(complex(-c, 1.0))
        r2 = cmath.sqrt(complex(-c, -1.0))
        pts = (r1, -r1, r2, -r2)
    else:
        poly_re = [a.real for a in d.coeffs]
        sq = np.polynomial.polynomial.polymul(poly_re, poly_re)
        sq[0] += 1.0
        pts = tuple(np.polynomial.polynomial.polyroots(sq))
    angles = tuple(float(np.angle(p)) for p in pts)
    return BranchCutSet(branch_points=pts, cut_angles=angles)


@dataclass(frozen=True)
class RayContour:
    """One radial contour leg κ = r e^{iθ}, r in [origin_offset, truncation_radius]."""

    angle: float
    origin_offset: float
    truncation_radius: float
    orientation: int  # +1 traversed outward, -1 inward ("left to right" overall)

    def __post_init__(self):
        if not (self.origin_offset > 0 and self.truncation_radius > self.origin_offset):
            raise ValueError("need 0 < origin_offset < truncation_radius")

    def points(self, radii):
        return np.asarray(radii) * cmath.exp(1j * self.angle)


@dataclass(frozen=True)
class AdmissibilityReport:
    min_re_omega: float
    min_cut_distance: float
    n_samples: int


@dataclass(frozen=True)
class ContourFamily:
    """The upper deformation boundary: two rays traversed left to right."""

    rays: tuple
    branch_cuts: BranchCutSet
    admissibility: AdmissibilityReport

    @property
    def upper_angle(self):
        return self.rays[0].angle


def contour_angles(d: Dispersion):
    """Ray angles of the upper deformation boundary for w(κ) = κ² + c.

    θ = arctan2(1, c)/4 and π - θ; the c = 0 limit is π/8 and 7π/8.
    """
    if not d.is_reaction_diffusion():
        raise InadmissibleContour(
            "ray contours are only constructed for the reaction-diffusion symbol")
    theta = math.atan2(1.0, d.reaction_c) / 4.0
    return theta, math.pi - theta


def auto_truncation_radius(d: Dispersion, theta, t_min, *, decay=40.0):
    """Smallest radius R with Re ω(R e^{iθ}) t_min >= decay (then rounded up)."""
    c = d.reaction_c if d.reaction_c is not None else 0.0
    r = math.sqrt(max(decay / max(t_min, 1e-12), 1.0) / max(math.cos(2 * theta), 0.05))
    r = max(r, 2.0 * (c * c + 1.0) ** 0.25)
    for _ in range(64):
        w = omega_sqrt_eval(d, r * cmath.exp(1j * theta))
        if complex(w).real * t_min >= decay:
            return float(r)
        r *= 1.5
    raise InadmissibleContour("could not certify a truncation radius")


def build_contour(d: Dispersion, quad, *, validate=True,
                  angle_offset=0.0) -> ContourFamily:
    """Construct and validate the upper deformation rays.

    ``quad`` supplies origin offset, optional fixed truncation radius and
    the smallest evaluation time used for the default tail bound.
    ``angle_offset`` exists for fault-injection tests and shifts both ray
    angles; with ``validate=False`` the admissibility gate is skipped but
    the report is still filled in.
    """
    theta, theta_left = contour_angles(d)
    theta += angle_offset
    theta_left -= angle_offset
    eps = quad.epsilon_origin
    if quad.truncation_radius is not None:
        rmax = float(quad.truncation_radius)
    else:
        rmax = auto_truncation_radius(d, theta, quad.t_min)
    rays = (
        RayContour(angle=theta, origin_offset=eps, truncation_radius=rmax,
                   orientation=+1),
        RayContour(angle=theta_left, origin_offset=eps, truncation_radius=rmax,
                   orientation=-1),
    )
    cuts = branch_cut_set(d)
    radii = np.geomspace(eps, rmax, 1501)
    min_re = math.inf
    min_dist = math.inf
    for ray in rays:
        pts = ray.points(radii)
        w = omega_sqrt_along_path(d, pts)
        min_re = min(min_re, float(w.real.min()))
        min_dist = min(min_dist, float(np.min(branch_cut_distance(cuts, pts))))
    report = AdmissibilityReport(min_re_omega=min_re, min_cut_distance=min_dist,
                                 n_samples=2 * radii.size)
    if validate:
        if min_re <= 0:
            raise InadmissibleContour(
                f"Re ω reaches {min_re:.3e} <= 0 along a deformation ray")
        if min_dist <= eps:
            raise InadmissibleContour("a deformation ray meets a branch cut")
    return ContourFamily(rays=rays, branch_cuts=cuts, admissibility=report)
