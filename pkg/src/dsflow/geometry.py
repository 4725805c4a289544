"""Extrinsic geometry of spacelike radial graphs in de Sitter space.

A hypersurface is the radial graph M = {(rho(xi), xi)} over S^n inside the
unit de Sitter space (ambient metric -dr^2 + cosh^2(r) sigma).  In the
sigma-orthonormal frame the induced metric and second fundamental form are

    g_ij = -rho_i rho_j + cosh^2(rho) delta_ij
    h_ij = (cosh(rho)/w) (H_ij - 2 rho_i rho_j tanh(rho)
                          + sinh(rho) cosh(rho) delta_ij)

with H the covariant Hessian of rho on S^n and w^2 = cosh^2(rho) - |grad rho|^2.
Principal curvatures solve the symmetric-definite pencil h v = kappa g v.

The area density against d(sigma) is cosh^(n-1)(rho) * w, which follows from
det g = cosh^(2n)(rho) (1 - |grad rho|^2 / cosh^2(rho)) det sigma and is
cross-checked by a determinant test in the suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import symfunc
from .errors import ConeError, DomainError, SpacelikeError
from .grids import SphereJet, integrate, sphere_jet


class RadialGraph:
    """A scalar radial field over a sphere grid; the hypersurface itself."""

    def __init__(self, grid, rho):
        rho = np.asarray(rho, dtype=float)
        if rho.shape != grid.shape:
            raise DomainError(f"rho shape {rho.shape} != grid shape {grid.shape}")
        if not np.all(np.isfinite(rho)):
            raise DomainError("rho contains NaN/inf")
        self.grid = grid
        self.rho = rho

    @property
    def n(self) -> int:
        return self.grid.n


@dataclass
class PointGeometry:
    """Full per-node geometry package (dense n x n frame matrices)."""

    w: float
    u: float
    g: np.ndarray
    g_inv: np.ndarray
    h: np.ndarray
    kappa: np.ndarray          # sorted non-increasing
    area_weight: float
    Phi: float
    phi_prime: float
    phi: float


@dataclass
class SurfaceGeometry:
    """Vectorized geometry of a whole radial graph.

    Frame tensors are stored in the reduced (theta, azimuthal) block form:
    direction 2 carries multiplicity n-1 on the axisymmetric grid.  kappa
    has one extra trailing axis of length n, sorted non-increasing.
    """

    graph: RadialGraph
    jet: SphereJet
    w: np.ndarray
    u: np.ndarray
    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    h11: np.ndarray
    h12: np.ndarray
    h22: np.ndarray
    kappa: np.ndarray
    area_weight: np.ndarray
    Phi: np.ndarray
    phi_prime: np.ndarray
    cosh_rho: np.ndarray


def _frame_tensors(jet: SphereJet, rho: np.ndarray):
    ch = np.cosh(rho)
    sh = np.sinh(rho)
    gradsq = jet.g1 ** 2 + jet.g2 ** 2
    w2 = ch ** 2 - gradsq
    g11 = ch ** 2 - jet.g1 ** 2
    g12 = -jet.g1 * jet.g2
    g22 = ch ** 2 - jet.g2 ** 2
    return ch, sh, w2, g11, g12, g22


def surface_geometry(M: RadialGraph) -> SurfaceGeometry:
    """All pointwise geometric data of M; raises SpacelikeError if w^2 <= 0."""
    jet = sphere_jet(M.rho, M.grid)
    ch, sh, w2, g11, g12, g22 = _frame_tensors(jet, M.rho)
    if np.min(w2) <= 0.0:
        node = int(np.argmin(w2))
        raise SpacelikeError(np.unravel_index(node, w2.shape), float(np.min(w2)))
    w = np.sqrt(w2)
    th = sh / ch
    fac = ch / w
    h11 = fac * (jet.h11 - 2.0 * jet.g1 ** 2 * th + sh * ch)
    h12 = fac * (jet.h12 - 2.0 * jet.g1 * jet.g2 * th)
    h22 = fac * (jet.h22 - 2.0 * jet.g2 ** 2 * th + sh * ch)
    n = M.n
    if M.grid.kind == "axisym":
        # diagonal pencil: one theta curvature, n-1 equal azimuthal ones
        k_th = h11 / g11
        k_az = h22 / g22
        kappa = np.concatenate(
            (k_th[..., None], np.repeat(k_az[..., None], n - 1, axis=-1)), axis=-1)
    else:
        # closed-form 2x2 symmetric-definite pencil
        a = g11 * g22 - g12 ** 2
        b = g11 * h22 + g22 * h11 - 2.0 * g12 * h12
        c = h11 * h22 - h12 ** 2
        disc = np.sqrt(np.maximum(b ** 2 - 4.0 * a * c, 0.0))
        kp = (b + disc) / (2.0 * a)
        km = (b - disc) / (2.0 * a)
        kappa = np.stack((kp, km), axis=-1)
    kappa = np.flip(np.sort(kappa, axis=-1), axis=-1)
    return SurfaceGeometry(
        graph=M, jet=jet, w=w, u=ch ** 2 / w,
        g11=g11, g12=g12, g22=g22, h11=h11, h12=h12, h22=h22,
        kappa=kappa, area_weight=ch ** (n - 1) * w,
        Phi=-sh, phi_prime=sh, cosh_rho=ch)


def pointwise_geometry(jet: SphereJet, n: int) -> PointGeometry:
    """Dense single-node geometry from scalar jet data.

    The jet holds scalars (theta component first, azimuthal second); the
    remaining n-2 frame directions are azimuthal copies.  Principal
    curvatures come from scipy's symmetric-definite eigensolver.
    """
    rho = float(jet.value)
    grad = np.zeros(n)
    grad[0] = float(jet.g1)
    if n >= 2:
        grad[1] = float(jet.g2)
    hess = np.zeros((n, n))
    hess[0, 0] = float(jet.h11)
    for a in range(1, n):
        hess[a, a] = float(jet.h22)
    hess[0, 1] = hess[1, 0] = float(jet.h12)
    ch, sh = np.cosh(rho), np.sinh(rho)
    w2 = ch ** 2 - float(grad @ grad)
    if w2 <= 0.0:
        raise SpacelikeError(None, w2)
    w = np.sqrt(w2)
    g = ch ** 2 * np.eye(n) - np.outer(grad, grad)
    h = (ch / w) * (hess - 2.0 * np.outer(grad, grad) * (sh / ch)
                    + sh * ch * np.eye(n))
    kappa = scipy.linalg.eigh(h, g, eigvals_only=True)[::-1]
    return PointGeometry(
        w=float(w), u=float(ch ** 2 / w), g=g, g_inv=np.linalg.inv(g), h=h,
        kappa=np.asarray(kappa), area_weight=float(ch ** (n - 1) * w),
        Phi=float(-sh), phi_prime=float(sh), phi=float(ch))


def normal_speed(pt: PointGeometry, k: int) -> float:
    """Flow speed S = u - b_{n,k} phi' sigma_k^(-1/k) at one node."""
    n = pt.kappa.shape[-1]
    if not symfunc.gamma_cone_test(pt.kappa, k, strict=True):
        raise ConeError(f"kappa {pt.kappa} not strictly in Gamma_{k}")
    sk = symfunc.sigma(pt.kappa, k)
    return pt.u - symfunc.b_nk(n, k) * pt.phi_prime * sk ** (-1.0 / k)


@dataclass
class ValidationReport:
    """Outcome of the spacelike + strict k-convexity check."""

    k: int
    min_w2: float
    min_sigma: dict
    max_abs_kappa: float
    spacelike: bool
    strictly_convex: bool

    @property
    def passed(self) -> bool:
        return self.spacelike and self.strictly_convex


def validate_hypersurface(M: RadialGraph, k: int) -> ValidationReport:
    """Report min w^2, min sigma_j (j <= k) and max |kappa| over all nodes."""
    jet = sphere_jet(M.rho, M.grid)
    _, _, w2, _, _, _ = _frame_tensors(jet, M.rho)
    min_w2 = float(np.min(w2))
    if min_w2 <= 0.0:
        return ValidationReport(k=k, min_w2=min_w2, min_sigma={},
                                max_abs_kappa=float("nan"),
                                spacelike=False, strictly_convex=False)
    geo = surface_geometry(M)
    e = symfunc.sigma_batch(geo.kappa, k)
    min_sigma = {j: float(np.min(e[..., j])) for j in range(1, k + 1)}
    return ValidationReport(
        k=k, min_w2=min_w2, min_sigma=min_sigma,
        max_abs_kappa=float(np.max(np.abs(geo.kappa))),
        spacelike=True,
        strictly_convex=all(v > 0.0 for v in min_sigma.values()))


# --- discrete identity checks ----------------------------------------------

def _axisym_dtheta(field: np.ndarray, h: float, even: bool = True) -> np.ndarray:
    """Centred theta derivative with reflection ghosts (even extension)."""
    sign = 1.0 if even else -1.0
    fm = np.concatenate(([sign * field[1]], field[:-1]))
    fp = np.concatenate((field[1:], [sign * field[-2]]))
    return (fp - fm) / (2.0 * h)


def _identity_residuals_axisym(M: RadialGraph, geo: SurfaceGeometry):
    grid = M.grid
    n, h = M.n, grid.h
    u, Phi = geo.u, geo.Phi
    # (a) gradient identity: d_theta u + h^theta_theta d_theta Phi = 0
    du = _axisym_dtheta(u, h)
    dPhi = _axisym_dtheta(Phi, h)
    grad_res = np.abs(du + (geo.h11 / geo.g11) * dPhi)
    # (b) traced Hessian identity in divergence (flux) form, poles excluded
    sfac = np.sin(grid.theta) ** (n - 1)
    # half-node coefficient: average only the smooth factor and evaluate the
    # sin^(n-1) weight exactly at the half node (an arithmetic mean of the
    # full coefficient is O(1) wrong next to the poles where sin^(n-1)
    # varies by its own magnitude across one cell)
    smooth = geo.area_weight / geo.g11
    sfac_half = np.sin(grid.theta[:-1] + 0.5 * h) ** (n - 1)
    coef_half = 0.5 * (smooth[1:] + smooth[:-1]) * sfac_half
    flux = coef_half * np.diff(Phi) / h
    # finite-volume denominator: cell-integrated sin^(n-1) weight (the
    # pointwise value is O(1) wrong one node away from the poles)
    gx, gw = np.polynomial.legendre.leggauss(5)
    mid = grid.theta[1:-1]
    cell = 0.5 * h * np.sum(
        gw[None, :] * np.sin(mid[:, None] + 0.5 * h * gx[None, :]) ** (n - 1),
        axis=1)
    lap = np.full_like(Phi, np.nan)
    lap[1:-1] = np.diff(flux) / (geo.area_weight[1:-1] * cell)
    sigma1 = np.sum(geo.kappa, axis=-1)
    target = n * geo.phi_prime - sigma1 * u
    hess_res = np.abs(lap - target)[1:-1]
    residual_field = np.zeros_like(Phi)
    residual_field[1:-1] = (lap - target)[1:-1]
    hess_int = integrate(residual_field * geo.area_weight, grid)
    return grad_res, hess_res, hess_int


def _identity_residuals_latlong(M: RadialGraph, geo: SurfaceGeometry):
    grid = M.grid
    u_jet = sphere_jet(geo.u, grid)
    phi_jet = sphere_jet(geo.Phi, grid)
    # (a) frame gradient identity with mixed h^k_i = (g^-1 h)_ki
    det = geo.g11 * geo.g22 - geo.g12 ** 2
    gi11, gi12, gi22 = geo.g22 / det, -geo.g12 / det, geo.g11 / det
    m11 = gi11 * geo.h11 + gi12 * geo.h12
    m12 = gi11 * geo.h12 + gi12 * geo.h22
    m21 = gi12 * geo.h11 + gi22 * geo.h12
    m22 = gi12 * geo.h12 + gi22 * geo.h22
    r1 = u_jet.g1 + m11 * phi_jet.g1 + m21 * phi_jet.g2
    r2 = u_jet.g2 + m12 * phi_jet.g1 + m22 * phi_jet.g2
    grad_res = np.sqrt(r1 ** 2 + r2 ** 2)
    # (b) Laplace-Beltrami of Phi in coordinate divergence form
    st = np.sin(grid.theta)[:, None]
    sqrtg = geo.area_weight * st
    # coordinate inverse metric from the frame one
    ct11 = gi11
    ct12 = gi12 / st
    ct22 = gi22 / st ** 2
    phi_t = phi_jet.g1
    phi_p = phi_jet.g2 * st
    Pt = sqrtg * (ct11 * phi_t + ct12 * phi_p)
    Pp = sqrtg * (ct12 * phi_t + ct22 * phi_p)
    half = grid.nphi // 2

    # one-ghost pad with cross-pole parity: P^theta is even across the pole
    # (as a flux density), P^phi is odd
    def pad1(F, sign):
        top = sign * np.roll(F[0], half)[None, :]
        bot = sign * np.roll(F[-1], half)[None, :]
        ext = np.concatenate((top, F, bot), axis=0)
        return np.concatenate((ext[:, -1:], ext, ext[:, :1]), axis=1)

    pt_pad = pad1(Pt, 1.0)
    pp_pad = pad1(Pp, -1.0)
    dPt = (pt_pad[2:, 1:-1] - pt_pad[:-2, 1:-1]) / (2.0 * grid.dtheta)
    dPp = (pp_pad[1:-1, 2:] - pp_pad[1:-1, :-2]) / (2.0 * grid.dphi)
    lap = (dPt + dPp) / sqrtg
    sigma1 = np.sum(geo.kappa, axis=-1)
    target = M.n * geo.phi_prime - sigma1 * geo.u
    hess_res = np.abs(lap - target)
    hess_int = integrate((lap - target) * geo.area_weight, grid)
    return grad_res, hess_res, hess_int


def identity_residuals(M: RadialGraph) -> dict:
    """Discrete residuals of the support-function identities on M.

    Returns max-norm residuals of (a) grad u + h(grad Phi, .) = 0 and
    (b) Lap_g Phi - (n phi' - sigma_1 u), plus the quadrature integral of
    (b) against d(mu_g), which vanishes on closed M up to O(h^2).
    """
    geo = surface_geometry(M)
    if M.grid.kind == "axisym":
        grad_res, hess_res, hess_int = _identity_residuals_axisym(M, geo)
    else:
        grad_res, hess_res, hess_int = _identity_residuals_latlong(M, geo)
    return {
        "gradient": float(np.max(grad_res)),
        "traced_hessian": float(np.max(hess_res)),
        "traced_hessian_integral": float(hess_int),
    }
