"""Global functionals: quermassintegrals, volume, slice closed forms.

The quermassintegral ladder is

    A_{-1} = Vol(Omega),  A_0 = |M|,  A_1 = int sigma_1 - n Vol(Omega),
    A_m = int sigma_m d(mu) - (n - m + 1)/(m - 1) * A_{m-2},  2 <= m <= n.

Vol(Omega) uses the Lorentzian density |det gbar|^(1/2) = cosh^n(r) in
(r, xi) coordinates.  xi_k0(a) is A_k of the radial slice whose area is a;
for k = 2 the closed form is (C(n,2) tanh^2(r) - (n-1)) * a.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import acosh, comb

import numpy as np

from . import symfunc
from .errors import DomainError
from .geometry import RadialGraph, surface_geometry
from .grids import integrate, sphere_area

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _cosh_power_integral(rho, n: int):
    """int_0^rho cosh^n(s) ds per node, 16-point Gauss-Legendre."""
    rho = np.asarray(rho, dtype=float)
    half = 0.5 * rho
    s = half[..., None] * (_GL_NODES + 1.0)
    return half * np.sum(_GL_WEIGHTS * np.cosh(s) ** n, axis=-1)


@dataclass
class SliceModel:
    """Closed-form quantities of the radial coordinate slice {r = const}."""

    r: float
    n: int

    @property
    def kappa(self) -> float:
        return float(np.tanh(self.r))

    @property
    def area(self) -> float:
        return sphere_area(self.n) * np.cosh(self.r) ** self.n

    def sigma(self, m: int) -> float:
        return comb(self.n, m) * self.kappa ** m

    def curvature_integral(self, m: int) -> float:
        return self.sigma(m) * self.area

    @property
    def volume(self) -> float:
        return sphere_area(self.n) * float(_cosh_power_integral(self.r, self.n))

    def quermass(self) -> np.ndarray:
        """A_{-1} .. A_n as an array indexed by m + 1."""
        n = self.n
        A = np.empty(n + 2)
        A[0] = self.volume
        A[1] = self.area
        if n >= 1:
            A[2] = self.curvature_integral(1) - n * A[0]
        for m in range(2, n + 1):
            A[m + 1] = (self.curvature_integral(m)
                        - (n - m + 1) / (m - 1) * A[m - 1])
        return A

    def A(self, m: int) -> float:
        return float(self.quermass()[m + 1])


@dataclass
class QuermassReport:
    """Quermassintegrals and derived diagnostics of one hypersurface."""

    n: int
    A: np.ndarray              # A_{-1} .. A_n, indexed by m + 1
    hm_residual: np.ndarray    # Hsiung-Minkowski residuals, m = 0 .. n-1
    gap: float                 # xi_20(A_0) - A_2

    def A_m(self, m: int) -> float:
        return float(self.A[m + 1])


def curvature_integral(M: RadialGraph, m: int) -> float:
    """int_M sigma_m(kappa) d(mu_g) by quadrature with the area density."""
    n = M.n
    if not 0 <= m <= n:
        raise DomainError(f"m={m} out of range 0..{n}")
    geo = surface_geometry(M)
    sm = symfunc.sigma_batch(geo.kappa, m)[..., m]
    return integrate(sm * geo.area_weight, M.grid)


def enclosed_volume(M: RadialGraph) -> float:
    """Lorentzian volume of the radial region below the graph."""
    inner = _cosh_power_integral(M.rho, M.n)
    return integrate(inner, M.grid)


def hsiung_minkowski_residual(M: RadialGraph, m: int) -> float:
    """int u sigma_{m+1} d(mu) - (n-m)/(m+1) int phi' sigma_m d(mu)."""
    n = M.n
    if not 0 <= m <= n - 1:
        raise DomainError(f"m={m} out of range 0..{n - 1}")
    geo = surface_geometry(M)
    e = symfunc.sigma_batch(geo.kappa, m + 1)
    lhs = integrate(geo.u * e[..., m + 1] * geo.area_weight, M.grid)
    rhs = integrate(geo.phi_prime * e[..., m] * geo.area_weight, M.grid)
    return lhs - (n - m) / (m + 1) * rhs


def xi(a: float, n: int, k: int = 2) -> float:
    """A_k of the radial slice with surface area a (the function xi_{k,0}).

    The slice radius solves omega_n cosh^n(r) = a in closed form through
    arccosh; a below the r = 0 area omega_n is a domain error.
    """
    wn = sphere_area(n)
    if a < wn * (1.0 - 1e-12):
        raise DomainError(f"area {a} below minimum slice area {wn}")
    r = acosh(max(1.0, (a / wn) ** (1.0 / n)))
    return SliceModel(r, n).A(k)


def quermass_all(M: RadialGraph, k: int = 2) -> QuermassReport:
    """Full quermassintegral ladder, HM residuals and inequality gap of M."""
    n = M.n
    geo = surface_geometry(M)
    e = symfunc.sigma_batch(geo.kappa, n)
    ints = np.array([integrate(e[..., m] * geo.area_weight, M.grid)
                     for m in range(n + 1)])
    A = np.empty(n + 2)
    A[0] = enclosed_volume(M)
    A[1] = ints[0]
    A[2] = ints[1] - n * A[0]
    for m in range(2, n + 1):
        A[m + 1] = ints[m] - (n - m + 1) / (m - 1) * A[m - 1]
    hm = np.empty(n)
    phi_int = np.array([integrate(geo.phi_prime * e[..., m] * geo.area_weight,
                                  M.grid) for m in range(n)])
    u_int = np.array([integrate(geo.u * e[..., m + 1] * geo.area_weight,
                                M.grid) for m in range(n)])
    for m in range(n):
        hm[m] = u_int[m] - (n - m) / (m + 1) * phi_int[m]
    gap = xi(A[1], n, k) - A[k + 1]
    return QuermassReport(n=n, A=A, hm_residual=hm, gap=gap)


def inequality_gap(M: RadialGraph) -> float:
    """xi_20(A_0(M)) - A_2(M); non-negative, zero exactly on slices."""
    return quermass_all(M, k=2).gap


def slice_table(n: int, r_min: float, r_max: float, steps: int):
    """Rows (r, A_{-1} .. A_n, xi_gap) for a scan of radial slices."""
    if steps < 1 or r_max < r_min:
        raise DomainError("need steps >= 1 and r_max >= r_min")
    rows = []
    for r in np.linspace(r_min, r_max, steps):
        model = SliceModel(float(r), n)
        A = model.quermass()
        gap = xi(A[1], n) - A[3] if n >= 2 else float("nan")
        rows.append((float(r), A, gap))
    return rows
