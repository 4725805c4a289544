"""Finite-difference grids on the round sphere S^n.

Two discretizations are provided:

* ``AxisymGrid`` -- axisymmetric fields rho(theta) on S^n for any n >= 2,
  theta uniform on [0, pi] including both poles.  Pole regularity
  rho'(0) = rho'(pi) = 0 is enforced through reflection ghost nodes.
* ``LatLongGrid`` -- full latitude-longitude grid for n = 2 with
  pole-offset theta nodes and periodic phi; cross-pole neighbours are the
  antipodal (phi + pi) nodes of the nearest ring.

All derivative stencils are second-order centred differences.  Jets are
reported in the sigma-orthonormal frame {d_theta, sin(theta)^-1 d_phi}.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gamma, pi

import numpy as np

from .errors import DomainError


def sphere_area(n: int) -> float:
    """Surface area omega_n of the unit sphere S^n."""
    return 2.0 * pi ** ((n + 1) / 2.0) / gamma((n + 1) / 2.0)


class AxisymGrid:
    """Uniform theta grid on [0, pi] for axisymmetric fields on S^n."""

    kind = "axisym"

    def __init__(self, n: int, m: int):
        if n < 2:
            raise DomainError(f"need n >= 2, got n={n}")
        if m < 5 or m % 2 == 0:
            raise DomainError(f"need odd m >= 5, got m={m}")
        self.n = n
        self.m = m
        self.h = pi / (m - 1)
        self.theta = np.linspace(0.0, pi, m)
        # trapezoid quadrature against sin^(n-1)(theta) d(theta), scaled by
        # the area of the latitude sphere S^(n-1)
        tw = np.full(m, self.h)
        tw[0] = tw[-1] = 0.5 * self.h
        self.weights = sphere_area(n - 1) * np.sin(self.theta) ** (n - 1) * tw
        if n == 2:
            # Euler-Maclaurin endpoint correction: the integrand f sin(theta)
            # has derivative +-f at the poles, so the trapezoid rule is only
            # O(h^2) there; adding (h^2/12) f at each pole restores O(h^4).
            # For n >= 3 the endpoint derivatives vanish and no correction
            # is needed.
            self.weights[0] += sphere_area(1) * self.h ** 2 / 12.0
            self.weights[-1] += sphere_area(1) * self.h ** 2 / 12.0

    @property
    def shape(self):
        return (self.m,)

    @property
    def min_spacing(self) -> float:
        return self.h

    @property
    def inv_spacing_sq(self) -> np.ndarray:
        """Per-node sum over directions of 1/(effective spacing)^2.

        At the poles every angular direction degenerates to a second
        derivative in theta (the regular limit of the cot-theta terms), so
        the explicit-step stability stencil there is n times stiffer than
        in the interior.
        """
        s = np.full(self.m, 1.0 / (self.h * self.h))
        s[0] *= self.n
        s[-1] *= self.n
        return s

    @property
    def dims_label(self) -> str:
        return str(self.m)

    def __eq__(self, other):
        return (isinstance(other, AxisymGrid)
                and other.n == self.n and other.m == self.m)


class LatLongGrid:
    """Pole-offset latitude-longitude grid on S^2 (hypersurface dim n = 2)."""

    kind = "latlong"
    n = 2

    def __init__(self, ntheta: int, nphi: int):
        if ntheta < 8:
            raise DomainError(f"need ntheta >= 8, got {ntheta}")
        if nphi < 16 or nphi % 2 != 0:
            raise DomainError(f"need even nphi >= 16, got {nphi}")
        self.ntheta = ntheta
        self.nphi = nphi
        self.dtheta = pi / ntheta
        self.dphi = 2.0 * pi / nphi
        self.theta = (np.arange(ntheta) + 0.5) * self.dtheta
        self.phi = np.arange(nphi) * self.dphi
        self.weights = (np.sin(self.theta)[:, None]
                        * np.ones(nphi)[None, :] * self.dtheta * self.dphi)
        # Euler-Maclaurin endpoint correction for the midpoint rule in theta:
        # I - M = (dtheta^2/24)(f'(pi) - f'(0)) with f = F sin(theta), i.e.
        # -(dtheta^2/24)(F(0) + F(pi)).  The pole values are obtained by
        # quadratic even extrapolation from the two nearest rows,
        # F(pole) ~ (9 F_0 - F_1)/8, which keeps the rule O(dtheta^4) and
        # folds into the static weights of rows 0, 1, -2, -1.
        c = self.dtheta ** 2 / 24.0 * self.dphi
        self.weights[0, :] -= c * 9.0 / 8.0
        self.weights[1, :] += c / 8.0
        self.weights[-1, :] -= c * 9.0 / 8.0
        self.weights[-2, :] += c / 8.0

    @property
    def shape(self):
        return (self.ntheta, self.nphi)

    @property
    def min_spacing(self) -> float:
        return min(self.dtheta, self.dphi)

    @property
    def inv_spacing_sq(self) -> np.ndarray:
        """Per-node 1/dtheta^2 + 1/(sin(theta) dphi)^2 (azimuthal spacing
        shrinks toward the pole rows, which dominates the stability bound)."""
        s = (1.0 / self.dtheta ** 2
             + 1.0 / (np.sin(self.theta) * self.dphi) ** 2)
        return np.broadcast_to(s[:, None], self.shape).copy()

    @property
    def dims_label(self) -> str:
        return f"{self.ntheta},{self.nphi}"

    def __eq__(self, other):
        return (isinstance(other, LatLongGrid)
                and other.ntheta == self.ntheta and other.nphi == self.nphi)


@dataclass
class SphereJet:
    """Value, gradient and covariant Hessian of a scalar field, per node.

    Components are in the sigma-orthonormal frame; direction 1 is theta,
    direction 2 stands for each of the (n-1) azimuthal frame directions
    (axisymmetric fields have g2 = h12 = 0 and n-1 identical h22 entries).
    """

    value: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    h11: np.ndarray
    h12: np.ndarray
    h22: np.ndarray


def _axisym_jet(field: np.ndarray, grid: AxisymGrid) -> SphereJet:
    f = field
    h = grid.h
    # reflection ghosts f(-h) = f(h), f(pi + h) = f(pi - h)
    fm = np.concatenate(([f[1]], f[:-1]))
    fp = np.concatenate((f[1:], [f[-2]]))
    d1 = (fp - fm) / (2.0 * h)
    d2 = (fp - 2.0 * f + fm) / (h * h)
    with np.errstate(divide="ignore", invalid="ignore"):
        ang = d1 / np.tan(grid.theta)
    # pole limit of cot(theta) f' is f''
    ang[0] = d2[0]
    ang[-1] = d2[-1]
    zero = np.zeros_like(f)
    return SphereJet(value=f.copy(), g1=d1, g2=zero,
                     h11=d2, h12=zero.copy(), h22=ang)


def _latlong_pad(field: np.ndarray, grid: LatLongGrid) -> np.ndarray:
    """Pad with two ghost rings in theta (antipodal cross-pole) and wrap phi.

    The point (-theta, phi) coincides with (theta, phi + pi) on the sphere,
    so the ghost rows are exact antipodal copies of the first interior rows.
    """
    half = grid.nphi // 2
    top = np.roll(field[1::-1], half, axis=1)
    bot = np.roll(field[:-3:-1], half, axis=1)
    ext = np.concatenate((top, field, bot), axis=0)
    return np.concatenate((ext[:, -2:], ext, ext[:, :2]), axis=1)


def _d1_4(p, axis, h):
    """Fourth-order first derivative on a 2-ghost padded array."""
    s = [slice(2, -2)] * p.ndim
    def at(off):
        t = list(s)
        t[axis] = slice(2 + off, p.shape[axis] - 2 + off or None)
        return p[tuple(t)]
    return (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h)


def _d2_4(p, axis, h):
    """Fourth-order second derivative on a 2-ghost padded array."""
    s = [slice(2, -2)] * p.ndim
    def at(off):
        t = list(s)
        t[axis] = slice(2 + off, p.shape[axis] - 2 + off or None)
        return p[tuple(t)]
    return (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1)
            - at(-2)) / (12.0 * h * h)


def _latlong_jet(field: np.ndarray, grid: LatLongGrid) -> SphereJet:
    p = _latlong_pad(field, grid)
    dt, dp = grid.dtheta, grid.dphi
    f_t = _d1_4(p, 0, dt)
    f_tt = _d2_4(p, 0, dt)
    f_p = _d1_4(p, 1, dp)
    f_pp = _d2_4(p, 1, dp)
    # mixed derivative: theta-difference of the phi-derivative (both 4th order)
    half = grid.nphi // 2
    fp_top = np.roll(f_p[1::-1], half, axis=1)
    fp_bot = np.roll(f_p[:-3:-1], half, axis=1)
    fp_ext = np.concatenate((fp_top, f_p, fp_bot), axis=0)
    fp_pad = np.concatenate((fp_ext[:, -2:], fp_ext, fp_ext[:, :2]), axis=1)
    f_tp = _d1_4(fp_pad, 0, dt)
    st = np.sin(grid.theta)[:, None]
    ct = np.cos(grid.theta)[:, None]
    # covariant Hessian of sigma = d(theta)^2 + sin^2(theta) d(phi)^2,
    # pushed to the orthonormal frame
    h11 = f_tt
    h12 = (f_tp - (ct / st) * f_p) / st
    h22 = (f_pp + st * ct * f_t) / (st * st)
    return SphereJet(value=field.copy(), g1=f_t, g2=f_p / st,
                     h11=h11, h12=h12, h22=h22)


def sphere_jet(field, grid) -> SphereJet:
    """Gradient and covariant Hessian of a node field, orthonormal frame."""
    field = np.asarray(field, dtype=float)
    if field.shape != grid.shape:
        raise DomainError(f"field shape {field.shape} != grid shape {grid.shape}")
    if not np.all(np.isfinite(field)):
        raise DomainError("field contains NaN/inf")
    if grid.kind == "axisym":
        return _axisym_jet(field, grid)
    return _latlong_jet(field, grid)


def integrate(field, grid) -> float:
    """Quadrature of a node field against the round measure d(sigma) on S^n."""
    field = np.asarray(field, dtype=float)
    if field.shape != grid.shape:
        raise DomainError(f"field shape {field.shape} != grid shape {grid.shape}")
    return float(np.sum(field * grid.weights))


# --- snapshot file format -------------------------------------------------

SNAPSHOT_MAGIC = "DSFLOW v1"


class SnapshotError(ValueError):
    """Malformed snapshot file; carries the offending line number."""

    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"snapshot line {lineno}: {message}")


def write_snapshot(path, grid, rho) -> None:
    """Write a radial field to the DSFLOW v1 text format (17 sig. digits)."""
    rho = np.asarray(rho, dtype=float).reshape(-1)
    with open(path, "w") as fh:
        fh.write(SNAPSHOT_MAGIC + "\n")
        fh.write(f"n={grid.n} grid={grid.kind} dims={grid.dims_label}\n")
        for start in range(0, rho.size, 5):
            fh.write(" ".join("%.17g" % v for v in rho[start:start + 5]) + "\n")


def read_snapshot(path):
    """Read a DSFLOW v1 snapshot; returns (grid, rho)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != SNAPSHOT_MAGIC:
        raise SnapshotError(1, f"expected header {SNAPSHOT_MAGIC!r}")
    if len(lines) < 2:
        raise SnapshotError(2, "missing grid descriptor")
    fields = {}
    for tok in lines[1].split():
        if "=" not in tok:
            raise SnapshotError(2, f"bad token {tok!r}")
        key, val = tok.split("=", 1)
        fields[key] = val
    try:
        n = int(fields["n"])
        kind = fields["grid"]
        dims = fields["dims"]
    except KeyError as exc:
        raise SnapshotError(2, f"missing key {exc.args[0]}") from None
    except ValueError:
        raise SnapshotError(2, "non-integer n") from None
    if kind == "axisym":
        try:
            grid = AxisymGrid(n, int(dims))
        except (ValueError, DomainError) as exc:
            raise SnapshotError(2, str(exc)) from None
    elif kind == "latlong":
        try:
            ntheta, nphi = (int(x) for x in dims.split(","))
            grid = LatLongGrid(ntheta, nphi)
        except (ValueError, DomainError) as exc:
            raise SnapshotError(2, str(exc)) from None
        if n != 2:
            raise SnapshotError(2, f"latlong requires n=2, got n={n}")
    else:
        raise SnapshotError(2, f"unknown grid kind {kind!r}")
    values = []
    for lineno, line in enumerate(lines[2:], start=3):
        for tok in line.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise SnapshotError(lineno, f"bad value {tok!r}") from None
    expected = int(np.prod(grid.shape))
    if len(values) != expected:
        raise SnapshotError(len(lines), f"expected {expected} values, got {len(values)}")
    return grid, np.array(values).reshape(grid.shape)
