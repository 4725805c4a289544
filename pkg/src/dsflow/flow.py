"""Explicit time integration of the locally constrained curvature flow.

The hypersurface evolves with normal speed S = u - b_{n,k} phi' sigma_k^(-1/k);
as a radial graph this is the scalar parabolic equation

    rho_t = S * w / cosh(rho).

(The graph factor w/cosh(rho) is forced by the first-variation identities
d/dt Vol = int S d(mu) and d/dt A_l = (l+1) int S sigma_{l+1} d(mu), which the
suite checks against finite differences of the monitored series.)

Steps are explicit (Euler or classical RK4) with a diffusion-CFL time step
and rejection + halving whenever a trial state leaves the spacelike or
strictly k-convex regime.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import symfunc
from .errors import DomainError, FlowAbort, SpacelikeError
from .geometry import RadialGraph, surface_geometry, validate_hypersurface
from .grids import integrate, sphere_area
from .quermass import quermass_all

#: tolerance slack allowed on the discrete maximum-principle monitors
def monitor_slack(dt: float, h: float) -> float:
    return 1e-8 + 10.0 * dt * h * h


@dataclass
class FlowConfig:
    n: int
    k: int
    cfl: float = 0.4
    t_max: float = 50.0
    conv_tol: float = 1e-6
    monitor_every: int = 50
    scheme: str = "euler"

    def __post_init__(self):
        if not 2 <= self.k <= self.n:
            raise DomainError(f"need 2 <= k <= n, got k={self.k}, n={self.n}")
        if not 0.0 < self.cfl <= 1.0:
            raise DomainError(f"cfl must be in (0, 1], got {self.cfl}")
        if self.conv_tol <= 0.0:
            raise DomainError("conv_tol must be positive")
        if self.scheme not in ("euler", "rk4"):
            raise DomainError(f"unknown scheme {self.scheme!r}")


@dataclass
class FlowState:
    t: float
    M: RadialGraph
    last_dt: float = 0.0
    steps: int = 0


@dataclass
class MonitorRecord:
    t: float
    dt: float
    min_rho: float
    max_rho: float
    max_u: float
    min_F: float
    max_F: float
    max_kappa: float
    A: np.ndarray              # A_{-1} .. A_n
    hm_residual_1: float
    gap: float


@dataclass
class RunResult:
    termination: str           # converged | t_max | aborted
    reason: str
    r_infinity: float
    t_final: float
    steps: int
    wall_time: float
    records: list
    state: FlowState


class _Eval:
    """Per-state geometry + speed package shared by the step machinery."""

    __slots__ = ("geo", "F", "S", "rho_t", "fmax", "min_eig_g", "e")

    def __init__(self, M: RadialGraph, k: int):
        n = M.n
        try:
            geo = surface_geometry(M)
        except SpacelikeError as exc:
            raise FlowAbort("spacelike violation", node=exc.node,
                            quantity=f"w^2={exc.w2:.3e}") from exc
        e = symfunc.sigma_batch(geo.kappa, k)
        bad = e[..., 1:] <= 0.0
        if np.any(bad):
            node = np.unravel_index(int(np.argmax(np.any(bad, axis=-1))),
                                    M.grid.shape)
            j = int(np.argmax(bad[node])) + 1
            raise FlowAbort("cone violation", node=node,
                            quantity=f"sigma_{j}={e[node + (j,)]:.3e}")
        sk = e[..., k]
        F = sk ** (1.0 / k)
        b = symfunc.b_nk(n, k)
        S = geo.u - b * geo.phi_prime / F
        self.geo = geo
        self.e = e
        self.F = F
        self.S = S
        self.rho_t = S * geo.w / geo.cosh_rho
        # diffusion coefficient data for the CFL bound
        mins = symfunc.minors_batch(geo.kappa, k - 1)
        fi = (1.0 / k) * sk[..., None] ** (1.0 / k - 1.0) * mins[..., :, k - 1]
        self.fmax = np.max(fi, axis=-1)
        if M.grid.kind == "axisym":
            self.min_eig_g = np.minimum(geo.g11, geo.g22)
        else:
            tr = geo.g11 + geo.g22
            disc = np.sqrt((geo.g11 - geo.g22) ** 2 + 4.0 * geo.g12 ** 2)
            self.min_eig_g = 0.5 * (tr - disc)

    def diagnostics(self) -> dict:
        return {
            "min_S": float(np.min(self.S)), "max_S": float(np.max(self.S)),
            "min_F": float(np.min(self.F)), "max_F": float(np.max(self.F)),
            "max_kappa": float(np.max(np.abs(self.geo.kappa))),
        }


def speed_field(state: FlowState, k: int):
    """Per-node rho_t plus min/max diagnostics of S, F, kappa."""
    ev = _Eval(state.M, k)
    return ev.rho_t, ev.diagnostics()


def choose_dt(state: FlowState, cfl: float, k: int, _ev: _Eval = None) -> float:
    """Diffusion-CFL time step capped by per-step displacement 0.5/max|rho_t|."""
    ev = _ev if _ev is not None else _Eval(state.M, k)
    n = state.M.n
    b = symfunc.b_nk(n, k)
    D = b * np.abs(ev.geo.phi_prime) / ev.F ** 2 * ev.fmax / ev.min_eig_g
    stiff = float(np.max(D * state.M.grid.inv_spacing_sq))
    if not np.isfinite(stiff):
        raise FlowAbort("non-finite diffusion coefficient in choose_dt")
    h = state.M.grid.min_spacing
    dt = cfl / stiff if stiff > 0.0 else cfl * h * h
    vmax = float(np.max(np.abs(ev.rho_t)))
    if vmax > 0.0:
        dt = min(dt, 0.5 / vmax)
    return dt


def _advance(M: RadialGraph, k: int, dt: float, scheme: str,
             ev: _Eval) -> RadialGraph:
    grid = M.grid
    if scheme == "euler":
        return RadialGraph(grid, M.rho + dt * ev.rho_t)
    k1 = ev.rho_t
    k2 = _Eval(RadialGraph(grid, M.rho + 0.5 * dt * k1), k).rho_t
    k3 = _Eval(RadialGraph(grid, M.rho + 0.5 * dt * k2), k).rho_t
    k4 = _Eval(RadialGraph(grid, M.rho + dt * k3), k).rho_t
    return RadialGraph(grid, M.rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def step(state: FlowState, dt: float, scheme: str = "euler", k: int = 2,
         _ev: _Eval = None):
    """One accepted step; rejected trials halve dt up to 20 times.

    Returns (new_state, new_eval); the eval of the accepted state is handed
    back so the driver never computes geometry twice.
    """
    ev = _ev if _ev is not None else _Eval(state.M, k)
    last_err = None
    for _ in range(21):
        try:
            trial = _advance(state.M, k, dt, scheme, ev)
            trial_ev = _Eval(trial, k)  # validates spacelike + cone
        except FlowAbort as exc:
            last_err = exc
            dt *= 0.5
            continue
        return (FlowState(t=state.t + dt, M=trial, last_dt=dt,
                          steps=state.steps + 1), trial_ev)
    raise FlowAbort(f"step rejected 20 times ({last_err.reason})",
                    node=last_err.node, quantity=last_err.quantity)


def predicted_dA(state: FlowState, l: int, k: int = 2) -> float:
    """Instantaneous d/dt A_l = (l+1) int S sigma_{l+1} d(mu) (l = -1: int S).

    k selects the flow speed whose S enters the integrand.
    """
    M = state.M
    n = M.n
    if not -1 <= l <= n - 1:
        raise DomainError(f"l={l} out of range -1..{n - 1}")
    ev = _Eval(M, k)
    geo = ev.geo
    if l == -1:
        return integrate(ev.S * geo.area_weight, M.grid)
    e = symfunc.sigma_batch(geo.kappa, l + 1)
    return (l + 1) * integrate(ev.S * e[..., l + 1] * geo.area_weight, M.grid)


def _monitor(state: FlowState, ev: _Eval, k: int) -> MonitorRecord:
    rho = state.M.rho
    q = quermass_all(state.M, k=min(k, state.M.n))
    d = ev.diagnostics()
    return MonitorRecord(
        t=state.t, dt=state.last_dt,
        min_rho=float(np.min(rho)), max_rho=float(np.max(rho)),
        max_u=float(np.max(ev.geo.u)),
        min_F=d["min_F"], max_F=d["max_F"], max_kappa=d["max_kappa"],
        A=q.A, hm_residual_1=float(q.hm_residual[1]) if state.M.n >= 2 else 0.0,
        gap=q.gap)


def run(config: FlowConfig, M0: RadialGraph, on_monitor=None) -> RunResult:
    """Integrate until convergence, t_max, or abort; collect monitor series.

    on_monitor, when given, is called as on_monitor(state, record) after
    each emitted MonitorRecord (snapshot hooks and the like).
    """
    if M0.n != config.n:
        raise DomainError(f"grid dimension {M0.n} != config n {config.n}")
    report = validate_hypersurface(M0, config.k)
    if not report.passed:
        raise DomainError(
            "initial hypersurface invalid: "
            f"min w^2 = {report.min_w2:.3e}, min sigma = {report.min_sigma}")
    t0 = time.perf_counter()
    state = FlowState(t=0.0, M=M0)
    records = []
    termination, reason = "t_max", f"reached t_max = {config.t_max}"
    ev = None
    try:
        ev = _Eval(state.M, config.k)
        records.append(_monitor(state, ev, config.k))
        if on_monitor is not None:
            on_monitor(state, records[-1])
        while state.t < config.t_max:
            osc = float(np.max(state.M.rho) - np.min(state.M.rho))
            max_s = float(np.max(np.abs(ev.S)))
            if osc < config.conv_tol and max_s < config.conv_tol:
                termination = "converged"
                reason = f"osc={osc:.2e}, max|S|={max_s:.2e}"
                break
            dt = choose_dt(state, config.cfl, config.k, _ev=ev)
            dt = min(dt, config.t_max - state.t)
            state, ev = step(state, dt, config.scheme, config.k, _ev=ev)
            if state.steps % config.monitor_every == 0:
                records.append(_monitor(state, ev, config.k))
                if on_monitor is not None:
                    on_monitor(state, records[-1])
    except FlowAbort as exc:
        termination, reason = "aborted", str(exc)
    if ev is not None and (not records or records[-1].t != state.t):
        records.append(_monitor(state, ev, config.k))
        if on_monitor is not None:
            on_monitor(state, records[-1])
    mean_rho = integrate(state.M.rho, state.M.grid) / sphere_area(state.M.n)
    return RunResult(
        termination=termination, reason=reason,
        r_infinity=float(mean_rho) if termination == "converged" else float("nan"),
        t_final=state.t, steps=state.steps,
        wall_time=time.perf_counter() - t0,
        records=records, state=state)
