"""Time integration of the Yang-Mills heat flow and its monitor bounds.

The dynamical equation is A'(t) = -d_A* B with B = dA + (1/2)[A^A];
the ZDS variant adds the gauge-fixing term -d_A d*A, which makes the
abelian linearization fully parabolic.  Integration is classical RK4
with a parabolic step ceiling dt <= h^2/8, an energy-increase rejection
rule standing in for the gradient-flow property, and monitor series
(norms of B and A', the accumulated action, the exponent psi_inf and
the smoothing functional beta) recorded at every accepted step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import (
    bochner_laplacian,
    contraction_bracket,
    curvature,
    d_cov,
    dstar_cov,
    weitzenbock_defect,
)
from .grid import BoundarySpec, KForm, apply_boundary

__all__ = [
    "FlowConfig",
    "MonitorSeries",
    "FlowTrajectory",
    "FlowConstants",
    "FlowInstabilityError",
    "FlowAbortError",
    "ym_rhs",
    "zds_rhs",
    "integrate",
    "verify_identities",
    "verify_bounds",
]

ENERGY_SLACK = 1e-12  # relative increase of ||B||_2 tolerated per step
DT_FLOOR = 1e-12


class FlowInstabilityError(RuntimeError):
    """Raised when step halving drives dt below the underflow floor."""


class FlowAbortError(RuntimeError):
    """Raised on NaN detection; carries the offending step index."""

    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite field values at step {step}, t = {t:.6g}")
        self.step = step
        self.t = t


@dataclass
class FlowConfig:
    """Integration parameters for one flow run."""

    bc: BoundarySpec
    dt: float
    t_end: float
    scheme: str = "RK4"
    variant: str = "YM"
    snapshot_times: tuple = ()

    def validate(self, grid):
        if self.scheme != "RK4":
            raise ValueError(f"unsupported scheme {self.scheme!r}")
        if self.variant not in ("YM", "ZDS"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "ZDS" and self.bc.kind == "marini":
            raise ValueError("ZDS variant is offered for Neumann/Dirichlet only")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        hmin = min(grid.spacing)
        if self.dt > hmin * hmin / 8 * (1 + 1e-12):
            raise ValueError(
                f"dt = {self.dt:g} exceeds the stability ceiling h^2/8 = "
                f"{hmin * hmin / 8:g}"
            )
        if any(t < 0 or t > self.t_end + 1e-12 for t in self.snapshot_times):
            raise ValueError("snapshot times must lie in [0, t_end]")


class MonitorSeries:
    """Per-step scalar diagnostics of a flow run.

    Arrays (after ``finalize``): t, B_l2, B_linf, Ap_l2, Ap_linf, Bp_l2,
    action (running trapezoid of ||A'||_2^2), psi_inf (running trapezoid
    of 2c||B(s)||_inf), beta (running max of s^{3/4}||B(s)||_inf).
    """

    FIELDS = ("t", "B_l2", "B_linf", "Ap_l2", "Ap_linf", "Bp_l2",
              "action", "psi_inf", "beta")

    def __init__(self, commutator_constant: float):
        self.c = commutator_constant
        for name in self.FIELDS:
            setattr(self, name, [])

    def record(self, t, B_l2, B_linf, Ap_l2, Ap_linf, Bp_l2):
        if self.t:
            dt = t - self.t[-1]
            action = self.action[-1] + 0.5 * dt * (Ap_l2 ** 2 + self.Ap_l2[-1] ** 2)
            psi = self.psi_inf[-1] + 0.5 * dt * 2 * self.c * (B_linf + self.B_linf[-1])
            beta = max(self.beta[-1], t ** 0.75 * B_linf)
        else:
            action = 0.0
            psi = 0.0
            beta = t ** 0.75 * B_linf
        vals = (t, B_l2, B_linf, Ap_l2, Ap_linf, Bp_l2, action, psi, beta)
        for name, v in zip(self.FIELDS, vals):
            getattr(self, name).append(float(v))
        if not all(math.isfinite(v) for v in vals):
            raise FlowAbortError(len(self.t) - 1, t)

    def finalize(self):
        for name in self.FIELDS:
            setattr(self, name, np.asarray(getattr(self, name)))
        return self

    def __len__(self):
        return len(self.t)


@dataclass
class FlowTrajectory:
    """Snapshots of A along the flow plus the monitor series."""

    times: list
    fields: list  # KForm deg 1, ghosts filled per config.bc
    monitors: MonitorSeries
    config: FlowConfig

    def __post_init__(self):
        if any(t2 <= t1 for t1, t2 in zip(self.times, self.times[1:])):
            raise ValueError("snapshot times must be strictly increasing")


@dataclass
class FlowConstants:
    """The constants governing the t^{-3/4} smoothing bounds."""

    c_N: float
    a4: float
    tau: float = 0.5

    def __post_init__(self):
        if not 0 < self.tau <= 0.5:
            raise ValueError("tau must lie in (0, 1/2]")
        self.a = 1.0 / (2.0 * self.c_N * self.a4)
        self.gamma = (
            self.c_N
            + 4.0 * self.c_N ** 2 * self.a * math.exp(8.0 * self.c_N * self.a) * self.a4
        )


def ym_rhs(A: KForm, bc: BoundarySpec) -> KForm:
    """Negative magnetic-energy gradient -d_A* B at the field A."""
    Af = apply_boundary(A, bc)
    B = apply_boundary(curvature(Af), bc)
    return -1.0 * dstar_cov(Af, B)


def zds_rhs(C: KForm, bc: BoundarySpec) -> KForm:
    """Gauge-fixed flow direction -(d_C* B_C + d_C d*C)."""
    Cf = apply_boundary(C, bc)
    B = apply_boundary(curvature(Cf), bc)
    zero_conn = KForm(1, C.grid, C.algebra, bc=bc)
    div = apply_boundary(dstar_cov(zero_conn, Cf), bc)
    return -1.0 * (dstar_cov(Cf, B) + d_cov(Cf, div))


def _rhs_for(variant):
    return ym_rhs if variant == "YM" else zds_rhs


def integrate(A0: KForm, cfg: FlowConfig) -> FlowTrajectory:
    """Run the flow from A0 to cfg.t_end, storing snapshots and monitors.

    RK4 stages are boundary-filled before each derivative evaluation; a
    step that increases ||B||_2 by more than 1e-12 relative (YM variant)
    is rejected and retried at half the step size.
    """
    cfg.validate(A0.grid)
    rhs = _rhs_for(cfg.variant)
    bc = cfg.bc

    A = apply_boundary(A0, bc)
    snap_queue = sorted(set(float(s) for s in cfg.snapshot_times))
    times, fields = [], []
    monitors = MonitorSeries(A.algebra.c)

    t = 0.0
    dt = float(cfg.dt)
    step = 0
    k1 = rhs(A, bc)
    B_l2 = apply_boundary(curvature(A), bc).norm("L2")
    _record(monitors, t, A, k1, bc, B_l2)
    if snap_queue and abs(snap_queue[0] - t) < 1e-14:
        times.append(t)
        fields.append(A.copy())
        snap_queue.pop(0)

    while t < cfg.t_end - 1e-14:
        target = cfg.t_end
        if snap_queue:
            target = min(target, snap_queue[0])
        dt_step = min(dt, target - t)
        while True:
            A_new = _rk4_step(A, dt_step, rhs, bc, step, t, k1)
            B_new_l2 = apply_boundary(curvature(A_new), bc).norm("L2")
            if cfg.variant == "YM" and B_new_l2 > B_l2 * (1.0 + ENERGY_SLACK):
                dt = dt / 2.0
                if dt < DT_FLOOR:
                    raise FlowInstabilityError(
                        f"dt underflow at t = {t:.6g} (step {step})"
                    )
                dt_step = min(dt, target - t)
                continue
            break
        A = A_new
        t += dt_step
        step += 1
        B_l2 = B_new_l2
        k1 = rhs(A, bc)
        _record(monitors, t, A, k1, bc, B_l2)
        if snap_queue and t >= snap_queue[0] - 1e-14:
            times.append(t)
            fields.append(A.copy())
            snap_queue.pop(0)

    return FlowTrajectory(times, fields, monitors.finalize(), cfg)


def _rk4_step(A, dt, rhs, bc, step, t, k1=None):
    if k1 is None:
        k1 = rhs(A, bc)
    k2 = rhs(A + (0.5 * dt) * k1, bc)
    k3 = rhs(A + (0.5 * dt) * k2, bc)
    k4 = rhs(A + dt * k3, bc)
    A_new = apply_boundary(
        A + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), bc
    )
    if not np.all(np.isfinite(A_new.values)):
        raise FlowAbortError(step, t)
    return A_new


def _record(monitors, t, A, Ap, bc, B_l2):
    Af = apply_boundary(A, bc)
    B = apply_boundary(curvature(Af), bc)
    Apf = apply_boundary(Ap, bc)
    Bp = d_cov(Af, Apf)  # dB/dt = d_A A'
    monitors.record(
        t,
        B_l2,
        B.norm("Linf"),
        Apf.norm("L2"),
        Apf.norm("Linf"),
        Bp.norm("L2"),
    )


# ---------------------------------------------------------------------------
# Verification of the differential identities and the smoothing bounds
# ---------------------------------------------------------------------------


def verify_identities(traj: FlowTrajectory) -> dict:
    """Residuals of the evolution identities for B and A' along a trajectory.

    Central-difference time derivatives from >= 3 uniformly spaced
    snapshots are compared against the Bochner form of the right sides:
    dB/dt = sum_j (grad_j^A)^2 B + (curvature defect of B), and
    dA'/dt = sum_j (grad_j^A)^2 A' + defect(A') + [A' . B].
    Returns the max pointwise residual for each identity.
    """
    ts = traj.times
    if len(ts) < 3:
        raise ValueError("need at least 3 snapshots")
    gaps = np.diff(ts)
    if np.max(np.abs(gaps - gaps[0])) > 1e-10 * gaps[0]:
        raise ValueError("snapshots are not uniformly spaced")
    dt = gaps[0]
    bc = traj.config.bc
    rhs = _rhs_for(traj.config.variant)

    res_B = 0.0
    res_Ap = 0.0
    for i in range(1, len(ts) - 1):
        A = apply_boundary(traj.fields[i], bc)
        Bs = [apply_boundary(curvature(apply_boundary(traj.fields[j], bc)), bc)
              for j in (i - 1, i, i + 1)]
        Bdot = (1.0 / (2 * dt)) * (Bs[2] - Bs[0])
        rhs_B = bochner_laplacian(A, Bs[1]) + weitzenbock_defect(A, Bs[1])
        res_B = max(res_B, (Bdot - rhs_B).max_interior_norm(1))

        Aps = [apply_boundary(rhs(traj.fields[j], bc), bc)
               for j in (i - 1, i, i + 1)]
        Apdot = (1.0 / (2 * dt)) * (Aps[2] - Aps[0])
        rhs_Ap = (
            bochner_laplacian(A, Aps[1])
            + weitzenbock_defect(A, Aps[1])
            + contraction_bracket(Aps[1], Bs[1])
        )
        res_Ap = max(res_Ap, (Apdot - rhs_Ap).max_interior_norm(1))

    return {"B_identity_residual": res_B, "Ap_identity_residual": res_Ap}


def verify_bounds(traj: FlowTrajectory, k: FlowConstants) -> dict:
    """Check the smoothing/energy inequalities along the monitor series.

    The small-data gate (2 tau)^{1/4} c ||B_0||_2 <= a is evaluated first;
    when it fails, the t^{-3/4} bounds are reported as not applicable.
    Each row carries (lhs, rhs, margin = rhs - lhs at the worst time).
    """
    m = traj.monitors
    if len(m) == 0:
        raise ValueError("missing monitors")
    c = m.c
    t = m.t
    B0_l2 = m.B_l2[0]
    Ap0_l2 = m.Ap_l2[0]
    tau = k.tau
    rows = {}

    def row(name, lhs, rhs, applicable=True):
        rows[name] = {
            "lhs": float(lhs),
            "rhs": float(rhs),
            "margin": float(rhs - lhs),
            "applicable": bool(applicable),
            "passed": bool(not applicable or rhs - lhs >= 0.0),
        }

    gate_lhs = (2 * tau) ** 0.25 * c * B0_l2
    gate_ok = gate_lhs <= k.a
    row("small_data_gate", gate_lhs, k.a)
    rows["small_data_gate"]["passed"] = bool(gate_ok)

    def worst(mask, lhs_arr, rhs_arr):
        """(lhs, rhs) at the index of worst margin within mask."""
        idx = np.nonzero(mask)[0]
        if idx.size == 0:
            return 0.0, 0.0
        margins = rhs_arr[idx] - lhs_arr[idx]
        j = idx[np.argmin(margins)]
        return lhs_arr[j], rhs_arr[j]

    R = 2 * k.c_N * B0_l2
    pos = t > 0
    with np.errstate(divide="ignore"):
        lhs1 = np.where(pos, t, 1.0) ** 0.75 * m.B_linf
    row("B_linf_early", *worst(pos & (t <= 2 * tau), lhs1, np.full_like(t, R)),
        applicable=gate_ok)
    row("B_linf_late", *worst(t >= tau, m.B_linf,
                              np.full_like(t, R * tau ** -0.75)),
        applicable=gate_ok)
    lhs3 = np.where(pos, t, 1.0) ** 0.75 * m.Ap_linf
    row("Ap_linf_early",
        *worst(pos & (t <= 2 * tau), lhs3, np.full_like(t, k.gamma * Ap0_l2)),
        applicable=gate_ok)
    row("Ap_linf_late",
        *worst(t >= 2 * tau, tau ** 1.25 * m.Ap_linf,
               np.full_like(t, k.gamma * B0_l2)),
        applicable=gate_ok)

    # energy-dissipation inequality with the psi_inf weight
    decay = np.exp(-m.psi_inf) * m.Bp_l2 ** 2
    prefix = np.concatenate(
        [[0.0], np.cumsum(0.5 * np.diff(t) * (decay[1:] + decay[:-1]))]
    )
    lhs_e = m.Ap_l2 ** 2 + 2.0 * np.exp(m.psi_inf) * prefix
    rhs_e = np.exp(m.psi_inf) * Ap0_l2 ** 2
    row("energy_dissipation", *worst(np.ones_like(t, bool), lhs_e, rhs_e))

    # its exponential corollary, valid under the early B bound
    lhs_g = m.Ap_l2
    rhs_g = np.exp(8 * k.c_N * c * B0_l2 * t ** 0.25) * Ap0_l2
    row("Ap_l2_growth", *worst((t <= 2 * tau) & (t <= 1.0), lhs_g, rhs_g),
        applicable=gate_ok)

    row("action_bound", m.action[-1], B0_l2 ** 2 * (1 + 1e-3))
    return rows
