"""Parallel transport, Wilson loops, and long-time convergence probes.

Transport solves g^{-1} g' = A<gamma'(s)> with g(0) = I along piecewise-C1
paths, interpolating A trilinearly off the grid and re-projecting g to the
group after every step (polar decomposition).  Wilson traces, the
loop-to-path extension by radial homotopies, the perturbation-derivative
bound, and the flow-time convergence probe build on it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .calculus import curvature
from .grid import GridSpec, KForm, apply_boundary

__all__ = [
    "Segment",
    "Path",
    "Loop",
    "PathPerturbation",
    "Homotopy",
    "line_segment",
    "arc_segment",
    "segment_from_json",
    "line_integral",
    "transport",
    "wilson_trace",
    "loops_to_paths",
    "deriv_bound_check",
    "convergence_probe",
]

ENDPOINT_TOL = 1e-12
UNITARITY_TOL = 1e-10


class Segment:
    """One C1 piece of a path: position and velocity on [0, 1]."""

    def __init__(self, position, velocity):
        self.position = position
        self.velocity = velocity

    def reversed(self):
        return Segment(
            lambda s: self.position(1.0 - np.asarray(s)),
            lambda s: -self.velocity(1.0 - np.asarray(s)),
        )


def line_segment(p0, p1) -> Segment:
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)

    def pos(s):
        s = np.asarray(s, dtype=float)[..., None]
        return p0 + s * (p1 - p0)

    def vel(s):
        s = np.asarray(s, dtype=float)
        return np.broadcast_to(p1 - p0, s.shape + (3,)).copy()

    return Segment(pos, vel)


def arc_segment(center, radius, phi0, phi1, z=None) -> Segment:
    """Circular arc in a z = const plane from angle phi0 to phi1."""
    center = np.asarray(center, dtype=float)
    if z is None:
        z = center[2]

    def pos(s):
        s = np.asarray(s, dtype=float)
        phi = phi0 + s * (phi1 - phi0)
        return np.stack(
            [
                center[0] + radius * np.cos(phi),
                center[1] + radius * np.sin(phi),
                np.full_like(phi, z),
            ],
            axis=-1,
        )

    def vel(s):
        s = np.asarray(s, dtype=float)
        phi = phi0 + s * (phi1 - phi0)
        dphi = phi1 - phi0
        return np.stack(
            [
                -radius * np.sin(phi) * dphi,
                radius * np.cos(phi) * dphi,
                np.zeros_like(phi),
            ],
            axis=-1,
        )

    return Segment(pos, vel)


def segment_from_json(spec: dict) -> Segment:
    """Build a segment from {"kind": "line"|"arc", ...} geometry JSON."""
    kind = spec.get("kind")
    if kind == "line":
        return line_segment(spec["start"], spec["end"])
    if kind == "arc":
        return arc_segment(
            spec.get("center", (0.0, 0.0, 0.0)),
            spec["radius"],
            spec["phi0"],
            spec["phi1"],
            z=spec.get("z"),
        )
    raise ValueError(f"unknown segment kind {kind!r}")


class Path:
    """Piecewise-C1 path through the open box interior."""

    def __init__(self, segments):
        self.segments = list(segments)
        if not self.segments:
            raise ValueError("path needs at least one segment")
        for s1, s2 in zip(self.segments, self.segments[1:]):
            gap = np.linalg.norm(s1.position(1.0) - s2.position(0.0))
            if gap > ENDPOINT_TOL:
                raise ValueError(f"segments do not join (gap {gap:.3e})")

    def start(self):
        return np.asarray(self.segments[0].position(0.0), dtype=float)

    def end(self):
        return np.asarray(self.segments[-1].position(1.0), dtype=float)

    def reversed(self):
        return Path([seg.reversed() for seg in reversed(self.segments)])

    def concat(self, other: "Path") -> "Path":
        return Path(self.segments + other.segments)

    def length(self, n: int = 2048) -> float:
        total = 0.0
        s = np.linspace(0.0, 1.0, n)
        for seg in self.segments:
            speed = np.linalg.norm(seg.velocity(s), axis=-1)
            total += np.trapezoid(speed, s)
        return float(total)

    def global_position(self, s):
        """Position under the uniform global parameter over all segments."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        m = len(self.segments)
        idx = np.minimum((s * m).astype(int), m - 1)
        local = s * m - idx
        out = np.empty(s.shape + (3,))
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if np.any(mask):
                out[mask] = seg.position(local[mask])
        return out

    def global_velocity(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        m = len(self.segments)
        idx = np.minimum((s * m).astype(int), m - 1)
        local = s * m - idx
        out = np.empty(s.shape + (3,))
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if np.any(mask):
                out[mask] = seg.velocity(local[mask]) * m
        return out

    def as_single_segment(self) -> Segment:
        return Segment(self.global_position, self.global_velocity)


class Loop(Path):
    """Closed path: start and end agree to 1e-12."""

    def __init__(self, segments):
        super().__init__(segments)
        gap = np.linalg.norm(self.start() - self.end())
        if gap > ENDPOINT_TOL:
            raise ValueError(f"loop does not close (gap {gap:.3e})")


class PathPerturbation:
    """Direction field u(s) with u(0) = u(1) = 0 for path derivatives."""

    def __init__(self, u, u_prime, check_points: int = 513):
        self.u = u
        self.u_prime = u_prime
        for s in (0.0, 1.0):
            if np.linalg.norm(np.asarray(u(s))) > ENDPOINT_TOL:
                raise ValueError("perturbation must vanish at the endpoints")
        s = np.linspace(0.0, 1.0, check_points)
        vals = np.asarray([u(x) for x in s])
        ders = np.asarray([u_prime(x) for x in s])
        self.sup_u = float(np.max(np.linalg.norm(vals, axis=-1)))
        self.norm = self.sup_u + float(np.max(np.linalg.norm(ders, axis=-1)))
        if not math.isfinite(self.norm):
            raise ValueError("perturbation norm is not finite")


class Homotopy:
    """Radial contraction h(s, x) = x0 + s (x - x0) onto the base point."""

    def __init__(self, base):
        self.base = np.asarray(base, dtype=float)

    def path_to(self, x) -> Path:
        """The radial path s -> h(s, x) from the base point to x."""
        return Path([line_segment(self.base, x)])


class _FieldInterpolator:
    """Trilinear interpolation of a 1-form's coefficients off the grid."""

    def __init__(self, A: KForm, band: float | None = None):
        grid = A.grid
        self.grid = grid
        self.band = min(grid.spacing) if band is None else band
        axes = [grid.axis_coords(a) for a in range(3)]
        # stack (component, algebra-coefficient) into one trailing axis
        vals = np.moveaxis(A.interior, 0, -2)  # (n1,n2,n3, 3, dim)
        flat = vals.reshape(vals.shape[:3] + (-1,))
        self._interp = RegularGridInterpolator(axes, flat, method="linear")
        self.dim = A.algebra.dim

    def check_band(self, points):
        lo = np.min(points, axis=0)
        hi = np.max(points, axis=0)
        for a, L in enumerate(self.grid.extents):
            if lo[a] < self.band * (1 - 1e-9) or hi[a] > L - self.band * (1 - 1e-9):
                raise ValueError(
                    "path exits the safe interior band "
                    f"(axis {a}: range [{lo[a]:.4g}, {hi[a]:.4g}])"
                )

    def along(self, points, velocities):
        """Coefficients of A<gamma'(s)> at the given points, shape (n, dim)."""
        vals = self._interp(points).reshape(len(points), 3, self.dim)
        return np.einsum("njd,nj->nd", vals, velocities)


def _project_group(g: np.ndarray) -> np.ndarray:
    """Nearest unitary via polar decomposition."""
    if g.shape == (1, 1):
        return g / abs(g[0, 0])
    u, _, vh = np.linalg.svd(g)
    p = u @ vh
    if g.shape == (2, 2):
        # restore unit determinant lost to rounding
        p = p / np.sqrt(np.linalg.det(p))
    return p


def line_integral(A: KForm, path: Path, n_nodes: int = 1025) -> np.ndarray:
    """Coefficientwise line integral of a 1-form along a path (trapezoid).

    For an abelian field this determines the holonomy in closed form,
    exp(integral); used as the oracle against path-ordered transport.
    """
    interp = _FieldInterpolator(A)
    total = np.zeros(A.algebra.dim)
    s = np.linspace(0.0, 1.0, n_nodes)
    for seg in path.segments:
        pts = np.asarray(seg.position(s), dtype=float)
        vels = np.asarray(seg.velocity(s), dtype=float)
        interp.check_band(pts)
        total += np.trapezoid(interp.along(pts, vels), s, axis=0)
    return total


def transport(A: KForm, path: Path, n_steps: int = 256,
              interp: _FieldInterpolator | None = None) -> np.ndarray:
    """Holonomy g(1) of the ODE g' = g A<gamma'> along a path.

    RK4 with `n_steps` stages per segment; the group element is
    re-projected by polar decomposition after every step so the
    unitarity deviation stays below 1e-10.
    """
    alg = A.algebra
    if interp is None:
        interp = _FieldInterpolator(A)
    g = np.eye(alg.rep_dim, dtype=complex)
    for seg in path.segments:
        s = np.linspace(0.0, 1.0, 2 * n_steps + 1)
        pts = np.asarray(seg.position(s), dtype=float)
        vels = np.asarray(seg.velocity(s), dtype=float)
        interp.check_band(pts)
        coeffs = interp.along(pts, vels)
        mats = alg.to_matrices(coeffs)  # (2n+1, rep, rep)
        ds = 1.0 / n_steps
        for i in range(n_steps):
            a0, am, a1 = mats[2 * i], mats[2 * i + 1], mats[2 * i + 2]
            k1 = g @ a0
            k2 = (g + 0.5 * ds * k1) @ am
            k3 = (g + 0.5 * ds * k2) @ am
            k4 = (g + ds * k3) @ a1
            g = g + (ds / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            g = _project_group(g)
    dev = np.max(np.abs(np.conj(g.T) @ g - np.eye(alg.rep_dim)))
    if dev > UNITARITY_TOL:
        raise RuntimeError(f"transport left the group (deviation {dev:.3e})")
    return g


def wilson_trace(A: KForm, loop: Loop, n_steps: int = 256) -> complex:
    """Trace of the holonomy around a closed loop (gauge invariant)."""
    return complex(np.trace(transport(A, loop, n_steps=n_steps)))


def loops_to_paths(P, homotopy: Homotopy, path: Path) -> np.ndarray:
    """Extend a loop functional P to open paths via the radial homotopy.

    Returns P(h_x . path . h_y^{-1}) where h_x, h_y are the radial paths
    from the base point to the endpoints of `path`; for loops based at
    the homotopy's base point this reduces to P(path).
    """
    x, y = path.start(), path.end()
    base = homotopy.base
    pieces = []
    if np.linalg.norm(x - base) > ENDPOINT_TOL:
        pieces.append(homotopy.path_to(x))
    pieces.append(path)
    if np.linalg.norm(y - base) > ENDPOINT_TOL:
        pieces.append(homotopy.path_to(y).reversed())
    composite = pieces[0]
    for p in pieces[1:]:
        composite = composite.concat(p)
    return P(Loop(composite.segments))


def deriv_bound_check(A: KForm, loop: Loop, u: PathPerturbation,
                      eps_scale=(1e-2, 5e-3, 2.5e-3), n_steps: int = 256) -> dict:
    """Check the perturbation-derivative bound for loop holonomies.

    The directional derivative of the holonomy in the direction u is
    estimated by central differences over an epsilon ladder with a
    Richardson consistency requirement (10%), and its operator norm is
    compared against ||B||_inf sup|u| Length(loop).
    """
    gamma = loop.as_single_segment()
    diam = max(A.grid.extents)
    interp = _FieldInterpolator(A)

    def holonomy(eps):
        def pos(s):
            s = np.asarray(s, dtype=float)
            return gamma.position(s) + eps * np.asarray(
                [u.u(x) for x in np.atleast_1d(s)]
            ).reshape(s.shape + (3,))

        def vel(s):
            s = np.asarray(s, dtype=float)
            return gamma.velocity(s) + eps * np.asarray(
                [u.u_prime(x) for x in np.atleast_1d(s)]
            ).reshape(s.shape + (3,))

        return transport(A, Path([Segment(pos, vel)]),
                         n_steps=4 * n_steps, interp=interp)

    if u.sup_u == 0.0:
        deriv_norm = 0.0
        richardson_dev = 0.0
    else:
        derivs = []
        for es in eps_scale:
            eps = es * diam
            d = (holonomy(eps) - holonomy(-eps)) / (2 * eps)
            derivs.append(d)
        scale = max(np.linalg.norm(d, 2) for d in derivs)
        richardson_dev = 0.0
        if scale > 0:
            for d1, d2 in zip(derivs, derivs[1:]):
                richardson_dev = max(
                    richardson_dev, np.linalg.norm(d2 - d1, 2) / scale
                )
            if richardson_dev > 0.10:
                raise RuntimeError(
                    "finite-difference derivative not converged "
                    f"(Richardson deviation {richardson_dev:.1%})"
                )
        # Richardson extrapolation from the last halving
        deriv = (4.0 * derivs[-1] - derivs[-2]) / 3.0
        deriv_norm = float(np.linalg.norm(deriv, 2))

    B = curvature(apply_boundary(A, A.bc) if A.bc else A)
    b_inf = B.norm("Linf")
    bound = b_inf * u.sup_u * loop.length()
    return {
        "derivative_norm": deriv_norm,
        "bound": float(bound),
        "margin": float(bound - deriv_norm),
        "richardson_deviation": float(richardson_dev),
    }


def convergence_probe(traj, loops, n_steps: int = 256) -> dict:
    """Wilson traces of flowed fields along a dyadic time ladder.

    For each loop, records trace(t_j) and successive absolute differences
    (expected nonincreasing as the flow smooths the field), and checks the
    transport equicontinuity estimate ||//_g - //_e|| <= 2 b L sup|g - e|
    across loop pairs at the final time, with b the max of ||B(t)||_inf
    over the ladder from the monitors.
    """
    ts = list(traj.times)
    if len(ts) < 4:
        raise ValueError("time ladder too short (< 4 rungs)")
    for t1, t2 in zip(ts, ts[1:]):
        if abs(t2 - 2 * t1) > 1e-9 * t2:
            raise ValueError("snapshot times do not form a dyadic ladder")

    traces = []
    for A in traj.fields:
        traces.append([wilson_trace(A, lp, n_steps=n_steps) for lp in loops])
    traces = np.asarray(traces)  # (n_times, n_loops)
    diffs = np.abs(np.diff(traces, axis=0))

    m = traj.monitors
    mask = m.t >= ts[0] - 1e-12
    b = float(np.max(m.B_linf[mask]))
    A_last = traj.fields[-1]
    hols = [transport(A_last, lp, n_steps=n_steps) for lp in loops]
    s = np.linspace(0.0, 1.0, 513)
    pts = [lp.as_single_segment().position(s) for lp in loops]
    lengths = [lp.length() for lp in loops]
    pair_rows = []
    for i in range(len(loops)):
        for j in range(i + 1, len(loops)):
            sep = float(np.max(np.linalg.norm(pts[i] - pts[j], axis=-1)))
            lhs = float(np.linalg.norm(hols[i] - hols[j], 2))
            L = max(lengths[i], lengths[j])
            pair_rows.append(
                {"pair": (i, j), "lhs": lhs, "rhs": 2 * b * L * sep,
                 "margin": 2 * b * L * sep - lhs}
            )
    return {
        "times": ts,
        "traces": traces,
        "trace_diffs": diffs,
        "diffs_nonincreasing_tail": bool(
            np.all(diffs[-2] <= diffs[-3] + 1e-12)
            and np.all(diffs[-1] <= diffs[-2] + 1e-12)
        ) if len(ts) >= 4 else None,
        "equicontinuity": pair_rows,
        "b_sup": b,
    }
