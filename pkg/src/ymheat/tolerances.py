"""Frozen discretization-error constants for inequality margins.

Every pointwise inequality that holds exactly in the continuum is
verified on the grid with slack C * (h^2 + dt^2), matching the formal
order of the spatial stencils and the RK4-in-time trapezoidal Duhamel
sums.  The constants below were calibrated once on abelian runs (where
the flow has an independent spectral solution) at 12^3 and 16^3: the
observed worst constants were ~0.63 for heat-kernel domination of B and
below 0.05 for the diamagnetic comparison, both stable under
refinement.  C_DISC carries a ~6x safety factor and is frozen; tests
and the command-line checks must not loosen it per-run (a global
--tol-scale multiplier exists for exploratory reruns only).
"""

from __future__ import annotations

__all__ = ["C_DISC", "C_FACE", "margin_tol", "face_tol"]

# slack constant for pointwise inequalities: tol = C_DISC * (h^2 + dt^2)
C_DISC = 4.0

# slack constant for one-sided face-stencil quantities (normal
# derivatives, face Laplacians): tol = C_FACE * h^2
C_FACE = 10.0


def margin_tol(h: float, dt: float, scale: float = 1.0) -> float:
    """Slack for a pointwise inequality margin at spacing h, step dt."""
    return scale * C_DISC * (h * h + dt * dt)


def face_tol(h: float, scale: float = 1.0) -> float:
    """Slack for one-sided boundary-stencil comparisons at spacing h."""
    return scale * C_FACE * h * h
