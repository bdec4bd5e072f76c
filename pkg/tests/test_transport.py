import math

import numpy as np
import pytest

from ymheat.fields import random_smooth
from ymheat.calculus import gauge_transform, gauge_transform_form
from ymheat.grid import GridSpec, NEUMANN, apply_boundary
from ymheat.transport import (
    Homotopy,
    Loop,
    Path,
    PathPerturbation,
    arc_segment,
    deriv_bound_check,
    line_integral,
    line_segment,
    loops_to_paths,
    segment_from_json,
    transport,
    wilson_trace,
)

CENTER = (0.5, 0.5, 0.5)


def _circle(radius=0.2, z=0.5):
    return Loop([arc_segment((0.5, 0.5), radius, 0.0, 2 * math.pi, z=z)])


def _square(half=0.2, z=0.5):
    c = 0.5
    pts = [
        (c - half, c - half, z), (c + half, c - half, z),
        (c + half, c + half, z), (c - half, c + half, z),
    ]
    return Loop([line_segment(pts[i], pts[(i + 1) % 4]) for i in range(4)])


def _loop_battery():
    return [
        _circle(0.15),
        _circle(0.25),
        _square(0.15),
        _square(0.25),
        Loop([
            arc_segment((0.5, 0.5), 0.2, 0.0, math.pi, z=0.5),
            line_segment((0.3, 0.5, 0.5), (0.7, 0.5, 0.5)),
        ]),
    ]


@pytest.fixture(scope="module")
def field():
    g = GridSpec((1.0, 1.0, 1.0), (16, 16, 16))
    from ymheat.algebra import su2

    return apply_boundary(
        random_smooth(g, su2(), seed=41, amplitude=0.4), NEUMANN
    )


@pytest.fixture(scope="module")
def abelian(field):
    from ymheat.algebra import u1

    return apply_boundary(
        random_smooth(field.grid, u1(), seed=42, amplitude=0.6), NEUMANN
    )


def test_path_rejects_disconnected_segments():
    with pytest.raises(ValueError):
        Path([line_segment((0.2, 0.2, 0.5), (0.5, 0.5, 0.5)),
              line_segment((0.6, 0.6, 0.5), (0.7, 0.7, 0.5))])


def test_loop_rejects_open_path():
    with pytest.raises(ValueError):
        Loop([line_segment((0.2, 0.2, 0.5), (0.8, 0.8, 0.5))])


def test_segment_from_json_roundtrip():
    seg = segment_from_json(
        {"kind": "arc", "center": [0.5, 0.5], "radius": 0.2,
         "phi0": 0.0, "phi1": 3.14159, "z": 0.5}
    )
    p0 = seg.position(0.0)
    assert np.allclose(p0, (0.7, 0.5, 0.5), atol=1e-12)
    with pytest.raises(ValueError):
        segment_from_json({"kind": "spiral"})


def test_path_length_circle():
    loop = _circle(0.2)
    assert abs(loop.length() - 2 * math.pi * 0.2) < 1e-6


def test_abelian_transport_matches_closed_form(abelian):
    loop = _circle(0.2)
    integral = line_integral(abelian, loop)[0]
    g = transport(abelian, loop, n_steps=512)
    exact = np.exp(1j * integral)
    assert abs(g[0, 0] - exact) < 1e-7


def test_transport_composition(field):
    p1 = Path([line_segment((0.3, 0.3, 0.5), (0.7, 0.4, 0.5))])
    p2 = Path([line_segment((0.7, 0.4, 0.5), (0.5, 0.7, 0.5))])
    g12 = transport(field, p1.concat(p2), n_steps=512)
    g = transport(field, p1, n_steps=512) @ transport(field, p2, n_steps=512)
    assert np.max(np.abs(g12 - g)) < 1e-8


def test_transport_inverse(field):
    p = Path([line_segment((0.3, 0.3, 0.5), (0.7, 0.6, 0.5))])
    g = transport(field, p, n_steps=512)
    g_rev = transport(field, p.reversed(), n_steps=512)
    assert np.max(np.abs(g @ g_rev - np.eye(2))) < 1e-8


def test_transport_reparametrization(field):
    loop = _circle(0.2)
    # the same circle traversed with a nonuniform parameter speed
    def pos(s):
        s = np.asarray(s, dtype=float)
        w = s + 0.3 * np.sin(math.pi * s) ** 2 / math.pi
        phi = 2 * math.pi * w
        return np.stack([0.5 + 0.2 * np.cos(phi), 0.5 + 0.2 * np.sin(phi),
                         np.full_like(phi, 0.5)], axis=-1)

    def vel(s):
        s = np.asarray(s, dtype=float)
        dw = 1.0 + 0.3 * 2 * np.sin(math.pi * s) * np.cos(math.pi * s)
        phi = 2 * math.pi * (s + 0.3 * np.sin(math.pi * s) ** 2 / math.pi)
        dphi = 2 * math.pi * dw
        return np.stack([-0.2 * np.sin(phi) * dphi, 0.2 * np.cos(phi) * dphi,
                         np.zeros_like(phi)], axis=-1)

    from ymheat.transport import Segment

    g1 = transport(field, loop, n_steps=1024)
    g2 = transport(field, Loop([Segment(pos, vel)]), n_steps=1024)
    assert np.max(np.abs(g1 - g2)) < 5e-8


def test_transport_unitarity(field):
    for loop in _loop_battery():
        g = transport(field, loop, n_steps=256)
        assert np.max(np.abs(np.conj(g.T) @ g - np.eye(2))) < 1e-10
        assert abs(np.linalg.det(g) - 1.0) < 1e-9


def test_wilson_trace_gauge_invariant(field):
    theta = random_smooth(field.grid, field.algebra, seed=43, degree=0,
                          amplitude=0.4)
    k = field.algebra.exp(theta.values[0])
    A_k = apply_boundary(gauge_transform(field, k), NEUMANN)
    for loop in _loop_battery()[:3]:
        t1 = wilson_trace(field, loop, n_steps=512)
        t2 = wilson_trace(A_k, loop, n_steps=512)
        # gauge transforms shift the field by O(h^2) stencil error only
        assert abs(t1 - t2) < 5e-4


def test_wilson_trace_real_for_su2(field):
    for loop in _loop_battery()[:2]:
        z = wilson_trace(field, loop)
        assert abs(z.imag) < 1e-9
        assert abs(z) <= 2.0 + 1e-9


def test_band_violation_raises(field):
    p = Path([line_segment((0.01, 0.5, 0.5), (0.99, 0.5, 0.5))])
    with pytest.raises(ValueError, match="band"):
        transport(field, p)


def test_loops_to_paths_reduces_on_based_loops(field):
    base = np.array([0.3, 0.5, 0.5])
    hom = Homotopy(base)
    loop = Loop([
        arc_segment((0.5, 0.5), 0.2, math.pi, 3 * math.pi, z=0.5)
    ])  # starts and ends at (0.3, 0.5, 0.5) = base
    P = lambda lp: wilson_trace(field, lp, n_steps=512)
    direct = P(loop)
    extended = loops_to_paths(P, hom, loop)
    assert abs(direct - extended) < 1e-8


def test_loops_to_paths_open_path_closure(field):
    hom = Homotopy((0.5, 0.5, 0.5))
    path = Path([line_segment((0.4, 0.4, 0.5), (0.6, 0.6, 0.5))])
    P = lambda lp: wilson_trace(field, lp, n_steps=256)
    val = loops_to_paths(P, hom, path)
    assert np.isfinite(val.real)


def test_perturbation_must_vanish_at_endpoints():
    with pytest.raises(ValueError):
        PathPerturbation(lambda s: np.array([1.0, 0.0, 0.0]),
                         lambda s: np.zeros(3))


def test_deriv_bound_holds(field):
    loop = _circle(0.2)
    u = PathPerturbation(
        lambda s: np.array([0.0, 0.0, 0.05 * math.sin(math.pi * s) ** 2]),
        lambda s: np.array(
            [0.0, 0.0, 0.05 * math.pi * math.sin(2 * math.pi * s)]
        ),
    )
    res = deriv_bound_check(field, loop, u)
    assert res["margin"] >= -1e-6
    assert res["richardson_deviation"] <= 0.10


def test_deriv_bound_zero_perturbation(field):
    loop = _circle(0.2)
    u = PathPerturbation(lambda s: np.zeros(3), lambda s: np.zeros(3))
    res = deriv_bound_check(field, loop, u)
    assert res["derivative_norm"] == 0.0
    assert res["margin"] >= 0.0
