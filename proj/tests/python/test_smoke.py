"""End-to-end smoke tests of the Python bindings on small grids."""

import math

import numpy as np
import pytest

import calbem


@pytest.fixture(scope="module")
def sphere():
    return calbem.regular_sphere(1)


@pytest.fixture(scope="module")
def multitrace(sphere):
    return calbem.Multitrace(sphere, k=2.0, regular_order=3, singular_order=4, near_order=4)


def test_grid_counts_and_geometry(sphere):
    assert sphere.num_vertices == 18
    assert sphere.num_edges == 48
    assert sphere.num_triangles == 32
    assert sphere.vertices.shape == (18, 3)
    assert sphere.triangles.shape == (32, 3)
    # Inscribed polyhedron: slightly below the unit-sphere area.
    assert 0.8 * 4.0 * math.pi < sphere.area < 4.0 * math.pi


def test_pairing_condition_split(sphere):
    dual, naive = calbem.pairing_condition(sphere)
    assert 1.0 < dual < 50.0
    assert naive > 1e4 * dual


def test_calderon_projector_roundtrip(multitrace):
    n = 48
    rng = np.random.default_rng(0)
    d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    m = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    di, ni = multitrace.calderon(d, m, exterior=False)
    de, ne = multitrace.calderon(d, m, exterior=True)
    # The two projectors partition the identity exactly.
    assert np.linalg.norm(di + de - d) < 1e-10 * np.linalg.norm(d)
    assert np.linalg.norm(ni + ne - m) < 1e-10 * np.linalg.norm(m)
    # And each is approximately idempotent.
    di2, ni2 = multitrace.calderon(di, ni, exterior=False)
    defect = np.linalg.norm(di2 - di) + np.linalg.norm(ni2 - ni)
    assert defect < 0.3 * (np.linalg.norm(di) + np.linalg.norm(ni))


def test_blocks_have_expected_shape(multitrace):
    w = multitrace.weak_block("e2")
    s = multitrace.strong_block("e2")
    assert w.shape == (48, 48)
    assert s.shape == (48, 48)
    with pytest.raises(ValueError):
        multitrace.weak_block("q7")


def test_solve_and_fields(multitrace):
    rep = calbem.solve(multitrace, "mfie", p=(1.0, 0.0, 0.0), d=(0.0, 0.0, 1.0))
    assert rep.converged
    assert rep.iterations > 0
    assert rep.residuals[-1] < 1e-5
    assert rep.coefficients.shape == (48,)

    pts = np.array([[3.0, 0.0, 0.0], [0.0, 0.0, 2.5]])
    field = calbem.scattered_field(rep, pts)
    assert field.shape == (2, 3)
    assert field.dtype == complex
    assert np.all(np.isfinite(field))

    # Extinction: inside the conductor the scattered field cancels the
    # incident one.  The level-1 sphere is coarse, so the bound is loose.
    inner = np.array([[0.3, 0.1, -0.2]])
    total = calbem.scattered_field(rep, inner) + calbem.plane_wave_field(
        (1.0, 0.0, 0.0), (0.0, 0.0, 1.0), 2.0, inner
    )
    incident = calbem.plane_wave_field((1.0, 0.0, 0.0), (0.0, 0.0, 1.0), 2.0, inner)
    assert np.linalg.norm(total) < 0.5 * np.linalg.norm(incident)


def test_invalid_inputs_raise():
    with pytest.raises(ValueError):
        calbem.regular_sphere(40)
    g = calbem.regular_sphere(1)
    mt = calbem.Multitrace(g, k=2.0, regular_order=3, singular_order=4, near_order=4)
    with pytest.raises(ValueError):
        calbem.solve(mt, "banana", p=(1, 0, 0), d=(0, 0, 1))
    with pytest.raises(ValueError):
        # Non-transverse polarization.
        calbem.solve(mt, "mfie", p=(0, 0, 1), d=(0, 0, 1))
