import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symcap.domain import PSymmetry, validate_radii
from symcap.errors import InputError
from symcap.hamiltonians import (
    CubicRamp,
    HamiltonianModel,
    ball_gauge,
    check_tau0_invariance,
    ellipsoid_gauge,
    quadratic_hamiltonian,
    ramp_hamiltonian,
    smoothed_bidisk_gauge,
)
from symcap.spectrum import sigma_p_stream


def fd_grad(H, z, h=1e-6):
    g = np.zeros_like(z)
    for i in range(z.size):
        e = np.zeros_like(z)
        e[i] = h
        g[i] = (H(z + e) - H(z - e)) / (2 * h)
    return g


@given(st.lists(st.floats(0.3, 3.0), min_size=1, max_size=4), st.integers(0, 10_000))
def test_ellipsoid_gauge_gradient_and_homogeneity(radii, seed):
    q = ellipsoid_gauge(validate_radii(radii))
    q.validate(rng=seed)
    z = np.random.default_rng(seed).standard_normal(q.dim)
    assert np.allclose(q.grad(z), fd_grad(q, z), rtol=1e-6, atol=1e-8)
    assert q(np.eye(q.dim)[0] * radii[0]) == pytest.approx(1.0)


def test_p_invariance_is_checked():
    sym = PSymmetry(2, 1)
    ellipsoid_gauge(validate_radii([1.0, 2.0]), sym).validate()
    skew = HamiltonianModel(value=lambda z: np.sum(z * z, -1) + z[..., 0],
                            gradient=lambda z: 2 * z + np.eye(4)[0], dim=4, sym=sym)
    with pytest.raises(InputError):
        skew.validate()


def test_growth_condition():
    quadratic_hamiltonian(2, 1.5 * math.pi).validate()
    for a in (math.pi, 2 * math.pi, 1.0):
        with pytest.raises(InputError):
            quadratic_hamiltonian(2, a).validate()


def test_ball_gauge_is_tau0_invariant():
    check_tau0_invariance(ball_gauge(3, 2.0))


@given(st.floats(2.0, 8.0), st.integers(0, 1000))
def test_bidisk_gauge(p, seed):
    q = smoothed_bidisk_gauge(p, PSymmetry(2, 1))
    q.validate(rng=seed)
    z = np.random.default_rng(seed).standard_normal(4)
    assert np.allclose(q.grad(z), fd_grad(q, z), rtol=1e-5, atol=1e-7)
    # the smoothed body sits inside the product of discs
    assert q(z) >= max(z[0] ** 2 + z[1] ** 2, z[2] ** 2 + z[3] ** 2) - 1e-12
    assert q(np.zeros(4)) == 0.0


def test_bidisk_exponent_validation():
    with pytest.raises(InputError):
        smoothed_bidisk_gauge(0.5)


def test_cubic_ramp_shape():
    f = CubicRamp(alpha=4.0, width=0.5, onset=1.0)
    s = np.linspace(0, 3, 301)
    assert np.all(f(s[s <= 1.0]) == 0)
    assert np.all(np.diff(f.d1(s)) >= -1e-15)
    assert f.d1(2.0) == 4.0
    # continuity of f at the end of the ramp
    assert f(1.5 - 1e-9) == pytest.approx(f(1.5 + 1e-9), abs=1e-8)
    # derivative consistency
    mid = 1.23
    assert (f(mid + 1e-6) - f(mid - 1e-6)) / 2e-6 == pytest.approx(float(f.d1(mid)), rel=1e-7)
    s0 = f.level_for_slope(math.pi)
    assert float(f.d1(s0)) == pytest.approx(math.pi, rel=1e-13)
    with pytest.raises(InputError):
        f.level_for_slope(5.0)


def test_ramp_rejects_spectral_slope():
    r = validate_radii([1.0, 1.5])
    q = ellipsoid_gauge(r, PSymmetry(2, 1))
    spec = sigma_p_stream(r, PSymmetry(2, 1))
    with pytest.raises(InputError):
        ramp_hamiltonian(q, 3 * math.pi, spectrum=spec)
    H = ramp_hamiltonian(q, 4.0, spectrum=spec)
    z = np.array([1.1, 0.2, -0.3, 0.4])
    assert np.allclose(H.grad(z), fd_grad(H, z), rtol=1e-6, atol=1e-8)
    assert np.allclose(H.hessian(z), np.array([fd_grad(lambda w: H.grad(w)[i], z) for i in range(4)]),
                       atol=1e-5)
