"""Hamiltonian and gauge models shared by the loop-space oracle and the
characteristic solver.

Every callable is vectorized over leading axes: ``value`` maps ``(..., 2n)``
to ``(...)`` and ``gradient`` maps ``(..., 2n)`` to ``(..., 2n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .domain import PSymmetry, Radii, apply_p, validate_radii
from .errors import DimensionMismatch, InputError

__all__ = [
    "HamiltonianModel",
    "GaugeModel",
    "CubicRamp",
    "quadratic_hamiltonian",
    "ellipsoid_gauge",
    "ball_gauge",
    "smoothed_bidisk_gauge",
    "ramp_hamiltonian",
    "check_p_invariance",
    "check_homogeneity",
    "check_tau0_invariance",
]


@dataclass(frozen=True)
class HamiltonianModel:
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    dim: int
    description: str = ""
    sym: PSymmetry | None = None
    growth: float | None = None
    hessian: Callable[[np.ndarray], np.ndarray] | None = None
    metadata: dict = field(default_factory=dict)

    def __call__(self, z):
        return self.value(np.asarray(z, dtype=float))

    def grad(self, z):
        return self.gradient(np.asarray(z, dtype=float))

    def vector_field(self, z):
        """``J0 grad H(z)`` along the last axis."""
        g = self.gradient(z)
        n = self.dim // 2
        return np.concatenate([-g[..., n:], g[..., :n]], axis=-1)

    def validate(self, samples: int = 64, rng=None, rtol: float = 1e-10):
        """Check the declared P-invariance and the growth condition ``a not in N pi``."""
        if self.sym is not None:
            check_p_invariance(self, self.sym, samples, rng, rtol)
        if self.growth is not None:
            a = self.growth
            if a <= math.pi or abs(a / math.pi - round(a / math.pi)) < 1e-9:
                raise InputError(f"growth coefficient a = {a} must lie in (pi, inf) minus N*pi")
        return self


@dataclass(frozen=True)
class GaugeModel(HamiltonianModel):
    """Positively 2-homogeneous ``q = j_D^2``; the body is ``{q < 1}``."""

    def validate(self, samples: int = 64, rng=None, rtol: float = 1e-10):
        check_homogeneity(self, samples, rng, rtol)
        return super().validate(samples, rng, rtol)


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def check_p_invariance(H: HamiltonianModel, sym: PSymmetry, samples=64, rng=None, rtol=1e-10):
    if 2 * sym.n != H.dim:
        raise DimensionMismatch(f"symmetry acts on R^{2 * sym.n}, H on R^{H.dim}")
    z = _rng(rng).standard_normal((samples, H.dim))
    a, b = H(z), H(apply_p(sym, z))
    if not np.allclose(a, b, rtol=rtol, atol=rtol):
        raise InputError(f"H is not P-invariant (max deviation {np.max(np.abs(a - b)):.3g})")


def check_tau0_invariance(H: HamiltonianModel, samples=64, rng=None, rtol=1e-10):
    n = H.dim // 2
    z = _rng(rng).standard_normal((samples, H.dim))
    zt = z.copy()
    zt[:, n:] *= -1
    a, b = H(z), H(zt)
    if not np.allclose(a, b, rtol=rtol, atol=rtol):
        raise InputError("H is not invariant under tau0(x, y) = (x, -y)")


def check_homogeneity(H: HamiltonianModel, samples=64, rng=None, rtol=1e-10):
    g = _rng(rng)
    z = g.standard_normal((samples, H.dim))
    lam = g.uniform(0.2, 3.0, size=samples)
    a = H(lam[:, None] * z)
    b = lam**2 * H(z)
    if not np.allclose(a, b, rtol=rtol, atol=0):
        raise InputError("gauge is not positively 2-homogeneous")


def quadratic_hamiltonian(n: int, a: float, sym: PSymmetry | None = None) -> HamiltonianModel:
    """``H(z) = a |z|^2``."""
    a = float(a)
    return HamiltonianModel(
        value=lambda z: a * np.sum(z * z, axis=-1),
        gradient=lambda z: 2 * a * z,
        hessian=lambda z: 2 * a * np.broadcast_to(np.eye(2 * n), z.shape[:-1] + (2 * n, 2 * n)),
        dim=2 * n,
        description=f"{a:g}*|z|^2",
        sym=sym,
        growth=a,
    )


def ellipsoid_gauge(r, sym: PSymmetry | None = None) -> GaugeModel:
    """``q(z) = sum_i (x_i^2 + y_i^2) / r_i^2``."""
    r = r if isinstance(r, Radii) else validate_radii(r)
    w = 1.0 / np.asarray(r.values) ** 2
    w2 = np.concatenate([w, w])
    return GaugeModel(
        value=lambda z: np.sum(w2 * z * z, axis=-1),
        gradient=lambda z: 2 * w2 * z,
        hessian=lambda z: np.broadcast_to(np.diag(2 * w2), z.shape[:-1] + (w2.size, w2.size)),
        dim=2 * r.n,
        description="ellipsoid E(" + ",".join(f"{v:g}" for v in r.values) + ")",
        sym=sym,
        metadata={"kind": "ellipsoid", "radii": r.values},
    )


def ball_gauge(n: int, R: float = 1.0, sym: PSymmetry | None = None) -> GaugeModel:
    return ellipsoid_gauge(validate_radii([R] * n), sym)


def smoothed_bidisk_gauge(p: float = 8.0, sym: PSymmetry | None = None) -> GaugeModel:
    """``((x1^2 + x2^2)^p + (y1^2 + y2^2)^p)^(1/p)``: a smooth inner approximation
    of the max-gauge of ``{x1^2 + x2^2 < 1, y1^2 + y2^2 < 1}``."""
    p = float(p)
    if p < 1:
        raise InputError(f"smoothing exponent p must be >= 1, got {p}")

    def parts(z):
        A = z[..., 0] ** 2 + z[..., 1] ** 2
        B = z[..., 2] ** 2 + z[..., 3] ** 2
        m = np.maximum(A, B)
        safe = np.where(m > 0, m, 1.0)
        a, b = A / safe, B / safe
        s = a**p + b**p
        return A, B, m, a, b, s

    def value(z):
        *_, m, a, b, s = parts(z)
        return np.where(m > 0, m * s ** (1 / p), 0.0)

    def gradient(z):
        A, B, m, a, b, s = parts(z)
        common = np.where(m > 0, s ** (1 / p - 1), 0.0)
        dA = common * a ** (p - 1)
        dB = common * b ** (p - 1)
        return np.stack([2 * dA * z[..., 0], 2 * dA * z[..., 1],
                         2 * dB * z[..., 2], 2 * dB * z[..., 3]], axis=-1)

    return GaugeModel(value=value, gradient=gradient, dim=4,
                      description=f"smoothed Lagrangian bidisk gauge, p={p:g}", sym=sym,
                      metadata={"kind": "bidisk", "p": p})


@dataclass(frozen=True)
class CubicRamp:
    """``f(s) = 0`` for ``s <= onset``; ``f'`` rises from 0 to ``alpha`` as a cubic
    smoothstep over ``[onset, onset + width]`` and stays ``alpha`` afterwards."""

    alpha: float
    width: float = 0.5
    onset: float = 1.0

    def _u(self, s):
        return np.clip((np.asarray(s, dtype=float) - self.onset) / self.width, 0.0, 1.0)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        u = self._u(s)
        inner = self.alpha * self.width * (u**3 - u**4 / 2)
        tail = self.alpha * (self.width / 2 + (s - self.onset - self.width))
        return np.where(s >= self.onset + self.width, tail, inner)

    def d1(self, s):
        u = self._u(s)
        return self.alpha * (3 * u**2 - 2 * u**3)

    def d2(self, s):
        u = self._u(s)
        return self.alpha * 6 * u * (1 - u) / self.width

    def level_for_slope(self, slope: float) -> float:
        """The level ``s0`` in the ramp with ``f'(s0) = slope`` (``0 < slope < alpha``)."""
        if not 0 < slope < self.alpha:
            raise InputError(f"slope {slope} is not attained strictly inside the ramp (alpha={self.alpha})")
        u = brentq(lambda u: 3 * u**2 - 2 * u**3 - slope / self.alpha, 0.0, 1.0, xtol=1e-15, rtol=1e-15)
        return self.onset + self.width * u


def ramp_hamiltonian(q: GaugeModel, alpha: float, width: float = 0.5, spectrum=None,
                     guard: float = 1e-9) -> HamiltonianModel:
    """``f o q`` with a :class:`CubicRamp` of final slope ``alpha``.

    ``spectrum`` (an ActionStream or a list of values) is used to reject an
    ``alpha`` within ``guard`` (relative) of a spectrum element.
    """
    alpha = float(alpha)
    if spectrum is not None:
        values = spectrum.up_to(alpha * (1 + 2 * guard)) if hasattr(spectrum, "up_to") else spectrum
        for v in values:
            x = float(v)
            if abs(x - alpha) <= guard * max(1.0, abs(x)):
                raise InputError(f"ramp slope alpha = {alpha} lies in the action spectrum (near {x})")
    f = CubicRamp(alpha=alpha, width=width)

    def value(z):
        return f(q.value(z))

    def gradient(z):
        return f.d1(q.value(z))[..., None] * q.gradient(z)

    hess = None
    if q.hessian is not None:
        def hess(z):
            s = q.value(z)
            g = q.gradient(z)
            return (f.d2(s)[..., None, None] * g[..., :, None] * g[..., None, :]
                    + f.d1(s)[..., None, None] * q.hessian(z))

    return HamiltonianModel(value=value, gradient=gradient, hessian=hess, dim=q.dim,
                            description=f"cubic ramp (alpha={alpha:g}) o {q.description}",
                            sym=q.sym, metadata={"ramp": f, "gauge": q})
