"""Truncated Fourier model of the constrained loop space.

A loop is ``x(t) = sum_{|j| <= N} exp(2 pi j t J0) x_j`` with real
coefficients ``x_j in R^{2n}``.  The half-period twist ``x(t + 1/2) = P x(t)``
is equivalent to ``P x_j = (-1)^j x_j``: odd modes live on the coordinates P
negates, even modes (including the constant mode) on the ones it fixes.

The H^{1/2} inner product is ``<x_0, y_0> + 2 pi sum_j |j| <x_j, y_j>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .domain import PSymmetry, apply_j0
from .errors import DimensionMismatch, InputError, MaxIterationsExceeded
from .hamiltonians import HamiltonianModel

__all__ = [
    "FourierLoop",
    "NewtonResult",
    "constraint_mask",
    "make_loop",
    "loop_from_vector",
    "action",
    "mean_hamiltonian",
    "action_h",
    "grad_action_h",
    "inner_half",
    "norm_half",
    "constrained_dim",
    "constrained_dim_formula",
    "spectral_newton",
]


def constraint_mask(n: int, kappa: int, N: int) -> np.ndarray:
    """Boolean ``(2N+1, 2n)`` array of the coefficients allowed in E_P."""
    sym = PSymmetry(n, kappa)
    neg, fix = sym.negated_mask(), sym.fixed_mask()
    modes = np.arange(-N, N + 1)
    return np.where((modes % 2 == 1)[:, None], neg[None, :], fix[None, :])


@dataclass(frozen=True)
class FourierLoop:
    n: int
    kappa: int
    N: int
    coeffs: np.ndarray = field(repr=False)
    discarded_norm: float = 0.0

    @property
    def sym(self) -> PSymmetry:
        return PSymmetry(self.n, self.kappa)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def mode(self, j: int) -> np.ndarray:
        return self.coeffs[j + self.N]

    def with_coeffs(self, coeffs) -> FourierLoop:
        return replace(self, coeffs=np.asarray(coeffs, dtype=float), discarded_norm=0.0)

    def to_vector(self) -> np.ndarray:
        """Free (constrained) coordinates as a flat vector."""
        return self.coeffs[constraint_mask(self.n, self.kappa, self.N)]

    def _cos_sin(self):
        # x(t) = sum_{k>=0} cos(2 pi k t) C_k + sin(2 pi k t) S_k
        c = self.coeffs
        N = self.N
        pos, neg = c[N + 1:], c[N - 1::-1] if N > 0 else c[:0]
        C = np.vstack([c[N:N + 1], pos + neg])
        S = np.vstack([np.zeros((1, 2 * self.n)), apply_j0(pos - neg)])
        return C, S

    def evaluate(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        C, S = self._cos_sin()
        ph = 2 * np.pi * np.outer(t, np.arange(self.N + 1))
        return np.cos(ph) @ C + np.sin(ph) @ S

    def derivative(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        C, S = self._cos_sin()
        k = np.arange(self.N + 1)
        ph = 2 * np.pi * np.outer(t, k)
        w = 2 * np.pi * k
        return (np.cos(ph) * w) @ S - (np.sin(ph) * w) @ C

    def __add__(self, other: FourierLoop) -> FourierLoop:
        _same_space(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: FourierLoop) -> FourierLoop:
        _same_space(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> FourierLoop:
        return self.with_coeffs(self.coeffs * float(s))

    __rmul__ = __mul__


def _same_space(a: FourierLoop, b: FourierLoop):
    if (a.n, a.kappa, a.N) != (b.n, b.kappa, b.N):
        raise DimensionMismatch(f"loops live in different spaces: {(a.n, a.kappa, a.N)} vs {(b.n, b.kappa, b.N)}")


def make_loop(n: int, kappa: int, N: int, raw=None) -> FourierLoop:
    """Project raw coefficients onto the constraint.

    ``raw`` is a ``(2N+1, 2n)`` array indexed by ``j + N``, a mapping
    ``{j: vector}``, or ``None`` for the zero loop.  The discarded part's
    Euclidean norm is stored in ``discarded_norm``.
    """
    if N < 0:
        raise InputError(f"truncation order N must be >= 0, got {N}")
    full = np.zeros((2 * N + 1, 2 * n))
    if isinstance(raw, dict):
        for j, v in raw.items():
            if abs(j) > N:
                raise DimensionMismatch(f"mode {j} exceeds truncation order N={N}")
            v = np.asarray(v, dtype=float)
            if v.shape != (2 * n,):
                raise DimensionMismatch(f"mode {j} must be a {2 * n}-vector, got shape {v.shape}")
            full[j + N] = v
    elif raw is not None:
        arr = np.asarray(raw, dtype=float)
        if arr.shape != full.shape:
            raise DimensionMismatch(f"expected coefficient array of shape {full.shape}, got {arr.shape}")
        full = arr.copy()
    mask = constraint_mask(n, kappa, N)
    discarded = float(np.linalg.norm(full[~mask]))
    full[~mask] = 0.0
    return FourierLoop(n, kappa, N, full, discarded)


def loop_from_vector(template: FourierLoop, vec) -> FourierLoop:
    mask = constraint_mask(template.n, template.kappa, template.N)
    c = np.zeros_like(template.coeffs)
    c[mask] = vec
    return template.with_coeffs(c)


def action(x: FourierLoop) -> float:
    """``pi * sum_j j |x_j|^2``."""
    return float(np.pi * np.sum(x.modes * np.sum(x.coeffs**2, axis=1)))


def inner_half(x: FourierLoop, y: FourierLoop) -> float:
    w = 2 * np.pi * np.abs(x.modes).astype(float)
    w[x.N] = 1.0
    return float(np.sum(w * np.sum(x.coeffs * y.coeffs, axis=1)))


def norm_half(x: FourierLoop) -> float:
    return math.sqrt(inner_half(x, x))


def _grid(M: int) -> np.ndarray:
    return np.arange(M) / M


def mean_hamiltonian(x: FourierLoop, H: HamiltonianModel, quad_pts: int | None = None,
                     *, rtol: float = 1e-12, max_pts: int = 1 << 16) -> tuple[float, int, float]:
    """Uniform-grid approximation of ``int_0^1 H(x(t)) dt``.

    With ``quad_pts`` given, returns ``(value, quad_pts, nan)``.  Otherwise
    starts at ``4N+1`` points and doubles until two successive values agree to
    ``rtol``; the last change is returned as the error estimate.
    """
    if H.dim != 2 * x.n:
        raise DimensionMismatch(f"H acts on R^{H.dim}, loop on R^{2 * x.n}")
    if quad_pts is not None:
        if quad_pts < 2 * x.N + 1:
            raise InputError(f"quad_pts must be >= 2N+1 = {2 * x.N + 1}, got {quad_pts}")
        return float(np.mean(H(x.evaluate(_grid(quad_pts))))), quad_pts, float("nan")
    M = 4 * x.N + 1
    prev = float(np.mean(H(x.evaluate(_grid(M)))))
    while True:
        M2 = 2 * M
        cur = float(np.mean(H(x.evaluate(_grid(M2)))))
        change = abs(cur - prev)
        if change <= rtol * max(1.0, abs(cur)) or M2 >= max_pts:
            return cur, M2, change
        prev, M = cur, M2


def action_h(x: FourierLoop, H: HamiltonianModel, quad_pts: int | None = None) -> float:
    """``A(x) - int_0^1 H(x(t)) dt``."""
    return action(x) - mean_hamiltonian(x, H, quad_pts)[0]


def _fourier_of_samples(y: np.ndarray, N: int, n: int) -> np.ndarray:
    """Coefficients ``a_j`` (``|j| <= N``) of samples ``y(t_m)`` in the exp(2 pi j t J0) basis."""
    M = y.shape[0]
    Y = np.fft.rfft(y, axis=0)[: N + 1]
    A = 2 * Y.real / M
    B = -2 * Y.imag / M
    a = np.zeros((2 * N + 1, 2 * n))
    a[N] = A[0] / 2
    if N:
        JB = apply_j0(B[1:])
        a[N + 1:] = (A[1:] - JB) / 2
        a[N - 1::-1] = (A[1:] + JB) / 2
    return a


def grad_action_h(x: FourierLoop, H: HamiltonianModel, quad_pts: int | None = None) -> FourierLoop:
    """H^{1/2}-gradient of ``action_h``: ``x^+ - x^- - j^*(grad H(x))``.

    The coefficients of ``grad H(x(.))`` come from a discrete transform on
    ``quad_pts`` samples (default ``4N+1``); with the same ``quad_pts`` this is
    the exact gradient of the discretized :func:`action_h`.
    """
    if H.dim != 2 * x.n:
        raise DimensionMismatch(f"H acts on R^{H.dim}, loop on R^{2 * x.n}")
    M = 4 * x.N + 1 if quad_pts is None else quad_pts
    if M < 2 * x.N + 1:
        raise InputError(f"quad_pts must be >= 2N+1 = {2 * x.N + 1}, got {M}")
    y = H.grad(x.evaluate(_grid(M)))
    a = _fourier_of_samples(y, x.N, x.n)
    modes = x.modes
    g = np.empty_like(x.coeffs)
    nz = modes != 0
    g[nz] = np.sign(modes[nz])[:, None] * x.coeffs[nz] - a[nz] / (2 * np.pi * np.abs(modes[nz]))[:, None]
    g[x.N] = -a[x.N]
    g[~constraint_mask(x.n, x.kappa, x.N)] = 0.0
    return x.with_coeffs(g)


def constrained_dim_formula(j: int, n: int, kappa: int) -> int:
    """``nj`` for even ``j``, ``n(j-1) + 2(n - kappa)`` for odd ``j``."""
    return n * j if j % 2 == 0 else n * (j - 1) + 2 * (n - kappa)


def constrained_dim(j: int, n: int, kappa: int) -> int:
    """Dimension of the positive modes ``1..j`` of E_P, summed eigenspace by eigenspace."""
    if j < 0:
        raise InputError(f"j must be nonnegative, got {j}")
    P = PSymmetry(n, kappa).matrix()
    eye = np.eye(2 * n)
    dim_neg = int(np.linalg.matrix_rank(eye - P))  # range of (I - P)/2 = ker(P + I)
    dim_fix = int(np.linalg.matrix_rank(eye + P))
    return sum(dim_neg if k % 2 else dim_fix for k in range(1, j + 1))


@dataclass
class NewtonResult:
    loop: FourierLoop
    residual: float
    action: float
    action_h: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def _jacobian(G, u, h=1e-6):
    g0 = G(u)
    J = np.empty((g0.size, u.size))
    for i in range(u.size):
        step = h * max(1.0, abs(u[i]))
        e = np.zeros_like(u)
        e[i] = step
        J[:, i] = (G(u + e) - G(u - e)) / (2 * step)
    return J


def spectral_newton(H: HamiltonianModel, n: int, kappa: int, N: int, seed: FourierLoop, *,
                    tol: float = 1e-10, max_iter: int = 50, quad_pts: int | None = None,
                    raise_on_failure: bool = True) -> NewtonResult:
    """Damped Newton iteration for ``grad_action_h = 0`` near ``seed``.

    Finds critical loops close to the seed only; there is no global search.
    The Jacobian is a central finite difference of the gradient and the step a
    truncated least-squares solve, which tolerates the rotation degeneracy of
    critical circles.  Steps are backtracked on the H^{1/2} residual norm.
    """
    if (seed.n, seed.kappa, seed.N) != (n, kappa, N):
        raise DimensionMismatch(f"seed lives in {(seed.n, seed.kappa, seed.N)}, expected {(n, kappa, N)}")
    M = 4 * N + 1 if quad_pts is None else quad_pts
    mask = constraint_mask(n, kappa, N)
    w = 2 * np.pi * np.abs(np.arange(-N, N + 1)).astype(float)
    w[N] = 1.0
    sqrt_w = np.sqrt(np.broadcast_to(w[:, None], mask.shape)[mask])

    def G(u):
        # residual scaled so its Euclidean norm is the H^{1/2} norm
        return sqrt_w * grad_action_h(loop_from_vector(seed, u), H, M).to_vector()

    u = seed.to_vector().copy()
    r = G(u)
    res = float(np.linalg.norm(r))
    history = [res]
    it = 0
    while res > tol and it < max_iter:
        it += 1
        J = _jacobian(G, u)
        step, *_ = np.linalg.lstsq(J, -r, rcond=1e-8)
        lam = 1.0
        while True:
            u_try = u + lam * step
            r_try = G(u_try)
            res_try = float(np.linalg.norm(r_try))
            if res_try < res or lam < 1e-6:
                break
            lam *= 0.5
        if res_try >= res:
            break
        u, r, res = u_try, r_try, res_try
        history.append(res)
    loop = loop_from_vector(seed, u)
    result = NewtonResult(loop=loop, residual=res, action=action(loop),
                          action_h=action_h(loop, H, M), iterations=it,
                          converged=res <= tol, history=history)
    if not result.converged and raise_on_failure:
        raise MaxIterationsExceeded(
            f"Newton stopped at residual {res:.3g} after {it} iterations",
            diagnostics={"residual": res, "iterations": it}, best=result,
        )
    return result
