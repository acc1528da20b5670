"""Closed characteristics on convex energy surfaces ``{q = 1}``.

Three routes:

* analytic planar orbits on ellipsoids (:func:`ellipsoid_characteristics`);
* shooting for P-symmetric orbits, ``z(T/2) = P z(0)``
  (:func:`shoot_p_symmetric`), and for brake orbits, ``z(0), z(T/2)`` on the
  real part ``{y = 0}`` (:func:`shoot_brake`);
* multistart surveys that report the smallest action found.  A survey is an
  upper estimate of the minimal action, never a certificate.

Shooting integrates ``dz/dt = J0 grad q(z)`` with fixed-step RK4, batched over
seeds and finite-difference columns so a whole survey advances in one array.
The action of an accepted orbit is computed from its samples alone, as
``1/2 int <-J0 dz/dt, z> dt`` with a spectral derivative, so the identity
``action = T`` on the level ``q = 1`` is a real check.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .domain import EllipsoidTerm, PSymmetry, Radii, apply_j0, apply_p
from .errors import (
    DimensionMismatch,
    InputError,
    NoConvergence,
    SeedNotOnRealPart,
    SingularJacobian,
    StepCountTooSmall,
)
from .hamiltonians import GaugeModel, HamiltonianModel, ellipsoid_gauge

__all__ = [
    "STEPS_PER_PERIOD",
    "Trajectory",
    "Characteristic",
    "SurveyResult",
    "ellipsoid_characteristics",
    "integrate_hamiltonian",
    "shoot_p_symmetric",
    "shoot_brake",
    "min_action_survey",
    "min_brake_survey",
]

STEPS_PER_PERIOD = 2048
MIN_STEPS = 16


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energy_drift: float


@dataclass
class Characteristic:
    period: float
    action: float
    times: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)
    symmetry: str = "p-half-period"  # "p-half-period" | "brake" | "none"
    residuals: dict = field(default_factory=dict)
    iterations: int = 0
    provenance: object = None

    @property
    def z0(self) -> np.ndarray:
        return self.samples[0]


@dataclass
class SurveyResult:
    estimate: float
    found: list[Characteristic]
    attempted: int
    converged: int
    note: str = "upper estimate of the minimal action; no global guarantee"


# -- integration -------------------------------------------------------------


def _rk4_flow(H: HamiltonianModel, z0: np.ndarray, T, steps: int, keep: bool = False):
    """RK4 flow over time ``T`` (scalar or per-row) in ``steps`` equal steps."""
    f = H.vector_field
    z = np.array(z0, dtype=float)
    h = np.asarray(T, dtype=float) / steps
    if h.ndim:
        h = h[..., None]
    out = [z] if keep else None
    for _ in range(steps):
        k1 = f(z)
        k2 = f(z + 0.5 * h * k1)
        k3 = f(z + 0.5 * h * k2)
        k4 = f(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if keep:
            out.append(z)
    return np.stack(out) if keep else z


def _midpoint_flow(H: HamiltonianModel, z0, T, steps: int, keep: bool = False,
                   tol: float = 1e-14, max_fp: int = 100):
    f = H.vector_field
    z = np.array(z0, dtype=float)
    h = float(T) / steps
    out = [z] if keep else None
    for _ in range(steps):
        w = z + h * f(z)
        for _ in range(max_fp):
            w_new = z + h * f(0.5 * (z + w))
            if np.max(np.abs(w_new - w)) <= tol * max(1.0, np.max(np.abs(w_new))):
                w = w_new
                break
            w = w_new
        z = w
        if keep:
            out.append(z)
    return np.stack(out) if keep else z


def integrate_hamiltonian(H: HamiltonianModel, z0, T: float, steps: int = STEPS_PER_PERIOD,
                          method: str = "rk4") -> Trajectory:
    """Fixed-step integration of ``dz/dt = J0 grad H(z)``.

    ``method`` is ``"rk4"`` (default) or ``"midpoint"`` (implicit midpoint,
    symplectic).  ``energy_drift`` is ``max |H(z(t)) - H(z0)|``.
    """
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (H.dim,):
        raise DimensionMismatch(f"z0 must have shape ({H.dim},), got {z0.shape}")
    if steps < MIN_STEPS:
        raise StepCountTooSmall(f"need at least {MIN_STEPS} steps, got {steps}")
    if T == 0:
        return Trajectory(np.zeros(1), z0[None, :].copy(), 0.0)
    if method == "rk4":
        states = _rk4_flow(H, z0, T, steps, keep=True)
    elif method == "midpoint":
        states = _midpoint_flow(H, z0, T, steps, keep=True)
    else:
        raise InputError(f"unknown integration method {method!r}")
    energy = H(states)
    return Trajectory(np.linspace(0.0, T, steps + 1), states, float(np.max(np.abs(energy - energy[0]))))


# -- characteristic assembly ---------------------------------------------------


def _spectral_derivative(samples: np.ndarray, T: float) -> np.ndarray:
    S = samples.shape[0]
    omega = 2 * np.pi * np.fft.fftfreq(S, d=T / S)
    if S % 2 == 0:
        omega[S // 2] = 0.0
    return np.fft.ifft(1j * omega[:, None] * np.fft.fft(samples, axis=0), axis=0).real


def _loop_action(samples: np.ndarray, T: float) -> tuple[float, np.ndarray]:
    dz = _spectral_derivative(samples, T)
    integrand = np.sum(-apply_j0(dz) * samples, axis=1)
    return 0.5 * T * float(np.mean(integrand)), dz


def _finish(H, samples, half_end, z0, T, symmetry, sym_residual, closure, richardson, iterations):
    S = samples.shape[0]
    times = np.arange(S) * (T / S)
    act, dz = _loop_action(samples, T)
    ode = float(np.max(np.linalg.norm(dz - H.vector_field(samples), axis=1)))
    energy = float(np.max(np.abs(H(samples) - 1.0)))
    return Characteristic(
        period=float(T), action=act, times=times, samples=samples, symmetry=symmetry,
        residuals={"ode": ode, "symmetry": float(sym_residual), "energy_drift": energy,
                   "closure": float(closure), "richardson": float(richardson),
                   "action_period": abs(act - T) / T},
        iterations=iterations,
    )


def _assemble_p(H, sym: PSymmetry, z0, T, half_steps, iterations=0) -> Characteristic:
    half = _rk4_flow(H, z0, T / 2, half_steps, keep=True)
    fine = _rk4_flow(H, z0, T / 2, 2 * half_steps)
    samples = np.vstack([half[:-1], apply_p(sym, half[:-1])])
    sym_res = np.linalg.norm(half[-1] - apply_p(sym, z0))
    closure = np.linalg.norm(apply_p(sym, half[-1]) - z0)
    return _finish(H, samples, half[-1], z0, T, "p-half-period", sym_res, closure,
                   np.linalg.norm(fine - half[-1]), iterations)


def _tau0(z):
    z = np.array(z, dtype=float)
    n = z.shape[-1] // 2
    z[..., n:] *= -1
    return z


def _assemble_brake(H, z0, T, half_steps, iterations=0) -> Characteristic:
    n = H.dim // 2
    half = _rk4_flow(H, z0, T / 2, half_steps, keep=True)
    fine = _rk4_flow(H, z0, T / 2, 2 * half_steps)
    # z(T/2 + s) = tau0 z(T/2 - s)
    second = _tau0(half[::-1][:-1])
    samples = np.vstack([half[:-1], second])
    sym_res = max(np.linalg.norm(z0[n:]), np.linalg.norm(half[-1][n:]))
    closure = np.linalg.norm(_tau0(half[1]) - _rk4_flow(H, z0, -T / (2 * half_steps), 1))
    return _finish(H, samples, half[-1], z0, T, "brake", sym_res, closure,
                   np.linalg.norm(fine[n:] - half[-1][n:]), iterations)


# -- analytic ellipsoid orbits --------------------------------------------------


def ellipsoid_characteristics(r: Radii, sym: PSymmetry, action_bound: float,
                              samples: int = 256) -> list[Characteristic]:
    """Planar P-symmetric characteristics of ``E(r)`` with action ``<= action_bound``.

    In the plane of axis ``j`` the orbit is the circle of radius ``r_j``
    traversed at angular speed ``2 / r_j^2``; it is P-symmetric with period
    ``m pi r_j^2`` for odd ``m`` (negated axes) or even ``m`` (fixed axes).
    """
    if r.n != sym.n:
        raise DimensionMismatch(f"radii have n={r.n}, symmetry n={sym.n}")
    n = r.n
    q = ellipsoid_gauge(r)
    out = []
    for j in range(1, n + 1):
        rj = r.values[j - 1]
        base = math.pi * rj * rj
        m = 1 if sym.axis_negated(j) else 2
        while m * base <= action_bound * (1 + 1e-12):
            T = m * base
            t = np.arange(samples) * (T / samples)
            w = 2.0 / (rj * rj)
            z = np.zeros((samples, 2 * n))
            z[:, j - 1] = rj * np.cos(w * t)
            z[:, n + j - 1] = rj * np.sin(w * t)
            dz = np.zeros_like(z)
            dz[:, j - 1] = -rj * w * np.sin(w * t)
            dz[:, n + j - 1] = rj * w * np.cos(w * t)
            half = np.zeros(2 * n)
            half[j - 1] = rj * math.cos(w * T / 2)
            half[n + j - 1] = rj * math.sin(w * T / 2)
            act = 0.5 * T * float(np.mean(np.sum(-apply_j0(dz) * z, axis=1)))
            out.append(Characteristic(
                period=T, action=act, times=t, samples=z, symmetry="p-half-period",
                residuals={
                    "ode": float(np.max(np.linalg.norm(dz - q.vector_field(z), axis=1))),
                    "symmetry": float(np.linalg.norm(half - apply_p(sym, z[0]))),
                    "energy_drift": float(np.max(np.abs(q(z) - 1.0))),
                    "closure": 0.0,
                    "action_period": abs(act - T) / T,
                },
                provenance=EllipsoidTerm(m=m, j=j, parity="odd" if m % 2 else "even"),
            ))
            m += 2
    out.sort(key=lambda c: c.action)
    return out


# -- batched Gauss-Newton shooting ---------------------------------------------


def _level_scale(H, z):
    h = H(z)
    if np.any(h <= 0):
        raise InputError("seed has nonpositive energy; cannot rescale to the level set")
    return z / np.sqrt(h)[..., None]


class _Problem:
    """Residual ``F(u)`` for a batch of unknown vectors ``u`` (last axis)."""

    def __init__(self, H, half_steps):
        self.H = H
        self.half_steps = half_steps

    def residual(self, U, ctx):
        raise NotImplementedError

    def unknowns(self, z0, T):
        raise NotImplementedError

    def split(self, U):
        raise NotImplementedError


class _PProblem(_Problem):
    def __init__(self, H, sym, half_steps):
        super().__init__(H, half_steps)
        self.sym = sym
        self.d = H.dim

    def unknowns(self, z0, T):
        return np.concatenate([z0, T[:, None]], axis=1)

    def split(self, U):
        return U[..., : self.d], U[..., self.d]

    def residual(self, U, ctx):
        anchor, tangent = ctx
        z0, T = self.split(U)
        zh = _rk4_flow(self.H, z0, T / 2, self.half_steps)
        mis = zh - apply_p(self.sym, z0)
        energy = self.H(z0) - 1.0
        phase = np.sum(tangent * (z0 - anchor), axis=-1)
        return np.concatenate([mis, energy[..., None], phase[..., None]], axis=-1)

    def converged(self, F, tol):
        return (np.linalg.norm(F[..., : self.d], axis=-1) < tol) & (np.abs(F[..., self.d]) < tol)


class _BrakeProblem(_Problem):
    def __init__(self, H, half_steps):
        super().__init__(H, half_steps)
        self.n = H.dim // 2

    def unknowns(self, z0, T):
        return np.concatenate([z0[:, : self.n], T[:, None]], axis=1)

    def split(self, U):
        x = U[..., : self.n]
        z0 = np.concatenate([x, np.zeros_like(x)], axis=-1)
        return z0, U[..., self.n]

    def residual(self, U, ctx):
        z0, T = self.split(U)
        zh = _rk4_flow(self.H, z0, T / 2, self.half_steps)
        energy = self.H(z0) - 1.0
        return np.concatenate([zh[..., self.n:], energy[..., None]], axis=-1)

    def converged(self, F, tol):
        return (np.linalg.norm(F[..., : self.n], axis=-1) < tol) & (np.abs(F[..., self.n]) < tol)


def _ctx_take(ctx, idx):
    if ctx is None:
        return None
    return tuple(c[idx] for c in ctx)


def _ctx_expand(ctx, k):
    if ctx is None:
        return None
    return tuple(np.repeat(c[:, None, :], k, axis=1) for c in ctx)


def _gauss_newton(problem: _Problem, U0: np.ndarray, ctx, tol: float, max_iter: int,
                  fd_step: float = 1e-7):
    """Batched damped Gauss-Newton; returns final unknowns, residual norms,
    convergence flags and iteration counts."""
    U = np.array(U0, dtype=float)
    B, p = U.shape
    F = problem.residual(U, ctx)
    done = problem.converged(F, tol)
    iters = np.zeros(B, dtype=int)
    singular = np.zeros(B, dtype=bool)
    alive = ~done
    for _ in range(max_iter):
        idx = np.nonzero(alive)[0]
        if idx.size == 0:
            break
        u = U[idx]
        f0 = F[idx]
        c = _ctx_take(ctx, idx)
        steps = fd_step * np.maximum(1.0, np.abs(u))
        pert = np.repeat(u[:, None, :], p + 1, axis=1)
        pert[:, 1:, :] += np.eye(p)[None] * steps[:, None, :]
        Fp = problem.residual(pert, _ctx_expand(c, p + 1))
        J = np.swapaxes((Fp[:, 1:, :] - Fp[:, :1, :]) / steps[:, :, None], 1, 2)
        sv = np.linalg.svd(J, compute_uv=False)
        bad = sv[:, 0] < 1e-14
        singular[idx[bad]] = True
        delta = -(np.linalg.pinv(J, rcond=1e-10) @ f0[..., None])[..., 0]
        # keep the period positive
        T = u[:, -1]
        dT = delta[:, -1]
        shrink = np.where(T + dT < 0.2 * T, 0.8 * T / np.maximum(np.abs(dT), 1e-300), 1.0)
        delta *= np.minimum(shrink, 1.0)[:, None]
        lam = np.ones(idx.size)
        accepted = np.zeros(idx.size, dtype=bool)
        n0 = np.linalg.norm(f0, axis=1)
        new_u = u.copy()
        new_f = f0.copy()
        for _ in range(8):
            todo = np.nonzero(~accepted)[0]
            if todo.size == 0:
                break
            trial = u[todo] + lam[todo, None] * delta[todo]
            ft = problem.residual(trial, _ctx_take(c, todo))
            ok = np.linalg.norm(ft, axis=1) < n0[todo]
            sel = todo[ok]
            new_u[sel], new_f[sel] = trial[ok], ft[ok]
            accepted[sel] = True
            lam[todo[~ok]] *= 0.5
        U[idx], F[idx] = new_u, new_f
        iters[idx] += 1
        conv = problem.converged(new_f, tol)
        done[idx] = conv
        # stalled rows (no decrease) or singular rows stop
        alive[idx] = ~conv & accepted & ~bad
    return U, F, done, iters, singular


def _half_steps(steps_per_period: int) -> int:
    return max(MIN_STEPS, steps_per_period // 2)


COARSE_FACTOR = 4
COARSE_TOL = 1e-6


def _two_stage(make_problem, U0, ctx, tol, max_iter, half_steps):
    """Gauss-Newton on a coarse step grid, then refinement at full resolution.

    The coarse orbit differs from the fine one by the RK4 discretization error,
    so the refinement usually needs one or two iterations.  Rows that fail the
    coarse stage are not refined.
    """
    coarse_steps = max(MIN_STEPS, half_steps // COARSE_FACTOR)
    fine = make_problem(half_steps)
    if coarse_steps == half_steps:
        return fine, *_gauss_newton(fine, U0, ctx, tol, max_iter)
    coarse = make_problem(coarse_steps)
    U, F, ok, iters, singular = _gauss_newton(coarse, U0, ctx, max(tol, COARSE_TOL), max_iter)
    idx = np.nonzero(ok)[0]
    F_out = F.copy()
    ok_out = np.zeros_like(ok)
    if idx.size:
        U2, F2, ok2, it2, sing2 = _gauss_newton(fine, U[idx], _ctx_take(ctx, idx), tol,
                                                max(2, max_iter - int(iters[idx].max())))
        U[idx], F_out[idx], ok_out[idx] = U2, F2, ok2
        iters[idx] += it2
        singular[idx] |= sing2
    return fine, U, F_out, ok_out, iters, singular


def _seed_arrays(H, z0, T):
    z0 = np.atleast_2d(np.asarray(z0, dtype=float))
    if z0.shape[-1] != H.dim:
        raise DimensionMismatch(f"seed must have dimension {H.dim}, got {z0.shape[-1]}")
    T = np.atleast_1d(np.asarray(T, dtype=float)).reshape(-1)
    if np.any(T <= 0):
        raise InputError("trial periods must be positive")
    return z0, np.broadcast_to(T, (z0.shape[0],)).copy()


def _shoot_p_batch(H, sym, z0, T, tol, max_iter, steps_per_period):
    if 2 * sym.n != H.dim:
        raise DimensionMismatch(f"symmetry acts on R^{2 * sym.n}, H on R^{H.dim}")
    z0, T = _seed_arrays(H, z0, T)
    z0 = _level_scale(H, z0)
    tangent = H.vector_field(z0)
    tangent = tangent / np.maximum(np.linalg.norm(tangent, axis=1, keepdims=True), 1e-300)
    U0 = _PProblem(H, sym, 1).unknowns(z0, T)
    prob, U, F, ok, iters, singular = _two_stage(lambda k: _PProblem(H, sym, k), U0, (z0.copy(), tangent),
                                                 tol, max_iter, _half_steps(steps_per_period))
    return prob, U, F, ok, iters, singular


def shoot_p_symmetric(H: GaugeModel, sym: PSymmetry, z0, T: float, *, tol: float = 1e-8,
                      max_iter: int = 40, steps_per_period: int = STEPS_PER_PERIOD) -> Characteristic:
    """Gauss-Newton shooting for ``z(T/2) = P z(0)`` on the level ``H = 1``.

    Unknowns are ``(z0, T)``.  The residual stacks the twist mismatch, the
    energy ``H(z0) - 1`` and the phase condition ``<dz/dt(seed), z0 - seed> = 0``
    that removes the time-shift degeneracy.  A seed off the level set is
    rescaled onto it first (``H`` is 2-homogeneous).
    """
    prob, U, F, ok, iters, singular = _shoot_p_batch(H, sym, z0, T, tol, max_iter, steps_per_period)
    zf, Tf = prob.split(U[0])
    diag = {"residual": float(np.linalg.norm(F[0])), "iterations": int(iters[0]),
            "z0": zf.tolist(), "T": float(Tf)}
    if singular[0] and not ok[0]:
        raise SingularJacobian("shooting Jacobian is numerically zero", diagnostics=diag)
    if not ok[0]:
        raise NoConvergence(f"P-symmetric shooting did not converge (residual {diag['residual']:.3g})",
                            diagnostics=diag)
    return _assemble_p(H, sym, zf, float(Tf), prob.half_steps, int(iters[0]))


def shoot_brake(H: GaugeModel, z0, T: float, *, tol: float = 1e-8, max_iter: int = 40,
                steps_per_period: int = STEPS_PER_PERIOD) -> Characteristic:
    """Shooting for brake orbits: ``z(0)`` and ``z(T/2)`` on ``{y = 0}``.

    These are exactly the closed characteristics with ``z(T - t) = tau0 z(t)``.
    The seed must lie on the real part.
    """
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (H.dim,):
        raise DimensionMismatch(f"seed must have shape ({H.dim},), got {z0.shape}")
    n = H.dim // 2
    if np.linalg.norm(z0[n:]) > 1e-12:
        raise SeedNotOnRealPart(f"seed has y = {z0[n:].tolist()}, expected y = 0")
    return _brake_batch(H, z0[None], [T], tol, max_iter, steps_per_period, raise_single=True)[0]


def _split_float(prob, u):
    z, T = prob.split(u)
    return z, float(T)


def _representatives(periods, ok, rtol=1e-7):
    """One converged row per distinct period (the first in period order)."""
    idx = [i for i in np.argsort(periods) if ok[i]]
    reps = []
    for i in idx:
        if reps and abs(periods[i] - periods[reps[-1]]) <= rtol * periods[i]:
            continue
        reps.append(i)
    return reps


def _collect(parts, starts, tol) -> SurveyResult:
    n_ok = sum(k for k, _ in parts)
    chars = [c for _, cs in parts for c in cs if c.residuals["symmetry"] < tol]
    found = _dedupe(chars)
    est = found[0].action if found else math.inf
    return SurveyResult(est, found, starts, n_ok)


def _brake_batch(H, z0, T, tol, max_iter, steps_per_period, raise_single=False, dedupe=False):
    z0, T = _seed_arrays(H, z0, T)
    z0 = _level_scale(H, z0)
    U0 = _BrakeProblem(H, 1).unknowns(z0, T)
    prob, U, F, ok, iters, singular = _two_stage(lambda k: _BrakeProblem(H, k), U0, None,
                                                 tol, max_iter, _half_steps(steps_per_period))
    if raise_single:
        zf, Tf = prob.split(U[0])
        diag = {"residual": float(np.linalg.norm(F[0])), "iterations": int(iters[0]),
                "z0": zf.tolist(), "T": float(Tf)}
        if singular[0] and not ok[0]:
            raise SingularJacobian("brake shooting Jacobian is numerically zero", diagnostics=diag)
        if not ok[0]:
            raise NoConvergence(f"brake shooting did not converge (residual {diag['residual']:.3g})",
                                diagnostics=diag)
    rows = _representatives(U[:, -1], ok) if dedupe else np.nonzero(ok)[0]
    out = [_assemble_brake(H, *_split_float(prob, U[i]), prob.half_steps, int(iters[i])) for i in rows]
    return (out, int(ok.sum())) if dedupe else out


# -- surveys ------------------------------------------------------------------


def _axis_periods(H: HamiltonianModel):
    """Circle-period estimates ``pi rho_k^2`` from the gauge's value on each x-axis."""
    n = H.dim // 2
    e = np.eye(H.dim)[:n]
    rho2 = 1.0 / H(e)
    return math.pi * rho2


def _quasi_random_directions(count: int, dim: int, seed: int):
    if count <= 0:
        return np.zeros((0, dim))
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    u = sampler.random(count)
    from scipy.special import ndtri

    z = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _p_seeds(H, sym: PSymmetry, starts: int, seed: int):
    n = sym.n
    base = _axis_periods(H)
    ladder = []
    for k in range(n):
        mults = (1, 3) if sym.axis_negated(k + 1) else (2, 4)
        ladder.extend((m * base[k], k) for m in mults)
    ladder.sort()
    dirs = _quasi_random_directions(starts, H.dim, seed)
    weights = qmc.Halton(d=2, scramble=True, seed=seed + 1).random(max(starts, 1))
    Z, T = [], []
    for i in range(starts):
        period, k = ladder[i % len(ladder)]
        phi = 2 * math.pi * weights[i, 0]
        plane = np.zeros(H.dim)
        plane[k], plane[n + k] = math.cos(phi), math.sin(phi)
        plane /= math.sqrt(H(plane))
        w = 0.6 * weights[i, 1]
        rand = dirs[i] / math.sqrt(H(dirs[i]))
        Z.append((1 - w) * plane + w * rand)
        T.append(period)
    return np.array(Z), np.array(T)


def _dedupe(chars: list[Characteristic], rtol=1e-7) -> list[Characteristic]:
    chars = sorted(chars, key=lambda c: c.action)
    out: list[Characteristic] = []
    for c in chars:
        if out and abs(c.action - out[-1].action) <= rtol * c.action:
            continue
        out.append(c)
    return out


def _run_chunks(fn, Z, T, threads):
    if threads <= 1 or len(Z) <= 1:
        return fn(Z, T)
    chunks = np.array_split(np.arange(len(Z)), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda ix: fn(Z[ix], T[ix]), [c for c in chunks if c.size]))
    return [c for part in parts for c in part]


def min_action_survey(H: GaugeModel, sym: PSymmetry, starts: int = 64, budget: int = 40, *,
                      tol: float = 1e-8, steps_per_period: int = STEPS_PER_PERIOD,
                      seed: int = 0, threads: int = 1) -> SurveyResult:
    """Multistart P-symmetric shooting; ``estimate`` is the smallest action found.

    Seeds mix a point of each coordinate plane on the level set with a
    quasi-random direction; trial periods run over odd (negated planes) or even
    (fixed planes) multiples of the planes' circle-period estimates.  ``budget``
    caps the Gauss-Newton iterations per start.
    """
    if starts <= 0:
        return SurveyResult(math.inf, [], 0, 0)

    def run(Z, T):
        prob, U, F, ok, iters, _ = _shoot_p_batch(H, sym, Z, T, tol, budget, steps_per_period)
        reps = _representatives(U[:, -1], ok)
        out = [_assemble_p(H, sym, *_split_float(prob, U[i]), prob.half_steps, int(iters[i])) for i in reps]
        return [(int(ok.sum()), out)]

    Z, T = _p_seeds(H, sym, starts, seed)
    return _collect(_run_chunks(run, Z, T, threads), starts, tol)


def min_brake_survey(H: GaugeModel, starts: int = 32, budget: int = 40, *, tol: float = 1e-8,
                     steps_per_period: int = STEPS_PER_PERIOD, seed: int = 0,
                     threads: int = 1) -> SurveyResult:
    """Multistart brake shooting from seeds on ``{y = 0} ∩ {H = 1}``."""
    if starts <= 0:
        return SurveyResult(math.inf, [], 0, 0)
    n = H.dim // 2
    base = _axis_periods(H)
    ladder = sorted((m * base[k], k) for k in range(n) for m in (1, 2))
    dirs = _quasi_random_directions(starts, n, seed)
    w = qmc.Halton(d=1, scramble=True, seed=seed + 1).random(starts)[:, 0] * 0.6
    Z, T = [], []
    for i in range(starts):
        period, k = ladder[i % len(ladder)]
        x = (1 - w[i]) * np.eye(n)[k] + w[i] * dirs[i]
        z = np.concatenate([x, np.zeros(n)])
        Z.append(z / math.sqrt(H(z)))
        T.append(period)
    Z, T = np.array(Z), np.array(T)

    def run(Zc, Tc):
        chars, n_ok = _brake_batch(H, Zc, Tc, tol, budget, steps_per_period, dedupe=True)
        return [(n_ok, chars)]

    return _collect(_run_chunks(run, Z, T, threads), starts, tol)
