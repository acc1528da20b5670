"""Action spectrum of the Lagrangian bidisk ``D^2 x_L D^2`` and certified
interval intersections.

The cosine family ``2n cos(theta)``, ``theta in J_n``, is reindexed as
``2n sin(c pi / n)`` with ``c = n/2 - k`` (n even) or ``c = (n+1)/2 - k``
(n odd), so ``1 <= c <= n // 2``.  For fixed ``c`` the values increase in
``n >= 2c`` from ``4c`` towards ``2 c pi``.  That monotonicity is the tail
certificate: a family can be abandoned as soon as it leaves ``[lo, hi)``,
except when its limit ``2 c pi`` lies in ``(lo, hi]``, in which case the
intersection is infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .capacities import capacity_ball
from .domain import ActionValue, BidiskCos, BidiskRound, PSymmetry
from .errors import InputError

__all__ = [
    "DEFAULT_NMAX",
    "GUARD",
    "BidiskSpectrumQuery",
    "IntersectionResult",
    "LagReport",
    "bidisk_spectrum_values",
    "bidisk_interval_intersection",
    "verify_lag_report",
    "CP1_UPPER",
    "CP2_UPPER",
]

DEFAULT_NMAX = 10_000
GUARD = 1e-9
MERGE_TOL = 1e-12

# upper bounds for c_P^1 and c_P^2 of the bidisk under P = diag(-1, 1, -1, 1)
CP1_UPPER = 4 * math.pi * (math.sqrt(41) - 4) / 5
CP2_UPPER = 4 * math.pi * (math.sqrt(109) - 7) / 5


def _k_from_c(n: int, c: int) -> int:
    return n // 2 - c if n % 2 == 0 else (n + 1) // 2 - c


def _cos_term(n: int, c: int) -> BidiskCos:
    return BidiskCos(n=n, k=_k_from_c(n, c))


def _family_values(c: int, ns: np.ndarray) -> np.ndarray:
    return 2.0 * ns * np.sin(c * np.pi / ns)


def _merge(raw: list[tuple[float, object]]) -> list[ActionValue]:
    raw.sort(key=lambda t: t[0])
    out: list[ActionValue] = []
    group: list[tuple[float, object]] = []

    def flush():
        if group:
            v0 = group[0][0]
            pi_mult = None
            terms = tuple(t for _, t in group)
            if all(isinstance(t, BidiskRound) for t in terms):
                pi_mult = float(2 * terms[0].n)
            out.append(ActionValue(numeric=v0, provenance=terms, multiplicity=len(group),
                                   pi_multiple=pi_mult))
            group.clear()

    for v, t in raw:
        if group and v > group[0][0] * (1 + MERGE_TOL):
            flush()
        group.append((v, t))
    flush()
    return out


def bidisk_spectrum_values(n_max: int, max_value: float | None = None) -> list[ActionValue]:
    """All ``2n cos(theta)`` (``theta in J_n``) and ``2 n pi`` for ``n <= n_max``, sorted.

    Coincident values from different ``(n, k)`` are merged with combined
    provenance.  ``max_value`` truncates the listing.
    """
    if n_max < 1:
        raise InputError(f"n_max must be >= 1, got {n_max}")
    raw: list[tuple[float, object]] = []
    for n in range(1, n_max + 1):
        v = 2 * n * math.pi
        if max_value is None or v <= max_value:
            raw.append((v, BidiskRound(n)))
    for c in range(1, n_max // 2 + 1):
        if max_value is not None and 4 * c > max_value:
            break
        ns = np.arange(2 * c, n_max + 1)
        vals = _family_values(c, ns)
        # exact values where the sine is 1
        vals[0] = 4.0 * c
        for n, v in zip(ns.tolist(), vals.tolist()):
            if max_value is not None and v > max_value:
                break
            raw.append((v, _cos_term(n, c)))
    return _merge(raw)


@dataclass(frozen=True)
class BidiskSpectrumQuery:
    """Half-open window ``[lo, hi)`` in absolute action units."""

    lo: float
    hi: float
    n_max: int = DEFAULT_NMAX
    certified: bool = True

    def __post_init__(self):
        if not (0 < self.lo < self.hi) or not math.isfinite(self.hi):
            raise InputError(f"need 0 < lo < hi < inf, got [{self.lo}, {self.hi})")
        if self.n_max < 1:
            raise InputError(f"n_max must be >= 1, got {self.n_max}")


@dataclass
class IntersectionResult:
    values: list[ActionValue]
    certified: bool
    accumulation_warning: bool
    boundary_ambiguous: list[ActionValue] = field(default_factory=list)
    accumulation_points: list[float] = field(default_factory=list)

    def numbers(self) -> list[float]:
        return [v.numeric for v in self.values]


def _classify(v: float, lo: float, hi: float, guard: float) -> str:
    """``in``, ``out`` or ``ambiguous`` for half-open ``[lo, hi)`` with a guard band.

    A value that is bit-identical to an endpoint is decided by the half-open
    rule, since the endpoint then is that value's floating-point representation.
    """
    if v == lo:
        return "in"
    if v == hi:
        return "out"
    if abs(v - lo) <= guard or abs(v - hi) <= guard:
        return "ambiguous"
    return "in" if lo < v < hi else "out"


def bidisk_interval_intersection(q: BidiskSpectrumQuery, guard: float = GUARD) -> IntersectionResult:
    lo, hi = q.lo, q.hi
    raw: list[tuple[float, object]] = []
    ambiguous: list[tuple[float, object]] = []
    certified = True
    acc_points = []

    def consider(v, term):
        cls = _classify(v, lo, hi, guard)
        if cls == "in":
            raw.append((v, term))
        elif cls == "ambiguous":
            ambiguous.append((v, term))

    # round family 2 n pi
    n_lo = max(1, math.floor((lo - guard) / (2 * math.pi)))
    n = n_lo
    while True:
        v = 2 * n * math.pi
        if v > hi + guard:
            break
        if n > q.n_max:
            certified = False
            break
        consider(v, BidiskRound(n))
        n += 1

    # cosine families: values in [4c, 2 c pi), increasing in n
    c = 1
    while 4 * c <= hi + guard:
        limit = 2 * c * math.pi
        if limit <= lo:
            # every value of this family is below its limit
            c += 1
            continue
        accumulates = limit <= hi
        if accumulates:
            acc_points.append(limit)
        start = 2 * c
        chunk = 4096
        while start <= q.n_max:
            ns = np.arange(start, min(start + chunk, q.n_max + 1))
            vals = _family_values(c, ns)
            if start == 2 * c:
                vals[0] = 4.0 * c
            near = vals >= lo - guard
            above = vals > hi + guard
            idx = np.nonzero(near & ~above)[0]
            for i in idx.tolist():
                consider(float(vals[i]), _cos_term(int(ns[i]), c))
            if above.any():
                break
            start += chunk
        else:
            certified = False
        c += 1

    values = _merge(raw)
    return IntersectionResult(
        values=values,
        certified=certified and not acc_points,
        accumulation_warning=bool(acc_points),
        boundary_ambiguous=_merge(ambiguous),
        accumulation_points=acc_points,
    )


@dataclass
class LagReport:
    c_P1_interval: tuple[float, float]
    c_P1_candidates: list[ActionValue]
    c_P1_certified: bool
    c_P2_interval: tuple[float, float]
    c_P2_candidates: list[ActionValue]
    c_P2_certified: bool
    c_EH_members: dict
    lower_bound_cP2: float

    def ok(self) -> bool:
        p2 = sorted(v.numeric for v in self.c_P2_candidates)
        return (
            self.c_P2_certified
            and self.c_P1_certified
            and len(p2) == 2
            and math.isclose(p2[0], 2 * math.pi, rel_tol=1e-12)
            and math.isclose(p2[1], 8.0, rel_tol=1e-12)
            and all(self.c_EH_members.values())
            and math.isclose(self.lower_bound_cP2, 2 * math.pi, rel_tol=1e-12)
        )


def verify_lag_report(n_max: int = DEFAULT_NMAX) -> LagReport:
    """Reproduce the bidisk brackets for ``P = diag(-1, 1, -1, 1)``."""
    r2 = bidisk_interval_intersection(BidiskSpectrumQuery(2 * math.pi, CP2_UPPER, n_max))
    r1 = bidisk_interval_intersection(BidiskSpectrumQuery(4.0, CP1_UPPER, n_max))
    listing = bidisk_spectrum_values(16, max_value=10.0)
    anchors = {"4": 4.0, "3*sqrt(3)": 3 * math.sqrt(3), "8": 8.0}
    members = {
        name: any(math.isclose(v.numeric, x, rel_tol=1e-12) for v in listing)
        for name, x in anchors.items()
    }
    lower = capacity_ball(2, PSymmetry(2, 1), 1.0, 2).numeric
    return LagReport(
        c_P1_interval=(4.0, CP1_UPPER),
        c_P1_candidates=r1.values,
        c_P1_certified=r1.certified,
        c_P2_interval=(2 * math.pi, CP2_UPPER),
        c_P2_candidates=r2.values,
        c_P2_certified=r2.certified,
        c_EH_members=members,
        lower_bound_cP2=lower,
    )
