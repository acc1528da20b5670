"""Lazy enumeration of the parity-filtered action spectra.

Every spectrum here is a finite union of arithmetic progressions
``{m * pi * b : m = first, first + step, ...}``.  :class:`ActionStream`
merges them with a heap of per-progression cursors, groups coincident values
into one :class:`ActionValue` carrying the merged multiplicity, and caches what
it has produced so that ``d_j`` lookups never re-enumerate.
"""

from __future__ import annotations

import bisect
import copy
import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .domain import (
    ActionValue,
    EllipsoidTerm,
    PolydiscTerm,
    PSymmetry,
    Radii,
    default_tol,
)
from .errors import AmbiguousInFloatMode, DimensionMismatch, InputError, KappaOutOfRange

__all__ = [
    "Progression",
    "ActionStream",
    "sigma_p_stream",
    "sigma_p_prime_stream",
    "eh_stream",
    "nth_value",
    "multiplicity",
]


@dataclass(frozen=True)
class Progression:
    """Multipliers ``first, first + step, ...`` of the base ``pi * base``."""

    base: Fraction | float
    first: int
    step: int
    make_term: Callable[[int], object]

    def key(self, m: int):
        return self.base * m


class ActionStream:
    """Nondecreasing stream of merged spectrum values.

    Iterating yields one :class:`ActionValue` per distinct value.  ``nth(j)``
    indexes the multiplicity-expanded sequence ``d_1 <= d_2 <= ...``.
    Streams are single-consumer; :meth:`copy` snapshots the cursor state.
    """

    def __init__(self, progressions, *, source: str, radii: Radii | None = None,
                 sym: PSymmetry | None = None, exact: bool = False,
                 tol: float | None = None, strict: bool = False,
                 flags: tuple[str, ...] = ()):
        self.progressions = tuple(progressions)
        self.source = source
        self.radii = radii
        self.sym = sym
        self.exact = exact
        self.tol = default_tol() if tol is None else float(tol)
        self.strict = strict
        self.flags = tuple(flags)
        self.ambiguities: list[float] = []
        self._heap = [(p.key(p.first), i, p.first) for i, p in enumerate(self.progressions)]
        heapq.heapify(self._heap)
        self._groups: list[ActionValue] = []
        self._cum: list[int] = []
        self._pos = 0

    def __repr__(self):
        return f"ActionStream(source={self.source!r}, exact={self.exact}, produced={len(self._groups)})"

    # -- production ------------------------------------------------------

    def _pop(self):
        key, i, m = heapq.heappop(self._heap)
        p = self.progressions[i]
        heapq.heappush(self._heap, (p.key(m + p.step), i, m + p.step))
        return key, i, m

    def _produce(self) -> ActionValue:
        key, i, m = self._pop()
        members = [(key, i, m)]
        if self.exact:
            while self._heap[0][0] == key:
                members.append(self._pop())
        else:
            limit = key * (1.0 + self.tol)
            while self._heap[0][0] <= limit:
                members.append(self._pop())
            half = key * (1.0 + self.tol / 2)
            if any(k > half for k, _, _ in members):
                # grouping changes under tolerance halving
                self.ambiguities.append(math.pi * float(key))
                if self.strict:
                    raise AmbiguousInFloatMode(
                        f"values near {math.pi * float(key)!r} group differently at tol/2",
                        [math.pi * float(k) for k, _, _ in members],
                    )
        terms = tuple(self.progressions[j].make_term(mm) for _, j, mm in members)
        value = ActionValue(
            numeric=math.pi * float(key),
            provenance=terms,
            multiplicity=len(members),
            pi_multiple=key,
        )
        self._groups.append(value)
        self._cum.append((self._cum[-1] if self._cum else 0) + value.multiplicity)
        return value

    def _ensure_groups(self, count: int):
        while len(self._groups) < count:
            self._produce()

    def _ensure_expanded(self, j: int):
        while not self._cum or self._cum[-1] < j:
            self._produce()

    # -- access ----------------------------------------------------------

    def __iter__(self) -> Iterator[ActionValue]:
        return self

    def __next__(self) -> ActionValue:
        self._ensure_groups(self._pos + 1)
        value = self._groups[self._pos]
        self._pos += 1
        return value

    def group(self, index: int) -> ActionValue:
        """Distinct value number ``index`` (0-based)."""
        self._ensure_groups(index + 1)
        return self._groups[index]

    def groups(self, count: int) -> list[ActionValue]:
        self._ensure_groups(count)
        return self._groups[:count]

    def nth(self, j: int) -> ActionValue:
        """``d_j``: the j-th entry (1-based) of the multiplicity-expanded sequence."""
        if j < 1:
            raise InputError(f"index j must be >= 1, got {j}")
        self._ensure_expanded(j)
        return self._groups[bisect.bisect_left(self._cum, j)]

    def sequence(self, count: int) -> list[ActionValue]:
        """``[d_1, ..., d_count]`` with repeated values repeated."""
        if count <= 0:
            return []
        self._ensure_expanded(count)
        out = []
        for g in self._groups:
            out.extend([g] * g.multiplicity)
            if len(out) >= count:
                break
        return out[:count]

    def up_to(self, bound: float) -> list[ActionValue]:
        """All distinct values with ``numeric <= bound``."""
        out = []
        i = 0
        while True:
            g = self.group(i)
            if g.numeric > bound:
                return out
            out.append(g)
            i += 1

    def first(self) -> ActionValue:
        return self.group(0)

    def copy(self) -> ActionStream:
        clone = copy.copy(self)
        clone._heap = list(self._heap)
        clone._groups = list(self._groups)
        clone._cum = list(self._cum)
        clone.ambiguities = list(self.ambiguities)
        return clone

    # -- multiplicity ----------------------------------------------------

    def count_generators(self, value, tol: float | None = None) -> int:
        """Number of generator pairs ``(m, progression)`` hitting ``value``.

        ``value`` is an absolute action (float), an exact multiple of pi
        (``Fraction``), or an :class:`ActionValue`.
        """
        tol = self.tol if tol is None else float(tol)
        target = value
        if isinstance(value, ActionValue):
            target = value.pi_multiple if value.pi_multiple is not None else value.numeric / math.pi
        elif not isinstance(value, Fraction):
            target = float(value) / math.pi
        if not target > 0:
            raise InputError(f"value must be positive, got {value!r}")

        if self.exact and isinstance(target, Fraction):
            count = 0
            for p in self.progressions:
                q = target / p.base
                if q.denominator == 1 and q >= p.first and (q - p.first) % p.step == 0:
                    count += 1
            return count

        target = float(target)

        def hits(t):
            c = 0
            for p in self.progressions:
                base = float(p.base)
                m = round(target / base)
                if m < p.first or (m - p.first) % p.step:
                    continue
                if abs(m * base - target) <= t * target:
                    c += 1
            return c

        full, half = hits(tol), hits(tol / 2)
        if full != half:
            raise AmbiguousInFloatMode(
                f"multiplicity of {math.pi * target!r} is {full} at tol={tol:g} but {half} at tol={tol / 2:g}"
            )
        return full


def _check_dims(r: Radii, sym: PSymmetry):
    if r.n != sym.n:
        raise DimensionMismatch(f"radii have n={r.n} entries but the symmetry has n={sym.n}")


def _ellipsoid_progression(r: Radii, j: int, first: int, step: int) -> Progression:
    def term(m, j=j):
        return EllipsoidTerm(m=m, j=j, parity="odd" if m % 2 else "even")

    return Progression(base=r.square(j), first=first, step=step, make_term=term)


def sigma_p_stream(r: Radii, sym: PSymmetry, *, tol: float | None = None,
                   strict: bool = False) -> ActionStream:
    """Odd multiples of ``pi r_j^2`` for negated axes, even multiples for fixed axes."""
    _check_dims(r, sym)
    if not sym.proper:
        raise KappaOutOfRange("sigma_P(r) is only defined for kappa < n")
    progs = [
        _ellipsoid_progression(r, j, 1 if sym.axis_negated(j) else 2, 2)
        for j in range(1, r.n + 1)
    ]
    return ActionStream(progs, source="ellipsoid-P", radii=r, sym=sym,
                        exact=r.exact, tol=tol, strict=strict)


def _argmin_square(r: Radii, axes) -> int:
    return min(axes, key=lambda j: (r.square(j), j))


def sigma_p_prime_stream(r: Radii, sym: PSymmetry, *, tol: float | None = None,
                         strict: bool = False) -> ActionStream:
    """Odd multiples of ``pi rhat^2`` merged with even multiples of ``pi rprime^2``.

    With ``kappa = 0`` the second family is empty; the stream then carries the
    flag ``"extrapolated-kappa0"``.
    """
    _check_dims(r, sym)
    if not sym.proper:
        raise KappaOutOfRange("sigma'_P(r) needs at least one negated axis (kappa < n)")
    n, k = sym.n, sym.kappa
    j_hat = _argmin_square(r, range(1, n - k + 1))
    progs = [Progression(base=r.square(j_hat), first=1, step=2,
                         make_term=lambda m, j=j_hat: PolydiscTerm(m=m, group="hat", j=j))]
    flags = ()
    if k >= 1:
        j_prime = _argmin_square(r, range(n - k + 1, n + 1))
        progs.append(Progression(base=r.square(j_prime), first=2, step=2,
                                 make_term=lambda m, j=j_prime: PolydiscTerm(m=m, group="prime", j=j)))
    else:
        flags = ("extrapolated-kappa0",)
    return ActionStream(progs, source="polydisc-P", radii=r, sym=sym,
                        exact=r.exact, tol=tol, strict=strict, flags=flags)


def eh_stream(r: Radii, *, tol: float | None = None, strict: bool = False) -> ActionStream:
    """All positive multiples ``m pi r_j^2`` (classical Ekeland-Hofer spectrum of E(r))."""
    progs = [_ellipsoid_progression(r, j, 1, 1) for j in range(1, r.n + 1)]
    return ActionStream(progs, source="ellipsoid-EH", radii=r, exact=r.exact,
                        tol=tol, strict=strict)


def nth_value(s: ActionStream, j: int) -> ActionValue:
    return s.nth(j)


def multiplicity(s: ActionStream, value, tol: float | None = None) -> int:
    return s.count_generators(value, tol)
