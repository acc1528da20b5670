"""Core geometric types: radii, the diagonal involution P, and action values.

Coordinates on R^{2n} are ordered ``(x_1, ..., x_n, y_1, ..., y_n)`` and the
complex structure is ``J0 (x, y) = (-y, x)``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, KappaOutOfRange, LengthZero, NonPositiveRadius

__all__ = [
    "DEFAULT_TOL",
    "default_tol",
    "Radii",
    "PSymmetry",
    "EllipsoidTerm",
    "PolydiscTerm",
    "BidiskCos",
    "BidiskRound",
    "ActionValue",
    "validate_radii",
    "apply_p",
    "apply_j0",
    "j0_matrix",
]

DEFAULT_TOL = 1e-12

PiMultiple = Union[Fraction, float]


def default_tol() -> float:
    """Relative tolerance for float comparisons; ``SYMCAP_TOL`` overrides it."""
    raw = os.environ.get("SYMCAP_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    tol = float(raw)
    if not (tol > 0 and math.isfinite(tol)):
        raise ValueError(f"SYMCAP_TOL must be a positive finite number, got {raw!r}")
    return tol


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    # decimal reading of a float: 0.1 -> 1/10, not the binary expansion
    return Fraction(repr(float(v)))


@dataclass(frozen=True)
class Radii:
    """Positive semiaxes ``r_1..r_n``; ``squares`` holds exact ``r_j^2`` in exact mode."""

    values: tuple[float, ...]
    squares: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if len(self.values) == 0:
            raise LengthZero("radii must contain at least one entry")
        for i, v in enumerate(self.values, start=1):
            if not (math.isfinite(v) and v > 0):
                raise NonPositiveRadius(f"r{i} = {v!r} is not a positive finite number")
        if self.squares is not None:
            if len(self.squares) != len(self.values):
                raise DimensionMismatch("exact squares and radii differ in length")
            for i, s in enumerate(self.squares, start=1):
                if s <= 0:
                    raise NonPositiveRadius(f"r{i}^2 = {s} is not positive")

    @classmethod
    def from_squares(cls, squares: Sequence) -> Radii:
        sq = tuple(_to_fraction(s) for s in squares)
        if not sq:
            raise LengthZero("radii must contain at least one entry")
        for i, s in enumerate(sq, start=1):
            if s <= 0:
                raise NonPositiveRadius(f"r{i}^2 = {s} is not positive")
        return cls(tuple(math.sqrt(float(s)) for s in sq), sq)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return self.squares is not None

    def square(self, j: int) -> PiMultiple:
        """``r_j^2`` for the 1-based axis index ``j`` (Fraction in exact mode)."""
        if self.squares is not None:
            return self.squares[j - 1]
        return self.values[j - 1] ** 2

    def all_squares(self) -> tuple:
        return tuple(self.square(j) for j in range(1, self.n + 1))

    def scaled(self, lam) -> Radii:
        if self.squares is not None and isinstance(lam, (int, Rational, Fraction)):
            lam = Fraction(lam)
            return Radii(tuple(abs(float(lam)) * v for v in self.values),
                         tuple(lam * lam * s for s in self.squares))
        lam = float(lam)
        return Radii(tuple(abs(lam) * v for v in self.values))

    def as_float(self) -> Radii:
        return Radii(self.values)

    def __len__(self):
        return self.n


def validate_radii(values: Sequence | None, exact=None) -> Radii:
    """Build :class:`Radii` from raw input.

    ``exact`` may be ``None``/``False`` (float mode), ``True`` (read each
    radius as a decimal rational and square it exactly) or a sequence of
    exact squares ``r_j^2``.  With an explicit sequence of squares,
    ``values`` may be ``None``.
    """
    if exact is not None and exact is not False and exact is not True:
        radii = Radii.from_squares(exact)
        if values is not None:
            vals = tuple(float(v) for v in values)
            if len(vals) != radii.n:
                raise DimensionMismatch("radii and exact squares differ in length")
            for i, (v, s) in enumerate(zip(vals, radii.values), start=1):
                if not math.isclose(v, s, rel_tol=1e-9):
                    raise DimensionMismatch(f"r{i} = {v} does not match sqrt of its exact square")
        return radii
    if values is None:
        raise LengthZero("no radii given")
    raw = list(values)
    if not raw:
        raise LengthZero("radii must contain at least one entry")
    vals = []
    for i, v in enumerate(raw, start=1):
        try:
            fv = float(v)
        except (TypeError, ValueError) as exc:
            raise NonPositiveRadius(f"r{i} = {v!r} is not a number") from exc
        if not (math.isfinite(fv) and fv > 0):
            raise NonPositiveRadius(f"r{i} = {v!r} is not a positive finite number")
        vals.append(fv)
    if exact:
        fr = [_to_fraction(v) for v in raw]
        return Radii(tuple(vals), tuple(f * f for f in fr))
    return Radii(tuple(vals))


@dataclass(frozen=True)
class PSymmetry:
    """``P = diag(-I_{n-k}, I_k, -I_{n-k}, I_k)`` for ``k = kappa``."""

    n: int
    kappa: int

    def __post_init__(self):
        if self.n < 1:
            raise LengthZero("n must be at least 1")
        if not (0 <= self.kappa <= self.n):
            raise KappaOutOfRange(f"kappa = {self.kappa} outside [0, {self.n}]")

    @property
    def proper(self) -> bool:
        return self.kappa < self.n

    def require_proper(self, what="this operation"):
        if not self.proper:
            raise KappaOutOfRange(f"{what} requires kappa < n (got kappa = n = {self.n})")

    def axis_negated(self, j: int) -> bool:
        """True if the 1-based axis ``j`` (plane ``(x_j, y_j)``) is negated by P."""
        return j <= self.n - self.kappa

    def signs(self) -> np.ndarray:
        half = np.concatenate([-np.ones(self.n - self.kappa), np.ones(self.kappa)])
        return np.concatenate([half, half])

    def matrix(self) -> np.ndarray:
        return np.diag(self.signs())

    def negated_mask(self) -> np.ndarray:
        return self.signs() < 0

    def fixed_mask(self) -> np.ndarray:
        return self.signs() > 0


def apply_p(sym: PSymmetry, v) -> np.ndarray:
    """Apply P along the last axis of ``v``."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2 * sym.n:
        raise DimensionMismatch(f"expected last dimension {2 * sym.n}, got shape {arr.shape}")
    return arr * sym.signs()


def apply_j0(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] % 2:
        raise DimensionMismatch(f"J0 needs an even last dimension, got shape {arr.shape}")
    n = arr.shape[-1] // 2
    return np.concatenate([-arr[..., n:], arr[..., :n]], axis=-1)


def j0_matrix(n: int) -> np.ndarray:
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


# -- provenance descriptors ------------------------------------------------


def _fmt_pi_multiple(c: PiMultiple) -> str:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return f"{c.numerator}*pi"
        return f"{c.numerator}/{c.denominator}*pi"
    return f"{c!r}*pi"


@dataclass(frozen=True)
class EllipsoidTerm:
    m: int
    j: int
    parity: str

    def expression(self) -> str:
        return f"{self.m}*pi*r{self.j}^2"


@dataclass(frozen=True)
class PolydiscTerm:
    """``m*pi*rhat^2`` (group ``hat``) or ``m*pi*rprime^2`` (group ``prime``).

    ``j`` is the axis attaining the minimum that defines ``rhat``/``rprime``.
    """

    m: int
    group: str
    j: int

    def expression(self) -> str:
        return f"{self.m}*pi*r{self.j}^2"


@dataclass(frozen=True)
class BidiskCos:
    """``2n cos(theta_{k,n})`` from the cosine family of the Lagrangian bidisk."""

    n: int
    k: int

    @property
    def theta_over_pi(self) -> Fraction:
        if self.n % 2:
            return Fraction(2 * self.k - 1, 2 * self.n)
        return Fraction(self.k, self.n)

    def expression(self) -> str:
        t = self.theta_over_pi
        if t == 0:
            return f"{2 * self.n}"
        return f"{2 * self.n}*cos({t.numerator}*pi/{t.denominator})"


@dataclass(frozen=True)
class BidiskRound:
    n: int

    def expression(self) -> str:
        return f"{2 * self.n}*pi"


Term = Union[EllipsoidTerm, PolydiscTerm, BidiskCos, BidiskRound]


@dataclass(frozen=True)
class ActionValue:
    """One element of an action spectrum.

    ``numeric`` is in absolute units (pi included).  ``pi_multiple`` is the
    value divided by pi when that is meaningful (exact Fraction in exact
    mode, float otherwise, ``None`` for the bidisk cosine family).
    """

    numeric: float
    provenance: tuple = field(default=())
    multiplicity: int = 1
    pi_multiple: PiMultiple | None = None

    def __post_init__(self):
        if not self.numeric > 0:
            raise ValueError(f"action values are positive, got {self.numeric}")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")

    @property
    def exact(self) -> bool:
        return isinstance(self.pi_multiple, Fraction)

    def expression(self) -> str:
        """Symbolic form of the value, e.g. ``3*pi*r1^2`` or ``6*cos(1*pi/6)``."""
        if self.provenance:
            return self.provenance[0].expression()
        if self.pi_multiple is not None:
            return _fmt_pi_multiple(self.pi_multiple)
        return repr(self.numeric)

    def exact_value(self) -> str | None:
        """The value as a rational multiple of pi (``"9/4*pi"``) in exact mode."""
        if self.exact:
            return _fmt_pi_multiple(self.pi_multiple)
        return None

    def __float__(self):
        return self.numeric
