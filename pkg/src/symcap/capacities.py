"""P-symmetric capacities of ellipsoids, polydiscs and balls, and the
monotonicity-based embedding obstruction.

Values are realized through the closed forms: ``c_P^j(E(r)) = d_j(sigma_P(r))``
and ``c_P^j(D(r)) = d_j(sigma'_P(r))``.  The minimax definition itself is not
computed anywhere in this package.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .domain import ActionValue, EllipsoidTerm, PSymmetry, Radii, default_tol, validate_radii
from .errors import DimensionMismatch, InputError, KappaOutOfRange, MixedSymmetry, UnsupportedKind
from .spectrum import ActionStream, eh_stream, sigma_p_prime_stream, sigma_p_stream

__all__ = [
    "Kind",
    "DomainSpec",
    "ObstructionVerdict",
    "RelatedCapacities",
    "capacity_ellipsoid",
    "capacity_polydisc",
    "capacity_ball",
    "ball_table",
    "capacity_sequence",
    "related_capacities",
    "embedding_obstruction",
]

DEFAULT_DEPTH = 64


class Kind(str, enum.Enum):
    ELLIPSOID = "ellipsoid"
    POLYDISC = "polydisc"
    BALL = "ball"
    LAGRANGIAN_BIDISK = "bidisk"


@dataclass(frozen=True)
class DomainSpec:
    kind: Kind
    sym: PSymmetry
    radii: Radii | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Kind.LAGRANGIAN_BIDISK:
            if self.sym.n != 2:
                raise DimensionMismatch("the Lagrangian bidisk lives in R^4 (n = 2)")
            if self.radii is not None:
                raise InputError("the Lagrangian bidisk takes no radii")
            return
        if self.radii is None:
            raise InputError(f"{kind.value} needs radii")
        if kind is Kind.BALL:
            if self.radii.n != 1:
                raise InputError("a ball stores a single radius")
        elif self.radii.n != self.sym.n:
            raise DimensionMismatch(f"{kind.value} has {self.radii.n} radii but n = {self.sym.n}")

    @classmethod
    def ellipsoid(cls, radii, kappa: int, exact=None) -> DomainSpec:
        r = radii if isinstance(radii, Radii) else validate_radii(radii, exact)
        return cls(Kind.ELLIPSOID, PSymmetry(r.n, kappa), r)

    @classmethod
    def polydisc(cls, radii, kappa: int, exact=None) -> DomainSpec:
        r = radii if isinstance(radii, Radii) else validate_radii(radii, exact)
        return cls(Kind.POLYDISC, PSymmetry(r.n, kappa), r)

    @classmethod
    def ball(cls, n: int, kappa: int, radius, exact=None) -> DomainSpec:
        r = radius if isinstance(radius, Radii) else validate_radii([radius], exact)
        return cls(Kind.BALL, PSymmetry(n, kappa), r)

    @classmethod
    def bidisk(cls, kappa: int = 1) -> DomainSpec:
        return cls(Kind.LAGRANGIAN_BIDISK, PSymmetry(2, kappa))

    def full_radii(self) -> Radii:
        """Radii of the ellipsoid/polydisc; for a ball, the radius repeated n times."""
        if self.kind is Kind.BALL:
            r = self.radii
            return Radii(r.values * self.sym.n, None if r.squares is None else r.squares * self.sym.n)
        return self.radii


class Status(str, enum.Enum):
    OBSTRUCTED = "Obstructed"
    COMPATIBLE = "Compatible"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ObstructionVerdict:
    status: Status
    checked_up_to: int
    witness: int | None = None
    values: tuple[ActionValue, ActionValue] | None = None

    def __post_init__(self):
        if self.status is Status.OBSTRUCTED and (self.witness is None or self.values is None):
            raise ValueError("an Obstructed verdict needs a witness index and the compared values")


@dataclass(frozen=True)
class RelatedCapacities:
    c_P_1: ActionValue
    c_EH_1: ActionValue | None = None
    c_EHZ_P: float | None = None
    sources: dict = field(default_factory=dict)


def _require_index(j: int):
    if j < 1:
        raise InputError(f"capacity index j must be >= 1, got {j}")


def capacity_ellipsoid(r: Radii, sym: PSymmetry, j: int, *, tol: float | None = None) -> ActionValue:
    _require_index(j)
    return sigma_p_stream(r, sym, tol=tol).nth(j)


def capacity_polydisc(r: Radii, sym: PSymmetry, j: int, *, tol: float | None = None) -> ActionValue:
    """``d_j(sigma'_P(r))``.  For ``kappa = 0`` only the odd family over ``rhat``
    exists; the result is then an extrapolation (see :func:`sigma_p_prime_stream`)."""
    _require_index(j)
    return sigma_p_prime_stream(r, sym, tol=tol).nth(j)


def ball_table(n: int, kappa: int, j: int) -> int:
    """Multiple of pi in ``c_P^j(B^{2n}(1))``.

    Block ``b = (j-1) // n`` of the sequence holds ``n - kappa`` copies of
    ``(2b+1)`` followed by ``kappa`` copies of ``(2b+2)``.
    """
    if not 0 <= kappa < n:
        raise KappaOutOfRange(f"kappa = {kappa} must satisfy 0 <= kappa < n = {n}")
    _require_index(j)
    block, pos = divmod(j - 1, n)
    return 2 * block + (1 if pos < n - kappa else 2)


def capacity_ball(n: int, sym: PSymmetry, R, j: int) -> ActionValue:
    """``c_P^j(B^{2n}(R)) = R^2 c_P^j(B^{2n}(1))`` from the piecewise table."""
    if sym.n != n:
        raise DimensionMismatch(f"symmetry has n = {sym.n}, ball has n = {n}")
    sym.require_proper("capacity_ball")
    r = R if isinstance(R, Radii) else validate_radii([R])
    if r.n != 1:
        raise InputError("a ball has a single radius")
    m = ball_table(n, sym.kappa, j)
    pos = (j - 1) % n
    axis = pos + 1
    coeff = m * r.square(1)
    return ActionValue(
        numeric=math.pi * float(coeff),
        provenance=(EllipsoidTerm(m=m, j=axis, parity="odd" if m % 2 else "even"),),
        multiplicity=(n - sym.kappa) if m % 2 else sym.kappa,
        pi_multiple=coeff,
    )


def _stream_for(d: DomainSpec, tol=None) -> ActionStream:
    if d.kind is Kind.LAGRANGIAN_BIDISK:
        raise UnsupportedKind("no closed-form capacity sequence is known for the Lagrangian bidisk")
    if d.kind is Kind.POLYDISC:
        return sigma_p_prime_stream(d.radii, d.sym, tol=tol)
    return sigma_p_stream(d.full_radii(), d.sym, tol=tol)


def capacity_sequence(d: DomainSpec, count: int, *, tol: float | None = None) -> list[ActionValue]:
    """``[c_P^1(d), ..., c_P^count(d)]``."""
    if d.kind is Kind.BALL:
        return [capacity_ball(d.sym.n, d.sym, d.radii, j) for j in range(1, count + 1)]
    return _stream_for(d, tol).sequence(count)


def related_capacities(d: DomainSpec, *, tol: float | None = None) -> RelatedCapacities:
    """``c_P^1`` together with what the relations give for the other capacities.

    ``c_EH^1`` of an ellipsoid or ball is the first element of the classical
    Ekeland-Hofer spectrum (computed independently of sigma_P).  For a polydisc
    it is reported only when ``kappa = 0``, where it equals ``c_P^1``.
    ``c_EHZ^P`` is never computed on its own: for ``1 <= kappa < n`` it is
    ``c_P^1 / 2``.
    """
    if d.kind is Kind.LAGRANGIAN_BIDISK:
        raise UnsupportedKind("c_P^1 of the Lagrangian bidisk is only bracketed; see symcap.bidisk")
    sym = d.sym
    sym.require_proper("related_capacities")
    c1 = capacity_sequence(d, 1, tol=tol)[0]
    sources = {"c_P_1": "closed form"}
    c_eh = None
    if d.kind in (Kind.ELLIPSOID, Kind.BALL):
        c_eh = eh_stream(d.full_radii(), tol=tol).first()
        sources["c_EH_1"] = "Ekeland-Hofer spectrum of the ellipsoid"
    elif sym.kappa == 0:
        c_eh = c1
        sources["c_EH_1"] = "derived-by-relation"
    c_ehz = None
    if 1 <= sym.kappa < sym.n:
        c_ehz = c1.numeric / 2
        sources["c_EHZ_P"] = "derived-by-relation"
    return RelatedCapacities(c_P_1=c1, c_EH_1=c_eh, c_EHZ_P=c_ehz, sources=sources)


def _greater(a: ActionValue, b: ActionValue, tol: float) -> bool:
    if isinstance(a.pi_multiple, Fraction) and isinstance(b.pi_multiple, Fraction):
        return a.pi_multiple > b.pi_multiple
    return a.numeric > b.numeric * (1.0 + tol)


def embedding_obstruction(a: DomainSpec, b: DomainSpec, J: int = DEFAULT_DEPTH, *,
                          tol: float | None = None) -> ObstructionVerdict:
    """Look for ``j <= J`` with ``c_P^j(a) > c_P^j(b)``.

    Such a ``j`` rules out a P-equivariant symplectomorphism ``h`` with
    ``h(a) ⊂ b``.  Agreement of all ``J`` pairs is only evidence, so the
    verdict is then ``Inconclusive``, never "embeddable".
    """
    if J < 1:
        raise InputError(f"depth J must be >= 1, got {J}")
    if (a.sym.n, a.sym.kappa) != (b.sym.n, b.sym.kappa):
        raise MixedSymmetry(
            f"(n, kappa) differ: {(a.sym.n, a.sym.kappa)} vs {(b.sym.n, b.sym.kappa)}"
        )
    tol = default_tol() if tol is None else tol
    seq_a = capacity_sequence(a, J, tol=tol)
    seq_b = capacity_sequence(b, J, tol=tol)
    for j, (ca, cb) in enumerate(zip(seq_a, seq_b), start=1):
        if _greater(ca, cb, tol):
            return ObstructionVerdict(Status.OBSTRUCTED, checked_up_to=J, witness=j, values=(ca, cb))
    return ObstructionVerdict(Status.INCONCLUSIVE, checked_up_to=J)
