"""Evaluation records and closed forms for the inequality catalog.

Every statement is evaluated into one or more IneqEvaluation records with a
uniform margin convention:

* two sided:      lhs <= center <= rhs   (both margins present)
* one sided upper: lhs <= rhs            (center is None, margin_upper only)
* one sided lower: lhs <= center         (rhs is None, margin_lower only)

`holds` allows a roundoff band of TOL_ABS + TOL_REL * scale below zero, where
`scale` is the product of norms entering the bound, so verdicts are invariant
under rescaling of the inputs.  `near_equality` flags records whose smallest
present margin is within NEAR_EQUALITY_REL * scale of zero; a violated record
is therefore also near equality, which keeps tightness counters monotone.

Conditional statements (the Moore style results) return verdict objects that
carry a premises flag next to the conclusion record; the conclusion is always
evaluated so that vacuous instances remain inspectable.

Instances are fingerprinted with a 64-bit FNV-1a digest over a canonical byte
serialization: field tag, dimension, then every vector argument in signature
order as big-endian float64 coordinate payloads (families get a length prefix,
complexified vectors serialize re then im).  Scalar parameters and the gram
matrix are deliberately not digested; they are part of the run configuration,
not of the sampled instance.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .orthonormal import OrthonormalFamily
from .spaces import (
    ComplexifiedVector,
    DomainError,
    Field,
    SpaceSpec,
    as_vector,
    inner,
    norm,
    require_nonzero,
)

CATALOG_VERSION = "1.0.0"

TOL_ABS = 1e-12
TOL_REL = 1e-9
NEAR_EQUALITY_REL = 1e-9
ROUTE_AGREEMENT_REL = 1e-10
PREMISE_SLACK = 1e-12

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def _coord_bytes(arr: np.ndarray) -> bytes:
    a = np.asarray(arr)
    if np.iscomplexobj(a):
        return a.astype(">c16").tobytes()
    return a.astype(">f8").tobytes()


def digest_inputs(space: SpaceSpec, *parts) -> str:
    """Canonical 16-hex-digit fingerprint of an instance's vector data."""
    chunks = [b"R" if space.field is Field.REAL else b"C", struct.pack(">Q", space.dim)]
    for part in parts:
        if isinstance(part, OrthonormalFamily):
            chunks.append(struct.pack(">Q", part.size))
            chunks.append(_coord_bytes(part.members))
        elif isinstance(part, ComplexifiedVector):
            chunks.append(_coord_bytes(part.re))
            chunks.append(_coord_bytes(part.im))
        else:
            chunks.append(_coord_bytes(part))
    return format(fnv1a_64(b"".join(chunks)), "016x")


# records ---------------------------------------------------------------------


@dataclass(frozen=True)
class IneqEvaluation:
    """One evaluated inequality link; see the module docstring for shapes."""

    ineq: str
    lhs: float
    center: Optional[float]
    rhs: Optional[float]
    margin_lower: Optional[float]
    margin_upper: Optional[float]
    holds: bool
    near_equality: bool
    scale: float

    @property
    def min_margin(self) -> float:
        margins = [m for m in (self.margin_lower, self.margin_upper) if m is not None]
        return min(margins)


def make_evaluation(ineq: str, scale, lhs, center=None, rhs=None) -> IneqEvaluation:
    """Assemble a record, computing margins in the dtype of the inputs."""
    margin_lower = None if center is None else center - lhs
    if rhs is None:
        margin_upper = None
    else:
        margin_upper = rhs - lhs if center is None else rhs - center
    if margin_lower is None and margin_upper is None:
        raise DomainError("an evaluation needs at least one margin")
    margins = [m for m in (margin_lower, margin_upper) if m is not None]
    tol = TOL_ABS + TOL_REL * scale
    holds = bool(all(m >= -tol for m in margins))
    near = bool(min(margins) <= NEAR_EQUALITY_REL * scale)
    return IneqEvaluation(
        ineq=ineq,
        lhs=float(lhs),
        center=None if center is None else float(center),
        rhs=None if rhs is None else float(rhs),
        margin_lower=None if margin_lower is None else float(margin_lower),
        margin_upper=None if margin_upper is None else float(margin_upper),
        holds=holds,
        near_equality=near,
        scale=float(scale),
    )


@dataclass(frozen=True)
class ChainEvaluation:
    """A conjunction of chained links sharing one scale."""

    links: tuple

    @property
    def eval1(self) -> IneqEvaluation:
        return self.links[0]

    @property
    def eval2(self) -> IneqEvaluation:
        return self.links[1]

    @property
    def eval3(self) -> IneqEvaluation:
        return self.links[2]

    @property
    def binding(self) -> IneqEvaluation:
        return min(self.links, key=lambda ev: ev.min_margin / max(ev.scale, 1e-300))


@dataclass(frozen=True)
class MooreParams:
    """Premise parameters; each statement validates the fields it uses."""

    eps: Optional[float] = None
    eps1: Optional[float] = None
    eps2: Optional[float] = None
    delta1: Optional[float] = None
    delta2: Optional[float] = None
    mu1: Optional[float] = None
    mu2: Optional[float] = None


@dataclass(frozen=True)
class MooreVerdict:
    premises_hold: bool
    conclusion: IneqEvaluation

    @property
    def vacuous(self) -> bool:
        return not self.premises_hold


@dataclass(frozen=True)
class PrecupanuMooreVerdict:
    premises_hold: bool
    conclusion: IneqEvaluation
    refinement: IneqEvaluation

    @property
    def vacuous(self) -> bool:
        return not self.premises_hold


@dataclass(frozen=True)
class BuzanoMooreVerdict:
    premises_hold: bool
    conclusion: IneqEvaluation
    in_useful_window: bool

    @property
    def vacuous(self) -> bool:
        return not self.premises_hold


@dataclass(frozen=True)
class QuotientTransferVerdict:
    lower: Optional[MooreVerdict]
    upper: Optional[MooreVerdict]


# shared numeric helpers ------------------------------------------------------


def _require_field(space: SpaceSpec, allowed, what: str):
    if space.field not in allowed:
        raise DomainError(f"{what} is not defined over {space.field.name.lower()} spaces")


def _vec(space, v, name, *, nonzero, extended):
    arr = require_nonzero(space, v, name) if nonzero else as_vector(space, v)
    if extended:
        arr = arr.astype(space.field.extended_dtype)
    return arr


def _gram_matrix(space: SpaceSpec, extended: bool):
    if space.gram is None:
        return None
    if extended:
        return space.gram.astype(space.field.extended_dtype)
    return space.gram


def _family_members(space: SpaceSpec, family, name: str, extended: bool) -> np.ndarray:
    if not isinstance(family, OrthonormalFamily):
        raise DomainError(f"{name} must be an OrthonormalFamily")
    fs = family.space
    if fs.dim != space.dim or fs.field is not space.field:
        raise DomainError(f"family {name} belongs to a different space")
    same_gram = (fs.gram is None and space.gram is None) or (
        fs.gram is not None and space.gram is not None and np.array_equal(fs.gram, space.gram)
    )
    if not same_gram:
        raise DomainError(f"family {name} carries a different gram weighting")
    members = family.members
    if extended:
        members = members.astype(space.field.extended_dtype)
    return members


def _pairings(space, g, x, members):
    """<x, e_i> for every family member, as a 1-d array."""
    gx = x if g is None else x @ g
    return members.conj() @ gx


def _pairings_right(space, g, members, y):
    """<e_i, y> for every family member."""
    gy = np.conj(y) if g is None else g @ np.conj(y)
    return members @ gy


def _cross_matrix(space, g, members_e, members_f):
    """<e_i, f_j> as a (len(E), len(F)) matrix."""
    mf = np.conj(members_f.T) if g is None else g @ np.conj(members_f.T)
    return members_e @ mf


def _complexified_parts(space, z, name, extended):
    if not isinstance(z, ComplexifiedVector):
        raise DomainError(f"{name} must be a ComplexifiedVector")
    re = _vec(space, z.re, f"{name}.re", nonzero=False, extended=extended)
    im = _vec(space, z.im, f"{name}.im", nonzero=False, extended=extended)
    return re, im


def _abs2(value):
    return (value * np.conj(value)).real if np.iscomplexobj(np.asarray(value)) else value * value


# elementary statements -------------------------------------------------------


def eval_schwarz(space: SpaceSpec, x, y, *, extended: bool = False) -> IneqEvaluation:
    """|<x,y>| against ||x|| ||y||; zero vectors are allowed."""
    xx = _vec(space, x, "x", nonzero=False, extended=extended)
    yy = _vec(space, y, "y", nonzero=False, extended=extended)
    lhs = abs(inner(space, xx, yy, extended=extended))
    rhs = norm(space, xx, extended=extended) * norm(space, yy, extended=extended)
    return make_evaluation("schwarz", rhs, lhs, rhs=rhs)


def eval_precupanu(space: SpaceSpec, a, b, x, y, *, extended: bool = False) -> IneqEvaluation:
    """Two-sided bound on the mixed projection sum of a and b onto x and y."""
    _require_field(space, (Field.REAL,), "this statement")
    aa = _vec(space, a, "a", nonzero=False, extended=extended)
    bb = _vec(space, b, "b", nonzero=False, extended=extended)
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    yy = _vec(space, y, "y", nonzero=True, extended=extended)
    nx2 = inner(space, xx, xx, extended=extended)
    ny2 = inner(space, yy, yy, extended=extended)
    xa = inner(space, xx, aa, extended=extended)
    xb = inner(space, xx, bb, extended=extended)
    ya = inner(space, yy, aa, extended=extended)
    yb = inner(space, yy, bb, extended=extended)
    xy = inner(space, xx, yy, extended=extended)
    center = xa * xb / nx2 + ya * yb / ny2 - 2 * xa * yb * xy / (nx2 * ny2)
    na = norm(space, aa, extended=extended)
    nb = norm(space, bb, extended=extended)
    ab = inner(space, aa, bb, extended=extended)
    lhs = (ab - na * nb) / 2
    rhs = (ab + na * nb) / 2
    return make_evaluation("precupanu-1.1", na * nb, lhs, center=center, rhs=rhs)


def eval_richard(space: SpaceSpec, a, b, x, *, extended: bool = False) -> IneqEvaluation:
    """Two-sided bound on <x,a><x,b> along a single direction x."""
    _require_field(space, (Field.REAL,), "this statement")
    aa = _vec(space, a, "a", nonzero=False, extended=extended)
    bb = _vec(space, b, "b", nonzero=False, extended=extended)
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    nx2 = inner(space, xx, xx, extended=extended)
    center = inner(space, xx, aa, extended=extended) * inner(space, xx, bb, extended=extended)
    na = norm(space, aa, extended=extended)
    nb = norm(space, bb, extended=extended)
    ab = inner(space, aa, bb, extended=extended)
    lhs = (ab - na * nb) / 2 * nx2
    rhs = (ab + na * nb) / 2 * nx2
    return make_evaluation("richard-1.3", na * nb * nx2, lhs, center=center, rhs=rhs)


def eval_precupanu_self(space: SpaceSpec, a, x, y, *, extended: bool = False) -> IneqEvaluation:
    """Nonnegative quadratic form of a against the (x, y) pair, capped by ||a||^2."""
    _require_field(space, (Field.REAL,), "this statement")
    aa = _vec(space, a, "a", nonzero=False, extended=extended)
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    yy = _vec(space, y, "y", nonzero=True, extended=extended)
    nx2 = inner(space, xx, xx, extended=extended)
    ny2 = inner(space, yy, yy, extended=extended)
    xa = inner(space, xx, aa, extended=extended)
    ya = inner(space, yy, aa, extended=extended)
    xy = inner(space, xx, yy, extended=extended)
    center = xa * xa / nx2 + ya * ya / ny2 - 2 * xa * ya * xy / (nx2 * ny2)
    na2 = inner(space, aa, aa, extended=extended)
    zero = type(center)(0.0) if not isinstance(center, float) else 0.0
    return make_evaluation("precupanu-self-1.5", na2, zero, center=center, rhs=na2)


def eval_angle_bound(space: SpaceSpec, a, x, y, *, extended: bool = False) -> IneqEvaluation:
    """Lower bound on cos(x, y) from the cosines of x and y against a."""
    _require_field(space, (Field.REAL,), "this statement")
    aa = _vec(space, a, "a", nonzero=True, extended=extended)
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    yy = _vec(space, y, "y", nonzero=True, extended=extended)
    na = norm(space, aa, extended=extended)
    nx = norm(space, xx, extended=extended)
    ny = norm(space, yy, extended=extended)
    ca = inner(space, xx, aa, extended=extended) / (nx * na)
    cb = inner(space, yy, aa, extended=extended) / (ny * na)
    lhs = (ca + cb) ** 2 / 2 - 1.5
    center = inner(space, xx, yy, extended=extended) / (nx * ny)
    return make_evaluation("angle-1.6", 1.0, lhs, center=center)


# conditional statements ------------------------------------------------------


def moore_coefficient(eps: float) -> float:
    """Transfer coefficient for near-parallelism at slack eps; nonincreasing."""
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    return max(1.0 - eps - math.sqrt(2.0 * eps), 1.0 - 4.0 * eps, 0.0)


def verify_moore(space: SpaceSpec, x, y, z, eps: float, *, extended: bool = False) -> MooreVerdict:
    """If y and z are both eps-parallel to x, bound |<y,z>| from below."""
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    yy = _vec(space, y, "y", nonzero=True, extended=extended)
    zz = _vec(space, z, "z", nonzero=True, extended=extended)
    nx = norm(space, xx, extended=extended)
    ny = norm(space, yy, extended=extended)
    nz = norm(space, zz, extended=extended)
    need = 1.0 - eps
    slack_y = PREMISE_SLACK * nx * ny
    slack_z = PREMISE_SLACK * nx * nz
    premises = bool(
        abs(inner(space, xx, yy, extended=extended)) >= need * nx * ny - slack_y
        and abs(inner(space, xx, zz, extended=extended)) >= need * nx * nz - slack_z
    )
    coeff = moore_coefficient(eps)
    scale = ny * nz
    conclusion = make_evaluation("moore-1.9", scale, coeff * scale, center=abs(inner(space, yy, zz, extended=extended)))
    return MooreVerdict(premises, conclusion)


def precupanu_moore_bounds(eps1: float):
    """Two-sided coefficients 2 eps1^2 -+ 1 for the signed-window transfer."""
    if eps1 <= 0:
        raise DomainError("eps1 must be positive")
    return 2.0 * eps1 * eps1 - 1.0, 2.0 * eps1 * eps1 + 1.0


def verify_precupanu_moore(
    space: SpaceSpec, a, b, x, params: MooreParams, *, extended: bool = False
) -> PrecupanuMooreVerdict:
    """Signed cosine window against x transfers to a two-sided bound on <a,b>."""
    _require_field(space, (Field.REAL,), "this statement")
    if params.eps1 is None or params.eps2 is None:
        raise DomainError("eps1 and eps2 are required")
    eps1, eps2 = float(params.eps1), float(params.eps2)
    if eps1 <= 0 or eps2 <= eps1:
        raise DomainError("need 0 < eps1 < eps2")
    aa = _vec(space, a, "a", nonzero=True, extended=extended)
    bb = _vec(space, b, "b", nonzero=True, extended=extended)
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    na = norm(space, aa, extended=extended)
    nb = norm(space, bb, extended=extended)
    nx = norm(space, xx, extended=extended)
    ca = inner(space, xx, aa, extended=extended) / (nx * na)
    cb = inner(space, xx, bb, extended=extended) / (nx * nb)
    premises = bool(
        eps1 - PREMISE_SLACK <= ca <= eps2 + PREMISE_SLACK and eps1 - PREMISE_SLACK <= cb <= eps2 + PREMISE_SLACK
    )
    lo, hi = precupanu_moore_bounds(eps1)
    ab = inner(space, aa, bb, extended=extended)
    scale = na * nb
    conclusion = make_evaluation("precupanu-moore-1.12", scale, lo * scale, center=ab, rhs=hi * scale)
    refinement = make_evaluation("precupanu-moore-1.12", scale, -scale, center=lo * scale, rhs=ab)
    return PrecupanuMooreVerdict(premises, conclusion, refinement)


def eval_buzano(space: SpaceSpec, a, b, x, *, extended: bool = False) -> IneqEvaluation:
    """Modulus bound on <x,a><x,b> along x; valid in both fields."""
    aa = _vec(space, a, "a", nonzero=False, extended=extended)
    bb = _vec(space, b, "b", nonzero=False, extended=extended)
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    nx2 = inner(space, xx, xx, extended=extended).real if space.field is Field.COMPLEX else inner(space, xx, xx, extended=extended)
    lhs = abs(inner(space, xx, aa, extended=extended) * inner(space, xx, bb, extended=extended))
    na = norm(space, aa, extended=extended)
    nb = norm(space, bb, extended=extended)
    rhs = (na * nb + abs(inner(space, aa, bb, extended=extended))) / 2 * nx2
    return make_evaluation("buzano-1.14", na * nb * nx2, lhs, rhs=rhs)


def verify_buzano_moore(space: SpaceSpec, x, a, b, eps: float, *, extended: bool = False) -> BuzanoMooreVerdict:
    """Modulus near-parallelism to x transfers to a lower bound on |<a,b>|."""
    if not 0 < eps <= 1:
        raise DomainError("eps must lie in (0, 1]")
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    aa = _vec(space, a, "a", nonzero=True, extended=extended)
    bb = _vec(space, b, "b", nonzero=True, extended=extended)
    nx = norm(space, xx, extended=extended)
    na = norm(space, aa, extended=extended)
    nb = norm(space, bb, extended=extended)
    need = 1.0 - eps
    premises = bool(
        abs(inner(space, xx, aa, extended=extended)) >= need * nx * na - PREMISE_SLACK * nx * na
        and abs(inner(space, xx, bb, extended=extended)) >= need * nx * nb - PREMISE_SLACK * nx * nb
    )
    coeff = 1.0 - 4.0 * eps + 2.0 * eps * eps
    scale = na * nb
    conclusion = make_evaluation(
        "buzano-moore-1.16", scale, coeff * scale, center=abs(inner(space, aa, bb, extended=extended))
    )
    return BuzanoMooreVerdict(premises, conclusion, eps <= 1.0 - math.sqrt(2.0) / 2.0)


def verify_cosine_transfer(
    space: SpaceSpec, a, x, y, delta1: float, delta2: float, *, extended: bool = False
) -> MooreVerdict:
    """Cosine floors of x and y against a transfer to a cosine floor of (x, y)."""
    _require_field(space, (Field.REAL,), "this statement")
    if not (0 < delta1 <= 1 and 0 < delta2 <= 1):
        raise DomainError("delta1 and delta2 must lie in (0, 1]")
    if delta1 + delta2 < 1:
        raise DomainError("need delta1 + delta2 >= 1")
    aa = _vec(space, a, "a", nonzero=True, extended=extended)
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    yy = _vec(space, y, "y", nonzero=True, extended=extended)
    na = norm(space, aa, extended=extended)
    nx = norm(space, xx, extended=extended)
    ny = norm(space, yy, extended=extended)
    cxa = inner(space, xx, aa, extended=extended) / (nx * na)
    cya = inner(space, yy, aa, extended=extended) / (ny * na)
    premises = bool(cxa >= delta1 - PREMISE_SLACK and cya >= delta2 - PREMISE_SLACK)
    bound = (delta1 + delta2) ** 2 / 2 - 1.5
    center = inner(space, xx, yy, extended=extended) / (nx * ny)
    conclusion = make_evaluation("t1.5-i", 1.0, bound, center=center)
    return MooreVerdict(premises, conclusion)


def verify_quotient_transfer(
    space: SpaceSpec, a, b, x, mu1: Optional[float] = None, mu2: Optional[float] = None, *, extended: bool = False
) -> QuotientTransferVerdict:
    """Floors/caps on <x,a><x,b>/||x||^2 transfer to cosine bounds on (a, b)."""
    _require_field(space, (Field.REAL,), "this statement")
    if mu1 is None and mu2 is None:
        raise DomainError("at least one of mu1, mu2 is required")
    if mu1 is not None and not 0 <= mu1 <= 1:
        raise DomainError("mu1 must lie in [0, 1]")
    if mu2 is not None and not -1 <= mu2 <= 0:
        raise DomainError("mu2 must lie in [-1, 0]")
    aa = _vec(space, a, "a", nonzero=True, extended=extended)
    bb = _vec(space, b, "b", nonzero=True, extended=extended)
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    na = norm(space, aa, extended=extended)
    nb = norm(space, bb, extended=extended)
    nx2 = inner(space, xx, xx, extended=extended)
    quotient = inner(space, xx, aa, extended=extended) * inner(space, xx, bb, extended=extended) / nx2
    cos_ab = inner(space, aa, bb, extended=extended) / (na * nb)
    slack = PREMISE_SLACK * na * nb
    lower = upper = None
    if mu1 is not None:
        premises = bool(quotient >= mu1 * na * nb - slack)
        conclusion = make_evaluation("t1.5-ii", 1.0, 2.0 * mu1 - 1.0, center=cos_ab)
        lower = MooreVerdict(premises, conclusion)
    if mu2 is not None:
        premises = bool(quotient <= mu2 * na * nb + slack)
        conclusion = make_evaluation("t1.5-ii", 1.0, cos_ab, rhs=2.0 * mu2 + 1.0)
        upper = MooreVerdict(premises, conclusion)
    return QuotientTransferVerdict(lower, upper)


# orthonormal-family statements -----------------------------------------------


def _family_core(space, E, F, x, y, extended):
    """Shared sums for the two-family statements.

    Returns (S, <x,y>, ||x||, ||y||, pieces) where S is the bilinear family
    sum and pieces holds the member pairings for reflection reuse.
    """
    g = _gram_matrix(space, extended)
    me = _family_members(space, E, "E", extended)
    mf = _family_members(space, F, "F", extended)
    ce = _pairings(space, g, x, me)
    cf = _pairings(space, g, x, mf)
    cey = _pairings_right(space, g, me, y)
    cfy = _pairings_right(space, g, mf, y)
    cross = _cross_matrix(space, g, me, mf)
    s = ce @ cey + cf @ cfy - 2.0 * (ce @ cross @ cfy)
    xy = inner(space, x, y, extended=extended)
    nx = norm(space, x, extended=extended)
    ny = norm(space, y, extended=extended)
    return s, xy, nx, ny, (me, mf, ce, cfy)


def eval_generalized(space: SpaceSpec, E, F, x, y, *, extended: bool = False) -> IneqEvaluation:
    """Two-family projection sum bound, cross-checked through reflections.

    The direct summation |S - <x,y>/2| and the reflection route
    |<R_E x, R_F y>|/2 are evaluated on every call and must agree to
    ROUTE_AGREEMENT_REL relative to the instance scale; disagreement means a
    coding fault, not a counterexample, and raises immediately.
    """
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    yy = _vec(space, y, "y", nonzero=True, extended=extended)
    s, xy, nx, ny, (me, mf, ce, cfy) = _family_core(space, E, F, xx, yy, extended)
    direct = abs(s - 0.5 * xy)
    u = 2.0 * (ce @ me) - xx
    v = 2.0 * (np.conj(cfy) @ mf) - yy
    other = 0.5 * abs(inner(space, u, v, extended=extended))
    tol = ROUTE_AGREEMENT_REL * max(float(direct), float(other), float(nx * ny))
    if abs(float(direct) - float(other)) > tol:
        raise ArithmeticError(
            f"projection-sum routes disagree: {float(direct)!r} vs {float(other)!r}"
        )
    return make_evaluation("generalized-2.1", nx * ny, direct, rhs=0.5 * nx * ny)


def eval_chain(space: SpaceSpec, E, F, x, y, *, extended: bool = False) -> ChainEvaluation:
    """Two chained caps on |S| through the signed half-pairing midpoint."""
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    yy = _vec(space, y, "y", nonzero=True, extended=extended)
    s, xy, nx, ny, _ = _family_core(space, E, F, xx, yy, extended)
    middle = 0.5 * abs(xy) + abs(s - 0.5 * xy)
    scale = nx * ny
    first = make_evaluation("chain-2.10", scale, abs(s), rhs=middle)
    second = make_evaluation("chain-2.10", scale, middle, rhs=0.5 * (abs(xy) + scale))
    return ChainEvaluation((first, second))


def eval_real_double(space: SpaceSpec, E, F, x, y, *, extended: bool = False) -> IneqEvaluation:
    """Signed two-sided window for the real two-family sum."""
    _require_field(space, (Field.REAL,), "this statement")
    xx = _vec(space, x, "x", nonzero=True, extended=extended)
    yy = _vec(space, y, "y", nonzero=True, extended=extended)
    s, xy, nx, ny, _ = _family_core(space, E, F, xx, yy, extended)
    lhs = 0.5 * (xy - nx * ny)
    rhs = 0.5 * (xy + nx * ny)
    return make_evaluation("real-double-2.14", nx * ny, lhs, center=s, rhs=rhs)


# complexified statements -----------------------------------------------------


def eval_kurepa(space: SpaceSpec, a, z, *, extended: bool = False) -> ChainEvaluation:
    """Quadratic cap for the pairing of a real direction with a complexified z."""
    _require_field(space, (Field.REAL,), "this statement")
    aa = _vec(space, a, "a", nonzero=True, extended=extended)
    zre, zim = _complexified_parts(space, z, "z", extended)
    pa = inner(space, aa, zre, extended=extended)
    pb = inner(space, aa, zim, extended=extended)
    lhs = pa * pa + pb * pb
    na2 = inner(space, aa, aa, extended=extended)
    nre2 = inner(space, zre, zre, extended=extended)
    nim2 = inner(space, zim, zim, extended=extended)
    nz2 = nre2 + nim2
    mixed = inner(space, zre, zim, extended=extended)
    self_pair = np.sqrt((nre2 - nim2) ** 2 + (2.0 * mixed) ** 2)
    middle = 0.5 * na2 * (nz2 + self_pair)
    scale = na2 * nz2
    first = make_evaluation("kurepa-3.2", scale, lhs, rhs=middle)
    second = make_evaluation("kurepa-3.2", scale, middle, rhs=na2 * nz2)
    return ChainEvaluation((first, second))


def eval_kurepa_refined(space: SpaceSpec, E, F, w, *, extended: bool = False) -> ChainEvaluation:
    """Three chained caps for the squared family pairings of a complexified w."""
    _require_field(space, (Field.REAL,), "this statement")
    wre, wim = _complexified_parts(space, w, "w", extended)
    g = _gram_matrix(space, extended)
    me = _family_members(space, E, "E", extended)
    mf = _family_members(space, F, "F", extended)
    cdt = np.clongdouble if extended else np.complex128
    cwe = _pairings(space, g, wre, me).astype(cdt) + 1j * _pairings(space, g, wim, me).astype(cdt)
    cwf = _pairings(space, g, wre, mf).astype(cdt) + 1j * _pairings(space, g, wim, mf).astype(cdt)
    cross = _cross_matrix(space, g, me, mf).astype(cdt)
    t = cwe @ cwe + cwf @ cwf - 2.0 * (cwe @ cross @ cwf)
    nre2 = inner(space, wre, wre, extended=extended)
    nim2 = inner(space, wim, wim, extended=extended)
    nw2 = nre2 + nim2
    mixed = inner(space, wre, wim, extended=extended)
    self_pair = (nre2 - nim2) + 1j * (2.0 * mixed)
    half_self = 0.5 * abs(self_pair)
    middle1 = half_self + abs(t - 0.5 * self_pair)
    middle2 = 0.5 * (nw2 + abs(self_pair))
    first = make_evaluation("kurepa-refined-3.3", nw2, abs(t), rhs=middle1)
    second = make_evaluation("kurepa-refined-3.3", nw2, middle1, rhs=middle2)
    third = make_evaluation("kurepa-refined-3.3", nw2, middle2, rhs=nw2)
    return ChainEvaluation((first, second, third))


# registry --------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogResult:
    links: tuple
    binding: IneqEvaluation
    premises_hold: Optional[bool]


@dataclass(frozen=True)
class CatalogEntry:
    """Uniform adapter from named inputs to evaluation records."""

    name: str
    fields: tuple
    vector_args: tuple
    family_args: tuple
    complexified_args: tuple
    has_premises: bool
    default_params: Optional[MooreParams]
    runner: Callable

    def run(self, space, inputs, params=None, *, extended: bool = False) -> CatalogResult:
        if space.field not in self.fields:
            raise DomainError(f"{self.name} is not defined over {space.field.name.lower()} spaces")
        return self.runner(space, inputs, params or self.default_params, extended)


def _single(ev) -> CatalogResult:
    return CatalogResult((ev,), ev, None)


def _conditional(verdict, extra=()) -> CatalogResult:
    links = (verdict.conclusion, *extra)
    binding = min(links, key=lambda ev: ev.min_margin / max(ev.scale, 1e-300))
    return CatalogResult(links, binding, verdict.premises_hold)


def _chained(chain: ChainEvaluation) -> CatalogResult:
    return CatalogResult(chain.links, chain.binding, None)


def _quotient_branch(verdict: QuotientTransferVerdict) -> MooreVerdict:
    return verdict.lower if verdict.lower is not None else verdict.upper


def _entry(name, fields, runner, vectors=(), families=(), complexified=(), params=None, premises=False):
    return CatalogEntry(
        name=name,
        fields=fields,
        vector_args=vectors,
        family_args=families,
        complexified_args=complexified,
        has_premises=premises,
        default_params=params,
        runner=runner,
    )


_BOTH = (Field.REAL, Field.COMPLEX)
_REAL = (Field.REAL,)

CATALOG = {
    "schwarz": _entry(
        "schwarz",
        _BOTH,
        lambda s, i, p, ext: _single(eval_schwarz(s, i["x"], i["y"], extended=ext)),
        vectors=("x", "y"),
    ),
    "precupanu-1.1": _entry(
        "precupanu-1.1",
        _REAL,
        lambda s, i, p, ext: _single(eval_precupanu(s, i["a"], i["b"], i["x"], i["y"], extended=ext)),
        vectors=("a", "b", "x", "y"),
    ),
    "richard-1.3": _entry(
        "richard-1.3",
        _REAL,
        lambda s, i, p, ext: _single(eval_richard(s, i["a"], i["b"], i["x"], extended=ext)),
        vectors=("a", "b", "x"),
    ),
    "precupanu-self-1.5": _entry(
        "precupanu-self-1.5",
        _REAL,
        lambda s, i, p, ext: _single(eval_precupanu_self(s, i["a"], i["x"], i["y"], extended=ext)),
        vectors=("a", "x", "y"),
    ),
    "angle-1.6": _entry(
        "angle-1.6",
        _REAL,
        lambda s, i, p, ext: _single(eval_angle_bound(s, i["a"], i["x"], i["y"], extended=ext)),
        vectors=("a", "x", "y"),
    ),
    "moore-1.9": _entry(
        "moore-1.9",
        _REAL,
        lambda s, i, p, ext: _conditional(verify_moore(s, i["x"], i["y"], i["z"], p.eps, extended=ext)),
        vectors=("x", "y", "z"),
        params=MooreParams(eps=0.05),
        premises=True,
    ),
    "precupanu-moore-1.12": _entry(
        "precupanu-moore-1.12",
        _REAL,
        lambda s, i, p, ext: (
            lambda v: _conditional(v, extra=(v.refinement,))
        )(verify_precupanu_moore(s, i["a"], i["b"], i["x"], p, extended=ext)),
        vectors=("a", "b", "x"),
        params=MooreParams(eps1=0.8, eps2=1.0),
        premises=True,
    ),
    "buzano-1.14": _entry(
        "buzano-1.14",
        _BOTH,
        lambda s, i, p, ext: _single(eval_buzano(s, i["a"], i["b"], i["x"], extended=ext)),
        vectors=("a", "b", "x"),
    ),
    "buzano-moore-1.16": _entry(
        "buzano-moore-1.16",
        _BOTH,
        lambda s, i, p, ext: _conditional(verify_buzano_moore(s, i["x"], i["a"], i["b"], p.eps, extended=ext)),
        vectors=("x", "a", "b"),
        params=MooreParams(eps=0.1),
        premises=True,
    ),
    "t1.5-i": _entry(
        "t1.5-i",
        _REAL,
        lambda s, i, p, ext: _conditional(
            verify_cosine_transfer(s, i["a"], i["x"], i["y"], p.delta1, p.delta2, extended=ext)
        ),
        vectors=("a", "x", "y"),
        params=MooreParams(delta1=0.7, delta2=0.7),
        premises=True,
    ),
    "t1.5-ii": _entry(
        "t1.5-ii",
        _REAL,
        lambda s, i, p, ext: _conditional(
            _quotient_branch(verify_quotient_transfer(s, i["a"], i["b"], i["x"], mu1=p.mu1, mu2=p.mu2, extended=ext))
        ),
        vectors=("a", "b", "x"),
        params=MooreParams(mu1=0.6),
        premises=True,
    ),
    "generalized-2.1": _entry(
        "generalized-2.1",
        _BOTH,
        lambda s, i, p, ext: _single(eval_generalized(s, i["E"], i["F"], i["x"], i["y"], extended=ext)),
        vectors=("x", "y"),
        families=("E", "F"),
    ),
    "chain-2.10": _entry(
        "chain-2.10",
        _BOTH,
        lambda s, i, p, ext: _chained(eval_chain(s, i["E"], i["F"], i["x"], i["y"], extended=ext)),
        vectors=("x", "y"),
        families=("E", "F"),
    ),
    "real-double-2.14": _entry(
        "real-double-2.14",
        _REAL,
        lambda s, i, p, ext: _single(eval_real_double(s, i["E"], i["F"], i["x"], i["y"], extended=ext)),
        vectors=("x", "y"),
        families=("E", "F"),
    ),
    "kurepa-3.2": _entry(
        "kurepa-3.2",
        _REAL,
        lambda s, i, p, ext: _chained(eval_kurepa(s, i["a"], i["z"], extended=ext)),
        vectors=("a",),
        complexified=("z",),
    ),
    "kurepa-refined-3.3": _entry(
        "kurepa-refined-3.3",
        _REAL,
        lambda s, i, p, ext: _chained(eval_kurepa_refined(s, i["E"], i["F"], i["w"], extended=ext)),
        families=("E", "F"),
        complexified=("w",),
    ),
}


def catalog_names():
    return list(CATALOG)


def run_catalog(name: str, space: SpaceSpec, inputs: dict, params: Optional[MooreParams] = None, *, extended: bool = False) -> CatalogResult:
    """Evaluate one named inequality on explicit inputs."""
    try:
        entry = CATALOG[name]
    except KeyError:
        raise DomainError(f"unknown inequality {name!r}") from None
    return entry.run(space, inputs, params, extended=extended)


def instance_digest(name: str, space: SpaceSpec, inputs: dict) -> str:
    """Digest an instance's vector data in the entry's declared argument order."""
    entry = CATALOG[name]
    parts = []
    for arg in entry.family_args:
        parts.append(inputs[arg])
    for arg in entry.vector_args:
        parts.append(np.asarray(inputs[arg], dtype=space.field.dtype))
    for arg in entry.complexified_args:
        parts.append(inputs[arg])
    return digest_inputs(space, *parts)
