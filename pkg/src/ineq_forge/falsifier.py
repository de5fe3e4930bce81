"""Randomized counterexample search and tightness probing for the catalog.

Search design
-------------

Every trial is a pure function of (seed, inequality name, trial index): the
per-trial generator is Philox keyed on (seed, fnv1a(name)) with the trial
index in the counter, so runs partition arbitrarily across workers without
changing a single sampled byte.  Trials sweep the configured dimension range
cyclically and alternate fields blockwise for field-agnostic statements.

Vectors are sampled with independent standard normal coordinates (real and
imaginary parts independently over C).  Under a non-identity gram matrix the
base law is made isotropic for the weighted pairing by drawing in whitened
coordinates and mapping through inv(L^T), L the Cholesky factor.

Conditional statements are sampled inside their premise regions exactly
rather than by rejection: for a standard normal vector the squared cosine
against a fixed direction is Beta(1/2, (d-1)/2) over R and Beta(1, d-1) over
C, so a premise window on the cosine is an interval condition on a Beta
variable, invertible through the regularized incomplete beta function.  The
construction is distributionally identical to rejection sampling but runs in
constant time per sample at any eps.  The one remaining rejection loop (the
probe direction of the quotient-transfer statement) is capped; trials that
exhaust the cap are reported as premise-starved, never silently dropped.

Violation candidates are re-evaluated at extended precision before being
counted: a double-precision "violation" of a true bound is overwhelmingly
roundoff, and the report only counts confirmed ones.  The worst margin is
selected by scale-normalized margin (ties to the lower trial index) and
reported in raw units.  Local ascent refines the most promising candidates
by projected central-difference descent on the normalized margin.
"""

from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special as sps

from .catalog import (
    CATALOG,
    TOL_ABS,
    TOL_REL,
    digest_inputs,
    fnv1a_64,
    instance_digest,
    run_catalog,
    verify_moore,
)
from .orthonormal import OrthonormalFamily, gram_schmidt
from .spaces import (
    ComplexifiedVector,
    DomainError,
    Field,
    SpaceSpec,
    inner,
    norm,
    zero_norm_threshold,
)

SHARD_SIZE = 4096
TOP_K = 8
REJECTION_CAP = 10_000
MAX_HALVINGS = 20
HISTOGRAM_BUCKETS = 32
_TINY = 1e-300


class FieldChoice(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"
    BOTH = "both"


class GramKind(enum.Enum):
    IDENTITY = "identity"
    RANDOM = "random"


class Verdict(enum.Enum):
    NO_COUNTEREXAMPLE_FOUND = "NoCounterexampleFound"
    COUNTEREXAMPLE_FOUND = "CounterexampleFound"


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    trials: int = 10000
    dims: tuple = (2, 6)
    ascent_steps: int = 0
    step_size: float = 1e-2
    fd_eps: float = 1e-6
    field: FieldChoice = FieldChoice.BOTH
    gram: GramKind = GramKind.IDENTITY

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must fit in 64 unsigned bits")
        if self.trials < 0:
            raise DomainError("trials must be nonnegative")
        lo, hi = self.dims
        if not (1 <= lo <= hi):
            raise DomainError("dims must be an inclusive range with lower bound >= 1")
        if self.ascent_steps < 0:
            raise DomainError("ascent_steps must be nonnegative")
        if not 0 < self.step_size < 1:
            raise DomainError("step_size must lie in (0, 1)")
        if not 0 < self.fd_eps < 1:
            raise DomainError("fd_eps must lie in (0, 1)")


@dataclass(frozen=True)
class SearchReport:
    ineq: str
    trials_run: int
    worst_margin: Optional[float]
    worst_instance_digest: Optional[str]
    near_equality_count: int
    violation_count: int
    margin_histogram: tuple
    premise_starved: int


@dataclass(frozen=True)
class SampledInstance:
    space: SpaceSpec
    inputs: dict
    starved: bool


@dataclass(frozen=True)
class AscentResult:
    refined_inputs: dict
    final_margin: float
    trace: tuple


@dataclass(frozen=True)
class MooreComplexReport:
    eps: float
    samples: int
    samples_satisfying_premises: int
    min_observed_ratio: Optional[float]
    first_bound: float
    second_bound: float
    verdict: Verdict
    witness_digest: Optional[str]


# deterministic streams --------------------------------------------------------


def _name_key(name: str) -> int:
    return fnv1a_64(name.encode("utf-8"))


def _trial_rng(seed: int, name: str, index: int) -> np.random.Generator:
    bits = np.random.Philox(key=[seed, _name_key(name)], counter=[0, 0, 0, index])
    return np.random.Generator(bits)


def _gram_rng(seed: int, name: str, dim: int, field: Field) -> np.random.Generator:
    """Reserved substream (counter word 2 set) so gram draws never collide
    with trial draws."""
    word = dim * 2 + (1 if field is Field.COMPLEX else 0)
    bits = np.random.Philox(key=[seed, _name_key(name)], counter=[0, 0, 1, word])
    return np.random.Generator(bits)


def _random_gram(seed: int, name: str, dim: int, field: Field) -> np.ndarray:
    rng = _gram_rng(seed, name, dim, field)
    a = rng.standard_normal((dim, dim))
    if field is Field.COMPLEX:
        a = a + 1j * rng.standard_normal((dim, dim))
    g = a.conj().T @ a + 0.5 * np.eye(dim)
    return (g + g.conj().T) / 2.0


def _field_plan(entry, choice: FieldChoice):
    if choice is FieldChoice.REAL:
        return (Field.REAL,)
    if choice is FieldChoice.COMPLEX:
        if Field.COMPLEX not in entry.fields:
            raise DomainError(f"{entry.name} is not defined over complex spaces")
        return (Field.COMPLEX,)
    return entry.fields


def _dims_list(config: SearchConfig):
    lo, hi = config.dims
    return tuple(range(lo, hi + 1))


@functools.lru_cache(maxsize=None)
def _cached_space(seed: int, gram_kind: GramKind, name: str, dim: int, field: Field):
    """The gram draw is a pure function of its key, so every trial of a run
    shares one space object and one whitener (at most names x dims x fields
    entries live at once)."""
    if gram_kind is GramKind.IDENTITY:
        return SpaceSpec(dim, field), None
    space = SpaceSpec(dim, field, _random_gram(seed, name, dim, field))
    whitener = np.linalg.inv(space.chol.T)
    whitener.setflags(write=False)
    return space, whitener


def _space_and_whitener(config: SearchConfig, name: str, dim: int, field: Field):
    return _cached_space(config.seed, config.gram, name, dim, field)


# sampling primitives (all in whitened coordinates) -----------------------------


def _std_vector(rng, dim: int, field: Field):
    v = rng.standard_normal(dim)
    if field is Field.COMPLEX:
        v = v + 1j * rng.standard_normal(dim)
    return v


def _ambient(whitener, w):
    return w if whitener is None else whitener @ w


def _nonzero_std(rng, space: SpaceSpec):
    threshold = zero_norm_threshold(space)
    for _ in range(64):
        w = _std_vector(rng, space.dim, space.field)
        if np.linalg.norm(w) > threshold:
            return w
    raise RuntimeError("could not sample a nonzero vector")


def _beta_cdf(t: float, d: int, field: Field) -> float:
    if field is Field.COMPLEX:
        return 1.0 - (1.0 - t) ** (d - 1)
    return float(sps.betainc(0.5, (d - 1) / 2.0, t))


def _beta_ppf(u: float, d: int, field: Field) -> float:
    if field is Field.COMPLEX:
        return 1.0 - (1.0 - u) ** (1.0 / (d - 1))
    return float(sps.betaincinv(0.5, (d - 1) / 2.0, u))


def _orth_unit(rng, xhat):
    """A uniform unit direction orthogonal to the unit vector xhat
    (standard pairing); requires dimension at least 2."""
    d = xhat.shape[0]
    field = Field.COMPLEX if np.iscomplexobj(xhat) else Field.REAL
    for _ in range(64):
        p = _std_vector(rng, d, field)
        p = p - (p @ np.conj(xhat)) * xhat
        n = np.linalg.norm(p)
        if n > 1e-12:
            return p / n
    raise RuntimeError("could not sample an orthogonal direction")


def _conditioned_vector(rng, space: SpaceSpec, xhat, t_lo: float, t_hi: float, signed: bool):
    """Standard normal vector conditioned on its cosine against xhat.

    The squared cosine is sampled from the conditional Beta law on
    [t_lo, t_hi]; `signed` pins the cosine sign to +, otherwise the sign
    (phase over C) is uniform.  Draw order is fixed: window variate, sign or
    phase, orthogonal direction, magnitude.
    """
    d = space.dim
    field = space.field
    t_lo = min(max(t_lo, 0.0), 1.0)
    t_hi = min(max(t_hi, 0.0), 1.0)
    if d == 1:
        t = 1.0
    else:
        u = rng.uniform(_beta_cdf(t_lo, d, field), _beta_cdf(t_hi, d, field))
        t = min(max(_beta_ppf(u, d, field), t_lo), t_hi)
    c = math.sqrt(t)
    if not signed:
        if field is Field.COMPLEX:
            c = c * np.exp(2j * np.pi * rng.uniform())
        elif rng.uniform() < 0.5:
            c = -c
    tail = math.sqrt(max(1.0 - t, 0.0))
    direction = c * xhat
    if d > 1 and tail > 0.0:
        direction = direction + tail * _orth_unit(rng, xhat)
    magnitude = np.linalg.norm(_std_vector(rng, d, field))
    return magnitude * direction


# per-name samplers --------------------------------------------------------------


def _sample_generic(entry, space, whitener, rng, params):
    inputs = {}
    dim = space.dim
    for key in entry.family_args:
        size = int(rng.integers(0, dim + 1))
        for _ in range(16):
            rows = np.array([_std_vector(rng, dim, space.field) for _ in range(size)]).reshape(size, dim)
            try:
                inputs[key] = gram_schmidt(space, np.array([_ambient(whitener, r) for r in rows]).reshape(size, dim))
                break
            except DomainError:
                continue
        else:
            raise RuntimeError("could not sample an orthonormal family")
    for key in entry.vector_args:
        inputs[key] = _ambient(whitener, _nonzero_std(rng, space))
    for key in entry.complexified_args:
        for _ in range(64):
            re = _std_vector(rng, dim, Field.REAL)
            im = _std_vector(rng, dim, Field.REAL)
            if math.hypot(np.linalg.norm(re), np.linalg.norm(im)) > zero_norm_threshold(space):
                break
        inputs[key] = ComplexifiedVector(_ambient(whitener, re), _ambient(whitener, im))
    return inputs, False


def _sample_two_against_probe(space, whitener, rng, t_lo, keys, signed_anchor=False):
    """Probe vector plus two vectors cosine-conditioned against it."""
    probe = _nonzero_std(rng, space)
    phat = probe / np.linalg.norm(probe)
    first = _conditioned_vector(rng, space, phat, t_lo, 1.0, signed_anchor)
    second = _conditioned_vector(rng, space, phat, t_lo, 1.0, signed_anchor)
    names = {keys[0]: _ambient(whitener, probe), keys[1]: _ambient(whitener, first), keys[2]: _ambient(whitener, second)}
    return names


def _sample_moore(entry, space, whitener, rng, params):
    need = max(1.0 - params.eps, 0.0)
    inputs = _sample_two_against_probe(space, whitener, rng, need * need, ("x", "y", "z"))
    return inputs, False


def _sample_buzano_moore(entry, space, whitener, rng, params):
    need = max(1.0 - params.eps, 0.0)
    inputs = _sample_two_against_probe(space, whitener, rng, need * need, ("x", "a", "b"))
    return inputs, False


def _sample_precupanu_moore(entry, space, whitener, rng, params):
    eps1, eps2 = params.eps1, params.eps2
    starved = eps1 > 1.0 + 1e-12 or (space.dim == 1 and not eps1 - 1e-12 <= 1.0 <= eps2 + 1e-12)
    x = _nonzero_std(rng, space)
    xhat = x / np.linalg.norm(x)
    hi = min(eps2, 1.0)
    a = _conditioned_vector(rng, space, xhat, eps1 * eps1, hi * hi, True)
    b = _conditioned_vector(rng, space, xhat, eps1 * eps1, hi * hi, True)
    inputs = {"a": _ambient(whitener, a), "b": _ambient(whitener, b), "x": _ambient(whitener, x)}
    return inputs, starved


def _sample_cosine_transfer(entry, space, whitener, rng, params):
    anchor = _nonzero_std(rng, space)
    ahat = anchor / np.linalg.norm(anchor)
    x = _conditioned_vector(rng, space, ahat, params.delta1 ** 2, 1.0, True)
    y = _conditioned_vector(rng, space, ahat, params.delta2 ** 2, 1.0, True)
    inputs = {"a": _ambient(whitener, anchor), "x": _ambient(whitener, x), "y": _ambient(whitener, y)}
    return inputs, False


def _sample_quotient_transfer(entry, space, whitener, rng, params):
    """Sampling for the quotient-transfer premises.

    Floor lane (mu1 set): the floor on <x,a><x,b>/(||x||^2 ||a|| ||b||) is
    attainable only when cos(a, b) >= 2 mu1 - 1, so b is drawn with its
    cosine against a at least max(2 mu1 - 1, 0).  For unit anchors with
    cosine c and a unit probe with component p along their bisector, the
    quotient is at least p^2 - (1 - c)/2 whatever the orthogonal part does,
    so conditioning p^2 >= mu1 + (1 - c)/2 satisfies the premise without any
    rejection.  This covers a subregion of the premise set (probes near the
    bisector), which is the tradeoff for constant-time sampling; ascent
    refinement is free to leave it.

    Cap lane (mu2 only): the acceptance region depends on the anchor pair in
    a way with no comparable closed form, so the probe is rejection-sampled
    with a hard cap and exhaustion is reported as starvation.
    """
    mu1, mu2 = params.mu1, params.mu2
    if mu1 is None and mu2 is None:
        raise DomainError("quotient-transfer sampling needs mu1 or mu2")
    if mu1 is not None:
        gamma = max(2.0 * mu1 - 1.0, 0.0)
        a = _nonzero_std(rng, space)
        ahat = a / np.linalg.norm(a)
        b = _conditioned_vector(rng, space, ahat, gamma * gamma, 1.0, True)
        bhat = b / np.linalg.norm(b)
        c = float(np.clip(ahat @ bhat, -1.0, 1.0))
        bisector = ahat + bhat
        bisector = bisector / np.linalg.norm(bisector)
        t_min = min(max(mu1 + (1.0 - c) / 2.0, 0.0), 1.0)
        x = _conditioned_vector(rng, space, bisector, t_min, 1.0, True)
        inputs = {"a": _ambient(whitener, a), "b": _ambient(whitener, b), "x": _ambient(whitener, x)}
        return inputs, False
    a = _nonzero_std(rng, space)
    b = _nonzero_std(rng, space)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    starved = True
    x = None
    for _ in range(REJECTION_CAP):
        x = _nonzero_std(rng, space)
        xhat = x / np.linalg.norm(x)
        if float(xhat @ a) * float(xhat @ b) <= mu2 * na * nb:
            starved = False
            break
    inputs = {"a": _ambient(whitener, a), "b": _ambient(whitener, b), "x": _ambient(whitener, x)}
    return inputs, starved


_SAMPLERS = {
    "moore-1.9": _sample_moore,
    "buzano-moore-1.16": _sample_buzano_moore,
    "precupanu-moore-1.12": _sample_precupanu_moore,
    "t1.5-i": _sample_cosine_transfer,
    "t1.5-ii": _sample_quotient_transfer,
}


def sample_instance(config: SearchConfig, ineq_name: str, trial_index: int) -> SampledInstance:
    """Deterministic instance for one trial; see the module docstring."""
    try:
        entry = CATALOG[ineq_name]
    except KeyError:
        raise DomainError(f"unknown inequality {ineq_name!r}") from None
    plan = _field_plan(entry, config.field)
    dims = _dims_list(config)
    dim = dims[trial_index % len(dims)]
    field = plan[(trial_index // len(dims)) % len(plan)]
    space, whitener = _space_and_whitener(config, ineq_name, dim, field)
    rng = _trial_rng(config.seed, ineq_name, trial_index)
    sampler = _SAMPLERS.get(ineq_name, _sample_generic)
    inputs, starved = sampler(entry, space, whitener, rng, entry.default_params)
    return SampledInstance(space, inputs, starved)


# margins, buckets, arbitration --------------------------------------------------


def _bucket(normalized_margin: float) -> int:
    """Bucket 0 collects nonpositive margins, 1..30 span decades from 1e-17
    up (positive underflow folds into 1), 31 is overflow."""
    if normalized_margin <= 0.0:
        return 0
    return min(max(int(math.floor(math.log10(normalized_margin))) + 18, 1), 31)


def _normalized_margin(result):
    values = [link.min_margin / max(link.scale, _TINY) for link in result.links]
    i = min(range(len(values)), key=values.__getitem__)
    return values[i], result.links[i]


def _confirmed_violation(entry, space, inputs, params) -> bool:
    result = entry.run(space, inputs, params, extended=True)
    if entry.has_premises and result.premises_hold is False:
        return False
    return not all(link.holds for link in result.links)


# local ascent --------------------------------------------------------------------


class _CoordCodec:
    """Flatten instance inputs to one real vector and back.

    Families always rebuild through gram_schmidt (the orthonormality
    manifold is the only place they make sense), vectors and complexified
    pairs renormalize to their starting norms when `project` is set.
    """

    def __init__(self, entry, space, inputs):
        self.entry = entry
        self.space = space
        self.complex_field = space.field is Field.COMPLEX
        self.family_sizes = {k: inputs[k].size for k in entry.family_args}
        self.vector_norms = {k: norm(space, inputs[k]) for k in entry.vector_args}
        self.pair_norms = {
            k: math.hypot(norm(space, inputs[k].re), norm(space, inputs[k].im))
            for k in entry.complexified_args
        }

    def flatten(self, inputs) -> np.ndarray:
        parts = []
        for k in self.entry.family_args:
            m = inputs[k].members
            parts.append(np.asarray(m.real, dtype=np.float64).ravel())
            if self.complex_field:
                parts.append(np.asarray(m.imag, dtype=np.float64).ravel())
        for k in self.entry.vector_args:
            v = np.asarray(inputs[k], dtype=self.space.field.dtype)
            parts.append(np.asarray(v.real, dtype=np.float64))
            if self.complex_field:
                parts.append(np.asarray(v.imag, dtype=np.float64))
        for k in self.entry.complexified_args:
            parts.append(np.asarray(inputs[k].re, dtype=np.float64))
            parts.append(np.asarray(inputs[k].im, dtype=np.float64))
        if not parts:
            return np.zeros(0)
        return np.concatenate(parts)

    def rebuild(self, flat: np.ndarray, project: bool):
        dim = self.space.dim
        pos = 0
        inputs = {}
        for k in self.entry.family_args:
            size = self.family_sizes[k]
            real = flat[pos : pos + size * dim].reshape(size, dim)
            pos += size * dim
            if self.complex_field:
                imag = flat[pos : pos + size * dim].reshape(size, dim)
                pos += size * dim
                raw = real + 1j * imag
            else:
                raw = real
            if size == 0:
                inputs[k] = OrthonormalFamily(self.space, raw.astype(self.space.field.dtype))
                continue
            try:
                inputs[k] = gram_schmidt(self.space, raw)
            except DomainError:
                return None
        for k in self.entry.vector_args:
            v = flat[pos : pos + dim].copy()
            pos += dim
            if self.complex_field:
                v = v + 1j * flat[pos : pos + dim]
                pos += dim
            if project:
                n = norm(self.space, v)
                if n <= zero_norm_threshold(self.space):
                    return None
                v = v * (self.vector_norms[k] / n)
            inputs[k] = v
        for k in self.entry.complexified_args:
            re = flat[pos : pos + dim].copy()
            pos += dim
            im = flat[pos : pos + dim].copy()
            pos += dim
            if project:
                n = math.hypot(norm(self.space, re), norm(self.space, im))
                if n <= zero_norm_threshold(self.space):
                    return None
                re = re * (self.pair_norms[k] / n)
                im = im * (self.pair_norms[k] / n)
            inputs[k] = ComplexifiedVector(re, im)
        return inputs


def _central_gradient(fn, flat: np.ndarray, h: float) -> np.ndarray:
    grad = np.zeros_like(flat)
    work = flat.copy()
    for i in range(flat.size):
        saved = work[i]
        work[i] = saved + h
        up = fn(work)
        work[i] = saved - h
        down = fn(work)
        work[i] = saved
        if math.isfinite(up) and math.isfinite(down):
            grad[i] = (up - down) / (2.0 * h)
    return grad


def local_ascent(ineq_name: str, space: SpaceSpec, inputs: dict, config: SearchConfig, params=None) -> AscentResult:
    """Drive the instance toward equality or violation.

    Projected descent on the scale-normalized binding margin: gradient by
    central differences, every accepted step renormalizes nonzero-required
    vectors to their starting norms and re-orthonormalizes families, and
    steps that leave the premise region are rejected.  The recorded trace is
    nonincreasing by construction.
    """
    try:
        entry = CATALOG[ineq_name]
    except KeyError:
        raise DomainError(f"unknown inequality {ineq_name!r}") from None
    params = params or entry.default_params
    codec = _CoordCodec(entry, space, inputs)

    def evaluate(candidate):
        if candidate is None:
            return math.inf, False
        try:
            result = entry.run(space, candidate, params)
        except (DomainError, ArithmeticError):
            return math.inf, False
        margin, _ = _normalized_margin(result)
        ok = not (entry.has_premises and result.premises_hold is False)
        return margin, ok

    def raw_objective(flat):
        return evaluate(codec.rebuild(flat, project=False))[0]

    flat = codec.flatten(inputs)
    current_inputs = inputs
    current, _ = evaluate(inputs)
    trace = [current]
    step = config.step_size
    if flat.size == 0:
        return AscentResult(current_inputs, current, tuple(trace))
    for _ in range(config.ascent_steps):
        grad = _central_gradient(raw_objective, flat, config.fd_eps)
        gnorm = float(np.linalg.norm(grad))
        if not math.isfinite(gnorm) or gnorm < 1e-14:
            break
        direction = grad / gnorm
        reach = max(float(np.linalg.norm(flat)), 1e-12)
        accepted = False
        trial_step = step
        for _ in range(MAX_HALVINGS + 1):
            candidate = codec.rebuild(flat - trial_step * reach * direction, project=True)
            value, ok = evaluate(candidate)
            if ok and value < current:
                accepted = True
                break
            trial_step /= 2.0
        if not accepted:
            break
        current_inputs = candidate
        flat = codec.flatten(candidate)
        current = value
        trace.append(current)
        step = min(trial_step * 1.5, 1.0)
    return AscentResult(current_inputs, current, tuple(trace))


# search driver -------------------------------------------------------------------


def _shard_worker(task):
    name, config, start, stop = task
    entry = CATALOG[name]
    params = entry.default_params
    hist = [0] * HISTOGRAM_BUCKETS
    near = 0
    violations = 0
    starved_count = 0
    worst = None  # (normalized, index, raw)
    top = []  # ascending (normalized, index)
    for index in range(start, stop):
        sampled = sample_instance(config, name, index)
        result = entry.run(sampled.space, sampled.inputs, params)
        if entry.has_premises and result.premises_hold is False:
            starved_count += 1
            continue
        normalized, binding = _normalized_margin(result)
        hist[_bucket(normalized)] += 1
        near += 1 if binding.near_equality else 0
        if not all(link.holds for link in result.links):
            if _confirmed_violation(entry, sampled.space, sampled.inputs, params):
                violations += 1
        key = (normalized, index, binding.near_equality)
        if worst is None or key[:2] < (worst[0], worst[1]):
            worst = (normalized, index, float(binding.min_margin))
        if len(top) < TOP_K:
            top.append(key)
            top.sort()
        elif key < top[-1]:
            top[-1] = key
            top.sort()
    return hist, near, violations, starved_count, worst, top


def falsify(ineq_name: str, config: SearchConfig, threads: int = 1) -> SearchReport:
    """Run the randomized search for one inequality and aggregate a report."""
    try:
        entry = CATALOG[ineq_name]
    except KeyError:
        raise DomainError(f"unknown inequality {ineq_name!r}") from None
    _field_plan(entry, config.field)
    params = entry.default_params
    tasks = [
        (ineq_name, config, start, min(start + SHARD_SIZE, config.trials))
        for start in range(0, config.trials, SHARD_SIZE)
    ]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(_shard_worker, tasks))
    else:
        partials = [_shard_worker(t) for t in tasks]

    hist = [0] * HISTOGRAM_BUCKETS
    near = 0
    violations = 0
    starved = 0
    worst = None
    top = []
    for p_hist, p_near, p_viol, p_starved, p_worst, p_top in partials:
        hist = [a + b for a, b in zip(hist, p_hist)]
        near += p_near
        violations += p_viol
        starved += p_starved
        if p_worst is not None and (worst is None or (p_worst[0], p_worst[1]) < (worst[0], worst[1])):
            worst = p_worst
        top.extend(p_top)
    top.sort()
    top = top[:TOP_K]

    worst_instance = None
    if worst is not None:
        sampled = sample_instance(config, ineq_name, worst[1])
        worst_instance = (sampled.space, sampled.inputs)

    if config.ascent_steps > 0:
        for normalized, index, sampled_near in top:
            sampled = sample_instance(config, ineq_name, index)
            refined = local_ascent(ineq_name, sampled.space, sampled.inputs, config, params)
            try:
                result = entry.run(sampled.space, refined.refined_inputs, params)
            except (DomainError, ArithmeticError):
                continue
            if entry.has_premises and result.premises_hold is False:
                continue
            refined_normalized, binding = _normalized_margin(result)
            if binding.near_equality and not sampled_near:
                # the refined instance replaces its trial's contribution, so
                # each trial still counts at most once
                near += 1
            if worst is None or refined_normalized < worst[0]:
                worst = (refined_normalized, index, float(binding.min_margin))
                worst_instance = (sampled.space, refined.refined_inputs)
            if not all(link.holds for link in result.links):
                if _confirmed_violation(entry, sampled.space, refined.refined_inputs, params):
                    violations += 1

    digest = None
    if worst_instance is not None:
        digest = instance_digest(ineq_name, worst_instance[0], worst_instance[1])
    return SearchReport(
        ineq=ineq_name,
        trials_run=config.trials,
        worst_margin=None if worst is None else worst[2],
        worst_instance_digest=digest,
        near_equality_count=near,
        violation_count=violations,
        margin_histogram=tuple(hist),
        premise_starved=starved,
    )


# the complex-premise experiment ---------------------------------------------------


_MOORE_COMPLEX_KEY = "moore-complex"


def _moore_complex_sample(config: SearchConfig, eps: float, index: int):
    dims = _dims_list(config)
    dim = dims[index % len(dims)]
    space, whitener = _space_and_whitener(config, _MOORE_COMPLEX_KEY, dim, Field.COMPLEX)
    rng = _trial_rng(config.seed, _MOORE_COMPLEX_KEY, index)
    need = max(1.0 - eps, 0.0)
    inputs = _sample_two_against_probe(space, whitener, rng, need * need, ("x", "y", "z"))
    return space, inputs


def _moore_ratio(space, inputs, eps: float, extended: bool = False):
    verdict = verify_moore(space, inputs["x"], inputs["y"], inputs["z"], eps, extended=extended)
    scale = max(verdict.conclusion.scale, _TINY)
    return verdict.premises_hold, verdict.conclusion.center / scale, verdict.conclusion.scale


def _refine_moore_candidate(space, inputs, eps: float, first_bound: float, config: SearchConfig):
    """Projected descent on ratio - first_bound for the complex experiment."""
    dim = space.dim
    norms = {k: norm(space, inputs[k]) for k in ("x", "y", "z")}

    def rebuild(flat, project):
        out = {}
        pos = 0
        for k in ("x", "y", "z"):
            v = flat[pos : pos + dim] + 1j * flat[pos + dim : pos + 2 * dim]
            pos += 2 * dim
            if project:
                n = norm(space, v)
                if n <= zero_norm_threshold(space):
                    return None
                v = v * (norms[k] / n)
            out[k] = v
        return out

    def flatten(values):
        parts = []
        for k in ("x", "y", "z"):
            v = np.asarray(values[k], dtype=np.complex128)
            parts.append(v.real.astype(np.float64))
            parts.append(v.imag.astype(np.float64))
        return np.concatenate(parts)

    def evaluate(values):
        if values is None:
            return math.inf, False
        try:
            ok, ratio, _ = _moore_ratio(space, values, eps)
        except DomainError:
            return math.inf, False
        return ratio, ok

    def raw_objective(flat):
        return evaluate(rebuild(flat, project=False))[0]

    flat = flatten(inputs)
    current_inputs = inputs
    current, _ = evaluate(inputs)
    step = config.step_size
    for _ in range(config.ascent_steps):
        grad = _central_gradient(raw_objective, flat, config.fd_eps)
        gnorm = float(np.linalg.norm(grad))
        if not math.isfinite(gnorm) or gnorm < 1e-14:
            break
        direction = grad / gnorm
        reach = max(float(np.linalg.norm(flat)), 1e-12)
        accepted = False
        trial_step = step
        for _ in range(MAX_HALVINGS + 1):
            candidate = rebuild(flat - trial_step * reach * direction, project=True)
            value, ok = evaluate(candidate)
            if ok and value < current:
                accepted = True
                break
            trial_step /= 2.0
        if not accepted:
            break
        current_inputs = candidate
        flat = flatten(candidate)
        current = value
        step = min(trial_step * 1.5, 1.0)
    return current_inputs, current


def moore_complex_experiment(eps: float, config: SearchConfig) -> MooreComplexReport:
    """Empirical probe of the near-parallelism transfer over complex spaces.

    Reports the minimum premise-conditioned ratio |<y,z>| / (||y|| ||z||)
    against first_bound = 1 - eps - sqrt(2 eps) (whose complex validity is
    the open point) and second_bound = 1 - 4 eps + 2 eps^2 (which is proved
    over both fields).  The verdict concerns the first bound only and the
    function never asserts the open question: a confirmed sample below the
    first bound yields CounterexampleFound, anything else
    NoCounterexampleFound.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie in (0, 1)")
    if config.field is not FieldChoice.COMPLEX:
        raise DomainError("the experiment runs over complex spaces; set field accordingly")
    first_bound = 1.0 - eps - math.sqrt(2.0 * eps)
    second_bound = 1.0 - 4.0 * eps + 2.0 * eps * eps
    satisfying = 0
    best = None  # (ratio, index)
    top = []
    witness = None
    for index in range(config.trials):
        space, inputs = _moore_complex_sample(config, eps, index)
        ok, ratio, scale = _moore_ratio(space, inputs, eps)
        if not ok:
            continue
        satisfying += 1
        key = (ratio, index)
        if best is None or key < best:
            best = key
        if len(top) < TOP_K:
            top.append(key)
            top.sort()
        elif key < top[-1]:
            top[-1] = key
            top.sort()
        if ratio - first_bound < -(TOL_ABS / max(scale, _TINY) + TOL_REL):
            ok_e, ratio_e, scale_e = _moore_ratio(space, inputs, eps, extended=True)
            if ok_e and ratio_e - first_bound < -(TOL_ABS / max(scale_e, _TINY) + TOL_REL):
                if witness is None:
                    witness = digest_inputs(space, inputs["x"], inputs["y"], inputs["z"])
    min_ratio = None if best is None else best[0]
    if config.ascent_steps > 0:
        for ratio, index in top:
            space, inputs = _moore_complex_sample(config, eps, index)
            refined, refined_ratio = _refine_moore_candidate(space, inputs, eps, first_bound, config)
            ok, check_ratio, scale = _moore_ratio(space, refined, eps)
            if not ok:
                continue
            if min_ratio is None or check_ratio < min_ratio:
                min_ratio = check_ratio
            if check_ratio - first_bound < -(TOL_ABS / max(scale, _TINY) + TOL_REL):
                ok_e, ratio_e, scale_e = _moore_ratio(space, refined, eps, extended=True)
                if ok_e and ratio_e - first_bound < -(TOL_ABS / max(scale_e, _TINY) + TOL_REL):
                    if witness is None:
                        witness = digest_inputs(space, refined["x"], refined["y"], refined["z"])
    verdict = Verdict.COUNTEREXAMPLE_FOUND if witness is not None else Verdict.NO_COUNTEREXAMPLE_FOUND
    return MooreComplexReport(
        eps=eps,
        samples=config.trials,
        samples_satisfying_premises=satisfying,
        min_observed_ratio=min_ratio,
        first_bound=first_bound,
        second_bound=second_bound,
        verdict=verdict,
        witness_digest=witness,
    )
