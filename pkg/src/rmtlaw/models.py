"""Stationary column-process models and their covariance structure.

Four variants: symmetric i.i.d. entries, the Gaussian AR(1) process, the
symmetric two-state Markov chain, and user-supplied finite Markov chains.
All have zero mean and geometrically decaying autocovariance R(j), so the
m x m covariance of a length-m window is the Toeplitz matrix R(|i - i'|).

Trace moments H_k come either from eigenvalues of a finite window
(``h_finite``) or from the spectral density f of the autocovariance sequence
(``h_szego``; H_k = integral of f^k over one period).  ``isserlis_moment``
and ``chain_joint_moment`` give exact joint moments for the Gaussian and
finite-chain cases and power the simulator cross-checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    BoundError,
    DomainError,
    NumericError,
    ParseError,
    UnsupportedModelError,
)
from .moments import DEFAULT_MAX_K, ORIGIN_SZEGO, HSequence, finite_trace_origin

RADEMACHER = "rademacher"
STANDARD_GAUSSIAN = "standard-gaussian"

SIMPSON_PANELS = 4096
MAX_SZEGO_DECAY = 0.95

MAX_ISSERLIS_INDICES = 12
MAX_JOINT_INDICES = 12
MAX_CHAIN_INDEX = 10_000

_ROW_SUM_TOL = 1e-12
_STATIONARY_TOL = 1e-10
_MEAN_TOL = 1e-10


@dataclass(frozen=True)
class IIDSymmetric:
    """Independent symmetric entries with the given variance."""

    distribution: str = RADEMACHER
    variance: float = 1.0

    def __post_init__(self) -> None:
        if self.distribution not in (RADEMACHER, STANDARD_GAUSSIAN):
            raise DomainError(
                f"distribution must be {RADEMACHER!r} or {STANDARD_GAUSSIAN!r}, "
                f"got {self.distribution!r}"
            )
        v = float(self.variance)
        if not (math.isfinite(v) and v > 0):
            raise DomainError(f"variance must be positive, got {self.variance!r}")
        object.__setattr__(self, "variance", v)


@dataclass(frozen=True)
class GaussianAR1:
    """Stationary Gaussian sequence with Cov(a_i, a_i') = p^|i - i'|."""

    p: float

    def __post_init__(self) -> None:
        p = float(self.p)
        if not (math.isfinite(p) and abs(p) < 1):
            raise DomainError(f"AR(1) coefficient needs |p| < 1, got {self.p!r}")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class TwoStateChain:
    """Stationary Markov chain on {+1, -1} staying put with probability
    (1 + alpha)/2, so Cov(a_1, a_{1+j}) = alpha^j."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (math.isfinite(a) and -1 < a < 1):
            raise DomainError(f"two-state parameter needs -1 < alpha < 1, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class FiniteMarkovChain:
    """Stationary chain on user-supplied real state values.

    ``transition`` must be row-stochastic (rows sum to 1 within 1e-12),
    ``stationary`` must be an invariant probability vector (within 1e-10),
    and the stationary mean of the state values must vanish.
    """

    states: tuple[float, ...]
    transition: tuple[tuple[float, ...], ...]
    stationary: tuple[float, ...]
    source: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        states = tuple(float(s) for s in self.states)
        transition = tuple(tuple(float(x) for x in row) for row in self.transition)
        stationary = tuple(float(x) for x in self.stationary)
        n = len(states)
        if n < 2:
            raise DomainError("a finite chain needs at least two states")
        if len(transition) != n or any(len(row) != n for row in transition):
            raise DomainError(f"transition matrix must be {n}x{n}")
        if len(stationary) != n:
            raise DomainError(f"stationary vector must have length {n}")
        if any(x < 0 for row in transition for x in row):
            raise DomainError("transition probabilities must be nonnegative")
        if any(x < 0 for x in stationary):
            raise DomainError("stationary probabilities must be nonnegative")
        for i, row in enumerate(transition):
            if abs(sum(row) - 1.0) > _ROW_SUM_TOL:
                raise DomainError(f"transition row {i} sums to {sum(row)!r}, not 1")
        if abs(sum(stationary) - 1.0) > _ROW_SUM_TOL:
            raise DomainError("stationary probabilities must sum to 1")
        pi = np.array(stationary)
        pmat = np.array(transition)
        if np.abs(pi @ pmat - pi).max() > _STATIONARY_TOL:
            raise DomainError("stationary vector is not invariant under the transition matrix")
        if abs(float(pi @ np.array(states))) > _MEAN_TOL:
            raise DomainError("state values must have zero stationary mean")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "stationary", stationary)


StationaryModel = Union[IIDSymmetric, GaussianAR1, TwoStateChain, FiniteMarkovChain]
ChainModel = Union[TwoStateChain, FiniteMarkovChain]


def as_finite_chain(model: ChainModel) -> FiniteMarkovChain:
    """The explicit state-space form of a chain model."""
    if isinstance(model, FiniteMarkovChain):
        return model
    if isinstance(model, TwoStateChain):
        stay = (1.0 + model.alpha) / 2.0
        flip = (1.0 - model.alpha) / 2.0
        return FiniteMarkovChain(
            states=(1.0, -1.0),
            transition=((stay, flip), (flip, stay)),
            stationary=(0.5, 0.5),
        )
    raise DomainError(f"not a chain model: {model!r}")


def autocovariances(model: StationaryModel, max_lag: int) -> np.ndarray:
    """R(0..max_lag) of the column process."""
    if max_lag < 0:
        raise DomainError(f"need max_lag >= 0, got {max_lag}")
    lags = np.arange(max_lag + 1)
    if isinstance(model, IIDSymmetric):
        out = np.zeros(max_lag + 1)
        out[0] = model.variance
        return out
    if isinstance(model, GaussianAR1):
        return np.float64(model.p) ** lags
    if isinstance(model, TwoStateChain):
        return np.float64(model.alpha) ** lags
    if isinstance(model, FiniteMarkovChain):
        pi = np.array(model.stationary)
        states = np.array(model.states)
        pmat = np.array(model.transition)
        left = pi * states
        w = states.copy()
        out = np.empty(max_lag + 1)
        for j in range(max_lag + 1):
            out[j] = left @ w
            w = pmat @ w
        return out
    raise DomainError(f"unknown model {model!r}")


def decay_rate(model: StationaryModel) -> float:
    """Geometric base dominating |R(j)|: 0, |p|, |alpha|, or the chain's
    second-largest transition eigenvalue modulus."""
    if isinstance(model, IIDSymmetric):
        return 0.0
    if isinstance(model, GaussianAR1):
        return abs(model.p)
    if isinstance(model, TwoStateChain):
        return abs(model.alpha)
    if isinstance(model, FiniteMarkovChain):
        mods = np.sort(np.abs(np.linalg.eigvals(np.array(model.transition))))[::-1]
        return float(mods[1]) if len(mods) > 1 else 0.0
    raise DomainError(f"unknown model {model!r}")


def covariance_matrix(model: StationaryModel, m: int) -> np.ndarray:
    """Toeplitz covariance R(|i - i'|) of a length-m window."""
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    r = autocovariances(model, m - 1)
    idx = np.abs(np.arange(m)[:, None] - np.arange(m)[None, :])
    return r[idx]


def h_finite(model: StationaryModel, m: int, k_max: int) -> HSequence:
    """Window trace moments H_k = (1/m) tr(T_m^k), k = 1..k_max, computed
    through the eigenvalues of the covariance window."""
    if not 1 <= k_max <= DEFAULT_MAX_K:
        raise BoundError(f"need 1 <= k_max <= {DEFAULT_MAX_K}, got {k_max}")
    t = covariance_matrix(model, m)
    try:
        eig = np.linalg.eigvalsh(t)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed for m={m}: {exc}") from exc
    powers = eig[None, :] ** np.arange(1, k_max + 1)[:, None]
    values = powers.mean(axis=1)
    return HSequence(tuple(float(v) for v in values), origin=finite_trace_origin(m))


def _geometric_rate(model: StationaryModel) -> float:
    if isinstance(model, IIDSymmetric):
        return 0.0
    if isinstance(model, GaussianAR1):
        return model.p
    if isinstance(model, TwoStateChain):
        return model.alpha
    raise UnsupportedModelError(
        "spectral density is implemented only for models with R(j) = rho^j "
        f"(i.i.d., AR(1), two-state chain); got {type(model).__name__}"
    )


def spectral_density(model: StationaryModel, x):
    """Spectral density f(x) = sum_j R(j) exp(2 pi i j x) on [0, 1].

    For R(j) = variance * rho^|j| this is the closed form
    variance * (1 - rho^2) / (1 - 2 rho cos(2 pi x) + rho^2).  Accepts a
    scalar or an array; general finite chains are not supported.
    """
    rho = _geometric_rate(model)
    scale = model.variance if isinstance(model, IIDSymmetric) else 1.0
    xv = np.asarray(x, dtype=float)
    out = scale * (1.0 - rho * rho) / (1.0 - 2.0 * rho * np.cos(2.0 * np.pi * xv) + rho * rho)
    if np.ndim(x) == 0:
        return float(out)
    return out


def h_szego(model: StationaryModel, k_max: int) -> HSequence:
    """Limiting trace moments H_k = integral_0^1 f(x)^k dx via composite
    Simpson quadrature with 4096 panels.  Rejects |rho| > 0.95, where the
    density peaks too sharply for this fixed rule."""
    if not 1 <= k_max <= DEFAULT_MAX_K:
        raise BoundError(f"need 1 <= k_max <= {DEFAULT_MAX_K}, got {k_max}")
    rho = _geometric_rate(model)
    if abs(rho) > MAX_SZEGO_DECAY:
        raise DomainError(
            f"|rho| = {abs(rho)} > {MAX_SZEGO_DECAY}: density too peaked for the fixed rule"
        )
    grid = np.linspace(0.0, 1.0, SIMPSON_PANELS + 1)
    weights = np.ones(SIMPSON_PANELS + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    weights *= 1.0 / (3.0 * SIMPSON_PANELS)
    fx = spectral_density(model, grid)
    values = tuple(float(weights @ fx**k) for k in range(1, k_max + 1))
    return HSequence(values, origin=ORIGIN_SZEGO)


def standard_normals(stream: np.random.Generator, shape) -> np.ndarray:
    """Standard normal draws via the Box-Muller transform on the stream's
    uniforms; the draw count depends only on the requested size."""
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    total = 1
    for dim in shape:
        total *= int(dim)
    pairs = (total + 1) // 2
    u1 = 1.0 - stream.random(pairs)  # in (0, 1], keeps the log finite
    u2 = stream.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(theta), radius * np.sin(theta)])
    return z[:total].reshape(shape)


def sample_paths(
    model: StationaryModel, m: int, count: int, stream: np.random.Generator
) -> np.ndarray:
    """``count`` independent stationary paths of length m, as columns."""
    if m < 1 or count < 1:
        raise DomainError(f"need m >= 1 and count >= 1, got m={m}, count={count}")
    if isinstance(model, IIDSymmetric):
        sig = math.sqrt(model.variance)
        if model.distribution == RADEMACHER:
            return np.where(stream.random((m, count)) < 0.5, -sig, sig)
        return sig * standard_normals(stream, (m, count))
    if isinstance(model, GaussianAR1):
        z = standard_normals(stream, (m, count))
        x = np.empty((m, count))
        x[0] = z[0]
        c = math.sqrt(1.0 - model.p * model.p)
        for i in range(1, m):
            x[i] = model.p * x[i - 1] + c * z[i]
        return x
    if isinstance(model, TwoStateChain):
        u = stream.random((m, count))
        x = np.empty((m, count))
        x[0] = np.where(u[0] < 0.5, 1.0, -1.0)
        stay = (1.0 + model.alpha) / 2.0
        for i in range(1, m):
            x[i] = x[i - 1] * np.where(u[i] < stay, 1.0, -1.0)
        return x
    if isinstance(model, FiniteMarkovChain):
        states = np.array(model.states)
        cum_rows = np.cumsum(np.array(model.transition), axis=1)
        cum_pi = np.cumsum(np.array(model.stationary))
        nstates = len(states)
        u = stream.random((m, count))
        x = np.empty((m, count))
        idx = np.minimum(np.searchsorted(cum_pi, u[0], side="right"), nstates - 1)
        x[0] = states[idx]
        for i in range(1, m):
            idx = np.minimum((u[i][:, None] >= cum_rows[idx]).sum(axis=1), nstates - 1)
            x[i] = states[idx]
        return x
    raise DomainError(f"unknown model {model!r}")


def sample_path(model: StationaryModel, m: int, stream: np.random.Generator) -> np.ndarray:
    """One stationary path of length m."""
    return sample_paths(model, m, 1, stream)[:, 0]


def _pairings(items: tuple[int, ...]):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i in range(len(rest)):
        partner = rest[i]
        for tail in _pairings(rest[:i] + rest[i + 1 :]):
            yield ((first, partner),) + tail


def isserlis_moment(cov, indices: Sequence[int]) -> float:
    """Joint moment E[a(i_1) ... a(i_2k)] of a centered Gaussian vector: the
    sum over all (2k-1)!! pairings of products of covariances.

    ``cov`` is either a stationary model (covariance R(|i - i'|)) or an
    explicit square matrix looked up with 1-based indices.  Indices may
    repeat and need not be sorted.  An odd number of indices is rejected;
    the centered odd moments are zero.
    """
    idx = tuple(int(i) for i in indices)
    if len(idx) % 2:
        raise DomainError("Gaussian pairing moments need an even number of indices")
    if len(idx) > MAX_ISSERLIS_INDICES:
        raise BoundError(f"pairing enumeration is capped at {MAX_ISSERLIS_INDICES} indices")
    if not idx:
        return 1.0
    if any(i < 1 for i in idx):
        raise DomainError("indices are 1-based")
    if isinstance(cov, (IIDSymmetric, GaussianAR1, TwoStateChain, FiniteMarkovChain)):
        r = autocovariances(cov, max(idx) - 1)

        def lookup(a: int, b: int) -> float:
            return float(r[abs(a - b)])

    else:
        arr = np.asarray(cov, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DomainError("covariance must be a square matrix")
        if max(idx) > arr.shape[0]:
            raise DomainError(f"index {max(idx)} exceeds the {arr.shape[0]}x{arr.shape[0]} matrix")

        def lookup(a: int, b: int) -> float:
            return float(arr[a - 1, b - 1])

    total = 0.0
    for pairing in _pairings(idx):
        prod = 1.0
        for a, b in pairing:
            prod *= lookup(a, b)
        total += prod
    return total


def chain_joint_moment(chain: ChainModel, indices: Sequence[int]) -> float:
    """Exact E[a(i_1) ... a(i_r)] for a stationary finite chain, evaluated as
    a product of state-value weightings interleaved with transition powers.
    Indices must be sorted ascending (repeats allowed)."""
    fchain = as_finite_chain(chain)
    idx = [int(i) for i in indices]
    if not idx:
        return 1.0
    if len(idx) > MAX_JOINT_INDICES:
        raise BoundError(f"joint moments are capped at {MAX_JOINT_INDICES} indices")
    if any(i < 1 or i > MAX_CHAIN_INDEX for i in idx):
        raise BoundError(f"indices must lie in 1..{MAX_CHAIN_INDEX}")
    if any(b < a for a, b in zip(idx, idx[1:])):
        raise DomainError("indices must be sorted ascending")
    states = np.array(fchain.states)
    pmat = np.array(fchain.transition)
    vec = np.array(fchain.stationary) * states
    for a, b in zip(idx, idx[1:]):
        gap = b - a
        if gap:
            vec = vec @ np.linalg.matrix_power(pmat, gap)
        vec = vec * states
    return float(vec.sum())


@dataclass(frozen=True)
class DecayReport:
    """Worst observed remainder ratio when a joint chain moment is replaced
    by the product over consecutive index pairs of pair covariances.  The
    remainder is divided by sum_l rate^(gap between pair l and pair l+1)."""

    k: int
    trials: int
    span: int
    rate: float
    max_ratio: float
    worst_indices: tuple[int, ...]
    worst_remainder: float


def check_product_decay(
    chain: ChainModel,
    k: int,
    trials: int,
    stream: np.random.Generator,
    span: int = 40,
) -> DecayReport:
    """Empirical sweep: does |E prod a(i_j) - prod pair covariances| stay
    within a constant times the geometric decay over between-pair gaps?

    Sorted 2k-tuples are drawn uniformly from 1..span.  A zero remainder
    counts as ratio 0 (for k = 1 it vanishes identically); a nonzero
    remainder with an empty or zero denominator reports ratio inf.
    """
    if not 1 <= k <= 4:
        raise BoundError(f"decay sweep supports 1 <= k <= 4, got {k}")
    if trials < 1 or span < 2:
        raise DomainError(f"need trials >= 1 and span >= 2, got {trials}, {span}")
    fchain = as_finite_chain(chain)
    rate = decay_rate(chain)
    # pair covariances from the same primitive as the joint moment, so the
    # k = 1 remainder cancels exactly
    rtab = np.array([chain_joint_moment(fchain, (1, 1 + d)) for d in range(span)])
    max_ratio = 0.0
    worst: tuple[int, ...] = ()
    worst_rem = 0.0
    for _ in range(trials):
        idx = np.sort(stream.integers(1, span + 1, size=2 * k))
        moment = chain_joint_moment(fchain, idx)
        prod = 1.0
        for l in range(k):
            prod *= rtab[idx[2 * l + 1] - idx[2 * l]]
        remainder = moment - prod
        if remainder == 0.0:
            ratio = 0.0
        else:
            denom = sum(rate ** float(idx[2 * l] - idx[2 * l - 1]) for l in range(1, k))
            ratio = abs(remainder) / denom if denom > 0 else math.inf
        if ratio > max_ratio:
            max_ratio = ratio
            worst = tuple(int(i) for i in idx)
            worst_rem = float(remainder)
    return DecayReport(k, trials, span, rate, max_ratio, worst, worst_rem)


def _fmt(value: float) -> str:
    return format(value, ".12g")


def model_text(model: StationaryModel) -> str:
    """Canonical text form, the inverse of ``parse_model``."""
    if isinstance(model, IIDSymmetric):
        return f"iid:dist={model.distribution},var={_fmt(model.variance)}"
    if isinstance(model, GaussianAR1):
        return f"ar1:p={_fmt(model.p)}"
    if isinstance(model, TwoStateChain):
        return f"twostate:alpha={_fmt(model.alpha)}"
    if isinstance(model, FiniteMarkovChain):
        return model.source or f"chain:states={len(model.states)}"
    raise DomainError(f"unknown model {model!r}")


def _parse_args(argstr: str, text: str) -> dict[str, str]:
    args: dict[str, str] = {}
    if not argstr:
        return args
    for item in argstr.split(","):
        key, eq, val = item.partition("=")
        if not eq or not key:
            raise ParseError(f"expected key=value, got {item!r} in {text!r}")
        if key in args:
            raise ParseError(f"duplicate key {key!r} in {text!r}")
        args[key] = val
    return args


def _pop_float(args: dict[str, str], key: str, text: str, default: str | None = None) -> float:
    raw = args.pop(key, default)
    if raw is None:
        raise ParseError(f"model {text!r} is missing required key {key!r}")
    try:
        return float(raw)
    except ValueError as exc:
        raise ParseError(f"bad numeric value {raw!r} for {key!r} in {text!r}") from exc


def parse_model(text: str) -> StationaryModel:
    """Parse the model grammar ``kind:key=value,...``:

      iid:dist=rademacher,var=1      (dist and var optional)
      ar1:p=0.5
      twostate:alpha=0.5
      chain:file=PATH                (JSON: states, transition, stationary)
    """
    kind, _, argstr = text.partition(":")
    args = _parse_args(argstr, text)
    if kind == "iid":
        dist = args.pop("dist", RADEMACHER)
        var = _pop_float(args, "var", text, default="1")
        model: StationaryModel = IIDSymmetric(distribution=dist, variance=var)
    elif kind == "ar1":
        model = GaussianAR1(p=_pop_float(args, "p", text))
    elif kind == "twostate":
        model = TwoStateChain(alpha=_pop_float(args, "alpha", text))
    elif kind == "chain":
        path = args.pop("file", None)
        if path is None:
            raise ParseError(f"model {text!r} is missing required key 'file'")
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ParseError(f"cannot read chain file {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"chain file {path!r} is not valid JSON: {exc}") from exc
        try:
            model = FiniteMarkovChain(
                states=tuple(doc["states"]),
                transition=tuple(tuple(row) for row in doc["transition"]),
                stationary=tuple(doc["stationary"]),
                source=f"chain:file={path}",
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(
                f"chain file {path!r} needs 'states', 'transition', 'stationary'"
            ) from exc
    else:
        raise ParseError(f"unknown model kind {kind!r} in {text!r}")
    if args:
        raise ParseError(f"unknown keys {sorted(args)} in {text!r}")
    return model
