"""Quantitative flocking certificates.

Decay envelopes for products of flocking matrices and for the relative
velocities, the positive zero of ``z^r - c1 z^s - c2``, and the sufficient
conditions (with explicit position bounds) under which a flock driven by
rooted-leadership graphs with alternating leaders is guaranteed to flock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .dynamics import FlockParams, ReferenceState
from .errors import DimensionError, ParameterError

__all__ = [
    "SUBCRITICAL",
    "CRITICAL",
    "SUPERCRITICAL",
    "CertificateInputs",
    "CertificateReport",
    "DecayMeasurement",
    "norm_equivalence_lambda",
    "block_length",
    "weight_lower_bound",
    "product_decay_bound",
    "vhat_envelope",
    "self_bound_polynomial",
    "root_upper_bound",
    "unique_positive_zero",
    "certificate_constants",
    "case_two_threshold",
    "supercritical_sides",
    "certify",
    "fit_log_slope",
    "measured_decay",
]

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"

# s within this of 1 is treated as the critical case
_CRITICAL_ATOL = 1e-12


def norm_equivalence_lambda(N: int, d: int) -> float:
    """Tight constant in ``|w|_inf <= |w|_2 <= lam |w|_inf`` on ``(R^d)^(N-1)``."""
    if N < 2:
        raise DimensionError("norm equivalence on the reference system needs N >= 2")
    if d < 1:
        raise DimensionError("spatial dimension must be positive")
    return math.sqrt(d * (N - 1))


def block_length(N: int) -> int:
    """Number of consecutive rooted graphs whose composition is strongly rooted."""
    return (N - 1) ** 2


def weight_lower_bound(B: float, beta: float) -> float:
    """``R = (1 + 2 B^2)^(-beta)``, a lower bound on every ``psi`` while ``|xhat| <= B``."""
    return (1.0 + 2.0 * B * B) ** (-beta)


def product_decay_bound(t: int, h: float, R: float, N: int) -> float:
    """``(1 - (hR)^m)^floor((t+1)/m)`` with block length ``m = (N-1)^2``."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if not (0 < h * R < 1):
        raise ParameterError(f"need 0 < hR < 1, got h={h}, R={R}")
    m = block_length(N)
    if m == 0:
        raise DimensionError("decay bound needs N >= 2")
    return (1.0 - (h * R) ** m) ** ((t + 1) // m)


@dataclass(frozen=True)
class CertificateInputs:
    """Parameters and initial-data norms the certificates depend on.

    ``v0_norm`` and ``v0_inf_norm`` are taken over the full stacked ``N d``
    initial velocity vector.  ``lam`` defaults to the tight constant.
    """

    params: FlockParams
    x0_hat_norm: float
    v0_norm: float
    v0_inf_norm: float
    lam: float | None = None

    def __post_init__(self):
        if self.lam is None:
            object.__setattr__(self, "lam", norm_equivalence_lambda(self.params.N, self.params.d))
        if self.lam < 1:
            raise ParameterError(f"lambda must be at least 1, got {self.lam}")
        if min(self.x0_hat_norm, self.v0_norm, self.v0_inf_norm) < 0:
            raise ParameterError("norms must be nonnegative")

    @classmethod
    def from_state(cls, state, params: FlockParams, lam: float | None = None) -> CertificateInputs:
        if state.N < 2:
            raise DimensionError("certificates need at least two agents")
        xhat = state.x[:-1] - state.x[-1]
        return cls(
            params,
            x0_hat_norm=float(np.linalg.norm(xhat)),
            v0_norm=float(np.linalg.norm(state.v)),
            v0_inf_norm=float(np.abs(state.v).max()),
            lam=lam,
        )


def vhat_envelope(t: int, inputs: CertificateInputs, R: float) -> float:
    """Bound ``2 (1 - (hR)^m)^floor((t+1)/m) |v(0)|_inf`` on ``|vhat(t)|_inf``."""
    p = inputs.params
    return 2.0 * product_decay_bound(t, p.h, R, p.N) * inputs.v0_inf_norm


def self_bound_polynomial(z, r: float, s: float, c1: float, c2: float):
    """``z^r - c1 z^s - c2``."""
    z = np.asarray(z, dtype=float)
    return z**r - c1 * z**s - c2


def root_upper_bound(r: float, s: float, c1: float, c2: float) -> float:
    """``max((2 c1)^(1/(r-s)), (2 c2)^(1/r))``, an upper bound on the positive zero."""
    return max((2.0 * c1) ** (1.0 / (r - s)), (2.0 * c2) ** (1.0 / r))


def unique_positive_zero(
    r: float, s: float, c1: float, c2: float, rtol: float = 1e-15, max_iter: int = 200
) -> float:
    """Positive zero of ``z^r - c1 z^s - c2`` for ``c1, c2 > 0`` and ``r > s > 0``.

    Bisection on ``[0, M (1 + 1e-6)]`` with ``M`` the a-priori bound, widening
    the bracket geometrically if rounding spoils the sign there.  Stops when
    the bracket is narrower than ``rtol`` relative to its upper end, when it
    cannot be split further in floating point, or after ``max_iter`` halvings.
    """
    if not (c1 > 0 and c2 > 0):
        raise ParameterError(f"need c1, c2 > 0, got c1={c1}, c2={c2}")
    if not (r > s > 0):
        raise ParameterError(f"need r > s > 0, got r={r}, s={s}")

    # z^(-s) F(z) has the sign of F on z > 0 and does not overflow as early
    def sign(z: float) -> float:
        return z ** (r - s) - c1 - c2 * z ** (-s)

    lo = 0.0
    hi = root_upper_bound(r, s, c1, c2) * (1.0 + 1e-6)
    for _ in range(64):
        if sign(hi) >= 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ArithmeticError("could not bracket the positive zero")

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sign(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    # hi always satisfies F >= 0; pick whichever end is closer to a zero
    flo = abs(lo**r - c1 * lo**s - c2) if lo > 0 else math.inf
    fhi = abs(hi**r - c1 * hi**s - c2)
    return lo if flo < fhi else hi


class _Constants(NamedTuple):
    a: float
    b: float
    s: float
    m: int


def certificate_constants(inputs: CertificateInputs) -> _Constants:
    """``a = 2 sqrt2 lam h^(1-m) m |v(0)|``, ``b = 1 + sqrt2 |xhat(0)|``, ``s = 2 beta m``."""
    p = inputs.params
    m = block_length(p.N)
    a = 2.0 * math.sqrt(2.0) * inputs.lam * p.h ** (1 - m) * m * inputs.v0_norm
    b = 1.0 + math.sqrt(2.0) * inputs.x0_hat_norm
    s = 2.0 * p.beta * m
    return _Constants(a, b, s, m)


def case_two_threshold(inputs: CertificateInputs) -> float:
    """Critical-case bound on ``|v(0)|``: ``h^(m-1) / (2 sqrt2 m lam)``."""
    p = inputs.params
    m = block_length(p.N)
    return p.h ** (m - 1) / (2.0 * math.sqrt(2.0) * m * inputs.lam)


def supercritical_sides(inputs: CertificateInputs) -> tuple[float, float]:
    """Left and right sides of the supercritical hypothesis, evaluated as displayed.

    The hypothesis holds when the left side exceeds the right side.
    """
    p = inputs.params
    a, b, s, _ = certificate_constants(inputs)
    if not s > 1:
        raise ParameterError(f"supercritical hypothesis needs s > 1, got s={s}")
    e = 1.0 / (s - 1.0)
    v0, lam, N = inputs.v0_norm, inputs.lam, p.N
    if a == 0:
        lhs = math.inf
    else:
        lhs = (1.0 / a) ** e * ((1.0 / s) ** e - (1.0 / s) ** (s * e)) - b
    rhs = 8.0 * lam**2 * v0**2 * s**e / N**2 * a**e + 4.0 * math.sqrt(2.0) * lam * v0 / N
    return lhs, rhs


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of checking the flocking hypotheses for one initial configuration.

    ``B0`` is the guaranteed bound on ``|xhat(t)|`` and is ``None`` when the
    hypothesis fails; a failed hypothesis means "not certified", not
    "diverges".  ``bound_source`` records where the ``B0`` formula comes from.
    """

    case: str
    hypothesis_holds: bool
    a: float
    b: float
    s: float
    lam: float
    block_length: int
    B0: float | None
    R: float | None
    decay_base: float | None
    bound_source: str
    detail: str

    @property
    def status(self) -> str:
        return "certified" if self.hypothesis_holds else "not certified"

    def envelope(self, t: int, inputs: CertificateInputs) -> float:
        """Certified bound on ``|vhat(t)|_inf``."""
        if self.R is None:
            raise ValueError("no envelope: hypothesis does not hold")
        return vhat_envelope(t, inputs, self.R)

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "case": self.case,
            "hypothesis_holds": self.hypothesis_holds,
            "a": self.a,
            "b": self.b,
            "s": self.s,
            "lambda": self.lam,
            "block_length": self.block_length,
            "B0": self.B0,
            "R": self.R,
            "decay_base": self.decay_base,
            "bound_source": self.bound_source,
            "detail": self.detail,
        }


def _b0_from_z(z: float) -> float:
    return math.sqrt(max(z * z - 1.0, 0.0) / 2.0)


def certify(inputs: CertificateInputs) -> CertificateReport:
    """Decide which flocking hypothesis applies and compute the position bound.

    Raises ``ParameterError`` unless ``h < 1/(N+1)``.
    """
    p = inputs.params
    p.require_step_condition()
    if p.N < 2:
        raise DimensionError("certificates need at least two agents")
    a, b, s, m = certificate_constants(inputs)

    if abs(s - 1.0) <= _CRITICAL_ATOL:
        case = CRITICAL
    elif s < 1.0:
        case = SUBCRITICAL
    else:
        case = SUPERCRITICAL

    B0 = None
    source = "proof-extracted"
    if a == 0.0:
        # no initial velocity: nothing moves, every case reduces to Z <= b
        holds = True
        B0 = _b0_from_z(b)
        detail = "zero initial velocity"
    elif case == SUBCRITICAL:
        holds = True
        if s == 0.0:
            U0 = a + b
        else:
            U0 = unique_positive_zero(1.0, s, a, b)
        B0 = _b0_from_z(U0)
        detail = f"U0 = {U0!r}"
    elif case == CRITICAL:
        threshold = case_two_threshold(inputs)
        holds = inputs.v0_norm < threshold
        detail = f"|v(0)| = {inputs.v0_norm!r}, threshold = {threshold!r}"
        if holds:
            B0 = math.sqrt(2.0) / 2.0 * math.sqrt(max((b / (1.0 - a)) ** 2 - 1.0, 0.0))
    else:
        lhs, rhs = supercritical_sides(inputs)
        holds = lhs > rhs
        detail = f"lhs = {lhs!r}, rhs = {rhs!r}"
        if holds:
            z_star = (1.0 / (s * a)) ** (1.0 / (s - 1.0))
            B0 = _b0_from_z(z_star)
            detail += f", z_* = {z_star!r}"

    R = decay = None
    if holds:
        R = weight_lower_bound(B0, p.beta)
        decay = 1.0 - (p.h * R) ** m
    return CertificateReport(
        case=case,
        hypothesis_holds=holds,
        a=a,
        b=b,
        s=s,
        lam=inputs.lam,
        block_length=m,
        B0=B0,
        R=R,
        decay_base=decay,
        bound_source=source,
        detail=detail,
    )


@dataclass(frozen=True)
class DecayMeasurement:
    sup_xhat: float
    vhat_inf: np.ndarray
    fitted_rate: float
    exact_consensus: bool

    @property
    def final_vhat_inf(self) -> float:
        return float(self.vhat_inf[-1])


_FIT_FLOOR = 1e-13


def fit_log_slope(series) -> float:
    """Least-squares slope of ``log(series)`` per step over the tail.

    The tail is the last half of the steps whose value exceeds ``1e-13``.
    Returns 0.0 if fewer than two such steps exist.
    """
    series = np.asarray(series, dtype=float)
    idx = np.flatnonzero(series > _FIT_FLOOR)
    if idx.size < 2:
        return 0.0
    tail = idx[idx.size // 2 :]
    if tail.size < 2:
        tail = idx[-2:]
    slope, _ = np.polyfit(tail.astype(float), np.log(series[tail]), 1)
    return float(slope)


def measured_decay(trajectory: Sequence[ReferenceState]) -> DecayMeasurement:
    """Empirical position bound and velocity decay rate along a reference trajectory."""
    if len(trajectory) < 2:
        raise ValueError("trajectory needs at least two states")
    xhat_norms = np.array([r.xhat_norm for r in trajectory])
    vhat_inf = np.array([r.vhat_inf_norm for r in trajectory])
    consensus = bool(np.all(vhat_inf == 0.0))
    rate = 0.0 if consensus else fit_log_slope(vhat_inf)
    return DecayMeasurement(float(xhat_norms.max()), vhat_inf, rate, consensus)
