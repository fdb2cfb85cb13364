"""Scalar function families used as bound parameters.

Three kinds of parameters appear in the inequalities:

* gauges ``h``: non-negative, nondecreasing, convex functions on [0, inf)
* factor pairs ``(f, g)`` with ``f(t) g(t) = t``, here ``f = t^alpha`` and
  ``g = t^(1 - alpha)``
* Hölder exponents ``(p, q)`` with ``1/p + 1/q = 1``

All of them are small frozen dataclasses. Construction is permissive so that
hypothesis checks can report an invalid parameter instead of refusing it;
``validate_*`` helpers and the ``is_valid`` properties do the checking.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

import numpy as np

from .errors import ConfigError, InvalidPairError, NegativeInputError, OutOfRangeError

logger = logging.getLogger("numrad")

# Sampled convexity certificate
GAUGE_GRID_POINTS = 256
GAUGE_GRID_MAX = 10.0
GAUGE_GRID_TOL = 1e-9

PAIR_SAMPLE_POINTS = 64
PAIR_TOL = 1e-12
HOLDER_TOL = 1e-12


@dataclass(frozen=True)
class PowerGauge:
    """``h(t) = t^r``; a gauge only for ``r >= 1``."""

    r: float
    family: str = field(default="power", init=False, repr=False)

    def __call__(self, t):
        return np.power(t, self.r)

    @property
    def literal(self) -> str:
        return f"power:r={self.r:g}"


@dataclass(frozen=True)
class ExpM1Gauge:
    """``h(t) = exp(s t) - 1``."""

    s: float
    family: str = field(default="expm1", init=False, repr=False)

    def __call__(self, t):
        return np.expm1(self.s * np.asarray(t, dtype=np.float64))

    @property
    def literal(self) -> str:
        return f"expm1:s={self.s:g}"


@dataclass(frozen=True)
class HingeGauge:
    """``h(t) = max(0, t - c)``; non-smooth at ``c``."""

    c: float
    family: str = field(default="hinge", init=False, repr=False)

    def __call__(self, t):
        return np.maximum(0.0, np.asarray(t, dtype=np.float64) - self.c)

    @property
    def literal(self) -> str:
        return f"hinge:c={self.c:g}"


GaugeH = Union[PowerGauge, ExpM1Gauge, HingeGauge]

GAUGE_FAMILIES = {
    "power": (PowerGauge, "r"),
    "expm1": (ExpM1Gauge, "s"),
    "hinge": (HingeGauge, "c"),
}


@dataclass
class GaugeValidity:
    """Outcome of the sampled gauge certificate."""

    gauge: str
    valid: bool
    failures: List[str] = field(default_factory=list)
    min_first_difference: float = 0.0
    min_second_difference: float = 0.0

    def to_dict(self) -> Dict[str, object]:
        return {
            "gauge": self.gauge,
            "valid": self.valid,
            "failures": list(self.failures),
            "min_first_difference": self.min_first_difference,
            "min_second_difference": self.min_second_difference,
        }


def gauge_eval(h: GaugeH, t: float) -> float:
    """
    Evaluate a gauge at a non-negative point.

    Args:
        h: Gauge to evaluate
        t: Argument, must be >= 0

    Returns:
        h(t) as a float
    """
    if t < 0:
        raise NegativeInputError(f"Gauge argument must be non-negative, got {t}")
    return float(h(float(t)))


def validate_gauge(h: GaugeH) -> GaugeValidity:
    """
    Check that ``h`` is non-negative, nondecreasing and convex.

    Monotonicity and convexity are certified on a 256-point grid over
    [0, 10] through first and second differences. Parameter ranges are
    checked directly: a power below 1 is concave, ``s <= 0`` gives a
    non-positive exponential and a negative hinge offset is rejected.
    """
    failures = []
    if isinstance(h, PowerGauge) and h.r < 1:
        failures.append(f"power exponent r={h.r:g} < 1 is not convex")
    elif isinstance(h, ExpM1Gauge) and h.s <= 0:
        failures.append(f"expm1 rate s={h.s:g} must be positive")
    elif isinstance(h, HingeGauge) and h.c < 0:
        failures.append(f"hinge offset c={h.c:g} must be non-negative")

    grid = np.linspace(0.0, GAUGE_GRID_MAX, GAUGE_GRID_POINTS)
    with np.errstate(over="ignore", invalid="ignore"):
        values = np.asarray(h(grid), dtype=np.float64)
    if not np.all(np.isfinite(values)):
        failures.append("non-finite values on the certification grid")
        return GaugeValidity(h.literal, False, failures)

    first = np.diff(values)
    second = np.diff(values, n=2)
    if values[0] < 0:
        failures.append(f"h(0) = {values[0]:g} is negative")
    if first.min() < -GAUGE_GRID_TOL:
        failures.append(f"decreasing on the grid (first difference {first.min():.3e})")
    if second.min() < -GAUGE_GRID_TOL:
        failures.append(f"not convex on the grid (second difference {second.min():.3e})")

    return GaugeValidity(
        gauge=h.literal,
        valid=not failures,
        failures=failures,
        min_first_difference=float(first.min()),
        min_second_difference=float(second.min()),
    )


@dataclass(frozen=True)
class FactorPair:
    """Power factor pair ``f(t) = t^alpha``, ``g(t) = t^(1 - alpha)``."""

    alpha: float

    def f(self, t):
        return np.power(t, self.alpha)

    def g(self, t):
        return np.power(t, 1.0 - self.alpha)

    @property
    def is_valid(self) -> bool:
        return bool(np.isfinite(self.alpha)) and 0.0 <= self.alpha <= 1.0

    def validate(self) -> "FactorPair":
        """Raise ``InvalidPairError`` unless ``alpha`` is in [0, 1] and ``f g = id`` on samples."""
        if not self.is_valid:
            raise InvalidPairError(f"Factor exponent alpha must lie in [0, 1], got {self.alpha}")
        samples = np.linspace(0.0, GAUGE_GRID_MAX, PAIR_SAMPLE_POINTS)
        product = self.f(samples) * self.g(samples)
        error = np.abs(product - samples) / np.maximum(1.0, samples)
        if error.max() > PAIR_TOL:
            raise InvalidPairError(f"f(t) g(t) deviates from t by {error.max():.3e}")
        return self

    @property
    def literal(self) -> str:
        return f"alpha={self.alpha:g}"


@dataclass(frozen=True)
class HolderPair:
    p: float
    q: float

    @property
    def is_valid(self) -> bool:
        return self.p > 1 and self.q > 1 and abs(1.0 / self.p + 1.0 / self.q - 1.0) <= HOLDER_TOL

    @property
    def literal(self) -> str:
        return f"p={self.p:g}"


@dataclass(frozen=True)
class FactorQuad:
    """Two factor pairs ``(f1, g1)`` and ``(f2, g2)``."""

    pair1: FactorPair
    pair2: FactorPair

    @property
    def is_valid(self) -> bool:
        return self.pair1.is_valid and self.pair2.is_valid


def factor_eval(pair: FactorPair, t: float) -> Tuple[float, float]:
    """Return ``(f(t), g(t))`` for ``t >= 0``."""
    if t < 0:
        raise NegativeInputError(f"Factor argument must be non-negative, got {t}")
    return float(pair.f(float(t))), float(pair.g(float(t)))


def holder_conjugate(p: float) -> HolderPair:
    """
    Build the Hölder pair ``(p, p / (p - 1))``.

    Args:
        p: Exponent, strictly greater than 1

    Returns:
        HolderPair with ``1/p + 1/q = 1``
    """
    if not p > 1:
        raise OutOfRangeError(f"Hölder exponent must be > 1, got {p}")
    return HolderPair(float(p), float(p) / (float(p) - 1.0))


def young_chain(a: float, b: float, holder: HolderPair, r: float) -> Tuple[float, float, float]:
    """
    The scalar Young chain ``ab <= a^p/p + b^q/q <= (a^(pr)/p + b^(qr)/q)^(1/r)``.

    Returns the three terms so callers can compare them.
    """
    p, q = holder.p, holder.q
    product = a * b
    young = a ** p / p + b ** q / q
    refined = (a ** (p * r) / p + b ** (q * r) / q) ** (1.0 / r)
    return product, young, refined


def holder_sum(a: np.ndarray, b: np.ndarray, holder: HolderPair) -> Tuple[float, float]:
    """``(sum a_i b_i, ||a||_p ||b||_q)`` for non-negative tuples."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if np.any(a < 0) or np.any(b < 0):
        raise NegativeInputError("Hölder sums take non-negative tuples")
    lhs = float(np.dot(a, b))
    rhs = float(np.sum(a ** holder.p) ** (1.0 / holder.p) * np.sum(b ** holder.q) ** (1.0 / holder.q))
    return lhs, rhs


def _parse_float(text: str, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"Invalid number for '{name}': {text!r}", field=name)


def _split_assignment(literal: str) -> Tuple[str, str]:
    if "=" not in literal:
        raise ConfigError(f"Expected 'name=value', got {literal!r}")
    name, value = literal.split("=", 1)
    return name.strip(), value.strip()


def parse_gauge(literal: str) -> GaugeH:
    """
    Parse a gauge literal such as ``power:r=2``, ``expm1:s=1`` or ``hinge:c=0.5``.
    """
    if ":" not in literal:
        raise ConfigError(
            f"Invalid gauge literal: {literal!r}. Must look like one of: "
            f"{', '.join(f'{k}:{v[1]}=<value>' for k, v in GAUGE_FAMILIES.items())}",
            field="gauge",
        )
    family, assignment = literal.split(":", 1)
    family = family.strip().lower()
    if family not in GAUGE_FAMILIES:
        raise ConfigError(
            f"Invalid gauge family: {family}. Must be one of: {', '.join(GAUGE_FAMILIES)}",
            field="gauge",
        )
    cls, param = GAUGE_FAMILIES[family]
    name, value = _split_assignment(assignment)
    if name != param:
        raise ConfigError(f"Gauge '{family}' takes parameter '{param}', got '{name}'", field="gauge")
    return cls(_parse_float(value, param))


def parse_pair(literal: Union[str, float]) -> FactorPair:
    """Parse ``alpha=0.25`` (or a bare number) into a FactorPair."""
    if isinstance(literal, (int, float)):
        return FactorPair(float(literal))
    text = literal.strip()
    if "=" in text:
        name, text = _split_assignment(text)
        if name != "alpha":
            raise ConfigError(f"Factor pair literal must be 'alpha=<value>', got {literal!r}", field="alpha")
    return FactorPair(_parse_float(text, "alpha"))


def parse_holder(literal: Union[str, float]) -> HolderPair:
    """Parse ``p=2`` (or a bare number) into the conjugate pair."""
    if isinstance(literal, (int, float)):
        return holder_conjugate(float(literal))
    text = literal.strip()
    if "=" in text:
        name, text = _split_assignment(text)
        if name != "p":
            raise ConfigError(f"Hölder literal must be 'p=<value>', got {literal!r}", field="p")
    return holder_conjugate(_parse_float(text, "p"))
