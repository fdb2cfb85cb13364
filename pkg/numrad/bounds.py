"""Catalog of numerical radius inequalities and their evaluators.

Every inequality is stored as ``lhs <= rhs``. Lower bounds on ``w`` put the
norm expression on the left, upper bounds put the (gauge-transformed)
numerical radius on the left. Evaluation never aborts on a violated
hypothesis; the report says which hypotheses failed so the harness can gate
or count the trial.
"""

import logging
import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import ConfigError, MissingParamError, NotPSDError, UnknownBoundError
from .gauges import (
    ExpM1Gauge,
    FactorPair,
    FactorQuad,
    GaugeH,
    HingeGauge,
    HolderPair,
    PowerGauge,
    holder_conjugate,
    parse_gauge,
    parse_holder,
    validate_gauge,
)
from .matrix import (
    BlockMatrix2x2,
    ComplexMatrix,
    abs_fun,
    abs_power,
    adjoint,
    as_matrix,
    cartesian,
    matfun_psd,
    operator_norm,
)
from .numrange import DEFAULT_GRID, DEFAULT_TOL, RadiusResult, numerical_radius, spectral_radius_psd_product

logger = logging.getLogger("numrad")

NORMALITY_TOL = 1e-9
PSD_TOL = 1e-10
SLOPE_SAFETY = 1.25
RELATIVE_FLOOR = 1e-10
SPECTRAL_IDENTITY_TOL = 1e-9


class BoundId(str, Enum):
    NORM_SANDWICH_LOWER = "norm_sandwich_lower"
    NORM_SANDWICH_UPPER = "norm_sandwich_upper"
    POWER_INEQUALITY = "power_inequality"
    OFFDIAG_HALF_SUM = "offdiag_half_sum"
    ABS_SUM_UPPER = "abs_sum_upper"
    ABS_SQUARE_LOWER = "abs_square_lower"
    ABS_SQUARE_UPPER = "abs_square_upper"
    CARTESIAN_POWER_LOWER = "cartesian_power_lower"
    CARTESIAN_POWER_UPPER = "cartesian_power_upper"
    OFFDIAG_GAUGE = "offdiag_gauge"
    OFFDIAG_POWER = "offdiag_power"
    OFFDIAG_PRODUCT_LOWER = "offdiag_product_lower"
    PSD_PRODUCT_SPECTRAL = "psd_product_spectral"
    NORMAL_SUM_POWER = "normal_sum_power"
    OFFDIAG_HOLDER = "offdiag_holder"
    OFFDIAG_HOLDER_SWAPPED = "offdiag_holder_swapped"
    DIAG_GAUGE = "diag_gauge"
    DIAG_POWER = "diag_power"
    SINGLE_POWER = "single_power"
    FULL_GAUGE = "full_gauge"
    SUM_DIFFERENCE_POWER = "sum_difference_power"
    DIAG_GAUGE_MIXED = "diag_gauge_mixed"
    DIAG_POWER_MIXED = "diag_power_mixed"
    SINGLE_POWER_MIXED = "single_power_mixed"
    SINGLE_ABS_POWER = "single_abs_power"
    DIAG_GAUGE_YOUNG = "diag_gauge_young"
    SINGLE_YOUNG_SQUARE = "single_young_square"
    SINGLE_YOUNG = "single_young"
    DIAG_CARTESIAN_HOLDER = "diag_cartesian_holder"
    DIAG_CARTESIAN_HOLDER_SWAPPED = "diag_cartesian_holder_swapped"
    SINGLE_CARTESIAN_HOLDER = "single_cartesian_holder"
    SINGLE_CARTESIAN_POWER = "single_cartesian_power"


class OperandShape(str, Enum):
    """Which blocks of the carrier an evaluator reads."""

    SINGLE = "single"      # a
    OFFDIAG = "offdiag"    # b, c
    DIAG = "diag"          # a, d
    PAIR = "pair"          # a, b
    FULL = "full"          # a, b, c, d


class Direction(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    IDENTITY = "identity"


# Hypothesis families
R_AT_LEAST_ONE = frozenset({
    BoundId.OFFDIAG_POWER, BoundId.NORMAL_SUM_POWER, BoundId.DIAG_POWER, BoundId.SINGLE_POWER,
    BoundId.SUM_DIFFERENCE_POWER, BoundId.DIAG_POWER_MIXED, BoundId.SINGLE_POWER_MIXED,
    BoundId.SINGLE_ABS_POWER,
})
R_AT_LEAST_TWO = frozenset({
    BoundId.CARTESIAN_POWER_LOWER, BoundId.CARTESIAN_POWER_UPPER, BoundId.OFFDIAG_HOLDER,
    BoundId.OFFDIAG_HOLDER_SWAPPED, BoundId.DIAG_CARTESIAN_HOLDER, BoundId.DIAG_CARTESIAN_HOLDER_SWAPPED,
    BoundId.SINGLE_CARTESIAN_HOLDER, BoundId.SINGLE_CARTESIAN_POWER,
})
YOUNG_EXPONENT = frozenset({BoundId.DIAG_GAUGE_YOUNG, BoundId.SINGLE_YOUNG_SQUARE, BoundId.SINGLE_YOUNG})


@dataclass(frozen=True)
class BoundParams:
    """Parameters of one bound evaluation; unused fields stay None."""

    gauge: Optional[GaugeH] = None
    pair: Optional[FactorPair] = None
    quad: Optional[FactorQuad] = None
    holder: Optional[HolderPair] = None
    r: Optional[float] = None
    alpha: Optional[float] = None
    n: Optional[int] = None

    def merged(self, overrides: Optional["BoundParams"]) -> "BoundParams":
        """Copy with every non-None field of ``overrides`` taking precedence."""
        if overrides is None:
            return self
        changes = {f.name: getattr(overrides, f.name) for f in fields(overrides)
                   if getattr(overrides, f.name) is not None}
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {}
        if self.gauge is not None:
            result["gauge"] = self.gauge.literal
        if self.pair is not None:
            result["pair"] = self.pair.alpha
        if self.quad is not None:
            result["quad"] = [self.quad.pair1.alpha, self.quad.pair2.alpha]
        if self.holder is not None:
            result["p"] = self.holder.p
        for name in ("r", "alpha", "n"):
            value = getattr(self, name)
            if value is not None:
                result[name] = value
        return result

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BoundParams":
        """
        Build parameters from literals as they appear in config files and on the CLI.

        Keys: ``gauge`` (``power:r=2``), ``pair`` or ``alpha`` (a number),
        ``alpha2`` or ``quad`` (second exponent or a two-element list), ``p``,
        ``r`` and ``n``.
        """
        known = {"gauge", "pair", "alpha", "alpha2", "quad", "p", "r", "n"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown bound parameter(s): {', '.join(sorted(unknown))}",
                              field=sorted(unknown)[0])

        kwargs: Dict[str, Any] = {}
        if data.get("gauge") is not None:
            gauge = data["gauge"]
            kwargs["gauge"] = parse_gauge(gauge) if isinstance(gauge, str) else gauge
        alpha = data.get("alpha", data.get("pair"))
        if alpha is not None:
            kwargs["alpha"] = float(alpha)
            kwargs["pair"] = FactorPair(float(alpha))
        quad = data.get("quad")
        if quad is not None:
            if not isinstance(quad, (list, tuple)) or len(quad) != 2:
                raise ConfigError("quad must be a list of two exponents", field="quad")
            kwargs["quad"] = FactorQuad(FactorPair(float(quad[0])), FactorPair(float(quad[1])))
        elif alpha is not None:
            second = data.get("alpha2")
            second = float(alpha) if second is None else float(second)
            kwargs["quad"] = FactorQuad(FactorPair(float(alpha)), FactorPair(second))
        if data.get("p") is not None:
            kwargs["holder"] = parse_holder(data["p"])
        if data.get("r") is not None:
            kwargs["r"] = float(data["r"])
        if data.get("n") is not None:
            kwargs["n"] = int(data["n"])
        return cls(**kwargs)


@dataclass
class HypothesisReport:
    """Per-hypothesis outcome for one bound on one instance."""

    ok: bool
    checks: Dict[str, bool] = field(default_factory=dict)
    messages: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "checks": dict(self.checks), "messages": list(self.messages)}


@dataclass
class BoundReport:
    """One inequality evaluation."""

    id: BoundId
    lhs: float
    rhs: float
    slack: float
    holds: bool
    tol_effective: float
    hypotheses: HypothesisReport
    intermediates: Dict[str, float] = field(default_factory=dict)

    @property
    def hypotheses_ok(self) -> bool:
        return self.hypotheses.ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "tol": self.tol_effective,
            "hypotheses": self.hypotheses.to_dict(),
            "intermediates": dict(self.intermediates),
        }


@dataclass(frozen=True)
class TightnessEntry:
    id: BoundId
    rhs: float
    slack: float

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id.value, "rhs": self.rhs, "slack": self.slack}


Sampler = Callable[[np.random.Generator], BoundParams]


@dataclass(frozen=True)
class CatalogEntry:
    """Static description of one inequality."""

    id: BoundId
    anchor: str
    shape: OperandShape
    direction: Direction
    required: Tuple[str, ...]
    hypotheses: str
    defaults: BoundParams
    sampler: Sampler
    block_kinds: Mapping[str, str] = field(default_factory=dict)

    @property
    def takes_gauge(self) -> bool:
        return "gauge" in self.required

    @property
    def alias(self) -> str:
        return _SOURCES[self.id][0]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id.value,
            "alias": self.alias,
            "anchor": self.anchor,
            "shape": self.shape.value,
            "direction": self.direction.value,
            "required": list(self.required),
            "hypotheses": self.hypotheses,
            "defaults": self.defaults.to_dict(),
            "block_kinds": dict(self.block_kinds),
        }


class _RadiusTracker:
    """Computes certified radii and accumulates their propagated uncertainty."""

    def __init__(self, tol: float, grid: int):
        self.tol = tol
        self.grid = grid
        self.uncertainty = 0.0
        self.radii: Dict[str, float] = {}

    def w(self, m: ComplexMatrix, label: str, abs_cap: bool = True) -> RadiusResult:
        result = numerical_radius(m, tol=self.tol, grid=self.grid, abs_cap=abs_cap)
        self.radii[label] = result.value
        return result

    def through(self, phi: Callable[[float], float], result: RadiusResult) -> float:
        """``phi(w)``, adding ``1.25 * slope * certified_tolerance`` to the uncertainty."""
        value = result.value
        spread = result.certified_tolerance
        centre = float(phi(value))
        up = float(phi(value + spread))
        down = float(phi(max(value - spread, 0.0)))
        self.uncertainty += SLOPE_SAFETY * max(abs(up - centre), abs(centre - down))
        return centre


# Operator expressions shared by the evaluators

def _norm(x: ComplexMatrix) -> float:
    return operator_norm(x)


def _abs_pair_norm(x: ComplexMatrix, first: float, second: float, mixed: bool = False) -> float:
    """``|| |x|^first + |x|^second ||``, or ``|| |x|^first + |x*|^second ||`` when mixed."""
    other = adjoint(x) if mixed else x
    return _norm(abs_power(x, first) + abs_power(other, second))


def _gauge_pair_norm(h: GaugeH, pair: FactorPair, x: ComplexMatrix, mixed: bool = False) -> float:
    """``|| h(f^2(|x|)) + h(g^2(|x|)) ||``; ``|x*|`` in the second term when mixed."""
    other = adjoint(x) if mixed else x
    first = abs_fun(x, lambda t: h(np.power(t, 2 * pair.alpha)))
    second = abs_fun(other, lambda t: h(np.power(t, 2 * (1 - pair.alpha))))
    return _norm(first + second)


def _young_norm(h: Optional[GaugeH], alpha: float, holder: HolderPair, r: float,
                x: ComplexMatrix, power: float = 1.0) -> float:
    """``|| (1/p) h(|x|^(p r a power)) + (1/q) h(|x*|^(q r (1-a) power)) ||`` with ``h = id`` when None."""
    p, q = holder.p, holder.q
    gauge = h if h is not None else (lambda t: t)
    first = abs_fun(x, lambda t: gauge(np.power(t, p * r * alpha * power)))
    second = abs_fun(adjoint(x), lambda t: gauge(np.power(t, q * r * (1 - alpha) * power)))
    return _norm(first / p + second / q)


def _holder_terms(first: ComplexMatrix, second: ComplexMatrix, quad: FactorQuad,
                  holder: HolderPair, r: float, swapped: bool) -> Tuple[float, float]:
    """
    The f-side and g-side norms for one pair of operators:

    ``|| f1^{rp}(|first|) + f2^{rp}(|second|) ||`` and
    ``|| g1^{rq}(|first|) + g2^{rq}(|second|) ||``; with ``swapped`` the second
    pair enters as ``g2`` on the f-side and ``f2`` on the g-side.
    """
    p, q = holder.p, holder.q
    a1, a2 = quad.pair1.alpha, quad.pair2.alpha
    f2, g2 = (1 - a2, a2) if swapped else (a2, 1 - a2)
    f_side = _norm(abs_power(first, r * p * a1) + abs_power(second, r * p * f2))
    g_side = _norm(abs_power(first, r * q * (1 - a1)) + abs_power(second, r * q * g2))
    return f_side, g_side


def _cartesian_sums(x: ComplexMatrix) -> Tuple[ComplexMatrix, ComplexMatrix]:
    re, im = cartesian(x)
    return re + im, re - im


def _require(entry: CatalogEntry, params: BoundParams) -> None:
    missing = [name for name in entry.required if _param_value(params, name) is None]
    if missing:
        raise MissingParamError(f"Bound '{entry.id.value}' needs parameter(s): {', '.join(missing)}")


def _param_value(params: BoundParams, name: str) -> Any:
    if name == "alpha":
        if params.alpha is not None:
            return params.alpha
        return params.pair.alpha if params.pair is not None else None
    return getattr(params, name)


def _alpha(params: BoundParams) -> float:
    return float(_param_value(params, "alpha"))


# Evaluators: (blocks, params, tracker) -> (lhs, rhs, intermediates)

Evaluation = Tuple[float, float, Dict[str, float]]


def _eval_norm_sandwich_lower(blocks, params, tracker) -> Evaluation:
    a = blocks.a
    w = tracker.w(a, "w_a")
    norm = _norm(a)
    return 0.5 * norm, tracker.through(lambda v: v, w), {"norm_a": norm}


def _eval_norm_sandwich_upper(blocks, params, tracker) -> Evaluation:
    a = blocks.a
    w = tracker.w(a, "w_a")
    norm = _norm(a)
    return tracker.through(lambda v: v, w), norm, {"norm_a": norm}


def _eval_power_inequality(blocks, params, tracker) -> Evaluation:
    a, n = blocks.a, int(params.n)
    w_power = tracker.w(np.linalg.matrix_power(a, n), "w_a_power")
    w = tracker.w(a, "w_a")
    lhs = tracker.through(lambda v: v, w_power)
    rhs = tracker.through(lambda v: v ** n, w)
    return lhs, rhs, {"n": float(n)}


def _eval_offdiag_half_sum(blocks, params, tracker) -> Evaluation:
    w = tracker.w(blocks.offdiag_part().embed(), "w_s")
    norm_b, norm_c = _norm(blocks.b), _norm(blocks.c)
    return tracker.through(lambda v: v, w), 0.5 * (norm_b + norm_c), {"norm_b": norm_b, "norm_c": norm_c}


def _eval_abs_sum_upper(blocks, params, tracker) -> Evaluation:
    a = blocks.a
    # certified without the cap this bound supplies
    w = tracker.w(a, "w_a", abs_cap=False)
    rhs = 0.5 * _abs_pair_norm(a, 1.0, 1.0, mixed=True)
    return tracker.through(lambda v: v, w), rhs, {}


def _eval_abs_square_lower(blocks, params, tracker) -> Evaluation:
    a = blocks.a
    w = tracker.w(a, "w_a")
    total = _abs_pair_norm(a, 2.0, 2.0, mixed=True)
    return 0.25 * total, tracker.through(lambda v: v * v, w), {"abs_square_sum": total}


def _eval_abs_square_upper(blocks, params, tracker) -> Evaluation:
    a = blocks.a
    w = tracker.w(a, "w_a")
    total = _abs_pair_norm(a, 2.0, 2.0, mixed=True)
    return tracker.through(lambda v: v * v, w), 0.5 * total, {"abs_square_sum": total}


def _cartesian_power_norm(a: ComplexMatrix, r: float) -> float:
    plus, minus = _cartesian_sums(a)
    return _norm(abs_power(plus, r) + abs_power(minus, r))


def _eval_cartesian_power_lower(blocks, params, tracker) -> Evaluation:
    r = float(params.r)
    w = tracker.w(blocks.a, "w_a")
    total = _cartesian_power_norm(blocks.a, r)
    return 2 ** (-r / 2 - 1) * total, tracker.through(lambda v: v ** r, w), {"cartesian_sum": total}


def _eval_cartesian_power_upper(blocks, params, tracker) -> Evaluation:
    r = float(params.r)
    w = tracker.w(blocks.a, "w_a")
    total = _cartesian_power_norm(blocks.a, r)
    return tracker.through(lambda v: v ** r, w), 0.5 * total, {"cartesian_sum": total}


def _eval_offdiag_gauge(blocks, params, tracker) -> Evaluation:
    h, pair = params.gauge, params.pair
    w = tracker.w(blocks.offdiag_part().embed(), "w_s")
    term_b = _gauge_pair_norm(h, pair, blocks.b)
    term_c = _gauge_pair_norm(h, pair, blocks.c)
    lhs = tracker.through(lambda v: h(v), w)
    return lhs, 0.25 * (term_b + term_c), {"term_b": term_b, "term_c": term_c}


def _eval_offdiag_power(blocks, params, tracker) -> Evaluation:
    r, alpha = float(params.r), _alpha(params)
    w = tracker.w(blocks.offdiag_part().embed(), "w_s")
    term_b = _abs_pair_norm(blocks.b, 2 * r * alpha, 2 * r * (1 - alpha))
    term_c = _abs_pair_norm(blocks.c, 2 * r * alpha, 2 * r * (1 - alpha))
    lhs = tracker.through(lambda v: v ** r, w)
    return lhs, 0.25 * (term_b + term_c), {"term_b": term_b, "term_c": term_c}


def _eval_offdiag_product_lower(blocks, params, tracker) -> Evaluation:
    w_product = tracker.w(blocks.b @ blocks.c, "w_bc")
    w = tracker.w(blocks.offdiag_part().embed(), "w_s")
    lhs = tracker.through(lambda v: math.sqrt(max(v, 0.0)), w_product)
    return lhs, tracker.through(lambda v: v, w), {}


def _eval_psd_product_spectral(blocks, params, tracker) -> Evaluation:
    b, c = blocks.b, blocks.c
    w = tracker.w(b @ c, "w_bc")
    rhs = tracker.through(lambda v: v, w)
    try:
        rho = spectral_radius_psd_product(b, c)
    except NotPSDError as e:
        logger.debug(f"Spectral product skipped: {e}")
        return math.nan, rhs, {"identity_residual": math.nan}
    root_product = _norm(matfun_psd(b, np.sqrt) @ matfun_psd(c, np.sqrt)) ** 2
    residual = abs(root_product - rho)
    return rho, rhs, {"rho": rho, "root_product_norm_sq": root_product, "identity_residual": residual}


def _eval_normal_sum_power(blocks, params, tracker) -> Evaluation:
    r, alpha = float(params.r), _alpha(params)
    b, c = blocks.b, blocks.c
    term_b = _abs_pair_norm(b, 2 * r * alpha, 2 * r * (1 - alpha))
    term_c = _abs_pair_norm(c, 2 * r * alpha, 2 * r * (1 - alpha))
    lhs = _norm(b + c) ** r
    return lhs, 2 ** (r - 2) * (term_b + term_c), {"term_b": term_b, "term_c": term_c}


def _offdiag_holder(blocks, params, tracker, swapped: bool) -> Evaluation:
    r, quad, holder = float(params.r), params.quad, params.holder
    b, c = blocks.b, blocks.c
    bh, ch = adjoint(b), adjoint(c)
    w = tracker.w(blocks.offdiag_part().embed(), "w_s")
    alpha, gamma = _holder_terms(bh - 1j * c, bh + 1j * c, quad, holder, r, swapped)
    beta, delta = _holder_terms(b + 1j * ch, b - 1j * ch, quad, holder, r, swapped)
    rhs = 2 ** (-r / 2 - 1) * max(alpha, beta) ** (1 / holder.p) * max(gamma, delta) ** (1 / holder.q)
    lhs = tracker.through(lambda v: v ** r, w)
    intermediates = {"alpha": alpha, "beta": beta, "gamma": gamma, "delta": delta, "primed": float(swapped)}
    return lhs, rhs, intermediates


def _eval_offdiag_holder(blocks, params, tracker) -> Evaluation:
    return _offdiag_holder(blocks, params, tracker, swapped=False)


def _eval_offdiag_holder_swapped(blocks, params, tracker) -> Evaluation:
    return _offdiag_holder(blocks, params, tracker, swapped=True)


def _eval_diag_gauge(blocks, params, tracker) -> Evaluation:
    h, pair = params.gauge, params.pair
    w = tracker.w(blocks.diag_part().embed(), "w_t")
    term_a = _gauge_pair_norm(h, pair, blocks.a)
    term_d = _gauge_pair_norm(h, pair, blocks.d)
    lhs = tracker.through(lambda v: h(v), w)
    return lhs, 0.5 * max(term_a, term_d), {"term_a": term_a, "term_d": term_d}


def _eval_diag_power(blocks, params, tracker) -> Evaluation:
    r, alpha = float(params.r), _alpha(params)
    w = tracker.w(blocks.diag_part().embed(), "w_t")
    term_a = _abs_pair_norm(blocks.a, 2 * r * alpha, 2 * r * (1 - alpha))
    term_d = _abs_pair_norm(blocks.d, 2 * r * alpha, 2 * r * (1 - alpha))
    lhs = tracker.through(lambda v: v ** r, w)
    return lhs, 0.5 * max(term_a, term_d), {"term_a": term_a, "term_d": term_d}


def _eval_single_power(blocks, params, tracker) -> Evaluation:
    r, alpha = float(params.r), _alpha(params)
    w = tracker.w(blocks.a, "w_a")
    term_a = _abs_pair_norm(blocks.a, 2 * r * alpha, 2 * r * (1 - alpha))
    return tracker.through(lambda v: v ** r, w), 0.5 * term_a, {"term_a": term_a}


def _eval_full_gauge(blocks, params, tracker) -> Evaluation:
    h, pair = params.gauge, params.pair
    w = tracker.w(blocks.embed(), "w_y")
    terms = {name: _gauge_pair_norm(h, pair, getattr(blocks, name)) for name in ("a", "b", "c", "d")}
    rhs = 0.25 * max(terms["a"], terms["d"]) + 0.125 * (terms["b"] + terms["c"])
    lhs = tracker.through(lambda v: h(v / 2), w)
    return lhs, rhs, {f"term_{name}": value for name, value in terms.items()}


def _eval_sum_difference_power(blocks, params, tracker) -> Evaluation:
    r, alpha = float(params.r), _alpha(params)
    a, b = blocks.a, blocks.b
    combos = {"plus": a + b, "minus": a - b, "plus_i": a + 1j * b, "minus_i": a - 1j * b}
    powered = {}
    for name, operand in combos.items():
        powered[name] = tracker.through(lambda v: v ** r, tracker.w(operand, f"w_{name}"))
    term_a = _abs_pair_norm(a, 2 * r * alpha, 2 * r * (1 - alpha))
    term_b = _abs_pair_norm(b, 2 * r * alpha, 2 * r * (1 - alpha))
    rhs = 2 ** (r - 2) * (term_a + term_b)
    intermediates = {f"w_power_{name}": value for name, value in powered.items()}
    intermediates.update({"term_a": term_a, "term_b": term_b})
    return max(powered.values()), rhs, intermediates


def _eval_diag_gauge_mixed(blocks, params, tracker) -> Evaluation:
    h, pair = params.gauge, params.pair
    w = tracker.w(blocks.diag_part().embed(), "w_t")
    term_a = _gauge_pair_norm(h, pair, blocks.a, mixed=True)
    term_d = _gauge_pair_norm(h, pair, blocks.d, mixed=True)
    lhs = tracker.through(lambda v: h(v), w)
    return lhs, 0.5 * max(term_a, term_d), {"term_a": term_a, "term_d": term_d}


def _eval_diag_power_mixed(blocks, params, tracker) -> Evaluation:
    r, alpha = float(params.r), _alpha(params)
    w = tracker.w(blocks.diag_part().embed(), "w_t")
    term_a = _abs_pair_norm(blocks.a, 2 * r * alpha, 2 * r * (1 - alpha), mixed=True)
    term_d = _abs_pair_norm(blocks.d, 2 * r * alpha, 2 * r * (1 - alpha), mixed=True)
    lhs = tracker.through(lambda v: v ** r, w)
    return lhs, 0.5 * max(term_a, term_d), {"term_a": term_a, "term_d": term_d}


def _eval_single_power_mixed(blocks, params, tracker) -> Evaluation:
    r, alpha = float(params.r), _alpha(params)
    w = tracker.w(blocks.a, "w_a")
    term_a = _abs_pair_norm(blocks.a, 2 * r * alpha, 2 * r * (1 - alpha), mixed=True)
    return tracker.through(lambda v: v ** r, w), 0.5 * term_a, {"term_a": term_a}


def _eval_single_abs_power(blocks, params, tracker) -> Evaluation:
    r = float(params.r)
    w = tracker.w(blocks.a, "w_a")
    term_a = _abs_pair_norm(blocks.a, r, r, mixed=True)
    return tracker.through(lambda v: v ** r, w), 0.5 * term_a, {"term_a": term_a}


def _eval_diag_gauge_young(blocks, params, tracker) -> Evaluation:
    h, pair, holder, r = params.gauge, params.pair, params.holder, float(params.r)
    w = tracker.w(blocks.diag_part().embed(), "w_t")
    term_a = _young_norm(h, pair.alpha, holder, r, blocks.a)
    term_d = _young_norm(h, pair.alpha, holder, r, blocks.d)
    lhs = tracker.through(lambda v: h(v ** r), w)
    return lhs, max(term_a, term_d), {"term_a": term_a, "term_d": term_d}


def _eval_single_young_square(blocks, params, tracker) -> Evaluation:
    r, alpha, holder = float(params.r), _alpha(params), params.holder
    w = tracker.w(blocks.a, "w_a")
    term_a = _young_norm(None, alpha, holder, r, blocks.a, power=2.0)
    return tracker.through(lambda v: v ** (2 * r), w), term_a, {"term_a": term_a}


def _eval_single_young(blocks, params, tracker) -> Evaluation:
    r, alpha, holder = float(params.r), _alpha(params), params.holder
    w = tracker.w(blocks.a, "w_a")
    term_a = _young_norm(None, alpha, holder, r, blocks.a)
    return tracker.through(lambda v: v ** r, w), term_a, {"term_a": term_a}


def _diag_cartesian_holder(blocks, params, tracker, swapped: bool) -> Evaluation:
    r, quad, holder = float(params.r), params.quad, params.holder
    w = tracker.w(blocks.diag_part().embed(), "w_t")
    alpha, gamma = _holder_terms(*_cartesian_sums(blocks.a), quad, holder, r, swapped)
    beta, delta = _holder_terms(*_cartesian_sums(blocks.d), quad, holder, r, swapped)
    rhs = 0.5 * max(alpha, beta) ** (1 / holder.p) * max(gamma, delta) ** (1 / holder.q)
    lhs = tracker.through(lambda v: v ** r, w)
    intermediates = {"alpha": alpha, "beta": beta, "gamma": gamma, "delta": delta, "primed": float(swapped)}
    return lhs, rhs, intermediates


def _eval_diag_cartesian_holder(blocks, params, tracker) -> Evaluation:
    return _diag_cartesian_holder(blocks, params, tracker, swapped=False)


def _eval_diag_cartesian_holder_swapped(blocks, params, tracker) -> Evaluation:
    return _diag_cartesian_holder(blocks, params, tracker, swapped=True)


def _single_cartesian(blocks, quad: FactorQuad, holder: HolderPair, r: float, tracker) -> Evaluation:
    w = tracker.w(blocks.a, "w_a")
    f_side, g_side = _holder_terms(*_cartesian_sums(blocks.a), quad, holder, r, swapped=True)
    rhs = 0.5 * f_side ** (1 / holder.p) * g_side ** (1 / holder.q)
    return tracker.through(lambda v: v ** r, w), rhs, {"f_side": f_side, "g_side": g_side}


def _eval_single_cartesian_holder(blocks, params, tracker) -> Evaluation:
    return _single_cartesian(blocks, params.quad, params.holder, float(params.r), tracker)


def _eval_single_cartesian_power(blocks, params, tracker) -> Evaluation:
    pair = FactorPair(_alpha(params))
    return _single_cartesian(blocks, FactorQuad(pair, pair), params.holder, float(params.r), tracker)


_EVALUATORS: Dict[BoundId, Callable[..., Evaluation]] = {
    BoundId.NORM_SANDWICH_LOWER: _eval_norm_sandwich_lower,
    BoundId.NORM_SANDWICH_UPPER: _eval_norm_sandwich_upper,
    BoundId.POWER_INEQUALITY: _eval_power_inequality,
    BoundId.OFFDIAG_HALF_SUM: _eval_offdiag_half_sum,
    BoundId.ABS_SUM_UPPER: _eval_abs_sum_upper,
    BoundId.ABS_SQUARE_LOWER: _eval_abs_square_lower,
    BoundId.ABS_SQUARE_UPPER: _eval_abs_square_upper,
    BoundId.CARTESIAN_POWER_LOWER: _eval_cartesian_power_lower,
    BoundId.CARTESIAN_POWER_UPPER: _eval_cartesian_power_upper,
    BoundId.OFFDIAG_GAUGE: _eval_offdiag_gauge,
    BoundId.OFFDIAG_POWER: _eval_offdiag_power,
    BoundId.OFFDIAG_PRODUCT_LOWER: _eval_offdiag_product_lower,
    BoundId.PSD_PRODUCT_SPECTRAL: _eval_psd_product_spectral,
    BoundId.NORMAL_SUM_POWER: _eval_normal_sum_power,
    BoundId.OFFDIAG_HOLDER: _eval_offdiag_holder,
    BoundId.OFFDIAG_HOLDER_SWAPPED: _eval_offdiag_holder_swapped,
    BoundId.DIAG_GAUGE: _eval_diag_gauge,
    BoundId.DIAG_POWER: _eval_diag_power,
    BoundId.SINGLE_POWER: _eval_single_power,
    BoundId.FULL_GAUGE: _eval_full_gauge,
    BoundId.SUM_DIFFERENCE_POWER: _eval_sum_difference_power,
    BoundId.DIAG_GAUGE_MIXED: _eval_diag_gauge_mixed,
    BoundId.DIAG_POWER_MIXED: _eval_diag_power_mixed,
    BoundId.SINGLE_POWER_MIXED: _eval_single_power_mixed,
    BoundId.SINGLE_ABS_POWER: _eval_single_abs_power,
    BoundId.DIAG_GAUGE_YOUNG: _eval_diag_gauge_young,
    BoundId.SINGLE_YOUNG_SQUARE: _eval_single_young_square,
    BoundId.SINGLE_YOUNG: _eval_single_young,
    BoundId.DIAG_CARTESIAN_HOLDER: _eval_diag_cartesian_holder,
    BoundId.DIAG_CARTESIAN_HOLDER_SWAPPED: _eval_diag_cartesian_holder_swapped,
    BoundId.SINGLE_CARTESIAN_HOLDER: _eval_single_cartesian_holder,
    BoundId.SINGLE_CARTESIAN_POWER: _eval_single_cartesian_power,
}


# Parameter samplers; every sample satisfies the entry's hypotheses

def sample_gauge(rng: np.random.Generator) -> GaugeH:
    family = rng.integers(3)
    if family == 0:
        return PowerGauge(float(rng.uniform(1.0, 4.0)))
    if family == 1:
        return ExpM1Gauge(float(rng.uniform(0.1, 2.0)))
    return HingeGauge(float(rng.uniform(0.0, 1.0)))


def sample_holder(rng: np.random.Generator) -> HolderPair:
    return holder_conjugate(float(rng.uniform(1.2, 4.0)))


def _sample_none(rng: np.random.Generator) -> BoundParams:
    return BoundParams()


def _sample_power_n(rng: np.random.Generator) -> BoundParams:
    return BoundParams(n=int(rng.integers(2, 5)))


def _sample_alpha_r1(rng: np.random.Generator) -> BoundParams:
    alpha = float(rng.uniform(0.0, 1.0))
    return BoundParams(alpha=alpha, pair=FactorPair(alpha), r=float(rng.uniform(1.0, 4.0)))


def _sample_r1(rng: np.random.Generator) -> BoundParams:
    return BoundParams(r=float(rng.uniform(1.0, 4.0)))


def _sample_r2(rng: np.random.Generator) -> BoundParams:
    return BoundParams(r=float(rng.uniform(2.0, 5.0)))


def _sample_gauge_pair(rng: np.random.Generator) -> BoundParams:
    alpha = float(rng.uniform(0.0, 1.0))
    return BoundParams(gauge=sample_gauge(rng), pair=FactorPair(alpha), alpha=alpha)


def _sample_quad_holder(rng: np.random.Generator) -> BoundParams:
    quad = FactorQuad(FactorPair(float(rng.uniform(0.0, 1.0))), FactorPair(float(rng.uniform(0.0, 1.0))))
    return BoundParams(quad=quad, holder=sample_holder(rng), r=float(rng.uniform(2.0, 4.0)))


def _sample_alpha_holder_r2(rng: np.random.Generator) -> BoundParams:
    alpha = float(rng.uniform(0.0, 1.0))
    return BoundParams(alpha=alpha, pair=FactorPair(alpha), holder=sample_holder(rng),
                       r=float(rng.uniform(2.0, 4.0)))


def _young_r(rng: np.random.Generator, holder: HolderPair) -> float:
    floor = 2.0 / min(holder.p, holder.q)
    return float(rng.uniform(floor, floor + 2.0))


def _sample_young(rng: np.random.Generator) -> BoundParams:
    alpha = float(rng.uniform(0.0, 1.0))
    holder = sample_holder(rng)
    return BoundParams(alpha=alpha, pair=FactorPair(alpha), holder=holder, r=_young_r(rng, holder))


def _sample_gauge_young(rng: np.random.Generator) -> BoundParams:
    params = _sample_young(rng)
    return replace(params, gauge=sample_gauge(rng))


_HALF = FactorPair(0.5)
_HALF_QUAD = FactorQuad(_HALF, _HALF)
_P2 = HolderPair(2.0, 2.0)

_DEFAULT_R1 = BoundParams(alpha=0.5, pair=_HALF, r=1.0)
_DEFAULT_GAUGE = BoundParams(gauge=PowerGauge(1.0), pair=_HALF, alpha=0.5)
_DEFAULT_HOLDER = BoundParams(quad=_HALF_QUAD, holder=_P2, r=2.0)
_DEFAULT_YOUNG = BoundParams(alpha=0.5, pair=_HALF, holder=_P2, r=1.0)

_GAUGE = ("gauge", "pair")
_ALPHA_R = ("alpha", "r")
_HOLDER = ("quad", "holder", "r")

_FORMULAS: Tuple[CatalogEntry, ...] = (
    CatalogEntry(BoundId.NORM_SANDWICH_LOWER, "1/2 ||A|| <= w(A)", OperandShape.SINGLE, Direction.LOWER,
                 (), "none", BoundParams(), _sample_none),
    CatalogEntry(BoundId.NORM_SANDWICH_UPPER, "w(A) <= ||A||", OperandShape.SINGLE, Direction.UPPER,
                 (), "none", BoundParams(), _sample_none),
    CatalogEntry(BoundId.POWER_INEQUALITY, "w(A^n) <= w(A)^n", OperandShape.SINGLE, Direction.UPPER,
                 ("n",), "integer n >= 1", BoundParams(n=2), _sample_power_n),
    CatalogEntry(BoundId.OFFDIAG_HALF_SUM, "w([[0,B],[C,0]]) <= 1/2 (||B|| + ||C||)", OperandShape.OFFDIAG,
                 Direction.UPPER, (), "none", BoundParams(), _sample_none),
    CatalogEntry(BoundId.ABS_SUM_UPPER, "w(A) <= 1/2 || |A| + |A*| ||", OperandShape.SINGLE, Direction.UPPER,
                 (), "none", BoundParams(), _sample_none),
    CatalogEntry(BoundId.ABS_SQUARE_LOWER, "1/4 || |A|^2 + |A*|^2 || <= w^2(A)", OperandShape.SINGLE,
                 Direction.LOWER, (), "none", BoundParams(), _sample_none),
    CatalogEntry(BoundId.ABS_SQUARE_UPPER, "w^2(A) <= 1/2 || |A|^2 + |A*|^2 ||", OperandShape.SINGLE,
                 Direction.UPPER, (), "none", BoundParams(), _sample_none),
    CatalogEntry(BoundId.CARTESIAN_POWER_LOWER,
                 "2^(-r/2-1) || |B+C|^r + |B-C|^r || <= w^r(A), A = B + iC", OperandShape.SINGLE,
                 Direction.LOWER, ("r",), "r >= 2", BoundParams(r=2.0), _sample_r2),
    CatalogEntry(BoundId.CARTESIAN_POWER_UPPER,
                 "w^r(A) <= 1/2 || |B+C|^r + |B-C|^r ||, A = B + iC", OperandShape.SINGLE,
                 Direction.UPPER, ("r",), "r >= 2", BoundParams(r=2.0), _sample_r2),
    CatalogEntry(BoundId.OFFDIAG_GAUGE,
                 "h(w(S)) <= 1/4 || h(f^2(|B|)) + h(g^2(|B|)) || + 1/4 || h(f^2(|C|)) + h(g^2(|C|)) ||",
                 OperandShape.OFFDIAG, Direction.UPPER, _GAUGE, "h gauge; f g = t",
                 _DEFAULT_GAUGE, _sample_gauge_pair),
    CatalogEntry(BoundId.OFFDIAG_POWER,
                 "w^r(S) <= 1/4 || |B|^(2ra) + |B|^(2r(1-a)) || + 1/4 || |C|^(2ra) + |C|^(2r(1-a)) ||",
                 OperandShape.OFFDIAG, Direction.UPPER, _ALPHA_R, "a in [0,1]; r >= 1",
                 _DEFAULT_R1, _sample_alpha_r1),
    CatalogEntry(BoundId.OFFDIAG_PRODUCT_LOWER, "w(BC)^(1/2) <= w(S)", OperandShape.OFFDIAG, Direction.LOWER,
                 (), "none", BoundParams(), _sample_none),
    CatalogEntry(BoundId.PSD_PRODUCT_SPECTRAL, "|| B^(1/2) C^(1/2) ||^2 = rho(BC) <= w(BC)",
                 OperandShape.OFFDIAG, Direction.IDENTITY, (), "B, C positive semidefinite",
                 BoundParams(), _sample_none, {"b": "wishart", "c": "wishart"}),
    CatalogEntry(BoundId.NORMAL_SUM_POWER,
                 "||B+C||^r <= 2^(r-2) (|| |B|^(2ra) + |B|^(2r(1-a)) || + || |C|^(2ra) + |C|^(2r(1-a)) ||)",
                 OperandShape.OFFDIAG, Direction.UPPER, _ALPHA_R, "C normal; a in [0,1]; r >= 1",
                 _DEFAULT_R1, _sample_alpha_r1, {"c": "normal"}),
    CatalogEntry(BoundId.OFFDIAG_HOLDER,
                 "w^r(S) <= 2^(-r/2-1) max(alpha, beta)^(1/p) max(gamma, delta)^(1/q) over |B* -+ iC|, |B +- iC*|",
                 OperandShape.OFFDIAG, Direction.UPPER, _HOLDER, "f1 g1 = f2 g2 = t; 1/p + 1/q = 1; r >= 2",
                 _DEFAULT_HOLDER, _sample_quad_holder),
    CatalogEntry(BoundId.OFFDIAG_HOLDER_SWAPPED,
                 "w^r(S) <= 2^(-r/2-1) max(alpha', beta')^(1/p) max(gamma', delta')^(1/q), f2 and g2 exchanged",
                 OperandShape.OFFDIAG, Direction.UPPER, _HOLDER, "f1 g1 = f2 g2 = t; 1/p + 1/q = 1; r >= 2",
                 _DEFAULT_HOLDER, _sample_quad_holder),
    CatalogEntry(BoundId.DIAG_GAUGE,
                 "h(w(T)) <= 1/2 max(|| h(f^2(|A|)) + h(g^2(|A|)) ||, || h(f^2(|D|)) + h(g^2(|D|)) ||)",
                 OperandShape.DIAG, Direction.UPPER, _GAUGE, "h gauge; f g = t", _DEFAULT_GAUGE, _sample_gauge_pair),
    CatalogEntry(BoundId.DIAG_POWER,
                 "w^r(T) <= 1/2 max(|| |A|^(2ra) + |A|^(2r(1-a)) ||, || |D|^(2ra) + |D|^(2r(1-a)) ||)",
                 OperandShape.DIAG, Direction.UPPER, _ALPHA_R, "a in [0,1]; r >= 1", _DEFAULT_R1, _sample_alpha_r1),
    CatalogEntry(BoundId.SINGLE_POWER, "w^r(A) <= 1/2 || |A|^(2ra) + |A|^(2r(1-a)) ||", OperandShape.SINGLE,
                 Direction.UPPER, _ALPHA_R, "a in [0,1]; r >= 1", _DEFAULT_R1, _sample_alpha_r1),
    CatalogEntry(BoundId.FULL_GAUGE,
                 "h(w(Y)/2) <= 1/4 max(||h(f^2(|A|)) + h(g^2(|A|))||, ..D) + 1/8 (||..B|| + ||..C||)",
                 OperandShape.FULL, Direction.UPPER, _GAUGE, "h gauge; f g = t", _DEFAULT_GAUGE, _sample_gauge_pair),
    CatalogEntry(BoundId.SUM_DIFFERENCE_POWER,
                 "max(w^r(A +- B), w^r(A +- iB)) <= 2^(r-2) || |A|^(2ra) + |A|^(2r(1-a)) || + 2^(r-2) || ..B ||",
                 OperandShape.PAIR, Direction.UPPER, _ALPHA_R, "a in [0,1]; r >= 1", _DEFAULT_R1, _sample_alpha_r1),
    CatalogEntry(BoundId.DIAG_GAUGE_MIXED,
                 "h(w(T)) <= 1/2 max(|| h(f^2(|A|)) + h(g^2(|A*|)) ||, || h(f^2(|D|)) + h(g^2(|D*|)) ||)",
                 OperandShape.DIAG, Direction.UPPER, _GAUGE, "h gauge; f g = t", _DEFAULT_GAUGE, _sample_gauge_pair),
    CatalogEntry(BoundId.DIAG_POWER_MIXED,
                 "w^r(T) <= 1/2 max(|| |A|^(2ra) + |A*|^(2r(1-a)) ||, || |D|^(2ra) + |D*|^(2r(1-a)) ||)",
                 OperandShape.DIAG, Direction.UPPER, _ALPHA_R, "a in [0,1]; r >= 1", _DEFAULT_R1, _sample_alpha_r1),
    CatalogEntry(BoundId.SINGLE_POWER_MIXED, "w^r(A) <= 1/2 || |A|^(2ra) + |A*|^(2r(1-a)) ||",
                 OperandShape.SINGLE, Direction.UPPER, _ALPHA_R, "a in [0,1]; r >= 1", _DEFAULT_R1, _sample_alpha_r1),
    CatalogEntry(BoundId.SINGLE_ABS_POWER, "w^r(A) <= 1/2 || |A|^r + |A*|^r ||", OperandShape.SINGLE,
                 Direction.UPPER, ("r",), "r >= 1", BoundParams(r=1.0), _sample_r1),
    CatalogEntry(BoundId.DIAG_GAUGE_YOUNG,
                 "h(w^r(T)) <= max(|| 1/p h(f^(pr)(|A|)) + 1/q h(g^(qr)(|A*|)) ||, ..D)",
                 OperandShape.DIAG, Direction.UPPER, ("gauge", "pair", "holder", "r"),
                 "h gauge; f g = t; 1/p + 1/q = 1; r min(p, q) >= 2",
                 replace(_DEFAULT_YOUNG, gauge=PowerGauge(1.0)), _sample_gauge_young),
    CatalogEntry(BoundId.SINGLE_YOUNG_SQUARE, "w^(2r)(A) <= || 1/p |A|^(2pra) + 1/q |A*|^(2qr(1-a)) ||",
                 OperandShape.SINGLE, Direction.UPPER, ("alpha", "holder", "r"),
                 "a in [0,1]; 1/p + 1/q = 1; r min(p, q) >= 2", _DEFAULT_YOUNG, _sample_young),
    CatalogEntry(BoundId.SINGLE_YOUNG, "w^r(A) <= || 1/p |A|^(pra) + 1/q |A*|^(qr(1-a)) ||",
                 OperandShape.SINGLE, Direction.UPPER, ("alpha", "holder", "r"),
                 "a in [0,1]; 1/p + 1/q = 1; r min(p, q) >= 2", _DEFAULT_YOUNG, _sample_young),
    CatalogEntry(BoundId.DIAG_CARTESIAN_HOLDER,
                 "w^r(T) <= 1/2 max(alpha, beta)^(1/p) max(gamma, delta)^(1/q) over |Re X +- Im X|, X = A, D",
                 OperandShape.DIAG, Direction.UPPER, _HOLDER, "f1 g1 = f2 g2 = t; 1/p + 1/q = 1; r >= 2",
                 _DEFAULT_HOLDER, _sample_quad_holder),
    CatalogEntry(BoundId.DIAG_CARTESIAN_HOLDER_SWAPPED,
                 "w^r(T) <= 1/2 max(alpha', beta')^(1/p) max(gamma', delta')^(1/q), f2 and g2 exchanged",
                 OperandShape.DIAG, Direction.UPPER, _HOLDER, "f1 g1 = f2 g2 = t; 1/p + 1/q = 1; r >= 2",
                 _DEFAULT_HOLDER, _sample_quad_holder),
    CatalogEntry(BoundId.SINGLE_CARTESIAN_HOLDER,
                 "w^r(A) <= 1/2 || f1^(rp)(|B+C|) + g2^(rp)(|B-C|) ||^(1/p) || g1^(rq)(|B+C|) + f2^(rq)(|B-C|) ||^(1/q)",
                 OperandShape.SINGLE, Direction.UPPER, _HOLDER, "f1 g1 = f2 g2 = t; 1/p + 1/q = 1; r >= 2",
                 _DEFAULT_HOLDER, _sample_quad_holder),
    CatalogEntry(BoundId.SINGLE_CARTESIAN_POWER,
                 "w^r(A) <= 1/2 || |B+C|^(rpa) + |B-C|^(rp(1-a)) ||^(1/p) || |B+C|^(rq(1-a)) + |B-C|^(rqa) ||^(1/q)",
                 OperandShape.SINGLE, Direction.UPPER, ("alpha", "holder", "r"),
                 "a in [0,1]; 1/p + 1/q = 1; r >= 2",
                 BoundParams(alpha=0.5, pair=_HALF, holder=_P2, r=2.0), _sample_alpha_holder_r2),
)

# (alias, source result) per id
_SOURCES: Dict[BoundId, Tuple[str, str]] = {
    BoundId.NORM_SANDWICH_LOWER: ("NormSandwichLower", "(1.2)"),
    BoundId.NORM_SANDWICH_UPPER: ("NormSandwichUpper", "(1.2)"),
    BoundId.POWER_INEQUALITY: ("PowerInequality", "Section 1 power inequality"),
    BoundId.OFFDIAG_HALF_SUM: ("OffdiagHalfSum", "(1.4)"),
    BoundId.ABS_SUM_UPPER: ("KittanehAbs", "(1.5)"),
    BoundId.ABS_SQUARE_LOWER: ("KittanehSqLower", "(1.6)"),
    BoundId.ABS_SQUARE_UPPER: ("KittanehSqUpper", "(1.6)"),
    BoundId.CARTESIAN_POWER_LOWER: ("CartesianPowerLower", "(1.7)"),
    BoundId.CARTESIAN_POWER_UPPER: ("CartesianPowerUpper", "(1.7)"),
    BoundId.OFFDIAG_GAUGE: ("Thm2_5", "Theorem 2.5 (2.1)"),
    BoundId.OFFDIAG_POWER: ("Cor2_6", "Corollary 2.6 (2.2)"),
    BoundId.OFFDIAG_PRODUCT_LOWER: ("Rem2_7_Lower", "Remark 2.7"),
    BoundId.PSD_PRODUCT_SPECTRAL: ("Rem2_7_PsdRho", "Remark 2.7"),
    BoundId.NORMAL_SUM_POWER: ("Cor2_8", "Corollary 2.8"),
    BoundId.OFFDIAG_HOLDER: ("Thm2_9a", "Theorem 2.9 (2.4)"),
    BoundId.OFFDIAG_HOLDER_SWAPPED: ("Thm2_9b", "Theorem 2.9 (2.5)"),
    BoundId.DIAG_GAUGE: ("Thm3_1", "Theorem 3.1 (3.1)"),
    BoundId.DIAG_POWER: ("Cor3_2", "Corollary 3.2 (3.2)"),
    BoundId.SINGLE_POWER: ("Cor3_2_Single", "Corollary 3.2 (3.3)"),
    BoundId.FULL_GAUGE: ("Cor3_3", "Corollary 3.3 (3.4)"),
    BoundId.SUM_DIFFERENCE_POWER: ("Cor3_4", "Corollary 3.4"),
    BoundId.DIAG_GAUGE_MIXED: ("Thm3_5", "Theorem 3.5 (3.5)"),
    BoundId.DIAG_POWER_MIXED: ("Cor3_6", "Corollary 3.6 (3.6)"),
    BoundId.SINGLE_POWER_MIXED: ("Cor3_6_Single", "Corollary 3.6 (3.7)"),
    BoundId.SINGLE_ABS_POWER: ("Cor3_6_Power", "Corollary 3.6 (888)"),
    BoundId.DIAG_GAUGE_YOUNG: ("Thm3_8", "Theorem 3.8 (3.8)"),
    BoundId.SINGLE_YOUNG_SQUARE: ("Cor3_9", "Corollary 3.9 (3.9)"),
    BoundId.SINGLE_YOUNG: ("Cor3_10", "Corollary 3.10 (3.10)"),
    BoundId.DIAG_CARTESIAN_HOLDER: ("Thm3_13a", "Theorem 3.13 (3.11)"),
    BoundId.DIAG_CARTESIAN_HOLDER_SWAPPED: ("Thm3_13b", "Theorem 3.13 (3.12)"),
    BoundId.SINGLE_CARTESIAN_HOLDER: ("Cor3_14", "Corollary 3.14 (3.13)"),
    BoundId.SINGLE_CARTESIAN_POWER: ("Cor3_15", "Corollary 3.15 (3.15)"),
}

BOUND_ALIASES: Dict[str, BoundId] = {alias: bound for bound, (alias, _) in _SOURCES.items()}
_ALIAS_LOOKUP: Dict[str, BoundId] = {alias.lower(): bound for alias, bound in BOUND_ALIASES.items()}

_CATALOG: Tuple[CatalogEntry, ...] = tuple(
    replace(entry, anchor=f"{_SOURCES[entry.id][1]}: {entry.anchor}") for entry in _FORMULAS
)

_BY_ID: Dict[BoundId, CatalogEntry] = {entry.id: entry for entry in _CATALOG}
_ORDER: Dict[BoundId, int] = {entry.id: index for index, entry in enumerate(_CATALOG)}


def list_bounds() -> List[CatalogEntry]:
    """Every catalog entry exactly once, in a stable order."""
    return list(_CATALOG)


def resolve_bound_id(bound: Union[BoundId, str]) -> BoundId:
    """Accept a catalog id (``diag_gauge_young``) or its alias (``Thm3_8``), case-insensitively."""
    if isinstance(bound, BoundId):
        return bound
    key = str(bound).strip().lower()
    if key in _ALIAS_LOOKUP:
        return _ALIAS_LOOKUP[key]
    try:
        return BoundId(key)
    except ValueError:
        raise UnknownBoundError(f"Unknown bound: {bound}. Run 'numrad list' for the catalog")


def get_entry(bound: Union[BoundId, str]) -> CatalogEntry:
    return _BY_ID[resolve_bound_id(bound)]


def _as_blocks(blocks: Union[BlockMatrix2x2, ComplexMatrix]) -> BlockMatrix2x2:
    if isinstance(blocks, BlockMatrix2x2):
        return blocks
    return BlockMatrix2x2.single(as_matrix(blocks))


def _is_psd(x: ComplexMatrix) -> bool:
    norm = operator_norm(x)
    if operator_norm(x - adjoint(x)) > PSD_TOL * max(1.0, norm):
        return False
    eigenvalues = np.linalg.eigvalsh((x + adjoint(x)) / 2)
    return bool(eigenvalues[0] >= -PSD_TOL * max(1.0, norm))


def check_hypotheses(bound: Union[BoundId, str], blocks: Union[BlockMatrix2x2, ComplexMatrix],
                     params: BoundParams) -> HypothesisReport:
    """
    Evaluate every hypothesis of ``bound`` on the given operands and parameters.

    Missing parameters are reported as failed checks rather than raised.
    """
    bound_id = resolve_bound_id(bound)
    entry = _BY_ID[bound_id]
    blocks = _as_blocks(blocks)
    checks: Dict[str, bool] = {}
    messages: List[str] = []

    def record(name: str, ok: bool, message: str) -> None:
        checks[name] = bool(ok)
        if not ok:
            messages.append(message)

    for name in entry.required:
        if _param_value(params, name) is None:
            record(f"param:{name}", False, f"missing parameter '{name}'")

    if "gauge" in entry.required and params.gauge is not None:
        validity = validate_gauge(params.gauge)
        record("gauge", validity.valid, "; ".join(validity.failures))
    if "pair" in entry.required and params.pair is not None:
        record("pair", params.pair.is_valid, f"alpha={params.pair.alpha} outside [0, 1]")
    if "alpha" in entry.required and _param_value(params, "alpha") is not None:
        alpha = _alpha(params)
        record("alpha", 0.0 <= alpha <= 1.0, f"alpha={alpha} outside [0, 1]")
    if "quad" in entry.required and params.quad is not None:
        record("quad", params.quad.is_valid, "factor exponents must lie in [0, 1]")
    if "holder" in entry.required and params.holder is not None:
        holder = params.holder
        record("holder", holder.is_valid, f"p={holder.p}, q={holder.q} are not Hölder conjugates")

    if params.r is not None:
        r = params.r
        if bound_id in R_AT_LEAST_ONE:
            record("r", r >= 1, f"r={r} < 1")
        elif bound_id in R_AT_LEAST_TWO:
            record("r", r >= 2, f"r={r} < 2")
        elif bound_id in YOUNG_EXPONENT and params.holder is not None:
            product = r * min(params.holder.p, params.holder.q)
            record("r_min_pq", product >= 2 - 1e-12, f"r min(p, q) = {product} < 2")

    if bound_id == BoundId.POWER_INEQUALITY and params.n is not None:
        record("n", int(params.n) >= 1 and float(params.n) == int(params.n), f"n={params.n} must be an integer >= 1")

    if bound_id == BoundId.NORMAL_SUM_POWER:
        c = blocks.c
        defect = operator_norm(adjoint(c) @ c - c @ adjoint(c))
        record("c_normal", defect <= NORMALITY_TOL * max(operator_norm(c) ** 2, np.finfo(float).tiny),
               f"C is not normal (||C*C - CC*|| = {defect:.3e})")

    if bound_id == BoundId.PSD_PRODUCT_SPECTRAL:
        record("b_psd", _is_psd(blocks.b), "B is not positive semidefinite")
        record("c_psd", _is_psd(blocks.c), "C is not positive semidefinite")

    return HypothesisReport(ok=all(checks.values()), checks=checks, messages=messages)


def evaluate_bound(bound: Union[BoundId, str], blocks: Union[BlockMatrix2x2, ComplexMatrix],
                   params: Optional[BoundParams] = None, tol: float = DEFAULT_TOL,
                   grid: int = DEFAULT_GRID) -> BoundReport:
    """
    Evaluate one inequality on the given operands.

    Args:
        bound: Catalog id
        blocks: Block carrier, or a single square matrix for single-operator bounds
        params: Parameters; missing fields fall back to the entry's defaults
        tol: Relative tolerance for every numerical radius computed
        grid: Initial theta grid for those radii

    Returns:
        BoundReport; ``holds`` is ``slack >= -tol_effective`` where
        ``tol_effective`` adds the radius uncertainty pushed through the
        left or right side to a relative rounding floor
    """
    bound_id = resolve_bound_id(bound)
    entry = _BY_ID[bound_id]
    blocks = _as_blocks(blocks)
    effective = entry.defaults.merged(params) if params is not None else entry.defaults
    _require(entry, effective)

    hypotheses = check_hypotheses(bound_id, blocks, effective)
    if not hypotheses.ok:
        logger.debug(f"{bound_id.value}: hypotheses violated ({'; '.join(hypotheses.messages)})")

    tracker = _RadiusTracker(tol=tol, grid=grid)
    lhs, rhs, intermediates = _EVALUATORS[bound_id](blocks, effective, tracker)
    lhs, rhs = float(lhs), float(rhs)
    intermediates = {**{k: float(v) for k, v in intermediates.items()}, **tracker.radii}

    slack = rhs - lhs
    tol_effective = tracker.uncertainty + RELATIVE_FLOOR * max(1.0, abs(lhs), abs(rhs))
    holds = bool(slack >= -tol_effective) if math.isfinite(slack) else False
    if bound_id == BoundId.PSD_PRODUCT_SPECTRAL and holds:
        residual = intermediates.get("identity_residual", math.nan)
        holds = bool(residual <= SPECTRAL_IDENTITY_TOL * max(1.0, abs(lhs)))

    return BoundReport(
        id=bound_id,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        holds=holds,
        tol_effective=tol_effective,
        hypotheses=hypotheses,
        intermediates=intermediates,
    )


def compare_tightness(ids: Iterable[Union[BoundId, str]], blocks: Union[BlockMatrix2x2, ComplexMatrix],
                      params_map: Optional[Mapping[BoundId, BoundParams]] = None,
                      tol: float = DEFAULT_TOL, grid: int = DEFAULT_GRID) -> List[TightnessEntry]:
    """Rank bounds by their right-hand side, smallest first; ties keep catalog order."""
    params_map = params_map or {}
    entries = []
    for bound in ids:
        bound_id = resolve_bound_id(bound)
        report = evaluate_bound(bound_id, blocks, params_map.get(bound_id), tol=tol, grid=grid)
        entries.append(TightnessEntry(bound_id, report.rhs, report.slack))
    return sorted(entries, key=lambda e: (e.rhs, _ORDER[e.id]))
