"""Numerical radius computation, independent oracles and lemma-level checks."""

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotPSDError,
    NotUnitError,
    OutOfRangeError,
    WrongDimensionError,
)
from .gauges import FactorPair, GaugeH
from .matrix import (
    ComplexMatrix,
    abs_fun,
    abs_value,
    as_matrix,
    herm_eig,
    matfun_psd,
    operator_norm,
    require_square,
)
from .utils import parallel_process

logger = logging.getLogger("numrad")

TWO_PI = 2.0 * math.pi
EPS = float(np.finfo(np.float64).eps)

DEFAULT_TOL = 1e-10
MIN_TOL = 1e-12
DEFAULT_GRID = 4096
DEFAULT_MAX_POINTS = 65536

ELLIPSE_GRID = 256
ELLIPSE_TOL = 1e-13
ELLIPSE_MAX_POINTS = 1 << 16

# Angles closer than this are merged; narrower intervals are not bisected
MIN_WIDTH = 1e-12

RAYLEIGH_ITERATIONS = 200
DEFAULT_RESTARTS = 32

UNIT_TOL = 1e-12
PSD_TOL = 1e-10
CHECK_MARGIN = 1e-10

# Elements per eigh batch when sweeping
_BATCH_ELEMENTS = 1 << 20


class RadiusMethod(str, Enum):
    THETA_SWEEP = "theta_sweep"
    ELLIPSE_2X2 = "ellipse_2x2"
    RAYLEIGH_ASCENT = "rayleigh_ascent"


@dataclass(frozen=True)
class RadiusResult:
    """A numerical radius estimate with its certificate."""

    value: float
    certified_tolerance: float
    argmax_theta: float
    method: RadiusMethod

    @property
    def upper(self) -> float:
        return self.value + self.certified_tolerance

    @property
    def lower(self) -> float:
        return self.value - self.certified_tolerance

    def to_dict(self) -> Dict[str, object]:
        result = asdict(self)
        result["method"] = self.method.value
        if math.isinf(self.certified_tolerance):
            result["certified_tolerance"] = None
        return result


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class BlockIdentityReport:
    """Residuals of the three block numerical radius identities."""

    diagonal_ok: bool
    symmetric_ok: bool
    skew_ok: bool
    diagonal_residual: float
    symmetric_residual: float
    skew_residual: float

    @property
    def all_ok(self) -> bool:
        return self.diagonal_ok and self.symmetric_ok and self.skew_ok

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def _rounding_floor(m: ComplexMatrix, norm: float) -> float:
    return 64.0 * m.shape[0] * EPS * max(1.0, norm)


def _rotated_hermitian(m: ComplexMatrix, theta: float) -> ComplexMatrix:
    phase = complex(math.cos(theta), math.sin(theta))
    rotated = phase * m
    return (rotated + rotated.conj().T) / 2


def _support_batch(m: ComplexMatrix, thetas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Support values ``g(theta) = lambda_max(Re(e^{i theta} m))`` and the moduli
    ``|x* m x|`` of the maximizing eigenvectors, for a batch of angles.
    """
    n = m.shape[0]
    mh = m.conj().T
    support = np.empty(len(thetas))
    inner = np.empty(len(thetas))
    chunk = max(1, _BATCH_ELEMENTS // (n * n))
    for start in range(0, len(thetas), chunk):
        stop = min(start + chunk, len(thetas))
        phases = np.exp(1j * thetas[start:stop])[:, None, None]
        rotated = (phases * m + phases.conj() * mh) / 2
        values, vectors = np.linalg.eigh(rotated)
        top = vectors[:, :, -1]
        support[start:stop] = values[:, -1]
        inner[start:stop] = np.abs(np.einsum("ki,ij,kj->k", top.conj(), m, top))
    return support, inner


def _wedge_bounds(left: np.ndarray, width: np.ndarray,
                  g_left: np.ndarray, g_right: np.ndarray) -> np.ndarray:
    """
    Upper bound for ``max g`` over each interval ``[left, left + width]``.

    The two supporting half-planes at the interval ends form a wedge holding
    the whole numerical range; the bound is the largest value of the wedge's
    support function on the interval. In the frame rotated by the midpoint
    angle the apex is ``a + ib``.
    """
    half = width / 2
    a = (g_left + g_right) / (2 * np.cos(half))
    b = (g_left - g_right) / (2 * np.sin(half))
    peak = np.arctan2(b, a)
    inside = np.abs(peak) <= half
    return np.where(inside, np.hypot(a, b), np.maximum(g_left, g_right))


def _certify_support(support_batch: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
                     grid: int, target: float, max_points: int, cap: float,
                     polish: Optional[Callable[[float], float]] = None,
                     label: str = "theta sweep") -> Tuple[float, float, float, float]:
    """
    Branch-and-bound maximization of a support function over [0, 2 pi).

    Returns ``(lower, upper, best_support, argmax_theta)``.
    """
    thetas = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    support, inner = support_batch(thetas)

    if polish is not None:
        best = float(thetas[np.argmax(support)])
        step = TWO_PI / grid
        res = minimize_scalar(lambda t: -polish(t), bounds=(best - step, best + step),
                              method="bounded", options={"xatol": 1e-12})
        extra = np.array([float(res.x) % TWO_PI])
        extra_support, extra_inner = support_batch(extra)
        thetas = np.concatenate([thetas, extra])
        support = np.concatenate([support, extra_support])
        inner = np.concatenate([inner, extra_inner])

    rounds = 0
    while True:
        order = np.argsort(thetas, kind="stable")
        thetas, support, inner = thetas[order], support[order], inner[order]
        keep = np.append(True, np.diff(thetas) > MIN_WIDTH)
        thetas, support, inner = thetas[keep], support[keep], inner[keep]
        width = np.diff(np.append(thetas, thetas[0] + TWO_PI))
        g_right = np.roll(support, -1)
        bounds = _wedge_bounds(thetas, width, support, g_right)

        lower = float(inner.max())
        upper = min(float(bounds.max()), cap)
        if upper - lower <= target:
            break

        active = np.flatnonzero((bounds > lower + target) & (width > 2 * MIN_WIDTH))
        if len(active) == 0:
            break
        if len(thetas) + len(active) > max_points:
            logger.warning(
                f"{label}: point budget of {max_points} reached with gap {upper - lower:.3e}; "
                f"reporting the uncertified remainder"
            )
            break
        midpoints = (thetas[active] + width[active] / 2) % TWO_PI
        new_support, new_inner = support_batch(midpoints)
        thetas = np.concatenate([thetas, midpoints])
        support = np.concatenate([support, new_support])
        inner = np.concatenate([inner, new_inner])
        rounds += 1

    best_support = float(support.max())
    candidates = np.flatnonzero(support >= best_support - target)
    argmax_theta = float(thetas[candidates].min()) % TWO_PI
    logger.debug(f"{label}: {len(thetas)} angles, {rounds} refinement rounds, gap {max(upper - lower, 0.0):.3e}")
    return lower, max(upper, lower), best_support, argmax_theta


def numerical_radius(m: ComplexMatrix, tol: float = DEFAULT_TOL, grid: int = DEFAULT_GRID,
                     max_points: int = DEFAULT_MAX_POINTS, abs_cap: bool = True) -> RadiusResult:
    """
    Numerical radius ``w(m) = max_theta lambda_max(Re(e^{i theta} m))`` with a certificate.

    The support function is sampled on ``grid`` angles and refined by
    bisection where the wedge bound still exceeds the best feasible value
    ``|x* m x|``. By default the upper estimate is also capped by
    ``1/2 || |m| + |m*| ||``, which is attained when ``m^2 = 0``.

    Args:
        m: Square complex matrix
        tol: Relative target; the gap is driven below ``tol * max(1, ||m||)``
        grid: Initial number of equally spaced angles
        max_points: Total angle budget before giving up on the target
        abs_cap: Cap the upper estimate by ``1/2 || |m| + |m*| ||``; without it
            only the wedge bounds and ``||m||`` certify the radius

    Returns:
        RadiusResult whose value is a feasible lower estimate and whose
        certified_tolerance bounds the distance to the true radius
    """
    m = require_square(m)
    if tol < MIN_TOL:
        raise OutOfRangeError(f"Tolerance must be at least {MIN_TOL:g}, got {tol:g}")
    if grid < 8:
        raise OutOfRangeError(f"Theta grid needs at least 8 points, got {grid}")

    norm = operator_norm(m)
    if norm == 0.0:
        return RadiusResult(0.0, 0.0, 0.0, RadiusMethod.THETA_SWEEP)

    floor = _rounding_floor(m, norm)
    target = max(tol * max(1.0, norm) - floor, floor)
    cap = norm + floor
    if abs_cap:
        cap = min(cap, 0.5 * operator_norm(abs_value(m) + abs_value(m.conj().T)) + floor)

    lower, upper, _, theta = _certify_support(
        lambda thetas: _support_batch(m, thetas),
        grid=grid,
        target=target,
        max_points=max(max_points, grid + 1),
        cap=cap,
        polish=lambda t: re_norm_at_theta(m, t),
    )
    return RadiusResult(lower, (upper - lower) + floor, theta, RadiusMethod.THETA_SWEEP)


def nr_ellipse_2x2(m: ComplexMatrix) -> RadiusResult:
    """
    Numerical radius of a 2 x 2 matrix from its elliptical numerical range.

    The ellipse has the eigenvalues as foci and minor axis
    ``sqrt(tr(m* m) - |l1|^2 - |l2|^2)``; its support function is maximized
    with the same wedge bounds the sweep uses.
    """
    m = as_matrix(m)
    if m.shape != (2, 2):
        raise WrongDimensionError(f"Ellipse oracle needs a 2x2 matrix, got shape {m.shape}")

    trace = complex(m[0, 0] + m[1, 1])
    det = complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    # eigenvalues are trace/2 +- sqrt(disc); only |disc| and arg(disc) are needed
    disc = trace * trace / 4 - det
    center = trace / 2

    frob = float(np.sum(np.abs(m) ** 2))
    # |l1|^2 + |l2|^2 = 2|center|^2 + 2|disc| and |l1 - l2|^2 = 4|disc|
    minor_sq = max(frob - 2 * abs(center) ** 2 - 2 * abs(disc), 0.0)
    major_sq = minor_sq + 4 * abs(disc)
    a_sq = major_sq / 4
    b_sq = minor_sq / 4
    orientation = 0.5 * math.atan2(disc.imag, disc.real) if disc != 0 else 0.0

    reach = abs(center) + math.sqrt(a_sq)
    if reach == 0.0:
        return RadiusResult(0.0, 0.0, 0.0, RadiusMethod.ELLIPSE_2X2)

    def support_batch(thetas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        cos_s = np.cos(thetas + orientation)
        sin_s = np.sin(thetas + orientation)
        spread = np.sqrt(a_sq * cos_s ** 2 + b_sq * sin_s ** 2)
        support = np.real(np.exp(1j * thetas) * center) + spread
        # support point c + e^{i phi} (a^2 cos s - i b^2 sin s) / spread
        safe = np.maximum(spread, np.finfo(float).tiny)
        points = center + np.exp(1j * orientation) * (a_sq * cos_s - 1j * b_sq * sin_s) / safe
        return support, np.abs(points)

    floor = 16 * EPS * max(1.0, reach)
    target = ELLIPSE_TOL * max(1.0, reach)
    lower, upper, _, theta = _certify_support(
        support_batch, grid=ELLIPSE_GRID, target=target, max_points=ELLIPSE_MAX_POINTS,
        cap=reach + floor, label="ellipse oracle",
    )
    return RadiusResult(lower, (upper - lower) + floor, theta, RadiusMethod.ELLIPSE_2X2)


def _rayleigh_restart(m: ComplexMatrix, seed: int, index: int, iterations: int) -> Tuple[float, float]:
    """One ascent run; returns ``(|x* m x|, theta)`` of the best iterate."""
    n = m.shape[0]
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, index])
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    scale = max(operator_norm(m), np.finfo(float).tiny)

    best_value, best_theta = 0.0, 0.0
    for _ in range(iterations):
        z = complex(np.vdot(x, m @ x))
        if abs(z) > best_value:
            best_value, best_theta = abs(z), (-math.atan2(z.imag, z.real)) % TWO_PI
        phase = z / abs(z) if abs(z) > 0 else 1.0
        rotated = (m / phase + (m / phase).conj().T) / 2
        hx = rotated @ x
        residual = hx - np.vdot(x, hx) * x
        res_norm = np.linalg.norm(residual)
        if res_norm <= 1e-14 * scale:
            break
        basis = np.column_stack([x, residual / res_norm])
        projected = basis.conj().T @ rotated @ basis
        _, vectors = np.linalg.eigh((projected + projected.conj().T) / 2)
        x = basis @ vectors[:, -1]
        x /= np.linalg.norm(x)

    z = complex(np.vdot(x, m @ x))
    if abs(z) > best_value:
        best_value, best_theta = abs(z), (-math.atan2(z.imag, z.real)) % TWO_PI
    return best_value, best_theta


def nr_rayleigh(m: ComplexMatrix, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                iterations: int = RAYLEIGH_ITERATIONS, jobs: int = 1) -> RadiusResult:
    """
    Lower estimate of ``w(m)`` by alternating phase alignment and Rayleigh-Ritz ascent.

    Every iterate is a unit vector, so the value never exceeds ``w(m)``.
    Restart ``i`` draws its start vector from ``default_rng([seed, i])`` and
    the best restart is chosen in index order, so the result does not depend
    on how restarts are scheduled across ``jobs`` threads.
    """
    m = require_square(m)
    if restarts < 1:
        raise OutOfRangeError(f"Need at least one restart, got {restarts}")

    runs = parallel_process(
        range(restarts),
        lambda index: _rayleigh_restart(m, seed, index, iterations),
        max_workers=jobs,
    )
    values = np.array([value for value, _ in runs])
    best = int(np.argmax(values))
    return RadiusResult(float(values[best]), math.inf, runs[best][1], RadiusMethod.RAYLEIGH_ASCENT)


def re_norm_at_theta(m: ComplexMatrix, theta: float) -> float:
    """Largest eigenvalue (signed) of ``(e^{i theta} m + e^{-i theta} m*) / 2``."""
    m = require_square(m)
    return float(np.linalg.eigvalsh(_rotated_hermitian(m, theta))[-1])


def _require_psd(p: ComplexMatrix, name: str) -> ComplexMatrix:
    p = require_square(p, name=name)
    try:
        eigenvalues, _ = herm_eig(p)
    except NotHermitianError as e:
        raise NotPSDError(f"{name} is not positive semidefinite: {e}")
    band = PSD_TOL * max(1.0, float(np.max(np.abs(eigenvalues))))
    if eigenvalues[0] < -band:
        raise NotPSDError(f"{name} is not positive semidefinite (eigenvalue {eigenvalues[0]:.3e})")
    return p


def _require_unit(x: np.ndarray, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > UNIT_TOL:
        raise NotUnitError(f"{name} must be a unit vector, has norm {norm:.15g}")
    return x


def spectral_radius_psd_product(b: ComplexMatrix, c: ComplexMatrix) -> float:
    """
    Spectral radius of ``b c`` for positive semidefinite ``b`` and ``c``.

    ``b c`` is similar to ``b^{1/2} c b^{1/2}``, which is Hermitian, so the
    radius is its largest eigenvalue.
    """
    b = _require_psd(b, "b")
    c = _require_psd(c, "c")
    if b.shape != c.shape:
        raise DimensionMismatchError(f"b and c must share a shape, got {b.shape} and {c.shape}")
    root = matfun_psd(b, np.sqrt)
    eigenvalues, _ = herm_eig(root @ c @ root)
    return max(float(eigenvalues[-1]), 0.0)


def check_block_identities(blocks, tol: float = 1e-8) -> BlockIdentityReport:
    """
    Compare the block numerical radius identities

    * ``w([[A, 0], [0, D]]) = max(w(A), w(D))``
    * ``w([[A, B], [B, A]]) = max(w(A + B), w(A - B))``
    * ``w([[A, B], [-B, A]]) = max(w(A + iB), w(A - iB))``

    using blocks ``a``, ``b`` and ``d``. Radii are computed at ``tol / 100``.
    """
    inner_tol = max(tol / 100, MIN_TOL)

    def w(x):
        return numerical_radius(x, tol=inner_tol).value

    a, b, d = blocks.a, blocks.b, blocks.d
    diagonal = abs(w(blocks.diag_part().embed()) - max(w(a), w(d)))
    symmetric = abs(w(np.block([[a, b], [b, a]])) - max(w(a + b), w(a - b)))
    skew = abs(w(np.block([[a, b], [-b, a]])) - max(w(a + 1j * b), w(a - 1j * b)))
    return BlockIdentityReport(
        diagonal_ok=diagonal <= tol,
        symmetric_ok=symmetric <= tol,
        skew_ok=skew <= tol,
        diagonal_residual=diagonal,
        symmetric_residual=symmetric,
        skew_residual=skew,
    )


def check_jensen(h: ComplexMatrix, x: np.ndarray, phi: Callable[[np.ndarray], np.ndarray]) -> InequalityCheck:
    """
    Operator Jensen inequality ``phi(<h x, x>) <= <phi(h) x, x>``.

    Args:
        h: Positive semidefinite matrix
        x: Unit vector
        phi: Convex function on [0, inf), applied by functional calculus

    Returns:
        InequalityCheck with ``holds`` iff ``lhs <= rhs + 1e-10``
    """
    h = _require_psd(h, "h")
    x = _require_unit(x)
    if h.shape[0] != x.shape[0]:
        raise DimensionMismatchError(f"Vector of length {x.shape[0]} does not fit a {h.shape[0]}x{h.shape[0]} matrix")
    quadratic = max(float(np.real(np.vdot(x, h @ x))), 0.0)
    lhs = float(phi(quadratic))
    rhs = float(np.real(np.vdot(x, matfun_psd(h, phi) @ x)))
    return InequalityCheck(lhs, rhs, lhs <= rhs + CHECK_MARGIN)


def check_mixed_cs(m: ComplexMatrix, x: np.ndarray, y: np.ndarray, pair: FactorPair) -> InequalityCheck:
    """
    Mixed Cauchy-Schwarz ``|<m x, y>| <= <f^2(|m|) x, x>^{1/2} <g^2(|m*|) y, y>^{1/2}``.
    """
    m = require_square(m)
    pair.validate()
    x = _require_unit(x, "x")
    y = _require_unit(y, "y")
    if not (m.shape[0] == x.shape[0] == y.shape[0]):
        raise DimensionMismatchError("Vectors must match the matrix dimension")

    alpha = pair.alpha
    f_sq = abs_fun(m, lambda t: np.power(t, 2 * alpha))
    g_sq = abs_fun(m.conj().T, lambda t: np.power(t, 2 * (1 - alpha)))
    lhs = abs(complex(np.vdot(y, m @ x)))
    left = max(float(np.real(np.vdot(x, f_sq @ x))), 0.0)
    right = max(float(np.real(np.vdot(y, g_sq @ y))), 0.0)
    rhs = math.sqrt(left) * math.sqrt(right)
    return InequalityCheck(lhs, rhs, lhs <= rhs + CHECK_MARGIN)


def check_gauge_mean(a: ComplexMatrix, b: ComplexMatrix, h: GaugeH) -> InequalityCheck:
    """Gauge mean inequality ``h(||(a + b) / 2||) <= ||(h(a) + h(b)) / 2||`` for PSD ``a``, ``b``."""
    a = _require_psd(a, "a")
    b = _require_psd(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"a and b must share a shape, got {a.shape} and {b.shape}")
    lhs = float(h(operator_norm((a + b) / 2)))
    rhs = operator_norm((matfun_psd(a, h) + matfun_psd(b, h)) / 2)
    margin = CHECK_MARGIN * max(1.0, abs(lhs), abs(rhs))
    return InequalityCheck(lhs, rhs, lhs <= rhs + margin)


def radius_by_method(m: ComplexMatrix, method: str = "sweep", tol: float = DEFAULT_TOL,
                     restarts: int = DEFAULT_RESTARTS, seed: int = 0, grid: int = DEFAULT_GRID) -> RadiusResult:
    """Dispatch on a method name: ``sweep``, ``ellipse`` or ``rayleigh``."""
    if method == "sweep":
        return numerical_radius(m, tol=tol, grid=grid)
    if method == "ellipse":
        return nr_ellipse_2x2(m)
    if method == "rayleigh":
        return nr_rayleigh(m, restarts=restarts, seed=seed)
    raise ValueError(f"Invalid method: {method}. Must be one of: sweep, ellipse, rayleigh")


RADIUS_METHODS: List[str] = ["sweep", "ellipse", "rayleigh"]
