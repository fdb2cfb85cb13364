"""Validation suite: randomized bound trials, lemma checks, sharpness cases and reports."""

import csv
import hashlib
import io
import json
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from rich.console import Console
from rich.table import Table

from .bounds import (
    BoundId,
    BoundParams,
    OperandShape,
    evaluate_bound,
    get_entry,
    sample_gauge,
)
from .config import DEFAULT_MASTER_SEED, SuiteConfig
from .ensembles import EnsembleKind, EnsembleSpec, derive_seed, generate, resolve_kind, trial_seed
from .gauges import FactorPair, FactorQuad, HolderPair, PowerGauge, holder_conjugate, holder_sum, young_chain
from .matrix import BlockMatrix2x2, ComplexMatrix, operator_norm
from .numrange import (
    MIN_TOL,
    check_block_identities,
    check_gauge_mean,
    check_jensen,
    check_mixed_cs,
    nr_ellipse_2x2,
    nr_rayleigh,
    numerical_radius,
)
from .utils import Timer, parallel_process

logger = logging.getLogger("numrad")

REPORT_FORMATS = ("json", "csv", "text")
CSV_HEADER = ["bound_id", "trials", "passes", "worst_slack", "worst_seed"]

LEMMA_MARGIN = 1e-10
LEMMA_P_MAX = 8.0
LEMMA_R_MIN, LEMMA_R_MAX = 1.0, 4.0
LEMMA_OPERAND_MAX = 3.0
LEMMA_LOG_CEILING = 600.0
BLOCK_IDENTITY_TOL = 1e-8
ELLIPSE_AGREEMENT = 1e-9
RAYLEIGH_AGREEMENT = 1e-6
RAYLEIGH_OVERSHOOT = 1e-9
RAYLEIGH_RESTARTS = 64

SHARPNESS_TOL = 1e-6
EQUALITY_CASE_TOL = 1e-8
EQUALITY_CASE_TRIALS = 200
SHARPNESS_RADIUS_TOL = 1e-11

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass(frozen=True)
class TrialOutcome:
    """One trial; ``score`` orders outcomes from worst (lowest) to best."""

    index: int
    seed: int
    status: str
    slack: Optional[float] = None
    score: float = math.inf


@dataclass
class BoundSummary:
    """Aggregated outcomes of one bound or property check."""

    bound_id: str
    trials: int = 0
    passes: int = 0
    failures: int = 0
    skipped: int = 0
    worst_slack: Optional[float] = None
    worst_seed: Optional[int] = None
    worst_index: Optional[int] = None

    @classmethod
    def from_outcomes(cls, bound_id: str, outcomes: Sequence[TrialOutcome]) -> "BoundSummary":
        """Reduce in index order so the summary does not depend on scheduling."""
        summary = cls(bound_id)
        worst: Optional[TrialOutcome] = None
        for outcome in sorted(outcomes, key=lambda o: o.index):
            summary.trials += 1
            if outcome.status == SKIP:
                summary.skipped += 1
                continue
            if outcome.status == PASS:
                summary.passes += 1
            else:
                summary.failures += 1
            if worst is None or outcome.score < worst.score:
                worst = outcome
        if worst is not None:
            summary.worst_slack = worst.slack
            summary.worst_seed = worst.seed
            summary.worst_index = worst.index
        return summary

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bound_id": self.bound_id,
            "trials": self.trials,
            "passes": self.passes,
            "failures": self.failures,
            "skipped": self.skipped,
            "worst_slack": self.worst_slack,
            "worst_seed": self.worst_seed,
            "worst_index": self.worst_index,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoundSummary":
        return cls(**data)


@dataclass
class SuiteReport:
    """Suite outcome; ``timing`` is the only part excluded from the digest."""

    results: List[BoundSummary] = field(default_factory=list)
    settings: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def total_trials(self) -> int:
        return sum(r.trials for r in self.results)

    @property
    def total_failures(self) -> int:
        return sum(r.failures for r in self.results)

    @property
    def ok(self) -> bool:
        return self.total_failures == 0

    def result(self, bound_id: str) -> BoundSummary:
        for summary in self.results:
            if summary.bound_id == bound_id:
                return summary
        raise KeyError(bound_id)

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "results": [r.to_dict() for r in self.results],
            "settings": dict(self.settings),
            "summary": {
                "total_trials": self.total_trials,
                "total_failures": self.total_failures,
                "ok": self.ok,
            },
        }
        if include_timing:
            data["timing"] = {"wall_time": self.wall_time}
        return data

    def digest(self) -> str:
        """SHA-256 of the canonical JSON without the timing block."""
        payload = json.dumps(self.to_dict(include_timing=False), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SuiteReport":
        return cls(
            results=[BoundSummary.from_dict(r) for r in data.get("results", [])],
            settings=dict(data.get("settings", {})),
            wall_time=float(data.get("timing", {}).get("wall_time", 0.0)),
        )


@dataclass
class TrialInstance:
    """Everything needed to replay one bound trial."""

    bound_id: BoundId
    index: int
    seed: int
    kind: EnsembleKind
    dim: int
    blocks: BlockMatrix2x2
    params: BoundParams


_SHAPE_BLOCKS = {
    OperandShape.SINGLE: ("a",),
    OperandShape.OFFDIAG: ("b", "c"),
    OperandShape.DIAG: ("a", "d"),
    OperandShape.PAIR: ("a", "b"),
    OperandShape.FULL: ("a", "b", "c", "d"),
}


def _outcome(index: int, seed: int, slack: float, passed: bool) -> TrialOutcome:
    if slack is None or not math.isfinite(slack):
        return TrialOutcome(index, seed, FAIL, None, -math.inf)
    return TrialOutcome(index, seed, PASS if passed else FAIL, float(slack), float(slack))


def _settings(config: SuiteConfig) -> Dict[str, Any]:
    return {
        "master_seed": config.master_seed,
        "trials": config.trials,
        "property_trials": config.property_trials,
        "ensembles": list(config.ensembles),
        "dim_min": config.dim_min,
        "dim_max": config.dim_max,
        "tol": config.tol,
        "grid": config.grid,
        "rescale": config.rescale,
        "gauge_rescale": config.gauge_rescale,
        "gate_hypotheses": config.gate_hypotheses,
        "respect_hypotheses": config.respect_hypotheses,
        "sample_params": config.sample_params,
    }


def regenerate_trial(config: SuiteConfig, bound: Union[BoundId, str], index: int) -> TrialInstance:
    """
    Rebuild the operands and parameters of one bound trial.

    The instance is a pure function of the master seed, the bound id, the
    trial index and the sampling fields of ``config``.
    """
    entry = get_entry(bound)
    seed = trial_seed(config.master_seed, entry.id.value, index)
    rng = np.random.default_rng(seed)
    kind = resolve_kind(config.ensembles[int(rng.integers(len(config.ensembles)))])
    dim = int(rng.integers(config.dim_min, config.dim_max + 1))

    params = entry.sampler(rng) if config.sample_params else entry.defaults
    params = entry.defaults.merged(params).merged(config.bound_params(entry.id))

    rescale = config.gauge_rescale if entry.takes_gauge else config.rescale
    zero = np.zeros((dim, dim), dtype=np.complex128)
    blocks = {name: zero for name in "abcd"}
    for name in _SHAPE_BLOCKS[entry.shape]:
        block_kind = entry.block_kinds.get(name, kind.value) if config.respect_hypotheses else kind.value
        spec = EnsembleSpec(resolve_kind(block_kind), dim, derive_seed(seed, name), rescale)
        blocks[name] = generate(spec)

    return TrialInstance(entry.id, index, seed, kind, dim, BlockMatrix2x2(**blocks), params)


def run_bound_trial(config: SuiteConfig, bound: Union[BoundId, str], index: int) -> TrialOutcome:
    instance = regenerate_trial(config, bound, index)
    report = evaluate_bound(instance.bound_id, instance.blocks, instance.params, tol=config.tol, grid=config.grid)
    if not report.hypotheses_ok and config.gate_hypotheses:
        logger.debug(f"{instance.bound_id.value} trial {index} skipped: {'; '.join(report.hypotheses.messages)}")
        return TrialOutcome(index, instance.seed, SKIP)
    if not report.holds:
        logger.warning(
            f"{instance.bound_id.value} violated on trial {index} (seed {instance.seed}, "
            f"{instance.kind.value} n={instance.dim}): slack {report.slack:.3e}, tol {report.tol_effective:.3e}"
        )
    return _outcome(index, instance.seed, report.slack, report.holds)


# Property checks; each takes the config and a trial index

def _property_rng(config: SuiteConfig, name: str, index: int):
    seed = trial_seed(config.master_seed, name, index)
    return seed, np.random.default_rng(seed)


def _random_dim(config: SuiteConfig, rng: np.random.Generator) -> int:
    return int(rng.integers(config.dim_min, config.dim_max + 1))


def _unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def _draw(config: SuiteConfig, rng: np.random.Generator, n: int, kind: Optional[str] = None,
          rescale: Optional[float] = None) -> ComplexMatrix:
    kind = kind or config.ensembles[int(rng.integers(len(config.ensembles)))]
    spec = EnsembleSpec(resolve_kind(kind), n, int(rng.integers(1 << 62)),
                        config.rescale if rescale is None else rescale)
    return generate(spec)


def sample_lemma_exponents(rng: np.random.Generator) -> Tuple[HolderPair, float]:
    """Hölder pair with ``p`` in (1, 8] and a power ``r`` in [1, 4] for the scalar lemma checks."""
    p = LEMMA_P_MAX - (LEMMA_P_MAX - 1.0) * float(rng.random())
    return holder_conjugate(p), float(rng.uniform(LEMMA_R_MIN, LEMMA_R_MAX))


def _operand_ceiling(exponent: float) -> float:
    # t^exponent stays finite for t below the ceiling
    return min(LEMMA_OPERAND_MAX, math.exp(LEMMA_LOG_CEILING / exponent))


def _check_young(config: SuiteConfig, index: int) -> TrialOutcome:
    seed, rng = _property_rng(config, "lemma:young", index)
    holder, r = sample_lemma_exponents(rng)
    a = float(rng.uniform(0.0, _operand_ceiling(holder.p * r)))
    b = float(rng.uniform(0.0, _operand_ceiling(holder.q * r)))
    product, young, refined = young_chain(a, b, holder, r)
    slack = min(young - product, refined - young)
    return _outcome(index, seed, slack, slack >= -LEMMA_MARGIN * max(1.0, refined))


def _check_holder(config: SuiteConfig, index: int) -> TrialOutcome:
    seed, rng = _property_rng(config, "lemma:holder", index)
    holder, _ = sample_lemma_exponents(rng)
    length = int(rng.integers(1, 9))
    a = rng.uniform(0.0, _operand_ceiling(holder.p), size=length)
    b = rng.uniform(0.0, _operand_ceiling(holder.q), size=length)
    lhs, rhs = holder_sum(a, b, holder)
    return _outcome(index, seed, rhs - lhs, lhs <= rhs + LEMMA_MARGIN * max(1.0, rhs))


def _check_jensen(config: SuiteConfig, index: int) -> TrialOutcome:
    seed, rng = _property_rng(config, "lemma:jensen", index)
    n = _random_dim(config, rng)
    h = _draw(config, rng, n, kind=EnsembleKind.WISHART.value, rescale=config.gauge_rescale)
    result = check_jensen(h, _unit_vector(rng, n), sample_gauge(rng))
    return _outcome(index, seed, result.slack, result.holds)


def _check_mixed_cs(config: SuiteConfig, index: int) -> TrialOutcome:
    seed, rng = _property_rng(config, "lemma:mixed_cs", index)
    n = _random_dim(config, rng)
    m = _draw(config, rng, n)
    result = check_mixed_cs(m, _unit_vector(rng, n), _unit_vector(rng, n), FactorPair(float(rng.uniform(0.0, 1.0))))
    return _outcome(index, seed, result.slack, result.holds)


def _check_gauge_mean(config: SuiteConfig, index: int) -> TrialOutcome:
    seed, rng = _property_rng(config, "lemma:gauge_mean", index)
    n = _random_dim(config, rng)
    a = _draw(config, rng, n, kind=EnsembleKind.WISHART.value, rescale=config.gauge_rescale)
    b = _draw(config, rng, n, kind=EnsembleKind.WISHART.value, rescale=config.gauge_rescale)
    result = check_gauge_mean(a, b, sample_gauge(rng))
    return _outcome(index, seed, result.slack, result.holds)


def _check_block_identity(config: SuiteConfig, index: int) -> TrialOutcome:
    seed, rng = _property_rng(config, "identity:block", index)
    n = _random_dim(config, rng)
    a, b, d = (_draw(config, rng, n) for _ in range(3))
    zero = np.zeros_like(a)
    report = check_block_identities(BlockMatrix2x2(a, b, zero, d), tol=BLOCK_IDENTITY_TOL)
    worst = max(report.diagonal_residual, report.symmetric_residual, report.skew_residual)
    return _outcome(index, seed, BLOCK_IDENTITY_TOL - worst, report.all_ok)


def _check_ellipse(config: SuiteConfig, index: int) -> TrialOutcome:
    seed, rng = _property_rng(config, "oracle:ellipse", index)
    m = _draw(config, rng, 2)
    gap = abs(numerical_radius(m, tol=MIN_TOL).value - nr_ellipse_2x2(m).value)
    return _outcome(index, seed, ELLIPSE_AGREEMENT - gap, gap <= ELLIPSE_AGREEMENT)


def _check_rayleigh(config: SuiteConfig, index: int) -> TrialOutcome:
    seed, rng = _property_rng(config, "oracle:rayleigh", index)
    m = _draw(config, rng, _random_dim(config, rng))
    sweep = numerical_radius(m, tol=MIN_TOL).value
    ascent = nr_rayleigh(m, restarts=RAYLEIGH_RESTARTS, seed=seed).value
    scale = max(1.0, operator_norm(m))
    gap = sweep - ascent
    passed = -RAYLEIGH_OVERSHOOT * scale <= gap <= RAYLEIGH_AGREEMENT * scale
    return _outcome(index, seed, RAYLEIGH_AGREEMENT * scale - abs(gap), passed)


PROPERTY_RUNNERS: Dict[str, Callable[[SuiteConfig, int], TrialOutcome]] = {
    "lemma:young": _check_young,
    "lemma:holder": _check_holder,
    "lemma:jensen": _check_jensen,
    "lemma:mixed_cs": _check_mixed_cs,
    "lemma:gauge_mean": _check_gauge_mean,
    "identity:block": _check_block_identity,
    "oracle:ellipse": _check_ellipse,
    "oracle:rayleigh": _check_rayleigh,
}


def run_suite(config: SuiteConfig, show_progress: bool = False) -> SuiteReport:
    """
    Run every selected bound and property check.

    Args:
        config: Suite configuration
        show_progress: Whether to show a progress bar per bound

    Returns:
        SuiteReport with one row per bound in catalog order, then one row
        per property check
    """
    report = SuiteReport(settings=_settings(config))
    with Timer("validation suite", verbose=config.verbose) as timer:
        for bound_id in config.bound_ids():
            outcomes = parallel_process(
                range(config.trials),
                partial(run_bound_trial, config, bound_id),
                max_workers=config.jobs,
                show_progress=show_progress,
                desc=bound_id.value,
            )
            summary = BoundSummary.from_outcomes(bound_id.value, outcomes)
            if summary.skipped:
                logger.info(f"{bound_id.value}: {summary.skipped} of {summary.trials} trials skipped by hypothesis gating")
            if summary.failures:
                logger.warning(f"{bound_id.value}: {summary.failures} of {summary.trials} trials failed")
            report.results.append(summary)

        for name in config.properties:
            trials = config.trials_for(name)
            if trials == 0:
                continue
            outcomes = parallel_process(
                range(trials),
                partial(PROPERTY_RUNNERS[name], config),
                max_workers=config.jobs,
                show_progress=show_progress,
                desc=name,
            )
            report.results.append(BoundSummary.from_outcomes(name, outcomes))

    report.wall_time = timer.duration
    return report


# Sharpness

def _sharp_outcome(index: int, seed: int, slack: float, tol: float) -> TrialOutcome:
    if not math.isfinite(slack):
        return TrialOutcome(index, seed, FAIL, None, -math.inf)
    return TrialOutcome(index, seed, PASS if abs(slack) <= tol else FAIL, float(slack), -abs(float(slack)))


def _reflection_blocks() -> BlockMatrix2x2:
    b = np.diag([1.0, -1.0]).astype(np.complex128)
    zero = np.zeros_like(b)
    return BlockMatrix2x2(zero, b, b, zero)


def _equality_case(bound_id: BoundId, kind: EnsembleKind, master_seed: int, index: int, min_dim: int) -> TrialOutcome:
    seed = trial_seed(master_seed, f"sharp:{bound_id.value}:{kind.value}", index)
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(min_dim, 9))
    a = generate(EnsembleSpec(kind, dim, seed))
    report = evaluate_bound(bound_id, a, tol=SHARPNESS_RADIUS_TOL)
    return _sharp_outcome(index, seed, report.slack, EQUALITY_CASE_TOL)


def sharpness_suite(master_seed: int = DEFAULT_MASTER_SEED, trials: int = EQUALITY_CASE_TRIALS,
                    jobs: int = 1) -> SuiteReport:
    """
    Equality cases: each row passes when every ``|slack|`` is within tolerance.

    * reflection blocks ``B = C = diag(1, -1)`` make the off-diagonal gauge
      bound (identity gauge, square-root factors) and the off-diagonal Hölder
      bound (``r = p = q = 2``) equalities
    * normal matrices attain ``w = ||A||``
    * square-zero matrices attain ``w = ||A|| / 2`` and equality in the lower
      quadratic bound
    """
    report = SuiteReport(settings={"master_seed": master_seed, "trials": trials,
                                   "sharpness_tol": SHARPNESS_TOL, "equality_tol": EQUALITY_CASE_TOL})
    with Timer("sharpness suite", verbose=False) as timer:
        blocks = _reflection_blocks()
        half = FactorPair(0.5)
        constructions = [
            (BoundId.OFFDIAG_GAUGE, BoundParams(gauge=PowerGauge(1.0), pair=half, alpha=0.5)),
            (BoundId.OFFDIAG_HOLDER, BoundParams(quad=FactorQuad(half, half), holder=HolderPair(2.0, 2.0), r=2.0)),
        ]
        for bound_id, params in constructions:
            result = evaluate_bound(bound_id, blocks, params, tol=SHARPNESS_RADIUS_TOL)
            outcome = _sharp_outcome(0, 0, result.slack, SHARPNESS_TOL)
            report.results.append(BoundSummary.from_outcomes(f"sharp:{bound_id.value}", [outcome]))

        cases = [
            ("sharp:normal_norm", BoundId.NORM_SANDWICH_UPPER, EnsembleKind.NORMAL, 1),
            ("sharp:square_zero_half_norm", BoundId.NORM_SANDWICH_LOWER, EnsembleKind.NILPOTENT, 2),
            ("sharp:square_zero_abs_square", BoundId.ABS_SQUARE_LOWER, EnsembleKind.NILPOTENT, 2),
        ]
        for name, bound_id, kind, min_dim in cases:
            outcomes = parallel_process(
                range(trials),
                partial(_equality_case, bound_id, kind, master_seed, min_dim=min_dim),
                max_workers=jobs,
            )
            report.results.append(BoundSummary.from_outcomes(name, outcomes))

    report.wall_time = timer.duration
    return report


# Reports

def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def _render_text(report: SuiteReport) -> str:
    table = Table(title="Validation suite")
    table.add_column("Check", style="cyan")
    table.add_column("Trials", justify="right")
    table.add_column("Passes", justify="right", style="green")
    table.add_column("Failures", justify="right", style="red")
    table.add_column("Skipped", justify="right", style="yellow")
    table.add_column("Worst slack", justify="right")
    table.add_column("Worst seed", justify="right")
    for r in report.results:
        table.add_row(
            r.bound_id,
            str(r.trials),
            str(r.passes),
            str(r.failures),
            str(r.skipped),
            "-" if r.worst_slack is None else f"{r.worst_slack:.3e}",
            "-" if r.worst_seed is None else str(r.worst_seed),
        )

    console = Console(record=True, width=120, file=io.StringIO())
    console.print(table)
    status = "[bold green]OK[/bold green]" if report.ok else "[bold red]FAILED[/bold red]"
    console.print(f"{status}: {report.total_trials} trials, {report.total_failures} failures, "
                  f"{report.wall_time:.2f} seconds")
    return console.export_text()


def emit_report(report: SuiteReport, format: str = "json") -> bytes:
    """
    Serialize a report.

    Args:
        report: Suite report
        format: ``json`` (schema-stable, sorted keys), ``csv`` (one row per
            check after the header) or ``text`` (rich table)

    Returns:
        UTF-8 encoded report
    """
    if format == "json":
        return (json.dumps(_json_safe(report.to_dict()), indent=2, sort_keys=True) + "\n").encode("utf-8")
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in report.results:
            writer.writerow([
                r.bound_id,
                r.trials,
                r.passes,
                "" if r.worst_slack is None else repr(r.worst_slack),
                "" if r.worst_seed is None else r.worst_seed,
            ])
        return buffer.getvalue().encode("utf-8")
    if format == "text":
        return _render_text(report).encode("utf-8")
    raise ValueError(f"Invalid report format: {format}. Must be one of: {', '.join(REPORT_FORMATS)}")


def load_report(source: Union[str, Path, bytes]) -> SuiteReport:
    """Read a JSON report from a path or from its bytes."""
    if isinstance(source, bytes):
        data = json.loads(source.decode("utf-8"))
    else:
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    return SuiteReport.from_dict(data)


def write_report(report: SuiteReport, path: Union[str, Path], format: Optional[str] = None) -> Path:
    """Write ``report`` to ``path``; the format follows the suffix unless given."""
    path = Path(path)
    if format is None:
        format = {".csv": "csv", ".txt": "text"}.get(path.suffix.lower(), "json")
    path.write_bytes(emit_report(report, format))
    logger.info(f"Report written to {path}")
    return path
