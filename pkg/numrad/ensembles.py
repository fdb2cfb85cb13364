"""Seeded random matrix ensembles for the validation suite."""

import hashlib
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import DimOutOfRangeError
from .matrix import ComplexMatrix, adjoint, operator_norm

logger = logging.getLogger("numrad")

MIN_DIM = 1
MAX_DIM = 32
DEFAULT_RESCALE = 5.0
SEED_MASK = (1 << 64) - 1


class EnsembleKind(str, Enum):
    GINIBRE = "ginibre"
    GUE = "gue"
    WISHART = "wishart"
    NILPOTENT = "nilpotent"
    NORMAL = "normal"


ENSEMBLE_KINDS = tuple(kind.value for kind in EnsembleKind)


@dataclass(frozen=True)
class EnsembleSpec:
    """
    A reproducible ensemble draw.

    ``rescale`` is the target operator norm; None keeps the raw draw. The
    zero matrix (square-zero in dimension 1) is never rescaled.
    """

    kind: EnsembleKind
    dim: int
    seed: int
    rescale: Optional[float] = DEFAULT_RESCALE

    def to_dict(self):
        return {"kind": self.kind.value, "dim": self.dim, "seed": self.seed, "rescale": self.rescale}


def resolve_kind(kind: Union[EnsembleKind, str]) -> EnsembleKind:
    if isinstance(kind, EnsembleKind):
        return kind
    try:
        return EnsembleKind(str(kind).strip().lower())
    except ValueError:
        raise ValueError(f"Invalid ensemble: {kind}. Must be one of: {', '.join(ENSEMBLE_KINDS)}")


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> ComplexMatrix:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, n: int) -> ComplexMatrix:
    """Haar-distributed unitary from the QR of a Ginibre draw with fixed phases."""
    q, r = np.linalg.qr(_ginibre(rng, n, n))
    diagonal = np.diagonal(r)
    phases = np.where(np.abs(diagonal) > 0, diagonal / np.abs(diagonal), 1.0)
    return q * phases


def _square_zero(rng: np.random.Generator, n: int) -> ComplexMatrix:
    # [[0, Z], [0, 0]] squares to zero; a unitary similarity keeps that
    k = n // 2
    core = np.zeros((n, n), dtype=np.complex128)
    if k > 0:
        core[:k, k:] = _ginibre(rng, k, n - k)
    u = haar_unitary(rng, n)
    return u @ core @ adjoint(u)


def _normal(rng: np.random.Generator, n: int) -> ComplexMatrix:
    eigenvalues = _ginibre(rng, n, 1)[:, 0]
    u = haar_unitary(rng, n)
    return (u * eigenvalues) @ adjoint(u)


def generate(spec: EnsembleSpec) -> ComplexMatrix:
    """
    Draw one matrix; a pure function of ``(kind, dim, seed, rescale)``.

    Args:
        spec: Ensemble, dimension in [1, 32], seed and target norm

    Returns:
        Complex ``dim x dim`` matrix
    """
    kind = resolve_kind(spec.kind)
    n = int(spec.dim)
    if not MIN_DIM <= n <= MAX_DIM:
        raise DimOutOfRangeError(f"Ensemble dimension must lie in [{MIN_DIM}, {MAX_DIM}], got {spec.dim}")

    rng = np.random.default_rng(int(spec.seed) & SEED_MASK)
    if kind is EnsembleKind.GINIBRE:
        m = _ginibre(rng, n, n)
    elif kind is EnsembleKind.GUE:
        g = _ginibre(rng, n, n)
        m = (g + adjoint(g)) / 2
    elif kind is EnsembleKind.WISHART:
        g = _ginibre(rng, n, n)
        m = g @ adjoint(g) / n
        m = (m + adjoint(m)) / 2
    elif kind is EnsembleKind.NILPOTENT:
        m = _square_zero(rng, n)
    else:
        m = _normal(rng, n)

    if spec.rescale is not None:
        norm = operator_norm(m)
        if norm > 0:
            m = m * (spec.rescale / norm)
    return m


def derive_seed(*parts: Union[int, str]) -> int:
    """64-bit seed from a BLAKE2b digest of the parts; stable across runs and platforms."""
    digest = hashlib.blake2b(digest_size=8)
    for part in parts:
        digest.update(str(part).encode("utf-8"))
        digest.update(b"\x1f")
    return int.from_bytes(digest.digest(), "little")


def trial_seed(master_seed: int, bound_id: str, index: int) -> int:
    """Per-trial seed so adding bounds or workers never perturbs other trials."""
    return derive_seed(int(master_seed), bound_id, int(index))
