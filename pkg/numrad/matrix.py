"""Dense complex matrix arithmetic for numrad.

Everything here is a pure function of its inputs. Matrices are plain
``numpy.ndarray`` objects of dtype ``complex128``; the helpers only check
shapes and tolerances and leave the heavy lifting to LAPACK.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, NamedTuple, Tuple, Union

import numpy as np
from scipy import linalg as sla

from .errors import (
    DimensionMismatchError,
    MatrixParseError,
    NegativeSpectrumError,
    NonSquareError,
    NotHermitianError,
)

logger = logging.getLogger("numrad")

ComplexMatrix = np.ndarray
ScalarFunction = Callable[[np.ndarray], np.ndarray]

# Relative tolerances shared by the matrix-core contracts
HERMITIAN_TOL = 1e-10
SPECTRUM_TOL = 1e-10

# Cyclic Jacobi settings
JACOBI_THRESHOLD = 1e-13
JACOBI_MAX_SWEEPS = 64

EIGEN_METHODS = ("lapack", "jacobi")


class HermEig(NamedTuple):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: ComplexMatrix


def as_matrix(m: Any) -> ComplexMatrix:
    """Coerce ``m`` to a 2-D complex array with at least one row and column."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError(f"Expected a non-empty 2-D matrix, got shape {arr.shape}")
    return arr


def require_square(m: ComplexMatrix, name: str = "matrix") -> ComplexMatrix:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NonSquareError(f"{name} must be square, got shape {m.shape}")
    return m


def adjoint(m: ComplexMatrix) -> ComplexMatrix:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def operator_norm(m: ComplexMatrix) -> float:
    """Largest singular value of ``m``."""
    m = as_matrix(m)
    if not np.any(m):
        return 0.0
    return float(np.linalg.norm(m, 2))


def hermitian_part(m: ComplexMatrix) -> ComplexMatrix:
    m = as_matrix(m)
    return (m + m.conj().T) / 2


def jacobi_eigh(h: ComplexMatrix,
                threshold: float = JACOBI_THRESHOLD,
                max_sweeps: int = JACOBI_MAX_SWEEPS) -> HermEig:
    """
    Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``h[p, q]`` and then
    applies the real symmetric rotation that annihilates it. Sweeps stop once
    the off-diagonal Frobenius norm drops below ``threshold * ||h||``.

    Args:
        h: Hermitian matrix (already symmetrized by the caller)
        threshold: Relative off-diagonal stopping threshold
        max_sweeps: Maximum number of full sweeps

    Returns:
        HermEig with ascending eigenvalues
    """
    a = np.array(h, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(operator_norm(a), np.finfo(float).tiny)
    target = threshold * scale

    for sweep in range(max_sweeps):
        off = np.sqrt(max(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= np.finfo(float).tiny:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        logger.debug(f"Jacobi reached {max_sweeps} sweeps without meeting threshold")

    eigenvalues = np.real(np.diag(a))
    order = np.argsort(eigenvalues, kind="stable")
    return HermEig(eigenvalues[order], v[:, order])


def herm_eig(h: ComplexMatrix, method: str = "lapack") -> HermEig:
    """
    Eigen-decomposition of a Hermitian matrix.

    Args:
        h: Square matrix with ||h - h*|| <= 1e-10 * max(1, ||h||)
        method: "lapack" (numpy eigh) or "jacobi" (cyclic Jacobi rotations)

    Returns:
        HermEig with ascending eigenvalues and orthonormal eigenvectors
    """
    h = require_square(h)
    if method not in EIGEN_METHODS:
        raise ValueError(f"Unknown eigen method: {method}. Must be one of: {', '.join(EIGEN_METHODS)}")

    norm = operator_norm(h)
    asymmetry = operator_norm(h - h.conj().T) if norm > 0 else 0.0
    if asymmetry > HERMITIAN_TOL * max(1.0, norm):
        raise NotHermitianError(f"Matrix is not Hermitian: ||h - h*|| = {asymmetry:.3e}")

    sym = (h + h.conj().T) / 2
    if method == "jacobi":
        return jacobi_eigh(sym)
    eigenvalues, eigenvectors = np.linalg.eigh(sym)
    return HermEig(eigenvalues, eigenvectors)


def matfun_psd(p: ComplexMatrix, phi: ScalarFunction, method: str = "lapack") -> ComplexMatrix:
    """
    Apply ``phi`` to a positive semidefinite matrix by functional calculus.

    Eigenvalues inside the rounding band ``[-1e-10 * max(1, ||p||), 0)`` are
    clamped to zero; anything more negative is an error.

    Args:
        p: Hermitian positive semidefinite matrix
        phi: Vectorized scalar function defined on [0, inf)
        method: Eigen solver passed to ``herm_eig``

    Returns:
        V diag(phi(lambda)) V*
    """
    eigenvalues, vectors = herm_eig(p, method=method)
    band = SPECTRUM_TOL * max(1.0, float(np.max(np.abs(eigenvalues))))
    if eigenvalues[0] < -band:
        raise NegativeSpectrumError(
            f"Eigenvalue {eigenvalues[0]:.3e} lies below the tolerance band -{band:.3e}"
        )
    values = np.asarray(phi(np.clip(eigenvalues, 0.0, None)), dtype=np.float64)
    result = (vectors * values) @ vectors.conj().T
    return (result + result.conj().T) / 2


def singular_decompose(m: ComplexMatrix) -> Tuple[ComplexMatrix, np.ndarray, ComplexMatrix]:
    """Full SVD ``m = U diag(s) V*``; returns ``(U, s, V)`` with V (not V*)."""
    m = require_square(m)
    u, s, vh = np.linalg.svd(m)
    return u, s, vh.conj().T


def abs_fun(m: ComplexMatrix, phi: ScalarFunction) -> ComplexMatrix:
    """``phi(|m|)`` where ``|m| = (m* m)^{1/2}``."""
    _, s, v = singular_decompose(m)
    values = np.asarray(phi(s), dtype=np.float64)
    result = (v * values) @ v.conj().T
    return (result + result.conj().T) / 2


def abs_power(m: ComplexMatrix, exponent: float) -> ComplexMatrix:
    """``|m|^exponent``, with ``t^0 = 1`` on the null space."""
    return abs_fun(m, lambda t: np.power(t, exponent))


def abs_value(m: ComplexMatrix) -> ComplexMatrix:
    """Absolute value ``|m| = (m* m)^{1/2}``, Hermitian positive semidefinite."""
    return abs_fun(m, lambda t: t)


def polar_decompose(m: ComplexMatrix) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Right polar decomposition ``m = w p``.

    ``w`` is the unitary factor returned by ``scipy.linalg.polar(m,
    side="right")``; ``p`` is ``abs_value(m)`` so it matches the functional
    calculus used elsewhere. ``w`` is unitary even for rank-deficient ``m``,
    where it is not unique.
    """
    m = require_square(m)
    w, _ = sla.polar(m, side="right")
    return w, abs_value(m)


def cartesian(m: ComplexMatrix) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """Cartesian decomposition ``m = re + i im`` with both parts Hermitian."""
    m = require_square(m)
    mh = m.conj().T
    return (m + mh) / 2, (m - mh) / 2j


@dataclass(frozen=True)
class BlockMatrix2x2:
    """
    Four n x n blocks of the 2 x 2 block matrix [[a, b], [c, d]].

    Blocks are stored as read-only arrays so instances can be shared freely.
    """

    a: ComplexMatrix
    b: ComplexMatrix
    c: ComplexMatrix
    d: ComplexMatrix

    def __post_init__(self):
        blocks = {}
        for name in ("a", "b", "c", "d"):
            block = require_square(getattr(self, name), name=f"block {name}")
            block = np.array(block, copy=True)
            block.setflags(write=False)
            blocks[name] = block
        sizes = {name: block.shape[0] for name, block in blocks.items()}
        if len(set(sizes.values())) != 1:
            raise DimensionMismatchError(f"Blocks must share one dimension, got {sizes}")
        for name, block in blocks.items():
            object.__setattr__(self, name, block)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @classmethod
    def single(cls, a: ComplexMatrix) -> "BlockMatrix2x2":
        """Carrier for single-operator bounds: ``a`` with zero companions."""
        a = require_square(a)
        zero = np.zeros_like(a)
        return cls(a, zero, zero, zero)

    @classmethod
    def from_quadrants(cls, m: ComplexMatrix) -> "BlockMatrix2x2":
        """Split an even-sized 2n x 2n matrix into its four n x n quadrants."""
        m = require_square(m)
        if m.shape[0] % 2:
            raise DimensionMismatchError(f"Cannot split a {m.shape[0]}x{m.shape[0]} matrix into 2x2 blocks")
        n = m.shape[0] // 2
        return cls(m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:])

    def embed(self) -> ComplexMatrix:
        return np.block([[self.a, self.b], [self.c, self.d]])

    def diag_part(self) -> "BlockMatrix2x2":
        zero = np.zeros_like(self.a)
        return BlockMatrix2x2(self.a, zero, zero, self.d)

    def offdiag_part(self) -> "BlockMatrix2x2":
        zero = np.zeros_like(self.a)
        return BlockMatrix2x2(zero, self.b, self.c, zero)


def block_embed(blocks: BlockMatrix2x2) -> ComplexMatrix:
    """2n x 2n matrix with the blocks placed as [[a, b], [c, d]]."""
    return blocks.embed()


def matrix_to_dict(m: ComplexMatrix) -> Dict[str, Any]:
    """Serialize to ``{"rows", "cols", "data": [[re, im], ...]}`` in row-major order."""
    m = as_matrix(m)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_dict(doc: Dict[str, Any]) -> ComplexMatrix:
    """
    Parse the matrix JSON schema.

    Args:
        doc: Mapping with integer ``rows``, ``cols`` and a ``data`` list of
            ``[re, im]`` pairs in row-major order

    Returns:
        Complex matrix of shape (rows, cols)
    """
    if not isinstance(doc, dict):
        raise MatrixParseError("Matrix document must be a JSON object")
    for key in ("rows", "cols", "data"):
        if key not in doc:
            raise MatrixParseError(f"Matrix document is missing '{key}'")

    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
        raise MatrixParseError(f"rows and cols must be positive integers, got {rows!r} and {cols!r}")
    if not isinstance(data, list):
        raise MatrixParseError("'data' must be a list of [re, im] pairs")

    expected = rows * cols
    if len(data) != expected:
        index = min(len(data), expected)
        raise MatrixParseError(
            f"Expected {expected} entries for a {rows}x{cols} matrix, got {len(data)} "
            f"(first mismatch at index {index})",
            index=index,
        )

    values = np.empty(expected, dtype=np.complex128)
    for index, entry in enumerate(data):
        if (not isinstance(entry, (list, tuple)) or len(entry) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)):
            raise MatrixParseError(f"Entry at index {index} is not an [re, im] pair: {entry!r}", index=index)
        values[index] = complex(entry[0], entry[1])
    return values.reshape(rows, cols)


def load_matrix(path: Union[str, Path]) -> ComplexMatrix:
    """Read a matrix JSON file."""
    matrix_path = Path(path) if isinstance(path, str) else path
    try:
        with open(matrix_path, "r") as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise MatrixParseError(f"Invalid JSON in {matrix_path}: {e.msg} (line {e.lineno}, column {e.colno})")
    return matrix_from_dict(doc)


def save_matrix(path: Union[str, Path], m: ComplexMatrix) -> None:
    matrix_path = Path(path) if isinstance(path, str) else path
    with open(matrix_path, "w") as f:
        json.dump(matrix_to_dict(m), f, indent=2)
    logger.debug(f"Matrix saved to {matrix_path}")
