"""Dense complex-matrix primitives.

Matrices are plain 2-D ``numpy`` arrays of dtype ``complex128``.  Every
function here is pure: inputs are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import DimensionError, IllConditionedSplitError, NumericBreakdownError

EPS = np.finfo(np.float64).eps


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Return ``x`` as a fresh 2-D complex128 array with finite entries."""
    m = np.array(x, dtype=np.complex128, copy=True)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"{name} must be a nonempty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def require_square(m: np.ndarray, name: str = "matrix") -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m.shape[0]


@dataclass(frozen=True)
class Tolerances:
    """Thresholds that turn exact-arithmetic statements into float decisions.

    ``rank_tol=None`` means ``max(shape) * eps * 64`` for whatever matrix is
    being ranked.
    """

    rank_tol: Optional[float] = None
    residual_tol: float = 1e-9
    singularity_tol: float = 1e-9

    def __post_init__(self):
        if self.rank_tol is not None and not (0.0 < self.rank_tol < 1.0):
            raise ValueError("rank_tol must lie in (0, 1)")
        if not self.residual_tol > 0.0:
            raise ValueError("residual_tol must be positive")
        if not self.singularity_tol > 0.0:
            raise ValueError("singularity_tol must be positive")

    def rank_tol_for(self, shape) -> float:
        if self.rank_tol is not None:
            return self.rank_tol
        return max(shape) * EPS * 2**6


DEFAULT_TOL = Tolerances()


def conjugate_transpose(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def singular_values(m: np.ndarray) -> np.ndarray:
    if m.size == 0:
        return np.zeros(0)
    try:
        return scipy.linalg.svdvals(m, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericBreakdownError(f"SVD failed: {exc}") from exc


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value; 0 for empty matrices."""
    s = singular_values(np.asarray(m))
    return float(s[0]) if s.size else 0.0


@dataclass(frozen=True)
class RankDecision:
    """A rank count together with how far the spectrum sits from the cutoff.

    ``margin`` is the smaller of ``sigma_r / cutoff`` and
    ``cutoff / sigma_{r+1}`` (infinite when a side is absent).  A margin below
    10 means the decision is inside the tolerance-boundary band.
    """

    rank: int
    cutoff: float
    margin: float


def rank_decision(m: np.ndarray, tol: Tolerances = DEFAULT_TOL,
                  scale: Optional[float] = None) -> RankDecision:
    """Rank of ``m`` counting singular values above ``rank_tol * scale``.

    ``scale`` defaults to the largest singular value.  Powers and products
    should pass the product of their factors' norms instead, otherwise a
    matrix that is zero up to rounding looks full rank relative to itself.
    """
    s = singular_values(m)
    if s.size == 0:
        return RankDecision(0, 0.0, np.inf)
    ref = float(s[0]) if scale is None else max(float(scale), float(s[0]))
    if ref == 0.0:
        return RankDecision(0, 0.0, np.inf)
    cutoff = tol.rank_tol_for(m.shape) * ref
    r = int(np.count_nonzero(s > cutoff))
    above = s[r - 1] / cutoff if r > 0 else np.inf
    below = cutoff / s[r] if r < s.size and s[r] > 0 else np.inf
    return RankDecision(r, cutoff, float(min(above, below)))


def numerical_rank(m: np.ndarray, tol: Tolerances = DEFAULT_TOL,
                   scale: Optional[float] = None) -> int:
    return rank_decision(m, tol, scale).rank


def singularity_margin(m: np.ndarray, tol: Tolerances = DEFAULT_TOL,
                       scale: Optional[float] = None) -> float:
    """``sigma_min / (singularity_tol * scale)``; the matrix counts as
    nonsingular iff this exceeds 1."""
    s = singular_values(m)
    ref = float(s[0]) if scale is None else float(scale)
    if ref == 0.0:
        return 0.0
    return float(s[-1] / (tol.singularity_tol * ref))


def is_nonsingular(m: np.ndarray, tol: Tolerances = DEFAULT_TOL,
                   scale: Optional[float] = None) -> bool:
    return singularity_margin(m, tol, scale) > 1.0


def eigenvalues(m: np.ndarray) -> np.ndarray:
    require_square(m)
    try:
        r = scipy.linalg.schur(m, output="complex")[0]
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericBreakdownError(f"Schur iteration failed: {exc}") from exc
    return np.diag(r)


def spectral_radius(m: np.ndarray) -> float:
    m = np.asarray(m)
    require_square(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(eigenvalues(m))))


def _schur_sorted(m: np.ndarray, keep: Callable[[complex], bool]):
    try:
        r, u, sdim = scipy.linalg.schur(m, output="complex", sort=keep)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericBreakdownError(f"Schur reordering failed: {exc}") from exc
    return u, np.triu(r), sdim


def unitary_nilpotent_split(m: np.ndarray, tol: Tolerances = DEFAULT_TOL,
                            nonzero_count: Optional[int] = None):
    """Unitary triangularization ``m = U R U*`` with the nonzero cluster first.

    Without ``nonzero_count`` an eigenvalue is zero iff
    ``|lambda| <= singularity_tol * ||m||``.  With it, the ``nonzero_count``
    eigenvalues of largest modulus lead.  The second form is what callers
    with a rank certificate should use: a nilpotent Jordan block of size k
    scatters its computed eigenvalues to radius about ``eps**(1/k)``, far
    above any fixed cutoff.

    Raises ``IllConditionedSplitError`` when the requested cluster is not
    separated by at least a factor of 10 from the rest.
    """
    m = np.asarray(m, dtype=np.complex128)
    n = require_square(m)
    norm = spectral_norm(m)
    lam = np.sort(np.abs(eigenvalues(m)))[::-1]
    if nonzero_count is None:
        cut = tol.singularity_tol * norm
        count = int(np.count_nonzero(lam > cut))
    else:
        count = int(nonzero_count)
        if not 0 <= count <= n:
            raise DimensionError(f"nonzero_count {count} out of range for n={n}")
        cut = 10.0 * tol.singularity_tol * norm
        if 0 < count and lam[count - 1] <= cut:
            raise IllConditionedSplitError(
                f"eigenvalue {lam[count - 1]:.3e} of the nonzero cluster is within "
                f"a factor 10 of the zero threshold")
    if 0 < count < n:
        hi, lo = lam[count - 1], lam[count]
        if nonzero_count is not None and hi <= 10.0 * lo:
            raise IllConditionedSplitError(
                f"nonzero cluster |lambda|={hi:.3e} not separated from zero cluster "
                f"|lambda|={lo:.3e}")
        # geometric midpoint is the safest threshold for the reordering call
        cut = float(np.sqrt(hi * lo)) if lo > 0 else hi / 2.0
    if count == 0:
        u, r, _ = _schur_sorted(m, lambda z: False)
    elif count == n:
        u, r, _ = _schur_sorted(m, lambda z: True)
    else:
        u, r, sdim = _schur_sorted(m, lambda z: abs(z) > cut)
        if sdim != count:
            raise IllConditionedSplitError(
                f"Schur reordering selected {sdim} eigenvalues, expected {count}")
    return u, r


def relative_residual(lhs: np.ndarray, rhs: np.ndarray, scale: float) -> float:
    """``||lhs - rhs|| / scale``, falling back to the absolute norm when the
    scale vanishes."""
    d = spectral_norm(lhs - rhs)
    return d / scale if scale > 0 else d


def solve_right(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``b @ inv(a)`` via a linear solve."""
    try:
        return np.linalg.solve(a.T, b.T).T
    except np.linalg.LinAlgError as exc:
        raise NumericBreakdownError(f"singular system: {exc}") from exc


def solve_left(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``inv(a) @ b`` via a linear solve."""
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise NumericBreakdownError(f"singular system: {exc}") from exc


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary (QR of a complex Gaussian with phase fix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
