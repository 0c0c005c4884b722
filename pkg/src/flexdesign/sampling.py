"""Seeded Monte Carlo draws of the uncertain demand vector."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

__all__ = [
    "GENERATOR_TAG",
    "GaussianSpec",
    "SampleSet",
    "Factor",
    "cholesky_factor",
    "draw_samples",
    "empirical_moments",
    "write_samples",
    "read_samples",
    "format_samples",
    "parse_samples",
]

# numpy PCG64 bit generator with the ziggurat standard-normal transform
GENERATOR_TAG = "pcg64-ziggurat"

SYMMETRY_TOL = 1e-12
MAX_JITTER = 1e-10


class NotPSDError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.covariance, dtype=float)
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"covariance shape {cov.shape} does not match mean length {mean.size}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("mean and covariance must be finite")
        if np.max(np.abs(cov - cov.T), initial=0.0) > SYMMETRY_TOL:
            raise ValueError("covariance is not symmetric")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.mean.size

    @classmethod
    def equicorrelated(cls, mean, variance: float, covariance: float) -> "GaussianSpec":
        """Constant variance on the diagonal and constant covariance off it."""
        n = len(mean)
        cov = np.full((n, n), float(covariance))
        np.fill_diagonal(cov, float(variance))
        return cls(mean, cov)


@dataclass(frozen=True, eq=False)
class SampleSet:
    samples: np.ndarray  # K x n_theta
    seed: int
    tag: str = GENERATOR_TAG

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim == 1:
            s = s.reshape(-1, 1)
        if s.ndim != 2 or s.shape[0] < 1:
            raise ValueError("a sample set needs at least one row")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def K(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def __len__(self):
        return self.K

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.tag == other.tag
            and self.samples.shape == other.samples.shape
            and self.samples.tobytes() == other.samples.tobytes()
        )

    @classmethod
    def from_values(cls, values, seed: int = 0, tag: str = "explicit") -> "SampleSet":
        """Wrap hand-picked realizations (1-D input means one demand per row)."""
        return cls(np.asarray(values, dtype=float), seed, tag)


class Factor(NamedTuple):
    L: np.ndarray
    jitter: float


def _semidefinite_cholesky(a: np.ndarray, tol: float) -> np.ndarray:
    # Column-by-column factorization that accepts (near-)zero pivots.
    n = a.shape[0]
    L = np.zeros_like(a)
    scale = max(1.0, float(np.max(np.abs(np.diag(a)), initial=0.0)))
    for j in range(n):
        d = a[j, j] - L[j, :j] @ L[j, :j]
        if d < -tol * scale:
            raise NotPSDError(f"covariance is not positive semidefinite (pivot {j} = {d:.3g})")
        col = a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]
        if d <= tol * scale:
            if np.max(np.abs(col), initial=0.0) > np.sqrt(tol) * scale:
                raise NotPSDError(f"covariance is not positive semidefinite (zero pivot {j} with coupling)")
            continue
        L[j, j] = np.sqrt(d)
        L[j + 1 :, j] = col / L[j, j]
    return L


def cholesky_factor(cov) -> Factor:
    """Lower-triangular ``L`` with ``L @ L.T == cov``.

    Positive definite input goes straight to LAPACK.  Semidefinite input is
    then factored column by column with zero pivots allowed, so a degenerate
    covariance keeps its exact null space.  As a last resort the diagonal
    receives ``MAX_JITTER``; the jitter actually added is returned.  Raises
    :class:`NotPSDError` when nothing works.
    """
    a = np.array(cov, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("covariance must be a square matrix")
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError("covariance is not symmetric")
    try:
        return Factor(np.linalg.cholesky(a), 0.0)
    except np.linalg.LinAlgError:
        pass
    tol = 1e-9 * max(1.0, float(np.max(np.abs(a), initial=0.0)))
    try:
        L = _semidefinite_cholesky(a, MAX_JITTER)
        if np.max(np.abs(L @ L.T - a), initial=0.0) <= tol:
            return Factor(L, 0.0)
    except NotPSDError:
        pass
    try:
        return Factor(np.linalg.cholesky(a + MAX_JITTER * np.eye(a.shape[0])), MAX_JITTER)
    except np.linalg.LinAlgError:
        raise NotPSDError("covariance is not positive semidefinite") from None


def draw_samples(spec: GaussianSpec, K: int, seed: int) -> SampleSet:
    if K < 1:
        raise ValueError("K must be >= 1")
    L = cholesky_factor(spec.covariance).L
    rng = np.random.Generator(np.random.PCG64(seed))
    g = rng.standard_normal((K, spec.dim))
    return SampleSet(spec.mean + g @ L.T, int(seed), GENERATOR_TAG)


def empirical_moments(s: SampleSet) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean and unbiased covariance (needs K >= 2)."""
    if s.K < 2:
        raise ValueError("covariance estimate needs at least two samples")
    return s.samples.mean(axis=0), np.atleast_2d(np.cov(s.samples, rowvar=False, ddof=1))


def format_samples(s: SampleSet) -> str:
    lines = [f"{s.dim} {s.K} {s.seed} {s.tag}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in s.samples]
    return "\n".join(lines) + "\n"


def parse_samples(text: str) -> SampleSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty sample file")
    head = lines[0].split()
    if len(head) != 4:
        raise ValueError("line 1: header must be 'n_theta K seed tag'")
    n, K, seed, tag = int(head[0]), int(head[1]), int(head[2]), head[3]
    if len(lines) - 1 != K:
        raise ValueError(f"header declares K={K} rows, found {len(lines) - 1}")
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        vals = ln.split()
        if len(vals) != n:
            raise ValueError(f"line {i}: expected {n} values, found {len(vals)}")
        rows.append([float(v) for v in vals])
    return SampleSet(np.array(rows, dtype=float).reshape(K, n), seed, tag)


def write_samples(s: SampleSet, path) -> None:
    Path(path).write_text(format_samples(s))


def read_samples(path) -> SampleSet:
    return parse_samples(Path(path).read_text())
