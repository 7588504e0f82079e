"""Spatial weight matrices, the log-determinant of I - rho*W, and Moran's I."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor

__all__ = [
    "SpatialWeights",
    "MoranResult",
    "weights_from_edges",
    "grid_contiguity",
    "row_standardize",
    "log_det_A",
    "morans_i",
]


@dataclass(frozen=True)
class SpatialWeights:
    """Nonnegative n x n weight matrix with zero diagonal."""

    n: int
    entries: np.ndarray
    row_standardized: bool = False

    def __post_init__(self):
        w = self.entries
        if w.shape != (self.n, self.n):
            raise ValueError("entries must be n x n")
        if np.any(np.diag(w) != 0):
            raise ValueError("diagonal must be zero")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")


@dataclass(frozen=True)
class MoranResult:
    statistic: float
    expected: float
    p_value: float
    n_permutations: int


def weights_from_edges(n: int, edges) -> SpatialWeights:
    """Binary symmetric contiguity matrix from an undirected edge list."""
    w = np.zeros((n, n))
    for i, j in edges:
        if i == j:
            raise ValueError(f"self-loop at unit {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"edge ({i},{j}) out of range for n={n}")
        w[i, j] = 1.0
        w[j, i] = 1.0
    return SpatialWeights(n=n, entries=w, row_standardized=False)


def grid_contiguity(rows: int, cols: int, scheme: str = "rook") -> SpatialWeights:
    """Binary contiguity of a rows x cols lattice (rook: 4-neighborhood,
    queen: 8-neighborhood)."""
    if rows < 1 or cols < 1:
        raise ValueError("lattice dimensions must be positive")
    if scheme not in ("rook", "queen"):
        raise ValueError("scheme must be 'rook' or 'queen'")
    if scheme == "rook":
        offsets = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    else:
        offsets = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1)
                   if (dr, dc) != (0, 0)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            for dr, dc in offsets:
                rr, cc = r + dr, c + dc
                if 0 <= rr < rows and 0 <= cc < cols:
                    j = rr * cols + cc
                    if i < j:
                        edges.append((i, j))
    return weights_from_edges(rows * cols, edges)


def row_standardize(w: SpatialWeights) -> SpatialWeights:
    """Divide each nonzero row by its sum; zero rows pass through."""
    sums = w.entries.sum(axis=1)
    if np.any(sums == 0):
        warnings.warn("zero-neighbor rows left as all-zero under standardization")
    safe = np.where(sums > 0, sums, 1.0)
    return SpatialWeights(
        n=w.n, entries=w.entries / safe[:, None], row_standardized=True
    )


def log_det_A(w: SpatialWeights, rho: float) -> float:
    """ln|det(I - rho*W)| via LU with partial pivoting; errors if det <= 0."""
    a = np.eye(w.n) - rho * w.entries
    lu, piv = lu_factor(a)
    diag = np.diag(lu)
    if np.any(diag == 0) or np.any(np.abs(diag) < 1e-300):
        raise np.linalg.LinAlgError(f"I - rho*W singular at rho={rho}")
    # sign of det: permutation parity times signs of U's diagonal
    n_swaps = np.sum(piv != np.arange(w.n))
    sign = (-1.0) ** n_swaps * np.prod(np.sign(diag))
    if sign <= 0:
        raise np.linalg.LinAlgError(f"det(I - rho*W) not positive at rho={rho}")
    return float(np.sum(np.log(np.abs(diag))))


def morans_i(
    values: np.ndarray,
    w: SpatialWeights,
    n_permutations: int = 999,
    seed: int = 0,
) -> MoranResult:
    """Global Moran's I with a two-sided permutation p-value.

    I = (n/S0) * (z' W z)/(z' z) with z the centered values and
    S0 the total weight.  The p-value counts permutations whose
    deviation from the null expectation -1/(n-1) is at least as
    large as the observed one.
    """
    values = np.asarray(values, dtype=float)
    n = w.n
    if values.shape != (n,):
        raise ValueError("values length must match the number of units")
    if n < 3:
        raise ValueError("need at least 3 units")
    z = values - values.mean()
    denom = z @ z
    if denom == 0:
        raise ValueError("values are constant; Moran's I undefined")
    s0 = w.entries.sum()
    if s0 == 0:
        raise ValueError("weight matrix has no links; Moran's I undefined")

    def stat(zv):
        return (n / s0) * (zv @ w.entries @ zv) / (zv @ zv)

    observed = stat(z)
    expected = -1.0 / (n - 1)
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(n_permutations):
        perm = rng.permutation(z)
        if abs(stat(perm) - expected) >= abs(observed - expected) - 1e-15:
            hits += 1
    p = (hits + 1) / (n_permutations + 1)
    return MoranResult(
        statistic=float(observed),
        expected=expected,
        p_value=float(p),
        n_permutations=n_permutations,
    )
