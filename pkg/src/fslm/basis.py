"""B-spline bases, curve smoothing and orthonormal score coordinates.

A functional covariate enters the model only through integrals
``int X_i(t) g(t) dt``.  Curves are held as B-spline coefficient rows C,
and with the basis Gram matrix factored as G = L L^T the matrix
Z = C L gives coordinates in which those integrals become plain dot
products: Z (L^T b) = C G b.  Everything downstream (the regression
design matrix) works with Z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BSpline

__all__ = [
    "BasisSpec",
    "FunctionalSample",
    "build_bspline_basis",
    "smooth_curves",
    "functional_scores",
    "reconstruct_gamma",
]


@dataclass(frozen=True)
class BasisSpec:
    """A B-spline basis on [domain_start, domain_end] with its Gram matrix."""

    domain_start: float
    domain_end: float
    order: int
    n_basis: int
    knots: np.ndarray       # full knot vector, length n_basis + order
    gram: np.ndarray        # K x K, entries int phi_k phi_j dt
    gram_chol: np.ndarray   # lower triangular L with gram = L L^T

    def design_matrix(self, t: np.ndarray) -> np.ndarray:
        """Evaluate all basis functions at t; returns len(t) x n_basis."""
        t = np.asarray(t, dtype=float)
        if np.any(t < self.domain_start - 1e-12) or np.any(t > self.domain_end + 1e-12):
            raise ValueError("evaluation points outside the basis domain")
        t = np.clip(t, self.domain_start, self.domain_end)
        degree = self.order - 1
        phi = np.empty((t.size, self.n_basis))
        for k in range(self.n_basis):
            coef = np.zeros(self.n_basis)
            coef[k] = 1.0
            spl = BSpline(self.knots, coef, degree, extrapolate=False)
            phi[:, k] = np.nan_to_num(spl(t))
        # right endpoint support convention: the last basis function is 1 there
        at_end = t == self.domain_end
        if np.any(at_end):
            phi[at_end, :] = 0.0
            phi[at_end, -1] = 1.0
        return phi

    def to_json_dict(self) -> dict:
        return {
            "domain": [self.domain_start, self.domain_end],
            "order": self.order,
            "n_basis": self.n_basis,
        }


@dataclass(frozen=True)
class FunctionalSample:
    """n curves as B-spline coefficient rows plus their score coordinates."""

    basis: BasisSpec
    coef: np.ndarray    # n x K
    scores: np.ndarray  # n x K, scores = coef @ gram_chol

    @property
    def n(self) -> int:
        return self.coef.shape[0]


def build_bspline_basis(
    domain_start: float, domain_end: float, n_basis: int, order: int
) -> BasisSpec:
    """Construct a B-spline basis with uniform interior knots.

    The Gram matrix is integrated exactly by per-span Gauss-Legendre
    quadrature (basis products are piecewise polynomials of degree
    2*(order-1), so order+1 nodes per span suffice).
    """
    if domain_start >= domain_end:
        raise ValueError("domain_start must be strictly less than domain_end")
    if order < 1:
        raise ValueError("order must be at least 1")
    if n_basis < order:
        raise ValueError("n_basis must be at least the order")

    n_interior = n_basis - order
    interior = np.linspace(domain_start, domain_end, n_interior + 2)[1:-1]
    knots = np.concatenate(
        [np.full(order, domain_start), interior, np.full(order, domain_end)]
    )

    spec = BasisSpec(
        domain_start=float(domain_start),
        domain_end=float(domain_end),
        order=int(order),
        n_basis=int(n_basis),
        knots=knots,
        gram=np.eye(n_basis),       # placeholder, replaced below
        gram_chol=np.eye(n_basis),
    )
    gram = _gram_matrix(spec)
    gram = 0.5 * (gram + gram.T)
    chol = np.linalg.cholesky(gram)
    return BasisSpec(
        domain_start=spec.domain_start,
        domain_end=spec.domain_end,
        order=spec.order,
        n_basis=spec.n_basis,
        knots=knots,
        gram=gram,
        gram_chol=chol,
    )


def _gram_matrix(spec: BasisSpec) -> np.ndarray:
    n_nodes = spec.order + 1
    nodes, weights = leggauss(n_nodes)
    gram = np.zeros((spec.n_basis, spec.n_basis))
    spans = np.unique(spec.knots)
    for lo, hi in zip(spans[:-1], spans[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        t = mid + half * nodes
        phi = spec.design_matrix(t)
        gram += half * (phi.T * weights) @ phi
    return gram


def smooth_curves(
    t_grid: np.ndarray, obs: np.ndarray, basis: BasisSpec
) -> FunctionalSample:
    """Least-squares fit of each observed curve onto the basis.

    Rows of ``obs`` are curves sampled at ``t_grid``.  Each row is fit
    independently, so the result does not depend on how many curves are
    smoothed together.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    obs = np.atleast_2d(np.asarray(obs, dtype=float))
    if t_grid.ndim != 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if obs.shape[1] != t_grid.size:
        raise ValueError("obs must have one column per grid point")
    if t_grid.size < basis.n_basis:
        raise ValueError("need at least n_basis observation points")

    phi = basis.design_matrix(t_grid)
    _, s, _ = np.linalg.svd(phi, compute_uv=True)
    if s[-1] < 1e-10 * s[0]:
        raise np.linalg.LinAlgError(
            "rank-deficient design matrix: too few effective observation points"
        )
    coef, *_ = np.linalg.lstsq(phi, obs.T, rcond=None)
    coef = coef.T
    return FunctionalSample(basis=basis, coef=coef, scores=coef @ basis.gram_chol)


def functional_scores(sample: FunctionalSample) -> np.ndarray:
    """Score matrix Z = C L; Z @ (L^T b) equals int X_i(t) g(t) dt."""
    return sample.scores


def reconstruct_gamma(
    beta: np.ndarray, basis: BasisSpec, t_eval: np.ndarray
) -> np.ndarray:
    """Map score-coordinate coefficients back to a function of t.

    Inverts the score transform (b = L^{-T} beta) and evaluates the
    B-spline expansion at t_eval.
    """
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (basis.n_basis,):
        raise ValueError("beta length must equal n_basis")
    from scipy.linalg import solve_triangular

    b = solve_triangular(basis.gram_chol.T, beta, lower=False)
    return basis.design_matrix(np.asarray(t_eval, dtype=float)) @ b
