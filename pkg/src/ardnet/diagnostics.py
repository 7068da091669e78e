"""Error metrics, the finite-sample error bound, and network statistics."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .errors import InvalidInputError


@dataclass(frozen=True)
class ErrorReport:
    mse: float
    relative_frobenius_error: float
    theoretical_bound: Optional[float] = None
    bound_satisfied: Optional[bool] = None
    bound_probability: Optional[float] = None


def _pair(estimate, truth):
    a = linalg.as_matrix(estimate, "estimate")
    b = linalg.as_matrix(truth, "truth")
    if a.shape != b.shape:
        raise InvalidInputError(f"estimate has shape {a.shape} but truth has shape {b.shape}")
    return a, b


def mse(estimate, truth):
    """Mean squared entrywise difference, diagonal included."""
    a, b = _pair(estimate, truth)
    return float(np.mean((a - b) ** 2))


def relative_frobenius_error(estimate, truth):
    a, b = _pair(estimate, truth)
    denom = np.linalg.norm(b)
    if denom == 0.0:
        raise InvalidInputError("relative error is undefined for a zero truth matrix")
    return float(np.linalg.norm(a - b) / denom)


def nu_constant(trait_probabilities):
    """Smallest (over agents) average Bernoulli variance of the trait indicators.

    `trait_probabilities` is K x N2 with entry (k, j) = P(agent j has trait k).
    """
    p = np.asarray(trait_probabilities, dtype=float)
    if p.ndim != 2 or p.size == 0:
        raise InvalidInputError(f"trait probabilities must be a nonempty 2-D array, got shape {p.shape}")
    if not np.all((p >= 0.0) & (p <= 1.0)):
        raise InvalidInputError("trait probabilities must lie in [0, 1]")
    return float(np.min(np.mean(p * (1.0 - p), axis=0)))


def theoretical_bound(truth, lam, nu, K):
    """Upper bound on ||M_hat - M*||_F / ||M*||_F.

    sqrt(2048 * lam * ER(M*) / (nu * ||M*||_nuc * K)); it holds with
    probability at least :func:`bound_probability` when `lam` is at least the
    recommended penalty.
    """
    if not nu > 0:
        raise InvalidInputError(f"nu must be positive, got {nu}")
    if K < 1:
        raise InvalidInputError(f"K must be at least 1, got {K}")
    if lam < 0:
        raise InvalidInputError(f"lam must be nonnegative, got {lam}")
    s = linalg.singular_values(truth)
    nuc = float(np.sum(s))
    if nuc == 0.0:
        raise InvalidInputError("bound is undefined for a zero truth matrix")
    er = nuc**2 / float(np.sum(s**2))
    return math.sqrt(2048.0 * lam * er / (nu * nuc * K))


def bound_probability(N2, K, nu):
    """Lower bound on the probability that the error bound holds; may be negative (vacuous)."""
    return 1.0 - N2**2 * math.exp(-K * nu**2 / 8.0) - math.exp(-(math.sqrt(N2) + math.sqrt(K)) / 2.0)


def error_report(estimate, truth, lam=None, nu=None, K=None):
    """Both error metrics, plus the bound when `lam`, `nu` and `K` are all given.

    `bound_satisfied` is informational; the bound holds only with high probability.
    """
    report = dict(
        mse=mse(estimate, truth),
        relative_frobenius_error=relative_frobenius_error(estimate, truth),
    )
    if lam is not None and nu is not None and K is not None:
        bound = theoretical_bound(truth, lam, nu, K)
        report.update(
            theoretical_bound=bound,
            bound_satisfied=report["relative_frobenius_error"] <= bound,
            bound_probability=bound_probability(np.shape(truth)[0], K, nu),
        )
    return ErrorReport(**report)


def expected_degrees(M, n_surveyed=None):
    """Expected degree of each surveyed agent: row sums of the N1 x N1 block, diagonal excluded."""
    M = linalg.as_matrix(M, "M")
    n1 = M.shape[1] if n_surveyed is None else n_surveyed
    if n1 > min(M.shape):
        raise InvalidInputError(f"cannot take a {n1}x{n1} block from shape {M.shape}")
    block = M[:n1, :n1]
    return block.sum(axis=1) - np.diag(block)


def global_clustering(G):
    """Transitivity: 3 x triangles / connected triples, 0 when there are no triples."""
    A = np.asarray(G, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"adjacency matrix must be square, got shape {A.shape}")
    if not np.array_equal(A, A.T):
        raise InvalidInputError("adjacency matrix must be symmetric")
    if not np.all((A == 0) | (A == 1)) or np.any(np.diag(A) != 0):
        raise InvalidInputError("adjacency matrix must be binary with a zero diagonal")
    deg = A.sum(axis=1)
    triples = float(np.sum(deg * (deg - 1)) / 2.0)
    if triples == 0.0:
        return 0.0
    # trace(A^3) counts each triangle six times.
    closed = float(np.trace(A @ A @ A)) / 2.0
    return closed / triples
