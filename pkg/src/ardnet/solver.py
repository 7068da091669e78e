"""Nuclear-norm penalised least squares for ARD, solved by accelerated proximal gradient.

The estimator is

    M_hat = argmin_M  0.5 * ||Y - W M||_F^2 + lam * ||M||_nuc

with Y the K x N1 ARD counts and W the K x N2 trait indicators.  Surveyed
agents must occupy population indices 0..N1-1, so the top N1 x N1 block of
M is the surveyed-surveyed subnetwork.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import InvalidInputError, SingularSystemError


class ConstraintMode(str, enum.Enum):
    UNCONSTRAINED = "unconstrained"
    UNDIRECTED = "undirected-no-self-links"


class Shrinkage(str, enum.Enum):
    # lam / L: the proximal step for the penalised objective (default).
    SCALED = "scaled"
    # lam: the unscaled threshold, kept for comparison.
    LITERAL = "literal"


@dataclass(frozen=True)
class Problem:
    """ARD matrix `Y` (K x N1) and trait matrix `W` (K x N2)."""

    Y: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        Y = linalg.as_matrix(self.Y, "ARD matrix Y")
        W = linalg.as_matrix(self.W, "trait matrix W")
        if Y.shape[0] != W.shape[0]:
            raise InvalidInputError(
                f"Y is {Y.shape[0]}x{Y.shape[1]} and W is {W.shape[0]}x{W.shape[1]}; "
                "they must have the same number of rows (traits)"
            )
        if Y.shape[1] > W.shape[1]:
            raise InvalidInputError(
                f"Y is {Y.shape[0]}x{Y.shape[1]} and W is {W.shape[0]}x{W.shape[1]}; "
                "surveyed agents N1 cannot exceed population N2"
            )
        if not np.all((W == 0) | (W == 1)):
            raise InvalidInputError("trait matrix W must contain only 0/1 entries")
        if np.any(Y < 0):
            raise InvalidInputError("ARD matrix Y must be nonnegative")
        Y.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "W", W)

    @property
    def K(self):
        return self.W.shape[0]

    @property
    def N1(self):
        return self.Y.shape[1]

    @property
    def N2(self):
        return self.W.shape[1]


@dataclass(frozen=True)
class SolverConfig:
    lam: Optional[float] = None  # None selects default_penalty
    epsilon: float = 1e-4
    max_iterations: int = 5000
    initial_guess: Optional[np.ndarray] = None
    constraint_mode: ConstraintMode = ConstraintMode.UNDIRECTED
    per_iteration_projection: bool = False
    clamp_upper_at_one: bool = False
    shrinkage: Shrinkage = Shrinkage.SCALED

    def __post_init__(self):
        if self.lam is not None and (not math.isfinite(self.lam) or self.lam < 0):
            raise InvalidInputError(f"lam must be finite and nonnegative, got {self.lam}")
        if not (self.epsilon > 0):
            raise InvalidInputError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise InvalidInputError(f"max_iterations must be a positive integer, got {self.max_iterations}")
        object.__setattr__(self, "constraint_mode", ConstraintMode(self.constraint_mode))
        object.__setattr__(self, "shrinkage", Shrinkage(self.shrinkage))


@dataclass
class SolverResult:
    estimate: np.ndarray
    iterations_used: int
    final_change: float
    objective_trace: list = field(repr=False)
    converged: bool
    lam: float
    step_constant: float

    @property
    def final_objective(self):
        return self.objective_trace[-1]


def objective(M, problem, lam):
    """0.5 * ||Y - W M||_F^2 + lam * ||M||_nuc."""
    M = linalg.as_matrix(M, "M")
    _check_shape(M, problem)
    resid = problem.Y - problem.W @ M
    return 0.5 * float(np.sum(resid**2)) + lam * linalg.nuclear_norm(M)


def default_penalty(N1, N2, K):
    """Recommended penalty 2 (sqrt(N1) + sqrt(N2) + 1)(sqrt(N2) + sqrt(K))."""
    for name, v in (("N1", N1), ("N2", N2), ("K", K)):
        if v <= 0:
            raise InvalidInputError(f"{name} must be positive, got {v}")
    return 2.0 * (math.sqrt(N1) + math.sqrt(N2) + 1.0) * (math.sqrt(N2) + math.sqrt(K))


def symmetrize(M, N1, clamp_upper_at_one=False):
    """Project onto nonnegative matrices whose top N1 x N1 block is symmetric with zero diagonal.

    Negative entries are zeroed first; the off-diagonal block entries are then
    replaced by the average of the (i, j) and (j, i) entries, and the block
    diagonal is set to zero.  Rows past N1 are only clamped.
    """
    M = linalg.as_matrix(M, "M")
    if N1 < 1 or N1 > M.shape[0] or N1 > M.shape[1]:
        raise InvalidInputError(f"N1={N1} does not fit inside a {M.shape[0]}x{M.shape[1]} matrix")
    out = np.maximum(M, 0.0)
    if clamp_upper_at_one:
        np.minimum(out, 1.0, out=out)
    block = out[:N1, :N1]
    block = 0.5 * (block + block.T)
    # (a + b)/2 and (b + a)/2 round identically, so the block is exactly symmetric.
    np.fill_diagonal(block, 0.0)
    out[:N1, :N1] = block
    return out


def gradient_step(Z, problem, lam, L, shrinkage=Shrinkage.SCALED):
    """One proximal gradient step from `Z` with step size 1/L."""
    if not (L > 0):
        raise InvalidInputError(f"step constant L must be positive, got {L}")
    Z = linalg.as_matrix(Z, "Z")
    _check_shape(Z, problem)
    W = problem.W
    grad = W.T @ (W @ Z - problem.Y)
    tau = lam / L if Shrinkage(shrinkage) is Shrinkage.SCALED else lam
    return linalg.soft_threshold_singular_values(Z - grad / L, tau)


def step_constant(problem):
    """Lipschitz constant of the loss gradient: the largest singular value of W'W."""
    return linalg.spectral_norm(problem.W) ** 2


def fit(problem, config=None):
    """Minimise the penalised objective by accelerated proximal gradient descent.

    Iterates ``M_t = prox(Z_t)``, ``a_{t+1} = (1 + sqrt(1 + 4 a_t^2)) / 2`` and
    ``Z_{t+1} = M_t + (a_t - 1)/a_{t+1} (M_t - M_{t-1})`` until the Frobenius
    change between consecutive iterates is at most ``config.epsilon``.  Under
    the undirected constraint mode the start point and the output are passed
    through :func:`symmetrize`; with ``per_iteration_projection`` so is every
    iterate.

    Running out of iterations is not an error: the result has
    ``converged=False``.
    """
    config = config or SolverConfig()
    W, Y = problem.W, problem.Y
    N1, N2, K = problem.N1, problem.N2, problem.K
    lam = default_penalty(N1, N2, K) if config.lam is None else float(config.lam)
    constrained = config.constraint_mode is ConstraintMode.UNDIRECTED

    L = step_constant(problem)
    if L == 0.0:
        raise InvalidInputError("trait matrix W is all zeros; the loss carries no information")
    tau = lam / L if config.shrinkage is Shrinkage.SCALED else lam

    if config.initial_guess is None:
        M_prev = np.zeros((N2, N1))
    else:
        M_prev = linalg.as_matrix(config.initial_guess, "initial_guess").copy()
        _check_shape(M_prev, problem)
    if constrained:
        M_prev = symmetrize(M_prev, N1, config.clamp_upper_at_one)

    WtY = W.T @ Y
    Z = M_prev
    alpha = 1.0
    trace = [objective(M_prev, problem, lam)]
    change = math.inf
    it = 0
    M = M_prev
    while it < config.max_iterations:
        it += 1
        C = Z - (W.T @ (W @ Z) - WtY) / L
        M, nuc = linalg._soft_threshold(C, tau)
        if constrained and config.per_iteration_projection:
            M = symmetrize(M, N1, config.clamp_upper_at_one)
            nuc = linalg.nuclear_norm(M)
        alpha_prev = alpha
        alpha = (1.0 + math.sqrt(1.0 + 4.0 * alpha_prev**2)) / 2.0
        Z = M + ((alpha_prev - 1.0) / alpha) * (M - M_prev)
        change = float(np.linalg.norm(M_prev - M))
        resid = Y - W @ M
        trace.append(0.5 * float(np.sum(resid**2)) + lam * nuc)
        M_prev = M
        if change <= config.epsilon:
            break

    if constrained:
        M = symmetrize(M, N1, config.clamp_upper_at_one)
        trace[-1] = objective(M, problem, lam)
    elif config.clamp_upper_at_one:
        M = np.minimum(M, 1.0)
        trace[-1] = objective(M, problem, lam)

    return SolverResult(
        estimate=M,
        iterations_used=it,
        final_change=change,
        objective_trace=trace,
        converged=change <= config.epsilon,
        lam=lam,
        step_constant=L,
    )


def exact_least_squares(problem, cond_limit=1e12):
    """Unpenalised minimiser (W'W)^{-1} W'Y; requires W'W to be invertible."""
    W = problem.W
    if problem.K < problem.N2:
        raise SingularSystemError(
            f"W'W is {problem.N2}x{problem.N2} but W has only {problem.K} rows; it cannot be invertible"
        )
    gram = W.T @ W
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularSystemError(f"W'W is numerically singular (condition number {cond:.3g})")
    return np.linalg.solve(gram, W.T @ problem.Y)


def _check_shape(M, problem):
    want = (problem.N2, problem.N1)
    if M.shape != want:
        raise InvalidInputError(f"expected an {want[0]}x{want[1]} matrix, got {M.shape[0]}x{M.shape[1]}")
