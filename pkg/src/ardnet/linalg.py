r"""Dense linear-algebra primitives shared by the solver and the diagnostics.

Everything here works on 2-D float arrays and never mutates its input.
"""

from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, UndefinedRatioError

# Singular values below RANK_TOL * sigma_max count as zero.
RANK_TOL = 1e-10


class SvdFactors(NamedTuple):
    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray

    def reconstruct(self):
        return (self.u * self.singular_values) @ self.vt


def as_matrix(a, name="matrix"):
    """Return `a` as a finite 2-D float array, raising InvalidInputError otherwise."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError(f"{name} has an empty dimension: shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or infinite entries")
    return arr


def svd(a):
    """Thin SVD with singular values sorted nonincreasing."""
    arr = as_matrix(a)
    u, s, vt = np.linalg.svd(arr, full_matrices=False)
    return SvdFactors(u, s, vt)


def singular_values(a):
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def nuclear_norm(a):
    return float(np.sum(singular_values(a)))


def frobenius_norm(a):
    return float(np.linalg.norm(as_matrix(a), "fro"))


def spectral_norm(a):
    return float(singular_values(a)[0])


def numerical_rank(a):
    s = singular_values(a)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


def effective_rank(a):
    r"""Squared ratio of the nuclear norm to the Frobenius norm.

    .. math::
        ER(A) = \left(\frac{\sum_t \sigma_t}{\sqrt{\sum_t \sigma_t^2}}\right)^2

    Lies in ``[1, rank(A)]``; equals 1 exactly when `A` has rank one.

    Raises
    ------
    UndefinedRatioError
        If `a` is the zero matrix.
    """
    return nuclear_frobenius_ratio(a) ** 2


def nuclear_frobenius_ratio(a):
    """Unsquared ratio ||A||_nuc / ||A||_F, i.e. the square root of effective_rank."""
    s = singular_values(a)
    fro = float(np.sqrt(np.sum(s**2)))
    if fro == 0.0:
        raise UndefinedRatioError("norm ratio is undefined for the zero matrix")
    return float(np.sum(s)) / fro


def soft_threshold_singular_values(c, tau):
    r"""Proximal operator of ``tau * ||.||_nuc``.

    Returns ``U diag(max(sigma - tau, 0)) V'``, the unique minimiser of
    ``0.5 * ||X - C||_F^2 + tau * ||X||_nuc``.

    Parameters
    ----------
    c : array_like
        Matrix to shrink.
    tau : float
        Nonnegative shrinkage amount.
    """
    return _soft_threshold(c, tau)[0]


def _soft_threshold(c, tau):
    # Also returns the nuclear norm of the result, which the solver reuses.
    if not np.isfinite(tau) or tau < 0:
        raise InvalidInputError(f"shrinkage amount must be a finite nonnegative number, got {tau}")
    u, s, vt = svd(c)
    shrunk = np.maximum(s - tau, 0.0)
    keep = shrunk > 0
    out = (u[:, keep] * shrunk[keep]) @ vt[keep]
    return out, float(np.sum(shrunk))
