"""Seedable network simulators, trait matrices and ARD synthesis.

All randomness comes from numpy's PCG64 generator.  A seed is either a
64-bit unsigned integer or a :class:`numpy.random.SeedSequence`;
:func:`replication_seed` derives independent per-replication streams from a
master seed, so replications can run in any order or process.
"""

import enum
import math
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


class Model(str, enum.Enum):
    LSM = "LSM"
    RDP = "RDP"
    SBM = "SBM"


@dataclass(frozen=True)
class NetworkModelSpec:
    """Which formation model to draw from and its size.

    `n_types`, `theta_within` and `theta_between` only apply to the SBM.
    """

    variant: Model
    n: int
    n_types: int = 5
    theta_within: float = 0.7
    theta_between: float = 0.3

    def __post_init__(self):
        try:
            raw = self.variant.value if isinstance(self.variant, Model) else str(self.variant)
            object.__setattr__(self, "variant", Model(raw.upper()))
        except ValueError:
            raise InvalidInputError(f"unknown model {self.variant!r}; expected one of LSM, RDP, SBM") from None
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInputError(f"n must be a positive integer, got {self.n}")
        if int(self.n_types) != self.n_types or self.n_types < 1:
            raise InvalidInputError(f"n_types must be a positive integer, got {self.n_types}")
        for name in ("theta_within", "theta_between"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidInputError(f"{name} must lie in [0, 1], got {v}")


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    if int(seed) != seed or not 0 <= seed < 2**64:
        raise InvalidInputError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def _key(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def replication_seed(master_seed, *keys):
    """SeedSequence for one replication, keyed by e.g. (experiment, model, n, rep).

    String keys are mapped through CRC-32 so the derivation does not depend on
    Python's per-process hash randomisation.
    """
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(_key(k) for k in keys))


def logistic(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def lsm_matrix(nu, z):
    """Latent space model: F(nu_i + nu_j - ||z_i - z_j||) with logistic F, zero diagonal."""
    nu = np.asarray(nu, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    diff = z[:, None, :] - z[None, :, :]
    dist = np.sqrt(np.sum(diff**2, axis=-1))
    M = logistic(nu[:, None] + nu[None, :] - dist)
    np.fill_diagonal(M, 0.0)
    return M


def rdp_matrix(u):
    """Random dot product graph: sqrt(U_i) sqrt(U_j), zero diagonal."""
    root = np.sqrt(np.asarray(u, dtype=float))
    M = np.outer(root, root)
    np.fill_diagonal(M, 0.0)
    return M


def block_assignment(n, n_types):
    """Type of each agent (0-based): agent i gets floor(i * L / n)."""
    return (np.arange(n) * n_types) // n


def sbm_matrix(types, theta):
    types = np.asarray(types)
    theta = np.asarray(theta, dtype=float)
    M = theta[types[:, None], types[None, :]]
    np.fill_diagonal(M, 0.0)
    return M


def probability_matrix(spec, seed):
    """Draw a symmetric n x n link-probability matrix with zero diagonal."""
    rng = make_rng(seed)
    n = spec.n
    if spec.variant is Model.LSM:
        nu = rng.standard_normal(n)
        z = rng.uniform(size=(n, 2))
        return lsm_matrix(nu, z)
    if spec.variant is Model.RDP:
        return rdp_matrix(rng.uniform(size=n))
    L = spec.n_types
    theta = np.full((L, L), spec.theta_between)
    np.fill_diagonal(theta, spec.theta_within)
    return sbm_matrix(block_assignment(n, L), theta)


def sample_adjacency(M, seed):
    """Undirected graph with independent Bernoulli(m_ij) links on the upper triangle."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"probability matrix must be square, got shape {M.shape}")
    if not np.all((M >= 0.0) & (M <= 1.0)):
        raise InvalidInputError("probability matrix entries must lie in [0, 1]; clamp first")
    rng = make_rng(seed)
    n = M.shape[0]
    iu = np.triu_indices(n, k=1)
    links = (rng.uniform(size=iu[0].size) < M[iu]).astype(float)
    G = np.zeros((n, n))
    G[iu] = links
    return G + G.T


def generate_traits(K, N2, seed):
    """K x N2 matrix of independent Bernoulli(0.5) trait indicators."""
    if int(K) != K or int(N2) != N2 or K < 1 or N2 < 1:
        raise InvalidInputError(f"K and N2 must be positive integers, got K={K}, N2={N2}")
    rng = make_rng(seed)
    return rng.integers(0, 2, size=(int(K), int(N2))).astype(float)


def generate_ard(G, W, n_surveyed=None):
    """ARD counts Y = W G[:, :N1]; row k, column i counts agent i's links holding trait k."""
    G = np.asarray(G, dtype=float)
    W = np.asarray(W, dtype=float)
    if G.ndim != 2 or W.ndim != 2 or W.shape[1] != G.shape[0]:
        raise InvalidInputError(
            f"W has shape {W.shape} and G has shape {G.shape}; W needs one column per row of G"
        )
    if n_surveyed is not None:
        G = G[:, :n_surveyed]
    return W @ G


def default_trait_count(n):
    """round(sqrt(n)) with halves rounded up."""
    if n < 1:
        raise InvalidInputError(f"n must be at least 1, got {n}")
    return int(math.floor(math.sqrt(n) + 0.5))


def simulate_ard(spec, K, seed):
    """Full pipeline for one replication: M*, G*, W and Y from independent substreams."""
    if not isinstance(seed, np.random.SeedSequence):
        make_rng(seed)  # validates the integer range
        seed = np.random.SeedSequence(int(seed))
    ss = seed
    # Built by hand rather than ss.spawn() so that reusing `ss` gives the same streams.
    s_m, s_g, s_w = (
        np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + (i,)) for i in range(3)
    )
    M = probability_matrix(spec, s_m)
    G = sample_adjacency(M, s_g)
    W = generate_traits(K, spec.n, s_w)
    return M, G, W, generate_ard(G, W)
