"""Seeded generators for the matrix classes the inequalities quantify over.

Every generator is a pure function of its :class:`GenSpec`; randomness comes
from a fresh ``numpy.random.Generator`` built from ``spec.seed``.  Audits derive
per-trial seeds with :func:`trial_seed` so trials can run in any order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .linalg_core import (
    LinalgError,
    Matrix,
    adjoint,
    as_matrix,
    hs_norm,
    identity,
    multiply,
)

KINDS = (
    "orthogonal",
    "symmetric",
    "positive_definite",
    "pd_hs_contraction",
    "doubly_stochastic",
    "pd_doubly_stochastic",
)
MAX_DIM = 64
GS_ATTEMPTS = 8
GS_BREAKDOWN = 1e-8
SINKHORN_TOL = 1e-12
SINKHORN_MAX_SWEEPS = 10_000


class GeneratorError(LinalgError):
    pass


@dataclass(frozen=True)
class GenSpec:
    dim: int
    kind: str
    seed: int
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 2 <= self.dim <= MAX_DIM:
            raise GeneratorError(f"dim must lie in [2, {MAX_DIM}], got {self.dim}")
        if self.kind not in KINDS:
            raise GeneratorError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if not 0 <= self.seed < 2**64:
            raise GeneratorError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def trial_seed(master_seed: int, *counters: int) -> int:
    """64-bit seed for the stream identified by ``(master_seed, *counters)``."""
    ss = np.random.SeedSequence([int(master_seed), *(int(c) for c in counters)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _check_kind(spec: GenSpec, *kinds: str) -> None:
    if spec.kind not in kinds:
        raise GeneratorError(f"generator expects kind in {kinds}, got {spec.kind!r}")


def _gram_schmidt(z: np.ndarray) -> np.ndarray | None:
    # Modified Gram-Schmidt with one reorthogonalisation pass; None on breakdown.
    n = z.shape[1]
    q = z.copy()
    for j in range(n):
        norm0 = np.linalg.norm(z[:, j])
        for _ in range(2):
            for i in range(j):
                q[:, j] -= (q[:, i] @ q[:, j]) * q[:, i]
        nrm = np.linalg.norm(q[:, j])
        if nrm < GS_BREAKDOWN * max(norm0, 1.0):
            return None
        q[:, j] /= nrm
    return q


def _orthogonal(dim: int, rng: np.random.Generator) -> Matrix:
    for _ in range(GS_ATTEMPTS):
        q = _gram_schmidt(rng.standard_normal((dim, dim)))
        if q is not None:
            return q
    raise GeneratorError(f"Gram-Schmidt broke down {GS_ATTEMPTS} times in a row")


def _spectral(q: Matrix, lam: np.ndarray) -> Matrix:
    out = multiply(q * lam, adjoint(q))
    return 0.5 * (out + out.T)


def gen_orthogonal(spec: GenSpec) -> Matrix:
    _check_kind(spec, "orthogonal")
    return _orthogonal(spec.dim, spec.rng())


def gen_symmetric(spec: GenSpec) -> Matrix:
    """Symmetric matrix ``(G + Gᵀ)/2`` with standard normal ``G``, scaled by ``params['scale']``."""
    _check_kind(spec, "symmetric")
    g = spec.rng().standard_normal((spec.dim, spec.dim)) * spec.params.get("scale", 1.0)
    return 0.5 * (g + g.T)


def gen_positive_definite(spec: GenSpec) -> Matrix:
    """``Q diag(lam) Qᵀ`` with eigenvalues uniform on ``[lam_min, lam_max]``.

    The range defaults to ``[0.1, 10]`` and can be narrowed through
    ``params``.
    """
    _check_kind(spec, "positive_definite", "pd_hs_contraction")
    lo = spec.params.get("lam_min", 0.1)
    hi = spec.params.get("lam_max", 10.0)
    if not 0 < lo <= hi:
        raise GeneratorError(f"need 0 < lam_min <= lam_max, got {lo}, {hi}")
    rng = spec.rng()
    q = _orthogonal(spec.dim, rng)
    lam = rng.uniform(lo, hi, spec.dim)
    return _spectral(q, lam)


def gen_pd_hs_contraction(spec: GenSpec) -> Matrix:
    _check_kind(spec, "pd_hs_contraction")
    a = gen_positive_definite(spec)
    # independent stream for the target norm so the PD draw is unchanged
    u = np.random.default_rng([spec.seed, 1]).uniform(0.05, 0.95)
    return a * (u / hs_norm(a))


def sinkhorn(a: Matrix, tol: float = SINKHORN_TOL, max_sweeps: int = SINKHORN_MAX_SWEEPS) -> Matrix:
    """Alternate row and column normalisation of a strictly positive matrix."""
    d = as_matrix(a).copy()
    if np.any(d <= 0):
        raise GeneratorError("Sinkhorn-Knopp needs strictly positive entries")
    resid = np.inf
    for _ in range(max_sweeps):
        d /= d.sum(axis=1, keepdims=True)
        d /= d.sum(axis=0, keepdims=True)
        resid = max(np.max(np.abs(d.sum(axis=1) - 1)), np.max(np.abs(d.sum(axis=0) - 1)))
        if resid <= tol:
            return d
    raise GeneratorError(f"Sinkhorn-Knopp did not converge (residual {resid:.3e})")


def gen_doubly_stochastic(spec: GenSpec) -> Matrix:
    _check_kind(spec, "doubly_stochastic", "pd_doubly_stochastic")
    return sinkhorn(spec.rng().uniform(0.1, 1.0, (spec.dim, spec.dim)))


def pd_doubly_stochastic_from(s: Matrix, alpha: float) -> Matrix:
    """``(1 - alpha) I + alpha S`` for a symmetric doubly stochastic ``S``."""
    if not 0 < alpha < 0.5:
        raise GeneratorError(f"alpha must lie in (0, 0.5), got {alpha}")
    s = as_matrix(s)
    return (1.0 - alpha) * identity(s.shape[0]) + alpha * s


def gen_pd_doubly_stochastic(spec: GenSpec) -> Matrix:
    _check_kind(spec, "pd_doubly_stochastic")
    alpha = spec.params.get("alpha", 0.25)
    if not 0 < alpha < 0.5:
        raise GeneratorError(f"alpha must lie in (0, 0.5), got {alpha}")
    d = gen_doubly_stochastic(replace(spec, kind="doubly_stochastic"))
    return pd_doubly_stochastic_from(0.5 * (d + d.T), alpha)


GENERATORS = {
    "orthogonal": gen_orthogonal,
    "symmetric": gen_symmetric,
    "positive_definite": gen_positive_definite,
    "pd_hs_contraction": gen_pd_hs_contraction,
    "doubly_stochastic": gen_doubly_stochastic,
    "pd_doubly_stochastic": gen_pd_doubly_stochastic,
}


def generate(spec: GenSpec) -> Matrix:
    return GENERATORS[spec.kind](spec)
