"""Von Neumann and Shannon entropies in bits."""

import numpy as np

from discord_bound.errors import ValidationError
from discord_bound.linalg import hermitian_eigenvalues

ZERO_EIG = 1e-12
DIST_TOL = 1e-9


def _h(values):
    v = np.asarray(values, dtype=float)
    v = v[v >= ZERO_EIG]
    return float(-np.sum(v * np.log2(v))) + 0.0 if v.size else 0.0


def von_neumann_entropy(rho, method="lapack"):
    """``-Tr[rho log2 rho]``; eigenvalues below ``1e-12`` count as zero.

    ``rho`` may be a :class:`~discord_bound.states.DensityMatrix` or a bare
    square matrix, which is checked for unit trace and positivity.
    """
    m = getattr(rho, "matrix", rho)
    if method == "lapack":
        w = hermitian_eigenvalues(m)
    else:
        from discord_bound.linalg import hermitian_eigensystem

        w = hermitian_eigensystem(m, method=method)[0]
    if not hasattr(rho, "matrix"):
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValidationError("trace", f"operator trace {w.sum()!r} is not 1")
        if w[0] < -1e-9:
            raise ValidationError("psd", f"operator has eigenvalue {w[0]:.3e}")
    return _h(w)


def shannon_entropy(p):
    """``-sum p log2 p`` of a probability vector, with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or np.any(p < -ZERO_EIG) or abs(p.sum() - 1.0) > DIST_TOL:
        raise ValidationError("distribution", "probabilities must be >= 0 and sum to 1")
    return _h(p)
