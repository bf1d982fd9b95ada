"""Dense complex linear algebra used throughout the package.

Operators are plain ``numpy`` arrays.  Multipartite operators carry their
factor dimensions separately as a tuple ``dims`` with the first factor
most significant (the ``numpy.kron`` ordering).
"""

import numpy as np

from discord_bound.errors import DimensionError, ValidationError

HERMITIAN_TOL = 1e-10
ORTHONORMAL_TOL = 1e-10
FILL_SKIP_TOL = 1e-8
JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_matrix(m):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("finite", "matrix has NaN or infinite entries")
    return a


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def max_abs(m):
    """Largest entry magnitude; the package-wide matrix residual measure."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def tensor_product(a, b, *more):
    """Kronecker product of two or more operators."""
    out = np.kron(as_matrix(a), as_matrix(b))
    for m in more:
        out = np.kron(out, as_matrix(m))
    return out


def partial_trace(m, dims, keep):
    """Reduce ``m`` to the tensor factors listed in ``keep``.

    Parameters
    ----------
    m : array_like
        Square operator on ``H_0 ⊗ H_1 ⊗ ...`` with ``prod(dims)`` rows.
    dims : sequence of int
        Factor dimensions.
    keep : int or sequence of int
        Factor indices to keep; the result keeps them in ascending order.
        An empty selection returns the 1x1 full trace.

    Returns
    -------
    numpy.ndarray
        Reduced operator on the kept factors.
    """
    m = as_matrix(m)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionError(f"factor dimensions must be positive, got {dims}")
    n = int(np.prod(dims))
    if m.shape != (n, n):
        raise DimensionError(f"operator shape {m.shape} does not match dims {dims}")
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep={keep} out of range for {len(dims)} factors")

    nf = len(dims)
    t = m.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:nf])
    col = list(letters[nf:2 * nf])
    for i in range(nf):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    r = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return r.reshape(dk, dk)


def symmetrize(m, tol=HERMITIAN_TOL):
    """Return ``(m + m†)/2``; reject asymmetry larger than ``tol``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix must be square, got {m.shape}")
    asym = max_abs(m - dagger(m))
    if asym > tol:
        raise ValidationError("hermitian", f"max |M - M†| = {asym:.3e} exceeds {tol:.0e}")
    return 0.5 * (m + dagger(m))


def jacobi_eigh(m, tol=JACOBI_OFF_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies a real plane rotation that annihilates it.  Sweeps stop once the
    off-diagonal Frobenius norm falls below ``tol * max(1, ||A||_F)``.

    Returns
    -------
    w : numpy.ndarray
        Eigenvalues in ascending order.
    v : numpy.ndarray
        Unitary whose columns are the matching eigenvectors.
    sweeps : int
        Number of sweeps performed.
    """
    a = symmetrize(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            sweeps -= 1
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dagger(g) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps


def hermitian_eigensystem(m, method="lapack"):
    """Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian matrix.

    The input is symmetrized first; asymmetry above ``1e-10`` is rejected.
    ``method="jacobi"`` uses :func:`jacobi_eigh`; the default delegates to
    LAPACK through ``numpy.linalg.eigh``.
    """
    h = symmetrize(m)
    if method == "jacobi":
        w, v, _ = jacobi_eigh(h)
        return w, v
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    return np.linalg.eigh(h)


def hermitian_eigenvalues(m):
    return np.linalg.eigvalsh(symmetrize(m))


def psd_sqrt(m):
    """Principal square root of a PSD matrix (tiny negative eigenvalues clipped)."""
    w, v = hermitian_eigensystem(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)


def is_unitary(u, tol=ORTHONORMAL_TOL):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    eye = np.eye(u.shape[0])
    return max_abs(dagger(u) @ u - eye) <= tol and max_abs(u @ dagger(u) - eye) <= tol


def complete_to_unitary(iso, orientation="columns"):
    """Extend an isometry to a unitary, keeping the given block exactly.

    Parameters
    ----------
    iso : array_like
        ``n x k`` matrix with orthonormal columns (``orientation="columns"``)
        or ``k x n`` matrix with orthonormal rows (``orientation="rows"``).
    orientation : {"columns", "rows"}

    Returns
    -------
    numpy.ndarray
        ``n x n`` unitary whose first ``k`` columns (rows) are ``iso``.  The
        remaining ones come from Gram-Schmidt on the standard basis vectors
        in index order; candidates whose residual norm is below ``1e-8`` are
        skipped.
    """
    a = as_matrix(iso)
    if orientation == "rows":
        return dagger(complete_to_unitary(dagger(a), "columns"))
    if orientation != "columns":
        raise ValueError(f"orientation must be 'columns' or 'rows', got {orientation!r}")
    n, k = a.shape
    if k > n:
        raise DimensionError(f"isometry has more columns ({k}) than rows ({n})")
    gram_err = max_abs(dagger(a) @ a - np.eye(k)) if k else 0.0
    if gram_err > ORTHONORMAL_TOL:
        raise ValidationError("orthonormal", f"columns deviate from orthonormal by {gram_err:.3e}")

    basis = [a[:, j] for j in range(k)]
    extra = []
    for j in range(n):
        if len(basis) == n:
            break
        vec = np.zeros(n, dtype=complex)
        vec[j] = 1.0
        # two Gram-Schmidt passes keep orthogonality at machine precision
        for _ in range(2):
            for b in basis:
                vec = vec - b * np.vdot(b, vec)
        norm = np.linalg.norm(vec)
        if norm < FILL_SKIP_TOL:
            continue
        vec = vec / norm
        basis.append(vec)
        extra.append(vec)
    if len(basis) != n:
        raise ValidationError("completion", "fill basis failed to span the complement")
    if not extra:
        return a.copy()
    return np.column_stack([a] + extra)
