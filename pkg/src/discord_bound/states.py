"""Bipartite density matrices: validation, named families, random ensembles
and the on-disk state format."""

from dataclasses import dataclass
import json

import numpy as np

from discord_bound import fileio
from discord_bound.errors import DimensionError, ValidationError
from discord_bound.linalg import (
    as_matrix,
    dagger,
    hermitian_eigensystem,
    max_abs,
    partial_trace,
    symmetrize,
    tensor_product,
)
from discord_bound.rng import complex_gaussian, stream

TRACE_TOL = 1e-10
PSD_TOL = 1e-10
ROUNDOFF_EIG = 1e-14


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density operator with its tensor-factor dimensions.

    Build instances with :func:`from_matrix` (or the other constructors in
    this module); the constructor itself does not validate.
    """

    matrix: np.ndarray
    dims: tuple

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def dim_a(self):
        return self.dims[0]

    @property
    def dim_b(self):
        return self.dims[1]

    def marginal(self, keep):
        """Reduced state on the factors in ``keep`` (``"A"``, ``"B"`` or indices)."""
        if isinstance(keep, str):
            keep = {"A": (0,), "B": (1,)}[keep.upper()]
        elif isinstance(keep, (int, np.integer)):
            keep = (int(keep),)
        keep = tuple(sorted(keep))
        red = partial_trace(self.matrix, self.dims, keep)
        return _wrap(0.5 * (red + dagger(red)), tuple(self.dims[i] for i in keep))

    @property
    def rho_a(self):
        return self.marginal("A")

    @property
    def rho_b(self):
        return self.marginal("B")

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def purity(self):
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def swapped(self):
        """Same state with the two subsystems exchanged (A <-> B)."""
        if len(self.dims) != 2:
            raise DimensionError("swap needs a bipartite state")
        da, db = self.dims
        t = self.matrix.reshape(da, db, da, db).transpose(1, 0, 3, 2)
        return _wrap(t.reshape(da * db, da * db), (db, da))

    def __eq__(self, other):
        return (
            isinstance(other, DensityMatrix)
            and self.dims == other.dims
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None


def _wrap(m, dims):
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return DensityMatrix(m, tuple(int(d) for d in dims))


def _normalize_dims(dims, side):
    if isinstance(dims, (int, np.integer)):
        dims = (int(dims),)
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"dimensions must be positive integers, got {dims}")
    if int(np.prod(dims)) != side:
        raise DimensionError(f"dims {dims} do not multiply to matrix side {side}")
    return dims


def from_matrix(m, dims):
    """Validate ``m`` as a density matrix on factors ``dims``.

    Eigenvalues in ``[-1e-10, 0)`` are clipped to zero and the spectrum is
    renormalized; anything more negative is rejected.  Negative eigenvalues
    of pure round-off size (above ``-1e-14``) leave the matrix untouched.

    Raises
    ------
    ValidationError
        With ``invariant`` one of ``"hermitian"``, ``"trace"``, ``"psd"``,
        ``"finite"``, ``"dimensions"``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"density matrix must be square, got {a.shape}")
    dims = _normalize_dims(dims, a.shape[0])
    h = symmetrize(a)
    tr = float(np.real(np.trace(h)))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError("trace", f"trace {tr!r} differs from 1 by more than {TRACE_TOL:.0e}")
    w, v = hermitian_eigensystem(h)
    if w[0] < -PSD_TOL:
        raise ValidationError("psd", f"smallest eigenvalue {w[0]:.3e} below -{PSD_TOL:.0e}")
    # below ROUNDOFF_EIG a rebuild would perturb entries as much as it repairs
    if w[0] < -ROUNDOFF_EIG:
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        h = (v * w) @ dagger(v)
        h = 0.5 * (h + dagger(h))
    return _wrap(h, dims)


def pure_from_vector(v, dims):
    """``|v><v| / <v|v>`` for a nonzero vector."""
    v = np.asarray(v, dtype=complex).ravel()
    norm2 = float(np.real(np.vdot(v, v)))
    if not np.isfinite(norm2) or norm2 <= 0.0:
        raise ValidationError("nonzero", "state vector must be nonzero and finite")
    dims = _normalize_dims(dims, v.size)
    return _wrap(np.outer(v, np.conj(v)) / norm2, dims)


def random_pure_haar(dims, seed):
    """Haar-random pure state from normalized complex Gaussian amplitudes."""
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    psi = complex_gaussian(stream(seed, 0x5055), n)
    return pure_from_vector(psi, dims)


def random_mixed_ginibre(dims, rank, seed):
    """``G G† / Tr(G G†)`` with ``G`` an ``n x rank`` complex Gaussian matrix."""
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    rank = int(rank)
    if not 1 <= rank <= n:
        raise ValidationError("rank", f"rank must lie in [1, {n}], got {rank}")
    g = complex_gaussian(stream(seed, 0x4749), (n, rank))
    rho = g @ dagger(g)
    rho = rho / np.real(np.trace(rho))
    return _wrap(0.5 * (rho + dagger(rho)), dims)


BELL_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)

FAMILIES = ("bell_phi_plus", "werner", "product", "classical_classical", "maximally_mixed")


def werner(z):
    """``z |Ψ-><Ψ-| + (1 - z) I/4`` for ``0 <= z <= 1``."""
    z = float(z)
    if not 0.0 <= z <= 1.0:
        raise ValidationError("param_range", f"werner weight must lie in [0, 1], got {z}")
    rho = z * np.outer(SINGLET, SINGLET.conj()) + (1.0 - z) * np.eye(4) / 4.0
    return from_matrix(rho, (2, 2))


def product(rho_a, rho_b):
    a = rho_a.matrix if isinstance(rho_a, DensityMatrix) else as_matrix(rho_a)
    b = rho_b.matrix if isinstance(rho_b, DensityMatrix) else as_matrix(rho_b)
    return from_matrix(tensor_product(a, b), (a.shape[0], b.shape[0]))


def classical_classical(table):
    """``sum_ij p(i, j) |i><i| ⊗ |j><j|`` from a joint probability table."""
    p = np.asarray(table, dtype=float)
    if p.ndim != 2:
        raise ValidationError("table", "joint probability table must be two-dimensional")
    if np.any(p < 0) or abs(p.sum() - 1.0) > TRACE_TOL:
        raise ValidationError("table", "table entries must be non-negative and sum to 1")
    return from_matrix(np.diag(p.ravel()).astype(complex), p.shape)


def maximally_mixed(dims=(2, 2)):
    n = int(np.prod(dims))
    return from_matrix(np.eye(n) / n, dims)


def family(name, param=None, **kwargs):
    """Named state presets.

    ``bell_phi_plus`` and ``maximally_mixed`` ignore ``param`` (the latter
    takes ``dims``); ``werner`` uses ``param`` as the singlet weight;
    ``product`` needs ``rho_a``/``rho_b`` and ``classical_classical`` needs
    ``table`` (either may also be passed as ``param``).
    """
    if name == "bell_phi_plus":
        return pure_from_vector(BELL_PHI_PLUS, (2, 2))
    if name == "werner":
        if param is None:
            raise ValidationError("param_range", "werner needs a weight parameter")
        return werner(param)
    if name == "product":
        pair = param if param is not None else (kwargs["rho_a"], kwargs["rho_b"])
        return product(*pair)
    if name == "classical_classical":
        return classical_classical(param if param is not None else kwargs["table"])
    if name == "maximally_mixed":
        return maximally_mixed(kwargs.get("dims", (2, 2)))
    raise ValidationError("family", f"unknown state family {name!r}; known: {', '.join(FAMILIES)}")


def state_to_dict(rho):
    return {
        "schema_version": fileio.SCHEMA_VERSION,
        "dims": list(rho.dims),
        "matrix": fileio.matrix_to_pairs(rho.matrix),
    }


def dump_state(rho):
    return fileio.dumps(state_to_dict(rho))


def load_state(text):
    """Parse a state file and validate it with :func:`from_matrix`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("format", f"state file is not valid JSON: {exc}") from None
    fileio.check_schema(doc, "state")
    if "dims" not in doc or "matrix" not in doc:
        raise ValidationError("format", "state file needs 'dims' and 'matrix'")
    dims = tuple(int(d) for d in doc["dims"])
    side = int(np.prod(dims))
    return from_matrix(fileio.pairs_to_matrix(doc["matrix"], side), dims)


def max_entry_diff(a, b):
    a = a.matrix if isinstance(a, DensityMatrix) else a
    b = b.matrix if isinstance(b, DensityMatrix) else b
    return max_abs(np.asarray(a) - np.asarray(b))
