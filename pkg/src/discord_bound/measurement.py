"""Measurements on subsystem B and the conditional ensembles they induce."""

from dataclasses import dataclass, field
import json

import numpy as np

from discord_bound import fileio
from discord_bound.entropy import von_neumann_entropy
from discord_bound.errors import DimensionError, ValidationError
from discord_bound.linalg import (
    as_matrix,
    dagger,
    hermitian_eigensystem,
    is_unitary,
    max_abs,
    psd_sqrt,
)
from discord_bound.rng import complex_gaussian, haar_unitary, stream
from discord_bound.states import DensityMatrix, from_matrix

COMPLETENESS_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-9
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
DROP_THRESHOLD = 1e-12


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operator valued measure; ``elements`` has shape ``(n, dim, dim)``."""

    elements: np.ndarray

    @property
    def dim(self):
        return self.elements.shape[1]

    @property
    def n_outcomes(self):
        return self.elements.shape[0]

    def __len__(self):
        return self.n_outcomes


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Complete set of mutually orthogonal projectors, shape ``(n, dim, dim)``."""

    projectors: np.ndarray

    @property
    def dim(self):
        return self.projectors.shape[1]

    @property
    def n_outcomes(self):
        return self.projectors.shape[0]

    def __len__(self):
        return self.n_outcomes

    def as_povm(self):
        return Povm(self.projectors)


@dataclass(frozen=True)
class ConditionalEnsemble:
    """Outcome probabilities and post-measurement states of A.

    ``outcomes[i]`` is the measurement index behind ``probabilities[i]`` and
    ``conditionals[i]``.  Outcomes with probability below ``1e-12`` are left
    out and listed in ``dropped`` as ``(index, probability)``.
    """

    probabilities: np.ndarray
    conditionals: tuple
    outcomes: tuple
    dropped: tuple = field(default=())

    def average_entropy(self):
        return float(sum(p * von_neumann_entropy(c) for p, c in zip(self.probabilities, self.conditionals)))

    def average_state(self):
        return sum(p * c.matrix for p, c in zip(self.probabilities, self.conditionals))


def _stack(ops):
    if isinstance(ops, np.ndarray) and ops.ndim == 3:
        arr = np.array(ops, dtype=complex)
    else:
        arr = np.array([as_matrix(e) for e in ops], dtype=complex)
    if arr.ndim != 3 or arr.shape[0] == 0 or arr.shape[1] != arr.shape[2]:
        raise DimensionError("measurement needs a non-empty list of equal-size square matrices")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("finite", "measurement operators have NaN or infinite entries")
    return arr


def make_povm(elements):
    """Validate and freeze a POVM.

    Each element must be Hermitian and PSD within ``1e-10`` and the elements
    must sum to the identity within ``1e-10`` (max-abs entry).
    """
    arr = _stack(elements)
    for k, e in enumerate(arr):
        asym = max_abs(e - dagger(e))
        if asym > HERMITIAN_TOL:
            raise ValidationError("hermitian", f"element {k} is not Hermitian ({asym:.3e})")
        arr[k] = 0.5 * (e + dagger(e))
        w = np.linalg.eigvalsh(arr[k])
        if w[0] < -PSD_TOL:
            raise ValidationError("psd", f"element {k} has eigenvalue {w[0]:.3e}")
    err = max_abs(arr.sum(axis=0) - np.eye(arr.shape[1]))
    if err > COMPLETENESS_TOL:
        raise ValidationError("completeness", f"elements sum to identity only within {err:.3e}")
    return Povm(_frozen(arr))


def make_projective(projectors):
    """Validate ``Π_k Π_j = δ_kj Π_k`` (1e-9) and ``Σ Π_k = 1`` (1e-10)."""
    arr = _stack(projectors)
    n = arr.shape[0]
    for k in range(n):
        for j in range(n):
            target = arr[k] if k == j else 0.0
            err = max_abs(arr[k] @ arr[j] - target)
            if err > ORTHOGONALITY_TOL:
                raise ValidationError(
                    "orthogonality", f"projectors {k},{j} violate Π_kΠ_j = δ_kjΠ_k by {err:.3e}"
                )
    err = max_abs(arr.sum(axis=0) - np.eye(arr.shape[1]))
    if err > COMPLETENESS_TOL:
        raise ValidationError("completeness", f"projectors sum to identity only within {err:.3e}")
    return ProjectiveMeasurement(_frozen(0.5 * (arr + dagger(arr))))


def as_povm(m):
    if isinstance(m, Povm):
        return m
    if isinstance(m, ProjectiveMeasurement):
        return m.as_povm()
    return make_povm(m)


def projective_from_unitary(u):
    """Rank-1 projectors onto the columns of a unitary."""
    u = as_matrix(u)
    if not is_unitary(u):
        raise ValidationError("unitary", "measurement basis must be unitary within 1e-10")
    proj = np.einsum("ik,jk->kij", u, np.conj(u))
    return ProjectiveMeasurement(_frozen(proj))


def qubit_projective(theta, phi):
    """Projectors onto ``cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`` and its complement."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    e = np.exp(1j * phi)
    n = np.array([c, e * s])
    m = np.array([-np.conj(e) * s, c])
    return ProjectiveMeasurement(_frozen([np.outer(n, n.conj()), np.outer(m, m.conj())]))


def computational(dim):
    eye = np.eye(dim)
    return ProjectiveMeasurement(_frozen([np.outer(eye[i], eye[i]) for i in range(dim)]))


def trine():
    """Qubit trine POVM ``{(2/3)|ψ_j><ψ_j|}`` with real vectors 120° apart."""
    angles = 2.0 * np.pi * np.arange(3) / 3.0
    vecs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return make_povm([(2.0 / 3.0) * np.outer(v, v) for v in vecs])


def povm_from_vectors(vectors, min_eig=1e-8):
    """Rank-1 POVM from unnormalized vectors by symmetric normalization.

    ``M_k = |v_k><v_k|`` and ``E_k = T^{-1/2} M_k T^{-1/2}`` with
    ``T = Σ M_k``, so completeness holds by construction.  Returns ``None``
    when ``T`` has an eigenvalue below ``min_eig``.
    """
    v = np.asarray(vectors, dtype=complex)
    t = np.einsum("ki,kj->ij", v, np.conj(v))
    w, q = np.linalg.eigh(0.5 * (t + dagger(t)))
    if w[0] < min_eig:
        return None
    t_isqrt = (q / np.sqrt(w)) @ dagger(q)
    e = v @ t_isqrt.T
    return Povm(_frozen(np.einsum("ki,kj->kij", e, np.conj(e))))


def random_projective(dim, seed):
    return projective_from_unitary(haar_unitary(dim, stream(seed, 0x5052)))


def random_povm(dim, n_outcomes, seed):
    """Random full-rank POVM from normalized Wishart matrices."""
    rng = stream(seed, 0x504F, n_outcomes)
    g = complex_gaussian(rng, (n_outcomes, dim, dim))
    m = g @ dagger(g)
    t = m.sum(axis=0)
    t_isqrt = np.linalg.inv(psd_sqrt(t))
    return make_povm(t_isqrt @ m @ t_isqrt)


def random_rank1_povm(dim, n_outcomes, seed):
    rng = stream(seed, 0x5231, n_outcomes)
    while True:
        povm = povm_from_vectors(complex_gaussian(rng, (n_outcomes, dim)))
        if povm is not None:
            return make_povm(povm.elements)


def _rho_array(rho):
    if isinstance(rho, DensityMatrix):
        if len(rho.dims) != 2:
            raise DimensionError("conditioning needs a bipartite state")
        return rho.matrix, rho.dims
    raise TypeError("expected a DensityMatrix")


def condition_on_b(rho, m):
    """Measure B with ``m`` and return ``{p_k, ρ_{A|k}}``.

    ``p_k ρ_{A|k} = Tr_B[(1_A ⊗ E_k) ρ_AB]``.
    """
    mat, (da, db) = _rho_array(rho)
    povm = as_povm(m)
    if povm.dim != db:
        raise DimensionError(f"measurement acts on dimension {povm.dim}, subsystem B has {db}")
    blocks = np.einsum("ibjc,kcb->kij", mat.reshape(da, db, da, db), povm.elements)
    probs = np.real(np.trace(blocks, axis1=1, axis2=2))
    kept, dropped, conds = [], [], []
    for k, p in enumerate(probs):
        if p < DROP_THRESHOLD:
            dropped.append((k, float(p)))
            continue
        kept.append(k)
        conds.append(from_matrix(blocks[k] / p, (da,)))
    p_kept = probs[kept].copy()
    p_kept.setflags(write=False)
    return ConditionalEnsemble(p_kept, tuple(conds), tuple(kept), tuple(dropped))


def fixed_measurement_classical_info(rho, m):
    """``S(ρ_A) - Σ_k p_k S(ρ_{A|k})`` for one fixed measurement on B."""
    ens = condition_on_b(rho, m)
    return von_neumann_entropy(rho.rho_a) - ens.average_entropy()


def povm_to_dict(m):
    povm = as_povm(m)
    return {
        "schema_version": fileio.SCHEMA_VERSION,
        "dim": povm.dim,
        "elements": [fileio.matrix_to_pairs(e) for e in povm.elements],
    }


def dump_povm(m):
    return fileio.dumps(povm_to_dict(m))


def load_povm(text):
    """Parse and validate a POVM file."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("format", f"POVM file is not valid JSON: {exc}") from None
    fileio.check_schema(doc, "POVM")
    if "dim" not in doc or "elements" not in doc:
        raise ValidationError("format", "POVM file needs 'dim' and 'elements'")
    d = int(doc["dim"])
    return make_povm([fileio.pairs_to_matrix(e, d) for e in doc["elements"]])
