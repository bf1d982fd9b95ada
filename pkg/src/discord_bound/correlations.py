"""Mutual information, classical correlations J(A:B) and quantum discord.

J maximizes ``S(ρ_A) - Σ_k p_k S(ρ_{A|k})`` over measurements on B.  The
maximization runs a multi-restart Nelder-Mead search over a measurement
chart; for a qubit B, :func:`qubit_grid_oracle` gives an exhaustive
reference over the Bloch sphere.
"""

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from discord_bound.entropy import ZERO_EIG, shannon_entropy, von_neumann_entropy
from discord_bound.errors import DimensionError, ValidationError
from discord_bound.linalg import dagger
from discord_bound.measurement import (
    Povm,
    ProjectiveMeasurement,
    fixed_measurement_classical_info,
    povm_from_vectors,
    projective_from_unitary,
    qubit_projective,
)
from discord_bound.rng import stream

__all__ = [
    "CorrelationReport",
    "bloch_angles",
    "bound_report",
    "mutual_information",
    "optimize_classical_correlations",
    "quantum_discord",
    "qubit_grid_oracle",
    "shannon_entropy",
    "von_neumann_entropy",
]

MEASUREMENT_CLASSES = ("projective", "povm")
SIMPLEX_SCALE = 0.3
SIMPLEX_DIAMETER = 1e-7
MAX_EVALS = 2000
DEFAULT_RESTARTS = 32
TIE_TOL = 1e-12
COARSE_GRID = (37, 72)


def mutual_information(rho):
    """``S(ρ_A) + S(ρ_B) - S(ρ_AB)`` in bits."""
    return von_neumann_entropy(rho.rho_a) + von_neumann_entropy(rho.rho_b) - von_neumann_entropy(rho)


# -- fast objective ----------------------------------------------------------
#
# The optimizer evaluates the average conditional entropy many thousands of
# times, so it works on raw arrays rather than validated objects.  Final
# values are always re-evaluated through fixed_measurement_classical_info.


def _blocks(rho4, elements):
    """``Tr_B[(1 ⊗ E_k) ρ]`` for every element, shape ``(n, dA, dA)``."""
    return np.einsum("ibjc,kcb->kij", rho4, elements)


def _avg_conditional_entropy(blocks):
    blocks = 0.5 * (blocks + dagger(blocks))
    p = np.real(np.trace(blocks, axis1=-2, axis2=-1))
    mu = np.linalg.eigvalsh(blocks)
    safe = np.where(p >= ZERO_EIG, p, 1.0)
    lam = mu / safe[..., None]
    lam = np.where((lam >= ZERO_EIG) & (p[..., None] >= ZERO_EIG), lam, 1.0)
    s = -np.sum(lam * np.log2(lam), axis=-1)
    return np.sum(np.where(p >= ZERO_EIG, p * s, 0.0), axis=-1)


_TRIU_CACHE = {}


def _hermitian_from_params(x, d):
    if d not in _TRIU_CACHE:
        _TRIU_CACHE[d] = np.triu_indices(d, 1)
    iu = _TRIU_CACHE[d]
    m = len(iu[0])
    h = np.diag(x[:d].astype(complex))
    off = x[d:d + m] + 1j * x[d + m:d + 2 * m]
    h[iu] = off
    h[iu[1], iu[0]] = np.conj(off)
    return h


def unitary_from_params(x, d):
    """``exp(iH(x))`` for the ``d²``-parameter Hermitian chart."""
    w, q = np.linalg.eigh(_hermitian_from_params(np.asarray(x, dtype=float), d))
    return (q * np.exp(1j * w)) @ dagger(q)


def _projectors_from_unitary(u):
    return np.einsum("ik,jk->kij", u, np.conj(u))


def _bloch_projectors(theta, phi):
    return qubit_projective(theta, phi).projectors


class _Chart:
    """Maps a real parameter vector to measurement elements on B."""

    def __init__(self, kind, d, n_out=None):
        self.kind = kind
        self.d = d
        if kind == "unitary":
            self.n_params = d * d
        elif kind == "bloch":
            self.n_params = 2
        elif kind == "povm_vectors":
            self.n_out = n_out or d * d
            self.n_params = 2 * d * self.n_out
        else:
            raise ValueError(kind)

    def elements(self, x):
        if self.kind == "unitary":
            return _projectors_from_unitary(unitary_from_params(x, self.d))
        if self.kind == "bloch":
            return _bloch_projectors(x[0], x[1])
        v = self._vectors(x)
        povm = povm_from_vectors(v)
        return None if povm is None else povm.elements

    def _vectors(self, x):
        half = self.d * self.n_out
        return (x[:half] + 1j * x[half:]).reshape(self.n_out, self.d)

    def measurement(self, x):
        if self.kind == "unitary":
            return projective_from_unitary(unitary_from_params(x, self.d))
        if self.kind == "bloch":
            return qubit_projective(x[0], x[1])
        return povm_from_vectors(self._vectors(x))

    def random_start(self, rng):
        if self.kind == "povm_vectors":
            x = rng.standard_normal(self.n_params)
        else:
            x = rng.uniform(-np.pi, np.pi, self.n_params)
        return x


def _run_simplex(f, x0):
    n = len(x0)
    simplex = np.vstack([x0, x0 + SIMPLEX_SCALE * np.eye(n)])
    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": SIMPLEX_DIAMETER,
            "fatol": np.inf,
            "maxfev": MAX_EVALS,
        },
    )
    return np.asarray(res.x, dtype=float), int(res.nfev)


def qubit_grid_oracle(rho, n_theta=181, n_phi=360, chunk=1 << 16):
    """Exhaustive maximum of the fixed-measurement objective for a qubit B.

    Evaluates every projective measurement with Bloch angles
    ``θ_i = π i / (n_theta - 1)`` and ``φ_j = 2π j / n_phi``.  Returns
    ``(best_J, (θ, φ))``; ties resolve to the first grid point in row-major
    ``(θ, φ)`` order.
    """
    if len(rho.dims) != 2 or rho.dim_b != 2:
        raise DimensionError("the grid oracle needs a qubit subsystem B")
    da = rho.dim_a
    rho4 = rho.matrix.reshape(da, 2, da, 2)
    thetas = np.linspace(0.0, np.pi, n_theta) if n_theta > 1 else np.zeros(1)
    phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    s_a = von_neumann_entropy(rho.rho_a)
    best_val, best_idx = -np.inf, 0
    for start in range(0, tt.size, chunk):
        th, ph = tt[start:start + chunk], pp[start:start + chunk]
        c, s, e = np.cos(th / 2), np.sin(th / 2), np.exp(1j * ph)
        n = np.stack([c, e * s], axis=1)
        m = np.stack([-np.conj(e) * s, c], axis=1)
        vecs = np.stack([n, m], axis=1)  # (N, 2 outcomes, 2)
        blocks = np.einsum("ibjc,Nkc,Nkb->Nkij", rho4, vecs, np.conj(vecs))
        vals = s_a - _avg_conditional_entropy(blocks)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_idx = float(vals[i]), start + i
    return best_val, (float(tt[best_idx]), float(pp[best_idx]))


def bloch_angles(projector):
    """Bloch angles ``(θ, φ)`` of a rank-1 qubit projector."""
    p = np.asarray(projector)
    theta = 2.0 * np.arccos(np.sqrt(np.clip(np.real(p[0, 0]), 0.0, 1.0)))
    phi = float(np.angle(p[1, 0])) % (2.0 * np.pi) if abs(p[1, 0]) > 1e-12 else 0.0
    return float(theta), phi


@dataclass
class OptimizationResult:
    value: float
    measurement: object
    chart: str
    params: np.ndarray
    candidate: int
    restarts: int
    evaluations: int
    start_values: list = field(default_factory=list)
    candidate_values: list = field(default_factory=list)

    def describe(self):
        out = {"chart": self.chart, "params": [float(v) for v in self.params], "candidate": self.candidate}
        if isinstance(self.measurement, ProjectiveMeasurement) and self.measurement.dim == 2:
            out["theta"], out["phi"] = bloch_angles(self.measurement.projectors[0])
        return out


def optimize_classical_correlations(
    rho,
    measurement_class="projective",
    restarts=DEFAULT_RESTARTS,
    seed=0,
    n_out=None,
    grid=None,
):
    """Maximize the fixed-measurement classical information over measurements on B.

    Parameters
    ----------
    rho : DensityMatrix
        Bipartite state.
    measurement_class : {"projective", "povm"}
        ``"projective"`` searches rank-1 orthonormal bases ``u = exp(iH(x))``;
        ``"povm"`` searches rank-1 POVMs with ``n_out`` outcomes (default
        ``d_B**2``) built by :func:`povm_from_vectors`.
    restarts : int
        Independent Nelder-Mead runs.  Restart ``r`` always starts from the
        same point for a given seed, so more restarts never lower the result.
    seed : int
    grid : tuple of int or False, optional
        For a qubit B with the projective class, a coarse ``(n_theta, n_phi)``
        Bloch grid whose best point seeds an extra refinement run.  Defaults
        to ``(37, 72)``; ``False`` disables it.

    Returns
    -------
    OptimizationResult
    """
    if measurement_class not in MEASUREMENT_CLASSES:
        raise ValidationError("measurement_class", f"unknown class {measurement_class!r}")
    restarts = int(restarts)
    if restarts < 1:
        raise ValidationError("restarts", "need at least one restart")
    if len(rho.dims) != 2:
        raise DimensionError("classical correlations need a bipartite state")
    da, db = rho.dims
    rho4 = rho.matrix.reshape(da, db, da, db)
    s_a = von_neumann_entropy(rho.rho_a)

    if measurement_class == "projective":
        chart = _Chart("unitary", db)
    else:
        chart = _Chart("povm_vectors", db, n_out)

    def make_objective(ch):
        def f(x):
            el = ch.elements(x)
            if el is None:
                return np.inf
            return float(_avg_conditional_entropy(_blocks(rho4, el)))

        return f

    candidates = []  # (chart, start, end, nfev)
    if measurement_class == "projective" and db == 2 and grid is not False:
        nt, nph = grid or COARSE_GRID
        _, (th, ph) = qubit_grid_oracle(rho, nt, nph)
        bloch = _Chart("bloch", 2)
        x0 = np.array([th, ph])
        x1, nfev = _run_simplex(make_objective(bloch), x0)
        candidates.append((bloch, x0, x1, nfev))

    f = make_objective(chart)
    for r in range(restarts):
        rng = stream(seed, 0xC0DE, r)
        x0 = chart.random_start(rng)
        while not np.isfinite(f(x0)):
            x0 = chart.random_start(rng)
        x1, nfev = _run_simplex(f, x0)
        candidates.append((chart, x0, x1, nfev))

    best = None
    start_values, end_values = [], []
    evaluations = 0
    for i, (ch, x0, x1, nfev) in enumerate(candidates):
        evaluations += nfev
        v0 = fixed_measurement_classical_info(rho, ch.measurement(x0))
        m1 = ch.measurement(x1)
        v1 = fixed_measurement_classical_info(rho, m1) if m1 is not None else -np.inf
        if v0 > v1:
            # simplex never accepts a worse point; guard against round-off
            v1, x1, m1 = v0, x0, ch.measurement(x0)
        start_values.append(v0)
        end_values.append(v1)
        if best is None or v1 > best[0] + TIE_TOL:
            best = (v1, m1, ch.kind, x1, i)

    value, meas, kind, params, idx = best
    return OptimizationResult(
        value=max(value, 0.0),
        measurement=meas,
        chart=kind,
        params=params,
        candidate=idx,
        restarts=restarts,
        evaluations=evaluations,
        start_values=start_values,
        candidate_values=end_values,
    )


@dataclass
class CorrelationReport:
    """All correlation quantities of one bipartite state, in bits."""

    s_a: float
    s_b: float
    s_ab: float
    mutual_information: float
    classical_j: float
    discord: float
    bound_margin: float
    discord_sb_margin: float
    best_measurement: dict
    optimizer_restarts: int
    measurement_class: str
    seed: int = 0
    dims: tuple = ()

    def to_dict(self):
        d = asdict(self)
        d["dims"] = list(self.dims)
        return d


def quantum_discord(rho, measurement_class="projective", restarts=DEFAULT_RESTARTS, seed=0, **options):
    """Full correlation report with ``discord = I - J``."""
    s_a = von_neumann_entropy(rho.rho_a)
    s_b = von_neumann_entropy(rho.rho_b)
    s_ab = von_neumann_entropy(rho)
    mi = s_a + s_b - s_ab
    opt = optimize_classical_correlations(rho, measurement_class, restarts, seed, **options)
    j = opt.value
    d = mi - j
    return CorrelationReport(
        s_a=s_a,
        s_b=s_b,
        s_ab=s_ab,
        mutual_information=mi,
        classical_j=j,
        discord=d,
        bound_margin=min(s_a, s_b) - j,
        discord_sb_margin=s_b - d,
        best_measurement=opt.describe(),
        optimizer_restarts=restarts,
        measurement_class=measurement_class,
        seed=int(seed),
        dims=tuple(rho.dims),
    )


def bound_report(rho, **options):
    """``bound_margin = min(S_A, S_B) - J`` and ``discord_sb_margin = S_B - D``."""
    rep = quantum_discord(rho, **options)
    return {
        "bound_margin": rep.bound_margin,
        "discord_sb_margin": rep.discord_sb_margin,
        "d_minus_sa": rep.discord - rep.s_a,
        "report": rep,
    }
