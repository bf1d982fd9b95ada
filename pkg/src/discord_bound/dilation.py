"""Neumark and Stinespring dilations and a numerical audit of the entropy
argument bounding J(A:B) by S(ρ_B).

The audit follows the chain

    ρ_AB  ->  ρ_AB ⊗ |ω><ω|                      (Neumark: POVM -> projectors Π_k on B B̄)
          ->  (1 ⊗ U)(· ⊗ |c_0><c_0|)(1 ⊗ U†)     (Stinespring: Π_k -> unitary on B B̄ C)

computes every reduced state and entropy along the way and checks each
identity and the strong-subadditivity step numerically.
"""

from dataclasses import dataclass, field

import numpy as np

from discord_bound.entropy import shannon_entropy, von_neumann_entropy
from discord_bound.errors import DimensionCapError, DimensionError, ValidationError
from discord_bound.linalg import (
    complete_to_unitary,
    dagger,
    hermitian_eigensystem,
    max_abs,
    partial_trace,
    psd_sqrt,
)
from discord_bound.measurement import (
    DROP_THRESHOLD,
    Povm,
    ProjectiveMeasurement,
    as_povm,
    condition_on_b,
    make_projective,
)
from discord_bound.states import DensityMatrix

CONSTRUCTIONS = ("canonical", "rank1")
DEFAULT_DIM_CAP = 4096
RANK1_TOL = 1e-10
CHECK_TOL = 1e-8
INEQUALITY_TOL = 1e-9


def _basis(n, i):
    e = np.zeros(n, dtype=complex)
    e[i] = 1.0
    return e


def _normalized_omega(omega, dim):
    if omega is None:
        return _basis(dim, 0)
    w = np.asarray(omega, dtype=complex).ravel()
    if w.size != dim:
        raise DimensionError(f"|ω> must have dimension {dim}, got {w.size}")
    norm = np.linalg.norm(w)
    if norm == 0.0:
        raise ValidationError("nonzero", "|ω> must be nonzero")
    return w / norm


def _embed_on_omega(cols, d, anc, omega):
    """Unitary on ``C^d ⊗ C^anc`` sending ``|v>⊗|ω>`` to ``cols[:, v]``."""
    full = complete_to_unitary(cols)
    frame = np.kron(np.eye(d), complete_to_unitary(omega.reshape(-1, 1)))
    # column v of ``full`` belongs to kron index v*anc (the |v>⊗|ω> slot)
    targets = [v * anc for v in range(d)] + [i for i in range(d * anc) if i % anc]
    arranged = np.empty_like(full)
    arranged[:, targets] = full
    return arranged @ dagger(frame)


@dataclass(frozen=True, eq=False)
class NeumarkExtension:
    """POVM on B realized as a projective measurement on ``B ⊗ B̄``.

    ``source`` is the POVM the projectors reproduce.  For the ``rank1``
    construction it is the refined, zero-padded POVM and ``parent[k]`` is the
    index of the original element that outcome ``k`` came from (``-1`` for
    padding).
    """

    source: Povm
    original: Povm
    parent: tuple
    ancilla_dim: int
    omega: np.ndarray
    projectors: ProjectiveMeasurement
    unitary: np.ndarray
    construction: str

    @property
    def dim_b(self):
        return self.source.dim

    def compression_residual(self):
        """``max_k |(1⊗<ω|) Π_k (1⊗|ω>) - E_k|``."""
        d, anc = self.dim_b, self.ancilla_dim
        emb = np.kron(np.eye(d), self.omega.reshape(anc, 1))
        return max(
            max_abs(dagger(emb) @ p @ emb - e)
            for p, e in zip(self.projectors.projectors, self.source.elements)
        )


def refine_rank1(povm, tol=RANK1_TOL):
    """Split every element into rank-1 pieces; returns (vectors, parent)."""
    vecs, parent = [], []
    for k, e in enumerate(povm.elements):
        w, q = hermitian_eigensystem(e)
        for lam, u in zip(w[::-1], q[:, ::-1].T):
            if lam > tol:
                vecs.append(np.sqrt(lam) * u)
                parent.append(k)
    return vecs, parent


def neumark_extend(m, construction="canonical", omega=None, refine=True):
    """Neumark dilation of a POVM on B.

    Parameters
    ----------
    m : Povm or ProjectiveMeasurement
    construction : {"canonical", "rank1"}
        ``canonical``: ancilla of dimension ``n`` (number of outcomes) and
        ``W|v> = Σ_k √E_k|v> ⊗ |k>``, completed to a unitary ``Ŵ``;
        ``Π_k = Ŵ† (1 ⊗ |k><k|) Ŵ`` has rank ``d``.
        ``rank1``: elements refined into rank-1 pieces ``|e_k><e_k|`` and
        zero-padded to a multiple of ``d``; the ``d x m`` co-isometry with
        columns ``e_k`` is completed to an ``m x m`` unitary ``F`` and
        ``Π_k`` projects onto column ``k`` of ``F``.
    omega : array_like, optional
        Ancilla vector ``|ω>``; defaults to the first basis vector.
    refine : bool
        If false, ``rank1`` rejects elements that are not already rank 1.
    """
    if construction not in CONSTRUCTIONS:
        raise ValidationError("construction", f"unknown construction {construction!r}")
    povm = as_povm(m)
    d = povm.dim

    if construction == "canonical":
        n = povm.n_outcomes
        anc = n
        om = _normalized_omega(omega, anc)
        w_iso = sum(np.kron(psd_sqrt(e), _basis(anc, k).reshape(anc, 1)) for k, e in enumerate(povm.elements))
        w_hat = _embed_on_omega(w_iso, d, anc, om)
        projs = [dagger(w_hat) @ np.kron(np.eye(d), np.outer(_basis(anc, k), _basis(anc, k))) @ w_hat for k in range(n)]
        return NeumarkExtension(
            source=povm,
            original=povm,
            parent=tuple(range(n)),
            ancilla_dim=anc,
            omega=om,
            projectors=make_projective(projs),
            unitary=w_hat,
            construction=construction,
        )

    vecs, parent = refine_rank1(povm)
    if not refine:
        counts = np.bincount(parent, minlength=povm.n_outcomes) if parent else np.zeros(povm.n_outcomes)
        if np.any(counts > 1):
            raise ValidationError("rank1", "POVM elements are not rank 1")
    while len(vecs) % d:
        vecs.append(np.zeros(d, dtype=complex))
        parent.append(-1)
    mm = len(vecs)
    anc = mm // d
    om = _normalized_omega(omega, anc)
    coiso = np.column_stack(vecs)
    f = complete_to_unitary(coiso, orientation="rows")
    frame = np.kron(np.eye(d), complete_to_unitary(om.reshape(-1, 1)))
    projs = []
    for k in range(mm):
        # |i> ⊗ |a>  <->  index i + d*a of column k
        fk = f[:, k].reshape(anc, d).T.ravel()
        fk = frame @ fk
        projs.append(np.outer(fk, np.conj(fk)))
    source = Povm(np.array([np.outer(v, np.conj(v)) for v in vecs]))
    source.elements.setflags(write=False)
    return NeumarkExtension(
        source=source,
        original=povm,
        parent=tuple(parent),
        ancilla_dim=anc,
        omega=om,
        projectors=make_projective(projs),
        unitary=f,
        construction=construction,
    )


def _extended_state(rho, omega):
    return np.kron(rho.matrix, np.outer(omega, np.conj(omega)))


def _raw_conditionals(mat, da, db, elements):
    blocks = np.einsum("ibjc,kcb->kij", mat.reshape(da, db, da, db), elements)
    probs = np.real(np.trace(blocks, axis1=1, axis2=2))
    return probs, blocks


def verify_neumark_consistency(rho, ext):
    """Compare ``p_k`` and ``ρ_{A|k}`` from the POVM and from its dilation.

    Returns a dict with ``probability_residual`` and
    ``conditional_residual`` (max-abs entry over outcomes with
    ``p_k >= 1e-12``).
    """
    da, db = rho.dims
    if db != ext.dim_b:
        raise DimensionError(f"extension acts on dimension {ext.dim_b}, subsystem B has {db}")
    big = db * ext.ancilla_dim
    p_povm, b_povm = _raw_conditionals(rho.matrix, da, db, ext.source.elements)
    p_proj, b_proj = _raw_conditionals(_extended_state(rho, ext.omega), da, big, ext.projectors.projectors)
    cond = 0.0
    for k in range(len(p_povm)):
        if p_povm[k] >= DROP_THRESHOLD:
            cond = max(cond, max_abs(b_povm[k] / p_povm[k] - b_proj[k] / p_proj[k]))
    return {
        "probability_residual": float(np.max(np.abs(p_povm - p_proj))),
        "conditional_residual": cond,
        "n_outcomes": len(p_povm),
        "retained": int(np.sum(p_povm >= DROP_THRESHOLD)),
    }


@dataclass(frozen=True, eq=False)
class StinespringDilation:
    """Projective measurement as a unitary on ``H ⊗ C`` with ``C`` in ``|c_0>``."""

    measurement: ProjectiveMeasurement
    c_dim: int
    isometry_v: np.ndarray
    unitary_u: np.ndarray

    @property
    def c_basis(self):
        return np.eye(self.c_dim, dtype=complex)

    @property
    def initial_c(self):
        return _basis(self.c_dim, 0)


def stinespring_dilate(m):
    """``V|v> = Σ_k Π_k|v> ⊗ |c_k>`` and a unitary ``U`` with ``U(|v>⊗|c_0>) = V|v>``."""
    if not isinstance(m, ProjectiveMeasurement):
        m = make_projective(m)
    mc = m.n_outcomes
    dim = m.dim
    v = sum(np.kron(p, _basis(mc, k).reshape(mc, 1)) for k, p in enumerate(m.projectors))
    u = _embed_on_omega(v, dim, mc, _basis(mc, 0))
    return StinespringDilation(measurement=m, c_dim=mc, isometry_v=v, unitary_u=u)


@dataclass(eq=False)
class ProofTrace:
    """Every intermediate state, entropy and residual of one audit run.

    Factor order of the fully dilated space is ``(A, B, B̄, C)``.
    """

    rho: DensityMatrix
    povm: Povm
    extension: NeumarkExtension
    dilation: StinespringDilation
    probabilities: np.ndarray
    conditional_entropies: np.ndarray
    states: dict
    entropies: dict
    residuals: dict
    ssa_slack: float
    final_margin_sb: float
    final_margin_sa: float
    dropped: tuple = field(default=())

    @property
    def dims(self):
        da, db = self.rho.dims
        return (da, db, self.extension.ancilla_dim, self.dilation.c_dim)

    @property
    def construction(self):
        return self.extension.construction

    @property
    def classical_info(self):
        """``S(ρ_A) - Σ p_k S(ρ_{A|k})`` for this measurement."""
        return self.entropies["S_A"] - self.entropies["avg_conditional"]


def build_proof_trace(rho, m, construction="canonical", omega=None, dim_cap=DEFAULT_DIM_CAP):
    """Run the full dilation chain for one state and POVM.

    Raises
    ------
    DimensionCapError
        When ``d_A * d_B * dim(B̄) * dim(C)`` exceeds ``dim_cap``.
    """
    if len(rho.dims) != 2:
        raise DimensionError("the audit needs a bipartite state")
    da, db = rho.dims
    povm = as_povm(m)
    if povm.dim != db:
        raise DimensionError(f"POVM acts on dimension {povm.dim}, subsystem B has {db}")
    ext = neumark_extend(povm, construction, omega=omega)
    anc = ext.ancilla_dim
    mc = ext.projectors.n_outcomes
    total = da * db * anc * mc
    if total > dim_cap:
        raise DimensionCapError(total, dim_cap)
    stn = stinespring_dilate(ext.projectors)
    dims4 = (da, db, anc, mc)
    dims3 = (da, db, anc)

    rho3 = _extended_state(rho, ext.omega)
    eye_a = np.eye(da)
    pis = [np.kron(eye_a, p) for p in ext.projectors.projectors]
    rho3_post = sum(p @ rho3 @ p for p in pis)

    c0 = np.outer(stn.initial_c, stn.initial_c)
    u_full = np.kron(eye_a, stn.unitary_u)
    rho4 = u_full @ np.kron(rho3, c0) @ dagger(u_full)
    rho4 = 0.5 * (rho4 + dagger(rho4))
    double_sum = np.zeros_like(rho4)
    for k, pk in enumerate(pis):
        for j, pj in enumerate(pis):
            ckj = np.zeros((mc, mc))
            ckj[k, j] = 1.0
            double_sum += np.kron(pk @ rho3 @ pj, ckj)

    ens = condition_on_b(rho, ext.source)
    probs = np.zeros(mc)
    probs[list(ens.outcomes)] = ens.probabilities
    cond_s = np.zeros(mc)
    block_diag = np.zeros((da * mc, da * mc), dtype=complex)
    avg_state = np.zeros((da, da), dtype=complex)
    for p, c, k in zip(ens.probabilities, ens.conditionals, ens.outcomes):
        cond_s[k] = von_neumann_entropy(c)
        ck = np.zeros((mc, mc))
        ck[k, k] = 1.0
        block_diag += p * np.kron(c.matrix, ck)
        avg_state += p * c.matrix

    rho_ac = partial_trace(rho4, dims4, (0, 3))
    rho_a_post = partial_trace(rho4, dims4, (0,))
    rho_bbc = partial_trace(rho4, dims4, (1, 2, 3))
    rho_bb_post = partial_trace(rho4, dims4, (1, 2))
    rho_bb = partial_trace(rho3, dims3, (1, 2))
    rho_ab_post = partial_trace(rho3_post, dims3, (0, 1))
    rho_a = rho.rho_a.matrix
    rho_b = rho.rho_b.matrix
    weighted_projectors = sum(p * pi for p, pi in zip(probs, ext.projectors.projectors))
    literal_ab = sum(np.kron(eye_a, e) for e in ext.source.elements) @ rho.matrix

    branch_s = 0.0
    for k, pi in enumerate(ext.projectors.projectors):
        if probs[k] >= DROP_THRESHOLD:
            branch = pi @ rho_bb @ pi / probs[k]
            branch_s += probs[k] * von_neumann_entropy(0.5 * (branch + dagger(branch)))

    h_p = shannon_entropy(probs)
    avg = float(np.dot(probs, cond_s))
    ent = {
        "S_AC_post": von_neumann_entropy(rho_ac),
        "S_A_post": von_neumann_entropy(rho_a_post),
        "S_BBbarC_post": von_neumann_entropy(rho_bbc),
        "S_BBbar_post": von_neumann_entropy(rho_bb_post),
        "S_BBbar": von_neumann_entropy(rho_bb),
        "S_B": von_neumann_entropy(rho.rho_b),
        "S_A": von_neumann_entropy(rho.rho_a),
        "H_p": h_p,
        "avg_conditional": avg,
        "avg_branch_BBbar": branch_s,
    }
    spec_bbc = np.linalg.eigvalsh(rho_bbc)
    spec_bb = np.linalg.eigvalsh(rho_bb)
    n_extra = len(spec_bbc) - len(spec_bb)
    spec_bb = np.concatenate([np.zeros(n_extra), spec_bb])
    residuals = {
        "stinespring_double_sum": max_abs(rho4 - double_sum),
        "rho_AC_two_ways": max_abs(rho_ac - block_diag),
        "rho_A_post_vs_rho_A": max_abs(rho_a_post - rho_a),
        "ensemble_average_vs_rho_A": max_abs(avg_state - rho_a),
        "rho_BBbarC_spectrum": float(np.max(np.abs(spec_bbc - spec_bb))),
        "rho_BBbar_post_vs_weighted_projectors": max_abs(rho_bb_post - weighted_projectors),
        "rho_BBbar_post_two_ways": max_abs(rho_bb_post - partial_trace(rho3_post, dims3, (1, 2))),
        "rho_AB_literal_vs_lueders": max_abs(literal_ab - rho_ab_post),
        "neumark_compression": ext.compression_residual(),
    }
    ssa = ent["S_AC_post"] + ent["S_BBbarC_post"] - ent["S_A_post"] - ent["S_BBbar_post"]
    info = ent["S_A"] - avg
    states = {
        "rho_ABBbar": rho3,
        "rho_ABBbar_post": rho3_post,
        "rho_ABBbarC_post": rho4,
        "rho_AC_post": rho_ac,
        "rho_A_post": rho_a_post,
        "rho_BBbarC_post": rho_bbc,
        "rho_BBbar_post": rho_bb_post,
        "rho_BBbar": rho_bb,
        "rho_AB_post": rho_ab_post,
    }
    return ProofTrace(
        rho=rho,
        povm=ext.source,
        extension=ext,
        dilation=stn,
        probabilities=probs,
        conditional_entropies=cond_s,
        states=states,
        entropies=ent,
        residuals=residuals,
        ssa_slack=ssa,
        final_margin_sb=ent["S_B"] - info,
        final_margin_sa=ent["S_A"] - info,
        dropped=ens.dropped,
    )


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool
    required: bool
    kind: str = "equality"

    def to_dict(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "required": self.required,
        }


@dataclass(frozen=True)
class Verdict:
    checks: tuple
    construction: str

    @property
    def passed(self):
        """True when every required check passes."""
        return all(c.passed for c in self.checks if c.required)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "construction": self.construction,
            "all_required_passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _eq(name, residual, tol=CHECK_TOL, required=True):
    residual = float(abs(residual))
    return Check(name, residual, tol, residual <= tol, required)


def _geq(name, value, tol=INEQUALITY_TOL):
    value = float(value)
    return Check(name, value, -tol, value >= -tol, True, kind="inequality")


def verify_proof(trace):
    """Check every step of the chain; failures are reported, never raised.

    Equality checks report ``|lhs - rhs|`` against ``1e-8`` (matrix
    identities against ``1e-10``); inequality checks report the slack,
    which must be ``>= -1e-9``.  The literal ``ρ'_BB̄ = Σ p_k Π_k`` equality
    is required only for the ``rank1`` construction.
    """
    e, r = trace.entropies, trace.residuals
    rank1 = trace.construction == "rank1"
    checks = [
        _eq("i_S_AC_decomposition", e["S_AC_post"] - (e["H_p"] + e["avg_conditional"])),
        _eq("ii_S_A_unchanged", e["S_A_post"] - e["S_A"]),
        _eq("iii_S_BBbarC_equals_S_BBbar", e["S_BBbarC_post"] - e["S_BBbar"]),
        _eq("iii_S_BBbar_equals_S_B", e["S_BBbar"] - e["S_B"]),
        _eq("iv_rho_BBbar_post_equals_weighted_projectors", r["rho_BBbar_post_vs_weighted_projectors"], required=rank1),
        _eq("iv_S_BBbar_post_decomposition", e["S_BBbar_post"] - (e["H_p"] + e["avg_branch_BBbar"])),
        _geq("v_strong_subadditivity_slack", trace.ssa_slack),
        _geq("vi_final_margin_S_B", trace.final_margin_sb),
        _geq("vi_final_margin_S_A", trace.final_margin_sa),
        _eq("rho_A_post_equals_rho_A", r["rho_A_post_vs_rho_A"], tol=1e-10),
        _eq("rho_AC_two_ways", r["rho_AC_two_ways"], tol=1e-10),
        _eq("stinespring_double_sum", r["stinespring_double_sum"], tol=1e-10),
        _eq("rho_BBbarC_unitary_equivalence", r["rho_BBbarC_spectrum"], tol=1e-9),
        _eq("neumark_compression", r["neumark_compression"], tol=1e-10),
        _eq("rho_AB_literal_vs_lueders", r["rho_AB_literal_vs_lueders"], required=False),
    ]
    return Verdict(tuple(checks), trace.construction)


def trace_to_dict(trace, verdict=None, full=False):
    """Scalar summary of a trace; matrices only with ``full=True``."""
    verdict = verdict or verify_proof(trace)
    out = {
        "construction": trace.construction,
        "dims": {"A": trace.dims[0], "B": trace.dims[1], "Bbar": trace.dims[2], "C": trace.dims[3]},
        "n_outcomes": int(len(trace.probabilities)),
        "probabilities": [float(p) for p in trace.probabilities],
        "conditional_entropies": [float(s) for s in trace.conditional_entropies],
        "dropped_outcomes": [int(k) for k, _ in trace.dropped],
        "entropies": {k: float(v) for k, v in trace.entropies.items()},
        "classical_info": trace.classical_info,
        "ssa_slack": trace.ssa_slack,
        "final_margin_sb": trace.final_margin_sb,
        "final_margin_sa": trace.final_margin_sa,
        "residuals": {k: float(v) for k, v in trace.residuals.items()},
        "verdict": verdict.to_dict(),
    }
    if full:
        from discord_bound.fileio import matrix_to_pairs

        out["matrices"] = {k: matrix_to_pairs(v) for k, v in trace.states.items()}
        out["matrices"]["projectors"] = [matrix_to_pairs(p) for p in trace.extension.projectors.projectors]
        out["matrices"]["stinespring_U"] = matrix_to_pairs(trace.dilation.unitary_u)
        out["matrices"]["stinespring_V"] = matrix_to_pairs(trace.dilation.isometry_v)
    return out
