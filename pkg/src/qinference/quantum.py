"""
Lüders conditional probability, the Born rule and the product-rule residual.

Conditionals are evaluated as ``tr(QρQP)/tr(ρQ)``. Meets of non-commuting
projectors go through :func:`qinference.lattice.meet`, the range
intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConditioningOnNullError, InputError
from .lattice import classify_pair, join, meet
from .linalg import (
    DEFAULT_TOL,
    DensityMatrix,
    Projector,
    ToleranceProfile,
    hermitian_part,
    ket,
    outer,
    projector_onto_columns,
    random_state,
    random_unitary,
    trace_inner,
)
from .report import AxiomReport

B_THEN_A = "b-then-a"
A_THEN_B = "a-then-b"
CONVENTIONS = (B_THEN_A, A_THEN_B)

COMPONENT_NAMES = {
    B_THEN_A: ("Pr(P∧Q|R)", "Pr(P|R)", "Pr(Q|P∧R)"),
    A_THEN_B: ("Pr(P∧Q|R)", "Pr(Q|R)", "Pr(P|Q∧R)"),
}

ANCHORS = {
    "qone": "Pr(Q|Q)=1",
    "additivity": "Pr(P∨Q|R) = Pr(P|R) + Pr(Q|R) for PQ = 0",
    "qabc": "Pr(P∧Q|Q) = Pr(P∧Q|R)/Pr(Q|R) for Q < R, Pr(Q|R) > 0",
    "commuting_product_rule": "w(A∧B|C) = w(B|C) w(A|B∧C)",
    "frame_sum": "Σ_i tr(ρ P_i) = 1",
    "frame_pairwise": "Pr(P_i∨P_j) = Pr(P_i) + Pr(P_j) for P_i P_j = 0",
}

DEFAULT_QUANTUM_TOLS = {"qone": 1e-12, "additivity": 1e-12, "qabc": 1e-10}


def _as_projector(p, tol: ToleranceProfile = DEFAULT_TOL) -> Projector:
    return p if isinstance(p, Projector) else Projector(p, tol)


def _as_state(rho, tol: ToleranceProfile = DEFAULT_TOL) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho, tol)


def _same_dim(*ops):
    dims = {op.dim for op in ops}
    if len(dims) != 1:
        raise InputError(f"dimension mismatch: {sorted(dims)}")


@dataclass(frozen=True)
class ConditionalValue:
    """``Pr(P|Q)`` together with its numerator ``tr(QρQP)`` and denominator ``tr(ρQ)``."""

    value: float
    numerator: float
    denominator: float
    convention_note: str = "Lüders: tr(QρQP)/tr(ρQ)"

    def __float__(self):
        return self.value


def born(rho, p) -> float:
    """``tr(ρP)``."""
    rho, p = _as_state(rho), _as_projector(p)
    _same_dim(rho, p)
    return trace_inner(rho.matrix, p.matrix).real


def conditioned_state(rho, q, tol: ToleranceProfile | None = None) -> DensityMatrix:
    """State after conditioning on ``Q``: ``QρQ / tr(ρQ)``.

    Raises
    ------
    ConditioningOnNullError
        If ``tr(ρQ) <= probability_tol``; the trace is attached as ``value``.
    """
    rho, q = _as_state(rho), _as_projector(q)
    _same_dim(rho, q)
    tol = tol or rho.tol
    weight = trace_inner(rho.matrix, q.matrix).real
    if weight <= tol.probability_tol:
        raise ConditioningOnNullError(f"tr(ρQ) = {weight:.3e} is below the conditioning threshold",
                                      value=weight)
    qm = q.matrix
    return DensityMatrix(hermitian_part(qm @ rho.matrix @ qm) / weight, tol)


def lueders(rho, p, q, tol: ToleranceProfile | None = None, factor: str = "Pr(P|Q)") -> ConditionalValue:
    """Lüders conditional probability ``Pr(P|Q) = tr(QρQP)/tr(ρQ)``.

    >>> from qinference.linalg import identity
    >>> lueders(np.eye(2) / 2, identity(2), identity(2)).value
    1.0
    """
    rho, p, q = _as_state(rho), _as_projector(p), _as_projector(q)
    _same_dim(rho, p, q)
    tol = tol or rho.tol
    qm = q.matrix
    den = trace_inner(rho.matrix, qm).real
    if den <= tol.probability_tol:
        raise ConditioningOnNullError(f"{factor}: tr(ρQ) = {den:.3e} is below the conditioning threshold",
                                      value=den, factor=factor)
    num = trace_inner(qm @ rho.matrix @ qm, p.matrix).real
    return ConditionalValue(num / den, num, den)


@dataclass(frozen=True)
class ViolationRecord:
    """Product-rule residual ``Δ`` and the three conditionals it is built from."""

    r: float | None
    delta: float | None
    convention: str
    components: dict = field(default_factory=dict)
    note: str = ""
    index: int | None = None

    def component_values(self):
        return tuple(self.components.get(name) for name in COMPONENT_NAMES[self.convention])


def product_rule_residual(rho, p, q, r, convention: str = B_THEN_A,
                          mix: float | None = None) -> ViolationRecord:
    """``Δ`` for the triple ``(P, Q, R)`` under the chosen factor ordering.

    ``b-then-a``: ``Pr(P∧Q|R) - Pr(P|R)·Pr(Q|P∧R)``;
    ``a-then-b``: ``Pr(P∧Q|R) - Pr(Q|R)·Pr(P|Q∧R)``.

    Raises
    ------
    ConditioningOnNullError
        When a conditioning projector carries no weight; ``factor`` names it.
    """
    if convention not in CONVENTIONS:
        raise InputError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    rho = _as_state(rho)
    p, q, r = _as_projector(p), _as_projector(q), _as_projector(r)
    _same_dim(rho, p, q, r)
    names = COMPONENT_NAMES[convention]
    joint = lueders(rho, meet(p, q), r, factor=names[0]).value
    if convention == B_THEN_A:
        first = lueders(rho, p, r, factor=names[1]).value
        second = lueders(rho, q, meet(p, r), factor=names[2]).value
    else:
        first = lueders(rho, q, r, factor=names[1]).value
        second = lueders(rho, p, meet(q, r), factor=names[2]).value
    return ViolationRecord(mix, joint - first * second, convention,
                           dict(zip(names, (joint, first, second))))


class TwoQubitFamily(NamedTuple):
    P: Projector
    Q: Projector
    R: Projector
    rho: DensityMatrix


UP = ket(1, 0)
RIGHT = ket(1, 1)


def two_qubit_family(r: float) -> TwoQubitFamily:
    """Two-qubit example with ``[P,Q] = [P,R] = 0`` and ``[Q,R] ≠ 0``.

    ``P = |↑⟩⟨↑|⊗1``, ``Q = 1⊗|↑⟩⟨↑|``, ``R = 1⊗|→⟩⟨→|`` and
    ``ρ(r) = (r/4)·1 + (1-r)·|↑↑⟩⟨↑↑|``.
    """
    if not 0.0 <= r <= 1.0:
        raise InputError(f"r must lie in [0, 1], got {r!r}")
    i2 = np.eye(2)
    up, right = outer(UP), outer(RIGHT)
    p = Projector(np.kron(up, i2))
    q = Projector(np.kron(i2, up))
    rr = Projector(np.kron(i2, right))
    rho = DensityMatrix(r / 4 * np.eye(4) + (1 - r) * np.kron(up, up))
    return TwoQubitFamily(p, q, rr, rho)


def reference_closed_form(r: float) -> float:
    """Reference closed form ``((√2-1)/2)(r-1)`` for the two-qubit family, reported for comparison only."""
    return (math.sqrt(2.0) - 1.0) / 2.0 * (r - 1.0)


def two_qubit_delta(r: float, convention: str = B_THEN_A) -> ViolationRecord:
    """``Δ(r)`` for the two-qubit family; degenerate conditioning is returned as a note."""
    fam = two_qubit_family(r)
    try:
        return product_rule_residual(fam.rho, fam.P, fam.Q, fam.R, convention, mix=r)
    except ConditioningOnNullError as exc:
        return ViolationRecord(r, None, convention, {}, note=f"conditioning-on-null: {exc.factor}")


def delta_curve(r_steps: int = 101, convention: str = B_THEN_A) -> list:
    """``Δ(r)`` on ``r_steps`` evenly spaced points of ``[0, 1]``."""
    if r_steps < 2:
        raise InputError("r_steps must be >= 2")
    return [two_qubit_delta(float(r), convention) for r in np.linspace(0.0, 1.0, r_steps)]


def affine_fit_residual(xs, ys) -> float:
    """Max deviation of ``ys`` from their least-squares line in ``xs``."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    design = np.stack([xs, np.ones_like(xs)], axis=1)
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    return float(np.max(np.abs(design @ coef - ys)))


# random instance generators


def random_projector_any_rank(dim: int, rng: np.random.Generator,
                              ranks=None) -> Projector:
    if ranks is None:
        ranks = range(1, dim + 1)
    k = int(rng.choice(list(ranks)))
    return projector_onto_columns(random_unitary(dim, rng)[:, :k])


def random_boolean_triple(dim: int, rng: np.random.Generator):
    """Three projectors from one random Boolean subalgebra (shared eigenbasis)."""
    u = random_unitary(dim, rng)
    n_atoms = int(rng.integers(1, dim + 1))
    cuts = np.sort(rng.choice(np.arange(1, dim), n_atoms - 1, replace=False)) if n_atoms > 1 else []
    blocks = np.split(np.arange(dim), cuts)
    out = []
    for _ in range(3):
        mask = int(rng.integers(0, 1 << n_atoms))
        cols = [c for i, b in enumerate(blocks) if mask >> i & 1 for c in b]
        out.append(projector_onto_columns(u[:, cols]))
    return tuple(out)


def random_orthogonal_pair(dim: int, rng: np.random.Generator):
    u = random_unitary(dim, rng)
    k1 = int(rng.integers(1, dim))
    k2 = int(rng.integers(1, dim - k1 + 1))
    return projector_onto_columns(u[:, :k1]), projector_onto_columns(u[:, k1:k1 + k2])


def random_nested_pair(dim: int, rng: np.random.Generator):
    """``Q ≤ R`` built from nested index sets of a shared random basis."""
    u = random_unitary(dim, rng)
    kr = int(rng.integers(1, dim + 1))
    kq = int(rng.integers(1, kr + 1))
    return projector_onto_columns(u[:, :kq]), projector_onto_columns(u[:, :kr])


def random_renyi_instances(dim: int, count: int, rng: np.random.Generator):
    """``count`` triples with orthogonal ``P, Q`` and ``count`` with nested ``Q ≤ R``."""
    out = []
    for _ in range(count):
        p, q = random_orthogonal_pair(dim, rng)
        out.append((p, q, random_projector_any_rank(dim, rng)))
        q2, r2 = random_nested_pair(dim, rng)
        out.append((random_projector_any_rank(dim, rng), q2, r2))
    return out


def _renyi_instance(report: AxiomReport, rho: DensityMatrix, p, q, r, label, tols, skipped):
    ptol = rho.tol.probability_tol
    for name, x in (("Q", q), ("R", r)):
        if born(rho, x) > ptol:
            report.observe("qone", abs(lueders(rho, x, x).value - 1.0), tols["qone"],
                           ANCHORS["qone"], f"{label}:{name}")
        else:
            report.skip("qone", tols["qone"], ANCHORS["qone"])
            skipped["qone"].append(label)

    pq = classify_pair(p, q)
    if pq.orthogonal and born(rho, r) > ptol:
        lhs = lueders(rho, join(p, q), r).value
        rhs = lueders(rho, p, r).value + lueders(rho, q, r).value
        report.observe("additivity", abs(lhs - rhs), tols["additivity"], ANCHORS["additivity"], label)
    else:
        report.skip("additivity", tols["additivity"], ANCHORS["additivity"])
        skipped["additivity"].append(label)

    qr = classify_pair(q, r)
    if qr.ordered_le and born(rho, r) > ptol and lueders(rho, q, r).value > ptol:
        pmq = meet(p, q)
        lhs = lueders(rho, pmq, q).value
        rhs = lueders(rho, pmq, r).value / lueders(rho, q, r).value
        report.observe("qabc", abs(lhs - rhs), tols["qabc"], ANCHORS["qabc"], label)
    else:
        report.skip("qabc", tols["qabc"], ANCHORS["qabc"])
        skipped["qabc"].append(label)


def _skip_notes(report, skipped, key="skipped_instances"):
    report.notes[key] = {k: v[:20] for k, v in skipped.items() if v}


def quantum_renyi_check(rho, instances, tol=None) -> AxiomReport:
    """Quantum Rényi axioms under the Lüders form for each ``(P, Q, R)`` in ``instances``.

    ``(qone)`` is checked on ``Q`` and ``R``, additivity when ``PQ = 0`` and
    the chain law when ``Q ≤ R``. Instances failing a side condition are
    skipped for that check and listed (first 20) in ``notes``.
    ``tol`` is a float or a dict keyed by ``qone``, ``additivity``, ``qabc``.
    """
    rho = _as_state(rho)
    tols = dict(DEFAULT_QUANTUM_TOLS)
    if isinstance(tol, dict):
        tols.update(tol)
    elif tol is not None:
        tols = {k: float(tol) for k in tols}
    report = AxiomReport("quantum-renyi", config={"dim": rho.dim})
    skipped = {k: [] for k in tols}
    for i, (p, q, r) in enumerate(instances):
        _renyi_instance(report, rho, _as_projector(p), _as_projector(q), _as_projector(r), i, tols, skipped)
        report.instances += 1
    _skip_notes(report, skipped)
    return report


def quantum_renyi_suite(dim: int, trials: int = 1000, seed: int = 0, tols=None) -> AxiomReport:
    """Quantum Rényi axioms on ``2 * trials`` random instances in dimension ``dim``.

    Half the instances have orthogonal ``P, Q`` and half nested ``Q ≤ R``;
    each instance gets its own state with ``purity_mix`` uniform in ``[0, 1]``.
    """
    t = dict(DEFAULT_QUANTUM_TOLS)
    t.update(tols or {})
    report = AxiomReport("quantum-renyi", seed=seed, config={"dim": dim, "trials": trials})
    skipped = {k: [] for k in t}
    rng = np.random.default_rng([seed, dim])
    for i, (p, q, r) in enumerate(random_renyi_instances(dim, trials, rng)):
        rho = random_state(dim, float(rng.uniform()), rng)
        _renyi_instance(report, rho, p, q, r, f"d={dim}:{i}", t, skipped)
        report.instances += 1
    _skip_notes(report, skipped, f"skipped_instances:d={dim}")
    return report


class DeltaScanResult(list):
    """Records sorted by ``|Δ|`` descending, with rejection counters."""

    def __init__(self, records=(), rejected_commuting=0, rejected_null=0, config=None):
        super().__init__(records)
        self.rejected_commuting = rejected_commuting
        self.rejected_null = rejected_null
        self.config = config or {}


def delta_scan(dim: int, trials: int, purity_mix_range=(0.0, 0.0), seed: int = 0,
               commuting: bool = False, convention: str = B_THEN_A) -> DeltaScanResult:
    """Random search for product-rule violations.

    Each trial draws a state with ``purity_mix`` uniform in
    ``purity_mix_range`` and a projector triple: independent random
    projectors (ranks uniform in ``1..dim``), or, with ``commuting=True``,
    subspaces of one shared random basis. Fully commuting triples (in the
    default mode) and triples hitting conditioning-on-null are rejected and
    counted. Trial ``t`` depends only on ``(seed, t)``.
    """
    if dim < 2:
        raise InputError("dim must be >= 2")
    if trials < 1:
        raise InputError("trials must be >= 1")
    lo, hi = purity_mix_range
    records, n_comm, n_null = [], 0, 0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        mix = float(rng.uniform(lo, hi)) if hi > lo else float(lo)
        rho = random_state(dim, mix, rng)
        if commuting:
            u = random_unitary(dim, rng)
            triple = []
            for _ in range(3):
                cols = np.flatnonzero(rng.integers(0, 2, dim))
                triple.append(projector_onto_columns(u[:, cols]))
            p, q, r = triple
        else:
            p, q, r = (random_projector_any_rank(dim, rng) for _ in range(3))
            if all(classify_pair(a, b).commuting for a, b in ((p, q), (p, r), (q, r))):
                n_comm += 1
                continue
        try:
            rec = product_rule_residual(rho, p, q, r, convention, mix=mix)
        except ConditioningOnNullError:
            n_null += 1
            continue
        records.append(ViolationRecord(rec.r, rec.delta, rec.convention, rec.components, index=t))
    records.sort(key=lambda rec: (-abs(rec.delta), rec.index))
    return DeltaScanResult(records, n_comm, n_null,
                           {"dim": dim, "trials": trials, "purity_mix_range": [lo, hi],
                            "seed": seed, "commuting": commuting, "convention": convention})


def commuting_product_rule_check(dim: int, count: int, seed: int = 0, tol: float = 1e-12,
                                 min_trace: float = 1e-6, max_attempts: int | None = None) -> AxiomReport:
    """``Δ = 0`` on ``count`` random triples from Boolean subalgebras.

    Triples whose conditioning traces do not exceed ``min_trace`` are
    redrawn (and counted as skipped).
    """
    report = AxiomReport("commuting-product-rule", seed=seed,
                         config={"dim": dim, "count": count, "min_trace": min_trace})
    max_attempts = max_attempts or 50 * count
    attempt = 0
    while report.instances < count and attempt < max_attempts:
        rng = np.random.default_rng([seed, dim, attempt])
        attempt += 1
        rho = random_state(dim, float(rng.uniform()), rng)
        p, q, r = random_boolean_triple(dim, rng)
        if min(born(rho, r), born(rho, meet(p, r))) <= min_trace:
            report.skip("commuting_product_rule", tol, ANCHORS["commuting_product_rule"])
            continue
        rec = product_rule_residual(rho, p, q, r)
        report.observe("commuting_product_rule", abs(rec.delta), tol,
                       ANCHORS["commuting_product_rule"], f"d={dim}:attempt={attempt - 1}")
        report.instances += 1
    return report


def random_resolution(dim: int, rng: np.random.Generator):
    """Orthogonal resolution of the identity into 2..dim blocks of a random basis."""
    u = random_unitary(dim, rng)
    n_blocks = int(rng.integers(2, dim + 1))
    cuts = np.sort(rng.choice(np.arange(1, dim), n_blocks - 1, replace=False))
    return [projector_onto_columns(u[:, b]) for b in np.split(np.arange(dim), cuts)]


def computational_resolution(dim: int):
    return [Projector(np.diag(np.eye(dim)[i])) for i in range(dim)]


def frame_additivity_check(rho, dim: int | None = None, resolutions: int = 100, seed: int = 0,
                           tol: float = 1e-12, explicit=None) -> AxiomReport:
    """Born probabilities on orthogonal resolutions of the identity.

    Checks ``Σ_i tr(ρP_i) = 1`` and ``tr(ρ(P_i∨P_j)) = tr(ρP_i) + tr(ρP_j)``
    on ``resolutions`` random resolutions (plus any ``explicit`` ones).
    Below dimension 3 the checks still run but the report carries a warning.
    """
    rho = _as_state(rho)
    dim = dim or rho.dim
    if dim != rho.dim:
        raise InputError(f"state has dimension {rho.dim}, expected {dim}")
    report = AxiomReport("frame-additivity", seed=seed,
                         config={"dim": dim, "resolutions": resolutions})
    if dim < 3:
        report.warnings.append(f"dim={dim} < 3: outside the frame-function hypothesis; "
                               "Born form adopted with warning")
    sets = [(f"explicit{i}", list(res)) for i, res in enumerate(explicit or [])]
    sets += [(f"random{k}", random_resolution(dim, np.random.default_rng([seed, k])))
             for k in range(resolutions)]
    for label, res in sets:
        res = [_as_projector(x) for x in res]
        probs = [born(rho, x) for x in res]
        report.observe("frame_sum", abs(math.fsum(probs) - 1.0), tol, ANCHORS["frame_sum"], label)
        for i in range(len(res)):
            for j in range(i + 1, len(res)):
                resid = abs(born(rho, join(res[i], res[j])) - probs[i] - probs[j])
                report.observe("frame_pairwise", resid, tol, ANCHORS["frame_pairwise"], f"{label}:{i},{j}")
        report.instances += 1
    return report


def quantum_suite(dims=(3, 4, 5), trials: int = 1000, seed: int = 0, tols=None,
                  frame_resolutions: int = 100, frame_tol: float = 1e-12,
                  product_tol: float = 1e-12) -> AxiomReport:
    """Quantum Rényi, commuting product rule and frame additivity over ``dims``.

    Every Rényi instance has its own random state (``purity_mix`` uniform in
    ``[0, 1]``); ``trials`` triples of each kind are drawn per dimension.
    """
    dims = [int(d) for d in dims]
    t = dict(DEFAULT_QUANTUM_TOLS)
    t.update(tols or {})
    report = AxiomReport("quantum", seed=seed,
                         config={"dims": dims, "trials": trials, "tolerances": t,
                                 "frame_resolutions": frame_resolutions})
    for d in dims:
        sub = quantum_renyi_suite(d, trials, seed, t)
        report.merge(sub)
        sub = commuting_product_rule_check(d, trials, seed, product_tol)
        sub.instances = 0
        report.merge(sub)
        frng = np.random.default_rng([seed, d, 1])
        sub = frame_additivity_check(random_state(d, float(frng.uniform()), frng), d,
                                     frame_resolutions, seed, frame_tol)
        sub.instances = 0
        report.merge(sub)
    return report

