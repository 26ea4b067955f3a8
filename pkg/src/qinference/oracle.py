"""
Monte Carlo sequential-measurement oracle.

Each trial samples an eigenvector of ρ with probability equal to its
eigenvalue, measures the conditioning projector (collapsing and
renormalizing on success) and then measures the target. Frequencies over
accepted trials estimate Born and Lüders probabilities without using the
trace formulas.

Randomness is counter-based: trials are grouped in blocks of
``CHUNK`` and block ``k`` draws from ``Philox(key=(seed, k))``, so every
trial is fixed by ``(seed, index)`` regardless of execution order.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InputError, OracleStarvationError
from .lattice import meet
from .linalg import DensityMatrix, Projector, identity
from .quantum import B_THEN_A, COMPONENT_NAMES, CONVENTIONS, _as_projector, _as_state

CHUNK = 1 << 16


@dataclass(frozen=True)
class MeasurementRun:
    seed: int
    trials: int
    accepted: int
    hits: int
    estimate: float
    stderr: float

    @property
    def acceptance(self) -> float:
        return self.accepted / self.trials

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _eigen_ensemble(rho: DensityMatrix):
    evals, evecs = np.linalg.eigh(rho.matrix)
    w = np.clip(evals, 0.0, None)
    return w / w.sum(), evecs


def _branch_probabilities(rho: DensityMatrix, condition: Projector, target: Projector):
    """Per-eigenvector acceptance and post-collapse hit probabilities."""
    weights, vecs = _eigen_ensemble(rho)
    after_q = condition.matrix @ vecs
    accept = np.sum(np.abs(after_q) ** 2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        collapsed = after_q / np.sqrt(accept)
    hit = np.sum(np.abs(target.matrix @ collapsed) ** 2, axis=0)
    hit = np.where(accept > 0, hit, 0.0)
    # exact 0/1 branches must stay exact so P = 1 gives hits == accepted
    for arr in (accept, hit):
        arr[np.abs(arr - 1.0) < 1e-13] = 1.0
        arr[np.abs(arr) < 1e-15] = 0.0
    return weights, np.clip(accept, 0.0, 1.0), np.clip(hit, 0.0, 1.0)


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise InputError("seed must be a non-negative 64-bit integer")
    return seed


def _counts(weights, accept, hit, n, seed):
    cdf = np.cumsum(weights)
    cdf[-1] = 1.0
    accepted = hits = 0
    for k, start in enumerate(range(0, n, CHUNK)):
        size = min(CHUNK, n - start)
        gen = np.random.Generator(np.random.Philox(key=np.array([seed, k], dtype=np.uint64)))
        u = gen.random((size, 3))
        branch = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), len(cdf) - 1)
        ok = u[:, 1] < accept[branch]
        accepted += int(np.count_nonzero(ok))
        hits += int(np.count_nonzero(ok & (u[:, 2] < hit[branch])))
    return accepted, hits


def _run(rho, condition, target, n, seed) -> MeasurementRun:
    if n < 1:
        raise InputError("N must be >= 1")
    seed = _check_seed(seed)
    rho = _as_state(rho)
    condition, target = _as_projector(condition), _as_projector(target)
    accepted, hits = _counts(*_branch_probabilities(rho, condition, target), n, seed)
    if accepted == 0:
        raise OracleStarvationError(f"no trial out of {n} passed the conditioning measurement; "
                                    "increase N")
    est = hits / accepted
    return MeasurementRun(seed, n, accepted, hits, est, math.sqrt(est * (1.0 - est) / accepted))


def sample_proposition(rho, p, n: int, seed: int) -> MeasurementRun:
    """Frequency estimate of ``tr(ρP)`` from ``n`` single measurements."""
    rho = _as_state(rho)
    return _run(rho, identity(rho.dim), p, n, seed)


def sample_sequential(rho, q, p, n: int, seed: int) -> MeasurementRun:
    """Measure ``Q``, keep successes, then measure ``P`` on the collapsed state.

    ``estimate`` approaches ``Pr(P|Q)`` and ``acceptance`` approaches
    ``tr(ρQ)``.

    Raises
    ------
    OracleStarvationError
        If no trial passes the ``Q`` measurement.
    """
    return _run(rho, q, p, n, seed)


def derived_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([_check_seed(seed), index]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class DeltaEstimate:
    value: float
    stderr: float
    convention: str
    runs: dict

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "convention": self.convention,
                "runs": {k: v.to_dict() for k, v in self.runs.items()}}


def delta_oracle(rho, p, q, r, convention: str = B_THEN_A, n: int = 10 ** 6,
                 seed: int = 0) -> DeltaEstimate:
    """``Δ`` assembled from three independent sequential-sampling runs.

    The standard error is propagated to first order from the three runs.
    """
    if convention not in CONVENTIONS:
        raise InputError(f"unknown convention {convention!r}")
    rho = _as_state(rho)
    p, q, r = _as_projector(p), _as_projector(q), _as_projector(r)
    names = COMPONENT_NAMES[convention]
    if convention == B_THEN_A:
        plan = ((meet(p, q), r), (p, r), (q, meet(p, r)))
    else:
        plan = ((meet(p, q), r), (q, r), (p, meet(q, r)))
    runs = {name: sample_sequential(rho, cond, target, n, derived_seed(seed, i))
            for i, (name, (target, cond)) in enumerate(zip(names, plan))}
    j, f, s = (runs[name] for name in names)
    value = j.estimate - f.estimate * s.estimate
    stderr = math.sqrt(j.stderr ** 2 + (s.estimate * f.stderr) ** 2 + (f.estimate * s.stderr) ** 2)
    return DeltaEstimate(value, stderr, convention, runs)

