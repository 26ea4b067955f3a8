"""
Finite classical probability and the Cox plausibility calculus.

Events over ``n`` elementary propositions are ``n``-bit integer masks, so
``A & B``, ``A | B`` and ``full & ~A`` are meet, join and complement. A
conditional probability is held as a ``(2**n, 2**n)`` array ``c`` with
``c[A, B] = Pr(A|B)`` and NaN where ``B`` is outside the conditioning
domain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .errors import ConditioningOnNullError, InputError
from .report import AxiomReport

MAX_PROPOSITIONS = 20
EXHAUSTIVE_PAIRS_MAX_N = 12
EXHAUSTIVE_TRIPLES_MAX_N = 8

ANCHORS = {
    "kolmogorov.nonnegative": "Pr(A) ≥ 0",
    "kolmogorov.bounded": "a map from F to [0,1]",
    "kolmogorov.null": "Pr(∅) = 0",
    "kolmogorov.omega": "Pr(Ω) = 1",
    "kolmogorov.additivity": "Pr(A∪B) = Pr(A) + Pr(B) if A∩B = ∅",
    "renyi.nonnegative": "Pr(A|B) ≥ 0",
    "renyi.one": "Pr(B|B) = 1",
    "renyi.additivity": "Pr(A∪B|C) = Pr(A|C) + Pr(B|C) for A∩B = ∅",
    "renyi.abc": "Pr(A|B) = Pr(A∩B|C)/Pr(B|C) for B ⊂ C, Pr(B|C) > 0",
    "cox.product": "w(A∧B|C) = w(B|C) w(A|B∧C)",
    "cox.associativity": "F(F(x,y),z) = F(x,F(y,z))",
    "cox.negation": "w(A|B) + w(¬A|B) = 1",
    "cox.involution": "S(x) = (1-x^m)^(1/m), S(S(x)) = x",
    "cox.sum_rule": "w(A∨B|C) = w(A|C) + w(B|C) - w(A∧B|C)",
    "cox.identity": "w(Ω|C) = 1, w(∅|C) = 0",
}


@dataclass(frozen=True)
class FiniteEventSpace:
    """``n`` elementary propositions; events are masks in ``[0, 2**n)``."""

    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_PROPOSITIONS:
            raise InputError(f"n must lie in [1, {MAX_PROPOSITIONS}], got {self.n}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def size(self) -> int:
        return 1 << self.n

    def events(self) -> np.ndarray:
        return np.arange(self.size)

    def complement(self, a):
        return self.full & ~a

    def event(self, *indices) -> int:
        """Mask from zero-based elementary indices."""
        mask = 0
        for i in indices:
            if not 0 <= i < self.n:
                raise InputError(f"elementary index {i} out of range")
            mask |= 1 << i
        return mask

    def is_sigma_algebra(self, family) -> bool:
        """Whether ``family`` contains ∅ and is closed under complement and intersection."""
        fam = {int(a) for a in family}
        if 0 not in fam:
            return False
        for a in fam:
            if self.complement(a) not in fam:
                return False
            for b in fam:
                if a & b not in fam:
                    return False
        return True


class ProbabilityTable:
    """Probability weights on the elementary propositions of a finite space.

    Parameters
    ----------
    weights : sequence of float or mapping label -> float
        Non-negative, summing to 1 within 1e-12.
    labels : sequence of str, optional
    """

    def __init__(self, weights, labels=None):
        if isinstance(weights, dict):
            labels = list(weights.keys())
            weights = list(weights.values())
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.size == 0:
            raise InputError("a probability table needs at least one proposition")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InputError("weights must be finite and non-negative")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise InputError(f"weights sum to {math.fsum(w)!r}, not 1")
        self.space = FiniteEventSpace(w.size)
        self.weights = w
        self.weights.setflags(write=False)
        if labels is None:
            labels = [f"w{i + 1}" for i in range(w.size)]
        if len(labels) != w.size:
            raise InputError("labels and weights differ in length")
        self.labels = tuple(str(x) for x in labels)
        self._probs = None

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def probs(self) -> np.ndarray:
        """``Pr(A)`` for every mask ``A``."""
        if self._probs is None:
            p = np.zeros(self.space.size)
            for i, wi in enumerate(self.weights):
                half = 1 << i
                p[half:2 * half] = p[:half] + wi
            p.setflags(write=False)
            self._probs = p
        return self._probs

    def prob(self, a) -> float:
        return self.probs[a]

    def event(self, *labels) -> int:
        return self.space.event(*(self.labels.index(x) for x in labels))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "ProbabilityTable":
        w = rng.dirichlet(np.ones(n))
        w = w / math.fsum(w)
        return cls(w)

    @classmethod
    def from_json(cls, text: str) -> "ProbabilityTable":
        doc = json.loads(text)
        try:
            return cls(doc["weights"], doc.get("labels"))
        except KeyError as exc:
            raise InputError(f"probability table is missing {exc}") from exc

    def to_json(self) -> str:
        return json.dumps({"labels": list(self.labels), "weights": [float(x) for x in self.weights]})


class FrequencyTable:
    """Outcome counts of ``N`` repeated trials."""

    def __init__(self, counts: dict):
        if not counts:
            raise InputError("empty frequency table")
        if any(int(v) != v or v < 0 for v in counts.values()):
            raise InputError("counts must be non-negative integers")
        self.counts = {str(k): int(v) for k, v in counts.items()}
        self.trials = sum(self.counts.values())
        if self.trials < 1:
            raise InputError("a frequency table needs at least one trial")

    @classmethod
    def from_outcomes(cls, outcomes, labels=None) -> "FrequencyTable":
        counts = {str(x): 0 for x in (labels or ())}
        for o in outcomes:
            counts[str(o)] = counts.get(str(o), 0) + 1
        return cls(counts)

    def relative_frequencies(self) -> dict:
        return {k: v / self.trials for k, v in self.counts.items()}

    def to_table(self) -> ProbabilityTable:
        labels = list(self.counts)
        w = np.array([self.counts[k] for k in labels], dtype=np.float64) / self.trials
        return ProbabilityTable(w, labels)


def conditional_ratio(table: ProbabilityTable, a: int, b: int) -> float:
    """``Pr(A|B) = Pr(A∩B)/Pr(B)``.

    Raises
    ------
    ConditioningOnNullError
        If ``Pr(B) = 0``.
    """
    pb = table.prob(b)
    if pb <= 0:
        raise ConditioningOnNullError(f"Pr(B) = 0 for event mask {b}", value=float(pb))
    return float(table.prob(a & b) / pb)


def ratio_conditional(table: ProbabilityTable) -> np.ndarray:
    """Array ``c[A, B] = Pr(A∩B)/Pr(B)``; columns with ``Pr(B) = 0`` are NaN."""
    p = table.probs
    ev = table.space.events()
    num = p[ev[:, None] & ev[None, :]]
    with np.errstate(divide="ignore", invalid="ignore"):
        c = num / p[None, :]
    c[:, p <= 0] = np.nan
    return c


def _disjoint_pairs(n: int):
    """All ``(A, B)`` with ``A ∩ B = ∅`` (``3**n`` pairs)."""
    ev = np.arange(1 << n)
    a_parts, b_parts = [], []
    for a in ev:
        b = ev[(ev & a) == 0]
        a_parts.append(np.full(b.size, a))
        b_parts.append(b)
    return np.concatenate(a_parts), np.concatenate(b_parts)


def _sample_disjoint_pairs(n: int, budget: int, rng):
    a = rng.integers(0, 1 << n, budget)
    b = rng.integers(0, 1 << n, budget) & ~a
    return a, b


def kolmogorov_check(table: ProbabilityTable, tol: float = 1e-12, sample_budget: int = 20000,
                     seed: int = 0) -> AxiomReport:
    """Non-negativity, normalization and finite additivity of ``Pr``.

    Additivity is checked on all disjoint pairs for ``n <= 12`` and on
    ``sample_budget`` random disjoint pairs beyond.
    """
    report = AxiomReport("kolmogorov", seed=seed, config={"n": table.n})
    p = table.probs
    full = table.space.full

    def obs(cid, r, label=None):
        report.observe(cid, r, tol, ANCHORS[cid], label)

    obs("kolmogorov.nonnegative", max(0.0, -float(p.min())))
    obs("kolmogorov.bounded", max(0.0, float(p.max()) - 1.0))
    obs("kolmogorov.null", abs(p[0]))
    obs("kolmogorov.omega", abs(p[full] - 1.0))
    if table.n <= EXHAUSTIVE_PAIRS_MAX_N:
        a, b = _disjoint_pairs(table.n)
    else:
        a, b = _sample_disjoint_pairs(table.n, sample_budget, np.random.default_rng(seed))
        report.config["sampled"] = True
    r = np.abs(p[a | b] - p[a] - p[b])
    i = int(np.argmax(r))
    rec = report.check("kolmogorov.additivity", tol, ANCHORS["kolmogorov.additivity"])
    rec.observe(r[i], f"({a[i]},{b[i]})")
    rec.instances += r.size - 1
    report.instances = 1
    return report


def _observe_array(report, cid, residuals, tol, labels=None):
    rec = report.check(cid, tol, ANCHORS[cid])
    residuals = np.asarray(residuals, dtype=np.float64).ravel()
    if residuals.size == 0:
        return rec
    i = int(np.argmax(np.where(np.isnan(residuals), np.inf, residuals)))
    prev = rec.max_residual if rec.instances else -np.inf
    rec.instances += residuals.size
    worst = float(residuals[i]) if not np.isnan(residuals[i]) else np.inf
    if worst > prev:
        rec.max_residual = worst
        rec.worst = None if labels is None else labels(i)
    return rec


def renyi_check(conditional, n: int | None = None, tol: float = 1e-12,
                sample_budget: int = 20000, seed: int = 0) -> AxiomReport:
    """Rényi's axioms for a conditional probability given as ``c[A, B]``.

    ``conditional`` may be a :class:`ProbabilityTable` (its ratio form is
    checked), a ``(2**n, 2**n)`` array with NaN columns outside the
    conditioning domain, a mapping ``(A, B) -> value`` or a callable.
    The chain law (abc) is enumerated over every ``A`` and nested
    ``B ⊂ C`` for ``n <= 8``; larger spaces are sampled. Nested pairs with
    ``Pr(B|C) = 0`` are counted as skipped.
    """
    if isinstance(conditional, ProbabilityTable):
        n = conditional.n
        c = ratio_conditional(conditional)
    else:
        if n is None:
            raise InputError("n is required unless a ProbabilityTable is given")
        size = 1 << n
        if callable(conditional) and not isinstance(conditional, np.ndarray):
            c = np.array([[conditional(a, b) for b in range(size)] for a in range(size)], dtype=float)
        elif isinstance(conditional, dict):
            c = np.full((size, size), np.nan)
            for (a, b), v in conditional.items():
                c[a, b] = v
        else:
            c = np.asarray(conditional, dtype=np.float64)
        if c.shape != (size, size):
            raise InputError(f"conditional must have shape {(size, size)}")
    full = (1 << n) - 1
    rng = np.random.default_rng(seed)
    report = AxiomReport("renyi", seed=seed, config={"n": n})
    domain = np.flatnonzero(~np.all(np.isnan(c), axis=0))
    if domain.size == 0:
        raise InputError("conditioning domain is empty")
    report.instances = int(domain.size)

    cd = c[:, domain]
    _observe_array(report, "renyi.nonnegative", np.maximum(0.0, -np.nan_to_num(cd, nan=0.0)) + 0.0, tol)
    _observe_array(report, "renyi.one", np.abs(c[domain, domain] - 1.0), tol,
                   lambda i: f"B={domain[i]}")

    exhaustive = n <= EXHAUSTIVE_TRIPLES_MAX_N
    if exhaustive:
        a, b = _disjoint_pairs(n)
    else:
        a, b = _sample_disjoint_pairs(n, sample_budget, rng)
        report.config["sampled"] = True
    if exhaustive:
        add = np.abs(c[a | b][:, domain] - c[a][:, domain] - c[b][:, domain])
        _observe_array(report, "renyi.additivity", add, tol,
                       lambda i: f"A={a[i // domain.size]},B={b[i // domain.size]},C={domain[i % domain.size]}")
    else:
        cc = domain[rng.integers(0, domain.size, a.size)]
        add = np.abs(c[a | b, cc] - c[a, cc] - c[b, cc])
        _observe_array(report, "renyi.additivity", add, tol)

    # nested pairs B ⊂ C, both in the domain: C = B | D with D disjoint from B
    in_dom = np.zeros(full + 1, dtype=bool)
    in_dom[domain] = True
    if exhaustive:
        x, y = _disjoint_pairs(n)
        bb, cc = x, x | y
    else:
        x, y = _sample_disjoint_pairs(n, sample_budget, rng)
        bb, cc = x, x | y
    keep = in_dom[bb] & in_dom[cc]
    bb, cc = bb[keep], cc[keep]
    pbc = c[bb, cc]
    positive = pbc > 0
    report.skip("renyi.abc", tol, ANCHORS["renyi.abc"], int(np.count_nonzero(~positive)))
    bb, cc, pbc = bb[positive], cc[positive], pbc[positive]
    if exhaustive:
        aa = np.arange(full + 1)[:, None]
        resid = np.abs(c[aa, bb[None, :]] - c[aa & bb[None, :], cc[None, :]] / pbc[None, :])
        _observe_array(report, "renyi.abc", resid, tol,
                       lambda i: f"A={i // bb.size},B={bb[i % bb.size]},C={cc[i % bb.size]}")
    else:
        aa = rng.integers(0, full + 1, bb.size)
        resid = np.abs(c[aa, bb] - c[aa & bb, cc] / pbc)
        _observe_array(report, "renyi.abc", resid, tol)
    return report


@dataclass(frozen=True)
class PlausibilityCalculus:
    """Regraduation ``w`` with its product solution and negation family.

    ``F(x, y) = w⁻¹(w(x)·w(y))`` combines plausibilities of a conjunction and
    ``S(x) = (1 - x**m)**(1/m)`` maps a plausibility to that of its negation.
    When ``w_inv`` is omitted the inverse is found by bisection to machine
    precision.
    """

    w: Callable
    w_inv: Callable | None = None
    m: float = 1.0
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m > 0):
            raise InputError(f"m must be positive and finite, got {self.m!r}")
        lo, hi = self.domain
        if not lo < hi:
            raise InputError("empty regraduation domain")
        grid = np.linspace(lo, hi, 1025)
        vals = np.asarray(self.w(grid), dtype=np.float64)
        if np.any(np.diff(vals) <= 0):
            raise InputError("w must be strictly increasing on its domain")
        if vals[0] < 0 or vals[-1] > 1:
            raise InputError("w must map into [0, 1]")

    @classmethod
    def identity(cls, m: float = 1.0) -> "PlausibilityCalculus":
        return cls(lambda x: np.asarray(x, dtype=np.float64), lambda y: np.asarray(y, dtype=np.float64), m)

    @classmethod
    def power(cls, k: float, m: float = 1.0) -> "PlausibilityCalculus":
        return cls(lambda x: np.power(x, k), lambda y: np.power(y, 1.0 / k), m)

    @classmethod
    def from_grid(cls, xs, ws, m: float = 1.0) -> "PlausibilityCalculus":
        """Piecewise-linear ``w`` through the points ``(xs, ws)``."""
        xs = np.asarray(xs, dtype=np.float64)
        ws = np.asarray(ws, dtype=np.float64)
        return cls(lambda x: np.interp(x, xs, ws), lambda y: np.interp(y, ws, xs), m,
                   (float(xs[0]), float(xs[-1])))

    def in_domain(self, x) -> bool:
        lo, hi = self.domain
        x = np.asarray(x)
        return bool(np.all((x >= lo) & (x <= hi)))

    def inverse(self, y):
        if self.w_inv is not None:
            return self.w_inv(y)
        y = np.asarray(y, dtype=np.float64)
        lo = np.full(y.shape, self.domain[0])
        hi = np.full(y.shape, self.domain[1])
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.w(mid)) < y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all((hi - lo) <= np.spacing(np.maximum(np.abs(hi), 1e-300))):
                break
        return 0.5 * (lo + hi)

    def combine(self, x, y):
        """``F(x, y)``."""
        return self.inverse(np.asarray(self.w(x)) * np.asarray(self.w(y)))

    def negation(self, x):
        """``S(x)``."""
        return negation(x, self.m)


def negation(x, m: float = 1.0):
    x = np.asarray(x, dtype=np.float64)
    return np.power(np.clip(1.0 - np.power(x, m), 0.0, None), 1.0 / m)


def associativity_residual(calculus, x, y, z) -> float:
    """``|F(F(x,y),z) - F(x,F(y,z))|``.

    ``calculus`` is a :class:`PlausibilityCalculus` or any binary callable
    standing in for ``F``; only the former has a domain check.
    """
    if isinstance(calculus, PlausibilityCalculus):
        if not calculus.in_domain([x, y, z]):
            raise InputError(f"arguments {(x, y, z)} outside the domain {calculus.domain}")
        f = calculus.combine
    else:
        f = calculus
    return float(np.max(np.abs(np.asarray(f(f(x, y), z)) - np.asarray(f(x, f(y, z))))))


def functional_grid(points: int = 64, eps: float = 1e-6) -> np.ndarray:
    return np.linspace(eps, 1.0 - eps, points)


def associativity_grid_residual(calculus, points: int = 64, eps: float = 1e-6) -> float:
    """Largest associativity residual over a ``points**3`` grid on ``[eps, 1-eps]``."""
    g = functional_grid(points, eps)
    x, y, z = np.meshgrid(g, g, g, indexing="ij")
    return associativity_residual(calculus, x, y, z)


def negation_involution_residual(m: float, x, digits: int | None = None) -> float:
    """``|S(S(x)) - x|`` for ``S(x) = (1 - x**m)**(1/m)``.

    In double precision the round trip is ill-conditioned where ``S(x)``
    rounds to 1 (error grows like ``eps * x**(1-m)``); pass ``digits`` to
    evaluate with that many significant decimal digits instead.
    """
    if not (math.isfinite(m) and m > 0):
        raise InputError(f"m must be positive and finite, got {m!r}")
    x = np.asarray(x, dtype=np.float64)
    if np.any((x < 0) | (x > 1)):
        raise InputError("x must lie in [0, 1]")
    if digits is None:
        return float(np.max(np.abs(negation(negation(x, m), m) - x)))
    with mpmath.workdps(digits):
        mm = mpmath.mpf(m)

        def s(v):
            return (1 - v ** mm) ** (1 / mm)

        return float(max(abs(s(s(mpmath.mpf(float(v)))) - mpmath.mpf(float(v))) for v in x.ravel()))


def negation_table_residual(table: ProbabilityTable, a: int, b: int) -> float:
    """``|w(A|B) + w(¬A|B) - 1|`` with ``w`` the ratio conditional (``m = 1``)."""
    return abs(conditional_ratio(table, a, b)
               + conditional_ratio(table, table.space.complement(a), b) - 1.0)


def cox_product_residual(calculus: PlausibilityCalculus | None, table: ProbabilityTable,
                         a: int, b: int, c: int) -> float:
    """``|w(A∧B|C) - w(B|C)·w(A|B∧C)|`` from the table's ratio conditionals.

    Each probability is mapped to a raw plausibility through ``w⁻¹`` and
    back through ``w`` before the product rule is evaluated.
    """
    if calculus is None:
        calculus = PlausibilityCalculus.identity()

    def wv(x, y):
        return float(calculus.w(calculus.inverse(conditional_ratio(table, x, y))))

    return abs(wv(a & b, c) - wv(b, c) * wv(a, b & c))


SUM_RULE_STEPS = (
    "w(A∨B|C)",
    "1 - w(¬(A∨B)|C)",
    "1 - w(¬A∧¬B|C)",
    "1 - w(¬A|C) w(¬B|¬A∧C)",
    "1 - w(¬A|C)[1 - w(B|¬A∧C)]",
    "w(A|C) + w(¬A|C) w(B|¬A∧C)",
    "w(A|C) + w(¬A∧B|C)",
    "w(A|C) + w(B|C) w(¬A|B∧C)",
    "w(A|C) + w(B|C)[1 - w(A|B∧C)]",
    "w(A|C) + w(B|C) - w(A∧B|C)",
)


def _sum_rule_chain(c, full, a, b, cc):
    na = full & ~a
    nac = na & cc
    bc = b & cc
    return (
        c[a | b, cc],
        1.0 - c[full & ~(a | b), cc],
        1.0 - c[na & (full & ~b), cc],
        1.0 - c[na, cc] * c[full & ~b, nac],
        1.0 - c[na, cc] * (1.0 - c[b, nac]),
        c[a, cc] + c[na, cc] * c[b, nac],
        c[a, cc] + c[na & b, cc],
        c[a, cc] + c[b, cc] * c[na, bc],
        c[a, cc] + c[b, cc] * (1.0 - c[a, bc]),
        c[a, cc] + c[b, cc] - c[a & b, cc],
    )


def sum_rule_steps(table: ProbabilityTable, a: int, b: int, c: int) -> list:
    """Values of each line of the sum-rule derivation, as ``(expression, value)`` pairs.

    Raises
    ------
    ConditioningOnNullError
        If ``C``, ``¬A∧C`` or ``B∧C`` has zero probability; the message
        names the first step that conditions on it.
    """
    full = table.space.full
    p = table.probs
    for event, step in ((c, 0), (full & ~a & c, 3), (b & c, 7)):
        if p[event] <= 0:
            raise ConditioningOnNullError(
                f"step {step + 1} ({SUM_RULE_STEPS[step]}) conditions on an event of probability 0",
                value=float(p[event]), factor=SUM_RULE_STEPS[step])
    cond = ratio_conditional(table)
    return [(expr, float(v)) for expr, v in zip(SUM_RULE_STEPS, _sum_rule_chain(cond, full, a, b, c))]


def sum_rule_residual(table: ProbabilityTable, a: int, b: int, c: int) -> float:
    """``|w(A∨B|C) - w(A|C) - w(B|C) + w(A∧B|C)|``; see :func:`sum_rule_steps`."""
    steps = sum_rule_steps(table, a, b, c)
    return abs(steps[0][1] - steps[-1][1])


def _triples(n, budget, rng):
    size = 1 << n
    if n <= 6:
        a, b, c = np.meshgrid(np.arange(size), np.arange(size), np.arange(size), indexing="ij")
        return a.ravel(), b.ravel(), c.ravel()
    return rng.integers(0, size, budget), rng.integers(0, size, budget), rng.integers(0, size, budget)


def calculus_check(table: ProbabilityTable, tol: float = 1e-12, sample_budget: int = 20000,
                   seed: int = 0) -> AxiomReport:
    """Product rule, negation (m=1), identity laws and sum rule on one table.

    Triples are enumerated for ``n <= 6`` and sampled beyond. Triples whose
    conditioning events have zero probability are counted as skipped.
    """
    rng = np.random.default_rng(seed)
    report = AxiomReport("cox-calculus", seed=seed, config={"n": table.n})
    p = table.probs
    full = table.space.full
    c = ratio_conditional(table)
    a, b, cc = _triples(table.n, sample_budget, rng)
    report.instances = int(a.size)

    ok = (p[cc] > 0) & (p[b & cc] > 0)
    report.skip("cox.product", tol, ANCHORS["cox.product"], int(np.count_nonzero(~ok)))
    ap, bp, cp = a[ok], b[ok], cc[ok]
    _observe_array(report, "cox.product", np.abs(c[ap & bp, cp] - c[bp, cp] * c[ap, bp & cp]), tol)

    dom = np.flatnonzero(p > 0)
    ev = np.arange(full + 1)[:, None]
    _observe_array(report, "cox.negation", np.abs(c[ev, dom[None, :]] + c[full & ~ev, dom[None, :]] - 1.0), tol)
    _observe_array(report, "cox.identity",
                   np.concatenate([np.abs(c[full, dom] - 1.0), np.abs(c[0, dom])]), tol)

    ok = (p[cc] > 0) & (p[full & ~a & cc] > 0) & (p[b & cc] > 0)
    report.skip("cox.sum_rule", tol, ANCHORS["cox.sum_rule"], int(np.count_nonzero(~ok)))
    steps = _sum_rule_chain(c, full, a[ok], b[ok], cc[ok])
    resid = np.max(np.abs(np.array(steps[1:]) - steps[0]), axis=0) if ok.any() else []
    _observe_array(report, "cox.sum_rule", resid, tol)
    return report


def functional_check(tol: float = 1e-12, ms=(0.5, 1.0, 2.0, 5.0), points: int = 64,
                     eps: float = 1e-6, digits: int = 50) -> AxiomReport:
    """Associativity of ``F`` for canonical regraduations and involution of ``S``.

    The involution is evaluated with ``digits`` significant digits; see
    :func:`negation_involution_residual`.
    """
    report = AxiomReport("cox-functional", config={"points": points, "eps": eps, "m": list(ms), "digits": digits})
    for name, cal in (("identity", PlausibilityCalculus.identity()),
                      ("square", PlausibilityCalculus.power(2.0))):
        report.observe("cox.associativity", associativity_grid_residual(cal, points, eps), tol,
                       ANCHORS["cox.associativity"], name)
    g = functional_grid(points, eps)
    for m in ms:
        report.observe("cox.involution", negation_involution_residual(m, g, digits), tol,
                       ANCHORS["cox.involution"], f"m={m}")
    report.instances = 2 + len(ms)
    return report


def classical_suite(tables: int = 100, n_values=range(2, 9), seed: int = 0,
                    tol: float = 1e-12, sample_budget: int = 20000) -> AxiomReport:
    """Kolmogorov, Rényi and Cox-calculus checks over random tables."""
    n_values = list(n_values)
    rng = np.random.default_rng(seed)
    report = AxiomReport("classical", seed=seed,
                         config={"tables": tables, "n_values": n_values, "tol": tol,
                                 "sample_budget": sample_budget})
    for t in range(tables):
        n = int(rng.choice(n_values))
        table = ProbabilityTable.random(n, np.random.default_rng([seed, t]))
        for sub in (kolmogorov_check(table, tol, sample_budget, seed),
                    renyi_check(table, tol=tol, sample_budget=sample_budget, seed=seed),
                    calculus_check(table, tol, sample_budget, seed)):
            sub.instances = 0
            report.merge(sub)
        report.instances += 1
    fn = functional_check(tol)
    fn.instances = 0
    report.merge(fn)
    return report
