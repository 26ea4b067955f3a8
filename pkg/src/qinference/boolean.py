"""
Boolean subalgebras generated by commuting projectors.

An algebra is stored through its atoms, the minimal nonzero projectors.
Elements are subset-sums of atoms indexed by a bitmask: bit ``i`` set means
atom ``i`` is included. Complement, meet and join then act on masks as
``~``, ``&`` and ``|``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NonCommutingError
from .lattice import commutator_norm
from .linalg import (
    DEFAULT_TOL,
    Projector,
    ToleranceProfile,
    hermitian_part,
    max_abs,
)
from .report import AxiomReport


def _check_commuting(generators, tol: float):
    for (i, a), (j, b) in itertools.combinations(enumerate(generators), 2):
        norm = commutator_norm(a, b)
        if norm > tol:
            raise NonCommutingError(
                f"generators {i} and {j} do not commute (commutator norm {norm:.3e})",
                pair=(i, j), norm=norm,
            )


def _atom_key(atom: Projector):
    diag = np.round(np.real(np.diag(atom.matrix)), 12)
    return (-atom.rank, tuple(-diag))


def common_atoms(generators, tol: ToleranceProfile = DEFAULT_TOL, dim: int | None = None):
    """Minimal projectors of the Boolean algebra generated by ``generators``.

    These are the nonzero products ``Π_i P_i^{s_i}`` over sign patterns
    ``s``, where ``P^1 = P`` and ``P^0 = 1 - P``. They are pairwise
    orthogonal and sum to the identity.

    Raises
    ------
    NonCommutingError
        If two generators fail to commute within ``tol.validation_tol``.
    """
    generators = list(generators)
    if not generators and dim is None:
        raise InputError("dim is required when there are no generators")
    if dim is None:
        dim = generators[0].dim
    if any(g.dim != dim for g in generators):
        raise InputError("generators have mismatched dimensions")
    _check_commuting(generators, tol.validation_tol)

    ident = np.eye(dim, dtype=np.complex128)
    current = [ident]
    # refining atom by atom visits exactly the nonzero sign-pattern products
    for g in generators:
        gm = g.matrix
        refined = []
        for a in current:
            for part in (a @ gm, a @ (ident - gm)):
                if np.trace(part).real > tol.eigen_gap_tol:
                    refined.append(hermitian_part(part))
        current = refined
    atoms = [Projector(a, tol) for a in current]
    atoms.sort(key=_atom_key)
    return atoms


@dataclass(frozen=True)
class BooleanSubalgebra:
    """Commuting projector algebra represented by its atoms."""

    dim: int
    atoms: tuple
    generator_labels: tuple = ()
    tol: ToleranceProfile = DEFAULT_TOL

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_elements(self) -> int:
        return 1 << len(self.atoms)

    @property
    def full_mask(self) -> int:
        return self.n_elements - 1

    def element(self, mask: int) -> np.ndarray:
        """Subset-sum of the atoms selected by ``mask``."""
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for i, atom in enumerate(self.atoms):
            if mask >> i & 1:
                out = out + atom.matrix
        return out

    def element_stack(self) -> np.ndarray:
        """All elements, shape ``(2**k, dim, dim)``, indexed by mask."""
        k = self.n_atoms
        a = np.array([atom.matrix for atom in self.atoms]).reshape(k, -1) if k else np.zeros((0, self.dim ** 2))
        bits = (np.arange(1 << k)[:, None] >> np.arange(k)[None, :]) & 1
        return (bits.astype(np.complex128) @ a).reshape(-1, self.dim, self.dim)

    def elements(self):
        return [Projector(hermitian_part(m), self.tol) for m in self.element_stack()]

    def mask_of(self, p) -> int | None:
        """Mask whose subset-sum reproduces ``p``, or ``None`` if ``p`` is not an element."""
        m = np.asarray(p)
        mask = 0
        for i, atom in enumerate(self.atoms):
            a = atom.matrix
            # atom lies inside range(p) iff p·a = a
            if max_abs(m @ a - a) <= self.tol.validation_tol:
                mask |= 1 << i
        if max_abs(self.element(mask) - m) <= self.tol.validation_tol:
            return mask
        return None

    def contains(self, p) -> bool:
        return self.mask_of(p) is not None

    def complement_mask(self, mask: int) -> int:
        return self.full_mask & ~mask

    def to_json(self) -> str:
        from .io import matrix_entry

        labels = list(self.generator_labels)
        doc = {
            "dim": self.dim,
            "atoms": [matrix_entry(f"atom{i}", a.matrix) for i, a in enumerate(self.atoms)],
            "generator_labels": labels,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str, tol: ToleranceProfile = DEFAULT_TOL) -> "BooleanSubalgebra":
        from .io import parse_matrix_entry

        doc = json.loads(text)
        dim = int(doc["dim"])
        atoms = tuple(Projector(parse_matrix_entry(e, dim)[1], tol) for e in doc["atoms"])
        return cls(dim, atoms, tuple(doc.get("generator_labels", [])), tol)


def boolean_closure(generators, tol: ToleranceProfile = DEFAULT_TOL, labels=None,
                    dim: int | None = None) -> BooleanSubalgebra:
    """Smallest Boolean subalgebra containing the commuting ``generators``.

    Its elements (``2**k`` subset-sums of ``k`` atoms) include 0, the
    identity and every generator.
    """
    generators = list(generators)
    atoms = common_atoms(generators, tol, dim)
    d = atoms[0].dim
    return BooleanSubalgebra(d, tuple(atoms), tuple(labels or ()), tol)


IDENTITY_ANCHORS = {
    "closure": "P,Q ∈ C ⇒ ¬P ∈ C, P∧Q ∈ C",
    "idempotence": "A∧A = A∨A = A",
    "commutativity": "A∧B = B∧A, A∨B = B∨A",
    "associativity_meet": "A∧(B∧C) = (A∧B)∧C",
    "associativity_join": "A∨(B∨C) = (A∨B)∨C",
    "distributivity_meet": "A∧(B∨C) = (A∧B)∨(A∧C)",
    "distributivity_join": "A∨(B∧C) = (A∨B)∧(A∨C)",
    "duality_meet": "C = A∧B ⇒ ¬C = ¬A∨¬B",
    "duality_join": "C = A∨B ⇒ ¬C = ¬A∧¬B",
}


def _resid(a, b):
    """Max-abs difference over the trailing two axes."""
    return np.max(np.abs(a - b), axis=(-2, -1))


def verify_boolean_identities(algebra: BooleanSubalgebra, tol: float = 1e-11,
                              sample_budget: int = 4096, seed: int = 0) -> AxiomReport:
    """Check the Boolean-algebra laws on the elements of ``algebra``.

    Meet, join and complement use the commuting formulas ``AB``,
    ``A + B - AB`` and ``1 - A``. Each residual is the larger of the
    mismatch between the two sides and the distance from the result to the
    element predicted by bitmask logic, so both the identity and its
    membership in the algebra are tested.

    All pairs and triples are enumerated when the algebra has at most 64
    elements; otherwise ``sample_budget`` random triples are drawn.
    """
    report = AxiomReport("boolean-identities", seed=seed,
                         config={"n_atoms": algebra.n_atoms, "dim": algebra.dim,
                                 "sample_budget": sample_budget})
    E = algebra.element_stack()
    m = E.shape[0]
    full = m - 1
    ident = np.eye(algebra.dim, dtype=np.complex128)

    def neg(x):
        return ident - x

    def mt(x, y):
        return x @ y

    def jn(x, y):
        return x + y - x @ y

    def obs(name, residuals, *index):
        rec = report.check(name, tol, IDENTITY_ANCHORS[name])
        i = int(np.argmax(residuals))
        before = rec.max_residual if rec.instances else -np.inf
        rec.instances += len(residuals)
        worst = float(residuals[i])
        if np.isnan(worst):
            worst = np.inf
        if worst > before:
            rec.max_residual = worst
            rec.worst = "(" + ",".join(str(int(ix[i])) for ix in index) + ")"

    masks = np.arange(m)
    # singles
    idem = np.maximum(_resid(mt(E, E), E), _resid(jn(E, E), E))
    obs("idempotence", idem, masks)

    exhaustive = m <= 64
    if exhaustive:
        ia, ib = np.meshgrid(masks, masks, indexing="ij")
        ia, ib = ia.ravel(), ib.ravel()
        triples = None
    else:
        rng = np.random.default_rng(seed)
        ia = rng.integers(0, m, sample_budget)
        ib = rng.integers(0, m, sample_budget)
        ic = rng.integers(0, m, sample_budget)
        triples = (ia, ib, ic)
        report.config["sampled"] = True

    A, B = E[ia], E[ib]
    and_mask, or_mask = ia & ib, ia | ib
    ab, ba = mt(A, B), mt(B, A)
    closure = np.maximum(_resid(ab, E[and_mask]), _resid(neg(A), E[full & ~ia]))
    obs("closure", closure, ia, ib)
    comm = np.maximum(_resid(ab, ba), _resid(jn(A, B), jn(B, A)))
    obs("commutativity", comm, ia, ib)
    notc = neg(ab)
    dual1 = np.maximum(_resid(notc, jn(neg(A), neg(B))), _resid(notc, E[full & ~and_mask]))
    obs("duality_meet", dual1, ia, ib)
    notd = neg(jn(A, B))
    dual2 = np.maximum(_resid(notd, mt(neg(A), neg(B))), _resid(notd, E[full & ~or_mask]))
    obs("duality_join", dual2, ia, ib)

    def triple_checks(ia, ib, ic):
        A, B, C = E[ia], E[ib], E[ic]
        l1, r1 = mt(A, mt(B, C)), mt(mt(A, B), C)
        obs("associativity_meet", np.maximum(_resid(l1, r1), _resid(l1, E[ia & ib & ic])), ia, ib, ic)
        l2, r2 = jn(A, jn(B, C)), jn(jn(A, B), C)
        obs("associativity_join", np.maximum(_resid(l2, r2), _resid(l2, E[ia | ib | ic])), ia, ib, ic)
        l3, r3 = mt(A, jn(B, C)), jn(mt(A, B), mt(A, C))
        obs("distributivity_meet", np.maximum(_resid(l3, r3), _resid(l3, E[ia & (ib | ic)])), ia, ib, ic)
        l4, r4 = jn(A, mt(B, C)), mt(jn(A, B), jn(A, C))
        obs("distributivity_join", np.maximum(_resid(l4, r4), _resid(l4, E[ia | (ib & ic)])), ia, ib, ic)

    if exhaustive:
        for c in masks:
            triple_checks(ia, ib, np.full_like(ia, c))
    else:
        triple_checks(*triples)
    report.instances = m if exhaustive else sample_budget
    return report
