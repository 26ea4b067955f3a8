"""Lattice operations on projectors: complement, meet, join, ordering, commutation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .linalg import (
    DEFAULT_TOL,
    Projector,
    ToleranceProfile,
    hermitian_part,
    max_abs,
    projector_onto_columns,
)


@dataclass(frozen=True)
class ProjectorPairClassification:
    commuting: bool
    ordered_le: bool
    orthogonal: bool
    residual_norms: dict = field(default_factory=dict)


def _check_pair(p: Projector, q: Projector):
    if p.dim != q.dim:
        raise InputError(f"dimension mismatch: {p.dim} vs {q.dim}")


def complement(p: Projector) -> Projector:
    """``1 - P``, the projector onto the orthogonal complement of the range."""
    return Projector(np.eye(p.dim) - p.matrix, p.tol)


def meet(p: Projector, q: Projector) -> Projector:
    """Projector onto the intersection of the ranges of ``p`` and ``q``.

    The intersection is the eigenspace of ``P + Q`` for eigenvalue 2;
    eigenvalues within ``eigen_gap_tol`` of 2 are kept.
    """
    _check_pair(p, q)
    tol = p.tol
    evals, evecs = np.linalg.eigh(hermitian_part(p.matrix + q.matrix))
    keep = np.abs(evals - 2.0) <= tol.eigen_gap_tol
    return projector_onto_columns(evecs[:, keep], tol)


def join(p: Projector, q: Projector) -> Projector:
    """Projector onto the span of both ranges, as ``¬(¬P ∧ ¬Q)``."""
    _check_pair(p, q)
    return complement(meet(complement(p), complement(q)))


def commutator_norm(p, q) -> float:
    a = np.asarray(p)
    b = np.asarray(q)
    return max_abs(a @ b - b @ a)


def commutes(p: Projector, q: Projector, tol: float | None = None) -> bool:
    _check_pair(p, q)
    if tol is None:
        tol = p.tol.validation_tol
    return commutator_norm(p, q) <= tol


def classify_pair(p: Projector, q: Projector,
                  tol: float | None = None) -> ProjectorPairClassification:
    """Commutation, ordering ``P ≤ Q`` and orthogonality of a pair.

    ``P ≤ Q`` is tested as ``QP = P`` and orthogonality as ``PQ = 0``.
    """
    _check_pair(p, q)
    if tol is None:
        tol = p.tol.validation_tol
    a, b = p.matrix, q.matrix
    res = {
        "commutator": max_abs(a @ b - b @ a),
        "order": max_abs(b @ a - a),
        "product": max_abs(a @ b),
    }
    return ProjectorPairClassification(
        commuting=res["commutator"] <= tol,
        ordered_le=res["order"] <= tol,
        orthogonal=res["product"] <= tol,
        residual_norms=res,
    )


def leq(p: Projector, q: Projector, tol: float | None = None) -> bool:
    return classify_pair(p, q, tol).ordered_le


def projectors_close(p, q, tol: float = DEFAULT_TOL.validation_tol) -> bool:
    return max_abs(np.asarray(p) - np.asarray(q)) <= tol

