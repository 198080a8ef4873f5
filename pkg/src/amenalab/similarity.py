"""Similarity diagnostics: conjugation by upper-unipotent block operators, the
minimal intertwiner for the square-root relation, and its norm growth across
truncations.  On any finite truncation the intertwiner exists; the meaningful
finite shadow of non-similarity is that its norm diverges with the truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .reports import ConvergenceReport
from .scalars import exact_sqrt, is_exact_zero, to_float
from .spectrum import BlockOperator, DiagonalOperator, SpectrumSequence


@dataclass(frozen=True)
class IntertwinerSolve:
    """Minimal-norm diagonal solution B of B N = N^(1/2) on a truncation."""

    truncation: int
    intertwiner: DiagonalOperator
    norm: float
    residual: float


def conjugate_by_upper_unipotent(X: BlockOperator, B: DiagonalOperator) -> BlockOperator:
    """Conjugate X by [[I, B], [0, I]] (exact block algebra).

    For X with vanishing left column the upper-right block of the result is
    X12 + B X22; the other blocks are unchanged.
    """
    if X.dim != len(B):
        raise ValueError("dimension mismatch between the operator and the conjugator")
    if not X.b21.is_zero():
        raise ValueError("conjugation requires a vanishing lower-left block")
    b12 = X.b12 + (B @ X.b22) - (X.b11 @ B)
    return BlockOperator(X.b11, b12, X.b21, X.b22)


def minimal_intertwiner(spectrum) -> IntertwinerSolve:
    """Solve B N = N^(1/2) entrywise: B = diag(lambda_n^(-1/2)), residual zero.

    Accepts a SpectrumSequence or a raw DiagonalOperator; a zero diagonal
    entry is the finite-dimensional face of the unboundedness obstruction and
    raises instead of solving.
    """
    N = spectrum.diagonal() if isinstance(spectrum, SpectrumSequence) else spectrum
    entries = []
    roots = []
    for i, d in enumerate(N.diag, start=1):
        if is_exact_zero(d):
            raise ValueError(f"intertwiner unbounded at index {i}")
        if to_float(d) < 0:
            raise ValueError(f"diagonal must be positive at index {i}")
        root = exact_sqrt(d)
        roots.append(root)
        entries.append(1 / root)
    B = DiagonalOperator(tuple(entries))
    residual_diag = (B @ N) - DiagonalOperator(tuple(roots))
    return IntertwinerSolve(len(N), B, B.norm(), residual_diag.norm())


def similarity_growth_sweep(spectrum_factory: Callable[[int], SpectrumSequence],
                            truncations: Sequence[int], *,
                            threshold: float | None = None) -> ConvergenceReport:
    """Minimal intertwiner norm per truncation size.

    Verdicts: `threshold_met` records whether the largest truncation exceeds
    the supplied threshold (vacuously true without one); the `bounded` slot
    certifies strict norm growth, the finite shadow of unboundedness.
    """
    if not truncations:
        raise ValueError("truncations: must not be empty")
    if any(b <= a for a, b in zip(truncations, truncations[1:])):
        raise ValueError("truncations: must be strictly increasing")
    rows = []
    for m in truncations:
        solve = minimal_intertwiner(spectrum_factory(m))
        rows.append((int(m), solve.norm))
    increasing = all(b[1] > a[1] for a, b in zip(rows, rows[1:]))
    met = True if threshold is None else rows[-1][1] > float(threshold)
    return ConvergenceReport(("M", "intertwiner_norm"), tuple(rows), met, increasing,
                             0.0 if threshold is None else float(threshold))
