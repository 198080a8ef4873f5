"""Truncated spectra and the diagonal / 2x2-block operator arithmetic over them.

Every block operator here has four diagonal blocks, so products reduce to
entrywise work on the diagonals.  Entries may be exact (int, Fraction, sympy
radicals) or float; the arithmetic preserves whichever tier it is given.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .scalars import as_fraction, exact_sqrt, is_exact_zero, to_float

SpectrumKind = str  # "geometric" | "harmonic" | "explicit"


@dataclass(frozen=True)
class SpectrumSequence:
    """Strictly decreasing positive reals lambda_1 > ... > lambda_M.

    The origin belongs to the spectrum set implicitly and is never stored.
    `descriptor` records how the sequence was generated, for reproducibility.
    """

    values: tuple[Fraction, ...]
    descriptor: str = "explicit"

    def __post_init__(self):
        if not self.values:
            raise ValueError("values: must contain at least one point")
        for i, v in enumerate(self.values, start=1):
            if v <= 0:
                raise ValueError(f"values: not positive at index {i}")
            if i >= 2 and v >= self.values[i - 2]:
                raise ValueError(f"values: not strictly decreasing at index {i}")

    def __len__(self) -> int:
        return len(self.values)

    def lam(self, n: int) -> Fraction:
        """1-based access to lambda_n."""
        if not 1 <= n <= len(self.values):
            raise ValueError(f"n out of range: {n} (truncation {len(self.values)})")
        return self.values[n - 1]

    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def diagonal(self) -> "DiagonalOperator":
        """The diagonal operator carrying the spectrum points."""
        return DiagonalOperator(self.values)


def make_spectrum(kind: SpectrumKind, count: int | None = None, *,
                  ratio=Fraction(1, 2), values: Sequence | None = None) -> SpectrumSequence:
    """Build a spectrum: geometric(ratio), harmonic, or an explicit list."""
    if kind == "geometric":
        if count is None or count < 1:
            raise ValueError("count: must be a positive integer")
        r = as_fraction(ratio)
        if not 0 < r < 1:
            raise ValueError("ratio: must lie strictly between 0 and 1")
        vals = tuple(r ** n for n in range(1, count + 1))
        return SpectrumSequence(vals, f"geometric(ratio={r},count={count})")
    if kind == "harmonic":
        if count is None or count < 1:
            raise ValueError("count: must be a positive integer")
        vals = tuple(Fraction(1, n) for n in range(1, count + 1))
        return SpectrumSequence(vals, f"harmonic(count={count})")
    if kind == "explicit":
        if values is None:
            raise ValueError("values: required for an explicit spectrum")
        if count is not None and count != len(values):
            raise ValueError("count: does not match the explicit value list")
        vals = tuple(as_fraction(v) for v in values)
        return SpectrumSequence(vals, "explicit")
    raise ValueError(f"kind: unknown spectrum kind {kind!r}")


@dataclass(frozen=True)
class DiagonalOperator:
    """Diagonal operator; its norm is exactly the max modulus of the entries."""

    diag: tuple

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(self.diag))

    def __len__(self) -> int:
        return len(self.diag)

    @classmethod
    def zeros(cls, m: int) -> "DiagonalOperator":
        return cls((Fraction(0),) * m)

    @classmethod
    def ones(cls, m: int) -> "DiagonalOperator":
        return cls((Fraction(1),) * m)

    @classmethod
    def constant(cls, m: int, value) -> "DiagonalOperator":
        return cls((value,) * m)

    def _check(self, other: "DiagonalOperator"):
        if len(self) != len(other):
            raise ValueError("dimension mismatch between diagonal operators")

    def __add__(self, other):
        self._check(other)
        return DiagonalOperator(tuple(a + b for a, b in zip(self.diag, other.diag)))

    def __sub__(self, other):
        self._check(other)
        return DiagonalOperator(tuple(a - b for a, b in zip(self.diag, other.diag)))

    def __neg__(self):
        return DiagonalOperator(tuple(-a for a in self.diag))

    def __matmul__(self, other):
        """Composition of diagonal operators is the entrywise product."""
        self._check(other)
        return DiagonalOperator(tuple(a * b for a, b in zip(self.diag, other.diag)))

    def scale(self, c):
        return DiagonalOperator(tuple(c * a for a in self.diag))

    def is_zero(self) -> bool:
        return all(is_exact_zero(a) for a in self.diag)

    def norm(self) -> float:
        """Operator norm, exactly max |d_n| (returned as float)."""
        return max((abs(to_float(a)) for a in self.diag), default=0.0)

    def to_float(self) -> "DiagonalOperator":
        return DiagonalOperator(tuple(to_float(a) for a in self.diag))


@dataclass(frozen=True)
class BlockOperator:
    """2x2 block operator with diagonal blocks of a common dimension."""

    b11: DiagonalOperator
    b12: DiagonalOperator
    b21: DiagonalOperator
    b22: DiagonalOperator

    def __post_init__(self):
        m = len(self.b11)
        if any(len(b) != m for b in (self.b12, self.b21, self.b22)):
            raise ValueError("all four blocks must share one dimension")

    @property
    def dim(self) -> int:
        return len(self.b11)

    @classmethod
    def zeros(cls, m: int) -> "BlockOperator":
        z = DiagonalOperator.zeros(m)
        return cls(z, z, z, z)

    @classmethod
    def column_block(cls, top: DiagonalOperator, bottom: DiagonalOperator) -> "BlockOperator":
        """Operator with vanishing left blocks, the shape of every algebra element."""
        z = DiagonalOperator.zeros(len(top))
        return cls(z, top, z, bottom)

    def __add__(self, other):
        return BlockOperator(self.b11 + other.b11, self.b12 + other.b12,
                             self.b21 + other.b21, self.b22 + other.b22)

    def __sub__(self, other):
        return BlockOperator(self.b11 - other.b11, self.b12 - other.b12,
                             self.b21 - other.b21, self.b22 - other.b22)

    def __neg__(self):
        return BlockOperator(-self.b11, -self.b12, -self.b21, -self.b22)

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch between block operators")
        return BlockOperator(
            self.b11 @ other.b11 + self.b12 @ other.b21,
            self.b11 @ other.b12 + self.b12 @ other.b22,
            self.b21 @ other.b11 + self.b22 @ other.b21,
            self.b21 @ other.b12 + self.b22 @ other.b22,
        )

    def scale(self, c):
        return BlockOperator(self.b11.scale(c), self.b12.scale(c),
                             self.b21.scale(c), self.b22.scale(c))

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in (self.b11, self.b12, self.b21, self.b22))

    def to_float(self) -> "BlockOperator":
        return BlockOperator(self.b11.to_float(), self.b12.to_float(),
                             self.b21.to_float(), self.b22.to_float())

    def to_dense(self) -> np.ndarray:
        """Dense 2M x 2M float matrix, for the generic linear-algebra oracles."""
        m = self.dim
        out = np.zeros((2 * m, 2 * m))
        for i in range(m):
            out[i, i] = to_float(self.b11.diag[i])
            out[i, m + i] = to_float(self.b12.diag[i])
            out[m + i, i] = to_float(self.b21.diag[i])
            out[m + i, m + i] = to_float(self.b22.diag[i])
        return out


def build_T(spectrum: SpectrumSequence) -> BlockOperator:
    """The compact triangular generator: zero left column, sqrt block over the
    diagonal block carrying the spectrum."""
    top = DiagonalOperator(tuple(exact_sqrt(v) for v in spectrum.values))
    bottom = DiagonalOperator(spectrum.values)
    return BlockOperator.column_block(top, bottom)


def build_shifted_T(spectrum: SpectrumSequence, n: int) -> BlockOperator:
    """lambda_n I - T on the truncation, the generator of the n-th kernel algebra."""
    lam_n = spectrum.lam(n)
    m = len(spectrum)
    return BlockOperator(
        DiagonalOperator.constant(m, lam_n),
        DiagonalOperator(tuple(-exact_sqrt(v) for v in spectrum.values)),
        DiagonalOperator.zeros(m),
        DiagonalOperator(tuple(lam_n - v for v in spectrum.values)),
    )


def block_power(X: BlockOperator, k: int) -> BlockOperator:
    """k-th power of an upper-triangular block operator with commuting blocks.

    The off-diagonal block of the power is A_k N2 where A_k is the divided
    difference (N1^k - N3^k) / (N1 - N3), computed entrywise as the power sum
    so that the confluent case needs no branch.  k = 0 is rejected: the
    identity lies outside the non-unital algebra model.
    """
    if k < 1:
        raise ValueError("k must be >= 1; the algebra model is non-unital")
    if not X.b21.is_zero():
        raise ValueError("block_power requires a vanishing lower-left block")
    n1, n2, n3 = X.b11.diag, X.b12.diag, X.b22.diag
    m = X.dim
    top, bot, acc = [], [], []
    for i in range(m):
        a, c = n1[i], n3[i]
        # A_k = sum_{j=0}^{k-1} a^j c^(k-1-j); equals k a^(k-1) when a == c
        s = sum((a ** j) * (c ** (k - 1 - j)) for j in range(k))
        top.append(a ** k)
        bot.append(c ** k)
        acc.append(s * n2[i])
    return BlockOperator(DiagonalOperator(tuple(top)), DiagonalOperator(tuple(acc)),
                         DiagonalOperator.zeros(m), DiagonalOperator(tuple(bot)))


def apply_poly_to_block(coefficients: Sequence, X: BlockOperator) -> BlockOperator:
    """Evaluate sum_k c_k X^k (ascending coefficients, zero constant term).

    Linearity over `block_power`; the divided-difference factors are
    accumulated with the recurrence A_{k+1} = N1 A_k + N3^k, which keeps all
    scalar work in the rational tier until the final off-diagonal product.
    """
    coeffs = list(coefficients)
    if coeffs and not is_exact_zero(coeffs[0]):
        raise ValueError("constant term must vanish; the algebra model is non-unital")
    if not X.b21.is_zero():
        raise ValueError("polynomial application requires a vanishing lower-left block")
    n1, n2, n3 = X.b11.diag, X.b12.diag, X.b22.diag
    m = X.dim
    s11 = [0] * m
    s22 = [0] * m
    s_acc = [0] * m
    p1 = list(n1)
    p3_prev = [1] * m  # N3^(k-1)
    a_k = [1] * m      # divided difference factor at current k
    p3 = list(n3)
    for k in range(1, len(coeffs)):
        c = coeffs[k]
        if not is_exact_zero(c):
            for i in range(m):
                s11[i] = s11[i] + c * p1[i]
                s22[i] = s22[i] + c * p3[i]
                s_acc[i] = s_acc[i] + c * a_k[i]
        if k < len(coeffs) - 1:
            for i in range(m):
                p3_prev[i] = p3_prev[i] * n3[i]
                a_k[i] = n1[i] * a_k[i] + p3_prev[i]
                p1[i] = p1[i] * n1[i]
                p3[i] = p3[i] * n3[i]
    b12 = tuple(s_acc[i] * n2[i] for i in range(m))
    return BlockOperator(DiagonalOperator(tuple(s11)), DiagonalOperator(b12),
                         DiagonalOperator.zeros(m), DiagonalOperator(tuple(s22)))


def functional_calculus(N: DiagonalOperator, f: Callable) -> DiagonalOperator:
    """Apply a scalar function (or polynomial) entrywise to a diagonal operator."""
    return DiagonalOperator(tuple(f(d) for d in N.diag))


def operator_norm(X: BlockOperator) -> float:
    """Spectral norm.  Column-block operators (vanishing left blocks) use the
    exact closed form max_n sqrt(B12[n]^2 + B22[n]^2); anything else goes to
    the dense SVD oracle."""
    if X.b11.is_zero() and X.b21.is_zero():
        worst = 0.0
        for x12, x22 in zip(X.b12.diag, X.b22.diag):
            a, b = to_float(x12), to_float(x22)
            worst = max(worst, float(np.hypot(a, b)))
        return worst
    return float(np.linalg.svd(X.to_dense(), compute_uv=False)[0])
