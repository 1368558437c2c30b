"""Singular value profiles for the sampled matrices.

A profile is the ordered tuple (s_1, ..., s_n) of prescribed singular values.
Profiles come in two arithmetic modes: exact (every entry an int or Fraction,
normalized to Fraction) and float.  Exact trace moments require the exact
mode; Monte-Carlo code reads the float view of either mode.

Derived quantities are properties, recomputed on access:

* M, m: largest and smallest singular value,
* b2 = (1/n) * sum s_i^2 and b = sqrt(b2),
* a2 = n / sum s_i^(-2) and a = sqrt(a2), with a = 0 as soon as some
  s_i == 0 (the reciprocal sum is infinite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

Scalar = Union[int, float, Fraction]


@dataclass(frozen=True)
class SingularProfile:
    """Immutable singular value profile; see module docstring."""

    values: tuple

    def __post_init__(self) -> None:
        if len(self.values) < 1:
            raise ValueError("profile needs at least one singular value")
        if any(v < 0 for v in self.values):
            raise ValueError("singular values must be nonnegative")
        if all(isinstance(v, (int, Fraction)) for v in self.values):
            normalized = tuple(Fraction(v) for v in self.values)
        else:
            normalized = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", normalized)

    @classmethod
    def from_values(cls, values: Sequence[Scalar]) -> "SingularProfile":
        return cls(tuple(values))

    @classmethod
    def constant(cls, value: Scalar, n: int) -> "SingularProfile":
        return cls((value,) * n)

    @classmethod
    def uniform_grid(cls, lo: Scalar, hi: Scalar, n: int) -> "SingularProfile":
        """The deterministic grid s_i = lo + (i-1) (hi-lo) / (n-1); exact when
        the endpoints are exact.  n = 1 yields (lo,)."""
        if n < 1:
            raise ValueError("profile needs at least one singular value")
        if isinstance(lo, (int, Fraction)) and isinstance(hi, (int, Fraction)):
            lo_x, hi_x = Fraction(lo), Fraction(hi)
        else:
            lo_x, hi_x = float(lo), float(hi)
        if n == 1:
            return cls((lo_x,))
        step = (hi_x - lo_x) / (n - 1)
        return cls(tuple(lo_x + i * step for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.values[0], Fraction)

    @property
    def M(self):
        return max(self.values)

    @property
    def m(self):
        return min(self.values)

    @property
    def b2(self):
        total = sum(v * v for v in self.values)
        if self.is_exact:
            return Fraction(total, self.n)
        return total / self.n

    @property
    def b(self) -> float:
        return math.sqrt(self.b2)

    @property
    def a2(self):
        if any(v == 0 for v in self.values):
            return Fraction(0) if self.is_exact else 0.0
        total = sum(1 / (v * v) for v in self.values)
        return self.n / total

    @property
    def a(self) -> float:
        return math.sqrt(self.a2)

    def as_float_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values], dtype=float)

    def to_exact(self, tol: float = 1e-9) -> "SingularProfile":
        """Rational approximation of a float profile.  Each entry moves by at
        most ``tol``; entries already exact are kept."""
        if self.is_exact:
            return self
        approx = []
        for v in self.values:
            frac = Fraction(v).limit_denominator(10**12)
            if abs(float(frac) - v) > tol:
                raise ValueError(f"cannot approximate {v} within {tol}")
            approx.append(frac)
        return SingularProfile(tuple(approx))

    def scaled(self, factor: Scalar) -> "SingularProfile":
        return SingularProfile(tuple(v * factor for v in self.values))
