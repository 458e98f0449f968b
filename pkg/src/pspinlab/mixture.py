"""Interaction mixtures.

A mixed p-spin model on N sites is specified by coefficients gamma_k for
degrees k in {2, ..., P}.  The disorder covariance is governed by

    xi(x) = sum_k gamma_k^2 x^k,

so two configurations at overlap q have energy covariance N * xi(q) and
xi(1) = sum_k gamma_k^2 sets the energy scale.  MixtureSpec stores the raw
gamma_k (not their squares); xi() squares them on evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidDegreeError

__all__ = ["MixtureSpec", "pure", "xi", "parse_mixture", "format_mixture"]


@dataclass(frozen=True)
class MixtureSpec:
    """Sparse mixture: ((degree, gamma), ...) sorted by degree."""

    terms: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise InvalidDegreeError("mixture must contain at least one term")
        degrees = [k for k, _ in self.terms]
        if any(not isinstance(k, (int, np.integer)) or k < 2 for k in degrees):
            raise InvalidDegreeError(f"degrees must be integers >= 2, got {degrees}")
        if len(set(degrees)) != len(degrees):
            raise InvalidDegreeError(f"duplicate degrees in {degrees}")
        if degrees != sorted(degrees):
            object.__setattr__(self, "terms", tuple(sorted(self.terms)))
        for _, g in self.terms:
            if not np.isfinite(g) or g == 0.0:
                raise InvalidDegreeError(f"coefficients must be finite and nonzero, got {g}")
        object.__setattr__(
            self, "terms", tuple((int(k), float(g)) for k, g in self.terms)
        )

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.terms)

    @property
    def max_degree(self) -> int:
        return self.terms[-1][0]

    def gamma(self, k: int) -> float:
        for kk, g in self.terms:
            if kk == k:
                return g
        return 0.0


def pure(p: int) -> MixtureSpec:
    """Pure p-spin mixture: gamma_p = 1, xi(x) = x^p."""
    return MixtureSpec(((p, 1.0),))


def xi(spec: MixtureSpec, x, order: int = 0):
    """Evaluate xi(x) or its first or second derivative.

    order 0: sum gamma_k^2 x^k
    order 1: sum gamma_k^2 k x^(k-1)
    order 2: sum gamma_k^2 k (k-1) x^(k-2)

    Horner evaluation over the sparse exponent list; x may be a scalar or an
    ndarray.
    """
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order}")
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    acc = np.zeros_like(x)
    prev_exp = None
    # Descending exponents: acc = (...((c_P) x^gap + c_j) x^gap + ...) x^e_min
    for k, g in reversed(spec.terms):
        e = k - order
        coef = g * g
        for j in range(order):
            coef *= k - j
        if prev_exp is None:
            acc = acc + coef
        else:
            acc = acc * x ** (prev_exp - e) + coef
        prev_exp = e
    acc = acc * x**prev_exp
    return float(acc) if scalar else acc


def parse_mixture(text: str) -> MixtureSpec:
    """Parse "pure:p" or a comma list "k:gamma,k:gamma"."""
    text = text.strip()
    if not text:
        raise InvalidDegreeError("empty mixture string")
    if text.startswith("pure:"):
        try:
            p = int(text[5:])
        except ValueError as exc:
            raise InvalidDegreeError(f"bad pure degree in {text!r}") from exc
        return pure(p)
    terms = []
    for part in text.split(","):
        try:
            k_str, g_str = part.split(":")
            terms.append((int(k_str), float(g_str)))
        except ValueError as exc:
            raise InvalidDegreeError(f"bad mixture term {part!r}") from exc
    return MixtureSpec(tuple(terms))


def format_mixture(spec: MixtureSpec) -> str:
    """Canonical text form; inverse of parse_mixture."""
    if len(spec.terms) == 1 and spec.terms[0][1] == 1.0:
        return f"pure:{spec.terms[0][0]}"
    return ",".join(f"{k}:{g!r}" for k, g in spec.terms)
