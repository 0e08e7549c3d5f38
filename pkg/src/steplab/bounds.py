"""Whitelisted closed-form step bounds.

Witness bounds come from a small whitelist so that bound evaluation is
exact and a witness cannot smuggle computation into its bound.  For
integer budget checks "log n" is measured as the binary width of n (at
least 1); the float view uses the real log2 and exists for the
convexity analysis, where a staircase would create spurious concavity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

FORMS = ("c", "c*log", "c*n", "c*n*log", "c*n^2")


def _width(n: int) -> int:
    return max(1, int(n).bit_length())


def _term_int(form: str, c: int, n: int) -> int:
    if form == "c":
        return c
    if form == "c*log":
        return c * _width(n)
    if form == "c*n":
        return c * n
    if form == "c*n*log":
        return c * n * _width(n)
    if form == "c*n^2":
        return c * n * n
    raise ValueError(f"unknown bound form {form!r}")


def _term_float(form: str, c: int, n: int) -> float:
    lg = math.log2(n) if n > 1 else 0.0
    if form == "c":
        return float(c)
    if form == "c*log":
        return c * lg
    if form == "c*n":
        return float(c * n)
    if form == "c*n*log":
        return c * n * lg
    if form == "c*n^2":
        return float(c * n * n)
    raise ValueError(f"unknown bound form {form!r}")


@dataclass(frozen=True)
class Bound:
    """A sum of whitelisted terms; nondecreasing in n by construction."""

    terms: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, form: str, c: int = 1) -> "Bound":
        if form not in FORMS:
            raise ValueError(f"bound form must be one of {FORMS}, got {form!r}")
        if c < 1:
            raise ValueError("bound constant must be >= 1")
        return cls(terms=((form, int(c)),))

    def __call__(self, n: int) -> int:
        n = int(n)
        if n < 1:
            raise ValueError("bounds are defined for n >= 1")
        return sum(_term_int(form, c, n) for form, c in self.terms)

    def as_float(self, n: int) -> float:
        return sum(_term_float(form, c, n) for form, c in self.terms)

    def plus(self, other: "Bound") -> "Bound":
        return Bound(terms=self.terms + other.terms)

    def describe(self) -> str:
        return " + ".join(f"{form}[c={c}]" for form, c in self.terms)


def parse_bound(form: str, constant: str | int) -> Bound:
    return Bound.of(form, int(constant))
