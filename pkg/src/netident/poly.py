"""Sparse polynomial edge functions over delayed outputs of one in-neighbour.

An :class:`EdgeFunction` of memory ``m`` maps ``(x_1, ..., x_m)`` to a real
number, where ``x_d`` stands for the neighbour's output ``d`` steps in the
past.  Terms are stored as ``(exponents, coefficient)`` pairs in
lexicographic exponent order, which fixes evaluation and serialisation
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Mapping, Sequence

import numpy as np

from .errors import ArityMismatch, NotSeparable, ZeroGamma

Exponents = tuple[int, ...]


def _normalise(terms, memory: int) -> tuple[tuple[Exponents, float], ...]:
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: dict[Exponents, float] = {}
    for exps, coeff in items:
        exps = tuple(int(e) for e in exps)
        if len(exps) != memory:
            raise ArityMismatch(f"exponent vector {exps} has length != memory {memory}")
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        acc[exps] = acc.get(exps, 0.0) + float(coeff)
    return tuple(sorted((e, c) for e, c in acc.items() if c != 0.0))


@dataclass(frozen=True)
class EdgeFunction:
    """Polynomial ``sum_t c_t prod_d x_d ** e_td`` with a tight memory."""

    memory: int
    terms: tuple[tuple[Exponents, float], ...]

    def __init__(self, memory: int, terms):
        if memory < 1:
            raise ValueError("memory must be >= 1")
        norm = _normalise(terms, memory)
        if not norm:
            raise ValueError("edge function must have a nonzero term")
        if not any(e[memory - 1] > 0 for e, _ in norm):
            raise ValueError(f"memory {memory} is not tight: no term uses delay {memory}")
        object.__setattr__(self, "memory", int(memory))
        object.__setattr__(self, "terms", norm)

    @classmethod
    def from_univariate(cls, coeffs: Mapping[int, float], delay: int = 1, memory: int | None = None):
        """Embed ``sum_p c_p x^p`` at argument position ``delay``."""
        memory = delay if memory is None else memory
        terms = {}
        for power, c in coeffs.items():
            exps = [0] * memory
            exps[delay - 1] = power
            terms[tuple(exps)] = c
        return cls(memory, terms)

    @property
    def coeffs(self) -> dict[Exponents, float]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max(sum(e) for e, _ in self.terms)

    @property
    def constant(self) -> float:
        return self.coeffs.get((0,) * self.memory, 0.0)

    def __call__(self, *args):
        return evaluate(self, args)

    def __str__(self) -> str:
        out = ""
        for exps, c in self.terms:
            mono = "*".join(
                f"x{d + 1}" if e == 1 else f"x{d + 1}^{e}" for d, e in enumerate(exps) if e
            )
            term = f"{abs(c):g}" + (f"*{mono}" if mono else "")
            if not out:
                out = ("-" if c < 0 else "") + term
            else:
                out += (" - " if c < 0 else " + ") + term
        return out

    def allclose(self, other: EdgeFunction, atol: float = 1e-12) -> bool:
        return self.memory == other.memory and coefficient_distance(self, other) <= atol


def coefficient_distance(f: EdgeFunction, g: EdgeFunction) -> float:
    """Max absolute coefficient difference over the union of both term sets."""
    a, b = f.coeffs, g.coeffs
    return max(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b))


def evaluate(f: EdgeFunction, args: Sequence) -> float | np.ndarray:
    """Evaluate ``f`` at ``args``; entries may be scalars or broadcastable arrays."""
    if len(args) != f.memory:
        raise ArityMismatch(f"expected {f.memory} arguments, got {len(args)}")
    total = 0.0
    for exps, c in f.terms:
        value = c
        for x, e in zip(args, exps):
            if e:
                value = value * x**e
        total = total + value
    return total


# -- function classes ---------------------------------------------------------


@dataclass(frozen=True)
class FunctionClassFlags:
    in_f_all: bool
    in_f_z: bool
    in_f_znl: bool


def classify(f: EdgeFunction) -> FunctionClassFlags:
    in_f_z = f.constant == 0.0
    # a polynomial has only constant partial derivatives iff its degree is <= 1
    return FunctionClassFlags(True, in_f_z, in_f_z and f.degree >= 2)


# -- shift constructions ------------------------------------------------------


def shift_add(f: EdgeFunction, gamma: float) -> EdgeFunction:
    """``f + gamma``."""
    if gamma == 0:
        raise ZeroGamma("gamma must be nonzero")
    coeffs = f.coeffs
    zero = (0,) * f.memory
    coeffs[zero] = coeffs.get(zero, 0.0) + float(gamma)
    return EdgeFunction(f.memory, coeffs)


def precompose_shift(f: EdgeFunction, gamma: float) -> EdgeFunction:
    """``x -> f(x_1 - gamma, ..., x_m - gamma)`` expanded into monomials.

    The binomial expansion is carried out in exact rational arithmetic and
    each resulting coefficient is rounded once.
    """
    if gamma == 0:
        raise ZeroGamma("gamma must be nonzero")
    g = Fraction(float(gamma))
    acc: dict[Exponents, Fraction] = {}
    for exps, c in f.terms:
        cf = Fraction(c)
        # prod_d (x_d - g)^e_d = prod_d sum_j C(e_d, j) x_d^j (-g)^(e_d - j)
        for lowered in product(*(range(e + 1) for e in exps)):
            w = cf
            for e, j in zip(exps, lowered):
                w *= comb(e, j) * (-g) ** (e - j)
            acc[lowered] = acc.get(lowered, Fraction(0)) + w
    return EdgeFunction(f.memory, {e: float(c) for e, c in acc.items() if c != 0})


# -- additive separability ----------------------------------------------------


@dataclass(frozen=True)
class Univariate:
    """``sum_p c_p t^p`` stored as sorted ``(power, coeff)`` pairs."""

    terms: tuple[tuple[int, float], ...]

    def __init__(self, terms):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, float] = {}
        for p, c in items:
            acc[int(p)] = acc.get(int(p), 0.0) + float(c)
        object.__setattr__(self, "terms", tuple(sorted((p, c) for p, c in acc.items() if c != 0.0)))

    def __call__(self, t):
        total = 0.0
        for p, c in self.terms:
            total = total + (c * t**p if p else c)
        return total

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def coeffs(self) -> dict[int, float]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((p for p, _ in self.terms), default=0)

    def in_f_znl(self) -> bool:
        return bool(self.terms) and self.coeffs.get(0, 0.0) == 0.0 and self.degree >= 2


@dataclass(frozen=True)
class SeparableDecomposition:
    """``f(x) = sum_l components[l](x_l)``; absent delays have a zero component.

    A constant term, if any, is carried by the delay-1 component.
    """

    memory: int
    components: dict[int, Univariate]

    def reassemble(self) -> EdgeFunction:
        terms: dict[Exponents, float] = {}
        for delay, comp in self.components.items():
            for p, c in comp.terms:
                exps = [0] * self.memory
                exps[delay - 1] = p
                terms[tuple(exps)] = terms.get(tuple(exps), 0.0) + c
        return EdgeFunction(self.memory, terms)

    def all_znl(self) -> bool:
        """Every nonzero component has no constant term and degree >= 2."""
        return all(comp.in_f_znl() for comp in self.components.values() if comp)


def separate(f: EdgeFunction) -> SeparableDecomposition:
    parts: dict[int, dict[int, float]] = {}
    for exps, c in f.terms:
        used = [d for d, e in enumerate(exps) if e]
        if len(used) > 1:
            raise NotSeparable(f"term with exponents {exps} mixes delays")
        delay = used[0] + 1 if used else 1
        power = exps[used[0]] if used else 0
        parts.setdefault(delay, {})[power] = c
    return SeparableDecomposition(f.memory, {d: Univariate(p) for d, p in sorted(parts.items())})


def is_separable(f: EdgeFunction) -> bool:
    return all(sum(1 for e in exps if e) <= 1 for exps, _ in f.terms)


def monomials(memory: int, degree: int, *, constant: bool = False, separable: bool = False) -> list[Exponents]:
    """All exponent vectors of total degree ``<= degree`` in lexicographic order."""
    out = []
    for exps in product(range(degree + 1), repeat=memory):
        total = sum(exps)
        if total > degree or (total == 0 and not constant):
            continue
        if separable and sum(1 for e in exps if e) > 1:
            continue
        out.append(exps)
    return out
