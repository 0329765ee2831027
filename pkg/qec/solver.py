#!/usr/bin/env python3
"""Constructive 3-e.c. witnesses for canonical quadrance graphs over Z_p.

Given distinct A, B, C in Z_p^d and a pattern (i, j, k) in {1, 2}^3, find X
outside {A, B, C} with Q(X, A) in V_i, Q(X, B) in V_j and Q(X, C) in V_k,
where V_1 = {0, ..., (p - 1) / 2} and V_2 = {(p + 1) / 2, ..., p - 1}.

Fixing target values (u, v, w) and subtracting the first equation from the
other two leaves

    Q(X, A) = u
    <X, B - A> = (u - v + ||B|| - ||A||) / 2
    <X, C - A> = (u - w + ||C|| - ||A||) / 2

The two linear equations are solved by elimination; substituting the affine
solution space into Q(X, A) = u gives one quadratic equation, solved for the
first free coordinate while the others are enumerated.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from qec.errors import DimensionMismatchError, GraphSizeError, NoCompatibleTripleError, NoWitnessError
from qec.graph import Point, inner_product, norm, quadrance
from qec.zmod import LinearSystem, inverse, null_space_basis, particular_solution, require_odd_prime, solve_univariate_quadratic

THEOREM_MIN_P = 7
THEOREM_MIN_D = 5
DEFAULT_ENUMERATION_BUDGET = 2**20


def value_class(p: int, c: int) -> range:
    """V_1 (c = 1) or V_2 (c = 2) as an ascending range of residues."""
    if c == 1:
        return range(0, (p + 1) // 2)
    if c == 2:
        return range((p + 1) // 2, p)
    raise ValueError(f"value class must be 1 or 2, got {c}")


@dataclass(frozen=True)
class Pattern3:
    """Target classes for Q(X, A), Q(X, B), Q(X, C)."""

    i: int
    j: int
    k: int

    def __post_init__(self) -> None:
        for c in (self.i, self.j, self.k):
            if c not in (1, 2):
                raise ValueError(f"pattern components must be 1 or 2, got {self}")

    @classmethod
    def parse(cls, text: str) -> "Pattern3":
        """Parse a string such as "121"."""
        text = text.strip()
        if len(text) != 3 or any(ch not in "12" for ch in text):
            raise ValueError(f"pattern must be three characters from {{1, 2}}, got {text!r}")
        return cls(int(text[0]), int(text[1]), int(text[2]))

    @classmethod
    def all(cls) -> List["Pattern3"]:
        return [cls(*combo) for combo in itertools.product((1, 2), repeat=3)]

    def __str__(self) -> str:
        return f"{self.i}{self.j}{self.k}"

    def accepts(self, p: int, u: int, v: int, w: int) -> bool:
        return u in value_class(p, self.i) and v in value_class(p, self.j) and w in value_class(p, self.k)


@dataclass(frozen=True)
class Dependence:
    """Whether B - A and C - A are linearly independent; otherwise C - A = t (B - A)."""

    independent: bool
    t: Optional[int] = None

    @property
    def tag(self) -> str:
        return "independent" if self.independent else "dependent"


@dataclass(frozen=True)
class ReducedSystem:
    """The two linear forms plus the retained constraint Q(X, anchor) = u."""

    system: LinearSystem
    anchor: Point
    u: int


@dataclass(frozen=True)
class WitnessPlan:
    u: int
    v: int
    w: int
    dependence: Dependence
    a: Optional[int]
    x0: Point
    basis: Tuple[Point, ...]
    system: LinearSystem

    @property
    def case_tag(self) -> str:
        return self.dependence.tag


@dataclass(frozen=True)
class WitnessResult:
    x: Point
    plan: WitnessPlan
    attempts: int
    within_theorem: bool


def _check_triple(a: Point, b: Point, c: Point) -> int:
    for other in (b, c):
        if other.m != a.m or other.d != a.d:
            raise DimensionMismatchError("A, B and C must live in the same Z_p^d")
    if a == b or b == c or a == c:
        raise ValueError("A, B and C must be pairwise distinct")
    return require_odd_prime(a.m)


def reduce_system(a: Point, b: Point, c: Point, u: int, v: int, w: int) -> ReducedSystem:
    """Eliminate the squared terms of Q(X, B) = v and Q(X, C) = w against Q(X, A) = u."""
    p = _check_triple(a, b, c)
    half = inverse(2, p)
    rows = [
        ((b - a).coords, (u - v + norm(b) - norm(a)) * half),
        ((c - a).coords, (u - w + norm(c) - norm(a)) * half),
    ]
    return ReducedSystem(LinearSystem.of(p, a.d, rows), a, u % p)


def classify_dependence(a: Point, b: Point, c: Point) -> Dependence:
    p = _check_triple(a, b, c)
    db, dc = (b - a).coords, (c - a).coords
    pivot = next(i for i, x in enumerate(db) if x)
    t = dc[pivot] * inverse(db[pivot], p) % p
    if all((t * x - y) % p == 0 for x, y in zip(db, dc)):
        return Dependence(False, t)
    return Dependence(True)


def dependent_offset(a: Point, b: Point, c: Point, t: int, u: int) -> int:
    """a = ||C|| + (t - 1)||A|| - t||B|| - (t - 1)u, so that w = t v + a."""
    return (norm(c) + (t - 1) * norm(a) - t * norm(b) - (t - 1) * u) % a.m


def compatible_triples(pattern: Pattern3, dependence: Dependence, a: Point, b: Point, c: Point) -> Iterator[Tuple[int, int, int]]:
    """Every (u, v, w) in V_i x V_j x V_k for which the linear forms are consistent, ascending."""
    p = a.m
    vi, vj, vk = value_class(p, pattern.i), value_class(p, pattern.j), value_class(p, pattern.k)
    if dependence.independent:
        yield from itertools.product(vi, vj, vk)
        return
    t = dependence.t
    assert t is not None
    for u in vi:
        offset = dependent_offset(a, b, c, t, u)
        for v in vj:
            w = (t * v + offset) % p
            if w in vk:
                yield (u, v, w)


def choose_uvw(pattern: Pattern3, dependence: Dependence, a: Point, b: Point, c: Point) -> Tuple[int, int, int]:
    triple = next(compatible_triples(pattern, dependence, a, b, c), None)
    if triple is None:
        raise NoCompatibleTripleError(f"no compatible (u,v,w) for pattern {pattern} over Z_{a.m}")
    return triple


def build_plan(a: Point, b: Point, c: Point, u: int, v: int, w: int, dependence: Optional[Dependence] = None) -> Optional[WitnessPlan]:
    """Particular solution and homogeneous basis for the linear forms, or None when inconsistent."""
    dependence = dependence or classify_dependence(a, b, c)
    reduced = reduce_system(a, b, c, u, v, w)
    x0 = particular_solution(reduced.system)
    if x0 is None:
        return None
    p = a.m
    basis = tuple(Point(f, p) for f in null_space_basis(reduced.system))
    offset = None if dependence.independent or dependence.t is None else dependent_offset(a, b, c, dependence.t, u)
    return WitnessPlan(u, v, w, dependence, offset, Point(x0, p), basis, reduced.system)


def _combine(x0: Point, basis: Sequence[Point], coeffs: Sequence[int]) -> Point:
    coords = list(x0.coords)
    for lam, f in zip(coeffs, basis):
        if lam:
            for i, fc in enumerate(f.coords):
                coords[i] += lam * fc
    return Point(tuple(coords), x0.m)


def iter_plan_solutions(plan: WitnessPlan, a: Point) -> Iterator[Point]:
    """Points of the plan's affine space with Q(X, A) = u.

    lambda_2..lambda_k run through Z_p^(k-1) in ascending mixed-radix order;
    for each assignment the quadratic in lambda_1 is solved directly.
    """
    p = a.m
    if not plan.basis:
        if quadrance(plan.x0, a) == plan.u:
            yield plan.x0
        return
    first, rest = plan.basis[0], plan.basis[1:]
    a_coeff = norm(first)
    for coeffs in itertools.product(range(p), repeat=len(rest)):
        z = _combine(plan.x0, rest, coeffs) - a
        b_coeff = 2 * inner_product(z, first)
        c_coeff = norm(z) - plan.u
        for lam in solve_univariate_quadratic(a_coeff, b_coeff, c_coeff, p):
            yield _combine(plan.x0, (first,) + rest, (lam,) + coeffs)


def find_witness(a: Point, b: Point, c: Point, pattern: Pattern3) -> WitnessResult:
    """Find X outside {A, B, C} realising the pattern.

    Compatible (u, v, w) triples are tried in ascending order until one yields
    an acceptable point; under p >= 7 and d >= 5 the first one does in practice.

    Raises:
        ModulusError: p is not an odd prime.
        NoWitnessError: every compatible triple was exhausted.
    """
    p = _check_triple(a, b, c)
    within_theorem = p >= THEOREM_MIN_P and a.d >= THEOREM_MIN_D
    if not within_theorem:
        logging.warning(f"Solving outside the guaranteed range (p={p}, d={a.d}); result is best-effort")

    dependence = classify_dependence(a, b, c)
    excluded = {a, b, c}
    attempts = 0
    for u, v, w in compatible_triples(pattern, dependence, a, b, c):
        attempts += 1
        plan = build_plan(a, b, c, u, v, w, dependence)
        if plan is None:
            continue
        x = next((x for x in iter_plan_solutions(plan, a) if x not in excluded), None)
        if x is not None:
            logging.debug(f"Witness {x} for pattern {pattern} via (u,v,w)=({u},{v},{w}), {dependence.tag}, attempt {attempts}")
            return WitnessResult(x, plan, attempts, within_theorem)
        logging.debug(f"(u,v,w)=({u},{v},{w}) gave no acceptable point, trying next triple")

    if attempts == 0:
        raise NoCompatibleTripleError(f"no compatible (u,v,w) for pattern {pattern} over Z_{p}")
    raise NoWitnessError(f"no witness for pattern {pattern} after {attempts} (u,v,w) triples")


def count_quadratic_solutions(plan: WitnessPlan, a: Point, budget: int = DEFAULT_ENUMERATION_BUDGET) -> int:
    """Number of points X0 + sum lambda_i f_i with Q(X, A) = u, by full enumeration."""
    p = a.m
    size = p ** len(plan.basis)
    if size > budget:
        raise GraphSizeError(f"affine space of {size} points exceeds enumeration budget {budget}")
    return sum(1 for coeffs in itertools.product(range(p), repeat=len(plan.basis)) if quadrance(_combine(plan.x0, plan.basis, coeffs), a) == plan.u)


def verify_witness(x: Point, a: Point, b: Point, c: Point, pattern: Pattern3) -> bool:
    """Postcondition of find_witness."""
    if x in (a, b, c):
        return False
    return pattern.accepts(a.m, quadrance(x, a), quadrance(x, b), quadrance(x, c))
