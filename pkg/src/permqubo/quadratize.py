"""Degree reduction: negative-monomial reduction and product substitution."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .poly import (
    Bit,
    Const,
    LinExpr,
    QuadPoly,
    Var,
    VariableRegistry,
    lin_mul,
)


@dataclass(frozen=True)
class Monomial:
    coefficient: int
    vars: frozenset[int]

    def __post_init__(self) -> None:
        if not self.vars:
            raise ValueError("monomial needs at least one variable")
        if self.coefficient == 0:
            raise ValueError("monomial coefficient must be non-zero")

    @property
    def degree(self) -> int:
        return len(self.vars)


@dataclass(frozen=True)
class Substitution:
    """``replacement`` stands for the product of the two ``product`` literals."""

    product: tuple[Bit, Bit]
    replacement: int
    alpha: int


def reduce_negative_monomial(m: Monomial, reg: VariableRegistry, name: str | None = None) -> QuadPoly:
    """Replace ``-|c| * prod(x)`` by ``|c| * z * (2t - 1 - 2 * sum(x))`` with a fresh ``z``.

    The minimum over ``z`` equals the monomial, attained only at ``z = prod(x)``.
    """
    if m.coefficient >= 0:
        raise ValueError("monomial coefficient must be negative")
    t = m.degree
    if t < 3:
        raise ValueError(f"degree {t} monomial is already quadratic")
    z = reg.new(name or f"neg[{len(reg)}]", "auxiliary")
    inner = LinExpr(2 * t - 1, {v: -2 for v in m.vars})
    return lin_mul(Var(z), inner) * (-m.coefficient)


def product_penalty(s: Substitution) -> QuadPoly:
    """``alpha * (a*b - z*(2a + 2b - 3))``: zero iff ``z == a*b``, otherwise at least ``alpha``."""
    if s.alpha < 1:
        raise ValueError("penalty weight must be at least 1")
    a, b = s.product
    z = Var(s.replacement)
    inner = lin_mul(a, b) - lin_mul(z, LinExpr.of(a) * 2 + LinExpr.of(b) * 2 - 3)
    return inner * s.alpha


def choose_alpha(monomials: Iterable[Monomial | int]) -> int:
    """One more than the total absolute weight of the monomials sharing a product."""
    coefs = [m.coefficient if isinstance(m, Monomial) else m for m in monomials]
    if not coefs:
        raise ValueError("need at least one monomial")
    return 1 + sum(abs(c) for c in coefs)


def alpha_for(poly: QuadPoly, var: int) -> int:
    """``choose_alpha`` over every term of ``poly`` that contains ``var``."""
    weight = abs(poly.linear.get(var, 0))
    for (i, j), c in poly.quadratic.items():
        if i == var or j == var:
            weight += abs(c)
    return 1 + weight


def literal_product(a: Bit, b: Bit, reg: VariableRegistry, name: str) -> tuple[Bit, bool]:
    """Bit standing for ``a*b``; allocates an auxiliary only when the product is not trivially a literal.

    Returns ``(bit, allocated)``.
    """
    if isinstance(a, Const):
        return (b if a.value else Const(0)), False
    if isinstance(b, Const):
        return (a if b.value else Const(0)), False
    if a.id == b.id:
        return (a, False) if type(a) is type(b) else (Const(0), False)
    return Var(reg.new(name, "auxiliary")), True


class ProductTable:
    """Named product substitutions of one gadget, weighted once it is assembled."""

    def __init__(self, reg: VariableRegistry) -> None:
        self.reg = reg
        self.pending: list[tuple[Bit, Bit, int]] = []

    def product(self, a: Bit, b: Bit, name: str) -> Bit:
        bit, allocated = literal_product(a, b, self.reg, name)
        if allocated:
            self.pending.append((a, b, bit.id))
        return bit

    @property
    def aux(self) -> list[int]:
        return [z for _, _, z in self.pending]

    def finish(self, body: QuadPoly) -> tuple[QuadPoly, list[Substitution]]:
        """Add every penalty to ``body`` with ``alpha`` taken from ``body``'s own terms."""
        subs = [Substitution((a, b), z, alpha_for(body, z)) for a, b, z in self.pending]
        return QuadPoly.sum([body, *(product_penalty(s) for s in subs)]), subs


def quadratize_poly(
    terms: Mapping[Iterable[int], int],
    reg: VariableRegistry,
    offset: int = 0,
) -> tuple[QuadPoly, list[Substitution]]:
    """Quadratize a multilinear polynomial given as ``{vars: coefficient}``.

    Negative monomials of degree >= 3 get one auxiliary each.  Positive ones
    are reduced by repeatedly substituting the variable pair that occurs in
    the most remaining high-degree monomials (ties: smallest pair).
    """
    mono: dict[frozenset[int], int] = {}
    for vs, c in terms.items():
        key = frozenset(vs)
        if c:
            mono[key] = mono.get(key, 0) + c
    mono = {k: c for k, c in mono.items() if c}

    out = QuadPoly(offset + mono.pop(frozenset(), 0))
    for key in [k for k, c in mono.items() if len(k) >= 3 and c < 0]:
        out._acc_poly(reduce_negative_monomial(Monomial(mono.pop(key), key), reg))

    subs: list[Substitution] = []
    while True:
        high = [k for k in mono if len(k) >= 3]
        if not high:
            break
        counts: Counter[tuple[int, int]] = Counter()
        for k in high:
            vs = sorted(k)
            for a in range(len(vs)):
                for b in range(a + 1, len(vs)):
                    counts[(vs[a], vs[b])] += 1
        top = max(counts.values())
        i, j = min(p for p, c in counts.items() if c == top)
        touched = [k for k in high if i in k and j in k]
        alpha = choose_alpha([mono[k] for k in touched])
        z = reg.new(f"prod[{i},{j}]#{len(reg)}", "auxiliary")
        for k in touched:
            c = mono.pop(k)
            nk = (k - {i, j}) | {z}
            mono[nk] = mono.get(nk, 0) + c
            if mono[nk] == 0:
                del mono[nk]
        s = Substitution((Var(i), Var(j)), z, alpha)
        subs.append(s)
        out._acc_poly(product_penalty(s))

    for k, c in mono.items():
        vs = sorted(k)
        if len(vs) == 1:
            out._acc_linear(vs[0], c)
        else:
            out._acc_quad(vs[0], vs[1], c)
    return out._prune(), subs


def eval_multilinear(terms: Mapping[Iterable[int], int], asg: Mapping[int, int], offset: int = 0) -> int:
    total = offset
    for vs, c in terms.items():
        if all(asg[v] for v in vs):
            total += c
    return total

