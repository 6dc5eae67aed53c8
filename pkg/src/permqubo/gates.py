"""Quadratic gate polynomials: controlled swap, comparisons, compare-exchange.

Buses are least-significant-bit first; bit ``j`` in the comparison
formulas (1 = least significant, ``k`` = most) is ``bus[j - 1]``.
Constant bits are folded as the polynomial is built and products that
collapse to a literal never get an auxiliary, so ``aux`` can be shorter
than ``aux_formula`` for buses that mix in constants.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import MutableMapping

from .gadgets import Component, settle
from .poly import (
    Bit,
    Bus,
    LinExpr,
    QuadPoly,
    Var,
    VariableRegistry,
    bit_value,
    lin_mul,
    lin_square,
    lin_sum,
    negate,
)
from .quadratize import ProductTable, Substitution

GT, GTE, LT, LTE, EQ, NEQ = "gt", "gte", "lt", "lte", "eq", "neq"


@dataclass
class GateBuild(Component):
    control: Bit | None = None
    parts: tuple[Component, ...] = ()
    substitutions: tuple[Substitution, ...] = ()
    aux_formula: int = 0

    def leaves(self) -> list[Component]:
        if not self.parts:
            return [self]
        out: list[Component] = []
        for p in self.parts:
            out.extend(p.leaves() if isinstance(p, GateBuild) else [p])
        return out


def _auto(reg: VariableRegistry, base: str) -> str:
    return f"{base}#{len(reg)}"


def _check_widths(*buses: Bus) -> int:
    widths = {b.width for b in buses}
    if len(widths) != 1:
        raise ValueError(f"bus width mismatch: {sorted(widths)}")
    k = widths.pop()
    if k < 1:
        raise ValueError("buses must have at least one bit")
    return k


def _fill_products(table: ProductTable, asg: MutableMapping[int, int]) -> None:
    for a, b, z in table.pending:
        asg[z] = bit_value(a, asg) * bit_value(b, asg)


def _need(bus: Bus, asg) -> int:
    v = bus.value(asg)
    if v is None:
        raise RuntimeError("gate evaluated before its inputs were assigned")
    return v


def swap_gate(
    x1: Bus, x2: Bus, y1: Bus, y2: Bus, c: Bit, reg: VariableRegistry, name: str | None = None
) -> GateBuild:
    """Controlled swap: ``(y1, y2) = (x1, x2)`` if ``c == 0`` else ``(x2, x1)``.

    Bitwise ``(y1 - g(x1, x2, c))**2 + (y2 - g(x2, x1, c))**2`` with
    ``g(u, v, c) = u - c*u + c*v``; ``c*x1`` and ``c*x2`` are substituted per bit.
    """
    k = _check_widths(x1, x2, y1, y2)
    name = name or _auto(reg, "swap")
    table = ProductTable(reg)
    body = []
    for b in range(k):
        a = table.product(c, x1[b], f"{name}.a[{b}]")
        s = table.product(c, x2[b], f"{name}.b[{b}]")
        body.append(lin_square(LinExpr.of(y1[b]) - x1[b] + a - s))
        body.append(lin_square(LinExpr.of(y2[b]) - x2[b] + s - a))
    poly, subs = table.finish(QuadPoly.sum(body))

    def solve(asg):
        cv = bit_value(c, asg)
        if cv is None:
            raise RuntimeError("swap evaluated before its control was assigned")
        v1, v2 = _need(x1, asg), _need(x2, asg)
        if cv:
            v1, v2 = v2, v1
        for b in range(k):
            if not settle(y1[b], (v1 >> b) & 1, asg) or not settle(y2[b], (v2 >> b) & 1, asg):
                return False
        _fill_products(table, asg)
        return True

    return GateBuild(
        "swap", ("swap", 1), poly,
        tuple(x1) + tuple(x2) + (c,), tuple(y1) + tuple(y2), tuple(table.aux), solve,
        control=c, substitutions=tuple(subs), aux_formula=2 * k,
    )


def _compare(x: Bus, y: Bus, c: Bit, reg: VariableRegistry, mode: str, name: str | None) -> GateBuild:
    k = _check_widths(x, y)
    name = name or _auto(reg, mode)
    table = ProductTable(reg)
    equality = mode in (EQ, NEQ)

    # p[0]: x == y; p[i]: the highest differing bit is bit i
    if equality:
        sel: list[Bit] = [c if mode == EQ else negate(c)]
        sel += [Var(reg.new(f"{name}.p[{i}]", "auxiliary")) for i in range(1, k + 1)]
    else:
        sel = [Var(reg.new(f"{name}.p[{i}]", "auxiliary")) for i in range(k + 1)]
    selectors = [s.id for s in sel[1 if equality else 0:]]

    def xb(j: int) -> Bit:
        return x[j - 1]

    def yb(j: int) -> Bit:
        return y[j - 1]

    d = {j: table.product(xb(j), yb(j), f"{name}.d[{j}]") for j in range(1, k + 1)}

    body = [lin_square(lin_sum(sel) - 1)]
    for i in range(k + 1):
        g = lin_sum(LinExpr.of(xb(j)) + yb(j) - LinExpr.of(d[j]) * 2 for j in range(i + 1, k + 1))
        body.append(lin_mul(sel[i], g))
    if equality:
        # without the bit comparison, p[i] must still see bit i differ
        for i in range(1, k + 1):
            xor = LinExpr.of(xb(i)) + yb(i) - LinExpr.of(d[i]) * 2
            body.append(lin_mul(sel[i], 1 - xor))
    else:
        for i in range(1, k + 1):
            e = table.product(sel[i], c, f"{name}.e[{i}]")
            diff = LinExpr.of(xb(i)) - yb(i)
            body.append(lin_mul(sel[i], diff + 1))
            body.append(lin_mul(e, diff) * -2)
        body.append(lin_mul(c, sel[0]) if mode == GT else lin_mul(LinExpr.of(1) - c, sel[0]))
    poly, subs = table.finish(QuadPoly.sum(body))

    def solve(asg):
        xv, yv = _need(x, asg), _need(y, asg)
        if mode == GT:
            cv = xv > yv
        elif mode == GTE:
            cv = xv >= yv
        elif mode == EQ:
            cv = xv == yv
        else:
            cv = xv != yv
        if not settle(c, int(cv), asg):
            return False
        top = (xv ^ yv).bit_length()
        for i, s in enumerate(sel):
            if not settle(s, int(i == top), asg):
                return False
        _fill_products(table, asg)
        return True

    aux = tuple(selectors) + tuple(table.aux)
    formula = 2 * k + 1 if equality else 3 * k + 1
    return GateBuild(
        mode, (mode, k), poly, tuple(x) + tuple(y), (c,), aux, solve,
        control=c, substitutions=tuple(subs), aux_formula=formula,
    )


def gt_gate(x: Bus, y: Bus, c: Bit, reg: VariableRegistry, name: str | None = None) -> GateBuild:
    """``c = [x > y]``."""
    return _compare(x, y, c, reg, GT, name)


def gte_gate(x: Bus, y: Bus, c: Bit, reg: VariableRegistry, name: str | None = None) -> GateBuild:
    """``c = [x >= y]``: the equality selector is charged ``(1 - c) p0`` instead of ``c p0``."""
    return _compare(x, y, c, reg, GTE, name)


def lt_gate(x: Bus, y: Bus, c: Bit, reg: VariableRegistry, name: str | None = None) -> GateBuild:
    g = _compare(y, x, c, reg, GT, name or _auto(reg, LT))
    g.kind = LT
    return g


def lte_gate(x: Bus, y: Bus, c: Bit, reg: VariableRegistry, name: str | None = None) -> GateBuild:
    g = _compare(y, x, c, reg, GTE, name or _auto(reg, LTE))
    g.kind = LTE
    return g


def eq_gate(x: Bus, y: Bus, c: Bit, reg: VariableRegistry, name: str | None = None) -> GateBuild:
    """``c = [x == y]``; the equality selector is the literal ``c`` itself."""
    return _compare(x, y, c, reg, EQ, name)


def neq_gate(x: Bus, y: Bus, c: Bit, reg: VariableRegistry, name: str | None = None) -> GateBuild:
    """``c = [x != y]``; the equality selector is the literal ``1 - c``."""
    return _compare(x, y, c, reg, NEQ, name)


def keyed_ce_gate(
    x1: Bus,
    x2: Bus,
    key_width: int,
    reg: VariableRegistry,
    y1: Bus | None = None,
    y2: Bus | None = None,
    c: Bit | None = None,
    name: str | None = None,
) -> GateBuild:
    """Compare the top ``key_width`` bits, swap all of them.

    Missing outputs and control are allocated fresh (outputs as auxiliaries,
    the control with role ``control``).
    """
    k = _check_widths(x1, x2)
    if not 1 <= key_width <= k:
        raise ValueError(f"key width {key_width} outside 1..{k}")
    name = name or _auto(reg, "ce")
    if c is None:
        c = Var(reg.new(f"{name}.c", "control"))
    if y1 is None:
        y1 = reg.new_bus(f"{name}.y1", k)
    if y2 is None:
        y2 = reg.new_bus(f"{name}.y2", k)
    _check_widths(x1, y1, y2)
    gt = gt_gate(x1.high(key_width), x2.high(key_width), c, reg, f"{name}.gt")
    sw = swap_gate(x1, x2, y1, y2, c, reg, f"{name}.swap")

    def solve(asg):
        return gt.solve(asg) and sw.solve(asg)

    keyed = key_width < k
    return GateBuild(
        "keyed_ce" if keyed else "ce", ("keyed_ce", k, key_width) if keyed else ("ce", k),
        gt.poly + sw.poly,
        tuple(x1) + tuple(x2), tuple(y1) + tuple(y2) + (c,), gt.aux + sw.aux, solve,
        control=c, parts=(gt, sw), aux_formula=2 * k + 3 * key_width + 1,
    )


def ce_gate(
    x1: Bus,
    x2: Bus,
    reg: VariableRegistry,
    y1: Bus | None = None,
    y2: Bus | None = None,
    c: Bit | None = None,
    name: str | None = None,
) -> GateBuild:
    """Compare-exchange: the sum of a GT and a SWAP sharing the control bit."""
    return keyed_ce_gate(x1, x2, x1.width, reg, y1, y2, c, name)
