"""Exhaustive enumeration, witness propagation, uniformity counting and oracles.

Small polynomials are checked by walking every assignment.  Larger
encodings are checked compositionally: only the free input groups are
enumerated, every component derives its outputs and auxiliaries from its
inputs, and each component type is certified once by exhaustive
enumeration of a variable-only copy (its zero set must be exactly the
graph of its ``solve`` routine).  Every candidate is finally evaluated on
the full polynomial.
"""
from __future__ import annotations

import itertools
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, MutableMapping, Sequence

from . import _backend
from .encodings import (
    MATRIX_GROUPS,
    DecodeError,
    Encoding,
    Permutation,
    Recipe,
    check_permutation,
    compose,
    inverse,
    power,
)
from .gadgets import Component, hamming_eq, parity_even, parity_odd, settle, threshold_ge
from .gates import eq_gate, gt_gate, gte_gate, neq_gate, swap_gate
from .poly import Bus, Const, QuadPoly, Var, VariableRegistry, poly_eval

DEFAULT_CAP = 24
BINARY_BUDGET = 1 << 12
PERM_BUDGET = 1 << 15


class CapExceeded(RuntimeError):
    pass


class CertificateError(RuntimeError):
    pass


def enum_cap() -> int:
    return int(os.environ.get("PERMQUBO_ENUM_CAP", DEFAULT_CAP))


def _masks_to_assignments(variables: Sequence[int], masks) -> list[dict[int, int]]:
    out = [tuple((int(m) >> i) & 1 for i in range(len(variables))) for m in masks]
    out.sort()
    return [dict(zip(variables, bits)) for bits in out]


def _check_cap(count: int) -> None:
    cap = enum_cap()
    if count > cap:
        raise CapExceeded(
            f"{count} variables exceed the enumeration cap of {cap}; "
            "use uniformity_check, which enumerates inputs and propagates witnesses"
        )


def zero_set_exhaustive(p: QuadPoly, variables: Iterable[int] | None = None) -> list[dict[int, int]]:
    """All zero assignments over ``variables`` (default: the polynomial's), lexicographic.

    Order: variables ascending, each assignment read as a 0/1 tuple.
    """
    variables = sorted(set(p.variables() if variables is None else variables))
    missing = set(p.variables()) - set(variables)
    if missing:
        raise ValueError(f"variables {sorted(missing)} of the polynomial are not enumerated")
    _check_cap(len(variables))
    cp = _backend.compile_poly(p, variables)
    _, masks = _backend.kernels.enumerate_level(
        cp.nvars, cp.offset, cp.lin, cp.indptr, cp.indices, cp.data, False, 0
    )
    return _masks_to_assignments(variables, masks)


def minimize_exhaustive(p: QuadPoly, variables: Iterable[int] | None = None) -> tuple[int, list[dict[int, int]]]:
    variables = sorted(set(p.variables() if variables is None else variables))
    _check_cap(len(variables))
    cp = _backend.compile_poly(p, variables)
    best, masks = _backend.kernels.enumerate_level(
        cp.nvars, cp.offset, cp.lin, cp.indptr, cp.indices, cp.data, True, 0
    )
    return int(best), _masks_to_assignments(variables, masks)


# --- decoding and witnesses -------------------------------------------------


def decode(asg: Mapping[int, int], e: Encoding):
    return e.decode(asg)


def _assign_bus(bus: Bus, value: int, asg: MutableMapping[int, int]) -> bool:
    if value >> bus.width:
        return False
    return all(settle(bit, (value >> b) & 1, asg) for b, bit in enumerate(bus))


def _assign_group(e: Encoding, name: str, values: Sequence[int], asg) -> bool:
    buses = e.groups[name]
    if name in MATRIX_GROUPS:
        return all(
            settle(bit, int(values[i] == j + 1), asg)
            for i, row in enumerate(buses)
            for j, bit in enumerate(row)
        )
    return all(_assign_bus(bus, v, asg) for bus, v in zip(buses, values))


def free_values(e: Encoding, obj) -> dict[str, tuple[int, ...]]:
    """Values of the free groups implied by a decoded solution."""
    kind = e.construction
    if kind in ("perm", "matrix"):
        pi = tuple(obj)
        out = {e.free[0]: pi}
        for g in e.free[1:]:
            out[g] = power(pi, int(g[1:]))
        return out
    if kind == "compose":
        pi, _, sigma = obj
        return _with_powers(e, pi, {"x": pi, "y": sigma})
    if kind == "commute":
        pi, pip = obj
        return _with_powers(e, pi, {"x": pi, "y": compose(pi, pip)})
    if kind == "conjugate":
        pi, pip, sigma = obj
        return _with_powers(e, pi, {"y": sigma, "z": compose(sigma, pi), "x'": pip})
    if kind == "match":
        if len(obj) == e.n and all(isinstance(v, int) for v in obj):
            occ = occurrences(obj, e.recipe.pattern)
            obj = (tuple(obj), occ[0] if occ else ())
        pi, chosen = obj
        return {"x": tuple(pi), "p": tuple(0 if i in chosen else 1 for i in range(1, e.n + 1))}
    if kind == "matrix_compose":
        pi, pip = obj[0], obj[1]
        return {"P": pi, "P'": pip}
    raise ValueError(f"unknown construction {kind!r}")


def _with_powers(e: Encoding, pi, out):
    for g in e.free:
        if g not in out:
            out[g] = power(pi, int(g[1:]))
    return out


def _propagate(components: Sequence[Component], asg, start: int = 0, strict: bool = True) -> tuple[int, bool]:
    """Run components in order from ``start`` while their inputs are known."""
    i = start
    while i < len(components):
        comp = components[i]
        if any(v not in asg for v in comp.input_vars()):
            break
        if not comp.solve(asg):
            if strict:
                return i, False
        i += 1
    return i, True


def witness(e: Encoding, obj) -> dict[int, int]:
    """Full assignment for a decoded solution by forward simulation.

    Every variable is set; for an object outside the relation the result
    is still total (undetermined bits default to 0) and evaluates above 0.
    """
    asg: dict[int, int] = {}
    for g, values in free_values(e, obj).items():
        if g == "p":
            _assign_bits(e, values, asg)
        else:
            _assign_group(e, g, values, asg)
    _propagate(e.components, asg, strict=False)
    for v in range(len(e.registry)):
        asg.setdefault(v, 0)
    return asg


def _assign_bits(e: Encoding, values, asg) -> bool:
    return all(settle(bus[0], v, asg) for bus, v in zip(e.groups["p"], values))


# --- certificates -----------------------------------------------------------


_CERTIFIED: dict[tuple, int] = {}


def _template(signature: tuple) -> Component:
    reg = VariableRegistry()
    kind = signature[0]

    def bus(name: str, w: int) -> Bus:
        return reg.new_bus(name, w, "input")

    if kind == "swap":
        w = signature[1]
        x1, x2 = bus("x1", w), bus("x2", w)
        c = Var(reg.new("c", "input"))
        return swap_gate(x1, x2, reg.new_bus("y1", w), reg.new_bus("y2", w), c, reg)
    if kind in ("gt", "gte", "eq", "neq"):
        w = signature[1]
        build = {"gt": gt_gate, "gte": gte_gate, "eq": eq_gate, "neq": neq_gate}[kind]
        return build(bus("x", w), bus("y", w), Var(reg.new("c", "output")), reg)
    if kind == "hamming":
        return hamming_eq(list(bus("b", signature[1])), signature[2])
    if kind == "threshold":
        return threshold_ge(list(bus("b", signature[1])), signature[2], reg)
    if kind in ("parity_even", "parity_odd"):
        build = parity_even if kind == "parity_even" else parity_odd
        return build(list(bus("b", signature[1])), reg)
    if kind == "matrix_entry":
        from .encodings import matrix_product_penalty

        # entry (0, 0) only reads row 0 of A and column 0 of B
        n = signature[1]
        zero = Bus.const(0, n)
        a = [bus("a", n)] + [zero] * (n - 1)
        col = [Var(reg.new(f"b{i}", "input")) for i in range(n)]
        b = [Bus((col[i],) + (Const(0),) * (n - 1)) for i in range(n)]
        s = [reg.new_bus(f"s{i}", n, "output") for i in range(n)]
        return matrix_product_penalty(s, a, b, reg)[0]
    if kind == "matrix_parity":
        from .encodings import matrix_parity_penalty

        n = signature[1]
        rows = [bus(f"p{i}", n) for i in range(n)]
        return matrix_parity_penalty(rows, signature[2], reg)
    raise CertificateError(f"no certificate template for {signature}")


def certify(signature: tuple) -> int:
    """Exhaustively check that a component type's zero set is the graph of ``solve``.

    Returns the number of template variables.  Cached per signature.
    """
    if signature in _CERTIFIED:
        return _CERTIFIED[signature]
    comp = _template(signature)
    poly = comp.poly
    variables = sorted(set(poly.variables()) | set(comp.input_vars()) | set(comp.aux)
                       | {b.id for b in comp.outputs if not isinstance(b, Const)})
    if len(variables) > enum_cap():
        raise CertificateError(
            f"{signature}: {len(variables)} template variables exceed the cap of {enum_cap()}"
        )
    best, zeros = minimize_exhaustive(poly, variables)
    if best < 0:
        raise CertificateError(f"{signature}: polynomial reaches {best} < 0")
    found = {tuple(a[v] for v in variables) for a in zeros} if best == 0 else set()
    expected = set()
    inputs = comp.input_vars()
    for values in itertools.product((0, 1), repeat=len(inputs)):
        asg = dict(zip(inputs, values))
        if comp.solve(asg):
            if any(v not in asg for v in variables):
                raise CertificateError(f"{signature}: solve leaves variables unset")
            expected.add(tuple(asg[v] for v in variables))
    if found != expected:
        raise CertificateError(
            f"{signature}: {len(found)} zeros vs {len(expected)} solve completions"
        )
    _CERTIFIED[signature] = len(variables)
    return len(variables)


# --- uniformity -------------------------------------------------------------


@dataclass
class ZeroSetReport:
    solutions: list[tuple[Any, int]]
    total_zero: int
    uniform: bool
    method: str = "exhaustive"
    domains: dict[str, str] = field(default_factory=dict)
    certificates: list[tuple] = field(default_factory=list)
    invalid: int = 0
    points: int = 0
    seconds: float = 0.0
    assignments: list[dict[int, int]] = field(default_factory=list, repr=False)

    @property
    def decoded(self) -> set:
        return {obj for obj, _ in self.solutions}

    def to_json(self) -> dict:
        return {
            "solutions": [[_jsonable(obj), c] for obj, c in self.solutions],
            "count": len(self.solutions),
            "total_zero": self.total_zero,
            "uniform": self.uniform,
            "method": self.method,
            "domains": dict(sorted(self.domains.items())),
            "certificates": [list(c) for c in self.certificates],
            "invalid": self.invalid,
            "points": self.points,
            "seconds": round(self.seconds, 3),
        }


def _jsonable(obj):
    if isinstance(obj, tuple):
        return [_jsonable(o) for o in obj]
    return obj


def _report(counts: Counter, invalid: int, **kw) -> ZeroSetReport:
    sols = sorted(counts.items(), key=lambda kv: repr(kv[0]))
    uniform = len({c for _, c in sols}) <= 1
    return ZeroSetReport(sols, sum(counts.values()) + invalid, uniform, invalid=invalid, **kw)


def _group_vars(e: Encoding, g: str) -> list[int]:
    return sorted({v for bus in e.groups[g] for v in bus.var_ids()})


def _choose_domains(e: Encoding) -> dict[str, str]:
    sizes = {g: 1 << len(_group_vars(e, g)) for g in e.free}
    perm_size = 1
    for i in range(2, e.n + 1):
        perm_size *= i

    def total(dom):
        out = 1
        for g in e.free:
            out *= sizes[g] if dom[g] == "binary" else perm_size
        return out

    binary = {g: "binary" for g in e.free}
    if total(binary) <= BINARY_BUDGET:
        return binary
    # groups that are not permutations (the selection bits) always stay binary
    mixed = {g: ("binary" if (i == 0 or g == "p") else "perm") for i, g in enumerate(e.free)}
    if total(mixed) <= BINARY_BUDGET:
        return mixed
    perms = {g: ("binary" if g == "p" else "perm") for g in e.free}
    if total(perms) <= PERM_BUDGET:
        return perms
    raise CapExceeded(f"{total(perms)} input points exceed the budget of {PERM_BUDGET}")


def _domain_values(e: Encoding, g: str, dom: str):
    if dom == "perm":
        return list(itertools.permutations(range(1, e.n + 1)))
    vids = _group_vars(e, g)
    return [dict(zip(vids, bits)) for bits in itertools.product((0, 1), repeat=len(vids))]


def uniformity_check(e: Encoding, method: str | None = None, collect: bool = False) -> ZeroSetReport:
    """Decoded zero set with the number of zero completions of each solution.

    ``collect`` keeps every zero assignment in the report.
    """
    t0 = time.perf_counter()
    nvars = len(e.registry)
    if method is None:
        method = "exhaustive" if nvars <= enum_cap() else "witness"
    counts: Counter = Counter()
    invalid = 0
    if method == "exhaustive":
        zeros = zero_set_exhaustive(e.poly, range(nvars))
        kept = zeros if collect else []
        for asg in zeros:
            try:
                counts[e.solution(asg)] += 1
            except DecodeError:
                invalid += 1
        return _report(counts, invalid, method="exhaustive", points=1 << nvars,
                       seconds=time.perf_counter() - t0, assignments=kept)

    sigs = sorted({c.signature for c in e.components}, key=repr)
    for s in sigs:
        certify(s)
    domains = _choose_domains(e)
    comps = e.components
    points = 0
    kept: list[dict[int, int]] = []

    def finish(asg):
        nonlocal invalid
        if len(asg) != nvars:
            missing = sorted(set(range(nvars)) - set(asg))[:5]
            raise RuntimeError(f"variables {missing} were not determined by any component")
        if poly_eval(e.poly, asg) != 0:
            return
        if collect:
            kept.append(asg)
        try:
            counts[e.solution(asg)] += 1
        except DecodeError:
            invalid += 1

    values = {g: _domain_values(e, g, domains[g]) for g in e.free}

    def dfs(level: int, asg: dict, cursor: int) -> None:
        nonlocal points
        cursor, ok = _propagate(comps, asg, cursor)
        if not ok:
            return
        if level == len(e.free):
            points += 1
            if cursor != len(comps):
                raise RuntimeError(f"component {comps[cursor].kind} never became ready")
            finish(asg)
            return
        g = e.free[level]
        for v in values[g]:
            a2 = dict(asg)
            if isinstance(v, dict):
                ok = all(settle(Var(vid), bit, a2) for vid, bit in v.items())
            elif g == "p":
                ok = _assign_bits(e, v, a2)
            else:
                ok = _assign_group(e, g, v, a2)
            if ok:
                dfs(level + 1, a2, cursor)

    dfs(0, {}, 0)
    return _report(counts, invalid, method="witness", domains=domains, certificates=sigs,
                   points=points, seconds=time.perf_counter() - t0, assignments=kept)


# --- oracles ----------------------------------------------------------------


def inversions(p: Sequence[int]) -> int:
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


def occurrences(p: Sequence[int], pattern: Sequence[int]) -> list[tuple[int, ...]]:
    """1-based position tuples where ``p`` contains ``pattern``."""
    ell = len(pattern)
    order = sorted(range(ell), key=lambda i: pattern[i])
    out = []
    for pos in itertools.combinations(range(len(p)), ell):
        vals = [p[i] for i in pos]
        if sorted(range(ell), key=lambda i: vals[i]) == order:
            out.append(tuple(i + 1 for i in pos))
    return out


def _satisfies(pi: Permutation, constraints: Sequence[tuple]) -> bool:
    n = len(pi)
    ident = tuple(range(1, n + 1))
    for c in constraints:
        kind = c[0]
        if kind == "value" and pi[c[1] - 1] != c[2]:
            return False
        if kind == "fixed_point" and pi[c[1] - 1] != c[1]:
            return False
        if kind == "forbid" and pi[c[1] - 1] == c[2]:
            return False
        if kind == "derangement" and any(pi[i] == i + 1 for i in range(n)):
            return False
        if kind == "forbid_perm" and pi == tuple(c[1]):
            return False
        if kind == "involution" and power(pi, 2) != ident:
            return False
        if kind == "parity" and inversions(pi) % 2 != (0 if c[1] == "even" else 1):
            return False
        if kind == "power" and power(pi, int(c[1])) != ident:
            return False
        if kind == "order":
            r = int(c[1])
            if power(pi, r) != ident or any(power(pi, t) == ident for t in range(1, r)):
                return False
    return True


def oracle(target: Recipe | Encoding, n: int | None = None) -> set:
    """Direct enumeration over S_n of the relation an encoding is meant to represent.

    Objects have the same shape as :meth:`Encoding.solution`; pattern
    matching yields the permutations containing the pattern.
    """
    recipe = target.recipe if isinstance(target, Encoding) else target
    n = recipe.n if n is None else n
    if n > 6:
        raise ValueError("oracles enumerate S_n and are limited to n <= 6")
    fixed = dict(recipe.fixed)
    sn = [p for p in itertools.permutations(range(1, n + 1))]
    base = [p for p in sn if _satisfies(p, recipe.constraints)]
    kind = recipe.construction
    if kind in ("perm", "matrix"):
        return set(base)
    if kind in ("compose", "matrix_compose"):
        return {(a, b, compose(a, b)) for a in base for b in sn}
    if kind == "commute":
        return {
            (a, b) for a in base for b in sn
            if compose(a, b) == compose(b, a) and fixed.get("x'", b) == b
        }
    if kind == "conjugate":
        return {
            (a, compose(compose(s, a), inverse(s)), s)
            for a in base for s in sn if fixed.get("x", a) == a
        }
    if kind == "match":
        return {p for p in base if occurrences(p, recipe.pattern)}
    raise ValueError(f"unknown construction {kind!r}")


def oracle_for(name: str, n: int, *args) -> set:
    """Oracle by constraint name, e.g. ``oracle_for("derangement", 4)``."""
    if name in ("compose", "commute", "conjugate"):
        return oracle(Recipe(name, n))
    if name == "match":
        return oracle(Recipe("match", n, pattern=check_permutation(args[0])))
    if name == "perm":
        return oracle(Recipe("perm", n))
    return oracle(Recipe("perm", n).with_constraint(name, *args))
