"""Permutation encodings built from compare-exchange networks, plus the matrix baseline.

Every encoding is rebuilt deterministically from a :class:`Recipe`, so
adding a constraint returns a fresh :class:`Encoding` rather than mutating
one, and an instance file's ``meta`` block is enough to reconstruct it.

Conventions: permutations are tuples of images ``(pi(1), ..., pi(n))``;
position and value indices in the public API are 1-based; products are
read left to right, ``(pi pi')(i) = pi'(pi(i))``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

from .gadgets import (
    Component,
    hamming_eq,
    parity_even,
    parity_odd,
    settle,
    threshold_ge,
    xor_literal,
)
from .networks import NetworkBuild, NetworkTopology, make_topology, network_poly
from .poly import (
    Bit,
    Bus,
    Const,
    LinExpr,
    QuadPoly,
    Var,
    VariableRegistry,
    bit_value,
    bus_concat,
    lin_square,
    lin_sum,
)
from .quadratize import ProductTable

Permutation = tuple[int, ...]
MATRIX_GROUPS = ("P", "P'", "S")

CONSTRUCTIONS = ("perm", "compose", "commute", "conjugate", "match", "matrix", "matrix_compose")
CONSTRAINTS = (
    "value", "forbid", "fixed_point", "derangement", "forbid_perm",
    "involution", "parity", "power", "order",
)


class DecodeError(ValueError):
    def __init__(self, position: int, value: int | None, group: str = "x") -> None:
        super().__init__(f"group {group!r} position {position} holds {value}, outside 1..n")
        self.position = position
        self.value = value
        self.group = group


def bit_width(n: int) -> int:
    """Bits needed for the values ``1..n``."""
    return max(1, n.bit_length())


def check_permutation(p: Sequence[int], n: int | None = None) -> Permutation:
    p = tuple(int(v) for v in p)
    n = len(p) if n is None else n
    if len(p) != n or sorted(p) != list(range(1, n + 1)):
        raise ValueError(f"{p} is not a permutation of 1..{n}")
    return p


# --- permutation algebra, shared with the oracles ---------------------------


def compose(first: Sequence[int], then: Sequence[int]) -> Permutation:
    """``first`` then ``then``: ``i -> then(first(i))``."""
    return tuple(then[v - 1] for v in first)


def inverse(p: Sequence[int]) -> Permutation:
    out = [0] * len(p)
    for i, v in enumerate(p, 1):
        out[v - 1] = i
    return tuple(out)


def power(p: Sequence[int], r: int) -> Permutation:
    out = tuple(range(1, len(p) + 1))
    for _ in range(r):
        out = compose(out, p)
    return out


# --- recipes ----------------------------------------------------------------


@dataclass(frozen=True)
class Recipe:
    construction: str
    n: int
    topology: str = "batcher"
    k: int | None = None
    constraints: tuple[tuple, ...] = ()
    pattern: Permutation | None = None
    fixed: tuple[tuple[str, Permutation], ...] = ()

    def with_constraint(self, *item: Any) -> "Recipe":
        return replace(self, constraints=self.constraints + (tuple(item),))

    def with_fixed(self, group: str, perm: Sequence[int]) -> "Recipe":
        return replace(self, fixed=self.fixed + ((group, check_permutation(perm, self.n)),))

    def to_meta(self) -> dict:
        meta: dict[str, Any] = {
            "construction": self.construction,
            "n": self.n,
            "constraints": [list(c) for c in self.constraints],
        }
        if self.construction not in ("matrix", "matrix_compose"):
            meta["topology"] = self.topology
        if self.k is not None:
            meta["k_override"] = self.k
        if self.pattern is not None:
            meta["pattern"] = list(self.pattern)
        if self.fixed:
            meta["fixed"] = {g: list(p) for g, p in self.fixed}
        return meta

    @classmethod
    def from_meta(cls, meta: Mapping) -> "Recipe":
        constraints = []
        for c in meta.get("constraints", []):
            c = list(c)
            if c and c[0] == "forbid_perm":
                c = [c[0], tuple(c[1])]
            constraints.append(tuple(c))
        return cls(
            meta["construction"],
            int(meta["n"]),
            meta.get("topology", "batcher"),
            meta.get("k_override"),
            tuple(constraints),
            tuple(meta["pattern"]) if meta.get("pattern") is not None else None,
            tuple((g, tuple(p)) for g, p in sorted(meta.get("fixed", {}).items())),
        )


@dataclass
class Encoding:
    """A polynomial plus what is needed to decode and re-derive its zeros.

    ``groups`` maps a group name to its ``n`` buses (``x`` is pi).  ``decoded``
    lists the groups that make up a decoded solution; ``free`` the groups a
    verifier enumerates, every other variable follows from ``components``.
    """

    recipe: Recipe
    poly: QuadPoly
    registry: VariableRegistry
    n: int
    k: int
    groups: dict[str, list[Bus]]
    decoded: tuple[str, ...]
    free: tuple[str, ...]
    components: list[Component]
    networks: list[NetworkBuild] = field(default_factory=list)
    selection: list[Bit] | None = None
    uniform_expected: bool = True
    topology: NetworkTopology | None = None

    @property
    def construction(self) -> str:
        return self.recipe.construction

    @property
    def meta(self) -> dict:
        meta = self.recipe.to_meta()
        meta["k"] = self.k
        if self.topology is not None:
            meta["gates"] = [list(g) for g in self.topology.gates]
        return meta

    def decode(self, asg: Mapping[int, int]):
        """Permutation, tuple of permutations, or ``(permutation, selected positions)``."""
        perms = tuple(self.decode_group(g, asg) for g in self.decoded)
        if self.selection is not None:
            chosen = tuple(i for i, b in enumerate(self.selection, 1) if bit_value(b, asg) == 0)
            return (perms[0], chosen)
        return perms[0] if len(perms) == 1 else perms

    def solution(self, asg: Mapping[int, int]):
        """What a zero counts towards: the decoded object, minus the selection for pattern matching."""
        obj = self.decode(asg)
        return obj[0] if self.selection is not None else obj

    def decode_group(self, group: str, asg: Mapping[int, int]) -> Permutation:
        if group in MATRIX_GROUPS:
            return _decode_matrix(self.groups[group], asg, self.n, group)
        out = []
        for i, bus in enumerate(self.groups[group], 1):
            v = bus.value(asg)
            if v is None or not 1 <= v <= self.n:
                raise DecodeError(i, v, group)
            out.append(v)
        return tuple(out)


def _decode_matrix(rows: list[Bus], asg, n: int, group: str) -> Permutation:
    out = []
    for i, row in enumerate(rows, 1):
        ones = [j for j, b in enumerate(row, 1) if bit_value(b, asg)]
        if len(ones) != 1:
            raise DecodeError(i, None, group)
        out.append(ones[0])
    return tuple(out)


# --- builder ----------------------------------------------------------------


class _Builder:
    def __init__(self, recipe: Recipe) -> None:
        n = recipe.n
        if n < 2 and recipe.construction not in ("matrix",):
            raise ValueError(f"n must be at least 2, got {n}")
        if n < 1:
            raise ValueError(f"n must be at least 1, got {n}")
        self.recipe = recipe
        self.n = n
        self.k = recipe.k if recipe.k is not None else bit_width(n)
        if self.k < bit_width(n):
            raise ValueError(f"k={self.k} cannot hold the values 1..{n}")
        self.reg = VariableRegistry()
        self.components: list[Component] = []
        self.networks: list[NetworkBuild] = []
        self.polys: list[QuadPoly] = []
        self.groups: dict[str, list[Bus]] = {}
        self.fixed = dict(recipe.fixed)
        self.perm_net: NetworkBuild | None = None
        self.topology: NetworkTopology | None = None
        if recipe.construction not in ("matrix", "matrix_compose"):
            self.topology = make_topology(recipe.topology, n)

    # groups
    def group(self, name: str, role: str = "input") -> list[Bus]:
        if name in self.groups:
            return self.groups[name]
        n, k = self.n, self.k
        values: dict[int, int] = {}
        if name in self.fixed:
            values = {i: v for i, v in enumerate(self.fixed[name], 1)}
        elif name == "x":
            for c in self.recipe.constraints:
                if c[0] in ("value", "fixed_point"):
                    i = _index(c[1], n)
                    j = i if c[0] == "fixed_point" else _index(c[2], n)
                    if values.get(i, j) != j:
                        raise ValueError(f"conflicting values for position {i}")
                    values[i] = j
        buses = []
        for i in range(1, n + 1):
            if i in values:
                buses.append(Bus.const(values[i], k))
            else:
                buses.append(self.reg.new_bus(f"{name}[{i}]", k, role))
        self.groups[name] = buses
        return buses

    def ident(self) -> list[Bus]:
        return [Bus.const(i, self.k) for i in range(1, self.n + 1)]

    def add(self, comp: Component) -> None:
        self.components.append(comp)
        self.polys.append(comp.poly)

    def network(self, inputs, outputs, key_width=None, name=None, topology=None, controls=None) -> NetworkBuild:
        nb = network_poly(
            topology or self.topology, inputs, outputs, self.reg,
            key_width=key_width, controls=controls, control_role="control", name=name,
        )
        self.networks.append(nb)
        self.components.extend(nb.components())
        self.polys.append(nb.poly)
        return nb

    def keyed(self, key: list[Bus], payloads: Sequence[list[Bus]], out_key: list[Bus],
              out_payloads: Sequence[list[Bus]], name: str) -> NetworkBuild:
        def pack(keys, pays):
            return [functools.reduce(bus_concat, [keys[i]] + [p[i] for p in pays]) for i in range(self.n)]

        return self.network(pack(key, payloads), pack(out_key, out_payloads), key_width=self.k, name=name)

    def perm(self, name: str = "perm") -> NetworkBuild:
        self.perm_net = self.network(self.group("x"), self.ident(), name=name)
        return self.perm_net

    # constraints on x (and helpers reused on other groups)
    def forbid_value(self, bus: Bus, j: int) -> None:
        lits = [xor_literal(bit, (j >> b) & 1) for b, bit in enumerate(bus)]
        self.add(threshold_ge(lits, 1, self.reg, f"forbid#{len(self.reg)}"))

    def forbid_perm(self, buses: list[Bus], tau: Permutation) -> None:
        lits = [
            xor_literal(bit, (tau[i] >> b) & 1)
            for i, bus in enumerate(buses)
            for b, bit in enumerate(bus)
        ]
        self.add(threshold_ge(lits, 1, self.reg, f"forbid_perm#{len(self.reg)}"))

    def involution(self) -> None:
        x = self.group("x")
        self.keyed(x, [self.ident()], self.ident(), [x], "invol")

    def power_identity(self, r: int) -> list[list[Bus]]:
        if r < 2:
            raise ValueError(f"r must be at least 2, got {r}")
        x = self.group("x")
        if r == 2:
            self.involution()
            return [x]
        mids = [self.group(f"x{t}", "auxiliary") for t in range(2, r)]
        self.keyed(x, mids + [self.ident()], self.ident(), [x] + mids, f"pow{r}")
        return [x] + mids

    def apply_constraints(self) -> None:
        n = self.n
        x = self.group("x")
        for c in self.recipe.constraints:
            kind = c[0]
            if kind in ("value", "fixed_point"):
                continue  # folded into the x buses
            if kind == "forbid":
                self.forbid_value(x[_index(c[1], n) - 1], _index(c[2], n))
            elif kind == "derangement":
                for i in range(1, n + 1):
                    self.forbid_value(x[i - 1], i)
            elif kind == "forbid_perm":
                self.forbid_perm(x, check_permutation(c[1], n))
            elif kind == "involution":
                self.involution()
            elif kind == "parity":
                if self.perm_net is None:
                    raise ValueError("parity needs the permutation network")
                if c[1] not in ("even", "odd"):
                    raise ValueError(f"parity must be 'even' or 'odd', got {c[1]!r}")
                build = parity_even if c[1] == "even" else parity_odd
                self.add(build(self.perm_net.controls, self.reg, f"parity#{len(self.reg)}"))
            elif kind == "power":
                self.power_identity(int(c[1]))
            elif kind == "order":
                groups = self.power_identity(int(c[1]))
                ident = tuple(range(1, n + 1))
                for g in groups:
                    self.forbid_perm(g, ident)
            else:
                raise ValueError(f"unknown constraint {kind!r}")

    def finish(self, decoded, free, selection=None, uniform=True) -> Encoding:
        return Encoding(
            self.recipe, QuadPoly.sum(self.polys), self.reg, self.n, self.k, self.groups,
            tuple(decoded), tuple(free), self.components, self.networks, selection,
            uniform, self.topology,
        )


def _index(i: int, n: int) -> int:
    i = int(i)
    if not 1 <= i <= n:
        raise ValueError(f"index {i} outside 1..{n}")
    return i


def build(recipe: Recipe) -> Encoding:
    """Build the encoding a recipe describes."""
    kind = recipe.construction
    if kind == "perm":
        b = _Builder(recipe)
        b.perm()
        b.apply_constraints()
        return b.finish(["x"], ["x"] + _extra_free(b))
    if kind == "compose":
        b = _Builder(recipe)
        x, y, xp = b.group("x"), b.group("y"), b.group("x'")
        b.perm()
        b.keyed(x, [y], b.ident(), [xp], "compose")
        b.network(xp, b.ident(), name="perm'")
        b.apply_constraints()
        return b.finish(["x", "x'", "y"], ["x", "y"] + _extra_free(b))
    if kind == "commute":
        b = _Builder(recipe)
        x, xp, y = b.group("x"), b.group("x'"), b.group("y", "auxiliary")
        b.perm()
        b.keyed(x, [y], b.ident(), [xp], "commute1")
        b.keyed(xp, [y], b.ident(), [x], "commute2")
        b.apply_constraints()
        return b.finish(["x", "x'"], ["x", "y"] + _extra_free(b))
    if kind == "conjugate":
        b = _Builder(recipe)
        y, z = b.group("y"), b.group("z", "auxiliary")
        x, xp = b.group("x"), b.group("x'")
        b.keyed(y, [z], b.ident(), [x], "conj1")
        b.perm()
        b.keyed(xp, [z], b.ident(), [y], "conj2")
        b.apply_constraints()
        return b.finish(["x", "x'", "y"], ["y", "z", "x'"] + _extra_free(b))
    if kind == "match":
        return _build_match(recipe)
    if kind == "matrix":
        return _build_matrix(recipe)
    if kind == "matrix_compose":
        return _build_matrix_compose(recipe)
    raise ValueError(f"unknown construction {kind!r}")


def _extra_free(b: _Builder) -> list[str]:
    return sorted((g for g in b.groups if g.startswith("x") and g[1:].isdigit()), key=lambda g: int(g[1:]))


# --- public constructors ----------------------------------------------------


def perm_encoding(n: int, topology_kind: str = "batcher", k: int | None = None) -> Encoding:
    """Permutations of ``1..n``: a sorting network whose outputs are the constants ``1..n``."""
    return build(Recipe("perm", n, topology_kind, k))


def _extend(e: Encoding, *item: Any) -> Encoding:
    return build(e.recipe.with_constraint(*item))


def constrain_value(e: Encoding, i: int, j: int) -> Encoding:
    """Force ``pi(i) = j`` by replacing the bus of position ``i`` with the constant ``j``."""
    _index(i, e.n), _index(j, e.n)
    return _extend(e, "value", i, j)


def fixed_point(e: Encoding, i: int) -> Encoding:
    _index(i, e.n)
    return _extend(e, "fixed_point", i)


def forbid_value(e: Encoding, i: int, j: int) -> Encoding:
    """Force ``pi(i) != j``: at least one bit of ``x_i XOR j`` is set."""
    _index(i, e.n), _index(j, e.n)
    return _extend(e, "forbid", i, j)


def derangement(e: Encoding) -> Encoding:
    return _extend(e, "derangement")


def forbid_perm(e: Encoding, tau: Sequence[int]) -> Encoding:
    return _extend(e, "forbid_perm", check_permutation(tau, e.n))


def involution_constraint(e: Encoding) -> Encoding:
    return _extend(e, "involution")


def parity_constraint(e: Encoding, parity: str) -> Encoding:
    """Even/odd: the network's control bits count the transpositions applied."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    if e.construction == "matrix":
        return build(e.recipe.with_constraint("parity", parity))
    return _extend(e, "parity", parity)


def power_identity_constraint(n: int, r: int, topology_kind: str = "batcher") -> Encoding:
    """``pi**r = id``."""
    if r < 2:
        raise ValueError(f"r must be at least 2, got {r}")
    return build(Recipe("perm", n, topology_kind).with_constraint("power", r))


def order_constraint(n: int, r: int, topology_kind: str = "batcher") -> Encoding:
    """Order exactly ``r``: ``pi**r = id`` and no intermediate power is the identity."""
    if r < 2:
        raise ValueError(f"r must be at least 2, got {r}")
    return build(Recipe("perm", n, topology_kind).with_constraint("order", r))


def compose_constraint(n: int, topology_kind: str = "batcher") -> Encoding:
    """Triples ``(pi, pi', sigma)`` with ``sigma = pi pi'``, i.e. ``sigma(i) = pi'(pi(i))``."""
    return build(Recipe("compose", n, topology_kind))


def commute_constraint(n: int, topology_kind: str = "batcher", fixed: Sequence[int] | None = None) -> Encoding:
    """Pairs ``(pi, pi')`` that commute; ``fixed`` pins ``pi'``."""
    r = Recipe("commute", n, topology_kind)
    return build(r.with_fixed("x'", fixed) if fixed is not None else r)


def conjugate_constraint(n: int, topology_kind: str = "batcher", fixed: Sequence[int] | None = None) -> Encoding:
    """Triples ``(pi, pi', sigma)`` with ``pi'(i) = sigma^-1(pi(sigma(i)))``; ``fixed`` pins ``pi``."""
    r = Recipe("conjugate", n, topology_kind)
    return build(r.with_fixed("x", fixed) if fixed is not None else r)


# --- pattern matching -------------------------------------------------------


def match_encoding(n: int, pattern: Sequence[int], topology_kind: str = "batcher") -> Encoding:
    """Permutations of ``1..n`` containing ``pattern``, with the chosen positions.

    Not uniform: every occurrence of the pattern is a separate zero.
    """
    pattern = check_permutation(pattern)
    return build(Recipe("match", n, topology_kind, pattern=pattern))


def _build_match(recipe: Recipe) -> Encoding:
    pattern = check_permutation(recipe.pattern or ())
    n, ell = recipe.n, len(pattern)
    if not 1 <= ell <= n:
        raise ValueError(f"pattern length {ell} outside 1..{n}")
    b = _Builder(recipe)
    k, reg = b.k, b.reg
    x = b.group("x")
    b.perm()

    # p_i = 0 marks a selected position; exactly ell of them
    p = [Var(reg.new(f"p[{i}]", "input")) for i in range(1, n + 1)]
    b.add(hamming_eq(p, n - ell))

    # move the selected entries to the front, keeping their order: key (p_i, i), payload x_i
    keys = [bus_concat(Bus((p[i],)), Bus.const(i + 1, k)) for i in range(n)]
    q = [reg.new_bus(f"q[{i}]", k + 1) for i in range(1, n + 1)]
    w = [reg.new_bus(f"w[{i}]", k) for i in range(1, n + 1)]
    ins = [bus_concat(keys[i], x[i]) for i in range(n)]
    outs = [bus_concat(q[i], w[i]) for i in range(n)]
    b.network(ins, outs, key_width=k + 1, name="select")

    # w_1..w_ell must be ordered like the pattern: replay the pattern's own controls
    if ell >= 2:
        sub = make_topology(recipe.topology, ell)
        controls = [Const(c) for c in sub.controls(pattern)]
        zz = [reg.new_bus(f"zz[{i}]", k) for i in range(1, ell + 1)]
        b.network(w[:ell], zz, name="pattern", topology=sub, controls=controls)
    b.groups["p"] = [Bus((bit,)) for bit in p]
    return b.finish(["x"], ["x", "p"], selection=p, uniform=False)


# --- permutation-matrix baseline -------------------------------------------


def perm_matrix_encoding(n: int) -> Encoding:
    """One-hot ``n x n`` matrix with squared row and column sum penalties."""
    return build(Recipe("matrix", n))


def _matrix_vars(b: _Builder, name: str) -> list[Bus]:
    rows = [b.reg.new_bus(f"{name}[{i}]", b.n, "input") for i in range(1, b.n + 1)]
    b.groups[name] = rows
    return rows


def _one_hot(b: _Builder, rows: list[Bus]) -> None:
    n = b.n
    for i in range(n):
        b.add(hamming_eq(list(rows[i]), 1))
    for j in range(n):
        b.add(hamming_eq([rows[i][j] for i in range(n)], 1))


def _build_matrix(recipe: Recipe) -> Encoding:
    if recipe.n < 1:
        raise ValueError(f"n must be at least 1, got {recipe.n}")
    b = _Builder(recipe)
    rows = _matrix_vars(b, "P")
    _one_hot(b, rows)
    for c in recipe.constraints:
        if c[0] != "parity":
            raise ValueError(f"matrix encoding supports only parity, got {c[0]!r}")
        b.add(matrix_parity_penalty(rows, c[1], b.reg))
    return b.finish(["P"], ["P"])


def matrix_parity_penalty(rows: list[Bus], parity: str, reg: VariableRegistry) -> Component:
    """Parity of the inversion count ``sum_{i<j, k>l} p_ik p_jl``, one auxiliary per product."""
    n = len(rows)
    table = ProductTable(reg)
    prods = []
    for i in range(n):
        for j in range(i + 1, n):
            for kk in range(n):
                for ll in range(kk):
                    prods.append(table.product(rows[i][kk], rows[j][ll], f"inv[{i},{kk};{j},{ll}]#{len(reg)}"))
    gadget = (parity_even if parity == "even" else parity_odd)(prods, reg)
    poly, _ = table.finish(gadget.poly)
    inputs = tuple(bit for row in rows for bit in row)

    def solve(asg):
        for a, c, z in table.pending:
            asg[z] = bit_value(a, asg) * bit_value(c, asg)
        return gadget.solve(asg)

    return Component(
        f"matrix_parity_{parity}", ("matrix_parity", n, parity), poly, inputs, (),
        tuple(table.aux) + gadget.aux, solve,
    )


def matrix_product_penalty(S: list[Bus], A: list[Bus], B: list[Bus], reg: VariableRegistry) -> list[Component]:
    """``S = A B`` entrywise: ``(s_ij - sum_k a_ik b_kj)**2`` with ``z_ikj = a_ik b_kj``."""
    n = len(S)
    out = []
    for i in range(n):
        for j in range(n):
            table = ProductTable(reg)
            zs = [table.product(A[i][kk], B[kk][j], f"mz[{i},{kk},{j}]#{len(reg)}") for kk in range(n)]
            s = S[i][j]
            poly, _ = table.finish(lin_square(LinExpr.of(s) - lin_sum(zs)))

            def solve(asg, table=table, zs=zs, s=s):
                for a, c, z in table.pending:
                    asg[z] = bit_value(a, asg) * bit_value(c, asg)
                total = sum(bit_value(z, asg) for z in zs)
                if total > 1:
                    return False
                return settle(s, total, asg)

            inputs = tuple(A[i][kk] for kk in range(n)) + tuple(B[kk][j] for kk in range(n))
            out.append(Component("matrix_entry", ("matrix_entry", n), poly, inputs, (s,), tuple(table.aux), solve))
    return out


def _build_matrix_compose(recipe: Recipe) -> Encoding:
    b = _Builder(recipe)
    P = _matrix_vars(b, "P")
    Pp = _matrix_vars(b, "P'")
    S = _matrix_vars(b, "S")
    _one_hot(b, P)
    _one_hot(b, Pp)
    # S = P P' as matrices, i.e. the permutation "pi then pi'"
    for comp in matrix_product_penalty(S, P, Pp, b.reg):
        b.add(comp)
    return b.finish(["P", "P'", "S"], ["P", "P'"])


def matrix_compose_encoding(n: int) -> Encoding:
    return build(Recipe("matrix_compose", n))
