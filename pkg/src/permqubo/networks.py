"""Compare-exchange network topologies and whole-network polynomials.

Lines are numbered from 0.  A comparator ``(a, b)`` with ``a < b`` leaves
the smaller value on ``a``.  Wire buses follow the usual ``z[line][pos]``
layout: position 0 is the network input, the last position the network
output, and every gate in between introduces one fresh bus per line it
touches.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gadgets import Component
from .gates import GateBuild, keyed_ce_gate
from .poly import Bit, Bus, QuadPoly, Var, VariableRegistry, bus_concat

TOPOLOGIES = ("batcher", "oet", "bitonic")


@dataclass(frozen=True)
class NetworkTopology:
    n: int
    gates: tuple[tuple[int, int], ...]
    kind: str = "custom"

    def __post_init__(self) -> None:
        for a, b in self.gates:
            if not 0 <= a < b < self.n:
                raise ValueError(f"bad comparator ({a}, {b}) for {self.n} lines")

    @property
    def m(self) -> int:
        return len(self.gates)

    def apply(self, values: Sequence) -> list:
        """Run the network on concrete values."""
        out = list(values)
        for a, b in self.gates:
            if out[a] > out[b]:
                out[a], out[b] = out[b], out[a]
        return out

    def controls(self, values: Sequence) -> list[int]:
        out = list(values)
        cs = []
        for a, b in self.gates:
            c = int(out[a] > out[b])
            if c:
                out[a], out[b] = out[b], out[a]
            cs.append(c)
        return cs

    def lines_touched(self) -> set[int]:
        return {line for g in self.gates for line in g}

    def sorts_all_binary(self) -> bool:
        """0-1 principle check over all ``2**n`` binary inputs."""
        masks = np.arange(1 << self.n, dtype=np.int64)
        lines = [((masks >> j) & 1).astype(np.uint8) for j in range(self.n)]
        for a, b in self.gates:
            lines[a], lines[b] = np.minimum(lines[a], lines[b]), np.maximum(lines[a], lines[b])
        return all(bool(np.all(lines[i] <= lines[i + 1])) for i in range(self.n - 1))


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"a sorting network needs at least 2 lines, got {n}")


def topology_oe_transposition(n: int) -> NetworkTopology:
    """Odd-even transposition sort: ``n`` alternating rounds of neighbour comparators."""
    _check_n(n)
    gates = [(i, i + 1) for r in range(n) for i in range(r % 2, n - 1, 2)]
    return NetworkTopology(n, tuple(gates), "oet")


def _pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def topology_batcher(n: int) -> NetworkTopology:
    """Batcher's odd-even mergesort.

    Generated for the next power of two; comparators touching padded lines
    (which would hold +inf) are dropped.
    """
    _check_n(n)
    size = _pow2(n)
    gates = []
    p = 1
    while p < size:
        k = p
        while k >= 1:
            for j in range(k % p, size - k, 2 * k):
                for i in range(min(k, size - j - k)):
                    if (i + j) // (2 * p) == (i + j + k) // (2 * p):
                        gates.append((i + j, i + j + k))
            k //= 2
        p *= 2
    return NetworkTopology(n, tuple(g for g in gates if g[1] < n), "batcher")


def topology_bitonic(n: int) -> NetworkTopology:
    """Bitonic sorter with ascending comparators only (mirrored first merge step)."""
    _check_n(n)
    size = _pow2(n)
    gates = []
    block = 2
    while block <= size:
        for start in range(0, size, block):
            for i in range(block // 2):
                gates.append((start + i, start + block - 1 - i))
        half = block // 4
        while half >= 1:
            for start in range(0, size, 2 * half):
                for i in range(start, start + half):
                    gates.append((i, i + half))
            half //= 2
        block *= 2
    return NetworkTopology(n, tuple(g for g in gates if g[1] < n), "bitonic")


def make_topology(kind: str, n: int) -> NetworkTopology:
    if kind == "batcher":
        return topology_batcher(n)
    if kind in ("oet", "odd-even-transposition"):
        return topology_oe_transposition(n)
    if kind == "bitonic":
        return topology_bitonic(n)
    raise ValueError(f"unknown topology {kind!r}; choose from {TOPOLOGIES}")


@dataclass
class NetworkBuild:
    poly: QuadPoly
    topology: NetworkTopology
    inputs: list[Bus]
    outputs: list[Bus]
    controls: list[Bit]
    gates: list[GateBuild]
    wires: dict[tuple[int, int], Bus]
    key_width: int
    aux: list[int] = field(default_factory=list)

    @property
    def width(self) -> int:
        return self.inputs[0].width

    @property
    def aux_formula(self) -> int:
        """Auxiliary count of the all-variable network (controls and outputs excluded)."""
        m, n, k, b = self.topology.m, self.topology.n, self.width, self.key_width
        return m * (4 * k + 3 * b + 1) - n * k

    def components(self) -> list[Component]:
        out: list[Component] = []
        for g in self.gates:
            out.extend(g.leaves())
        return out


def network_poly(
    t: NetworkTopology,
    inputs: Sequence[Bus],
    outputs: Sequence[Bus],
    reg: VariableRegistry,
    key_width: int | None = None,
    controls: Sequence[Bit] | None = None,
    control_role: str = "control",
    name: str | None = None,
) -> NetworkBuild:
    """Sum of one compare-exchange polynomial per comparator.

    ``outputs`` may contain constant bits; ``controls`` may be given
    (shared or constant) instead of allocated.
    """
    inputs, outputs = list(inputs), list(outputs)
    if len(inputs) != t.n or len(outputs) != t.n:
        raise ValueError(f"topology has {t.n} lines, got {len(inputs)} inputs / {len(outputs)} outputs")
    widths = {b.width for b in inputs + outputs}
    if len(widths) != 1:
        raise ValueError(f"bus width mismatch: {sorted(widths)}")
    k = widths.pop()
    b = k if key_width is None else key_width
    if not 1 <= b <= k:
        raise ValueError(f"key width {b} outside 1..{k}")
    if t.lines_touched() != set(range(t.n)):
        raise ValueError("every line needs at least one comparator")
    if controls is not None and len(controls) != t.m:
        raise ValueError(f"expected {t.m} controls, got {len(controls)}")
    name = name or f"nw#{len(reg)}"

    last = {}
    for i, (l1, l2) in enumerate(t.gates):
        last[l1] = i
        last[l2] = i
    current = {j: inputs[j] for j in range(t.n)}
    position = {j: 0 for j in range(t.n)}
    wires = {(j, 0): inputs[j] for j in range(t.n)}
    gates, ctrl, aux = [], [], []
    for i, (l1, l2) in enumerate(t.gates):
        outs = []
        for line in (l1, l2):
            position[line] += 1
            if last[line] == i:
                bus = outputs[line]
            else:
                bus = reg.new_bus(f"{name}.z[{line},{position[line]}]", k)
                aux.extend(bus.var_ids())
            wires[(line, position[line])] = bus
            outs.append(bus)
        if controls is None:
            c: Bit = Var(reg.new(f"{name}.c[{i}]", control_role))
        else:
            c = controls[i]
        g = keyed_ce_gate(current[l1], current[l2], b, reg, outs[0], outs[1], c, f"{name}.g[{i}]")
        gates.append(g)
        ctrl.append(c)
        aux.extend(g.aux)
        current[l1], current[l2] = outs
    poly = QuadPoly.sum(g.poly for g in gates)
    return NetworkBuild(poly, t, inputs, outputs, ctrl, gates, wires, b, aux)


def keyed_network_poly(
    t: NetworkTopology,
    inputs: Sequence[Bus],
    outputs: Sequence[Bus],
    key_width: int,
    reg: VariableRegistry,
    **kwargs,
) -> NetworkBuild:
    return network_poly(t, inputs, outputs, reg, key_width=key_width, **kwargs)


def stable_network_poly(
    t: NetworkTopology,
    x: Sequence[Bus],
    y: Sequence[Bus],
    reg: VariableRegistry,
    **kwargs,
) -> NetworkBuild:
    """Sort ``(x_i, i)`` pairs so equal values keep their line order.

    The appended line number becomes the low half of each composite input;
    the matching output halves are fresh auxiliaries.
    """
    x, y = list(x), list(y)
    k = {b.width for b in x + y}
    if len(k) != 1:
        raise ValueError(f"bus width mismatch: {sorted(k)}")
    k = k.pop()
    name = kwargs.pop("name", None) or f"snw#{len(reg)}"
    ins = [bus_concat(x[i], Bus.const(i + 1, k)) for i in range(t.n)]
    outs = [bus_concat(y[i], reg.new_bus(f"{name}.id[{i}]", k)) for i in range(t.n)]
    return network_poly(t, ins, outs, reg, name=name, **kwargs)
