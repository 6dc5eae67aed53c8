"""Hamming-weight, threshold and parity penalties over bits or literals.

Each builder returns a :class:`Gadget`: the polynomial plus enough structure
(input bits, auxiliary register, a ``solve`` routine) for the verifier to
reconstruct the unique zero completion from the inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, MutableMapping, Sequence

from .poly import (
    Bit,
    Const,
    LinExpr,
    QuadPoly,
    Var,
    VariableRegistry,
    bit_value,
    lin_square,
    lin_sum,
    negate,
)


def settle(bit: Bit, value: int, asg: MutableMapping[int, int]) -> bool:
    """Assign ``bit := value`` if unassigned, else report whether it agrees."""
    if isinstance(bit, Const):
        return bit.value == value
    want = value if isinstance(bit, Var) else 1 - value
    cur = asg.get(bit.id)
    if cur is None:
        asg[bit.id] = want
        return True
    return cur == want


@dataclass
class Component:
    """A penalty whose zero completions are a function of its inputs.

    ``solve`` fills outputs and auxiliaries from already-assigned inputs and
    returns ``False`` when no zero completion exists.  ``signature`` names
    the var-only template whose exhaustive certificate covers this instance.
    """

    kind: str
    signature: tuple
    poly: QuadPoly
    inputs: tuple[Bit, ...]
    outputs: tuple[Bit, ...]
    aux: tuple[int, ...]
    solve: Callable[[MutableMapping[int, int]], bool] = field(repr=False)

    def input_vars(self) -> list[int]:
        return sorted({b.id for b in self.inputs if not isinstance(b, Const)})


@dataclass(frozen=True)
class IntRegister:
    """Auxiliary bits read as ``sum(weight_i * y_i)``."""

    bits: tuple[int, ...]
    weights: tuple[int, ...]

    @classmethod
    def allocate(cls, reg: VariableRegistry, prefix: str, maximum: int, step: int = 1) -> "IntRegister":
        """Fewest bits with weights ``step, 2*step, ...`` that reach ``maximum``."""
        t = 0
        while step * ((1 << t) - 1) < maximum:
            t += 1
        bits = tuple(reg.new(f"{prefix}[{i}]", "auxiliary") for i in range(t))
        return cls(bits, tuple(step << i for i in range(t)))

    @property
    def maximum(self) -> int:
        return sum(self.weights)

    def expr(self) -> LinExpr:
        return LinExpr(0, dict(zip(self.bits, self.weights)))

    def store(self, value: int, asg: MutableMapping[int, int]) -> bool:
        step = self.weights[0] if self.weights else 1
        if value < 0 or value > self.maximum or value % step:
            return False
        q = value // step
        for i, v in enumerate(self.bits):
            asg[v] = (q >> i) & 1
        return True


@dataclass
class Gadget(Component):
    register: IntRegister | None = None


def _auto(reg: VariableRegistry, base: str) -> str:
    return f"{base}#{len(reg)}"


def _count(bits: Sequence[Bit], asg: Mapping[int, int]) -> int:
    return sum(bit_value(b, asg) for b in bits)


def hamming_eq(bits: Sequence[Bit], k: int) -> Gadget:
    """``(sum(bits) - k)**2``; zero iff exactly ``k`` bits are set."""
    bits = tuple(bits)
    if not 0 <= k <= len(bits):
        raise ValueError(f"k={k} outside 0..{len(bits)}")
    poly = lin_square(lin_sum(bits) - k)
    return Gadget(
        "hamming", ("hamming", len(bits), k), poly, bits, (), (),
        lambda asg: _count(bits, asg) == k,
    )


def threshold_ge(bits: Sequence[Bit], k: int, reg: VariableRegistry, name: str | None = None) -> Gadget:
    """``(sum(bits) - k - Y)**2`` with a fresh register ``Y``; satisfiable iff ``sum >= k``."""
    bits = tuple(bits)
    if not 0 <= k <= len(bits):
        raise ValueError(f"k={k} outside 0..{len(bits)}")
    register = IntRegister.allocate(reg, name or _auto(reg, "thr"), len(bits) - k)
    poly = lin_square(lin_sum(bits) - k - register.expr())

    def solve(asg):
        return register.store(_count(bits, asg) - k, asg)

    return Gadget(
        "threshold", ("threshold", len(bits), k), poly, bits, (), register.bits, solve,
        register,
    )


def _parity(bits: Sequence[Bit], odd: int, reg: VariableRegistry, name: str | None) -> Gadget:
    bits = tuple(bits)
    top = len(bits) - odd
    top -= top % 2
    kind = "parity_odd" if odd else "parity_even"
    register = IntRegister.allocate(reg, name or _auto(reg, kind), max(top, 0), step=2)
    poly = lin_square(lin_sum(bits) - odd - register.expr())

    def solve(asg):
        return register.store(_count(bits, asg) - odd, asg)

    return Gadget(kind, (kind, len(bits)), poly, bits, (), register.bits, solve, register)


def parity_even(bits: Sequence[Bit], reg: VariableRegistry, name: str | None = None) -> Gadget:
    """``(sum(bits) - E)**2`` with ``E`` an even-valued register."""
    return _parity(bits, 0, reg, name)


def parity_odd(bits: Sequence[Bit], reg: VariableRegistry, name: str | None = None) -> Gadget:
    """``(sum(bits) - E - 1)**2`` with ``E`` an even-valued register."""
    return _parity(bits, 1, reg, name)


def xor_literal(bit: Bit, const: int) -> Bit:
    """``bit XOR const`` as a literal; ``const`` is a fixed 0/1."""
    return negate(bit) if const else bit
