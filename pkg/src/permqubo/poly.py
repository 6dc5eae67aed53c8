"""Sparse integer quadratic pseudo-Boolean polynomials, variables, bits and buses.

Everything else in the package is assembled from the pieces defined here.
Coefficients are Python ints, so evaluation is exact.  ``x*x`` is folded to
``x`` on construction, which gives every :class:`QuadPoly` a canonical form
and makes ``==`` a meaningful test.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

ROLES = ("input", "output", "control", "auxiliary")


class VariableRegistry:
    """Allocator of named binary variables.

    Ids are dense and handed out in increasing order; names are unique.
    """

    def __init__(self) -> None:
        self._names: list[str] = []
        self._roles: list[str] = []
        self._index: dict[str, int] = {}

    def new(self, name: str, role: str = "auxiliary") -> int:
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        if name in self._index:
            raise ValueError(f"variable name {name!r} already registered")
        vid = len(self._names)
        self._names.append(name)
        self._roles.append(role)
        self._index[name] = vid
        return vid

    def new_bus(self, prefix: str, width: int, role: str = "auxiliary") -> "Bus":
        return Bus(tuple(Var(self.new(f"{prefix}[{b}]", role)) for b in range(width)))

    def name(self, vid: int) -> str:
        return self._names[vid]

    def role(self, vid: int) -> str:
        return self._roles[vid]

    def lookup(self, name: str) -> int:
        return self._index[name]

    def set_role(self, vid: int, role: str) -> None:
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        self._roles[vid] = role

    def ids(self, role: str | None = None) -> list[int]:
        if role is None:
            return list(range(len(self._names)))
        return [i for i, r in enumerate(self._roles) if r == role]

    def entries(self) -> list[tuple[int, str, str]]:
        return [(i, n, r) for i, (n, r) in enumerate(zip(self._names, self._roles))]

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, vid: object) -> bool:
        return isinstance(vid, int) and 0 <= vid < len(self._names)


# --- bits -------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self) -> None:
        if self.value not in (0, 1):
            raise ValueError(f"constant bit must be 0 or 1, got {self.value!r}")


@dataclass(frozen=True)
class Var:
    id: int


@dataclass(frozen=True)
class NegVar:
    """The literal ``1 - x``."""

    id: int


Bit = Union[Const, Var, NegVar]
ZERO = Const(0)
ONE = Const(1)


def negate(bit: Bit) -> Bit:
    if isinstance(bit, Const):
        return Const(1 - bit.value)
    if isinstance(bit, Var):
        return NegVar(bit.id)
    return Var(bit.id)


def bit_var(bit: Bit) -> int | None:
    return None if isinstance(bit, Const) else bit.id


def bit_value(bit: Bit, asg: Mapping[int, int]) -> int | None:
    """Value of ``bit`` under a partial assignment, ``None`` if unassigned."""
    if isinstance(bit, Const):
        return bit.value
    v = asg.get(bit.id)
    if v is None:
        return None
    return v if isinstance(bit, Var) else 1 - v


@dataclass(frozen=True)
class Bus:
    """An ordered group of bits holding one number, least significant bit first."""

    bits: tuple[Bit, ...]

    @classmethod
    def const(cls, value: int, width: int) -> "Bus":
        if value < 0 or value >= 1 << width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(tuple(Const((value >> b) & 1) for b in range(width)))

    @classmethod
    def of_vars(cls, ids: Iterable[int]) -> "Bus":
        return cls(tuple(Var(i) for i in ids))

    @property
    def width(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[Bit]:
        return iter(self.bits)

    def __getitem__(self, b: int) -> Bit:
        return self.bits[b]

    def high(self, count: int) -> "Bus":
        """The ``count`` most significant bits as a bus."""
        return Bus(self.bits[len(self.bits) - count:])

    def var_ids(self) -> list[int]:
        return [b.id for b in self.bits if not isinstance(b, Const)]

    def is_const(self) -> bool:
        return all(isinstance(b, Const) for b in self.bits)

    def value(self, asg: Mapping[int, int]) -> int | None:
        total = 0
        for b, bit in enumerate(self.bits):
            v = bit_value(bit, asg)
            if v is None:
                return None
            total |= v << b
        return total


def bus_concat(a: Bus, b: Bus) -> Bus:
    """Concatenate two buses; ``b`` takes the low-order bits, ``a`` the high ones."""
    return Bus(b.bits + a.bits)


# --- linear expressions -----------------------------------------------------


class LinExpr:
    """Affine integer expression ``offset + sum(c_i x_i)``."""

    __slots__ = ("offset", "terms")

    def __init__(self, offset: int = 0, terms: Mapping[int, int] | None = None) -> None:
        self.offset = offset
        self.terms = {v: c for v, c in (terms or {}).items() if c}

    @classmethod
    def of(cls, item: "Bit | int | LinExpr") -> "LinExpr":
        if isinstance(item, LinExpr):
            return item
        if isinstance(item, int):
            return cls(item)
        if isinstance(item, Const):
            return cls(item.value)
        if isinstance(item, Var):
            return cls(0, {item.id: 1})
        return cls(1, {item.id: -1})

    def __add__(self, other: "Bit | int | LinExpr") -> "LinExpr":
        o = LinExpr.of(other)
        terms = dict(self.terms)
        for v, c in o.terms.items():
            terms[v] = terms.get(v, 0) + c
        return LinExpr(self.offset + o.offset, terms)

    __radd__ = __add__

    def __neg__(self) -> "LinExpr":
        return LinExpr(-self.offset, {v: -c for v, c in self.terms.items()})

    def __sub__(self, other: "Bit | int | LinExpr") -> "LinExpr":
        return self + (-LinExpr.of(other))

    def __rsub__(self, other: "Bit | int | LinExpr") -> "LinExpr":
        return LinExpr.of(other) - self

    def __mul__(self, s: int) -> "LinExpr":
        return LinExpr(self.offset * s, {v: c * s for v, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LinExpr)
            and self.offset == other.offset
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"LinExpr({self.offset}, {self.terms})"

    def evaluate(self, asg: Mapping[int, int]) -> int:
        return self.offset + sum(c * _lookup(asg, v) for v, c in self.terms.items())


def lin_sum(items: Iterable["Bit | int | LinExpr"]) -> LinExpr:
    offset = 0
    terms: dict[int, int] = {}
    for item in items:
        e = LinExpr.of(item)
        offset += e.offset
        for v, c in e.terms.items():
            terms[v] = terms.get(v, 0) + c
    return LinExpr(offset, terms)


# --- quadratic polynomials --------------------------------------------------


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def _lookup(asg: Mapping[int, int], v: int) -> int:
    try:
        return asg[v]
    except KeyError:
        raise KeyError(f"assignment is missing variable {v}") from None


class QuadPoly:
    """Quadratic pseudo-Boolean polynomial with integer coefficients.

    Treat instances as immutable; the ``_acc_*`` helpers exist for builders
    that own a fresh instance.
    """

    __slots__ = ("offset", "linear", "quadratic")

    def __init__(
        self,
        offset: int = 0,
        linear: Mapping[int, int] | None = None,
        quadratic: Mapping[tuple[int, int], int] | None = None,
    ) -> None:
        self.offset = offset
        self.linear: dict[int, int] = {}
        self.quadratic: dict[tuple[int, int], int] = {}
        for v, c in (linear or {}).items():
            self._acc_linear(v, c)
        for (i, j), c in (quadratic or {}).items():
            self._acc_quad(i, j, c)
        self._prune()

    # builder internals
    def _acc_linear(self, v: int, c: int) -> None:
        self.linear[v] = self.linear.get(v, 0) + c

    def _acc_quad(self, i: int, j: int, c: int) -> None:
        if i == j:
            self._acc_linear(i, c)
            return
        key = _pair(i, j)
        self.quadratic[key] = self.quadratic.get(key, 0) + c

    def _acc_poly(self, other: "QuadPoly", s: int = 1) -> None:
        self.offset += s * other.offset
        lin = self.linear
        for v, c in other.linear.items():
            lin[v] = lin.get(v, 0) + s * c
        quad = self.quadratic
        for k, c in other.quadratic.items():
            quad[k] = quad.get(k, 0) + s * c

    def _prune(self) -> "QuadPoly":
        self.linear = {v: c for v, c in self.linear.items() if c}
        self.quadratic = {k: c for k, c in self.quadratic.items() if c}
        return self

    # public API
    @classmethod
    def constant(cls, value: int) -> "QuadPoly":
        return cls(value)

    @classmethod
    def sum(cls, polys: Iterable["QuadPoly"]) -> "QuadPoly":
        out = cls()
        for p in polys:
            out._acc_poly(p)
        return out._prune()

    def __add__(self, other: "QuadPoly") -> "QuadPoly":
        return poly_add(self, other)

    def __mul__(self, s: int) -> "QuadPoly":
        return poly_scale(self, s)

    __rmul__ = __mul__

    def __neg__(self) -> "QuadPoly":
        return poly_scale(self, -1)

    def __sub__(self, other: "QuadPoly") -> "QuadPoly":
        return poly_add(self, poly_scale(other, -1))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, QuadPoly)
            and self.offset == other.offset
            and self.linear == other.linear
            and self.quadratic == other.quadratic
        )

    def __hash__(self) -> int:
        return hash((self.offset, frozenset(self.linear.items()), frozenset(self.quadratic.items())))

    def __repr__(self) -> str:
        return f"QuadPoly(offset={self.offset}, linear={self.linear}, quadratic={self.quadratic})"

    def is_zero(self) -> bool:
        return not self.offset and not self.linear and not self.quadratic

    def variables(self) -> list[int]:
        vs = set(self.linear)
        for i, j in self.quadratic:
            vs.add(i)
            vs.add(j)
        return sorted(vs)

    def neighbors(self) -> dict[int, set[int]]:
        nb: dict[int, set[int]] = {v: set() for v in self.variables()}
        for i, j in self.quadratic:
            nb[i].add(j)
            nb[j].add(i)
        return nb

    def evaluate(self, asg: Mapping[int, int]) -> int:
        return poly_eval(self, asg)

    def substitute(self, values: Mapping[int, int]) -> "QuadPoly":
        """Fix some variables to constants and fold them in."""
        out = QuadPoly(self.offset)
        for v, c in self.linear.items():
            if v in values:
                out.offset += c * values[v]
            else:
                out._acc_linear(v, c)
        for (i, j), c in self.quadratic.items():
            fi, fj = i in values, j in values
            if fi and fj:
                out.offset += c * values[i] * values[j]
            elif fi:
                if values[i]:
                    out._acc_linear(j, c)
            elif fj:
                if values[j]:
                    out._acc_linear(i, c)
            else:
                out._acc_quad(i, j, c)
        return out._prune()


def poly_add(a: QuadPoly, b: QuadPoly) -> QuadPoly:
    out = QuadPoly(a.offset, a.linear, a.quadratic)
    out._acc_poly(b)
    return out._prune()


def poly_scale(a: QuadPoly, s: int) -> QuadPoly:
    return QuadPoly(
        a.offset * s,
        {v: c * s for v, c in a.linear.items()},
        {k: c * s for k, c in a.quadratic.items()},
    )


def poly_eval(a: QuadPoly, asg: Mapping[int, int]) -> int:
    """Exact value at a 0/1 point; raises ``KeyError`` naming a missing variable."""
    total = a.offset
    for v, c in a.linear.items():
        if _lookup(asg, v):
            total += c
    for (i, j), c in a.quadratic.items():
        if _lookup(asg, i) and _lookup(asg, j):
            total += c
    return total


def lin_mul(a: "LinExpr | Bit | int", b: "LinExpr | Bit | int") -> QuadPoly:
    """Product of two affine expressions, folded to canonical form."""
    a, b = LinExpr.of(a), LinExpr.of(b)
    out = QuadPoly(a.offset * b.offset)
    for v, c in a.terms.items():
        out._acc_linear(v, c * b.offset)
    for v, c in b.terms.items():
        out._acc_linear(v, c * a.offset)
    for i, ci in a.terms.items():
        for j, cj in b.terms.items():
            out._acc_quad(i, j, ci * cj)
    return out._prune()


def lin_square(e: "LinExpr | Bit | int") -> QuadPoly:
    """``e**2`` with ``x**2 = x``; non-negative at every 0/1 point."""
    return lin_mul(e, e)


def lin_as_poly(e: "LinExpr | Bit | int") -> QuadPoly:
    e = LinExpr.of(e)
    return QuadPoly(e.offset, e.terms)


def bits_of(value: int, width: int) -> list[int]:
    return [(value >> b) & 1 for b in range(width)]


def assignment_from_mask(variables: Sequence[int], mask: int) -> dict[int, int]:
    """Variable ``variables[i]`` takes bit ``i`` of ``mask``."""
    return {v: (mask >> i) & 1 for i, v in enumerate(variables)}
