"""Instance files (canonical JSON), ``.qubo`` text and Ising export."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .encodings import Encoding, Recipe, build
from .poly import Bit, Const, NegVar, QuadPoly, Var

SCHEMA_VERSION = 1


class InstanceError(ValueError):
    pass


# --- JSON instances ---------------------------------------------------------


def _bit_json(bit: Bit):
    if isinstance(bit, Const):
        return str(bit.value)
    if isinstance(bit, NegVar):
        raise InstanceError("negated literals cannot appear in a decode map")
    return bit.id


def _bit_from_json(item) -> Bit:
    if isinstance(item, str):
        if item not in ("0", "1"):
            raise InstanceError(f"bad constant bit {item!r}")
        return Const(int(item))
    if isinstance(item, int) and not isinstance(item, bool):
        return Var(item)
    raise InstanceError(f"bad bit {item!r}")


def poly_to_json(p: QuadPoly) -> dict:
    return {
        "offset": p.offset,
        "linear": [[v, c] for v, c in sorted(p.linear.items())],
        "quadratic": [[i, j, c] for (i, j), c in sorted(p.quadratic.items())],
    }


def poly_from_json(doc: Mapping) -> QuadPoly:
    try:
        offset = doc["offset"]
        linear = {}
        for v, c in doc["linear"]:
            linear[_int(v)] = _int(c)
        quadratic = {}
        for i, j, c in doc["quadratic"]:
            i, j = _int(i), _int(j)
            if not i < j:
                raise InstanceError(f"quadratic pair ({i}, {j}) is not sorted")
            quadratic[(i, j)] = _int(c)
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed polynomial: {exc}") from exc
    return QuadPoly(_int(offset), linear, quadratic)


def _int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InstanceError(f"expected an integer, got {v!r}")
    return v


def encoding_to_json(e: Encoding, poly: QuadPoly | None = None) -> dict:
    doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "meta": e.meta}
    doc["variables"] = [{"id": i, "name": n, "role": r} for i, n, r in e.registry.entries()]
    doc.update(poly_to_json(e.poly if poly is None else poly))
    groups = {g: [[_bit_json(b) for b in bus] for bus in e.groups[g]] for g in e.decoded}
    decode: dict[str, Any] = {"positions": groups[e.decoded[0]], "groups": groups}
    if e.selection is not None:
        decode["selection"] = [_bit_json(b) for b in e.selection]
    doc["decode"] = decode
    return doc


def dumps(doc: Any) -> str:
    """Canonical text: sorted keys, no whitespace, trailing newline."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


@dataclass
class Instance:
    """A parsed instance file: the encoding rebuilt from ``meta`` plus the polynomial as written."""

    encoding: Encoding
    poly: QuadPoly
    doc: dict

    @property
    def poly_matches_recipe(self) -> bool:
        return self.poly == self.encoding.poly

    def dumps(self) -> str:
        return dumps(encoding_to_json(self.encoding, self.poly))


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise InstanceError("missing or unsupported schema_version")
    try:
        e = build(Recipe.from_meta(doc["meta"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"bad meta block: {exc}") from exc
    poly = poly_from_json(doc)
    names = [(v.get("id"), v.get("name"), v.get("role")) for v in doc.get("variables", [])]
    if names != e.registry.entries():
        raise InstanceError("variable table does not match the construction in meta")
    bad = [v for v in poly.variables() if v not in e.registry]
    if bad:
        raise InstanceError(f"polynomial uses unknown variables {bad[:5]}")
    decode = doc.get("decode", {})
    try:
        groups = {
            g: [[_bit_from_json(b) for b in bus] for bus in buses]
            for g, buses in decode.get("groups", {}).items()
        }
    except (TypeError, AttributeError) as exc:
        raise InstanceError(f"malformed decode map: {exc}") from exc
    expected = {g: [list(bus) for bus in e.groups[g]] for g in e.decoded}
    if groups != expected:
        raise InstanceError("decode map does not match the construction in meta")
    return Instance(e, poly, doc)


def read_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


# --- .qubo text --------------------------------------------------------------


def to_qubo(p: QuadPoly, nvars: int | None = None, comment: str | None = None) -> str:
    """``p qubo 0 <maxNode> <nDiag> <nOffDiag>`` followed by diagonal then coupler lines.

    ``maxNode`` is the number of nodes (one past the largest id); the
    constant rides in a ``c offset`` comment.
    """
    variables = p.variables()
    nodes = nvars if nvars is not None else (max(variables) + 1 if variables else 0)
    lines = []
    if comment:
        lines.extend(f"c {line}" for line in comment.splitlines())
    lines.append(f"c offset {p.offset}")
    lines.append(f"p qubo 0 {nodes} {len(p.linear)} {len(p.quadratic)}")
    lines.extend(f"{v} {v} {c}" for v, c in sorted(p.linear.items()))
    lines.extend(f"{i} {j} {c}" for (i, j), c in sorted(p.quadratic.items()))
    return "\n".join(lines) + "\n"


def from_qubo(text: str) -> QuadPoly:
    offset = 0
    linear: dict[int, int] = {}
    quadratic: dict[tuple[int, int], int] = {}
    header = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 3 and parts[1] == "offset":
                offset = int(parts[2])
            continue
        if line.startswith("p"):
            header = line.split()
            continue
        i, j, c = line.split()
        i, j, c = int(i), int(j), int(c)
        if i == j:
            linear[i] = linear.get(i, 0) + c
        else:
            key = (min(i, j), max(i, j))
            quadratic[key] = quadratic.get(key, 0) + c
    if header is None or header[:3] != ["p", "qubo", "0"]:
        raise InstanceError("missing 'p qubo 0' header")
    if int(header[4]) != len(linear) or int(header[5]) != len(quadratic):
        raise InstanceError("header counts do not match the body")
    return QuadPoly(offset, linear, quadratic)


# --- Ising --------------------------------------------------------------------


@dataclass(frozen=True)
class Ising:
    """``E(s) = offset + sum h_i s_i + sum J_ij s_i s_j`` over spins in {-1, +1}."""

    h: dict[int, Fraction]
    J: dict[tuple[int, int], Fraction]
    offset: Fraction

    def energy(self, spins: Mapping[int, int]) -> Fraction:
        e = self.offset
        for i, c in self.h.items():
            e += c * spins[i]
        for (i, j), c in self.J.items():
            e += c * spins[i] * spins[j]
        return e


def to_ising(p: QuadPoly) -> Ising:
    """Substitute ``x = (1 + s) / 2``; exact rational coefficients."""
    h: dict[int, Fraction] = {}
    J: dict[tuple[int, int], Fraction] = {}
    offset = Fraction(p.offset)
    for v, a in p.linear.items():
        h[v] = h.get(v, Fraction(0)) + Fraction(a, 2)
        offset += Fraction(a, 2)
    for (i, j), b in p.quadratic.items():
        J[(i, j)] = Fraction(b, 4)
        h[i] = h.get(i, Fraction(0)) + Fraction(b, 4)
        h[j] = h.get(j, Fraction(0)) + Fraction(b, 4)
        offset += Fraction(b, 4)
    h = {v: c for v, c in h.items() if c}
    return Ising(h, J, offset)


def spins_of(asg: Mapping[int, int]) -> dict[int, int]:
    return {v: 2 * b - 1 for v, b in asg.items()}


def ising_text(model: Ising) -> str:
    lines = [f"offset {model.offset}"]
    lines.extend(f"h {v} {c}" for v, c in sorted(model.h.items()))
    lines.extend(f"J {i} {j} {c}" for (i, j), c in sorted(model.J.items()))
    return "\n".join(lines) + "\n"


def ising_from_text(text: str) -> Ising:
    h: dict[int, Fraction] = {}
    J: dict[tuple[int, int], Fraction] = {}
    offset = Fraction(0)
    for raw in text.splitlines():
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "offset":
            offset = Fraction(parts[1])
        elif parts[0] == "h":
            h[int(parts[1])] = Fraction(parts[2])
        elif parts[0] == "J":
            J[(int(parts[1]), int(parts[2]))] = Fraction(parts[3])
        else:
            raise InstanceError(f"bad Ising line {raw!r}")
    return Ising(h, J, offset)


def samples_to_json(e: Encoding, samples: Sequence[tuple[dict[int, int], int]], params, stats) -> dict:
    from .encodings import DecodeError
    from .verify import _jsonable

    reads = []
    for asg, value in samples:
        try:
            obj = _jsonable(e.decode(asg))
        except DecodeError:
            obj = None
        reads.append({"value": value, "decoded": obj})
    return {
        "params": {
            "sweeps": params.sweeps, "reads": params.reads, "seed": params.seed,
            "beta_start": repr(params.beta_start), "beta_end": repr(params.beta_end),
        },
        "reads": reads,
        "stats": stats.to_json(),
    }
