"""Exact scalars, the finite magma model and the JSON instance format.

All scalars are :class:`fractions.Fraction`, which is already kept in lowest
terms with a positive denominator, so structural equality is exact equality.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

Rational = Fraction


class InstanceError(ValueError):
    """Malformed or inconsistent instance data; ``location`` says where."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class SizeMismatch(ValueError):
    pass


def parse_rational(value: Any, location: str = "") -> Fraction:
    """Parse ``"num/den"``, ``"num"`` or a plain int into a Fraction.

    Floats are refused: they would smuggle rounding into exact data.
    """
    if isinstance(value, bool):
        raise InstanceError(location, f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise InstanceError(location, f"not a rational string: {value!r}")
    text = value.strip().replace("−", "-")
    num, sep, den = text.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise InstanceError(location, f"malformed rational {value!r}") from None
    if d == 0:
        raise InstanceError(location, f"zero denominator in {value!r}")
    return Fraction(n, d)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Magma:
    """A finite set {0..m-1} with a total binary operation given by a table."""

    op_table: tuple[tuple[int, ...], ...]
    elements: tuple[str, ...] | None = None

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.op_table)
        object.__setattr__(self, "op_table", table)
        m = len(table)
        if m < 1:
            raise InstanceError("op", "magma must have at least one element")
        for x, row in enumerate(table):
            if len(row) != m:
                raise InstanceError(f"op[{x}]", f"ragged table: row has {len(row)} entries, expected {m}")
            for y, z in enumerate(row):
                if not 0 <= z < m:
                    raise InstanceError(f"op[{x}][{y}]", f"index out of range: {z} not in [0, {m})")
        if self.elements is not None:
            names = tuple(self.elements)
            object.__setattr__(self, "elements", names)
            if len(names) != m:
                raise InstanceError("elements", f"expected {m} names, got {len(names)}")
            if len(set(names)) != m:
                raise InstanceError("elements", "element names must be distinct")

    @property
    def size(self) -> int:
        return len(self.op_table)

    def __call__(self, x: int, y: int) -> int:
        return self.op_table[x][y]

    @classmethod
    def from_function(cls, m: int, op) -> "Magma":
        return cls(tuple(tuple(op(x, y) for y in range(m)) for x in range(m)))


@dataclass(frozen=True)
class ConvexityParams:
    p: Fraction
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))
        if self.p <= 0:
            raise InstanceError("p", f"must be positive, got {format_rational(self.p)}")
        if self.q <= 0:
            raise InstanceError("q", f"must be positive, got {format_rational(self.q)}")


@dataclass(frozen=True)
class Fn:
    name: str
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, x: int) -> Fraction:
        return self.values[x]

    def __iter__(self):
        return iter(self.values)

    @classmethod
    def of(cls, values: Iterable, name: str = "f") -> "Fn":
        return cls(name, tuple(Fraction(v) for v in values))


@dataclass(frozen=True)
class Instance:
    magma: Magma
    params: ConvexityParams
    functions: tuple[Fn, ...] = field(default_factory=tuple)

    def __post_init__(self):
        fns = tuple(self.functions)
        object.__setattr__(self, "functions", fns)
        m = self.magma.size
        for i, f in enumerate(fns):
            if len(f) != m:
                raise InstanceError(f"functions[{i}]", f"{f.name!r} has {len(f)} values, magma has {m} elements")

    def function(self, name: str) -> Fn:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)


def check_sizes(fns: Sequence[Fn], m: int | None = None) -> int:
    """Return the shared length of ``fns`` or raise SizeMismatch."""
    if not fns:
        raise ValueError("need at least one function")
    lengths = {len(f) for f in fns}
    if m is not None:
        lengths.add(m)
    if len(lengths) != 1:
        raise SizeMismatch(f"function lengths disagree: {sorted(lengths)}")
    return lengths.pop()


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("", "instance must be a JSON object")
    for key in ("m", "op", "p", "q"):
        if key not in doc:
            raise InstanceError(key, "missing required field")
    m = doc["m"]
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise InstanceError("m", f"must be an integer >= 1, got {m!r}")
    op = doc["op"]
    if not isinstance(op, list) or len(op) != m:
        raise InstanceError("op", f"expected {m} rows")
    rows = []
    for x, row in enumerate(op):
        if not isinstance(row, list):
            raise InstanceError(f"op[{x}]", "row must be a list")
        if len(row) != m:
            raise InstanceError(f"op[{x}]", f"ragged table: row has {len(row)} entries, expected {m}")
        for y, z in enumerate(row):
            if isinstance(z, bool) or not isinstance(z, (int, str)):
                raise InstanceError(f"op[{x}][{y}]", f"not an index: {z!r}")
            try:
                z = int(z)
            except ValueError:
                raise InstanceError(f"op[{x}][{y}]", f"not an index: {z!r}") from None
            if not 0 <= z < m:
                raise InstanceError(f"op[{x}][{y}]", f"index out of range: {z} not in [0, {m})")
        rows.append(tuple(int(z) for z in row))
    elements = doc.get("elements")
    if elements is not None:
        if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
            raise InstanceError("elements", "must be a list of strings")
        elements = tuple(elements)
    magma = Magma(tuple(rows), elements)
    params = ConvexityParams(parse_rational(doc["p"], "p"), parse_rational(doc["q"], "q"))
    fns = []
    for i, entry in enumerate(doc.get("functions", [])):
        loc = f"functions[{i}]"
        if not isinstance(entry, dict) or "values" not in entry:
            raise InstanceError(loc, "expected an object with 'name' and 'values'")
        name = entry.get("name", f"f{i + 1}")
        if not isinstance(name, str):
            raise InstanceError(f"{loc}.name", "must be a string")
        vals = entry["values"]
        if not isinstance(vals, list) or len(vals) != m:
            raise InstanceError(f"{loc}.values", f"expected {m} values")
        fns.append(Fn(name, tuple(parse_rational(v, f"{loc}.values[{j}]") for j, v in enumerate(vals))))
    return Instance(magma, params, tuple(fns))


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return instance_from_dict(doc)


def instance_to_dict(inst: Instance) -> dict:
    doc: dict[str, Any] = {"m": inst.magma.size}
    if inst.magma.elements is not None:
        doc["elements"] = list(inst.magma.elements)
    doc["op"] = [list(row) for row in inst.magma.op_table]
    doc["p"] = format_rational(inst.params.p)
    doc["q"] = format_rational(inst.params.q)
    doc["functions"] = [
        {"name": f.name, "values": [format_rational(v) for v in f.values]} for f in inst.functions
    ]
    return doc


def serialize_instance(inst: Instance) -> str:
    return dumps(instance_to_dict(inst))


def dumps(doc: Any) -> str:
    """Canonical JSON text: two-space indent, compact rows of scalars."""
    return _dump(doc, 0) + "\n"


def _dump(obj: Any, level: int) -> str:
    pad = "  " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(json.dumps(v) for v in obj) + "]"
        items = [pad + _dump(v, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * level + "]"
    if isinstance(obj, Fraction):
        return json.dumps(format_rational(obj))
    return json.dumps(obj)
