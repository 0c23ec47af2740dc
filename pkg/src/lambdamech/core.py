"""Domain values, variable- and ordinal-indexed tuples, relations.

A tuple indexed by variable names (``VarTuple``) and a tuple indexed by
``0..n-1`` (a plain Python tuple) carry the same information once an
enumeration of the names is fixed.  The functions at the bottom of this
module convert between the two, and lift that conversion to sets of tuples
and to functions over tuples.
"""
from __future__ import annotations

import re
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from itertools import product
from typing import Any, Union


class LambdaMechError(Exception):
    """Base class for every error raised by this package."""


class NameMismatch(LambdaMechError):
    pass


class RepeatedVariable(LambdaMechError):
    pass


class LengthMismatch(LambdaMechError):
    pass


# -- domain values ----------------------------------------------------------

class _Top:
    """The sink element.  Absorbs out-of-range arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("atom names must be non-empty")

    def __repr__(self):
        return self.name


# Naturals are plain non-negative ints.
DomainValue = Union[int, _Top, Atom]


def is_nat(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v >= 0


def value_key(v):
    """Total sort key: naturals, then atoms, then TOP, then named tuples."""
    if isinstance(v, VarTuple):
        return (3, v.sort_key(), "")
    if v is TOP:
        return (2, 0, "")
    if isinstance(v, Atom):
        return (1, 0, v.name)
    return (0, v, "")


def format_value(v: DomainValue) -> str:
    return "TOP" if v is TOP else str(v) if is_nat(v) else v.name


@dataclass(frozen=True)
class Domain:
    """A finite carrier.

    ``bound`` is set for bounded-nat domains, whose carrier is
    ``{0..bound-1} | {TOP}``; otherwise the carrier is a list of atoms.
    """

    carrier: tuple
    bound: int | None = None

    @classmethod
    def bounded(cls, bound: int) -> "Domain":
        if bound < 1:
            raise ValueError("bound must be at least 1")
        return cls(tuple(range(bound)) + (TOP,), bound)

    @classmethod
    def atoms(cls, names: Iterable[str]) -> "Domain":
        atoms = tuple(Atom(n) for n in names)
        if not atoms:
            raise ValueError("carrier must be non-empty")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atoms must be distinct")
        return cls(atoms)

    def __contains__(self, v) -> bool:
        if self.bound is not None:
            return v is TOP or (is_nat(v) and v < self.bound)
        return v in self.carrier

    def __iter__(self) -> Iterator[DomainValue]:
        return iter(self.carrier)

    def __len__(self) -> int:
        return len(self.carrier)

    def saturate(self, n: int) -> DomainValue:
        """Map an int result of built-in arithmetic into the carrier."""
        if self.bound is None:
            raise TypeError("saturate needs a bounded-nat domain")
        return n if 0 <= n < self.bound else TOP


# -- tuples -----------------------------------------------------------------

class VarTuple(Mapping):
    """Immutable, hashable map from variable names to domain values."""

    __slots__ = ("_items", "_hash")

    def __init__(self, entries: Mapping[str, Any] | Iterable[tuple[str, Any]] = (), **kw):
        items = dict(entries, **kw)
        self._items = items
        self._hash = None

    def __getitem__(self, key):
        return self._items[key]

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._items.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, VarTuple):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._items == dict(other)
        return NotImplemented

    def __repr__(self):
        inner = ", ".join(f"{k}={format_value(v)}" for k, v in sorted(self._items.items()))
        return f"VarTuple({inner})"

    def update(self, name: str, value) -> "VarTuple":
        """``alpha[x|d]``: same tuple with ``name`` rebound to ``value``."""
        items = dict(self._items)
        items[name] = value
        return VarTuple(items)

    def sort_key(self):
        return tuple((k, value_key(v)) for k, v in sorted(self._items.items()))


# Ordinal-indexed tuples are ordinary Python tuples.
OrdTuple = tuple


class VarOrder(tuple):
    """An enumeration ``(x_0, ..., x_{n-1})`` of pairwise distinct names."""

    def __new__(cls, names: Iterable[str] = ()):
        names = tuple(names)
        seen = set()
        for n in names:
            if n in seen:
                raise RepeatedVariable(f"variable {n!r} repeated in {names}")
            seen.add(n)
        return super().__new__(cls, names)

    def __repr__(self):
        return f"VarOrder({', '.join(self)})"


def _as_order(order) -> VarOrder:
    return order if isinstance(order, VarOrder) else VarOrder(order)


@dataclass(frozen=True)
class Relation:
    """A set of tuples sharing one index.

    ``index`` is a frozenset of names (rows are ``VarTuple``) or an int
    arity (rows are plain tuples).
    """

    index: frozenset | int
    rows: frozenset

    def __post_init__(self):
        rows = frozenset(self.rows)
        object.__setattr__(self, "rows", rows)
        if isinstance(self.index, int):
            bad = [r for r in rows if not isinstance(r, tuple) or len(r) != self.index]
        else:
            object.__setattr__(self, "index", frozenset(self.index))
            bad = [r for r in rows if not isinstance(r, VarTuple) or set(r) != self.index]
        if bad:
            raise LengthMismatch(f"row {bad[0]!r} does not match index {self.index!r}")

    @classmethod
    def ordinal(cls, arity: int, rows: Iterable[tuple] = ()) -> "Relation":
        return cls(arity, frozenset(tuple(r) for r in rows))

    @classmethod
    def named(cls, names: Iterable[str], rows: Iterable[Mapping] = ()) -> "Relation":
        return cls(frozenset(names), frozenset(VarTuple(r) for r in rows))

    @classmethod
    def full(cls, arity: int, domain: Domain) -> "Relation":
        return cls(arity, frozenset(product(domain.carrier, repeat=arity)))

    @property
    def arity(self) -> int:
        return self.index if isinstance(self.index, int) else len(self.index)

    def __contains__(self, row) -> bool:
        return row in self.rows

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def __le__(self, other: "Relation") -> bool:
        return self.rows <= other.rows

    def sorted_rows(self) -> list:
        if isinstance(self.index, int):
            return sorted(self.rows, key=lambda r: tuple(value_key(v) for v in r))
        return sorted(self.rows, key=VarTuple.sort_key)


# -- the lambda mechanism ---------------------------------------------------

def _check_names(order: VarOrder, names) -> None:
    if set(order) != set(names) or len(order) != len(set(names)):
        raise NameMismatch(f"order {tuple(order)} does not enumerate {sorted(names)}")


def make_ordinal_tuple(order, chi: Mapping) -> OrdTuple:
    """``d = chi o x``: read ``chi`` off in the order given."""
    order = _as_order(order)
    _check_names(order, chi.keys())
    return tuple(chi[name] for name in order)


def invert_tuple(order, d: OrdTuple) -> VarTuple:
    """``chi = d o x^-1``."""
    order = _as_order(order)
    if len(order) != len(d):
        raise LengthMismatch(f"order has {len(order)} names, tuple has {len(d)} entries")
    return VarTuple(zip(order, d))


def lift_relation(order, rel: Relation) -> Relation:
    order = _as_order(order)
    if isinstance(rel.index, int):
        raise TypeError("lift_relation expects a name-indexed relation")
    _check_names(order, rel.index)
    return Relation(len(order), frozenset(make_ordinal_tuple(order, p) for p in rel.rows))


def lift_function(order, f: Callable[[VarTuple], Any], names=None) -> Callable[[OrdTuple], Any]:
    """Turn ``f`` on name-indexed tuples into ``g`` on ordinal tuples.

    ``g(make_ordinal_tuple(order, chi)) == f(chi)``.  When ``names`` (the
    index set of ``f``) is given, ``order`` is checked against it.
    """
    order = _as_order(order)
    if names is not None:
        _check_names(order, names)

    def lifted(d):
        return f(invert_tuple(order, tuple(d)))

    lifted.order = order
    return lifted


def all_var_tuples(names: Iterable[str], domain: Domain | Iterable) -> Iterator[VarTuple]:
    """Every tuple in ``names -> carrier``."""
    names = sorted(names)
    carrier = tuple(domain)
    for values in product(carrier, repeat=len(names)):
        yield VarTuple(zip(names, values))


_SUFFIX = re.compile(r"\d+$")


class FreshNames:
    """Deterministic fresh names: ``y`` -> ``y1``, ``y2``, ...

    A name is never handed out twice, and never collides with a name in
    ``avoid`` or with any name in ``used``.
    """

    def __init__(self, reserved=()):
        self.used = set(reserved)
        self.counter = 0

    def fresh(self, base: str, avoid=()) -> str:
        stem = _SUFFIX.sub("", base) or base
        avoid = set(avoid)
        k = 1
        while True:
            name = f"{stem}{k}"
            if name not in self.used and name not in avoid:
                self.used.add(name)
                self.counter += 1
                return name
            k += 1
