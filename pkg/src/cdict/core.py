"""Nested dictionaries with typed scalar keys.

Keys and values are plain Python objects whose *type* carries the tag:
``int`` is Int, :class:`UInt` is UInt, ``float`` is Float, ``bool`` is Bool
and ``str`` is Text. Because Python hashes ``1``, ``1.0`` and ``True`` alike,
a Node stores non-text keys internally as ``(tag, payload)`` pairs; the
public API only ever sees the native objects.
"""
from __future__ import annotations

import math
from functools import cmp_to_key
from typing import Any, Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    BadBin,
    CycleError,
    DimensionMismatch,
    NoSuchEntry,
    PathConflict,
    TypeMismatch,
)
from .numio import (
    DEFAULT_POLICY,
    EXACT,
    INT_MAX,
    INT_MIN,
    UINT_MAX,
    FloatPolicy,
    UInt,
    compare_numbers,
)

# internal key tags for non-text, non-Int keys
_BOOL, _UINT, _FLOAT = 0, 2, 3

_MISSING = object()
_NUMERIC = (int, UInt, float)

INT, UINT, FLOAT, BOOL, TEXT, ARRAY, NODE = "Int", "UInt", "Float", "Bool", "Text", "Array", "Node"
ELEMENT_TAGS = (INT, UINT, FLOAT, BOOL)


def _ikey(k):
    t = type(k)
    if t is str:
        return k
    if t is int:
        if INT_MIN <= k <= INT_MAX:
            return k
        return (_UINT, UInt(k))
    if t is float:
        if k - k != 0:
            raise ValueError(f"float keys must be finite, got {k!r}")
        return (_FLOAT, k + 0.0)  # folds -0.0 into +0.0
    if t is bool:
        return (_BOOL, k)
    if t is UInt:
        return (_UINT, k)
    raise TypeError(f"unsupported key type {t.__name__}")


def _pkey(ik):
    return ik[1] if type(ik) is tuple else ik


def canonical_key(key):
    """Return ``key`` in canonical form (``-0.0`` becomes ``0.0``); validates it."""
    return _pkey(_ikey(key))


def key_tag(key) -> str:
    t = type(key)
    if t is str:
        return TEXT
    if t is bool:
        return BOOL
    if t is float:
        return FLOAT
    if t is UInt:
        return UINT
    if t is int:
        return INT if INT_MIN <= key <= INT_MAX else UINT
    raise TypeError(f"unsupported key type {t.__name__}")


def _ipath(path):
    if type(path) is not tuple and type(path) is not list:
        path = (path,)
    if not path:
        raise ValueError("path must contain at least one key")
    return [k if type(k) is str else _ikey(k) for k in path]


def tag_of(value) -> str:
    t = type(value)
    if t is int:
        return INT
    if t is float:
        return FLOAT
    if t is str:
        return TEXT
    if t is bool:
        return BOOL
    if t is UInt:
        return UINT
    if isinstance(value, Node):
        return NODE
    if t is Array:
        return ARRAY
    raise TypeError(f"not a cdict value: {t.__name__}")


def _int_value(v):
    if INT_MIN <= v <= INT_MAX:
        return v
    return UInt(v)


class Array:
    """A homogeneous array whose elements share one tag (Int, UInt, Float or Bool)."""

    __slots__ = ("elem", "values")

    def __init__(self, elem: str, values: Iterable = ()):
        if elem not in ELEMENT_TAGS:
            raise ValueError(f"array element tag must be one of {ELEMENT_TAGS}, got {elem!r}")
        vals = tuple(values)
        if elem == FLOAT:
            vals = tuple(float(v) for v in vals if _check_num(v))
        elif elem == BOOL:
            if any(type(v) is not bool for v in vals):
                raise TypeMismatch("Bool array holds a non-bool element")
        else:
            lo, hi = (INT_MIN, INT_MAX) if elem == INT else (0, UINT_MAX)
            for v in vals:
                if type(v) not in (int, UInt) or not lo <= v <= hi:
                    raise TypeMismatch(f"{elem} array cannot hold {v!r}")
            if elem == UINT:
                vals = tuple(UInt(v) for v in vals)
            else:
                vals = tuple(int(v) for v in vals)
        self.elem = elem
        self.values = vals

    @classmethod
    def infer(cls, values: Iterable) -> "Array":
        """Pick the narrowest element tag that holds every value."""
        vals = list(values)
        if not vals:
            return cls(INT, ())
        types = {type(v) for v in vals}
        if types == {bool}:
            return cls(BOOL, vals)
        if bool in types or not types <= {int, UInt, float}:
            raise TypeMismatch("array elements must be all numeric or all bool")
        if float in types:
            return cls(FLOAT, vals)
        if UInt in types:
            if min(vals) >= 0 and max(vals) <= UINT_MAX:
                return cls(UINT, vals)
            return cls(FLOAT, vals)
        lo, hi = min(vals), max(vals)
        if INT_MIN <= lo and hi <= INT_MAX:
            return cls(INT, vals)
        if lo >= 0 and hi <= UINT_MAX:
            return cls(UINT, vals)
        return cls(FLOAT, vals)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other):
        if type(other) is not Array:
            return NotImplemented
        return self.elem == other.elem and self.values == other.values

    def __hash__(self):
        return hash((self.elem, self.values))

    def __repr__(self):
        return f"Array({self.elem!r}, {list(self.values)!r})"


def _check_num(v):
    if type(v) not in _NUMERIC:
        raise TypeMismatch(f"Float array cannot hold {v!r}")
    return True


def check_value(v):
    """Validate a value for storage, normalizing ints and lists."""
    t = type(v)
    if t is int:
        if INT_MIN <= v <= INT_MAX:
            return v
        return UInt(v)
    if t is float or t is str or t is bool or t is UInt or t is Array:
        return v
    if isinstance(v, Node):
        return v
    if t is list or t is tuple:
        return Array.infer(v)
    raise TypeError(f"unsupported value type {t.__name__}")


def add_numbers(a, b):
    """Sum two numeric values with the accumulation promotion rules.

    Int+Int stays Int and UInt+UInt stays UInt while the result fits; on
    overflow both operands are converted to float first. Any float operand
    gives a float. A mixed Int/UInt sum takes whichever integer tag holds it.
    """
    ta = type(a)
    tb = type(b)
    if ta is float or tb is float:
        return float(a) + float(b)
    s = a + b
    if ta is int and tb is int:
        if INT_MIN <= s <= INT_MAX:
            return s
    elif ta is UInt and tb is UInt:
        if s <= UINT_MAX:
            return UInt(s)
    elif INT_MIN <= s <= INT_MAX:
        return s
    elif 0 <= s <= UINT_MAX:
        return UInt(s)
    return float(a) + float(b)


class Entry(NamedTuple):
    value: Any
    metadata: Any = None


class Node:
    """An insertion-ordered mapping from typed scalar keys to values.

    Values are ints, :class:`UInt`, floats, bools, strings, :class:`Array`
    or nested Nodes. Each entry may also carry a metadata value. Paths are
    lists or tuples of keys; a bare scalar is treated as a one-key path.
    """

    __slots__ = ("_d", "_meta")

    def __init__(self):
        self._d: dict = {}
        self._meta: dict | None = None

    @classmethod
    def from_mapping(cls, mapping) -> "Node":
        """Build a Node from a (possibly nested) dict; lists become Arrays."""
        node = cls()
        d = node._d
        for k, v in mapping.items():
            if isinstance(v, dict):
                v = cls.from_mapping(v)
            d[_ikey(k)] = check_value(v)
        return node

    # mapping protocol, one level deep

    def __len__(self):
        return len(self._d)

    def __iter__(self) -> Iterator:
        for ik in self._d:
            yield ik[1] if type(ik) is tuple else ik

    def __contains__(self, key):
        try:
            return _ikey(key) in self._d
        except (TypeError, ValueError):
            return False

    def __getitem__(self, key):
        return self._d[_ikey(key)]

    def keys(self):
        return list(self)

    def items(self):
        for ik, v in self._d.items():
            yield (ik[1] if type(ik) is tuple else ik), v

    def entries(self):
        meta = self._meta or {}
        for ik, v in self._d.items():
            yield _pkey(ik), Entry(v, meta.get(ik))

    def __repr__(self):
        inner = ", ".join(f"{k!r}: {v!r}" for k, v in self.items())
        return f"Node({{{inner}}})"

    # path operations

    def _parent(self, ipath, create, overwrite=False):
        d = self._d
        for i in range(len(ipath) - 1):
            k = ipath[i]
            child = d.get(k, _MISSING)
            if child.__class__ is Node:
                d = child._d
                continue
            if not create:
                return None
            if child is not _MISSING and not overwrite:
                raise PathConflict([_pkey(x) for x in ipath[: i + 1]])
            child = Node()
            d[k] = child
            d = child._d
        return d

    def _parent_node(self, ipath):
        node = self
        for k in ipath[:-1]:
            node = node._d.get(k)
            if node.__class__ is not Node:
                return None
        return node

    def set(self, path, value, overwrite_nonnode: bool = False) -> None:
        """Store ``value`` at ``path``, creating intermediate Nodes.

        An existing value is replaced but its metadata kept. A non-Node value
        in the way raises :class:`PathConflict` unless ``overwrite_nonnode``.
        """
        ipath = _ipath(path)
        value = check_value(value)
        if isinstance(value, Node):
            self._check_acyclic(ipath, value)
        self._parent(ipath, True, overwrite_nonnode)[ipath[-1]] = value

    def _check_acyclic(self, ipath, value):
        ancestors = {id(self)}
        node = self
        for k in ipath[:-1]:
            node = node._d.get(k)
            if node.__class__ is not Node:
                break
            ancestors.add(id(node))
        stack = [value]
        while stack:
            n = stack.pop()
            if id(n) in ancestors:
                raise CycleError("a Node cannot be nested inside itself")
            stack.extend(v for v in n._d.values() if v.__class__ is Node)
            if n._meta:
                stack.extend(v for v in n._meta.values() if v.__class__ is Node)

    def get(self, path) -> Entry | None:
        ipath = _ipath(path)
        d = self._parent(ipath, False)
        if d is None:
            return None
        k = ipath[-1]
        v = d.get(k, _MISSING)
        if v is _MISSING:
            return None
        node = self._parent_node(ipath) if len(ipath) > 1 else self
        meta = node._meta.get(k) if node._meta else None
        return Entry(v, meta)

    def value(self, path, default=None):
        """The value at ``path`` or ``default``."""
        ipath = _ipath(path)
        d = self._parent(ipath, False)
        if d is None:
            return default
        return d.get(ipath[-1], default)

    def add_number(self, path, delta):
        """Accumulate ``delta`` into the number at ``path`` and return the new value.

        A missing target starts at ``delta``. See :func:`add_numbers` for the
        promotion rules.
        """
        td = type(delta)
        if td is not int and td is not float and td is not UInt:
            if td is bool or td not in _NUMERIC:
                raise TypeMismatch(f"delta must be numeric, got {td.__name__}")
        elif td is int and not INT_MIN <= delta <= INT_MAX:
            delta = UInt(delta)
        if type(path) is list or type(path) is tuple:
            d = self._d
            n = len(path) - 1
            if n < 0:
                raise ValueError("path must contain at least one key")
            for i in range(n):
                k = path[i]
                if type(k) is not str:
                    k = _ikey(k)
                child = d.get(k)
                if child.__class__ is Node:
                    d = child._d
                else:
                    d = self._parent(_ipath(path), True)
                    break
            k = path[-1]
        else:
            d = self._d
            k = path
        if type(k) is not str:
            k = _ikey(k)
        return _accumulate(d, k, delta, path)

    def hist_add(self, prefix, coords: Sequence[float], widths: Sequence[float], weight=1) -> None:
        """Count ``weight`` into the bin holding ``coords``.

        Each dimension adds one nested Float key, the lower bin edge
        ``floor(c / w) * w``, below ``prefix`` (which may be empty).
        """
        if len(coords) != len(widths) or not coords:
            raise DimensionMismatch(
                f"{len(coords)} coordinates for {len(widths)} widths")
        tw = type(weight)
        if tw is bool or tw not in _NUMERIC:
            raise TypeMismatch(f"weight must be numeric, got {tw.__name__}")
        if prefix is None or (type(prefix) in (list, tuple) and not prefix):
            ipath = []
        else:
            ipath = _ipath(prefix)
        for c, w in zip(coords, widths):
            c = float(c)
            w = float(w)
            if not w > 0 or w - w != 0 or c - c != 0:
                raise BadBin(f"bad bin: coordinate {c!r}, width {w!r}")
            q = c / w
            if q - q != 0:
                raise BadBin(f"coordinate {c!r} overflows bins of width {w!r}")
            ipath.append((_FLOAT, math.floor(q) * w + 0.0))
        _accumulate(self._parent(ipath, True), ipath[-1], weight, ipath)

    def remove(self, path) -> Entry | None:
        """Remove and return the entry at ``path``; emptied parents are kept."""
        ipath = _ipath(path)
        node = self._parent_node(ipath)
        if node is None:
            return None
        k = ipath[-1]
        v = node._d.pop(k, _MISSING)
        if v is _MISSING:
            return None
        meta = node._meta.pop(k, None) if node._meta else None
        return Entry(v, meta)

    def set_metadata(self, path, meta) -> None:
        ipath = _ipath(path)
        node = self._parent_node(ipath)
        k = ipath[-1]
        if node is None or k not in node._d:
            raise NoSuchEntry(f"no entry at {list(path) if isinstance(path, (list, tuple)) else [path]!r}")
        meta = check_value(meta)
        if isinstance(meta, Node):
            self._check_acyclic(ipath, meta)
        if node._meta is None:
            node._meta = {}
        node._meta[k] = meta

    def get_metadata(self, path):
        entry = self.get(path)
        return None if entry is None else entry.metadata

    # whole-tree queries

    def leaf_count(self) -> int:
        count = 0
        stack = [self]
        while stack:
            for v in stack.pop()._d.values():
                if v.__class__ is Node:
                    stack.append(v)
                else:
                    count += 1
        return count

    def depth(self) -> int:
        best = 0
        stack = [(self, 0)]
        while stack:
            node, level = stack.pop()
            if not node._d:
                best = max(best, level)
                continue
            level += 1
            best = max(best, level)
            for v in node._d.values():
                if v.__class__ is Node:
                    stack.append((v, level))
        return best

    def sorted_keys(self, policy: FloatPolicy = DEFAULT_POLICY) -> list:
        """Keys in Bool < numeric < Text order, stable for compare-equal keys."""
        return [_pkey(ik) for ik in sorted_ikeys(self._d, policy.compare)]

    def copy(self) -> "Node":
        """Deep copy; Arrays and scalars are immutable and shared."""
        new = Node()
        d = new._d
        for k, v in self._d.items():
            d[k] = v.copy() if v.__class__ is Node else v
        if self._meta:
            new._meta = {k: (m.copy() if m.__class__ is Node else m)
                         for k, m in self._meta.items()}
        return new


def _accumulate(d, k, delta, path):
    cur = d.get(k, _MISSING)
    if cur is _MISSING:
        d[k] = delta
        return delta
    tc = type(cur)
    if tc is int and type(delta) is int:
        s = cur + delta
        if INT_MIN <= s <= INT_MAX:
            d[k] = s
            return s
    elif tc is float and type(delta) is float:
        s = cur + delta
        d[k] = s
        return s
    elif tc is bool or tc not in _NUMERIC:
        raise TypeMismatch(f"cannot add to {tag_of(cur)} value at {list(path) if isinstance(path, (list, tuple)) else [path]!r}")
    s = add_numbers(cur, delta)
    d[k] = s
    return s


def _rank(ik):
    if type(ik) is str:
        return 2
    if type(ik) is tuple and ik[0] == _BOOL:
        return 0
    return 1


def _exact_sort_key(ik):
    if type(ik) is str:
        return (2, ik)
    if type(ik) is tuple:
        return (0 if ik[0] == _BOOL else 1, ik[1])
    return (1, ik)


def sorted_ikeys(d, mode=EXACT):
    if mode.kind == "exact":
        return sorted(d, key=_exact_sort_key)

    def cmp(a, b):
        ra, rb = _rank(a), _rank(b)
        if ra != rb:
            return ra - rb
        pa, pb = _pkey(a), _pkey(b)
        if ra == 1:
            return compare_numbers(pa, pb, mode)
        return (pa > pb) - (pa < pb)

    return sorted(d, key=cmp_to_key(cmp))


def deep_equal(a: Node, b: Node, policy: FloatPolicy = DEFAULT_POLICY) -> bool:
    """Structural equality ignoring insertion order.

    Keys must match exactly (tag and value). Numeric values compare by
    mathematical value, with the policy's tolerance once a float is
    involved; JSON text cannot carry the Int/Float distinction of a value
    such as ``2.0``, so value tags are not compared. Metadata follows the
    same rule.
    """
    return _nodes_equal(a, b, policy.compare)


def _nodes_equal(a, b, mode):
    if a is b:
        return True
    da, db = a._d, b._d
    if len(da) != len(db) or da.keys() != db.keys():
        return False
    for k, v in da.items():
        if not values_equal(v, db[k], mode):
            return False
    ma, mb = a._meta or {}, b._meta or {}
    for k in da:
        x, y = ma.get(k), mb.get(k)
        if x is None and y is None:
            continue
        if x is None or y is None or not values_equal(x, y, mode):
            return False
    return True


def values_equal(x, y, mode=EXACT) -> bool:
    tx, ty = type(x), type(y)
    if tx in _NUMERIC and ty in _NUMERIC:
        return compare_numbers(x, y, mode) == 0
    if tx is Node and ty is Node:
        return _nodes_equal(x, y, mode)
    if tx is not ty:
        return False
    if tx is Array:
        if len(x.values) != len(y.values):
            return False
        if (x.elem == BOOL) != (y.elem == BOOL):
            return False
        if x.elem == BOOL:
            return x.values == y.values
        return all(compare_numbers(p, q, mode) == 0 for p, q in zip(x.values, y.values))
    return x == y


def iter_leaves(node: Node, prefix=()) -> Iterator[tuple[tuple, Any]]:
    """Yield ``(path, value)`` for every non-Node value, depth first."""
    for k, v in node.items():
        path = prefix + (k,)
        if v.__class__ is Node:
            yield from iter_leaves(v, path)
        else:
            yield path, v
