"""Sum-merging of Nodes and of JSON chunks written by independent runs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import BOOL, Array, Node, _MISSING, _pkey, add_numbers
from .errors import CdictError, MergeConflict
from .jsonio import DEFAULT_PARSE, ParseOptions, deserialize
from .numio import INT_MAX, INT_MIN, UInt

_RULES = ("error", "keep_left", "keep_right")
_ARRAY_RULES = ("sum", "concat", "error")
_NUMERIC = (int, UInt, float)


@dataclass(frozen=True)
class MergePolicy:
    """How conflicting leaves are combined. Numbers are always summed.

    ``scalar_conflict`` covers differing Text or Bool values, ``type_conflict``
    leaves of different kinds (and numeric arrays of different lengths),
    ``array_rule`` numeric arrays: ``sum`` element-wise, ``concat`` or ``error``.
    """

    scalar_conflict: str = "error"
    array_rule: str = "sum"
    type_conflict: str = "error"

    def __post_init__(self):
        if self.scalar_conflict not in _RULES or self.type_conflict not in _RULES:
            raise ValueError(f"conflict rules must be one of {_RULES}")
        if self.array_rule not in _ARRAY_RULES:
            raise ValueError(f"array_rule must be one of {_ARRAY_RULES}")


DEFAULT_MERGE = MergePolicy()


@dataclass
class MergeReport:
    added: int = 0
    summed: int = 0
    conflicts_resolved: int = 0


def merge(into: Node, src: Node, policy: MergePolicy = DEFAULT_MERGE,
          report: MergeReport | None = None) -> MergeReport:
    """Merge ``src`` into ``into`` in place and return counts of what happened.

    Keys missing from ``into`` are deep-copied in ``src`` order. Numbers are
    added with the accumulation promotion rules. Metadata already on ``into``
    wins; metadata from ``src`` fills gaps only.
    """
    if report is None:
        report = MergeReport()
    _merge_nodes(into, src, policy, report, ())
    return report


def _merge_nodes(a, b, policy, rep, path):
    da = a._d
    for k, v in b._d.items():
        cur = da.get(k, _MISSING)
        if cur is _MISSING:
            if v.__class__ is Node:
                v = v.copy()
                rep.added += v.leaf_count()
            else:
                rep.added += 1
            da[k] = v
            continue
        tc = type(cur)
        tv = type(v)
        if tc is int and tv is int:
            s = cur + v
            if INT_MIN <= s <= INT_MAX:
                da[k] = s
                rep.summed += 1
                continue
        if tc in _NUMERIC and tv in _NUMERIC:
            da[k] = add_numbers(cur, v)
            rep.summed += 1
        elif tc is Node and tv is Node:
            _merge_nodes(cur, v, policy, rep, path + (_pkey(k),))
        elif tc is not tv:
            _resolve(policy.type_conflict, da, k, v, path, "type conflict", rep)
        elif tc is Array:
            _merge_arrays(da, k, cur, v, policy, rep, path)
        elif cur != v:
            _resolve(policy.scalar_conflict, da, k, v, path, "conflicting values", rep)
    mb = b._meta
    if mb:
        if a._meta is None:
            a._meta = {}
        ma = a._meta
        for k, m in mb.items():
            if k not in ma:
                ma[k] = m.copy() if m.__class__ is Node else m


def _merge_arrays(da, k, x, y, policy, rep, path):
    if (x.elem == BOOL) != (y.elem == BOOL):
        _resolve(policy.type_conflict, da, k, y, path, "array element types differ", rep)
        return
    rule = policy.array_rule
    if rule == "concat":
        da[k] = Array.infer(x.values + y.values)
        rep.summed += 1
    elif x.elem == BOOL or rule == "error":
        if x != y:
            rule = policy.scalar_conflict if x.elem == BOOL else "error"
            _resolve(rule, da, k, y, path, "conflicting arrays", rep)
    elif len(x.values) != len(y.values):
        _resolve(policy.type_conflict, da, k, y, path, "array lengths differ", rep)
    else:
        da[k] = Array.infer([add_numbers(p, q) for p, q in zip(x.values, y.values)])
        rep.summed += 1


def _resolve(rule, da, k, v, path, reason, rep):
    if rule == "error":
        raise MergeConflict(path + (_pkey(k),), reason)
    if rule == "keep_right":
        da[k] = v.copy() if v.__class__ is Node else v
    rep.conflicts_resolved += 1


def merge_chunks(texts: Iterable, policy: MergePolicy = DEFAULT_MERGE,
                 parse_opts: ParseOptions = DEFAULT_PARSE,
                 report: MergeReport | None = None) -> Node:
    """Fold :func:`merge` over deserialized chunks, left to right, from an empty Node.

    Errors carry the zero-based index of the offending chunk in ``.chunk``.
    """
    if report is None:
        report = MergeReport()
    result = Node()
    for i, text in enumerate(texts):
        try:
            node = deserialize(text, parse_opts)
            if i == 0 and not result._d:
                # nothing to combine with yet; adopt the first chunk as is
                result = node
                report.added += node.leaf_count()
            else:
                merge(result, node, policy, report)
        except MergeConflict as exc:
            raise exc.with_chunk(i)
        except CdictError as exc:
            exc.chunk = i
            raise
    return result
