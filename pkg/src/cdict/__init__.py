"""Nested typed dictionaries for accumulating simulation statistics.

A :class:`Node` maps typed scalar keys to numbers, text, homogeneous arrays
or further Nodes. Counters and histograms are filled with single calls, the
result is written as JSON, and JSON chunks from separate runs are
sum-merged back into one Node.
"""
from .core import Array, Entry, Node, deep_equal, iter_leaves, key_tag, tag_of
from .errors import *  # noqa: F401,F403
from .jsonio import (
    ParseOptions,
    SerializeOptions,
    Token,
    TokenKind,
    deserialize,
    serialize,
    serialize_value,
    tokenize,
)
from .merge import MergePolicy, MergeReport, merge, merge_chunks
from .numio import (
    EXACT,
    CompareMode,
    FloatPolicy,
    UInt,
    compare_floats,
    format_float,
    parse_float,
    parse_int,
)

from . import errors

__version__ = "0.1.0"

__all__ = [
    "Array", "Entry", "Node", "deep_equal", "iter_leaves", "key_tag", "tag_of",
    "ParseOptions", "SerializeOptions", "Token", "TokenKind",
    "deserialize", "serialize", "serialize_value", "tokenize",
    "MergePolicy", "MergeReport", "merge", "merge_chunks",
    "EXACT", "CompareMode", "FloatPolicy", "UInt",
    "compare_floats", "format_float", "parse_float", "parse_int",
] + errors.__all__
