"""JSON text <-> Node.

Input goes through two stages: :func:`tokenize` checks the RFC 8259 grammar
in one pass and returns byte spans without materializing any value, then
:func:`deserialize` builds the Node from those spans. Output is a custom
writer that renders typed keys as JSON strings.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from json.decoder import scanstring
from typing import NamedTuple

from .core import _BOOL, _FLOAT, _UINT, BOOL, FLOAT, Array, Node, sorted_ikeys
from .errors import (
    DepthExceeded,
    DuplicateKey,
    JSONSyntaxError,
    KeyCollision,
    NonFinite,
    NumberOverflow,
    TopLevelNotObject,
    UnsupportedArray,
    UnsupportedValue,
)
from .numio import EXACT, INT_MAX, INT_MIN, UINT_MAX, CompareMode, UInt, check_sig_digits, format_float


class TokenKind(IntEnum):
    OBJECT_START = 0
    OBJECT_END = 1
    ARRAY_START = 2
    ARRAY_END = 3
    STRING = 4
    NUMBER = 5
    TRUE = 6
    FALSE = 7
    NULL = 8


class Token(NamedTuple):
    kind: TokenKind
    start: int
    end: int


_OS, _OE, _AS, _AE, _STR, _NUM, _TRUE, _FALSE, _NULL = range(9)

_WS = rb"[ \t\n\r]*"
_STRING = rb'"[^"\\\x00-\x1f]*(?:\\(?:["\\/bfnrt]|u[0-9a-fA-F]{4})[^"\\\x00-\x1f]*)*"'
_NUMBER = rb"-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?"

# a value, optionally with the separator that follows a scalar
_VALUE = re.compile(
    _WS + rb"(?:(" + _STRING + rb"|" + _NUMBER + rb"|true|false|null)" + _WS
    + rb"([,}\]]?)|([{\[]))")
# an object key with its colon
_KEY = re.compile(_WS + rb"(" + _STRING + rb")" + _WS + rb":")
_SEP = re.compile(_WS + rb"([,}\]])")
_WS_RE = re.compile(_WS)
_CLOSE = re.compile(_WS + rb"([}\]])")

_SCALAR_KIND = {ord('"'): _STR, ord("t"): _TRUE, ord("f"): _FALSE, ord("n"): _NULL}

# scanner states
_S_VALUE, _S_KEY, _S_KEY_OR_END, _S_VALUE_OR_END, _S_AFTER = range(5)


def _as_bytes(text):
    if isinstance(text, str):
        return text.encode("utf-8", "surrogatepass")
    return bytes(text)


def _check_utf8(buf):
    try:
        buf.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise JSONSyntaxError(exc.start, "invalid UTF-8") from None


def _scan(buf):
    """Grammar-check ``buf`` and return ``(kind, start, end)`` tuples."""
    _check_utf8(buf)
    toks = []
    emit = toks.append
    stack = []  # True for object, False for array
    n = len(buf)
    pos = 0
    state = _S_VALUE
    value_match = _VALUE.match
    key_match = _KEY.match
    sep_match = _SEP.match
    while True:
        if state == _S_VALUE:
            m = value_match(buf, pos)
            if m is None:
                raise _syntax(buf, pos, state)
            s, e = m.span(1)
            if s >= 0:
                emit((_SCALAR_KIND.get(buf[s], _NUM), s, e))
                sep = m.group(2)
                pos = m.end()
                if not sep:
                    state = _S_AFTER
                    continue
                if not stack:
                    raise JSONSyntaxError(pos - 1, "unexpected data after document")
                if sep == b",":
                    state = _S_KEY if stack[-1] else _S_VALUE
                    continue
                if (sep == b"}") != stack[-1]:
                    raise JSONSyntaxError(pos - 1, "mismatched closing bracket")
                stack.pop()
                emit((_OE if sep == b"}" else _AE, pos - 1, pos))
                state = _S_AFTER
            else:
                s = m.start(3)
                pos = s + 1
                if buf[s] == 123:  # {
                    emit((_OS, s, pos))
                    stack.append(True)
                    state = _S_KEY_OR_END
                else:
                    emit((_AS, s, pos))
                    stack.append(False)
                    state = _S_VALUE_OR_END
        elif state == _S_KEY:
            m = key_match(buf, pos)
            if m is None:
                raise _syntax(buf, pos, state)
            s, e = m.span(1)
            emit((_STR, s, e))
            pos = m.end()
            state = _S_VALUE
        elif state == _S_AFTER:
            if not stack:
                pos = _WS_RE.match(buf, pos).end()
                if pos != n:
                    raise JSONSyntaxError(pos, "unexpected data after document")
                return toks
            m = sep_match(buf, pos)
            if m is None:
                raise _syntax(buf, pos, state)
            pos = m.end()
            c = buf[pos - 1]
            if c == 44:  # ,
                state = _S_KEY if stack[-1] else _S_VALUE
                continue
            if (c == 125) != stack[-1]:
                raise JSONSyntaxError(pos - 1, "mismatched closing bracket")
            stack.pop()
            emit((_OE if c == 125 else _AE, pos - 1, pos))
        else:
            m = _CLOSE.match(buf, pos)
            want = 125 if state == _S_KEY_OR_END else 93
            if m is not None and buf[m.start(1)] == want:
                pos = m.end()
                stack.pop()
                emit((_OE if want == 125 else _AE, pos - 1, pos))
                state = _S_AFTER
            else:
                state = _S_KEY if state == _S_KEY_OR_END else _S_VALUE


def tokenize(text) -> list[Token]:
    """Tokens of a JSON document (``str`` or UTF-8 ``bytes``), in document order.

    Spans are byte offsets into the UTF-8 encoding of the input. Raises
    :class:`JSONSyntaxError` carrying the offset of the first bad byte.
    """
    return [Token(TokenKind(k), s, e) for k, s, e in _scan(_as_bytes(text))]


# error location (slow path, only on failure)

_NUM_CHARS = frozenset(b"0123456789+-.eE")


def _syntax(buf, pos, state):
    n = len(buf)
    if state == _S_AFTER and pos < n and buf[pos] in b".eE0123456789" and buf[pos - 1] in _NUM_CHARS:
        # a number that stopped early, as in "1." or "01": blame the byte that breaks it
        start = pos
        while buf[start - 1] in _NUM_CHARS:
            start -= 1
        return _number_error(buf, start)
    pos = _WS_RE.match(buf, pos).end()
    if pos >= n:
        return JSONSyntaxError(n, "unexpected end of input")
    c = buf[pos]
    if state == _S_KEY:
        if c != 34:
            return JSONSyntaxError(pos, "expected a string key")
        end = _string_error(buf, pos)
        if end is not None:
            return end
        m = re.compile(_STRING).match(buf, pos)
        p = _WS_RE.match(buf, m.end()).end()
        if p >= n:
            return JSONSyntaxError(n, "unexpected end of input")
        return JSONSyntaxError(p, "expected ':'")
    if state == _S_AFTER:
        return JSONSyntaxError(pos, "expected ',' or a closing bracket")
    # a value was expected
    if c == 34:
        err = _string_error(buf, pos)
        if err is not None:
            return err
    elif c == 45 or 48 <= c <= 57:
        return _number_error(buf, pos)
    elif c in (116, 102, 110):  # t f n
        word = {116: b"true", 102: b"false", 110: b"null"}[c]
        for i, b in enumerate(word):
            if pos + i >= n:
                return JSONSyntaxError(n, "unexpected end of input")
            if buf[pos + i] != b:
                return JSONSyntaxError(pos + i, "invalid literal")
    return JSONSyntaxError(pos, "expected a value")


def _string_error(buf, pos):
    n = len(buf)
    i = pos + 1
    while i < n:
        c = buf[i]
        if c == 34:
            return None
        if c < 0x20:
            return JSONSyntaxError(i, "control character in string")
        if c == 92:
            if i + 1 >= n:
                break
            e = buf[i + 1]
            if e == 117:  # u
                for j in range(i + 2, i + 6):
                    if j >= n:
                        return JSONSyntaxError(n, "unexpected end of input")
                    if buf[j] not in b"0123456789abcdefABCDEF":
                        return JSONSyntaxError(j, "bad \\u escape")
                i += 6
                continue
            if e not in b'"\\/bfnrt':
                return JSONSyntaxError(i + 1, "bad escape")
            i += 2
            continue
        i += 1
    return JSONSyntaxError(n, "unterminated string")


def _number_error(buf, pos):
    n = len(buf)
    i = pos
    if buf[i] == 45:
        i += 1
    if i >= n:
        return JSONSyntaxError(n, "unexpected end of input")
    if not 48 <= buf[i] <= 57:
        return JSONSyntaxError(i, "expected a digit")
    # the integer part is valid whenever the value regex saw a digit here;
    # anything left is a dangling fraction or exponent
    i += 1
    if buf[i - 1] != 48:
        while i < n and 48 <= buf[i] <= 57:
            i += 1
    if i < n and buf[i] == 46:
        i += 1
        if i >= n:
            return JSONSyntaxError(n, "unexpected end of input")
        if not 48 <= buf[i] <= 57:
            return JSONSyntaxError(i, "expected a digit")
        while i < n and 48 <= buf[i] <= 57:
            i += 1
    if i < n and buf[i] in b"eE":
        i += 1
        if i < n and buf[i] in b"+-":
            i += 1
        if i >= n:
            return JSONSyntaxError(n, "unexpected end of input")
        if not 48 <= buf[i] <= 57:
            return JSONSyntaxError(i, "expected a digit")
    return JSONSyntaxError(i, "unexpected character after number")


# deserialization

@dataclass(frozen=True)
class ParseOptions:
    key_inference: bool = False
    max_depth: int = 128
    duplicate_keys: str = "error"  # or "last_wins"

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.duplicate_keys not in ("error", "last_wins"):
            raise ValueError(f"unknown duplicate_keys mode {self.duplicate_keys!r}")


DEFAULT_PARSE = ParseOptions()

_INT_KEY = re.compile(r"-?(?:0|[1-9][0-9]*)\Z")
_NUM_KEY = re.compile(r"-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?\Z")


def _string(buf, s, e):
    raw = buf[s + 1 : e - 1]
    if b"\\" in raw:
        return scanstring(buf[s:e].decode("utf-8", "surrogatepass"), 1)[0]
    return raw.decode("utf-8")


def infer_key(text):
    """Internal key for an object-key string under key inference."""
    if _INT_KEY.match(text):
        if len(text) <= 20:
            v = int(text)
            if INT_MIN <= v <= INT_MAX:
                return v
            if v <= UINT_MAX:
                return (_UINT, UInt(v))
        return (_FLOAT, float(text) + 0.0)
    if _NUM_KEY.match(text):
        x = float(text)
        if x - x == 0:
            return (_FLOAT, x + 0.0)
    return text


def _number(buf, s, e):
    raw = buf[s:e]
    if b"." not in raw and b"e" not in raw and b"E" not in raw and e - s <= 20:
        v = int(raw)
        if INT_MIN <= v <= INT_MAX:
            return v
        if 0 <= v <= UINT_MAX:
            return UInt(v)
    x = float(raw)
    if x - x != 0:
        raise NumberOverflow(f"number at byte {s} exceeds the largest finite double")
    return x


def _array(buf, toks, i, n):
    """Build an Array from the tokens after ARRAY_START; return (array, next index)."""
    vals = []
    kinds = set()
    while True:
        kind, s, e = toks[i]
        i += 1
        if kind == _AE:
            break
        if kind == _NUM:
            v = _number(buf, s, e)
        elif kind == _TRUE:
            v = True
        elif kind == _FALSE:
            v = False
        else:
            what = {_OS: "an object", _AS: "a nested array", _NULL: "null", _STR: "a string"}[kind]
            raise UnsupportedArray(f"array at byte {s} contains {what}")
        kinds.add(type(v))
        vals.append(v)
    if bool in kinds and len(kinds) > 1:
        raise UnsupportedArray("array mixes booleans and numbers")
    try:
        return Array.infer(vals), i
    except TypeError as exc:
        raise UnsupportedArray(str(exc)) from None


def deserialize(text, opts: ParseOptions = DEFAULT_PARSE) -> Node:
    """Build a Node from JSON text whose top level is an object.

    Integers become Int (or UInt above the signed range), other numbers
    Float. Arrays must hold only numbers or only booleans. With
    ``key_inference`` numeric-looking keys become Int/UInt/Float keys.
    """
    buf = _as_bytes(text)
    toks = _scan(buf)
    return _build(buf, toks, opts)


def _build(buf, toks, opts):
    if toks[0][0] != _OS:
        raise TopLevelNotObject("top-level JSON value is not an object")
    infer = opts.key_inference
    max_depth = opts.max_depth
    last_wins = opts.duplicate_keys == "last_wins"
    root = Node()
    d = root._d
    stack = []
    n = len(toks)
    i = 1
    while i < n:
        kind, s, e = toks[i]
        i += 1
        if kind == _OE:
            if not stack:
                break
            d = stack.pop()
            continue
        # kind is the key string
        raw = buf[s + 1 : e - 1]
        key = scanstring(buf[s:e].decode("utf-8", "surrogatepass"), 1)[0] if b"\\" in raw else raw.decode("utf-8")
        if infer:
            key = infer_key(key)
        if key in d and not last_wins:
            raise DuplicateKey(f"duplicate key {key if type(key) is not tuple else key[1]!r} at byte {s}")
        kind, s, e = toks[i]
        i += 1
        if kind == _NUM:
            d[key] = _number(buf, s, e)
        elif kind == _STR:
            d[key] = _string(buf, s, e)
        elif kind == _OS:
            if len(stack) + 2 > max_depth:
                raise DepthExceeded(f"nesting deeper than {max_depth} at byte {s}")
            child = Node()
            d[key] = child
            stack.append(d)
            d = child._d
        elif kind == _TRUE:
            d[key] = True
        elif kind == _FALSE:
            d[key] = False
        elif kind == _AS:
            if len(stack) + 2 > max_depth:
                raise DepthExceeded(f"nesting deeper than {max_depth} at byte {s}")
            d[key], i = _array(buf, toks, i, n)
        else:
            raise UnsupportedValue(f"null at byte {s} has no cdict equivalent")
    return root


# serialization

@dataclass(frozen=True)
class SerializeOptions:
    indent: int | None = None  # None is compact
    sort_keys: bool = False
    compare: CompareMode = EXACT  # ordering used when sort_keys is set
    sig_digits: int | None = None  # None is shortest round trip
    nonfinite: str = "error"  # or "null"

    def __post_init__(self):
        if self.indent is not None and not 1 <= self.indent <= 8:
            raise ValueError("indent must be between 1 and 8 spaces")
        check_sig_digits(self.sig_digits)
        if self.nonfinite not in ("error", "null"):
            raise ValueError(f"unknown nonfinite mode {self.nonfinite!r}")


DEFAULT_SERIALIZE = SerializeOptions()

_ESCAPE = re.compile(r'[\x00-\x1f"\\\ud800-\udfff]')
_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}


def _escape_char(m):
    c = m.group()
    return _ESCAPES.get(c) or "\\u%04x" % ord(c)


def quote(s: str) -> str:
    """JSON string literal; non-ASCII text is written as-is."""
    if _ESCAPE.search(s) is None:
        return '"' + s + '"'
    return '"' + _ESCAPE.sub(_escape_char, s) + '"'


_TWO53 = 2.0 ** 53


class _Writer:
    def __init__(self, opts):
        self.sig = opts.sig_digits
        self.sort = opts.compare if opts.sort_keys else None
        self.null = opts.nonfinite == "null"
        self.indent = opts.indent
        self.out = []

    def float(self, x):
        if x - x != 0:
            if self.null:
                return "null"
            raise NonFinite(f"cannot serialize non-finite value {x!r}")
        s = format_float(x, self.sig)
        if (x >= _TWO53 or x <= -_TWO53) and self.sig is None and "e" not in s and int(s) != x:
            # shortest digits padded with zeros, e.g. 95926874558934850 for
            # 95926874558934848.0: read as an integer that text is another number
            s += ".0"
        return s

    def key(self, ik):
        if type(ik) is str:
            return quote(ik)
        if type(ik) is int:
            return '"%d"' % ik
        tag, v = ik
        if tag == _FLOAT:
            return '"' + self.float(v) + '"'
        if tag == _BOOL:
            return '"true"' if v else '"false"'
        return '"%d"' % v

    def scalar(self, v):
        t = type(v)
        if t is int:
            return "%d" % v
        if t is float:
            return self.float(v)
        if t is str:
            return quote(v)
        if t is bool:
            return "true" if v else "false"
        if t is UInt:
            return "%d" % v
        raise TypeError(f"cannot serialize {t.__name__}")

    def array(self, a, level):
        if a.elem == FLOAT:
            items = [self.float(x) for x in a.values]
        elif a.elem == BOOL:
            items = ["true" if x else "false" for x in a.values]
        else:
            items = ["%d" % x for x in a.values]
        if not items:
            return "[]"
        if self.indent is None:
            return "[" + ",".join(items) + "]"
        pad = "\n" + " " * (self.indent * (level + 1))
        return "[" + pad + ("," + pad).join(items) + "\n" + " " * (self.indent * level) + "]"

    def node(self, node, level):
        d = node._d
        out = self.out
        if not d:
            out.append("{}")
            return
        keys = d if self.sort is None else sorted_ikeys(d, self.sort)
        seen = None
        for ik in d:
            if type(ik) is not str:
                seen = set()
                break
        if self.indent is None:
            sep, colon, close = ",", ":", "}"
            out.append("{")
        else:
            pad = "\n" + " " * (self.indent * (level + 1))
            sep, colon, close = "," + pad, ": ", "\n" + " " * (self.indent * level) + "}"
            out.append("{" + pad)
        first = True
        key = self.key
        scalar = self.scalar
        for ik in keys:
            ks = quote(ik) if type(ik) is str else key(ik)
            if seen is not None:
                if ks in seen:
                    raise KeyCollision(f"two keys render as {ks} in one object")
                seen.add(ks)
            if first:
                first = False
            else:
                out.append(sep)
            out.append(ks)
            out.append(colon)
            v = d[ik]
            if v.__class__ is Node:
                self.node(v, level + 1)
            elif v.__class__ is Array:
                out.append(self.array(v, level + 1))
            else:
                out.append(scalar(v))
        out.append(close)


def serialize(node: Node, opts: SerializeOptions = DEFAULT_SERIALIZE) -> str:
    """Render ``node`` as JSON text. Metadata is not written."""
    w = _Writer(opts)
    w.node(node, 0)
    return "".join(w.out)


def serialize_value(value, opts: SerializeOptions = DEFAULT_SERIALIZE) -> str:
    """JSON text for any single value, including scalars and arrays."""
    if isinstance(value, Node):
        return serialize(value, opts)
    w = _Writer(opts)
    if type(value) is Array:
        return w.array(value, 0)
    return w.scalar(value)
