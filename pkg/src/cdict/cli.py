"""``cdict`` command line: merge, get, print, stats and demo.

Exit codes: 0 ok, 1 usage, 2 unreadable or unrepresentable JSON,
3 merge conflict, 4 path not found, 5 I/O failure.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import demo
from .core import ARRAY, BOOL, FLOAT, INT, TEXT, UINT, Node, iter_leaves, tag_of
from .errors import CdictError, JSONSyntaxError, MergeConflict
from .jsonio import ParseOptions, SerializeOptions, deserialize, infer_key, serialize, serialize_value
from .merge import MergePolicy, merge_chunks
from .numio import UINT_MAX, UInt, compare_numbers, format_float

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CONFLICT, EXIT_NOT_FOUND, EXIT_IO = range(6)

_POLICIES = {
    "sum": ("error", "error"),
    "left": ("keep_left", "keep_left"),
    "right": ("keep_right", "keep_right"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_path_expr(expr: str, key_inference: bool = True) -> list:
    """Split ``/a/b\\/c`` into keys; ``\\/`` is a literal slash, ``\\\\`` a backslash."""
    if not expr.startswith("/") or expr == "/":
        raise UsageError(f"path must look like /key/key..., got {expr!r}")
    segments = []
    cur = []
    i = 1
    while i < len(expr):
        c = expr[i]
        if c == "\\":
            if i + 1 >= len(expr) or expr[i + 1] not in "/\\":
                raise UsageError(f"bad escape at position {i} of {expr!r}")
            cur.append(expr[i + 1])
            i += 2
            continue
        if c == "/":
            segments.append("".join(cur))
            cur = []
        else:
            cur.append(c)
        i += 1
    segments.append("".join(cur))
    if not key_inference:
        return segments
    keys = []
    for seg in segments:
        k = infer_key(seg)
        keys.append(k[1] if type(k) is tuple else k)
    return keys


_NUMERIC_KEY = (int, UInt, float)


def lookup(node: Node, keys: list):
    """Follow ``keys``; a numeric key also matches a numerically equal key of another tag.

    Returns the value, or ``None`` when the path is absent.
    """
    cur = node
    for k in keys:
        if not isinstance(cur, Node):
            return None
        if k in cur:
            cur = cur[k]
            continue
        if type(k) not in _NUMERIC_KEY:
            return None
        for other in cur:
            if type(other) in _NUMERIC_KEY and compare_numbers(k, other) == 0:
                cur = cur[other]
                break
        else:
            return None
    return cur


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def _write(text, out):
    data = (text + "\n").encode("utf-8")
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def _err(msg):
    sys.stderr.write(f"cdict: {msg}\n")


def _serialize_opts(args):
    return SerializeOptions(indent=args.indent, sort_keys=args.sort_keys, sig_digits=args.sig_digits)


def _load(path, args):
    return deserialize(_read(path), ParseOptions(key_inference=not args.no_key_inference))


def cmd_merge(args):
    scalar, types = _POLICIES[args.policy]
    policy = MergePolicy(scalar_conflict=scalar, type_conflict=types, array_rule=args.arrays)
    texts = [_read(f) for f in args.files]
    try:
        node = merge_chunks(texts, policy, ParseOptions(key_inference=not args.no_key_inference))
    except MergeConflict as exc:
        where = "/" + "/".join(_render_key(k) for k in exc.path)
        _err(f"merge conflict in chunk {exc.chunk} ({args.files[exc.chunk]}) at {where}: {exc.reason}")
        return EXIT_CONFLICT
    except JSONSyntaxError as exc:
        _err(f"{args.files[exc.chunk]}: syntax error at byte {exc.offset}: {exc.reason}")
        return EXIT_PARSE
    except CdictError as exc:
        _err(f"{args.files[exc.chunk]}: {exc}")
        return EXIT_PARSE
    _write(serialize(node, _serialize_opts(args)), args.out)
    return EXIT_OK


def _render_key(k):
    if type(k) is float:
        s = format_float(k)
    elif type(k) is bool:
        s = "true" if k else "false"
    else:
        s = str(k)
    return s.replace("\\", "\\\\").replace("/", "\\/")


def _render_value(v, opts):
    if type(v) is str:
        return v
    return serialize_value(v, opts)


def cmd_get(args):
    keys = parse_path_expr(args.path, not args.no_key_inference)
    node = _load(args.file, args)
    value = lookup(node, keys)
    if value is None:
        _err(f"{args.path}: not found")
        return EXIT_NOT_FOUND
    _write(_render_value(value, _serialize_opts(args)), None)
    return EXIT_OK


def cmd_print(args):
    node = _load(args.file, args)
    _write(serialize(node, _serialize_opts(args)), None)
    return EXIT_OK


def cmd_stats(args):
    node = _load(args.file, args)
    counts = dict.fromkeys((INT, UINT, FLOAT, BOOL, TEXT, ARRAY), 0)
    for _, v in iter_leaves(node):
        counts[tag_of(v)] += 1
    lines = [f"leaf_count: {node.leaf_count()}", f"depth: {node.depth()}"]
    lines += [f"{tag}: {n}" for tag, n in counts.items()]
    _write("\n".join(lines), None)
    return EXIT_OK


def cmd_demo(args):
    if args.chunks < 1 or args.events_per_chunk < 1:
        raise UsageError("--chunks and --events-per-chunk must be >= 1")
    if not 0 <= args.seed <= UINT_MAX:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    nodes = demo.chunks(args.chunks, args.events_per_chunk, args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    width = max(4, len(str(args.chunks - 1)))
    for i, node in enumerate(nodes):
        _write(serialize(node), os.path.join(args.out_dir, f"chunk_{i:0{width}d}.json"))
    return EXIT_OK


def _output_flags(p):
    p.add_argument("--indent", type=int, choices=range(1, 9), metavar="N",
                   help="indent N (1-8) spaces per level; compact when omitted")
    p.add_argument("--sort-keys", action="store_true", help="write keys in sorted order")
    p.add_argument("--sig-digits", type=int, choices=range(1, 18), metavar="N",
                   help="write floats with N (1-17) significant digits; shortest round trip when omitted")
    p.add_argument("--no-key-inference", action="store_true",
                   help="keep every object key as text")


def build_parser():
    parser = _Parser(prog="cdict", description="Inspect and merge cdict JSON files.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("merge", help="sum-merge JSON chunks in argument order")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--out", help="output file (default stdout)")
    p.add_argument("--policy", choices=sorted(_POLICIES), default="sum",
                   help="sum: numbers add, other conflicts fail; left/right: keep that side on conflict")
    p.add_argument("--arrays", choices=("sum", "concat", "error"), default="sum",
                   help="how numeric arrays combine")
    _output_flags(p)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("get", help="print the value at a /key/key path")
    p.add_argument("file")
    p.add_argument("path")
    _output_flags(p)
    p.set_defaults(func=cmd_get)

    p = sub.add_parser("print", help="re-serialize a file")
    p.add_argument("file")
    _output_flags(p)
    p.set_defaults(func=cmd_print)

    p = sub.add_parser("stats", help="leaf count, depth and value tags")
    p.add_argument("file")
    p.add_argument("--no-key-inference", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("demo", help="write a chunked Hertzsprung-Russell diagram histogram")
    p.add_argument("out_dir")
    p.add_argument("--chunks", type=int, default=4)
    p.add_argument("--events-per-chunk", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except JSONSyntaxError as exc:
        _err(f"{args.file}: syntax error at byte {exc.offset}: {exc.reason}")
        return EXIT_PARSE
    except CdictError as exc:
        _err(f"{getattr(args, 'file', '')}: {exc}")
        return EXIT_PARSE
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
