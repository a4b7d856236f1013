import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cdict import (
    Array,
    Node,
    deep_equal,
    iter_leaves,
    key_tag,
)
from cdict.core import add_numbers, canonical_key
from cdict.errors import (
    BadBin,
    CycleError,
    DimensionMismatch,
    NoSuchEntry,
    OutOfRange,
    PathConflict,
    TypeMismatch,
)
from cdict.numio import INT_MAX, INT_MIN, UINT_MAX, CompareMode, FloatPolicy, UInt

from gen import random_node, typed_key
from oracles import bits, brute_bins, hist_counts, insertion_sort, key_order_cmp, nearest_double

ABS = FloatPolicy(compare=CompareMode.absolute(1e-9))


def test_new_node_is_empty():
    n = Node()
    assert n.leaf_count() == 0
    assert list(n) == []
    assert n.depth() == 0


def test_set_creates_intermediate_nodes():
    n = Node()
    n.set(["a", "b"], 3)
    assert n.get(["a", "b"]).value == 3
    inner = n.get(["a"]).value
    assert isinstance(inner, Node) and len(inner) == 1


def test_set_through_leaf_conflicts():
    n = Node()
    n.set(["a"], 1)
    with pytest.raises(PathConflict) as info:
        n.set(["a", "b"], 3)
    assert info.value.path == ("a",)
    n.set(["a", "b"], 3, overwrite_nonnode=True)
    assert n.value(["a", "b"]) == 3


def test_set_replaces():
    n = Node()
    n.set(["p"], 1)
    n.set(["p"], 2)
    assert n.value("p") == 2
    assert n.leaf_count() == 1


def test_set_keeps_order_of_existing_keys():
    n = Node()
    for k in ["z", "a", "m"]:
        n.set([k], 0)
    n.set(["a"], 5)
    n.set(["b"], 1)
    assert list(n) == ["z", "a", "m", "b"]


def test_empty_path_rejected():
    with pytest.raises(ValueError):
        Node().set([], 1)


def test_get_absent():
    n = Node()
    assert n.get(["x"]) is None
    n.set(["a"], 1)
    assert n.get(["a", "b"]) is None


def test_numeric_keys_of_different_tags_are_distinct():
    n = Node()
    n.set([1], "int")
    n.set([UInt(1)], "uint")
    n.set([1.0], "float")
    n.set([True], "bool")
    n.set(["1"], "text")
    assert len(n) == 5
    assert [key_tag(k) for k in n] == ["Int", "UInt", "Float", "Bool", "Text"]
    assert n.value([1.0]) == "float"
    assert n.value([UInt(1)]) == "uint"


def test_negative_zero_key_is_canonical():
    n = Node()
    n.set([-0.0], 1)
    n.add_number([0.0], 1)
    assert len(n) == 1
    assert bits(next(iter(n))) == 0
    assert bits(canonical_key(-0.0)) == 0


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
def test_nonfinite_keys_rejected(bad):
    with pytest.raises(ValueError):
        Node().set([bad], 1)


def test_unsupported_key_and_value_types():
    with pytest.raises(TypeError):
        Node().set([None], 1)
    with pytest.raises(TypeError):
        Node().set(["a"], object())


def test_large_int_becomes_uint():
    n = Node()
    n.set([2 ** 63], 2 ** 64 - 1)
    (k,) = n
    assert key_tag(k) == "UInt"
    assert type(n.value([2 ** 63])) is UInt
    with pytest.raises(OutOfRange):
        n.set(["big"], 2 ** 64)
    with pytest.raises(OutOfRange):
        n.set(["small"], INT_MIN - 1)


def test_add_number_repeated():
    n = Node()
    for _ in range(3):
        n.add_number(["n"], 1)
    assert n.value("n") == 3 and type(n.value("n")) is int


def test_add_number_promotes_to_float():
    n = Node()
    n.set(["x"], 2)
    assert n.add_number(["x"], 0.5) == 2.5
    assert type(n.value("x")) is float


def test_add_number_int_overflow():
    n = Node()
    n.set(["x"], INT_MAX)
    got = n.add_number(["x"], 1)
    expected = nearest_double(Fraction(INT_MAX) + 1)
    assert type(got) is float
    assert bits(got) == bits(expected)
    assert got == 9.223372036854776e18


def test_add_number_uint_overflow():
    n = Node()
    n.set(["x"], UInt(UINT_MAX))
    got = n.add_number(["x"], UInt(1))
    assert type(got) is float
    assert bits(got) == bits(nearest_double(Fraction(UINT_MAX + 1)))


def test_add_numbers_rules():
    assert type(add_numbers(UInt(2), UInt(3))) is UInt
    assert add_numbers(INT_MIN, -1) == float(INT_MIN) - 1.0
    # mixed integer tags stay integral while the sum fits somewhere
    assert add_numbers(UInt(2 ** 63), -1) == 2 ** 63 - 1
    assert type(add_numbers(UInt(2 ** 63), -1)) is int
    assert type(add_numbers(UInt(2 ** 63), 1)) is UInt
    assert add_numbers(1, 0.25) == 1.25


def test_add_number_type_mismatch():
    n = Node()
    n.set(["t"], "text")
    n.set(["b"], True)
    n.set(["a"], [1, 2])
    n.set(["n", "x"], 1)
    for p in ("t", "b", "a", "n"):
        with pytest.raises(TypeMismatch):
            n.add_number([p], 1)
    with pytest.raises(TypeMismatch):
        n.add_number(["new"], True)
    with pytest.raises(TypeMismatch):
        n.add_number(["new"], "1")


def test_add_number_creates_path():
    n = Node()
    n.add_number(["a", 1, 2.5, True], 4)
    assert n.value(["a", 1, 2.5, True]) == 4
    assert n.depth() == 4


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 200))
def test_add_number_linear(k, reps):
    n = Node()
    for _ in range(reps):
        n.add_number(["p", "q"], k)
    assert n.value(["p", "q"]) == reps * k
    assert type(n.value(["p", "q"])) is int


def test_hist_add_single():
    n = Node()
    n.hist_add([], [2.3], [1.0])
    assert list(n) == [2.0]
    assert key_tag(2.0) == "Float"
    assert n.value([2.0]) == 1


def test_hist_add_same_bin():
    n = Node()
    n.hist_add([], [2.3], [1.0])
    n.hist_add([], [2.9], [1.0])
    assert n.keys() == [2.0] and n.value([2.0]) == 2


def test_hist_add_prefix_negative_and_weight():
    n = Node()
    n.hist_add(["h"], [-0.5, 0.1], [1.0, 0.25], weight=0.5)
    n.hist_add("h", [-0.0, 0.0], [1.0, 0.25], weight=2)
    assert n.value(["h", -1.0, 0.0]) == 0.5
    assert n.value(["h", 0.0, 0.0]) == 2


def test_hist_add_errors():
    n = Node()
    with pytest.raises(DimensionMismatch):
        n.hist_add([], [1.0, 2.0], [1.0])
    with pytest.raises(DimensionMismatch):
        n.hist_add([], [], [])
    for coords, widths in [([1.0], [0.0]), ([1.0], [-1.0]), ([float("nan")], [1.0]),
                           ([1.0], [float("inf")]), ([1e308], [1e-308])]:
        with pytest.raises(BadBin):
            n.hist_add([], coords, widths)
    assert len(n) == 0


def test_hist_add_matches_brute_force():
    rng = random.Random(11)
    samples = [(rng.uniform(0, 10),) for _ in range(10_000)]
    n = Node()
    for s in samples:
        n.hist_add([], s, [1.0])
    tally = brute_bins(samples, (1.0,))
    assert len(n) == 10 and sum(n.value([k]) for k in n) == 10_000
    assert hist_counts(n, 1) == dict(tally)


@pytest.mark.parametrize("widths", [(0.1,), (0.3, 2.5), (1 / 3, 0.7, 1e-3)])
def test_hist_add_multi_dim_matches_brute_force(widths):
    rng = random.Random(len(widths))
    samples = [tuple(rng.uniform(-20, 20) for _ in widths) for _ in range(3000)]
    n = Node()
    for s in samples:
        n.hist_add(["h"], s, widths)
    assert hist_counts(n.value("h"), len(widths)) == dict(brute_bins(samples, widths))


def test_remove():
    n = Node()
    assert n.remove(["x"]) is None
    n.set(["x"], 1)
    assert n.remove(["x"]).value == 1
    assert n.get(["x"]) is None
    n.set(["a", "b"], 1)
    n.remove(["a", "b"])
    inner = n.get(["a"]).value
    assert isinstance(inner, Node) and len(inner) == 0


def test_metadata():
    n = Node()
    n.set(["x"], 1)
    assert n.get_metadata(["x"]) is None
    n.set_metadata(["x"], "count")
    assert n.get_metadata(["x"]) == "count"
    n.set(["x"], 2)
    assert n.get(["x"]) == (2, "count")
    n.add_number(["x"], 1)
    assert n.get_metadata(["x"]) == "count"
    with pytest.raises(NoSuchEntry):
        n.set_metadata(["missing"], 1)
    with pytest.raises(NoSuchEntry):
        n.set_metadata(["x", "deeper"], 1)
    assert n.remove(["x"]).metadata == "count"


def test_metadata_may_be_a_node():
    n = Node()
    n.set(["x"], 1)
    n.set_metadata(["x"], Node.from_mapping({"unit": "Msun", "edges": [0.0, 0.5]}))
    assert n.get_metadata(["x"]).value(["edges"]) == Array("Float", [0.0, 0.5])


def test_cycles_rejected():
    root = Node()
    root.set(["a", "b"], 1)
    child = root.value(["a"])
    with pytest.raises(CycleError):
        child.set(["loop"], root)
    with pytest.raises(CycleError):
        root.set(["a", "c"], root)
    with pytest.raises(CycleError):
        root.set_metadata(["a", "b"], root)
    other = Node()
    other.set(["c"], child)  # sharing into a different tree is fine
    assert other.value(["c", "b"]) == 1


def _brute_counts(node):
    leaves = 0
    deepest = 0

    def walk(n, level):
        nonlocal leaves, deepest
        if len(n):
            deepest = max(deepest, level + 1)
        for k in n:
            v = n[k]
            if isinstance(v, Node):
                walk(v, level + 1)
            else:
                leaves += 1

    walk(node, 0)
    return leaves, deepest


def test_leaf_count_and_depth():
    n = Node()
    n.set(["a", "b"], 1)
    assert (n.leaf_count(), n.depth()) == (1, 2)
    tree = Node()
    for i in range(2):
        for j in range(2):
            for k in range(2):
                tree.set([i, j, k], 1)
    assert _brute_counts(tree) == (8, 3)
    assert (tree.leaf_count(), tree.depth()) == (8, 3)


def test_empty_child_counts_toward_depth():
    n = Node()
    n.set(["a"], Node())
    assert n.depth() == 1 and n.leaf_count() == 0


def test_counts_match_brute_force_on_random_trees():
    rng = random.Random(5)
    for _ in range(200):
        n = random_node(rng, key=typed_key)
        assert (n.leaf_count(), n.depth()) == _brute_counts(n)
        assert n.leaf_count() == sum(1 for _ in iter_leaves(n))


def test_sorted_keys_by_class_then_value():
    n = Node()
    for k in ["b", 2, True, 1.5]:
        n.set([k], 0)
    assert n.sorted_keys() == [True, 1.5, 2, "b"]


def test_sorted_keys_mixed_numeric_tags():
    n = Node()
    for k in ["a", UInt(2 ** 64 - 1), -3, 2.5, False, 1e19, True, "B", 0.0]:
        n.set([k], 0)
    assert n.sorted_keys() == [False, True, -3, 0.0, 2.5, 1e19, UInt(2 ** 64 - 1), "B", "a"]


def test_sorted_keys_stable_under_tolerance():
    n = Node()
    n.set([1.0 + 1e-12], 0)
    n.set([1.0], 0)
    assert n.sorted_keys(ABS) == [1.0 + 1e-12, 1.0]
    assert n.sorted_keys() == [1.0, 1.0 + 1e-12]


def test_sorted_keys_equal_int_and_float_stay_in_order():
    n = Node()
    n.set([2.0], 0)
    n.set([2], 0)
    n.set([UInt(2)], 0)
    assert [key_tag(k) for k in n.sorted_keys()] == ["Float", "Int", "UInt"]


def test_sorted_keys_match_oracle_and_are_idempotent():
    rng = random.Random(9)
    for _ in range(50):
        n = Node()
        for _ in range(100):
            n.set([typed_key(rng) if rng.random() < 0.9 else rng.random() < 0.5], 0)
        order = n.sorted_keys()
        assert order == insertion_sort(list(n), key_order_cmp)
        assert sorted(map(repr, order)) == sorted(map(repr, n))
        again = Node()
        for k in order:
            again.set([k], 0)
        assert again.sorted_keys() == order


def test_deep_equal_basics():
    a = Node.from_mapping({"x": 1.0, "y": {"z": [1, 2]}})
    b = Node.from_mapping({"y": {"z": [1, 2]}, "x": 1.0 + 1e-12})
    assert deep_equal(a, a)
    assert not deep_equal(a, b)
    assert deep_equal(a, b, ABS)
    c = Node.from_mapping({"x": 1.0, "y": {"z": [1, 2]}})
    assert deep_equal(a, c) and deep_equal(c, a)


def test_deep_equal_keys_are_typed():
    a = Node.from_mapping({1: 0})
    b = Node.from_mapping({1.0: 0})
    assert not deep_equal(a, b)


def test_deep_equal_compares_metadata():
    a = Node.from_mapping({"x": 1})
    b = a.copy()
    assert deep_equal(a, b)
    b.set_metadata(["x"], "m")
    assert not deep_equal(a, b)
    a.set_metadata(["x"], "m")
    assert deep_equal(a, b)


def test_deep_equal_arrays_and_relative_mode():
    rel = FloatPolicy(compare=CompareMode.relative(1e-12))
    a = Node.from_mapping({"v": [1e6, 2.0]})
    b = Node.from_mapping({"v": [1e6 + 1e-7, 2.0]})
    assert not deep_equal(a, b)
    assert deep_equal(a, b, rel)
    assert not deep_equal(a, Node.from_mapping({"v": [1e6]}), rel)
    assert not deep_equal(Node.from_mapping({"v": [True]}), Node.from_mapping({"v": [1]}))


def test_copy_is_deep():
    a = Node.from_mapping({"x": {"y": 1}})
    b = a.copy()
    b.add_number(["x", "y"], 1)
    assert a.value(["x", "y"]) == 1


def test_array_validation():
    assert Array.infer([1, 2.5]).elem == "Float"
    assert Array.infer([1, 2 ** 63]).elem == "UInt"
    assert Array.infer([True, False]).elem == "Bool"
    with pytest.raises((TypeError, ValueError)):
        Array.infer([1, "a"])
    with pytest.raises((TypeError, ValueError)):
        Array.infer([True, 1])
    with pytest.raises((TypeError, ValueError)):
        Array("Int", [1.5])
    with pytest.raises((TypeError, ValueError)):
        Array("Text", ["a"])
