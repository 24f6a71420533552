import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kuznetsov4.emit import dumps_csv, dumps_json, emit, parse, to_plain

floats = st.floats(allow_nan=False, allow_infinity=False)
scalars = st.one_of(st.none(), st.booleans(), st.integers(-10**12, 10**12), floats, st.text(max_size=8),
                    st.builds(complex, floats, floats))
docs = st.recursive(scalars, lambda inner: st.one_of(st.lists(inner, max_size=4),
                                                    st.dictionaries(st.text(max_size=5), inner, max_size=4)),
                    max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(docs)
def test_json_round_trip(doc):
    if isinstance(doc, dict) and set(doc) == {"re", "im"}:
        return  # indistinguishable from an encoded complex number
    assert parse(emit(doc, "json"), "json") == doc


row = st.fixed_dictionaries({"n": st.integers(-1000, 1000), "x": floats, "z": st.builds(complex, floats, floats),
                             "ok": st.booleans(), "name": st.sampled_from(["w1", "w8", "R2"])})


@settings(max_examples=100, deadline=None)
@given(st.lists(row, min_size=1, max_size=5))
def test_csv_round_trip(rows):
    assert parse(emit(rows, "csv"), "csv") == rows


def test_seventeen_digits():
    assert dumps_json(0.1).strip() == "0.10000000000000001"
    assert dumps_json(1 / 3).strip() == "0.33333333333333331"
    assert "0.10000000000000001" in dumps_csv([{"x": 0.1}])


def test_field_order_is_preserved():
    text = dumps_json({"b": 1, "a": 2, "c": 3})
    assert text.index('"b"') < text.index('"a"') < text.index('"c"')


def test_empty_documents():
    assert parse(emit({}, "json"), "json") == {}
    assert parse(emit([], "json"), "json") == []
    assert emit([], "csv") == "\n"
    assert parse(emit([], "csv"), "csv") == []


def test_csv_header_follows_columns():
    text = dumps_csv([{"value": 1 + 2j, "cells": 3, "w": "w8"}], columns=["w", "value", "cells"])
    assert text.splitlines()[0] == "w,value_re,value_im,cells"


def test_csv_header_covers_every_row():
    text = dumps_csv([{"a": 1}, {"a": 2, "b": 1j}])
    assert text.splitlines()[0] == "a,b_re,b_im"
    assert parse(text, "csv") == [{"a": 1, "b": None}, {"a": 2, "b": 1j}]


def test_numpy_and_nonfinite_values():
    doc = {"a": np.float64(1.5), "b": np.arange(3), "c": np.complex128(1j), "d": math.inf, "e": np.bool_(True)}
    back = parse(dumps_json(doc), "json")
    assert back == {"a": 1.5, "b": [0, 1, 2], "c": 1j, "d": math.inf, "e": True}
    assert math.isnan(parse(dumps_json(math.nan), "json"))


def test_emit_writes_file(tmp_path):
    path = tmp_path / "out.json"
    text = emit({"x": 1}, "json", path)
    assert path.read_text() == text


def test_unsupported_values():
    with pytest.raises(TypeError):
        to_plain(object())
    with pytest.raises(ValueError):
        emit({}, "xml")
