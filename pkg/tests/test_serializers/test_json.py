"""Tests for the JSON zero-table codec."""
import json
import math

import pytest

from szego_borel.numerics.quadrature import QuadSpec
from szego_borel.phi import ModelOrder
from szego_borel.serializers.json import (
    SCHEMA_VERSION,
    JSONSerializer,
    SerializationError,
    table_to_document,
)
from szego_borel.zeros import ZeroRecord, ZeroTable


@pytest.fixture
def table():
    records = tuple(
        ZeroRecord(j, a, complex(0.0, (-1) ** j * 10.0 ** j / 3.0), 0.1 * j + 1.0 / 7.0,
                   -math.pi * j, math.copysign(math.pi / 2, (-1) ** (j + 1)))
        for j, a in enumerate((2.3456789012345678, 4.1, 5.5 + 1e-13), start=1)
    )
    return ZeroTable(ModelOrder(2), records, QuadSpec(1e-10, 1e-14), (3,))


def test_json_round_trip_is_exact(table):
    serializer = JSONSerializer()
    data = serializer.serialize(table)
    loaded = serializer.deserialize(data)
    assert loaded == table
    assert serializer.serialize(loaded) == data


def test_json_document_fields(table):
    doc = json.loads(JSONSerializer().serialize(table))
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["m"] == 2
    assert doc["multiplicity_flags"] == [3]
    assert [r["j"] for r in doc["records"]] == [1, 2, 3]
    assert doc == table_to_document(table)


def test_json_compact(table):
    assert b"\n" not in JSONSerializer(indent=None).serialize(table)


def test_json_invalid_json():
    with pytest.raises(SerializationError, match="Failed to deserialize JSON"):
        JSONSerializer().deserialize(b"invalid json")


def test_json_wrong_schema(table):
    doc = table_to_document(table)
    doc["schema_version"] = 99
    with pytest.raises(SerializationError, match="schema_version"):
        JSONSerializer().deserialize(json.dumps(doc).encode())


def test_json_inconsistent_constants(table):
    doc = table_to_document(table)
    doc["c2"] *= 1.01
    with pytest.raises(SerializationError, match="c2"):
        JSONSerializer().deserialize(json.dumps(doc).encode())


def test_json_missing_field(table):
    doc = table_to_document(table)
    del doc["records"][0]["a"]
    with pytest.raises(SerializationError, match="Failed to load table"):
        JSONSerializer().deserialize(json.dumps(doc).encode())


def test_json_index_gap(table):
    doc = table_to_document(table)
    del doc["records"][1]
    with pytest.raises(SerializationError, match="gaps"):
        JSONSerializer().deserialize(json.dumps(doc).encode())


def test_json_non_finite(table):
    bad = ZeroTable(table.order, (ZeroRecord(1, math.nan, 1j, 0.0, 0.0, 0.0),))
    with pytest.raises(SerializationError, match="Failed to serialize"):
        JSONSerializer().serialize(bad)
