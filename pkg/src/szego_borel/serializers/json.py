"""
JSON codec for zero tables.

Floats are written with ``repr``, the shortest decimal form that reads back
to the same double, so a reloaded table is bit-identical to the saved one.
"""
import json
import math
from typing import Any, Dict

from ..errors import LabError
from ..numerics.quadrature import QuadSpec
from ..phi import ModelOrder
from ..zeros import ZeroRecord, ZeroTable
from .base import BaseSerializer

SCHEMA_VERSION = 1


class SerializationError(LabError):
    """Raised when serialization or deserialization fails."""


def table_to_document(table: ZeroTable) -> Dict[str, Any]:
    order = table.order
    return {
        "schema_version": SCHEMA_VERSION,
        "m": order.m,
        "c0": order.c0,
        "c1": order.c1,
        "c2": order.c2,
        "quad_tols": {
            "rel_tol": table.quad_tols.rel_tol,
            "abs_tol": table.quad_tols.abs_tol,
            "max_evals": table.quad_tols.max_evals,
        },
        "records": [
            {
                "j": r.j,
                "a": r.a,
                "phi_prime_re": r.phi_prime.real,
                "phi_prime_im": r.phi_prime.imag,
                "f": r.f,
                "c_log_mag": r.c_log_mag,
                "c_phase": r.c_phase,
            }
            for r in table.records
        ],
        "multiplicity_flags": list(table.multiplicity_flags),
    }


def document_to_table(doc: Dict[str, Any]) -> ZeroTable:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SerializationError(f"Unsupported schema_version: {version!r}")
    order = ModelOrder(int(doc["m"]))
    for name in ("c0", "c1", "c2"):
        stored, computed = float(doc[name]), getattr(order, name)
        if not math.isclose(stored, computed, rel_tol=1e-13, abs_tol=1e-300):
            raise SerializationError(
                f"Failed to load table: stored {name}={stored!r} disagrees with {computed!r}"
            )
    tols = doc["quad_tols"]
    records = tuple(
        ZeroRecord(
            j=int(r["j"]),
            a=float(r["a"]),
            phi_prime=complex(float(r["phi_prime_re"]), float(r["phi_prime_im"])),
            f=float(r["f"]),
            c_log_mag=float(r["c_log_mag"]),
            c_phase=float(r["c_phase"]),
        )
        for r in doc["records"]
    )
    if [r.j for r in records] != list(range(1, len(records) + 1)):
        raise SerializationError("Failed to load table: record indices have gaps")
    return ZeroTable(
        order,
        records,
        QuadSpec(float(tols["rel_tol"]), float(tols["abs_tol"]), int(tols["max_evals"])),
        tuple(int(j) for j in doc.get("multiplicity_flags", [])),
    )


class JSONSerializer(BaseSerializer):
    """
    JSON serializer for zero tables.

    Args:
        indent: Indentation of the written document (None for compact)
    """

    def __init__(self, indent: int = 2):
        self.indent = indent

    def serialize(self, table: ZeroTable) -> bytes:
        try:
            text = json.dumps(table_to_document(table), indent=self.indent, allow_nan=False)
        except (TypeError, ValueError, AttributeError) as e:
            raise SerializationError(f"Failed to serialize zero table to JSON: {e}")
        return text.encode("utf-8")

    def deserialize(self, data: bytes) -> ZeroTable:
        try:
            doc = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise SerializationError(f"Failed to deserialize JSON: {e}")
        try:
            return document_to_table(doc)
        except (KeyError, TypeError, ValueError) as e:
            raise SerializationError(f"Failed to load table: {e}")
