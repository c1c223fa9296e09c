import json

import pytest

from fib_example import PHI, PSI, plus
from wiring_operad import Filling, TupleList, compose, trace
from wiring_operad.tracefmt import emit_trace, read_trace, trace_records, trace_to_dict

FLAT_FIB = Filling(compose(PSI, [PHI]), [plus()])


def test_records_order_supplies_before_demands():
    recs = trace_records(trace(FLAT_FIB, TupleList.units(1)))
    roles = [r[2] for r in recs]
    assert roles == sorted(roles, key=lambda r: r != "supply")
    assert {r[0] for r in recs} == {1}


def test_table_three_ticks():
    lines = emit_trace(trace(FLAT_FIB, TupleList.units(3)), "table").splitlines()
    assert lines[0].split() == ["step", "wire", "role", "value"]
    body = [l.split() for l in lines[1:]]
    supplies = [int(v) for s, w, r, v in body if r == "supply"]
    demands = [int(v) for s, w, r, v in body if r == "demand"]
    assert supplies == [1, 1, 2, 1, 3, 2]
    assert demands == [1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3]
    # columns line up
    starts = {l.index("supply") for l in lines if "supply" in l}
    assert len(starts) == 1


def test_empty_trace_is_header_only():
    text = emit_trace(trace(FLAT_FIB, TupleList.units(0)), "table")
    assert text.splitlines() == ["step  wire  role  value"]


def test_json_round_trip():
    tb = trace(FLAT_FIB, TupleList.units(6))
    text = emit_trace(tb, "json")
    again = read_trace(text)
    assert again.supply == tb.supply and again.demand == tb.demand and again.output == tb.output
    assert emit_trace(again, "json") == text


def test_json_is_deterministic():
    a = emit_trace(trace(FLAT_FIB, TupleList.units(4)), "json")
    b = emit_trace(trace(FLAT_FIB, TupleList.units(4)), "json")
    assert a == b
    assert json.loads(a)["records"][0] == {"step": 1, "wire": json.loads(a)["supply"]["wires"][0][0], "role": "supply", "value": 1}


def test_tampered_demand_is_rejected():
    raw = trace_to_dict(trace(FLAT_FIB, TupleList.units(3)))
    raw["demand"]["rows"][1][0] = 99
    with pytest.raises(ValueError, match="shuttle"):
        read_trace(json.dumps(raw))


def test_wrong_format_tag():
    with pytest.raises(ValueError):
        read_trace(json.dumps({"format": "nope"}))


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_trace(trace(FLAT_FIB, TupleList.units(1)), "xml")
