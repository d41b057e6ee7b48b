"""Unit behavior of the shadow table, its selectors, and the adapter."""

import pytest

from bimstack.adapter import AdapterError
from shadowexec.shadow import (
    ShadowAdapter,
    parse_shadow,
    parse_simple_selector,
    query_elements,
    set_property,
    shadow_diff,
)

SAMPLE = """ISO-10303-21;
HEADER;
FILE_DESCRIPTION((''),'2;1');
FILE_NAME('t.ifc','2024-01-01T00:00:00',(),(),'','','');
FILE_SCHEMA(('IFC4'));
ENDSEC;
DATA;
#1=IFCPROJECT('0123456789abcdefghijAB',$,'Proj',$,$,$,$,$,$);
#2=IFCCARTESIANPOINT((0.,0.,0.));
#3=IFCWALL(/* north */'0123456789abcdefghijAC',$,'Wand, Nord',$,$,$,$,$,.SOLIDWALL.);
#4=IFCWALL('0123456789abcdefghijAD',$,'O''Brien wall',$,$,$,$,$,.SOLIDWALL.);
#5=IFCBUILDINGSTOREY('0123456789abcdefghijAE',$,'EG',$,$,$,$,$,.ELEMENT.,0.);
ENDSEC;
END-ISO-10303-21;
"""


def test_projection_contents():
    m = parse_shadow(SAMPLE)
    assert [(e.eid, e.type_name) for e in m.entities] == [
        (1, "IFCPROJECT"), (3, "IFCWALL"), (4, "IFCWALL"), (5, "IFCBUILDINGSTOREY")
    ]
    by_eid = {e.eid: e for e in m.entities}
    assert by_eid[3].name == "Wand, Nord"  # comma inside the string survives
    assert by_eid[4].name == "O'Brien wall"  # '' unescaped
    assert by_eid[2 if 2 in by_eid else 1].type_name == "IFCPROJECT"  # point not projected
    assert m.raw == SAMPLE


def test_parse_rejects_non_step():
    with pytest.raises(AdapterError, match="cannot parse"):
        parse_shadow("this is not a model\n")
    with pytest.raises(AdapterError, match="cannot parse"):
        parse_shadow("ISO-10303-21;\nno data section here\n")


def test_parse_rejects_duplicate_globalid():
    dup = SAMPLE.replace("0123456789abcdefghijAD", "0123456789abcdefghijAC")
    with pytest.raises(AdapterError, match="duplicate GlobalId"):
        parse_shadow(dup)


def test_selector_subset():
    assert parse_simple_selector("IfcWall") == ("IFCWALL", None)
    assert parse_simple_selector("IfcWall, Name='A, B'") == ("IFCWALL", "A, B")
    assert parse_simple_selector("IfcWall, Name='O''Brien'") == ("IFCWALL", "O'Brien")
    for bad in ("", "Wall", "IfcWall, Description='x'", "IfcWall, Name=", "IfcWall, Name='a', Name='b'"):
        with pytest.raises(AdapterError):
            parse_simple_selector(bad)


def test_query_and_name_filter():
    m = parse_shadow(SAMPLE)
    assert query_elements(m, "IfcWall") == {
        "count": 2,
        "ids": ["0123456789abcdefghijAC", "0123456789abcdefghijAD"],
    }
    assert query_elements(m, "IfcWall, Name='Wand, Nord'")["count"] == 1
    assert query_elements(m, "IfcDoor")["count"] == 0


def test_set_property_overlay_and_coarse_diff():
    m = parse_shadow(SAMPLE)
    m2, logical = set_property(m, "IfcWall", "Pset_WallCommon", "IsExternal", True)
    assert logical == {"matched": 2, "pset": "Pset_WallCommon", "property": "IsExternal"}
    assert m.props == ()  # input handle untouched
    assert len(m2.props) == 2
    diff = shadow_diff(m, m2)
    assert sorted((e.change_kind, e.entity_type) for e in diff.entries) == [
        ("modified", "IFCWALL"), ("modified", "IFCWALL")
    ]
    assert all(e.changed_attributes == () for e in diff.entries)

    # idempotent rewrite of the same value: no change to report
    m3, _ = set_property(m2, "IfcWall", "Pset_WallCommon", "IsExternal", True)
    assert shadow_diff(m2, m3).entries == ()

    # zero matches is allowed, mirrors the native backend
    m4, logical = set_property(m, "IfcDoor", "Pset_DoorCommon", "IsExternal", False)
    assert logical["matched"] == 0
    assert shadow_diff(m, m4).entries == ()


def test_adapter_surface():
    adapter = ShadowAdapter()
    assert adapter.backend_id() == "shadow-table"
    assert adapter.capabilities() == {"diff": "coarse", "save": "echo"}

    handle = adapter.load_model(SAMPLE.encode("utf-8"))
    assert adapter.save_model(handle) == SAMPLE.encode("utf-8")  # echo

    new, logical = adapter.run_high_level(
        "set_property",
        {"selector": "IfcWall", "psetName": "P", "propName": "x", "value": 1},
        handle,
    )
    assert logical["matched"] == 2
    assert adapter.save_model(new) == SAMPLE.encode("utf-8")  # still an echo

    same, result = adapter.run_high_level("query_elements", {"selector": "IfcProject"}, handle)
    assert result["count"] == 1
    assert adapter.diff(handle, same).entries == ()

    with pytest.raises(AdapterError, match="unsupported tool"):
        adapter.run_high_level("create_wall", {}, handle)
    with pytest.raises(AdapterError, match="unsupported tool"):
        adapter.run_batch([], handle)
    with pytest.raises(AdapterError, match="unsupported"):
        adapter.run_high_level("set_property", {"selector": "IfcWall"}, adapter.new_model())
    with pytest.raises(AdapterError, match="cannot parse"):
        adapter.load_model(b"\xff\xfe garbage")
