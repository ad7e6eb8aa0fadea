import json
from fractions import Fraction

import pytest

from errors import MapParseError, MapValidationError
from map_catalog import BUILTIN_MAPS, load_all, load_builtin, maps_dir, resolve_map
from map_file import MapFile, emit_map_file, parse_map_file

F = Fraction


def _map_text(breakpoints, values, **extra):
    return json.dumps({"breakpoints": breakpoints, "values": values, **extra})


def test_parse_simple_map():
    f = parse_map_file(_map_text(["0", "1/2", "1"], ["0", "1", "0"], name="tent"))
    assert f.breakpoints == (0, F(1, 2), 1)
    assert f.values == (0, 1, 0)
    assert f.name == "tent"


@pytest.mark.parametrize("name", BUILTIN_MAPS)
def test_fixture_files_are_canonical(name):
    text = (maps_dir() / f"{name}.map").read_text(encoding="utf-8")
    assert emit_map_file(parse_map_file(text)) == text


def test_emit_without_name():
    f = parse_map_file(_map_text(["0", "1"], ["1/3", "4/3"]))
    assert json.loads(emit_map_file(f)) == {"breakpoints": ["0", "1"], "values": ["1/3", "4/3"]}


def test_negative_values():
    f = parse_map_file(_map_text(["0", "1/2", "1"], ["-1/4", "3/4", "-1/4"]))
    assert f.values[0] == F(-1, 4)
    assert f.degree == 0


def test_collinear_input_is_normalized():
    f = parse_map_file(_map_text(["0", "1/4", "1/2", "1"], ["0", "1/2", "1", "0"]))
    assert len(f.breakpoints) == 3


def test_length_mismatch():
    with pytest.raises(MapValidationError) as e:
        parse_map_file(_map_text(["0", "1/2", "1"], ["0", "1"]))
    assert e.value.index == 2
    assert e.value.code == "VALIDATION_ERROR"


def test_decimal_strings_are_rejected():
    with pytest.raises(MapValidationError) as e:
        parse_map_file(_map_text(["0", "0.5", "1"], ["0", "1", "0"]))
    assert e.value.index == 1
    assert e.value.reason.startswith("breakpoints")


def test_zero_denominator_is_rejected():
    with pytest.raises(MapValidationError):
        parse_map_file(_map_text(["0", "1/0", "1"], ["0", "1", "0"]))


def test_missing_field():
    with pytest.raises(MapValidationError) as e:
        parse_map_file(json.dumps({"breakpoints": ["0", "1"]}))
    assert "values" in str(e.value)


def test_bad_json_reports_position():
    with pytest.raises(MapParseError) as e:
        parse_map_file('{"breakpoints": ["0", "1"],\n "values": [}')
    assert e.value.position[0] == 2
    assert e.value.code == "PARSE_ERROR"


def test_json_must_be_an_object():
    with pytest.raises(MapParseError):
        parse_map_file('["0", "1"]')


def test_model_from_map(g):
    model = MapFile.from_map(g)
    assert model.breakpoints == ["0", "1/5", "4/5", "1"]
    assert model.to_map() == g


def test_catalog():
    maps = load_all()
    assert set(maps) == set(BUILTIN_MAPS)
    with pytest.raises(MapParseError):
        load_builtin("doubling")


def test_resolve_map(tmp_path, tent):
    path = tmp_path / "t.map"
    path.write_text(emit_map_file(tent), encoding="utf-8")
    assert resolve_map(str(path)) == tent
    assert resolve_map("tent") == tent
    with pytest.raises(MapParseError):
        resolve_map(str(tmp_path / "missing.map"))
