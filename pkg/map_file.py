"""Map file format: a JSON object with rational strings, parsed into a PAMap."""

import json
from fractions import Fraction
from typing import List, Optional

from pydantic import BaseModel, Field, ValidationError, constr

from errors import MapParseError, MapValidationError
from pa_map import PAMap

RATIONAL_PATTERN = r'^-?\d+(/[1-9]\d*)?$'
RationalString = constr(pattern=RATIONAL_PATTERN)


class MapFile(BaseModel):
    name: Optional[str] = Field(default=None, description="Optional map name")
    breakpoints: List[RationalString] = Field(
        ..., description="Strictly increasing breakpoints from 0 to 1 as \"p/q\" strings")
    values: List[RationalString] = Field(
        ..., description="Lifting values at the breakpoints as \"p/q\" strings")

    def to_map(self) -> PAMap:
        return PAMap([Fraction(x) for x in self.breakpoints],
                     [Fraction(v) for v in self.values], name=self.name)

    @classmethod
    def from_map(cls, f: PAMap) -> 'MapFile':
        return cls(name=f.name,
                   breakpoints=[str(x) for x in f.breakpoints],
                   values=[str(v) for v in f.values])


def parse_map_file(text: str) -> PAMap:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MapParseError(e.msg, (e.lineno, e.colno)) from e
    if not isinstance(data, dict):
        raise MapParseError("map file must contain a JSON object", (1, 1))

    try:
        map_file = MapFile.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        location = error["loc"]
        index = location[1] if len(location) > 1 and isinstance(location[1], int) else None
        field = location[0] if location else "map"
        raise MapValidationError(f"{field}: {error['msg']}", index) from e
    return map_file.to_map()


def emit_map_file(f: PAMap) -> str:
    """Canonical text form: name (if any), breakpoints, values; two-space indent."""
    map_file = MapFile.from_map(f)
    data = map_file.model_dump(exclude_none=True)
    return json.dumps(data, indent=2) + "\n"
