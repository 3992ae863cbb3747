"""Field factory for selecting an analytic or grid density field."""

from enum import Enum
from pathlib import Path
from typing import Any

from monocc.errors import DescriptorParseError, InvalidArgumentError
from monocc.io.jsonio import read_json


class FieldType(Enum):
    """Type of density field."""

    ANALYTIC = "analytic"
    GRID = "grid"


class FieldFactory:
    """
    Factory class for building density fields from their serialized form.

    Analytic fields come from a scene descriptor's ``primitives`` list; grid
    fields come from a binary + JSON sidecar pair.
    """

    def __init__(self, field_type: FieldType | None = None):
        """
        Initialize the field factory.

        Args:
            field_type: Force a field type; detected from the source when None.
        """
        self.field_type = field_type

    def detect(self, source: dict[str, Any] | str | Path) -> FieldType:
        """Detect the field type of a dict or a file path."""
        if self.field_type is not None:
            return self.field_type
        data = source if isinstance(source, dict) else read_json(Path(source).with_suffix(".json"))
        if not isinstance(data, dict):
            raise DescriptorParseError("field file must hold a JSON object", field="")
        if "resolution" in data and "bounds" in data:
            return FieldType.GRID
        if "primitives" in data:
            return FieldType.ANALYTIC
        raise InvalidArgumentError("cannot detect the density field type")

    def load(self, source: dict[str, Any] | str | Path):
        """
        Build the density field described by ``source``.

        Args:
            source: A scene-descriptor dict, a grid sidecar path, or an
                analytic-field JSON path.

        Returns:
            AnalyticField or GridField.

        Raises:
            DescriptorParseError: On malformed JSON or primitives.
            FormatError: On a malformed grid file.
        """
        field_type = self.detect(source)
        if field_type is FieldType.GRID:
            from monocc.field.grid import GridField

            if isinstance(source, dict):
                raise InvalidArgumentError("grid fields are loaded from files")
            return GridField.load(source)

        from monocc.field.analytic import AnalyticField, primitive_from_dict

        data = source if isinstance(source, dict) else read_json(source)
        if not isinstance(data, dict):
            raise DescriptorParseError("field file must hold a JSON object", field="")
        primitives = data.get("primitives")
        if not isinstance(primitives, list):
            raise DescriptorParseError("primitives must be a list", field="primitives")
        parsed = tuple(primitive_from_dict(p, f"primitives[{i}]") for i, p in enumerate(primitives))
        try:
            return AnalyticField(primitives=parsed, background=data.get("background", [0.0, 0.0, 0.0]))
        except (InvalidArgumentError, TypeError, ValueError) as e:
            raise DescriptorParseError(str(e), field="background") from e


def load_field(source: dict[str, Any] | str | Path, field_type: FieldType | None = None):
    """
    Load a density field, detecting its type.

    Args:
        source: Descriptor dict or file path.
        field_type: Optional forced type.

    Returns:
        The density field.
    """
    return FieldFactory(field_type).load(source)
