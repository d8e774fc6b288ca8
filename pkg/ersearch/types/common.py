from dataclasses import fields, is_dataclass
from enum import Enum
from inspect import isclass
from typing import Any, Dict, Union, get_args, get_origin, get_type_hints


class Common:
    """
    The common value-object structure.
    """

    @classmethod
    def from_dict(cls, data: Dict):
        """
        Prepare fields for nested dataclasses
        """
        hints = get_type_hints(cls)
        field_values = {}
        for field in cls.__dataclass_fields__:
            if field not in data:
                continue
            field_values[field] = _coerce(hints[field], data[field])

        return cls(**field_values)

    def as_dict(self) -> Dict:
        """
        Plain JSON-ready representation, enums replaced by their values.
        """
        return {
            field.name: _plain(getattr(self, field.name))
            for field in fields(self)
        }


def _coerce(field_type, value):
    if value is None:
        return None

    origin = get_origin(field_type)
    args = get_args(field_type)

    if origin is Union:
        options = [arg for arg in args if arg is not type(None)]
        return _coerce(options[0], value) if len(options) == 1 else value

    if origin in (list, tuple) and isinstance(value, (list, tuple)):
        if origin is tuple and args and args[-1] is not Ellipsis:
            items = [_coerce(arg, item) for arg, item in zip(args, value)]
        else:
            item_type = args[0] if args else Any
            items = [_coerce(item_type, item) for item in value]
        return tuple(items) if origin is tuple else items

    if origin is dict and isinstance(value, dict) and len(args) == 2:
        return {key: _coerce(args[1], item) for key, item in value.items()}

    if isclass(field_type):
        if issubclass(field_type, Common) and isinstance(value, dict):
            return field_type.from_dict(value)
        if issubclass(field_type, Enum):
            return field_type(value)

    return value


def _plain(value):
    if isinstance(value, Enum):
        return value.value
    if is_dataclass(value) and isinstance(value, Common):
        return value.as_dict()
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    return value


