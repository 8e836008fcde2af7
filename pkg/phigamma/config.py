from __future__ import annotations

from collections.abc import Callable, Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from functools import cached_property
from pathlib import Path
from typing import Any, Generic, TypeVar

import yaml

T = TypeVar("T")

DEFAULTS: dict[str, int] = {
    "precision": 48,
    "precision_max": 384,
    "h1_budget": 64,
    "continuity_bound": 64,
    "lattice_rounds": 200,
}

_working_precision: ContextVar[int | None] = ContextVar(
    "working_precision", default=None
)


class ConfigValueMissing(ValueError):
    pass


class ConfigValueInvalid(ValueError):
    pass


class Config:
    def __init__(self, conf_file: Path | str | None = None) -> None:
        self.conf_file = Path(conf_file) if conf_file else None
        self.overrides: dict[str, Any] = {}

    def load(self, conf_file: Path | str | None) -> Config:
        self.conf_file = Path(conf_file) if conf_file else None
        self.overrides = {}
        self.reset()
        return self

    def override(self, **values: Any) -> Config:
        self.overrides.update(
            {k: v for k, v in values.items() if v is not None}
        )
        self.reset()
        return self

    def reset(self) -> None:
        for key in ("raw", "configured_precision", *DEFAULTS):
            self.__dict__.pop(key, None)

    @contextmanager
    def working_precision(self, precision: int) -> Iterator[int]:
        """Use ``precision`` in the current thread or task only."""
        if precision < 4:
            raise ConfigValueInvalid(
                f"Working precision must be >= 4, got {precision}"
            )
        token = _working_precision.set(precision)
        try:
            yield precision
        finally:
            _working_precision.reset(token)

    @cached_property
    def raw(self) -> dict[str, Any]:
        if not self.conf_file:
            return {}
        if not self.conf_file.is_file():
            raise ConfigValueMissing(
                f"Configuration file {self.conf_file} does not exist"
            )
        with open(self.conf_file) as f:
            data = yaml.safe_load(f)
        if data:
            if not isinstance(data, dict):
                raise ConfigValueInvalid(
                    f"Configuration file {self.conf_file} is not a mapping"
                )
            return data
        return {}

    def value_to_int(self, key: str, minimum: int = 1) -> int:
        value = self.overrides.get(key, self.raw.get(key, DEFAULTS.get(key)))
        if value is None:
            raise ConfigValueMissing(f'No configuration value for "{key}"')
        try:
            number = int(value)
        except (TypeError, ValueError) as e:
            raise ConfigValueInvalid(
                f'Configuration value for "{key}" is not an integer: {value}'
            ) from e
        if number < minimum:
            raise ConfigValueInvalid(
                f'Configuration value for "{key}" must be >= {minimum}'
            )
        return number

    @cached_property
    def configured_precision(self) -> int:
        return self.value_to_int("precision", minimum=4)

    @property
    def precision(self) -> int:
        working = _working_precision.get()
        return self.configured_precision if working is None else working

    @cached_property
    def precision_max(self) -> int:
        return max(
            self.value_to_int("precision_max"), self.configured_precision
        )

    @cached_property
    def h1_budget(self) -> int:
        return self.value_to_int("h1_budget")

    @cached_property
    def continuity_bound(self) -> int:
        return self.value_to_int("continuity_bound")

    @cached_property
    def lattice_rounds(self) -> int:
        return self.value_to_int("lattice_rounds")

    def as_dict(self) -> dict[str, int]:
        return {key: getattr(self, key) for key in DEFAULTS}


config = Config()


class precision_cached(Generic[T]):
    """Like ``cached_property``, with one value per working precision."""

    def __init__(self, fn: Callable[[Any], T]) -> None:
        self.fn = fn
        self.name = fn.__name__
        self.__doc__ = fn.__doc__

    def __get__(self, obj: Any, owner: type | None = None) -> T:
        if obj is None:
            return self  # type: ignore[return-value]
        cache: dict[tuple[str, int], T] = obj.__dict__.setdefault(
            "_precision_cache", {}
        )
        key = (self.name, config.precision)
        if key not in cache:
            cache[key] = self.fn(obj)
        return cache[key]
