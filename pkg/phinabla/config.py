from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Optional, Tuple

import yaml

from .exceptions import UsageError
from .robba import DEFAULT_WINDOW


@dataclass(frozen=True)
class Settings:
    p: int = 3
    f: int = 1
    N: int = 8
    window: Tuple[int, int] = DEFAULT_WINDOW
    q_power: int = 1
    seed: int = 0
    jobs: int = 1
    log_level: str = 'WARNING'

    def merged(self, values: Dict[str, Any]) -> 'Settings':
        """ Copy with the non-None entries of `values` applied. """

        known = {f.name for f in fields(self)}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f'unknown settings {sorted(unknown)}')

        updates = {k: v for k, v in values.items() if v is not None}
        if 'window' in updates:
            updates['window'] = parse_window(updates['window'])

        return replace(self, **updates)


def parse_window(value: Any) -> Tuple[int, int]:
    """ Accepts "LO:HI" or a two-element list. """

    try:
        if isinstance(value, str):
            lo, hi = value.split(':')
        else:
            lo, hi = value
        window = (int(lo), int(hi))
    except (TypeError, ValueError) as error:
        raise UsageError(f'bad window {value!r}, expected LO:HI') from error

    if not window[0] <= 0 <= window[1]:
        raise UsageError(f'window {window} must contain 0')

    return window


def load_settings(path: Optional[str] = None, base: Optional[Settings] = None) -> Settings:
    """ Defaults, overridden by a YAML file of the same keys. """

    settings = base or Settings()
    if path is None:
        return settings

    try:
        with open(path) as stream:
            values = yaml.safe_load(stream) or {}
    except OSError as error:
        raise UsageError(f'cannot read config {path}: {error}') from error
    except yaml.YAMLError as error:
        raise UsageError(f'invalid YAML in {path}: {error}') from error

    if not isinstance(values, dict):
        raise UsageError(f'config {path} must be a mapping')

    return settings.merged({str(k).replace('-', '_'): v for k, v in values.items()})
