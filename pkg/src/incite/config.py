"""Project configuration stored in ``.incite.json`` at the project root.

Precedence everywhere is: explicit flag / request field, then config file,
then the documented default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

from .ads import ADS_API_BASE
from .bib import KeyStyle, OrderPolicy
from .cue import SearchMode

CONFIG_FILENAME = ".incite.json"

_ALIASES = {
    "order": "order_policy",
    "mode": "default_mode",
    "bib": "target_bib",
}


@dataclass(frozen=True)
class InciteConfig:
    key_style: KeyStyle = KeyStyle.AUTHOR_YEAR
    order_policy: OrderPolicy = OrderPolicy.APPEND
    target_bib: Optional[str] = None
    default_mode: SearchMode = SearchMode.CONTEXTUAL
    api_base: str = ADS_API_BASE
    api_token: Optional[str] = None
    extra_cite_commands: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "key_style": self.key_style.value,
            "order_policy": self.order_policy.value,
            "target_bib": self.target_bib,
            "default_mode": self.default_mode.value,
            "api_base": self.api_base,
            "api_token": self.api_token,
            "extra_cite_commands": list(self.extra_cite_commands),
        }

    def with_values(self, values: dict[str, Any]) -> "InciteConfig":
        updates: dict[str, Any] = {}
        for raw_name, value in values.items():
            name = _ALIASES.get(raw_name, raw_name)
            if name == "key_style":
                updates[name] = parse_key_style(value)
            elif name == "order_policy":
                updates[name] = parse_order_policy(value)
            elif name == "default_mode":
                updates[name] = parse_mode(value)
            elif name in ("target_bib", "api_token"):
                updates[name] = value if value else None
            elif name == "api_base":
                if not isinstance(value, str) or not value:
                    raise ValueError("api_base must be a non-empty URL")
                updates[name] = value
            elif name == "extra_cite_commands":
                if not isinstance(value, (list, tuple)):
                    raise ValueError("extra_cite_commands must be a list")
                updates[name] = tuple(str(item) for item in value)
            else:
                raise ValueError(f"unknown config key: {raw_name}")
        return replace(self, **updates)


def parse_key_style(value: Any) -> KeyStyle:
    for style in KeyStyle:
        if style.value == value:
            return style
    raise ValueError(
        f"unknown key_style {value!r}; choose from "
        + ", ".join(s.value for s in KeyStyle)
    )


def parse_order_policy(value: Any) -> OrderPolicy:
    for policy in OrderPolicy:
        if policy.value == value:
            return policy
    raise ValueError(
        f"unknown order_policy {value!r}; choose from "
        + ", ".join(p.value for p in OrderPolicy)
    )


def parse_mode(value: Any) -> SearchMode:
    for mode in SearchMode:
        if mode.value == value:
            return mode
    raise ValueError(
        f"unknown mode {value!r}; choose from " + ", ".join(m.value for m in SearchMode)
    )


def find_project_root(start: Path) -> Path:
    """Nearest ancestor (including start) containing .incite.json, else start."""
    start = start.resolve()
    if start.is_file():
        start = start.parent
    for candidate in [start, *start.parents]:
        if (candidate / CONFIG_FILENAME).exists():
            return candidate
    return start


def load_config(root: Path) -> InciteConfig:
    path = Path(root) / CONFIG_FILENAME
    if not path.exists():
        return InciteConfig()
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return InciteConfig().with_values(data)


def save_config(root: Path, config: InciteConfig) -> Path:
    path = Path(root) / CONFIG_FILENAME
    payload = {k: v for k, v in config.to_dict().items() if v not in (None, [])}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
