"""Self-describing CSV/JSON emitters.

Every file carries the tool version, a config hash, the seed, and the
grid in a comment header (CSV) or a meta object (JSON), and nothing
time- or host-dependent, so reruns with the same inputs are
byte-identical.
"""

from __future__ import annotations

import hashlib
import io
import json
from typing import Iterable, Sequence

from ._version import __version__
from .scenario import ScenarioConfig, config_to_dict


def config_hash(cfg: ScenarioConfig) -> str:
    canon = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def metadata(cfg: ScenarioConfig | None = None, **extra) -> dict[str, str]:
    meta = {"tool": f"ranksinr {__version__}"}
    if cfg is not None:
        meta["config_hash"] = config_hash(cfg)
    for k, v in extra.items():
        if v is not None:
            meta[k] = _fmt(v)
    return meta


def render_csv(
    columns: Sequence[str], rows: Iterable[Sequence], meta: dict[str, str]
) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def render_json(
    columns: Sequence[str], rows: Iterable[Sequence], meta: dict[str, str]
) -> str:
    payload = {
        "meta": meta,
        "columns": list(columns),
        "rows": [[v for v in row] for row in rows],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def render(
    fmt: str, columns: Sequence[str], rows: Iterable[Sequence], meta: dict[str, str]
) -> str:
    if fmt == "csv":
        return render_csv(columns, rows, meta)
    if fmt == "json":
        return render_json(columns, rows, meta)
    raise ValueError(f"format must be csv or json, got {fmt!r}")
