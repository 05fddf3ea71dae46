"""JSON interchange format for Choi operators.

Numbers are written as decimal via Python's shortest-round-trip float repr,
so serialize -> deserialize is exact on every double-precision entry.
"""
from __future__ import annotations

import json
from typing import Union

import numpy as np

from .tensor import SystemLayout
from .channels import Channel, ChannelError

FORMAT_VERSION = 1


class ChoiFileError(ValueError):
    """Malformed interchange file."""


def _layout_to_json(lay: SystemLayout):
    return [{"label": l, "dim": d} for l, d in lay.subsystems]


def _layout_from_json(items) -> SystemLayout:
    try:
        return SystemLayout(tuple((s["label"], int(s["dim"])) for s in items))
    except (KeyError, TypeError) as exc:
        raise ChoiFileError(f"bad dims entry: {exc}") from exc


def channel_to_dict(c: Channel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "in_dims": _layout_to_json(c.in_layout),
        "out_dims": _layout_to_json(c.out_layout),
        "choi": [[[float(z.real), float(z.imag)] for z in row] for row in c.choi],
    }


def channel_from_dict(data: dict) -> Channel:
    if not isinstance(data, dict):
        raise ChoiFileError("top level must be an object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ChoiFileError(f"unsupported format_version {version!r}")
    for key in ("in_dims", "out_dims", "choi"):
        if key not in data:
            raise ChoiFileError(f"missing field {key!r}")
    in_layout = _layout_from_json(data["in_dims"])
    out_layout = _layout_from_json(data["out_dims"])
    n = in_layout.total_dim * out_layout.total_dim
    rows = data["choi"]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ChoiFileError(f"choi matrix must be {n} x {n}")
    try:
        m = np.array(
            [[complex(cell[0], cell[1]) for cell in row] for row in rows],
            dtype=complex,
        )
    except (TypeError, IndexError) as exc:
        raise ChoiFileError(f"bad matrix cell: {exc}") from exc
    try:
        return Channel(m, in_layout, out_layout)
    except ChannelError as exc:
        raise ChoiFileError(str(exc)) from exc


def save_channel(c: Channel, path) -> None:
    with open(path, "w") as fh:
        json.dump(channel_to_dict(c), fh)
        fh.write("\n")


def load_channel(path) -> Channel:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ChoiFileError(f"not valid JSON: {exc}") from exc
    return channel_from_dict(data)
