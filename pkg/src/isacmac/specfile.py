"""Channel spec documents: a small YAML-based interchange format.

A spec declares the nine variable alphabets, the explicit tensor index
order for both pmfs (no implicit conventions), the state pmf over
(S, ST1, ST2, SR), the channel pmf (Y, Z1, Z2 | X1, X2, S) as nested
arrays, and one distortion table per transmitter:

    name: my-channel          # optional
    alphabets: {X1: 2, X2: 2, S: 2, ST1: 2, ST2: 2, SR: 1, Y: 2, Z1: 1, Z2: 1}
    order:
      state_pmf: [S, ST1, ST2, SR]
      channel_pmf: [X1, X2, S, Y, Z1, Z2]
    state_pmf: [...nested per order...]
    channel_pmf: [...nested per order...]
    distortion1: [[0.0, 1.0], [1.0, 0.0]]
    distortion2: [[0.0]]

Errors carry the 1-based line/column of the offending node. The
serializer emits canonical key order, so documents round-trip.
"""

from __future__ import annotations

import io

import numpy as np
import yaml

from .channels import CHANNEL_GIVEN, CHANNEL_OUT, STATE_VARS, DistortionFn, IsacChannel
from .errors import ParseError, SchemaError
from .prob import CondKernel, JointDist

ALL_KEYS = (
    "name", "alphabets", "order", "state_pmf", "channel_pmf",
    "distortion1", "distortion2",
)
REQUIRED_KEYS = ALL_KEYS[1:]
VAR_NAMES = ("X1", "X2", "S", "ST1", "ST2", "SR", "Y", "Z1", "Z2")
STOCHASTIC_TOL = 1e-9


class _Marks:
    """Line/column lookup into the composed YAML node tree."""

    def __init__(self, root):
        self.root = root

    def at(self, path):
        node = self.root
        for step in path:
            if isinstance(node, yaml.MappingNode):
                found = None
                for key_node, value_node in node.value:
                    if key_node.value == step:
                        found = value_node
                        break
                if found is None:
                    return node
                node = found
            elif isinstance(node, yaml.SequenceNode):
                try:
                    node = node.value[int(step)]
                except (IndexError, ValueError):
                    return node
            else:
                return node
        return node

    def error(self, message, path=()):
        node = self.at(path)
        mark = node.start_mark if node is not None else None
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        return ParseError(message, line, col)


def _as_array(value, shape, marks, path, what):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise marks.error(f"{what} is not a numeric array", path) from None
    if arr.shape != tuple(shape):
        raise marks.error(
            f"{what} has shape {arr.shape}, expected {tuple(shape)}", path
        )
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise marks.error(f"{what} has negative or non-finite entries", path)
    return arr


def parse_channel_spec(text):
    """Parse a spec document into an IsacChannel; errors carry line/column."""
    try:
        data = yaml.safe_load(text)
        root = yaml.compose(text, yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(
            f"invalid document: {getattr(exc, 'problem', exc)}",
            mark.line + 1 if mark else None,
            mark.column + 1 if mark else None,
        ) from None
    if not isinstance(data, dict):
        raise ParseError("document must be a key-value mapping", 1, 1)
    marks = _Marks(root)

    for key in data:
        if key not in ALL_KEYS:
            raise marks.error(f"unknown key {key!r}", (key,))
    for key in REQUIRED_KEYS:
        if key not in data:
            raise marks.error(f"missing required key {key!r}")

    alphabets = data["alphabets"]
    if not isinstance(alphabets, dict):
        raise marks.error("alphabets must be a mapping", ("alphabets",))
    for var in VAR_NAMES:
        size = alphabets.get(var)
        if not isinstance(size, int) or size < 1:
            raise marks.error(
                f"alphabet {var!r} must be a positive integer", ("alphabets",)
            )
    extra = set(alphabets) - set(VAR_NAMES)
    if extra:
        raise marks.error(f"unknown alphabet names {sorted(extra)}", ("alphabets",))

    order = data["order"]
    if not isinstance(order, dict) or set(order) != {"state_pmf", "channel_pmf"}:
        raise marks.error(
            "order must map state_pmf and channel_pmf to variable lists", ("order",)
        )
    state_order = tuple(order["state_pmf"])
    chan_order = tuple(order["channel_pmf"])
    if sorted(state_order) != sorted(STATE_VARS):
        raise marks.error(
            f"order.state_pmf must list {sorted(STATE_VARS)}", ("order", "state_pmf")
        )
    if tuple(sorted(chan_order[:3])) != tuple(sorted(CHANNEL_GIVEN)) or tuple(
        sorted(chan_order[3:])
    ) != tuple(sorted(CHANNEL_OUT)):
        raise marks.error(
            "order.channel_pmf must list the given variables "
            f"{sorted(CHANNEL_GIVEN)} before the outputs {sorted(CHANNEL_OUT)}",
            ("order", "channel_pmf"),
        )

    state_arr = _as_array(
        data["state_pmf"], [alphabets[v] for v in state_order],
        marks, ("state_pmf",), "state_pmf",
    )
    total = state_arr.sum()
    if abs(total - 1.0) > STOCHASTIC_TOL:
        raise marks.error(
            f"non-stochastic state_pmf: sums to {total!r}", ("state_pmf",)
        )
    perm = [state_order.index(v) for v in STATE_VARS]
    state = JointDist(STATE_VARS, np.transpose(state_arr, perm))

    chan_arr = _as_array(
        data["channel_pmf"], [alphabets[v] for v in chan_order],
        marks, ("channel_pmf",), "channel_pmf",
    )
    perm = [chan_order.index(v) for v in CHANNEL_GIVEN + CHANNEL_OUT]
    chan_arr = np.transpose(chan_arr, perm)
    slice_sums = chan_arr.sum(axis=(3, 4, 5))
    worst = float(np.abs(slice_sums - 1.0).max())
    if worst > STOCHASTIC_TOL:
        raise marks.error(
            f"non-stochastic channel_pmf: a slice deviates from 1 by {worst!r}",
            ("channel_pmf",),
        )
    kernel = CondKernel(CHANNEL_GIVEN, CHANNEL_OUT, chan_arr)

    dists = []
    for idx, key in enumerate(("distortion1", "distortion2"), start=1):
        table = np.asarray(data[key], dtype=float)
        if table.ndim != 2 or table.shape[0] != alphabets[f"ST{idx}"]:
            raise marks.error(
                f"{key} must have one row per ST{idx} symbol", (key,)
            )
        if np.any(table < 0) or not np.all(np.isfinite(table)):
            raise marks.error(f"{key} entries must be finite and >= 0", (key,))
        dists.append(DistortionFn(table))

    try:
        return IsacChannel(
            name=str(data.get("name", "channel")),
            alphabets={v: alphabets[v] for v in VAR_NAMES},
            state=state,
            kernel=kernel,
            d1=dists[0],
            d2=dists[1],
        )
    except SchemaError as exc:
        raise marks.error(str(exc)) from None


def serialize_channel_spec(channel):
    """Canonical spec text; parse(serialize(ch)) reproduces the channel."""
    doc = {
        "name": channel.name,
        "alphabets": {v: int(channel.alphabets[v]) for v in VAR_NAMES},
        "order": {
            "state_pmf": list(STATE_VARS),
            "channel_pmf": list(CHANNEL_GIVEN + CHANNEL_OUT),
        },
        "state_pmf": channel.state.probs.tolist(),
        "channel_pmf": channel.kernel.probs.tolist(),
        "distortion1": channel.d1.table.tolist(),
        "distortion2": channel.d2.table.tolist(),
    }
    out = io.StringIO()
    yaml.safe_dump(doc, out, sort_keys=False, default_flow_style=None, width=100)
    return out.getvalue()
