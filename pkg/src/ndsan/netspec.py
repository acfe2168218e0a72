"""Network documents and result exports.

Network documents are JSON::

    {"format_version": 1, "name": "...", "notes": [...], "root": NODE}

where ``NODE`` is one of::

    {"kind": "trivial", "name": "a1", "duration": {"triangular": [2, 4, 5]}}
    {"kind": "acyclic", "vertices": [NODE, ...], "arcs": [[0, 1], ...]}
    {"kind": "decision", "entry": NODE,
     "branches": [{"probability": 0.55, "node": NODE}, ...], "exit": NODE}
    {"kind": "loop", "entry": NODE, "body": NODE, "exit": NODE,
     "continue_probs": [0.5, 0.2, 0]}

``serialize_network`` writes a canonical form (fixed key order, two-space
indent, shortest exact number formatting), so parsing and re-serializing a
canonical document reproduces it byte for byte.  Result exports are CSV
with one header row and ``\\n`` line endings.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .distributions import FAMILIES
from .errors import NetworkSyntaxError, SchemaError
from .model import Acyclic, Decision, Loop, Trivial, validate

FORMAT_VERSION = 1
_ARITY = {"triangular": 3, "truncated_normal": 2, "uniform": 2, "exponential": 1, "constant": 1}


@dataclass(frozen=True)
class NetworkDocument:
    root: object
    name: str = "network"
    notes: tuple = field(default=())
    format_version: int = FORMAT_VERSION


# -- number formatting ----------------------------------------------------------


def format_number(value: float) -> str:
    """Up to 12 significant digits; more only when needed to round-trip."""
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot format {value}")
    text = f"{value:.12g}"
    if float(text) != value:
        text = repr(value)
    return text


def format_probability(value: float) -> str:
    """Like :func:`format_number` but always shows a decimal point or exponent."""
    text = f"{float(value):.12g}"
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def format_time(value: float) -> str:
    return f"{float(value):.12g}"


# -- parsing ----------------------------------------------------------------------


def parse_document(text) -> NetworkDocument:
    """Parse and validate a network document (or a bare node)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkSyntaxError(exc.msg, exc.lineno, exc.colno, exc.pos) from None
    if not isinstance(data, dict):
        raise SchemaError("document must be a JSON object")
    if "kind" in data:
        doc = NetworkDocument(root=_node(data, "root"))
    else:
        for key in ("format_version", "root"):
            if key not in data:
                raise SchemaError(f"document is missing {key!r}")
        if data["format_version"] != FORMAT_VERSION:
            raise SchemaError(f"unsupported format_version {data['format_version']!r}")
        unknown = set(data) - {"format_version", "name", "notes", "root"}
        if unknown:
            raise SchemaError(f"unknown document fields {sorted(unknown)}")
        notes = data.get("notes", [])
        if not isinstance(notes, list) or not all(isinstance(n, str) for n in notes):
            raise SchemaError("notes must be a list of strings")
        doc = NetworkDocument(
            root=_node(data["root"], "root"),
            name=str(data.get("name", "network")),
            notes=tuple(notes),
        )
    validate(doc.root).raise_for_violations()
    return doc


def parse_network(text):
    """Parse a document and return its validated root node."""
    return parse_document(text).root


def _require(obj, key, path):
    if key not in obj:
        raise SchemaError(f"{path}: missing field {key!r}")
    return obj[key]


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _node(obj, path):
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    kind = _require(obj, "kind", path)
    allowed = {
        "trivial": {"kind", "name", "duration"},
        "acyclic": {"kind", "vertices", "arcs"},
        "decision": {"kind", "entry", "branches", "exit"},
        "loop": {"kind", "entry", "body", "exit", "continue_probs"},
    }
    if kind not in allowed:
        raise SchemaError(f"{path}: unknown node kind {kind!r}")
    extra = set(obj) - allowed[kind]
    if extra:
        raise SchemaError(f"{path}: unknown fields {sorted(extra)} for kind {kind!r}")
    if kind == "trivial":
        name = _require(obj, "name", path)
        if not isinstance(name, str):
            raise SchemaError(f"{path}: name must be a string")
        return Trivial(name, _duration(_require(obj, "duration", path), f"{path}.duration"))
    if kind == "acyclic":
        vertices = _require(obj, "vertices", path)
        if not isinstance(vertices, list):
            raise SchemaError(f"{path}.vertices: expected a list")
        arcs = obj.get("arcs", [])
        if not isinstance(arcs, list):
            raise SchemaError(f"{path}.arcs: expected a list")
        pairs = []
        for k, arc in enumerate(arcs):
            if (
                not isinstance(arc, list)
                or len(arc) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in arc)
            ):
                raise SchemaError(f"{path}.arcs[{k}]: expected a pair of vertex indices")
            pairs.append((arc[0], arc[1]))
        children = [_node(v, f"{path}.vertices[{i}]") for i, v in enumerate(vertices)]
        return Acyclic(children, pairs)
    if kind == "decision":
        branches = _require(obj, "branches", path)
        if not isinstance(branches, list):
            raise SchemaError(f"{path}.branches: expected a list")
        parsed = []
        for k, br in enumerate(branches):
            bpath = f"{path}.branches[{k}]"
            if not isinstance(br, dict) or set(br) != {"probability", "node"}:
                raise SchemaError(f"{bpath}: expected {{'probability', 'node'}}")
            parsed.append((_number(br["probability"], bpath), _node(br["node"], bpath)))
        return Decision(
            _node(_require(obj, "entry", path), f"{path}.entry"),
            parsed,
            _node(_require(obj, "exit", path), f"{path}.exit"),
        )
    probs = _require(obj, "continue_probs", path)
    if not isinstance(probs, list):
        raise SchemaError(f"{path}.continue_probs: expected a list")
    return Loop(
        _node(_require(obj, "entry", path), f"{path}.entry"),
        _node(_require(obj, "body", path), f"{path}.body"),
        _node(_require(obj, "exit", path), f"{path}.exit"),
        [_number(q, f"{path}.continue_probs") for q in probs],
    )


def _duration(obj, path):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise SchemaError(f"{path}: expected a one-key object naming the distribution")
    ((family, params),) = obj.items()
    if family not in FAMILIES:
        raise SchemaError(f"{path}: unknown distribution {family!r}")
    if not isinstance(params, list):
        params = [params]
    if len(params) != _ARITY[family]:
        raise SchemaError(f"{path}: {family} takes {_ARITY[family]} parameters")
    return FAMILIES[family](*[_number(p, path) for p in params])


# -- serialization ----------------------------------------------------------------


def _node_data(net):
    if isinstance(net, Trivial):
        d = net.duration
        return {"kind": "trivial", "name": net.name, "duration": {d.family: list(d.params())}}
    if isinstance(net, Acyclic):
        return {
            "kind": "acyclic",
            "vertices": [_node_data(c) for c in net.children],
            "arcs": [[i, j] for i, j in net.arcs],
        }
    if isinstance(net, Decision):
        return {
            "kind": "decision",
            "entry": _node_data(net.entry),
            "branches": [{"probability": p, "node": _node_data(c)} for p, c in net.branches],
            "exit": _node_data(net.exit),
        }
    if isinstance(net, Loop):
        return {
            "kind": "loop",
            "entry": _node_data(net.entry),
            "body": _node_data(net.body),
            "exit": _node_data(net.exit),
            "continue_probs": list(net.continue_probs),
        }
    raise TypeError(f"not a network node: {type(net).__name__}")


def _emit(value, indent, out):
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for k, (key, v) in enumerate(items):
            out.append(f"{pad}  {json.dumps(key)}: ")
            _emit(v, indent + 1, out)
            out.append(",\n" if k < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, list):
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            out.append("[" + ", ".join(_scalar(v) for v in value) + "]")
            return
        out.append("[\n")
        for k, v in enumerate(value):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if k < len(value) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_scalar(value))


def _scalar(v):
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_number(v)
    return json.dumps(v, ensure_ascii=False)


def serialize_document(doc: NetworkDocument) -> bytes:
    data = {"format_version": doc.format_version, "name": doc.name}
    if doc.notes:
        data["notes"] = list(doc.notes)
    data["root"] = _node_data(doc.root)
    out = []
    _emit(data, 0, out)
    out.append("\n")
    return "".join(out).encode("utf-8")


def serialize_network(net, name: str = "network", notes=()) -> bytes:
    """Canonical document bytes for ``net``."""
    return serialize_document(NetworkDocument(root=net, name=name, notes=tuple(notes)))


def load_document(path) -> NetworkDocument:
    with open(path, "rb") as fh:
        return parse_document(fh.read())


def example_names() -> list[str]:
    files = resources.files("ndsan.networks").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def load_example(name: str) -> NetworkDocument:
    """One of the networks shipped with the package, e.g. ``development-process``."""
    res = resources.files("ndsan.networks") / f"{name}.json"
    if not res.is_file():
        raise FileNotFoundError(f"no shipped network named {name!r}; have {example_names()}")
    return parse_document(res.read_bytes())


# -- result exports ---------------------------------------------------------------


def _csv(header, rows) -> bytes:
    lines = [header] + [",".join(r) for r in rows]
    return ("\n".join(lines) + "\n").encode("ascii")


def samples_csv(batch) -> bytes:
    times = getattr(batch, "times", batch)
    return _csv("time", ([format_time(t)] for t in times))


def ecdf_csv(emp) -> bytes:
    values, cdf = emp.jumps()
    return _csv("x,F", ([format_time(x), format_probability(f)] for x, f in zip(values, cdf)))


def histogram_csv(bins) -> bytes:
    return _csv("right_edge,count", ([format_time(b), str(int(c))] for b, c in bins))


def density_csv(density) -> bytes:
    return _csv("t,f", ([format_time(t), format_time(f)] for t, f in density.points))


def oracle_cdf_csv(dist, decimate: int = 1) -> bytes:
    """Grid CDF of a discretized law; every ``decimate``-th point plus the last."""
    if decimate < 1:
        raise ValueError("decimate must be >= 1")
    grid, cdf = dist.grid, dist.cdf
    idx = np.arange(0, dist.size, decimate)
    if idx[-1] != dist.size - 1:
        idx = np.append(idx, dist.size - 1)
    return _csv("t,F", ([format_time(grid[i]), format_probability(cdf[i])] for i in idx))


def read_samples(path) -> np.ndarray:
    """Samples file as written by :func:`samples_csv` (header optional)."""
    with open(path, encoding="ascii") as fh:
        rows = [line.strip() for line in fh if line.strip()]
    if rows and rows[0] == "time":
        rows = rows[1:]
    try:
        return np.array([float(r.split(",")[0]) for r in rows])
    except ValueError as exc:
        raise SchemaError(f"{path}: not a samples file ({exc})") from None


def to_csv(result) -> bytes:
    """CSV bytes for a batch, ECDF, histogram, density estimate or oracle law."""
    from .numeric import DiscretizedDistribution
    from .sampler import SampleBatch
    from .stats import DensityEstimate, EmpiricalDistribution

    if isinstance(result, SampleBatch):
        return samples_csv(result)
    if isinstance(result, EmpiricalDistribution):
        return ecdf_csv(result)
    if isinstance(result, DensityEstimate):
        return density_csv(result)
    if isinstance(result, DiscretizedDistribution):
        return oracle_cdf_csv(result)
    if isinstance(result, list):
        return histogram_csv(result)
    raise TypeError(f"cannot export {type(result).__name__}")


def export_results(result, destination=None) -> bytes:
    """Export ``result`` as CSV, writing it to ``destination`` when given.

    ``destination`` may be a path or a binary file object. Already-encoded
    bytes are written unchanged.
    """
    data = result if isinstance(result, bytes) else to_csv(result)
    if destination is None:
        return data
    if hasattr(destination, "write"):
        destination.write(data)
        return data
    parent = os.path.dirname(os.fspath(destination))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(destination, "wb") as fh:
        fh.write(data)
    return data
