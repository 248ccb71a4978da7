"""Line-based text format and a JSON mirror for systems and certificates.

Text form::

    sts v=<order> complete=<0|1>
    b <p> <q> <r>          (p < q < r, lexicographic order)
    cert <kind> key=value ...
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .core import PartialSTS
from .errors import FormatError


@dataclass
class Document:
    system: PartialSTS
    certificates: list[str] = field(default_factory=list)


def dumps(ps: PartialSTS, certificates=()) -> str:
    lines = [f"sts v={ps.order} complete={int(ps.is_complete)}"]
    lines.extend(f"b {a} {b} {c}" for a, b, c in ps.blocks)
    lines.extend(certificates)
    return "\n".join(lines) + "\n"


def to_structured(ps: PartialSTS, certificates=()) -> dict:
    return {
        "order": ps.order,
        "complete": ps.is_complete,
        "blocks": [list(b) for b in ps.blocks],
        "certificates": [{**parse_certificate(c), "line": c} for c in certificates],
    }


def dumps_structured(ps: PartialSTS, certificates=()) -> str:
    return json.dumps(to_structured(ps, certificates), indent=2, sort_keys=True) + "\n"


def parse_certificate(line: str) -> dict:
    parts = line.split()
    if len(parts) < 2 or parts[0] != "cert":
        raise FormatError(f"not a certificate line: {line!r}")
    out = {"kind": parts[1]}
    for tok in parts[2:]:
        key, sep, value = tok.partition("=")
        if not sep:
            raise FormatError(f"bad certificate field {tok!r}")
        out[key] = value
    return out


def format_certificate(cert: dict) -> str:
    fields = " ".join(f"{k}={v}" for k, v in cert.items() if k != "kind")
    return f"cert {cert['kind']} {fields}".rstrip()


def _check_flag(ps: PartialSTS, flag: bool) -> PartialSTS:
    if flag != ps.is_complete:
        raise FormatError(f"header says complete={int(flag)} but the blocks disagree")
    return ps


def _load_text(text: str) -> Document:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty input")
    head = lines[0].split()
    try:
        if head[0] != "sts":
            raise ValueError
        kv = dict(tok.split("=", 1) for tok in head[1:])
        order = int(kv["v"])
        flag = kv.get("complete", "0")
        if flag not in ("0", "1"):
            raise ValueError
    except (ValueError, KeyError, IndexError):
        raise FormatError(f"bad header {lines[0]!r}") from None
    blocks, certs = [], []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "b":
            if len(parts) != 4:
                raise FormatError(f"bad block line {ln!r}")
            try:
                blocks.append(tuple(int(p) for p in parts[1:]))
            except ValueError:
                raise FormatError(f"bad block line {ln!r}") from None
        elif parts[0] == "cert":
            parse_certificate(ln)
            certs.append(ln.strip())
        else:
            raise FormatError(f"unrecognised line {ln!r}")
    return Document(_check_flag(PartialSTS(order, blocks), flag == "1"), certs)


def _load_structured(text: str) -> Document:
    try:
        data = json.loads(text)
        order = int(data["order"])
        blocks = [tuple(int(p) for p in b) for b in data["blocks"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"bad structured input: {exc}") from None
    ps = PartialSTS(order, blocks)
    if "complete" in data:
        _check_flag(ps, bool(data["complete"]))
    certs = [c["line"] if "line" in c else format_certificate(c)
             for c in data.get("certificates", [])]
    return Document(ps, certs)


def load_document(text: str) -> Document:
    """Parse either form; invalid block sets raise the core validation errors."""
    if text.lstrip().startswith("{"):
        return _load_structured(text)
    return _load_text(text)


def loads(text: str) -> PartialSTS:
    return load_document(text).system


def read(path: str | Path) -> Document:
    return load_document(Path(path).read_text())


def write(path: str | Path, ps: PartialSTS, certificates=(), structured: bool = False) -> None:
    text = dumps_structured(ps, certificates) if structured else dumps(ps, certificates)
    Path(path).write_text(text)
