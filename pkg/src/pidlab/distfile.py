"""Sparse textual distribution files and deterministic report files.

A DistFile is JSON with three keys::

    {
      "variables": ["S", "Y", "Z"],
      "alphabets": {"S": ["0", "1"], "Y": ["0", "1"], "Z": ["0", "1"]},
      "entries": [{"state": ["0", "0", "0"], "p": "0.25"}, ...]
    }

Absent states carry zero mass.  Probabilities are serialized as decimal
strings with 17 significant digits; on input, plain numbers and fractions
like "1/4" are also accepted.  Reports are JSON with sorted keys and a
trailing newline, written atomically, so identical inputs yield
byte-identical files.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import tempfile
from fractions import Fraction

import numpy as np

from .dist import Alphabet, JointDist, validate
from .errors import NegativeMass, NotNormalized, ParseError, ValidationError

TOOL_NAME = "pidlab"


def tool_version() -> str:
    try:
        from importlib.metadata import version

        return version(TOOL_NAME)
    except Exception:
        return "unknown"


def parse_probability(value) -> float:
    """Accept a decimal string, a fraction string like '1/4', or a number."""
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return float(Fraction(text))
            return float(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"unparseable probability {value!r}") from exc
    raise ParseError(f"unparseable probability {value!r}")


def format_probability(x: float) -> str:
    """Decimal string with 17 significant digits (round-trips float64)."""
    return format(float(x), ".17g")


def dist_to_payload(P: JointDist) -> dict:
    entries = []
    for idx in itertools.product(*(range(len(a)) for a in P.alphabets)):
        p = float(P.mass[idx])
        if p > 0.0:
            entries.append(
                {
                    "state": [P.alphabets[k].labels[i] for k, i in enumerate(idx)],
                    "p": format_probability(p),
                }
            )
    return {
        "variables": list(P.names),
        "alphabets": {n: list(P.alphabet(n).labels) for n in P.names},
        "entries": entries,
    }


def payload_to_dist(payload: dict) -> JointDist:
    if not isinstance(payload, dict):
        raise ParseError("distribution file must be a JSON object")
    for key in ("variables", "alphabets", "entries"):
        if key not in payload:
            raise ParseError(f"missing key {key!r}")
    names = payload["variables"]
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise ParseError("'variables' must be a list of names")
    alphabets = []
    for n in names:
        labels = payload["alphabets"].get(n)
        if not isinstance(labels, list) or not labels:
            raise ParseError(f"missing or empty alphabet for variable {n!r}")
        try:
            alphabets.append(Alphabet(tuple(labels)))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    shape = tuple(len(a) for a in alphabets)
    mass = np.zeros(shape)
    seen = set()
    for entry in payload["entries"]:
        if not isinstance(entry, dict) or "state" not in entry or "p" not in entry:
            raise ParseError(f"malformed entry {entry!r}")
        state = entry["state"]
        if len(state) != len(names):
            raise ParseError(f"state {state!r} has wrong arity")
        try:
            idx = tuple(alphabets[k].index(str(s)) for k, s in enumerate(state))
        except KeyError as exc:
            raise ParseError(f"state {state!r}: {exc.args[0]}") from None
        if idx in seen:
            raise ParseError(f"duplicate state {state!r}")
        seen.add(idx)
        mass[idx] = parse_probability(entry["p"])
    try:
        return validate(JointDist(tuple(names), tuple(alphabets), mass))
    except (NegativeMass, NotNormalized) as exc:
        raise ValidationError(str(exc)) from exc


def load_dist(path: str) -> JointDist:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return payload_to_dist(payload)


def dump_dist(P: JointDist, path: str) -> None:
    _write_atomic(path, dist_to_payload(P))


def input_digest(path: str) -> str:
    """SHA-256 of the input file bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def make_report(kind: str, tolerances: dict, body: dict, input_digest_hex=None) -> dict:
    report = {
        "tool": f"{TOOL_NAME} {tool_version()}",
        "kind": kind,
        "tolerances": tolerances,
    }
    if input_digest_hex is not None:
        report["input_digest"] = input_digest_hex
    report.update(body)
    return report


def write_report(path: str, report: dict) -> None:
    _write_atomic(path, report)


def _write_atomic(path: str, payload: dict) -> None:
    """Serialize deterministically and replace the target in one step."""
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
