"""File formats: report envelopes, CSV tables, sequence files and signal files.

Everything written here is a pure function of its input, so identical runs
produce identical bytes.  JSON is emitted with sorted keys and fixed
separators, and floats are written with ``repr``, which round-trips exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .construction import BlockKind, SparseSequence, build_sequence
from .errors import ValidationError
from .maximal import WeakTypeReport
from .numtheory import OffsetSchedule, PrimeSchedule
from .signals import IntSignal

VERSION = 1


@dataclass
class DecayScan:
    """(p, sup |rho_dagger^|) rows of a decay scan, with the fitted slope."""

    m: int
    primes: tuple[int, ...]
    sups: tuple[float, ...]
    slope: float = float("nan")
    intercept: float = float("nan")
    oversample: int = 32

    def rows(self) -> list[dict]:
        return [{"p": p, "sup": s, "sup_times_sqrt_p": s * math.sqrt(p)} for p, s in zip(self.primes, self.sups)]

    def spread(self) -> float:
        scaled = [r["sup_times_sqrt_p"] for r in self.rows()]
        return max(scaled) / min(scaled)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "primes": list(self.primes),
            "sups": list(self.sups),
            "slope": self.slope,
            "intercept": self.intercept,
            "oversample": self.oversample,
        }

    @classmethod
    def from_dict(cls, d: dict) -> DecayScan:
        return cls(int(d["m"]), tuple(int(p) for p in d["primes"]), tuple(float(s) for s in d["sups"]),
                   float(d["slope"]), float(d["intercept"]), int(d["oversample"]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DecayScan):
            return NotImplemented
        return canonical_json(self.to_dict()) == canonical_json(other.to_dict())


_TYPES = {"weak_type": WeakTypeReport, "decay": DecayScan}


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if hasattr(obj, "numerator") and hasattr(obj, "denominator") and not isinstance(obj, int):
        return f"{obj.numerator}/{obj.denominator}"
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def envelope(payload: Any, config: dict | None = None) -> dict:
    kind = next((name for name, t in _TYPES.items() if isinstance(payload, t)), "plain")
    body = {"type": kind, "data": _plain(payload)}
    return {"version": VERSION, "config": _plain(config or {}), "digest": digest(body), "payload": body}


def dumps_report(payload: Any, config: dict | None = None) -> str:
    return json.dumps(envelope(payload, config), sort_keys=True, indent=2) + "\n"


def loads_report(text: str) -> Any:
    env = json.loads(text)
    if env.get("version") != VERSION:
        raise ValidationError(f"unsupported report version {env.get('version')!r}")
    body = env["payload"]
    if digest(body) != env["digest"]:
        raise ValidationError("report digest does not match its payload")
    t = _TYPES.get(body["type"])
    return t.from_dict(body["data"]) if t else body["data"]


def table_rows(report: Any) -> list[dict]:
    if isinstance(report, WeakTypeReport):
        return [{"alpha": float(a), "count": int(c), "ratio": float(r)}
                for a, c, r in zip(report.alphas, report.counts, report.ratios)]
    if isinstance(report, DecayScan):
        return report.rows()
    if isinstance(report, list) and all(isinstance(r, dict) for r in report):
        return report
    raise TypeError(f"no tabular form for {type(report).__name__}")


def dumps_csv(report: Any) -> str:
    rows = table_rows(report)
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def loads_csv(text: str) -> list[dict]:
    """Rows with ints kept as ints and everything else parsed as float."""
    out = []
    for r in csv.DictReader(io.StringIO(text)):
        out.append({k: int(v) if v.lstrip("-").isdigit() else float(v) for k, v in r.items()})
    return out


def emit_report(report: Any, fmt: str, path: str | Path, config: dict | None = None) -> None:
    if fmt == "json":
        text = dumps_report(report, config)
    elif fmt == "csv":
        text = dumps_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    Path(path).write_text(text)


def load_report(path: str | Path) -> Any:
    path = Path(path)
    text = path.read_text()
    return loads_csv(text) if path.suffix == ".csv" else loads_report(text)


# -- sequence files ---------------------------------------------------------


def sequence_to_dict(seq: SparseSequence) -> dict:
    kinds = set(seq.kinds)
    d: dict = {"version": VERSION, "kind": seq.label}
    if len(kinds) == 1:
        kd = seq.kinds[0]
        d["m" if kd.name == "power" else "d"] = kd.param
    else:
        d["pattern"] = [str(k) for k in seq.kinds]
    d["primes"] = list(seq.schedule.primes)
    d["offsets"] = list(seq.offsets.offsets)
    d["blocks"] = [{"k": b.k, "p": b.p, "a": b.a, "elements": list(b.elements)} for b in seq.blocks]
    d["merged"] = [int(n) for n in seq.merged]
    return d


def sequence_from_dict(d: dict) -> SparseSequence:
    """Rebuild the sequence from its schedules and check every stored field against it."""
    if d.get("version") != VERSION:
        raise ValidationError(f"unsupported sequence file version {d.get('version')!r}")
    primes = tuple(int(p) for p in d["primes"])
    if "pattern" in d:
        kinds = [BlockKind.parse(t) for t in d["pattern"]]
    elif "m" in d:
        kinds = [BlockKind("power", int(d["m"]))] * len(primes)
    else:
        kinds = [BlockKind("paraboloid", int(d["d"]))] * len(primes)
    # the measured ratio range certifies the growth bounds the file actually has
    ratios = [Fraction(b, a) for a, b in zip(primes, primes[1:])] or [Fraction(2)]
    sched = PrimeSchedule(primes, min(ratios) - 1, max(ratios))
    exps = tuple(k.dim for k in kinds)
    a = [int(v) for v in d["offsets"]]
    offs = OffsetSchedule(tuple(a), exps, max(Fraction(x, p**e) for x, p, e in zip(a, primes, exps)))
    seq = build_sequence(kinds, sched, offs)
    if sequence_to_dict(seq) != d:
        raise ValidationError("sequence file does not match the sequence its schedules generate")
    return seq


def dumps_sequence(seq: SparseSequence) -> str:
    return json.dumps(sequence_to_dict(seq), sort_keys=True) + "\n"


def loads_sequence(text: str) -> SparseSequence:
    try:
        return sequence_from_dict(json.loads(text))
    except (KeyError, TypeError) as e:
        raise ValidationError(f"malformed sequence file: {e}") from e


# -- signal files -----------------------------------------------------------


def dumps_signal(f: IntSignal) -> str:
    return "".join(json.dumps([n, v]) + "\n" for n, v in f.to_sparse())


def loads_signal(text: str) -> IntSignal:
    pairs = []
    for line in text.splitlines():
        if line.strip():
            n, v = json.loads(line)
            pairs.append((int(n), float(v)))
    return IntSignal.from_sparse(pairs)


def signals_equal(f: IntSignal, g: IntSignal) -> bool:
    return f.offset == g.offset and np.array_equal(f.values, g.values)


def parse_primes(text: str) -> list[int]:
    """``5..13`` (all primes in the closed range) or a comma list ``5,7,11``."""
    from .numtheory import is_prime

    if ".." in text:
        lo, hi = (int(t) for t in text.split("..", 1))
        return [p for p in range(lo, hi + 1) if is_prime(p)]
    return [int(t) for t in text.split(",") if t.strip()]

