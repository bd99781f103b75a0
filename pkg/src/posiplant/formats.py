"""File formats: instance JSON, sample-set JSON/CSV and run-report CSV.

Instance files are JSON objects with sorted keys, one term per line, and
integral numbers written as integers, so identical instances serialise to
identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable

import numpy as np

from .exceptions import ContractError
from .metrics import RunReport
from .model import Literal, Posiform, Qubo, bits_to_index
from .planting import GENERATOR_VERSION, PlantedInstance, PlantingConfig
from .samplers import SampleSet
from .topology import EdgeSet

FORMAT_VERSION = 1

__all__ = [
    "FORMAT_VERSION",
    "atomic_write",
    "instance_to_json",
    "instance_from_json",
    "write_instance",
    "read_instance",
    "sampleset_to_json",
    "sampleset_from_json",
    "sampleset_to_csv",
    "write_sampleset",
    "read_sampleset",
    "reports_to_csv",
    "bits_to_hex",
    "hex_to_bits",
]


def atomic_write(path, data: str | bytes) -> None:
    """Write via a temporary file in the target directory and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _num(v):
    """Integral floats become ints so the JSON text carries no ``.0``."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def _fmt(v) -> str:
    return json.dumps(_num(v))


def _dump(obj: dict) -> str:
    """JSON with sorted keys and one line per element of list-valued fields."""
    lines = ["{"]
    keys = sorted(obj)
    for n, key in enumerate(keys):
        value = obj[key]
        comma = "," if n < len(keys) - 1 else ""
        if isinstance(value, list) and value and isinstance(value[0], list):
            body = ",\n".join("  " + json.dumps(item) for item in value)
            lines.append(f"{json.dumps(key)}: [\n{body}\n]{comma}")
        elif isinstance(value, dict) and value and all(isinstance(v, list) for v in value.values()):
            inner = _dump(value).split("\n")
            lines.append(f"{json.dumps(key)}: " + "\n ".join(inner[:-1]) + "\n" + inner[-1] + comma)
        else:
            lines.append(f"{json.dumps(key)}: {json.dumps(value, sort_keys=True)}{comma}")
    lines.append("}")
    return "\n".join(lines)


def edge_set_to_json(e: EdgeSet) -> dict:
    return {
        "num_vars": e.num_vars,
        "label": e.label,
        "inactive": sorted(e.inactive),
        "edges": [list(p) for p in e.edges],
    }


def edge_set_from_json(d: dict) -> EdgeSet:
    return EdgeSet(int(d["num_vars"]), tuple(tuple(p) for p in d["edges"]), d.get("label", ""),
                   frozenset(d.get("inactive", ())))


def instance_to_json(
    inst: PlantedInstance,
    edge_set: EdgeSet | None = None,
    active_nodes: Iterable[int] | None = None,
) -> str:
    q = inst.qubo
    obj = {
        "format_version": FORMAT_VERSION,
        "generator_version": inst.generator_version,
        "seed": inst.seed,
        "num_vars": q.num_vars,
        "planted": list(inst.planted),
        "planted_energy": _num(inst.planted_energy),
        "offset": _num(inst.offset),
        "linear": {str(i): _num(a) for i, a in q.linear.items()},
        "quadratic": [[i, j, _num(a)] for (i, j), a in q.quadratic.items()],
        "edge_set_label": inst.edge_set_label,
        "clause_count": inst.clause_count,
        "posiform": {
            "linear": [[z.variable, int(z.negated), _num(b)] for z, b in inst.posiform.linear.items()],
            "quadratic": [
                [z.variable, int(z.negated), zp.variable, int(zp.negated), _num(b)]
                for (z, zp), b in inst.posiform.quadratic.items()
            ],
        },
    }
    if inst.config is not None:
        obj["batch_size"] = inst.config.batch_size
        obj["coefficient_pool"] = [_num(c) for c in inst.config.coefficient_pool]
        obj["max_clauses"] = inst.config.max_clauses
    if edge_set is not None:
        obj["edge_set"] = edge_set_to_json(edge_set)
    if active_nodes is not None:
        obj["active_nodes"] = [int(v) for v in active_nodes]
    return _dump(obj) + "\n"


def instance_from_json(text: str) -> tuple[PlantedInstance, dict]:
    """Parse an instance file; returns the instance and the raw JSON object.

    The posiform block is optional; without it the instance carries an
    empty posiform and only the energy bookkeeping can be checked.
    """
    d = json.loads(text)
    if "records" in d and "sampler" in d:
        raise ContractError("this is a sample-set file, not an instance")
    for key in ("num_vars", "planted", "planted_energy", "offset", "linear", "quadratic"):
        if key not in d:
            raise ContractError(f"instance file lacks {key!r}")
    n = int(d["num_vars"])
    qubo = Qubo.from_terms(
        n,
        {int(i): a for i, a in d["linear"].items()},
        [((int(i), int(j)), a) for i, j, a in d["quadratic"]],
    )
    pf = d.get("posiform") or {"linear": [], "quadratic": []}
    posiform = Posiform.from_terms(
        n,
        [(Literal(v, bool(neg)), b) for v, neg, b in pf["linear"]],
        [((Literal(v, bool(ng)), Literal(vp, bool(ngp))), b) for v, ng, vp, ngp, b in pf["quadratic"]],
    )
    config = None
    if "batch_size" in d:
        config = PlantingConfig(
            num_vars=n,
            planted=tuple(d["planted"]),
            batch_size=int(d["batch_size"]),
            coefficient_pool=tuple(d["coefficient_pool"]),
            seed=int(d["seed"]),
            max_clauses=int(d["max_clauses"]),
        )
    inst = PlantedInstance(
        qubo=qubo,
        posiform=posiform,
        planted=tuple(int(b) for b in d["planted"]),
        planted_energy=float(d["planted_energy"]),
        offset=float(d["offset"]),
        clause_count=int(d.get("clause_count", 0)),
        config=config,
        generator_version=d.get("generator_version", GENERATOR_VERSION),
        edge_set_label=d.get("edge_set_label", ""),
    )
    return inst, d


def write_instance(path, inst: PlantedInstance, **kwargs) -> None:
    atomic_write(path, instance_to_json(inst, **kwargs))


def read_instance(path) -> tuple[PlantedInstance, dict]:
    return instance_from_json(Path(path).read_text(encoding="utf-8"))


def bits_to_hex(bits) -> str:
    """Hex digits of the bitstring read as a binary number, ``x_0`` most significant."""
    n = len(bits)
    if n == 0:
        return ""
    return format(bits_to_index(bits), f"0{(n + 3) // 4}x")


def hex_to_bits(text: str, num_vars: int) -> tuple[int, ...]:
    k = int(text, 16) if text else 0
    return tuple((k >> (num_vars - 1 - i)) & 1 for i in range(num_vars))


def sampleset_to_json(s: SampleSet) -> str:
    obj = {
        "format_version": FORMAT_VERSION,
        "sampler": s.sampler,
        "instance": s.instance,
        "ground_energy": None if s.ground_energy is None else _num(s.ground_energy),
        "num_vars": s.num_vars,
        "num_reads": s.num_reads,
        "params": s.params,
        "seed": s.seed,
        "wall_time_s": s.wall_time,
        "time_source": s.time_source,
        "work": s.work,
        "records": [[r, _num(e), bits_to_hex(b)] for r, b, e in s.records()],
    }
    return _dump(obj) + "\n"


def sampleset_from_json(text: str) -> SampleSet:
    d = json.loads(text)
    n = int(d["num_vars"])
    records = d["records"]
    states = np.array([hex_to_bits(h, n) for _, _, h in records], dtype=np.uint8).reshape(len(records), n)
    energies = np.array([e for _, e, _ in records], dtype=np.float64)
    return SampleSet(
        sampler=d["sampler"],
        states=states,
        energies=energies,
        wall_time=float(d["wall_time_s"]),
        params=d.get("params", {}),
        seed=d.get("seed"),
        instance=d.get("instance", ""),
        ground_energy=d.get("ground_energy"),
        time_source=d.get("time_source", "wall-clock"),
        work=int(d.get("work", 0)),
    )


def sampleset_to_csv(s: SampleSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["read_id", "energy", "bitstring_hex", "sampler", "seed"])
    for r, b, e in s.records():
        w.writerow([r, _fmt(e), bits_to_hex(b), s.sampler, "" if s.seed is None else s.seed])
    return buf.getvalue()


def write_sampleset(stem, s: SampleSet) -> tuple[Path, Path]:
    """Write ``<stem>.json`` and ``<stem>.csv``."""
    stem = Path(stem)
    jpath = stem.with_name(stem.name + ".json")
    cpath = stem.with_name(stem.name + ".csv")
    atomic_write(jpath, sampleset_to_json(s))
    atomic_write(cpath, sampleset_to_csv(s))
    return jpath, cpath


def read_sampleset(path) -> SampleSet:
    return sampleset_from_json(Path(path).read_text(encoding="utf-8"))


REPORT_COLUMNS = ["instance", "sampler", "A", "p", "tts_99", "total_time_s"]


def reports_to_csv(reports: Iterable[RunReport]) -> str:
    """Report table sorted by ``(instance, sampler)``; empty ``tts_99`` when undefined."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in sorted(reports, key=lambda r: (r.instance, r.sampler)):
        w.writerow([
            r.instance,
            r.sampler,
            r.num_reads,
            repr(r.gsp),
            "" if r.tts_99 is None else repr(r.tts_99),
            repr(r.total_time),
        ])
    return buf.getvalue()
