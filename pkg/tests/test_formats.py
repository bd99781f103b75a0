import csv
import io
import json
import re

import numpy as np
import pytest

from posiplant.exceptions import ContractError
from posiplant.formats import (
    bits_to_hex,
    hex_to_bits,
    instance_from_json,
    instance_to_json,
    reports_to_csv,
    sampleset_from_json,
    sampleset_to_csv,
    sampleset_to_json,
)
from posiplant.metrics import run_report
from posiplant.planting import PlantingConfig, plant, random_planted
from posiplant.samplers import SamplerParams, simulated_annealing
from posiplant.topology import chimera


def make_instance():
    e = chimera(1)
    return plant(PlantingConfig(8, random_planted(8, 2), edge_set=e, seed=2)), e


def test_instance_roundtrip_is_byte_identical():
    inst, e = make_instance()
    text = instance_to_json(inst, edge_set=e)
    back, raw = instance_from_json(text)
    assert back.qubo == inst.qubo and back.posiform == inst.posiform
    assert back.planted == inst.planted and back.offset == inst.offset
    assert instance_to_json(back, edge_set=e) == text
    assert raw["edge_set"]["num_vars"] == 8


def test_instance_json_shape():
    inst, _ = make_instance()
    text = instance_to_json(inst)
    d = json.loads(text)
    assert list(d) == sorted(d)
    assert isinstance(d["planted_energy"], int) and isinstance(d["offset"], int)
    assert all(isinstance(v, int) for v in d["linear"].values())
    assert all(len(t) == 3 for t in d["quadratic"])
    assert not re.search(r"\d\.0[,\]}\n]", text)


def test_hex_encoding():
    assert bits_to_hex((1, 0, 1)) == "5"
    assert bits_to_hex((1, 0, 0, 0, 0)) == "10"
    assert bits_to_hex(()) == ""
    bits = tuple(np.random.default_rng(0).integers(0, 2, size=37).tolist())
    assert hex_to_bits(bits_to_hex(bits), 37) == bits


def test_sampleset_roundtrip():
    inst, _ = make_instance()
    s = simulated_annealing(inst.qubo, SamplerParams(12, 30, seed=1))
    s.instance, s.ground_energy = "x", inst.planted_energy
    back = sampleset_from_json(sampleset_to_json(s))
    assert np.array_equal(back.states, s.states) and np.array_equal(back.energies, s.energies)
    assert sampleset_to_json(back) == sampleset_to_json(s)
    rows = list(csv.DictReader(io.StringIO(sampleset_to_csv(s))))
    assert len(rows) == 12
    assert list(rows[0]) == ["read_id", "energy", "bitstring_hex", "sampler", "seed"]
    assert hex_to_bits(rows[3]["bitstring_hex"], 8) == tuple(s.states[3])
    with pytest.raises(ContractError, match="sample-set"):
        instance_from_json(sampleset_to_json(s))


def test_report_csv_order_and_empty_tts():
    inst, _ = make_instance()
    sets = []
    for name, energy in (("b", inst.planted_energy), ("a", inst.planted_energy + 1)):
        s = simulated_annealing(inst.qubo, SamplerParams(4, 10))
        s.instance, s.ground_energy = name, inst.planted_energy
        s.energies = np.full(4, float(energy))
        sets.append(s)
    rows = list(csv.reader(io.StringIO(reports_to_csv([run_report(s) for s in sets]))))
    assert rows[0] == ["instance", "sampler", "A", "p", "tts_99", "total_time_s"]
    assert [r[0] for r in rows[1:]] == ["a", "b"]
    assert rows[1][4] == "" and rows[2][3] == "1.0"
