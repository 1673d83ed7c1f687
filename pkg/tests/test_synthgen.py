import json
from collections import Counter

import pytest

from flowareas import ConfigError, encode
from flowareas.synthgen import Dimension, Edit, Effect, SynthSpec, apply_edit, generate

BASE = ("A", "B", "C", "D")


def test_remove_effect_without_noise():
    spec = SynthSpec(200, BASE, (Dimension("type", ("X", "Y")),),
                     (Effect("type", "X", Edit("remove", "B")),), seed=3)
    log = generate(spec)
    for case in log.cases:
        has_b = "B" in case.activities
        assert has_b == (case.attributes["type"].canonical != "X")
    assert {c.attributes["type"].canonical for c in log.cases} == {"X", "Y"}


def test_no_effects_identical_profiles():
    log = generate(SynthSpec(50, BASE, (Dimension("d", ("1", "2", "3")),), seed=1))
    rows = encode(log).rows
    assert (rows == rows[0]).all()


@pytest.mark.parametrize("edit,expected", [
    (Edit("insert", "Z", 1), ["A", "Z", "B", "C", "D"]),
    (Edit("insert", "Z", 99), ["A", "B", "C", "D", "Z"]),
    (Edit("remove", "C"), ["A", "B", "D"]),
    (Edit("swap", "B"), ["A", "C", "B", "D"]),
    (Edit("swap", "D"), ["A", "B", "C", "D"]),
    (Edit("repeat", "C"), ["A", "B", "C", "C", "D"]),
    (Edit("repeat", "Q"), ["A", "B", "C", "D"]),
])
def test_edits(edit, expected):
    assert apply_edit(list(BASE), edit) == expected


def spec_dict(**over):
    d = {"n_cases": 30, "base_sequence": list(BASE), "seed": 9, "noise_rate": 0.5,
         "dimensions": [{"name": "type", "values": ["X", "Y"], "probabilities": [0.25, 0.75]}],
         "effects": [{"dimension": "type", "value": "X", "edit": {"kind": "insert", "activity": "E", "position": 2}}]}
    d.update(over)
    return d


def test_deterministic_per_seed():
    a = generate(SynthSpec.from_dict(spec_dict()))
    b = generate(SynthSpec.from_dict(spec_dict()))
    assert [c.activities for c in a.cases] == [c.activities for c in b.cases]
    c = generate(SynthSpec.from_dict(spec_dict(seed=10)))
    assert [x.activities for x in a.cases] != [x.activities for x in c.cases]


def test_noise_free_variants_depend_only_on_values():
    log = generate(SynthSpec.from_dict(spec_dict(noise_rate=0.0, n_cases=100)))
    by_value = {}
    for c in log.cases:
        by_value.setdefault(c.attributes["type"].canonical, set()).add(c.activities)
    assert by_value == {"X": {("A", "B", "E", "C", "D")}, "Y": {BASE}}


def test_noise_rate_roughly_respected():
    log = generate(SynthSpec(4000, BASE, noise_rate=0.2, seed=4))
    changed = sum(c.activities != BASE for c in log.cases)
    # a noise swap/insert can reproduce the base sequence, so changed <= noisy
    assert 0.12 * 4000 < changed < 0.22 * 4000


def test_timestamps_monotone():
    log = generate(SynthSpec(3, BASE, seed=0))
    for c in log.cases:
        ts = [e.timestamp for e in c.events]
        assert ts == sorted(ts)


@pytest.mark.parametrize("bad", [
    {"noise_rate": 1.5},
    {"n_cases": 0},
    {"base_sequence": []},
    {"dimensions": [{"name": "type", "values": ["X", "Y"], "probabilities": [1.5, -0.5]}]},
    {"dimensions": [{"name": "type", "values": ["X", "Y"], "probabilities": [0.3, 0.3]}]},
    {"effects": [{"dimension": "nope", "value": "X", "edit": {"kind": "remove", "activity": "A"}}]},
    {"effects": [{"dimension": "type", "value": "X", "edit": {"kind": "remove", "activity": "Q"}}]},
    {"effects": [{"dimension": "type", "value": "X", "edit": {"kind": "explode", "activity": "A"}}]},
    {"effects": [{"dimension": "type", "value": "X", "edit": {"kind": "insert", "activity": "Q", "position": 9}}]},
    {"dimensions": "oops"},
])
def test_invalid_specs(bad):
    with pytest.raises(ConfigError):
        SynthSpec.from_dict(spec_dict(**bad))


def test_effects_cannot_empty_a_case():
    spec = SynthSpec(5, ("A",), (Dimension("t", ("x",)),), (Effect("t", "x", Edit("remove", "A")),))
    with pytest.raises(ConfigError):
        generate(spec)


def test_load_json_and_toml(tmp_path):
    j = tmp_path / "s.json"
    j.write_text(json.dumps(spec_dict()))
    t = tmp_path / "s.toml"
    t.write_text('n_cases = 30\nbase_sequence = ["A", "B", "C", "D"]\nseed = 9\nnoise_rate = 0.5\n'
                 '[[dimensions]]\nname = "type"\nvalues = ["X", "Y"]\nprobabilities = [0.25, 0.75]\n'
                 '[[effects]]\ndimension = "type"\nvalue = "X"\n'
                 '[effects.edit]\nkind = "insert"\nactivity = "E"\nposition = 2\n')
    assert SynthSpec.load(j) == SynthSpec.load(t)


def test_value_distribution_follows_probabilities():
    log = generate(SynthSpec(5000, BASE, (Dimension("t", ("a", "b"), (0.2, 0.8)),), seed=0))
    counts = Counter(c.attributes["t"].canonical for c in log.cases)
    assert abs(counts["a"] / 5000 - 0.2) < 0.03
