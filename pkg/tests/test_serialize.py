import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from selfaffine import fixtures
from selfaffine.errors import NotInvertible, ParseError, ValidationError, WrongDigitCount
from selfaffine.fourier import v_w_membership
from selfaffine.intlinalg import certify_expanding
from selfaffine.overlap import classify
from selfaffine.serialize import (
    certificate_to_json,
    classification_to_json,
    complex_json,
    dumps,
    from_rational,
    parse_input,
    rational,
    system_from_json,
    system_to_json,
)
from selfaffine.system import ScaledVector, build_system


@pytest.mark.parametrize("name", sorted(fixtures.NAMED))
def test_round_trip_fixtures(name, tmp_path):
    sys = fixtures.NAMED[name]()
    assert system_from_json(json.loads(dumps(system_to_json(sys)))) == sys
    path = tmp_path / "s.json"
    path.write_text(dumps(system_to_json(sys)))
    assert parse_input(path) == sys


@given(st.data())
def test_round_trip_random(data):
    m = certify_expanding(data.draw(st.sampled_from([[[3]], [[5]], [[1, -2], [2, 1]]])))
    vec = st.tuples(*[st.integers(-50, 50)] * m.dim)
    digits = [ScaledVector(data.draw(st.integers(0, 4)), data.draw(vec)) for _ in range(m.det_abs)]
    sys = build_system(m, digits)
    assert system_from_json(json.loads(dumps(system_to_json(sys)))) == sys


def test_data_files_parse():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "data"
    assert parse_input(root / "f2.json") == fixtures.f2()
    assert parse_input(root / "fig1_overlap.json") == fixtures.fig1_overlap()
    m, target = parse_input(root / "targets_triadic.json")
    assert m.det_abs == 3 and target.epsilon == 0.1


def test_rationals_and_complex():
    assert rational(Fraction(-2, 6)) == [-1, 3]
    assert from_rational([4, 6]) == Fraction(2, 3)
    z = complex_json(0.1 + 2j)
    assert z == {"re": "0.10000000000000001", "im": "2"}


@pytest.mark.parametrize(
    "text, err, where",
    [
        ("{not json", ParseError, "line 1"),
        ("[1, 2]", ParseError, "top level"),
        ('{"digits": []}', ParseError, "$: missing field 'matrix'"),
        ('{"matrix": [[3]], "digits": [{"vec": [0]}]}', ParseError, "$.digits[0]"),
        ('{"matrix": [[3]], "digits": [{"scale": 0, "vec": ["a"]}]}', ParseError, "$.digits[0].vec"),
        ('{"matrix": [[3]], "digits": [{"scale": -1, "vec": [0]}]}', ParseError, "$.digits[0].scale"),
        ('{"matrix": [[3, 1]], "digits": []}', ValidationError, "square"),
        ('{"matrix": [[0]], "digits": []}', NotInvertible, "singular"),
        ('{"matrix": [[3]], "digits": [{"scale": 0, "vec": [0]}]}', WrongDigitCount, "expected N"),
    ],
)
def test_parse_errors(tmp_path, text, err, where):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(err) as info:
        parse_input(path)
    assert where in str(info.value)


def test_certificates_serialize(F2, fig1_osc):
    rep = classify(F2)
    out = classification_to_json(rep)
    cert = out["certificates"][0]
    assert cert["kind"] == "overlap" and cert["depth"] == 2
    assert cert["map"] == {"linear": [[[1, 9]]], "translation": [[1, 1]]}
    assert classification_to_json(classify(fig1_osc))["certificates"][0]["kind"] == "osc"
    sing = certificate_to_json(v_w_membership(F2, (1,)))
    assert sing["kind"] == "singularity" and sing["w"] == [1]
    # every value is plain JSON
    json.dumps(out)
    json.dumps(sing)
    with pytest.raises(TypeError):
        certificate_to_json(object())


def test_dumps_is_stable(F2):
    a = dumps(classification_to_json(classify(F2)))
    b = dumps(classification_to_json(classify(F2)))
    assert a == b and a.endswith("\n")
