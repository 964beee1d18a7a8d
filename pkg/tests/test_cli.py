import io
import json
import math
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from maslovkit import symcore
from maslovkit.cli import INPUT_SCHEMAS, OUTPUT_SCHEMAS, run

J1 = symcore.j0(1).tolist()
R1 = symcore.coordinate_frame(1).tolist()
IR1 = symcore.coordinate_frame(1, imaginary=True).tolist()
E7 = {"weights": [9, 6, 4], "beta": 18, "monomials": [[2, 0, 0], [0, 3, 0], [0, 1, 3]]}


def call(argv, payload=None):
    out = io.StringIO()
    stdin = io.StringIO("" if payload is None else json.dumps(payload))
    code = run(argv, stdin, out)
    return code, json.loads(out.getvalue()), out.getvalue()


def half_turn(angle=math.pi):
    return {"type": "exponential", "frame": R1, "generator": (angle * np.array(J1)).tolist()}


CASES = [
    (["mono", "weighted"], E7, {"sigma": -2}),
    (["cover", "dehn-shift", "--n", "4"], None, {"k": 6}),
    (["calc", "signature", "--family", "even", "--n", "2", "--k", "1"], None, {"hf01": {"0": 1}, "hf12": {"-2": 1}}),
    (["maslov", "winding"], {"path": half_turn()}, None),
    (["maslov", "pair"], {"path0": half_turn(math.pi / 2),
                          "path1": {"type": "exponential", "frame": IR1, "generator": [[0, 0], [0, 0]]}}, None),
    (["maslov", "cz"], {"path": {"type": "exponential", "generator": J1, "b": 0.25}}, {"cz": 1}),
    (["cover", "lift"], {"path": half_turn(), "theta_start": 0, "modulus": 2}, None),
    (["cover", "abs"], {"lift0": {"frame": R1, "theta": 0}, "lift1": {"frame": IR1, "theta": 0.5}},
     {"index": {"mod": "inf", "val": 1}}),
    (["cover", "abs-cz"], {"path": {"type": "exponential", "generator": (0.2 * np.array(J1)).tolist()}, "k": 0},
     {"index": {"mod": "inf", "val": 0}}),
    (["cover", "handle", "--n", "3"], None, {"alpha_end": "-1/2", "surgery_index": {"mod": "inf", "val": 1}}),
    (["calc", "twist"], {"n": 2, "spheres": 3, "first": 1, "word": "t1 t2 t1 t2 t1 t2", "target": 2}, None),
    (["calc", "verdict", "--family", "odd", "--n", "5", "--k", "-3"], None, {"verdict": "distinct"}),
    (["calc", "pl"], {"n": 2, "spheres": 2, "class": 0, "vector": [1, 0]}, None),
    (["calc", "cpn"], {"n": 3, "profile": [1, 1, 1, 1], "h1_mod": [2]}, None),
    (["calc", "surface"], {"genus": 2, "modulus": 4, "chi": -1, "boundary": [0, 1, 2], "search": True,
                           "curves": [{"class": [1, 0, 0, 0], "rotation": -2}, {"class": [0, 0, 1, 0], "rotation": 0},
                                      {"class": [-1, 0, -1, 0], "rotation": 0}]}, None),
    (["mono", "verdict"], {"weights": [1, 1, 1, 1], "beta": 4}, None),
    (["mono", "geodesic"], {"dim": 16, "points": [[0.5, 7], [1, 15]]}, {"sigma": -22}),
    (["mono", "table", "--m", "2"], None, None),
    (["mono", "loop"], {"multiplicities": [1, 2]}, {"sigma": -6}),
    (["mono", "loop"], E7, {"sigma": -2}),
]


@pytest.mark.parametrize("argv, payload, expected", CASES, ids=[" ".join(c[0][:2]) for c in CASES])
def test_commands_and_output_schemas(argv, payload, expected):
    code, out, _ = call(argv, payload)
    assert code == 0, out
    if payload is not None:
        jsonschema.validate(payload, INPUT_SCHEMAS[tuple(argv[:2])])
    jsonschema.validate(out, OUTPUT_SCHEMAS[tuple(argv[:2])])
    if expected is not None:
        assert {k: out[k] for k in expected} == expected


def test_every_command_has_a_case():
    assert {tuple(c[0][:2]) for c in CASES} == set(INPUT_SCHEMAS)


def test_specific_values():
    assert call(["maslov", "winding"], {"path": half_turn()})[1]["winding"] == pytest.approx(1.0)
    code, out, _ = call(["maslov", "pair"], CASES[4][1])
    assert out["mu"] == "1/2" and out["crossings"][0]["endpoint"] is True
    code, out, _ = call(["calc", "twist"], CASES[10][1])
    assert out["label"] == {"sphere": 2, "shift": {"mod": "inf", "val": -2}}
    assert call(["calc", "pl"], CASES[12][1])[1]["image"] == [-1, 0]
    assert call(["mono", "verdict"], CASES[15][1])[1]["verdict"] == "inconclusive"


def test_exit_codes():
    code, out, _ = call(["mono", "weighted"], {"weights": [1], "beta": 2, "extra": 1})
    assert code == 1 and out["error"] == "SchemaError"
    code, out, _ = call(["mono", "nonsense"])
    assert code == 1
    code, out, _ = call(["mono", "weighted"], None)
    assert code == 1
    code, out, _ = call(["mono", "weighted"], {"weights": [2, 2], "beta": 3, "monomials": [[1, 1]]})
    assert code == 2 and out["error"] == "NotQuasiHomogeneous"
    code, out, _ = call(["calc", "verdict", "--family", "odd", "--n", "3", "--k", "1"])
    assert code == 2 and out["error"] == "UnsupportedCase"
    code, out, _ = call(["cover", "abs"], {"lift0": {"frame": R1, "theta": 0}, "lift1": {"frame": R1, "theta": 1}})
    assert code == 2 and out["error"] == "NotTransverse"
    code, out, _ = call(["--tol", "-1", "mono", "table", "--m", "2"])
    assert code == 1


def test_invalid_json_is_a_schema_error():
    out = io.StringIO()
    assert run(["mono", "weighted"], io.StringIO("{not json"), out) == 1


def test_deterministic_bytes():
    argv, payload, _ = CASES[4]
    first = call(["--self-check"] + argv, payload)[2]
    assert all(call(["--self-check"] + argv, payload)[2] == first for _ in range(3))


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "maslovkit.cli", "cover", "dehn-shift", "--n", "2"],
                          input="", capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"k": 2}
