"""Command-line front end: JSON in on stdin, JSON out on stdout.

Exit codes: 0 on success, 1 when the input fails schema validation (or the
command line is malformed), 2 for domain errors, which are reported as
``{"error": <name>, "detail": <message>}``.
"""

from __future__ import annotations

import argparse
import json
import sys

import jsonschema
import numpy as np

from . import covering, errors, gradedcalc, index, monodromy, symcore
from .errors import MaslovKitError
from .paths import LagrangianPath, SymplecticPath
from .symcore import INF


class SchemaError(Exception):
    pass


# ---------------------------------------------------------------------------
# schemas
# ---------------------------------------------------------------------------

_NUM = {"type": "number"}
_INT = {"type": "integer"}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _NUM}}
_MODULUS = {"oneOf": [{"type": "integer", "minimum": 1}, {"const": "inf"}]}
_INT_LIST = {"type": "array", "items": _INT}


def _obj(props: dict, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


LAGRANGIAN_PATH = {"oneOf": [
    _obj({"type": {"const": "exponential"}, "frame": _MATRIX, "generator": _MATRIX, "a": _NUM, "b": _NUM},
         ["type", "frame", "generator"]),
    _obj({"type": {"const": "samples"}, "times": {"type": "array", "items": _NUM, "minItems": 2},
          "frames": {"type": "array", "items": _MATRIX, "minItems": 2}}, ["type", "times", "frames"]),
    _obj({"type": {"const": "piecewise"}, "frame": _MATRIX, "start": _NUM,
          "segments": {"type": "array", "minItems": 1,
                       "items": _obj({"generator": _MATRIX, "duration": {"type": "number", "exclusiveMinimum": 0}},
                                     ["generator", "duration"])}},
         ["type", "frame", "segments"]),
]}

SYMPLECTIC_PATH = {"oneOf": [
    _obj({"type": {"const": "exponential"}, "generator": _MATRIX, "a": _NUM, "b": _NUM, "initial": _MATRIX},
         ["type", "generator"]),
    _obj({"type": {"const": "samples"}, "times": {"type": "array", "items": _NUM, "minItems": 2},
          "matrices": {"type": "array", "items": _MATRIX, "minItems": 2}}, ["type", "times", "matrices"]),
]}

LIFT = _obj({"frame": _MATRIX, "theta": _NUM}, ["frame", "theta"])
WEIGHTED = {"weights": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
            "beta": {"type": "integer", "minimum": 1},
            "monomials": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}}}
EMPTY = _obj({})

INPUT_SCHEMAS = {
    ("maslov", "pair"): _obj({"path0": LAGRANGIAN_PATH, "path1": LAGRANGIAN_PATH}, ["path0", "path1"]),
    ("maslov", "cz"): _obj({"path": SYMPLECTIC_PATH}, ["path"]),
    ("maslov", "winding"): _obj({"path": LAGRANGIAN_PATH}, ["path"]),
    ("cover", "lift"): _obj({"path": LAGRANGIAN_PATH, "theta_start": _NUM, "modulus": _MODULUS},
                            ["path", "theta_start"]),
    ("cover", "abs"): _obj({"lift0": LIFT, "lift1": LIFT, "modulus": _MODULUS}, ["lift0", "lift1"]),
    ("cover", "abs-cz"): {"oneOf": [
        _obj({"matrix": _MATRIX, "t": _NUM, "modulus": _MODULUS}, ["matrix", "t"]),
        _obj({"path": SYMPLECTIC_PATH, "k": _INT, "modulus": _MODULUS}, ["path", "k"]),
    ]},
    ("cover", "handle"): EMPTY,
    ("cover", "dehn-shift"): EMPTY,
    ("calc", "twist"): _obj({"n": {"type": "integer", "minimum": 1}, "spheres": {"type": "integer", "minimum": 1},
                             "first": _INT, "indices": _INT_LIST, "modulus": _MODULUS,
                             "word": {"oneOf": [{"type": "string"}, {"type": "array", "items": {"type": "string"}}]},
                             "target": _INT, "shift": _INT, "reference": _INT, "reference_shift": _INT,
                             "reduce": {"type": "boolean"}},
                            ["n", "spheres", "word", "target"]),
    ("calc", "signature"): EMPTY,
    ("calc", "verdict"): EMPTY,
    ("calc", "pl"): _obj({"n": {"type": "integer", "minimum": 1}, "lattice": _MATRIX,
                          "spheres": {"type": "integer", "minimum": 1}, "class": _INT, "vector": _INT_LIST,
                          "pair": {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2}},
                         ["n", "class"]),
    ("calc", "cpn"): _obj({"n": _INT, "profile": _INT_LIST, "h1_mod": _INT_LIST}, ["n", "profile"]),
    ("calc", "surface"): _obj({
        "genus": {"type": "integer", "minimum": 1}, "modulus": _MODULUS, "chi": _INT,
        "curves": {"type": "array", "items": _obj({"class": _INT_LIST, "rotation": _INT}, ["class", "rotation"])},
        "boundary": _INT_LIST,
        "twist": _obj({"along": _INT, "curve": _INT, "power": _INT}, ["along", "curve"]),
        "search": {"type": "boolean"}}, ["genus", "modulus", "curves"]),
    ("mono", "weighted"): _obj(WEIGHTED, ["weights", "beta"]),
    ("mono", "verdict"): _obj(dict(WEIGHTED, allow_n1={"type": "boolean"}), ["weights", "beta"]),
    ("mono", "geodesic"): _obj({"dim": _INT, "points": {"type": "array", "items": {
        "type": "array", "minItems": 2, "maxItems": 2, "items": _NUM}}}, ["dim", "points"]),
    ("mono", "table"): EMPTY,
    ("mono", "loop"): {"oneOf": [
        _obj({"path": LAGRANGIAN_PATH}, ["path"]),
        _obj({"multiplicities": {"type": "array", "items": _INT, "minItems": 1}}, ["multiplicities"]),
        _obj(WEIGHTED, ["weights", "beta"]),
    ]},
}

_HALF = {"oneOf": [_INT, {"type": "string", "pattern": r"^-?\d+/2$"}]}
_ZMOD = _obj({"mod": _MODULUS, "val": _INT}, ["mod", "val"])
_DIMS = {"type": "object", "patternProperties": {r"^-?\d+$": {"type": "integer", "minimum": 1}},
         "additionalProperties": False}
_LABEL = _obj({"sphere": _INT, "shift": _ZMOD}, ["sphere", "shift"])
_CROSSING = _obj({"t": _NUM, "kernel_dim": _INT, "signature": {"type": "array", "items": _INT},
                  "endpoint": {"type": "boolean"}}, ["t", "kernel_dim", "signature", "endpoint"])

OUTPUT_SCHEMAS = {
    ("maslov", "pair"): _obj({"mu": _HALF, "crossings": {"type": "array", "items": _CROSSING}}, ["mu", "crossings"]),
    ("maslov", "cz"): _obj({"cz": _HALF}, ["cz"]),
    ("maslov", "winding"): _obj({"winding": _NUM}, ["winding"]),
    ("cover", "lift"): _obj({"theta_end": _NUM, "times": {"type": "array", "items": _NUM},
                             "thetas": {"type": "array", "items": _NUM}}, ["theta_end", "times", "thetas"]),
    ("cover", "abs"): _obj({"index": _ZMOD}, ["index"]),
    ("cover", "abs-cz"): _obj({"index": _ZMOD}, ["index"]),
    ("cover", "handle"): _obj({"alpha_end": _HALF, "surgery_index": _ZMOD}, ["alpha_end", "surgery_index"]),
    ("cover", "dehn-shift"): _obj({"k": _INT}, ["k"]),
    ("calc", "twist"): _obj({"label": _LABEL, "hf": _DIMS}, ["label"]),
    ("calc", "signature"): _obj({"hf01": _DIMS, "hf12": _DIMS}, ["hf01", "hf12"]),
    ("calc", "verdict"): _obj({"verdict": {"enum": ["distinct", "indistinguishable"]}}, ["verdict"]),
    ("calc", "pl"): _obj({"image": _INT_LIST, "order": {"oneOf": [_INT, {"const": "inf"}]},
                          "g_squared_identity": {"type": "boolean"}}, ["order"]),
    ("calc", "cpn"): {"type": "object", "required": ["verdict"],
                      "properties": {"verdict": {"enum": ["admissible", "contradiction"]}}},
    ("calc", "surface"): {"type": "object", "required": ["rules"]},
    ("mono", "weighted"): _obj({"sigma": _INT}, ["sigma"]),
    ("mono", "verdict"): _obj({"verdict": {"enum": ["infinite-order", "inconclusive"]},
                               "weight_sum": {"type": "string"}}, ["verdict", "weight_sum"]),
    ("mono", "geodesic"): _obj({"sigma": _INT}, ["sigma"]),
    ("mono", "table"): {"type": "object", "additionalProperties": _obj(
        {"sigma": _INT, "witness": {"type": "array"}, "witness_sigma": _INT, "agrees": {"type": "boolean"}},
        ["sigma", "witness", "witness_sigma", "agrees"])},
    ("mono", "loop"): _obj({"sigma": _INT}, ["sigma"]),
}


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


def _modulus(v):
    return INF if v is None or v == "inf" else int(v)


def _mat(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise errors.DimensionMismatch("ragged matrix")
    return a


def lagrangian_path(d) -> LagrangianPath:
    if d["type"] == "exponential":
        return LagrangianPath.exponential(_mat(d["frame"]), _mat(d["generator"]), d.get("a", 0.0), d.get("b", 1.0))
    if d["type"] == "samples":
        return LagrangianPath.from_samples(d["times"], [_mat(f) for f in d["frames"]])
    segs = [(_mat(s["generator"]), s["duration"]) for s in d["segments"]]
    return LagrangianPath(_mat(d["frame"]), segs, d.get("start", 0.0))


def symplectic_path(d) -> SymplecticPath:
    if d["type"] == "exponential":
        init = _mat(d["initial"]) if "initial" in d else None
        return SymplecticPath.exponential(_mat(d["generator"]), d.get("a", 0.0), d.get("b", 1.0), init)
    return SymplecticPath.from_samples(d["times"], [_mat(m) for m in d["matrices"]])


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------


def _maslov_pair(p, a):
    l0, l1 = lagrangian_path(p["path0"]), lagrangian_path(p["path1"])
    mu = index.maslov_pair(l0, l1, self_check=a.self_check)
    try:
        cs = [c.to_json() for c in index.crossings(l0, l1)]
    except MaslovKitError:
        cs = []
    return {"mu": mu.to_json(), "crossings": cs}


def _maslov_cz(p, a):
    return {"cz": index.conley_zehnder(symplectic_path(p["path"]), self_check=a.self_check).to_json()}


def _maslov_winding(p, a):
    return {"winding": index.winding_det_sq(lagrangian_path(p["path"]))}


def _cover_lift(p, a):
    end, (ts, thetas) = covering.lift_path(lagrangian_path(p["path"]), p["theta_start"], _modulus(p.get("modulus")))
    return {"theta_end": end.theta, "times": [float(t) for t in ts], "thetas": [float(x) for x in thetas]}


def _cover_abs(p, a):
    N = _modulus(p.get("modulus"))
    L0 = covering.MaslovLift(_mat(p["lift0"]["frame"]), p["lift0"]["theta"], N)
    L1 = covering.MaslovLift(_mat(p["lift1"]["frame"]), p["lift1"]["theta"], N)
    return {"index": covering.abs_maslov(L0, L1, self_check=a.self_check).to_json()}


def _cover_abs_cz(p, a):
    N = _modulus(p.get("modulus"))
    if "matrix" in p:
        r = covering.abs_cz_graded(_mat(p["matrix"]), p["t"], N, self_check=a.self_check)
    else:
        r = covering.abs_cz(symplectic_path(p["path"]), p["k"], N, self_check=a.self_check)
    return {"index": r.to_json()}


def _cover_handle(p, a):
    n = _need(a, "n")
    _, _, end = covering.handle_grading(covering.HandleCurve.default(n, a.samples))
    L1, L2 = covering.handle_endpoint_lifts(n)
    return {"alpha_end": end.to_json(), "surgery_index": covering.abs_maslov(L1, L2).to_json()}


def _cover_dehn(p, a):
    return {"k": covering.dehn_local_shift(_need(a, "n"))}


def _calc_twist(p, a):
    cfg = gradedcalc.GradedConfig(p["n"], p["spheres"], p.get("first", 0), _modulus(p.get("modulus")),
                                  tuple(p.get("indices", ())))
    start = cfg.label(p["target"], p.get("shift", 0))
    label = gradedcalc.twist_word_apply(cfg, p["word"], start, reduce=p.get("reduce", False))
    out = {"label": label.to_json()}
    if "reference" in p:
        ref = cfg.label(p["reference"], p.get("reference_shift", 0))
        out["hf"] = gradedcalc.hf_labels(cfg, label, ref).to_json()
    return out


def _calc_signature(p, a):
    hf01, hf12 = gradedcalc.knotted_signature(_need(a, "family"), _need(a, "n"), _need(a, "k"))
    return {"hf01": hf01.to_json(), "hf12": hf12.to_json()}


def _calc_verdict(p, a):
    return {"verdict": gradedcalc.knotted_verdict(_need(a, "family"), _need(a, "n"), _need(a, "k"))}


def _calc_pl(p, a):
    n = p["n"]
    if "lattice" in p:
        Q = np.asarray(p["lattice"], dtype=np.int64)
        if Q.shape[0] != Q.shape[1] or not np.array_equal(Q, np.asarray(p["lattice"])):
            raise errors.InvalidConfig("lattice must be a square integer matrix")
    else:
        Q = gradedcalc.GradedConfig(n, p.get("spheres", 2)).homology()
    l = p["class"]
    if not 0 <= l < len(Q):
        raise errors.InvalidConfig("class index out of range")
    order = gradedcalc.pl_order(Q, l, n)
    out = {"order": "inf" if order == INF else int(order)}
    if "vector" in p:
        if len(p["vector"]) != len(Q):
            raise errors.InvalidConfig("vector length does not match the lattice")
        out["image"] = [int(x) for x in gradedcalc.picard_lefschetz(p["vector"], l, Q, n)]
    if "pair" in p:
        i, j = p["pair"]
        g2 = gradedcalc.pl_g_squared(Q, i, j, n)
        out["g_squared_identity"] = bool(np.array_equal(g2, np.eye(len(Q), dtype=np.int64)))
    return out


def _calc_cpn(p, a):
    return gradedcalc.cpn_check(p["n"], p["profile"], p.get("h1_mod", []))


def _calc_surface(p, a):
    N = _modulus(p["modulus"])
    curves = tuple((tuple(c["class"]), c["rotation"]) for c in p["curves"])
    data = gradedcalc.CurveData(p["genus"], N, curves, tuple(p.get("boundary", ())), p.get("chi", -1))
    out = {"rules": gradedcalc.surface_rules(data)}
    if "twist" in p:
        t = p["twist"]
        for key in ("along", "curve"):
            if not 0 <= t[key] < len(curves):
                raise errors.InvalidConfig(f"twist {key} index out of range")
        cL, RL = data.curves[t["along"]]
        cO, RO = data.curves[t["curve"]]
        cls, R = gradedcalc.surface_twist(cL, RL, cO, RO, N, t.get("power", 1))
        out["twist"] = {"class": list(cls), "rotation": symcore.ZModN(R, N).to_json()}
    if p.get("search", False):
        out["search"] = gradedcalc.surface_ungradable_search(data)
    return out


def _poly(p):
    return monodromy.WeightedPoly(tuple(p["weights"]), p["beta"], tuple(tuple(m) for m in p.get("monomials", ())))


def _mono_weighted(p, a):
    return {"sigma": monodromy.sigma_weighted(_poly(p))}


def _mono_verdict(p, a):
    poly = _poly(p)
    return {"verdict": monodromy.monodromy_verdict(poly, p.get("allow_n1", False)), "weight_sum": str(poly.weight_sum)}


def _mono_geodesic(p, a):
    d = monodromy.ConjugatePointData(p["dim"], tuple((t, int(m)) for t, m in p["points"]))
    return {"sigma": monodromy.sigma_geodesic(d)}


def _mono_table(p, a):
    return monodromy.symmetric_space_table(_need(a, "m"))


def _mono_loop(p, a):
    if "path" in p:
        loop = lagrangian_path(p["path"])
    elif "multiplicities" in p:
        loop = monodromy.diagonal_loop(p["multiplicities"])
    else:
        loop = monodromy.weighted_loop(_poly(p))
    return {"sigma": monodromy.sigma_from_loop(loop)}


HANDLERS = {
    ("maslov", "pair"): _maslov_pair,
    ("maslov", "cz"): _maslov_cz,
    ("maslov", "winding"): _maslov_winding,
    ("cover", "lift"): _cover_lift,
    ("cover", "abs"): _cover_abs,
    ("cover", "abs-cz"): _cover_abs_cz,
    ("cover", "handle"): _cover_handle,
    ("cover", "dehn-shift"): _cover_dehn,
    ("calc", "twist"): _calc_twist,
    ("calc", "signature"): _calc_signature,
    ("calc", "verdict"): _calc_verdict,
    ("calc", "pl"): _calc_pl,
    ("calc", "cpn"): _calc_cpn,
    ("calc", "surface"): _calc_surface,
    ("mono", "weighted"): _mono_weighted,
    ("mono", "verdict"): _mono_verdict,
    ("mono", "geodesic"): _mono_geodesic,
    ("mono", "table"): _mono_table,
    ("mono", "loop"): _mono_loop,
}

FLAGS = {
    ("cover", "handle"): ("n", "samples"),
    ("cover", "dehn-shift"): ("n",),
    ("calc", "signature"): ("family", "n", "k"),
    ("calc", "verdict"): ("family", "n", "k"),
    ("mono", "table"): ("m",),
}


def _need(args, name):
    v = getattr(args, name, None)
    if v is None:
        raise SchemaError(f"--{name} is required")
    return v


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="maslovkit", description="Maslov-index and graded-Lagrangian computations")
    parser.add_argument("--tol", type=float, help="override frame and phase tolerances")
    parser.add_argument("--self-check", action="store_true",
                        help="also run the eigenvalue-winding computation and fail on disagreement")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    by_group: dict[str, list[str]] = {}
    for g, c in HANDLERS:
        by_group.setdefault(g, []).append(c)
    for g, cmds in by_group.items():
        gp = groups.add_parser(g)
        sub = gp.add_subparsers(dest="command", required=True, parser_class=_Parser)
        for c in cmds:
            cp = sub.add_parser(c)
            for flag in FLAGS.get((g, c), ()):
                if flag == "family":
                    cp.add_argument("--family", choices=gradedcalc.FAMILIES)
                elif flag == "samples":
                    cp.add_argument("--samples", type=int, default=2048)
                else:
                    cp.add_argument(f"--{flag}", type=int)
    return parser


def _read_payload(stream) -> dict:
    text = "" if stream is None or stream.isatty() else stream.read()
    if not text.strip():
        return {}
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None


def run(argv=None, stdin=None, stdout=None) -> int:
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout

    def emit(obj):
        stdout.write(json.dumps(obj, sort_keys=True) + "\n")

    try:
        args = build_parser().parse_args(argv)
        key = (args.group, args.command)
        payload = _read_payload(stdin)
        try:
            jsonschema.validate(payload, INPUT_SCHEMAS[key])
        except jsonschema.ValidationError as exc:
            raise SchemaError(exc.message) from None
        overrides = {}
        if args.tol is not None:
            if not args.tol > 0:
                raise SchemaError("--tol must be positive")
            overrides = {"frame": args.tol, "phase": args.tol}
        with symcore.override_tolerances(**overrides):
            result = HANDLERS[key](payload, args)
    except SchemaError as exc:
        emit({"error": "SchemaError", "detail": str(exc)})
        return 1
    except (MaslovKitError, ValueError, np.linalg.LinAlgError) as exc:
        emit({"error": type(exc).__name__, "detail": str(exc)})
        return 2
    emit(result)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
