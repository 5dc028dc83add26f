"""Regression corpus of worked examples, stored as one JSON document per example.

Each document has an ``id``, a ``title`` and a list of ``checks``.  A check
names an operation, its arguments, the expected output and a ``basis`` tag
(``worked-example``, ``derived`` or ``trivial``) saying where the expectation
comes from.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Any, Callable, Dict, List, Optional, Sequence

from ..bohr import classify_dirichlet_set
from ..extensions import (
    PExponent,
    complete,
    distance,
    distance_layers,
    extend,
    find_positive_direction,
    is_contractive_projection_set,
    reflections,
    restriction_property,
)
from ..laurent import LaurentPoly
from ..lattice import (
    affine_lattice,
    annihilator,
    annihilator_average,
    enumerate_orthant,
    lattice_from_generators,
    reflection_gcd,
)
from ..numerics import (
    plane_sup_value,
    quadratic_coefficient_check,
    verify_inf_lemma,
    verify_line_lemma,
    verify_plane_lemma,
)
from ..polyoracle import witness_search_even


def fixture_ids() -> List[str]:
    files = resources.files(__name__).iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def load_fixture(fid: str) -> dict:
    return json.loads(resources.files(__name__).joinpath(f"{fid}.json").read_text())


def _pts(xs) -> List[tuple]:
    return sorted(tuple(x) for x in xs)


def _tol(got: float, exp: dict) -> bool:
    return abs(got - exp["value"]) <= exp["tol"]


def _projected(gamma, pts):
    lat = affine_lattice(gamma)
    piv = lat.pivots
    return sorted(tuple(p[i] for i in piv) for p in pts)


def _op_extend(a, e):
    got = extend(a["set"], a["n"]).points
    return got == tuple(_pts(e)), got


def _op_extend_contains(a, e):
    got = tuple(a["lam"]) in extend(a["set"], a["n"])
    return got == e, got


def _op_enumerate(a, e):
    res = enumerate_orthant(affine_lattice(a["set"]))
    return res.tag == e["tag"] and list(res.points) == _pts(e["points"]), res.to_json()


def _op_distance(a, e):
    got = distance(a["set"], a["lam"])
    return got == e, got


def _op_classify(a, e):
    v = is_contractive_projection_set(a["set"], PExponent.parse(a["p"]))
    ok = v.contractive == e["contractive"]
    if "evidence" in e:
        ok = ok and v.evidence == tuple(e["evidence"])
    return ok, v.to_json()


def _op_complete(a, e):
    r = complete(a["set"], a["n"])
    ok = r.tag == e["tag"]
    if "set" in e:
        ok = ok and list(r.set.points) == _pts(e["set"])
    if "pair_difference" in e:
        ok = ok and r.pair is not None and tuple(b - x for x, b in zip(*r.pair)) == tuple(e["pair_difference"])
    return ok, r.to_json()


def _op_witness(a, e):
    w = witness_search_even(a["set"], a["n"], a["lam"])
    got = w is not None and w.ratio_p > 1
    return got == e["ratio_gt_one"], None if w is None else w.to_json()


def _op_fpd(a, e):
    got = find_positive_direction(a["set"], a["alpha"], a["n"])
    return got == tuple(e), got


def _op_figure_points(a, e):
    layers = distance_layers(a["set"], a["distance"])
    pts = [p for p, d in layers.items() if d == a["distance"] and max(abs(x) for x in p) <= a["box"]]
    got = _projected(a["set"], pts)
    return got == _pts(e), got


def _op_reflections(a, e):
    got = _projected(a["set"], reflections(a["set"], a["kind"]))
    return got == _pts(e), got


def _op_annihilator(a, e):
    dec = annihilator(lattice_from_generators(a["base"], a["basis"]))
    got = {"finite_part": [[k, list(g)] for k, g in dec.finite_part], "torus_rank": dec.torus_rank}
    return got == e, got


def _op_annihilator_average(a, e):
    dim = len(a["translate"])
    dec = annihilator(lattice_from_generators(a["base"], a["basis"]))
    f = LaurentPoly.from_json(dim, a["f"])
    got = annihilator_average(dec, a["translate"], f)
    return got == LaurentPoly.from_json(dim, e), got.to_json()


def _op_reflection_gcd(a, e):
    g, trace = reflection_gcd(a["a"], a["b"])
    got = {"g": g, "trace": [list(t) for t in trace]}
    return got == e, got


def _op_restriction(a, e):
    got = restriction_property(a["d"], a["k"], PExponent.parse(a["p"]))
    return got == e, got


def _op_lemma_line(a, e):
    got = verify_line_lemma(PExponent.parse(a["p"]), a["eps"])
    return got == e, got


def _op_lemma_plane(a, e):
    got = verify_plane_lemma(PExponent.parse(a["p"]), a["eps"])
    return got == e, got


def _op_lemma_inf(a, e):
    got = verify_inf_lemma(a["alpha"], a["eps"])
    return got == e, got


def _op_plane_sup(a, e):
    got = plane_sup_value(a["n"])
    return _tol(got, e), got


def _op_quadratic(a, e):
    fitted, predicted = quadratic_coefficient_check(PExponent.parse(a["p"]), a["c"])
    return _tol(fitted, e) and abs(predicted - e["value"]) < 1e-12, [fitted, predicted]


def _op_dirichlet(a, e):
    v = classify_dirichlet_set(a["set"], PExponent.parse(a["p"]))
    ok = v.contractive == e["contractive"] and ("evidence" not in e or v.evidence == e["evidence"])
    return ok, v.to_json()


OPS: Dict[str, Callable[[dict, Any], tuple]] = {
    "extend": _op_extend,
    "extend_contains": _op_extend_contains,
    "enumerate": _op_enumerate,
    "distance": _op_distance,
    "classify": _op_classify,
    "complete": _op_complete,
    "witness": _op_witness,
    "find_positive_direction": _op_fpd,
    "figure_points": _op_figure_points,
    "reflections": _op_reflections,
    "annihilator": _op_annihilator,
    "annihilator_average": _op_annihilator_average,
    "reflection_gcd": _op_reflection_gcd,
    "restriction_property": _op_restriction,
    "lemma_line": _op_lemma_line,
    "lemma_plane": _op_lemma_plane,
    "lemma_inf": _op_lemma_inf,
    "plane_sup": _op_plane_sup,
    "quadratic_coefficient": _op_quadratic,
    "dirichlet_classify": _op_dirichlet,
}


@dataclass(frozen=True)
class CheckOutcome:
    fixture: str
    index: int
    op: str
    passed: bool
    got: Any

    def to_json(self) -> dict:
        got = self.got
        if isinstance(got, tuple):
            got = list(got)
        return {"fixture": self.fixture, "index": self.index, "op": self.op,
                "passed": self.passed, "got": _jsonable(got)}


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, Fraction):
        return str(x)
    return x


def run_fixture(fid: str) -> List[CheckOutcome]:
    doc = load_fixture(fid)
    out = []
    for i, chk in enumerate(doc["checks"]):
        ok, got = OPS[chk["op"]](chk["args"], chk["expect"])
        out.append(CheckOutcome(fid, i, chk["op"], bool(ok), got))
    return out


def verify_examples(ids: Optional[Sequence[str]] = None) -> List[CheckOutcome]:
    """Run every check of the selected fixtures (all by default) in a fixed order."""
    chosen = fixture_ids() if ids is None else list(ids)
    results: List[CheckOutcome] = []
    for fid in chosen:
        results.extend(run_fixture(fid))
    return results
