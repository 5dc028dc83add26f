"""Command-line front end.

Every command prints one JSON document with a top-level ``"schema": "1"``.
Exit codes: 0 success, 1 bad input, 2 closure budget exhausted, 3 resource
guard tripped.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import bohr
from .errors import InputError, ResourceError
from .extensions import (
    Budget,
    PExponent,
    complete,
    distance,
    distance_layers,
    extend,
    is_contractive_projection_set,
    reflections,
)
from .fixtures import fixture_ids, verify_examples
from .indices import freqset
from .lattice import affine_lattice, enumerate_orthant
from .numerics import (
    GridSpec,
    lp_norm_estimate,
    plane_sup_value,
    tn_growth_table,
    verify_inf_lemma,
    verify_line_lemma,
    verify_plane_lemma,
)
from .polyoracle import witness_search_even

SCHEMA = "1"
EXIT_OK, EXIT_INPUT, EXIT_EXHAUSTED, EXIT_RESOURCE = 0, 1, 2, 3


def _need(req: dict, key: str):
    if req.get(key) is None:
        raise InputError(f"missing required field {key!r}")
    return req[key]


def _set(req: dict):
    raw = _need(req, "set")
    if isinstance(raw, str):
        raw = _json_arg(raw, "set")
    if not isinstance(raw, list) or not raw or not all(isinstance(p, list) for p in raw):
        raise InputError("set must be a nonempty list of integer lists")
    return freqset(raw)


def _json_arg(text: str, name: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"--{name}: invalid JSON ({exc.msg})") from None


def _vec(req: dict, key: str) -> List[int]:
    raw = _need(req, key)
    if isinstance(raw, str):
        raw = _json_arg(raw, key)
    if not isinstance(raw, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in raw):
        raise InputError(f"{key} must be a list of integers")
    return raw


def _p(req: dict) -> PExponent:
    return PExponent.parse(str(_need(req, "p")))


def _int(req: dict, key: str, default: Optional[int] = None) -> int:
    v = req.get(key, default)
    if v is None:
        raise InputError(f"missing required field {key!r}")
    if isinstance(v, bool) or not isinstance(v, int):
        try:
            v = int(v)
        except (TypeError, ValueError):
            raise InputError(f"{key} must be an integer") from None
    return v


def _float(req: dict, key: str, default: float) -> float:
    try:
        return float(req.get(key, default) if req.get(key) is not None else default)
    except (TypeError, ValueError):
        raise InputError(f"{key} must be a number") from None


# ---------------------------------------------------------------------------
# Commands: each returns (exit code, payload)
# ---------------------------------------------------------------------------

def cmd_classify(req):
    v = is_contractive_projection_set(_set(req).require_orthant(), _p(req))
    return EXIT_OK, {**v.to_json(), "p": str(_p(req))}


def cmd_extend(req):
    return EXIT_OK, {"n": _int(req, "n"), "set": extend(_set(req).require_orthant(), _int(req, "n")).to_list()}


def cmd_distance(req):
    d = distance(_set(req), _vec(req, "lam"), max_n=_int(req, "max_n", 64))
    return EXIT_OK, {"lam": _vec(req, "lam"), "distance": d}


def cmd_complete(req):
    budget = Budget(_int(req, "max_rounds", 16), _int(req, "max_coord", 128), _int(req, "max_points", 20_000))
    r = complete(_set(req).require_orthant(), _int(req, "n"), budget)
    doc = r.to_json()
    if r.tag == "FullCoset" and r.coset is not None:
        doc["coset"] = r.coset.to_json()
    return (EXIT_EXHAUSTED if r.tag == "Exhausted" else EXIT_OK), doc


def cmd_coset(req):
    gamma = _set(req)
    lat = affine_lattice(gamma)
    cap = req.get("cap")
    res = enumerate_orthant(lat, cap=None if cap is None else _int(req, "cap"))
    return EXIT_OK, {"lattice": lat.to_json(), "enumeration": res.to_json()}


def cmd_witness(req):
    gamma = _set(req).require_orthant()
    n = _int(req, "n")
    if req.get("lam") is not None:
        lam = _vec(req, "lam")
    else:
        grown = extend(gamma, n).difference(gamma)
        if not grown:
            raise InputError(f"extend(set, {n}) adds nothing, so no witness exists at p={2 * (n + 1)}")
        lam = list(grown[0])
    w = witness_search_even(gamma, n, lam)
    if w is None:
        return EXIT_OK, {"found": False, "lam": lam}
    doc = {"found": True, **w.to_json()}
    est_h = lp_norm_estimate(w.h, w.p, GridSpec(_grid_size(w.h, w.p), w.h.dim))
    est_f = lp_norm_estimate(w.f, w.p, GridSpec(_grid_size(w.f, w.p), w.f.dim))
    doc["quadrature"] = {"norm_h": est_h.value, "norm_pf": est_f.value}
    return EXIT_OK, doc


def _grid_size(f, p: int) -> int:
    lo, hi = f.degree_bounds()
    span = max(h - l for h, l in zip(hi, lo)) + 1
    n = 8
    while n <= (p // 2) * span:
        n *= 2
    return n


def cmd_lemma_line(req):
    p, eps = _p(req), _float(req, "eps", 1e-2)
    return EXIT_OK, {"p": str(p), "eps": eps, "holds": verify_line_lemma(p, eps)}


def cmd_lemma_plane(req):
    p, eps = _p(req), _float(req, "eps", 1e-2)
    doc = {"p": str(p), "eps": eps, "holds": verify_plane_lemma(p, eps)}
    if p.is_inf:
        doc["sup_left"] = plane_sup_value()
        doc["sup_right"] = 3.0
    return EXIT_OK, doc


def cmd_lemma_inf(req):
    alpha, eps = _vec(req, "alpha"), _float(req, "eps", 1e-2)
    return EXIT_OK, {"alpha": alpha, "eps": eps, "holds": verify_inf_lemma(alpha, eps), "right": 2 * len(alpha)}


def figure_data(gamma, max_distance: int, box: int) -> dict:
    """Lattice points within ``box`` (sup norm) and their distance to ``gamma``."""
    gamma = freqset(gamma)
    lat = affine_lattice(gamma)
    layers = distance_layers(gamma, max_distance)
    linear = set(reflections(gamma, "linear"))
    triangular = set(reflections(gamma, "triangular"))
    rows = []
    for pt, d in sorted(layers.items(), key=lambda kv: (kv[1], kv[0])):
        if max(abs(x) for x in pt) > box:
            continue
        row: Dict[str, Any] = {"lam": list(pt), "distance": d, "in_orthant": min(pt) >= 0}
        if lat.rank == 2:
            row["projected"] = [pt[i] for i in lat.pivots]
        kinds = [k for k, s in (("linear", linear), ("triangular", triangular)) if pt in s]
        if kinds:
            row["reflection"] = kinds
        rows.append(row)
    return {"rank": lat.rank, "projection_axes": list(lat.pivots) if lat.rank == 2 else None, "points": rows}


def cmd_figure_data(req):
    return EXIT_OK, figure_data(_set(req), _int(req, "max_distance", 2), _int(req, "box", 10))


def cmd_growth(req):
    m_max = req.get("m_max")
    table = tn_growth_table(_int(req, "n"), _p(req), None if m_max is None else _int(req, "m_max"))
    return EXIT_OK, table.to_json(every=_int(req, "every", 1))


def cmd_dirichlet(req):
    action = _need(req, "action")
    if action == "lift":
        q = Fraction(str(_need(req, "q")))
        return EXIT_OK, {"q": str(q), "lift": list(bohr.bohr_lift(q))}
    if action == "omega":
        n = _int(req, "q")
        return EXIT_OK, {"q": n, "omega": bohr.omega(n)}
    if action == "project":
        raw = _need(req, "poly")
        if isinstance(raw, str):
            raw = _json_arg(raw, "poly")
        f = bohr.DirichletPoly({int(n): Fraction(str(c)) for n, c in raw})
        return EXIT_OK, {"m": _int(req, "m"), "poly": bohr.omega_projection(f, _int(req, "m")).to_json()}
    if action == "classify":
        raw = _need(req, "set")
        if isinstance(raw, str):
            raw = _json_arg(raw, "set")
        if not isinstance(raw, list) or not all(isinstance(x, int) for x in raw):
            raise InputError("set must be a list of positive integers")
        v = bohr.classify_dirichlet_set(raw, _p(req))
        return EXIT_OK, {**v.to_json(), "p": str(_p(req))}
    raise InputError(f"unknown dirichlet action {action!r}")


def cmd_verify_examples(req):
    only = req.get("only")
    ids = None if not only else (only if isinstance(only, list) else str(only).split(","))
    known = set(fixture_ids())
    if ids is not None and not set(ids) <= known:
        raise InputError(f"unknown fixture ids: {sorted(set(ids) - known)}")
    results = verify_examples(ids)
    by_fixture: Dict[str, bool] = {}
    for r in results:
        by_fixture[r.fixture] = by_fixture.get(r.fixture, True) and r.passed
    return EXIT_OK, {
        "passed": all(r.passed for r in results),
        "fixtures": [{"id": k, "passed": v} for k, v in by_fixture.items()],
        "checks": [r.to_json() for r in results],
    }


COMMANDS = {
    "classify": cmd_classify,
    "extend": cmd_extend,
    "distance": cmd_distance,
    "complete": cmd_complete,
    "coset": cmd_coset,
    "witness": cmd_witness,
    "lemma-line": cmd_lemma_line,
    "lemma-plane": cmd_lemma_plane,
    "lemma-inf": cmd_lemma_inf,
    "figure-data": cmd_figure_data,
    "growth": cmd_growth,
    "dirichlet": cmd_dirichlet,
    "verify-examples": cmd_verify_examples,
}


def run(request: dict) -> Tuple[int, dict]:
    """Execute one request; never raises for bad input."""
    command = request.get("command")
    head = {"schema": SCHEMA, "command": command}
    try:
        if command not in COMMANDS:
            raise InputError(f"unknown command {command!r}")
        code, payload = COMMANDS[command](request)
    except (InputError, OverflowError) as exc:
        return EXIT_INPUT, {**head, "error": str(exc), "kind": "input"}
    except ResourceError as exc:
        return EXIT_RESOURCE, {**head, "error": str(exc), "kind": "resource"}
    return code, {**head, **payload}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conetract", description="Contractive idempotent multipliers on Hardy spaces of the torus.")
    ap.add_argument("--json", dest="json_in", metavar="FILE", help="read the whole request as JSON ('-' for stdin)")
    ap.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
    sub = ap.add_subparsers(dest="command")

    def add(name, help_text, *fields):
        sp = sub.add_parser(name, help=help_text)
        for flag, kw in fields:
            sp.add_argument(flag, **kw)
        return sp

    s = ("--set", {"help": "JSON list of integer lists"})
    p = ("--p", {"help": "exponent: integer, fraction or 'inf'"})
    n = ("--n", {"type": int})
    lam = ("--lam", {"help": "JSON integer list"})
    eps = ("--eps", {"type": float})
    add("classify", "decide contractivity of P_G on H^p", s, p)
    add("extend", "n-extension of a set", s, n)
    add("distance", "distance from the set to a lattice point", s, lam, ("--max-n", {"type": int, "dest": "max_n"}))
    add("complete", "iterate n-extensions to a completion", s, n,
        ("--max-rounds", {"type": int, "dest": "max_rounds"}),
        ("--max-coord", {"type": int, "dest": "max_coord"}),
        ("--max-points", {"type": int, "dest": "max_points"}))
    add("coset", "coset lattice and its orthant points", s, ("--cap", {"type": int}))
    add("witness", "exact non-contractivity witness for p = 2(n+1)", s, n, lam)
    add("lemma-line", "one-variable perturbation inequality", p, eps)
    add("lemma-plane", "two-variable perturbation inequality", p, eps)
    add("lemma-inf", "sup-norm perturbation inequality", ("--alpha", {}), eps)
    add("figure-data", "lattice points with distances for plotting", s,
        ("--max-distance", {"type": int, "dest": "max_distance"}), ("--box", {"type": int}))
    add("growth", "norm growth lower bounds", n, p, ("--m-max", {"type": int, "dest": "m_max"}),
        ("--every", {"type": int}))
    dp = add("dirichlet", "Dirichlet-series frequency sets", ("action", {"choices": ["lift", "omega", "project", "classify"]}),
             ("--q", {}), ("--set", {}), p, ("--poly", {}), ("--m", {"type": int}))
    dp.set_defaults()
    add("verify-examples", "run the bundled example corpus", ("--only", {"help": "comma-separated fixture ids"}))
    return ap


def _request_from_args(ns: argparse.Namespace) -> dict:
    if ns.json_in:
        text = sys.stdin.read() if ns.json_in == "-" else open(ns.json_in).read()
        try:
            req = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"request is not valid JSON: {exc.msg}") from None
        if not isinstance(req, dict):
            raise InputError("request must be a JSON object")
        if ns.command and "command" not in req:
            req["command"] = ns.command
        return req
    return {k: v for k, v in vars(ns).items() if k not in ("json_in", "output") and v is not None}


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        req = _request_from_args(ns)
    except (InputError, OSError) as exc:
        code, doc = EXIT_INPUT, {"schema": SCHEMA, "error": str(exc), "kind": "input"}
    else:
        if not req.get("command"):
            ap.print_help(sys.stderr)
            return EXIT_INPUT
        code, doc = run(req)
    text = json.dumps(doc)
    if ns.output == "-":
        print(text)
    else:
        with open(ns.output, "w") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
