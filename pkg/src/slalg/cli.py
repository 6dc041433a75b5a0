"""Command-line front end: slalg <command> [options].

Exit status: 0 on success, 1 when a result is mathematically undetermined
(or a scenario does not match), 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources

import mpmath

from . import approxid, spectra
from .algebra import Element, convolve, format_coef, norm
from .arens import (
    LimitConfig,
    SequenceSpec,
    arens_pairing,
    classify,
    craw_young_witness,
    dtc_demo,
    iterated_limit,
    omega_fn,
    omega_kernel,
    zero_cluster_test,
)
from .core import PreconditionError, SlalgError, Truncation, format_point, normalize, semigroup
from .functionals import (
    Indicator,
    SetSpec,
    compactness_probe,
    e_omega_membership,
    functional_from_json,
    interval_from_json,
    non_submodule_witness,
)
from .weights import Interval, parse_weight

EXIT_OK, EXIT_UNDETERMINED, EXIT_INPUT = 0, 1, 2

_BARE_RATIONAL = re.compile(r'(?<!["\w/])(-?\d+/\d+)(?!["\w/])')


class InputError(SlalgError):
    pass


class Undetermined(Exception):
    """Carries a JSON payload whose verdict is undetermined."""

    def __init__(self, payload):
        self.payload = payload
        super().__init__("undetermined")


def loads_lenient(text: str):
    """JSON that also accepts bare rationals such as [[5,1/5]]."""
    try:
        return json.loads(_BARE_RATIONAL.sub(r'"\1"', text))
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot parse {text!r}: {exc.msg}") from None


def parse_element(sg, text) -> Element:
    data = loads_lenient(text) if isinstance(text, str) else text
    if isinstance(data, dict):
        return Element.from_json(data)
    try:
        return Element.from_terms(sg, [(normalize(p), Fraction(c)) for p, c in data])
    except (TypeError, ValueError) as exc:
        raise InputError(f"expected a list of [point, coefficient] pairs: {exc}") from None


def terms_json(a: Element) -> list:
    return [[format_point(s), format_coef(c)] for s, c in a.terms]


_SHORT = {
    "evens": lambda: SequenceSpec.arith(2, 2),
    "odds": lambda: SequenceSpec.arith(1, 2),
    "naturals": lambda: SequenceSpec.arith(1, 1),
}


def parse_sequence(text) -> SequenceSpec:
    """evens | odds | naturals | kind:args (arith:1,1  enum-le:1  rationals-in:0,1) | JSON."""
    if isinstance(text, dict):
        return SequenceSpec.from_json(text)
    text = text.strip()
    if text.startswith("{"):
        return SequenceSpec.from_json(loads_lenient(text))
    if text in _SHORT:
        return _SHORT[text]()
    kind, _, rest = text.partition(":")
    args = [normalize(x) for x in rest.split(",") if x.strip()]
    try:
        if kind == "explicit":
            return SequenceSpec.explicit(args)
        return SequenceSpec(kind, tuple(args))
    except (SlalgError, IndexError, ValueError) as exc:
        raise InputError(f"bad sequence {text!r}: {exc}") from None


def parse_functional(text):
    if isinstance(text, dict):
        return functional_from_json(text)
    return functional_from_json(loads_lenient(text))


def parse_set(text):
    if isinstance(text, dict):
        return SetSpec.from_json(text)
    text = text.strip()
    if text in ("even", "odd", "evens", "odds"):
        return SetSpec.parity(text.rstrip("s"))
    m = re.fullmatch(r"([\[(])\s*(\S+)\s*,\s*(\S+)\s*([\])])", text)
    if m:
        lo = None if m.group(2) in ("-inf",) else Fraction(m.group(2))
        hi = None if m.group(3) in ("inf", "+inf") else Fraction(m.group(3))
        return SetSpec.interval(Interval(lo, hi, m.group(1) == "[" and lo is not None, m.group(4) == "]" and hi is not None))
    data = loads_lenient(text)
    if isinstance(data, list):
        return SetSpec.finite(data)
    if "interval" in data and data.get("kind") == "interval":
        return SetSpec.interval(interval_from_json(data["interval"]))
    return SetSpec.from_json(data)


def _cfg(args) -> LimitConfig:
    depth = getattr(args, "depth", None) or 1000
    return LimitConfig(
        inner_depth=getattr(args, "inner_depth", None) or depth,
        outer_depth=getattr(args, "outer_depth", None) or depth,
        tolerance=getattr(args, "tolerance", None) or 1e-6,
        tail_window=getattr(args, "tail_window", None) or 8,
    )


# ---------------------------------------------------------------------------
# operations shared by commands and scenarios


def op_classify(sg, w, p):
    return classify(w).to_json()


def op_zero_cluster(sg, w, p):
    res = zero_cluster_test(w, LimitConfig.from_json(p.get("cfg", {})))
    out = res.to_json()
    if res.clusters_zero == "undetermined" or res.witness_ok is False:
        raise Undetermined(out)
    return out


def op_convolve(sg, w, p):
    return {"result": terms_json(convolve(parse_element(sg, p["a"]), parse_element(sg, p["b"])))}


def op_norm(sg, w, p):
    return {"norm": format_coef(norm(parse_element(sg, p["a"]), w))}


def op_omega(sg, w, p):
    if "s" in p:
        return {"omega": format_coef(omega_fn(normalize(p["s"]), normalize(p["t"]), w))}
    cfg = LimitConfig.from_json(p.get("cfg", {}))
    box, diamond = iterated_limit(omega_kernel(w), parse_sequence(p["outer"]), parse_sequence(p["inner"]), sg, w, cfg)
    out = {"box": box.to_json(), "diamond": diamond.to_json()}
    if not (box.determined and diamond.determined):
        raise Undetermined(out)
    return out


def op_pairing(sg, w, p):
    cfg = LimitConfig.from_json(p.get("cfg", {}))
    box, diamond = arens_pairing(
        parse_sequence(p["outer"]), parse_sequence(p["inner"]), parse_functional(p["functional"]), w, cfg
    )
    out = {"box": box.to_json(), "diamond": diamond.to_json()}
    if not (box.determined and diamond.determined):
        raise Undetermined(out)
    return out


def op_submodule(sg, w, p):
    l = parse_functional(p["functional"]) if "functional" in p else None
    rep = non_submodule_witness(
        sg, w, parse_set(p["U"]), normalize(p["t"]), normalize(p["u"]), int(p.get("n_max", 100)), l
    )
    out = rep.to_json()
    out["pairings_all_zero"] = all(v == 0 for v in rep.pairings)
    out["products_min"] = format_coef(min(rep.products))
    out["products_max"] = format_coef(max(rep.products))
    del out["pairings"], out["products"]
    return out


def op_craw_young(sg, w, p):
    res = craw_young_witness(
        w,
        parse_sequence(p.get("s", "naturals")),
        parse_sequence(p.get("t", "naturals")),
        Fraction(p.get("eps", "1/2")),
        int(p.get("k", 12)),
        int(p.get("window", 2000)),
    )
    out = res.to_json()
    if res.status != "ok":
        raise Undetermined(out)
    return out


def op_membership(sg, w, p):
    out = e_omega_membership(parse_functional(p["functional"]), w).to_json()
    if out["status"] == "undetermined":
        raise Undetermined(out)
    return out


def op_compactness(sg, w, p):
    window = Truncation.range(sg, 1, int(p.get("window", 1000)))
    return compactness_probe(normalize(p["x"]), w, window, Fraction(p.get("eps", "1/100"))).to_json()


def op_ai(sg, w, p):
    rep = approxid.build_ai(w)
    tests = [parse_element(sg, t) for t in p.get("tests", [])]
    approxid.verify_ai(rep, tests, int(p.get("depth", 20)))
    out = rep.to_json()
    out["points"] = [format_point(s) for s in rep.points(int(p.get("depth", 20)))]
    return out


def op_identity(sg, w, p):
    if "truncation" in p:
        lo, hi = p["truncation"]
        return approxid.identity_check(Truncation.range(sg, lo, hi)).to_json()
    return approxid.identity_check(sg).to_json()


def op_gelfand(sg, w, p):
    a = parse_element(sg, p["a"])
    return {"gelfand": spectra.gelfand_json(spectra.gelfand(a, int(p.get("K", 10))))}


def op_chars(sg, w, p):
    lo, hi = p.get("truncation", [1, int(p.get("size", 5))])
    chars = spectra.enumerate_characters(Truncation.range(sg, lo, hi), w)
    return {"count": len(chars), "thresholds": [format_point(c.threshold) for c in chars]}


def op_density(sg, w, p):
    rep = spectra.predual_density_approx(parse_functional(p["functional"]), w, int(p["n"]))
    return rep.to_json()


def op_dtc(sg, w, p):
    f = parse_element(sg, p.get("f", "[[2,1],[5,1]]"))
    rep = dtc_demo(w, parse_sequence(p.get("a_seq", "evens")), parse_sequence(p.get("b_seq", "odds")), f)
    out = rep.to_json()
    out["absorbed"] = all(ok for _, ok in rep.absorption)
    del out["absorption"]
    if rep.status == "undetermined":
        raise Undetermined(out)
    return out


OPERATIONS = {
    "classify": op_classify,
    "zero-cluster": op_zero_cluster,
    "convolve": op_convolve,
    "norm": op_norm,
    "omega": op_omega,
    "pairing": op_pairing,
    "submodule": op_submodule,
    "craw-young": op_craw_young,
    "membership": op_membership,
    "compactness": op_compactness,
    "ai": op_ai,
    "identity": op_identity,
    "gelfand": op_gelfand,
    "chars": op_chars,
    "density": op_density,
    "dtc": op_dtc,
}


def run_operation(sg_name: str, weight: str | None, name: str, params: dict):
    """(status, payload) where status is "ok", "undetermined" or "error"."""
    sg = semigroup(sg_name)
    w = parse_weight(weight, sg) if weight is not None else None
    try:
        return "ok", OPERATIONS[name](sg, w, params)
    except Undetermined as exc:
        return "undetermined", exc.payload
    except PreconditionError as exc:
        return "error", {"error": "precondition", "message": str(exc)}


# ---------------------------------------------------------------------------
# scenarios


def load_scenarios(path: str | None = None) -> list:
    if path is None:
        text = resources.files("slalg").joinpath("data/scenarios.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    scenarios = json.loads(text)
    names = [s["name"] for s in scenarios]
    if len(set(names)) != len(names):
        raise InputError("scenario names must be unique")
    return scenarios


def subset_match(expected, actual) -> bool:
    """Every key of `expected` appears in `actual` with a matching value."""
    if isinstance(expected, dict):
        return isinstance(actual, dict) and all(k in actual and subset_match(v, actual[k]) for k, v in expected.items())
    if isinstance(expected, list):
        return isinstance(actual, list) and len(expected) == len(actual) and all(
            subset_match(e, a) for e, a in zip(expected, actual)
        )
    return expected == actual


def run_scenario(sc: dict) -> dict:
    results, passed = [], True
    for step in sc["operations"]:
        try:
            status, payload = run_operation(sc["semigroup"], sc.get("weight"), step["op"], step.get("params", {}))
        except SlalgError as exc:
            status, payload = "error", {"error": type(exc).__name__, "message": str(exc)}
        ok = status == step.get("status", "ok") and subset_match(step.get("expect", {}), payload)
        passed &= ok
        results.append({"op": step["op"], "status": status, "pass": ok, "output": payload})
    return {"name": sc["name"], "pass": passed, "results": results}


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p, weight=True, weight_required=True):
    p.add_argument("--semigroup", required=True, help="nat-min | int-min | posrat-min | nat-plus")
    if weight:
        p.add_argument("--weight", required=weight_required, help='weight formula, e.g. "n" or "piecewise{...}"')
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _add_limits(p):
    p.add_argument("--depth", type=int, help="inner and outer depth (default 1000)")
    p.add_argument("--inner-depth", type=int)
    p.add_argument("--outer-depth", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--tail-window", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slalg", description="Weighted semilattice convolution algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="Arens regularity verdict")
    _add_common(p)

    p = sub.add_parser("convolve", help="convolve two finitely supported elements")
    _add_common(p, weight=False)
    p.add_argument("--a", required=True, help="[[point, coef], ...]")
    p.add_argument("--b", required=True)
    p.add_argument("--oracle", action="store_true", help="use the brute-force bilinear extension")

    p = sub.add_parser("norm", help="weighted l1 norm")
    _add_common(p)
    p.add_argument("--a", required=True)

    p = sub.add_parser("omega", help="cluster kernel values, table or repeated limits")
    _add_common(p)
    p.add_argument("--s")
    p.add_argument("--t")
    p.add_argument("--table", type=int, help="print Omega on the first N points")
    p.add_argument("--outer", help="outer sequence, e.g. evens or arith:1,1")
    p.add_argument("--inner", help="inner sequence")
    p.add_argument("--zero-cluster", action="store_true", help="run the zero-clustering test")
    _add_limits(p)

    p = sub.add_parser("witness", help="non-regularity and non-submodule witnesses")
    _add_common(p)
    p.add_argument("--kind", choices=["pairing", "submodule", "craw-young", "compactness"], required=True)
    p.add_argument("--outer")
    p.add_argument("--inner")
    p.add_argument("--functional", help="functional JSON, e.g. '{\"form\":\"indicator\",\"points\":[1]}'")
    p.add_argument("--U", help="set: [2,inf) | even | odd | [p1,p2,...]")
    p.add_argument("--t")
    p.add_argument("--u")
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--s-seq", default="naturals")
    p.add_argument("--t-seq", default="naturals")
    p.add_argument("--eps", default="1/2")
    p.add_argument("--k", type=int, default=12)
    p.add_argument("--x")
    _add_limits(p)

    p = sub.add_parser("ai", help="approximate identity and its verification")
    _add_common(p, weight_required=False)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--test", action="append", default=[], help="test element [[point, coef], ...]")
    p.add_argument("--truncation", help="lo,hi: check the identity of a truncation instead")

    p = sub.add_parser("gelfand", help="values of phi_k on an element")
    _add_common(p, weight=False)
    p.add_argument("--a", required=True)
    p.add_argument("--K", type=int, default=10)

    p = sub.add_parser("chars", help="brute-force character enumeration on a truncation")
    _add_common(p, weight=True, weight_required=False)
    p.add_argument("--size", type=int, default=5)

    p = sub.add_parser("dtc", help="two-point DTC demonstration on nat-min")
    _add_common(p)
    p.add_argument("--a-seq", default="evens")
    p.add_argument("--b-seq", default="odds")
    p.add_argument("--f", default="[[2,1],[5,1]]")

    p = sub.add_parser("scenarios", help="run shipped scenarios against expected outputs")
    p.add_argument("--all", action="store_true")
    p.add_argument("--name", action="append", default=[])
    p.add_argument("--file", help="scenario JSON file (default: the shipped one)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    return parser


def _emit(args, payload, text):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _short(value) -> str:
    """Exact rationals with long digit strings are shown as decimals in text mode."""
    text = str(value)
    if len(text) <= 40 or "/" not in text:
        return text
    return "~" + mpmath.nstr(mpmath.mpf(Fraction(text).numerator) / Fraction(text).denominator, 12)


def _brief(value, items: int = 8) -> str:
    if isinstance(value, dict) and {"value", "reason"} <= value.keys():
        return f"{_short(value['value'])}  ({value['reason']})"
    if isinstance(value, list) and len(value) > items:
        head = ", ".join(json.dumps(v) for v in value[:items])
        return f"[{head}, ... ({len(value)} items)]"
    return json.dumps(value) if isinstance(value, (list, dict)) else _short(value)


def _limit_text(name, r):
    return f"{name}: {_short(r['value'])}  ({r['reason']})"


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "scenarios":
        scenarios = load_scenarios(args.file)
        if args.name:
            scenarios = [s for s in scenarios if s["name"] in args.name]
            if not scenarios:
                raise InputError(f"no scenario named {args.name}")
        elif not args.all:
            raise InputError("pass --all or --name")
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                results = list(pool.map(run_scenario, scenarios))
        else:
            results = [run_scenario(s) for s in scenarios]
        text = "\n".join(f"{'PASS' if r['pass'] else 'FAIL'}  {r['name']}" for r in results)
        _emit(args, results, text)
        return EXIT_OK if all(r["pass"] for r in results) else EXIT_UNDETERMINED

    sg = semigroup(args.semigroup)
    w = parse_weight(args.weight, sg) if getattr(args, "weight", None) else None
    if cmd == "classify":
        out = op_classify(sg, w, {})
        lines = [f"verdict: {out['verdict']}", f"predual: {out['predual_note']}"]
        lines += [f"  [{r['tag']}] {r['hypothesis']}" for r in out["reasons"]]
        _emit(args, out, "\n".join(lines))
        return EXIT_OK
    if cmd == "convolve":
        a, b = parse_element(sg, args.a), parse_element(sg, args.b)
        from .algebra import convolve_bruteforce

        res = terms_json((convolve_bruteforce if args.oracle else convolve)(a, b))
        print(json.dumps(res))
        return EXIT_OK
    if cmd == "norm":
        out = op_norm(sg, w, {"a": args.a})
        _emit(args, out, str(out["norm"]))
        return EXIT_OK
    if cmd == "omega":
        if args.zero_cluster:
            res = zero_cluster_test(w, _cfg(args))
            out = res.to_json()
            _emit(args, out, f"clusters_zero: {out['clusters_zero']}  ({out['reason']})")
            return EXIT_UNDETERMINED if res.clusters_zero == "undetermined" or res.witness_ok is False else EXIT_OK
        if args.table:
            pts = list(range(1, args.table + 1))
            rows = [[omega_fn(s, t, w) for t in pts] for s in pts]
            out = {"points": [format_point(p) for p in pts], "omega": [[format_coef(v) for v in r] for r in rows]}
            text = "\n".join("  ".join(f"{str(format_coef(v)):>8}" for v in r) for r in rows)
            _emit(args, out, text)
            return EXIT_OK
        if args.outer:
            status, out = run_operation(
                args.semigroup, args.weight, "omega",
                {"outer": args.outer, "inner": args.inner, "cfg": _cfg(args).to_json()},
            )
            _emit(args, out, "\n".join(_limit_text(k, out[k]) for k in ("box", "diamond")))
            return EXIT_OK if status == "ok" else EXIT_UNDETERMINED
        out = op_omega(sg, w, {"s": args.s, "t": args.t})
        _emit(args, out, str(out["omega"]))
        return EXIT_OK
    if cmd == "witness":
        params = {
            "pairing": lambda: {"outer": args.outer, "inner": args.inner, "functional": args.functional,
                                "cfg": _cfg(args).to_json()},
            "submodule": lambda: {"U": args.U or "[2,inf)", "t": args.t or 1, "u": args.u or 1,
                                  "n_max": args.n_max, **({"functional": args.functional} if args.functional else {})},
            "craw-young": lambda: {"s": args.s_seq, "t": args.t_seq, "eps": args.eps, "k": args.k},
            "compactness": lambda: {"x": args.x or 3, "eps": args.eps if args.eps != "1/2" else "1/100"},
        }[args.kind]()
        status, out = run_operation(args.semigroup, args.weight, args.kind, params)
        if status == "error":
            print(f"error: {out['message']}", file=sys.stderr)
            return EXIT_INPUT
        _emit(args, out, "\n".join(f"{k}: {_brief(v)}" for k, v in out.items()))
        return EXIT_OK if status == "ok" else EXIT_UNDETERMINED
    if cmd == "ai":
        if args.truncation:
            lo, hi = (int(x) for x in args.truncation.split(","))
            out = op_identity(sg, w, {"truncation": [lo, hi]})
            _emit(args, out, f"identity: {out['identity']['terms'] if out['identity'] else None}  verified: {out['verified']}")
            return EXIT_OK
        if w is None:
            raise InputError("--weight is required unless --truncation is given")
        out = op_ai(sg, w, {"tests": args.test, "depth": args.depth})
        lines = [f"kind: {out['kind']}  bound: {out['bound']}  multiplier bound: {out['multiplier_bound']}",
                 "s_n: " + " ".join(str(p) for p in out["points"])]
        if out["verification"]:
            lines.append(f"{'test':>4} {'n':>4} {'s_n':>6} {'residual':>14} {'bound':>14} ok")
            for r in out["verification"]:
                lines.append(f"{r['test']:>4} {r['n']:>4} {str(r['s_n']):>6} {str(r['residual']):>14} {str(r['bound']):>14} {r['ok']}")
        _emit(args, out, "\n".join(lines))
        return EXIT_OK
    if cmd == "gelfand":
        out = op_gelfand(sg, None, {"a": args.a, "K": args.K})
        print(json.dumps(out["gelfand"]))
        return EXIT_OK
    if cmd == "chars":
        out = op_chars(sg, w, {"size": args.size})
        _emit(args, out, f"{out['count']} characters, thresholds {out['thresholds']}")
        return EXIT_OK
    if cmd == "dtc":
        status, out = run_operation(args.semigroup, args.weight, "dtc", {"a_seq": args.a_seq, "b_seq": args.b_seq, "f": args.f})
        if status == "error":
            print(f"error: {out['message']}", file=sys.stderr)
            return EXIT_INPUT
        _emit(args, out, f"p_a = {out['p_a']}, p_b = {out['p_b']}, rank {out['rank']}, "
                         f"trivial only: {out['trivial_only']}, absorbed: {out['absorbed']}")
        return EXIT_OK if status == "ok" else EXIT_UNDETERMINED
    raise InputError(f"unknown command {cmd}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except SlalgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyError as exc:
        print(f"error: invalid input: missing key {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, TypeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
