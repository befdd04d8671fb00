"""Command-line front end: ``permchain <group> <command> [options]``.

Exit status: 0 success, 1 verification failure, 2 usage or input error,
3 resource limit hit.
"""
from __future__ import annotations

import argparse
import functools
import json
import os
import sys
import time

from . import __version__
from .antichain import (
    AntichainSpec,
    build_element,
    element_ids_of_length,
    validate_spec,
    verify_antichain,
)
from .errors import InvalidInputError, ResourceLimitError
from .genfun import (
    Poly,
    RationalGF,
    Series,
    fit_rational,
    gf_antichain,
    gf_closure_paper,
    growth_rate,
    series_expand,
)
from .oscillation import deletion_classify, increasing_oscillations, sigma
from .perm import (
    contains,
    format_perm,
    inversion_graph,
    parse_perm,
    patterns,
    read_perm_file,
    sort_key,
)
from .structure import inflate, simple_quotient

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

# JSON schema shipped for each command's ``--format json`` output
SCHEMA_FOR = {
    ("gf", "expand"): "series",
    ("gf", "antichain"): "rational_gf",
    ("gf", "growth"): "growth",
    ("gf", "fit"): "fit",
    ("gf", "closure-paper"): "closure_paper",
    ("closure", "counts"): "closure_counts",
    ("closure", "reconcile"): "reconcile",
    ("antichain", "verify"): "antichain_report",
    ("antichain", "elements"): "elements",
    ("superclass", "build"): "superclass",
    ("verify", "all"): "verify",
}


def load_schema(name: str) -> dict:
    from importlib.resources import files

    return json.loads(files("permchain").joinpath("schemas", f"{name}.json").read_text())


class VerificationFailed(Exception):
    """Raised by a handler whose check ran but did not pass."""

    def __init__(self, payload, text):
        super().__init__(text)
        self.payload = payload
        self.text = text


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise InvalidInputError(f"expected integers, got {text!r}") from exc


def _perm_list(text: str):
    return [parse_perm(chunk) for chunk in text.split(";") if chunk.strip()]


def spec_from_args(args) -> AntichainSpec:
    if getattr(args, "split_end_paths", False):
        return AntichainSpec.split_end_paths()
    if args.k is None or args.alpha is None:
        raise InvalidInputError("--k and --alpha are required (or use --split-end-paths)")
    alpha = parse_perm(args.alpha)
    if args.tau is not None:
        return AntichainSpec.from_tau(args.k, parse_perm(args.tau), alpha)
    if getattr(args, "A", None):
        return AntichainSpec(args.k, alpha, tuple(_perm_list(args.A)))
    if getattr(args, "symmetric", False):
        return AntichainSpec.symmetric(args.k, alpha)
    raise InvalidInputError("give --tau, --A or --symmetric to fix the antichain A")


def _gf_from_args(args) -> RationalGF:
    return RationalGF(Poly(_ints(args.num)), Poly(_ints(args.den)))


# --- handlers: each returns (payload for json, text) ------------------------

def cmd_perm_contains(args):
    host, pat = parse_perm(args.host), parse_perm(args.pattern)
    occ = contains(host, pat)
    payload = {"host": list(host), "pattern": list(pat), "occurrence": list(occ) if occ else None}
    text = "absent" if occ is None else " ".join(map(str, occ))
    return payload, text


def cmd_perm_inflate(args):
    q = parse_perm(args.quotient)
    blocks = [parse_perm(b) for b in args.blocks]
    p = inflate(q, blocks)
    return {"perm": list(p)}, format_perm(p)


def cmd_perm_decompose(args):
    d = simple_quotient(parse_perm(args.perm))
    return d.to_json(), d.to_text().rstrip("\n")


def cmd_perm_patterns(args):
    found = sorted(patterns(parse_perm(args.perm), args.length), key=sort_key)
    return {"patterns": [list(p) for p in found]}, "\n".join(format_perm(p) for p in found)


def cmd_perm_graph(args):
    g = inversion_graph(parse_perm(args.perm))
    if args.dot:
        return {"n": g.n, "edges": sorted(list(e) for e in g.edges)}, g.to_dot().rstrip("\n")
    edges = sorted(g.edges)
    return (
        {"n": g.n, "edges": [list(e) for e in edges]},
        " ".join(f"{i}-{j}" for i, j in edges) or "(no edges)",
    )


def cmd_osc_sigma(args):
    s = sigma(args.m)
    return {"m": args.m, "perm": list(s)}, format_perm(s)


def cmd_osc_family(args):
    fam = increasing_oscillations(args.m)
    return (
        {"m": args.m, "variants": [list(v) for v in fam.variants]},
        "\n".join(format_perm(v) for v in fam.variants),
    )


def cmd_osc_classify(args):
    p = parse_perm(args.perm)
    tags = deletion_classify(p)
    return {"perm": list(p), "tags": tags}, "\n".join(f"{i} {t}" for i, t in enumerate(tags, 1))


def cmd_antichain_elements(args):
    spec = spec_from_args(args)
    lengths = [args.length] if args.length is not None else range(1, args.max_len + 1)
    rows = []
    for n in lengths:
        for eid in element_ids_of_length(spec, n):
            rows.append({**eid.to_json(), "perm": list(build_element(spec, eid))})
    rows.sort(key=lambda r: sort_key(r["perm"]))
    return {"spec": spec.to_json(), "elements": rows}, "\n".join(format_perm(r["perm"]) for r in rows)


def cmd_antichain_verify(args):
    spec = spec_from_args(args)
    rep = verify_antichain(spec, args.max_len)
    payload = {
        "passed": rep.passed,
        "elements": rep.elements,
        "pairs_checked": rep.pairs_checked,
        "offending": [list(x) for x in rep.offending] if rep.offending else None,
    }
    if not rep.passed:
        raise VerificationFailed(payload, rep.summary())
    return payload, rep.summary()


def cmd_antichain_spec_check(args):
    spec = spec_from_args(args)
    rep = validate_spec(spec)
    payload = {"passed": rep.passed, "checks": [c.__dict__ for c in rep.checks]}
    text = "\n".join(
        f"{c.name}: {'pass' if c.passed else 'FAIL'}" + (f" ({c.detail})" if c.detail else "")
        for c in rep.checks
    )
    if not rep.passed:
        raise VerificationFailed(payload, text)
    return payload, text


def cmd_gf_antichain(args):
    gf = gf_antichain(spec_from_args(args))
    return gf.to_json(), gf.pretty()


def cmd_gf_closure_paper(args):
    c = gf_closure_paper(spec_from_args(args))
    text = "\n".join([
        f"a          = {c.a.pretty()}",
        f"C1         = {c.c1.pretty()}",
        f"beginnings = {c.beginnings.pretty()}",
        f"middles    = {c.middles.pretty()}",
        f"endings    = {c.endings.pretty()}",
        f"total      = {c.total.pretty()}",
    ])
    return c.to_json(), text


def cmd_gf_expand(args):
    s = series_expand(_gf_from_args(args), args.terms)
    return s.to_json(), ",".join(map(str, s.coeffs))


def cmd_gf_growth(args):
    g = growth_rate(_gf_from_args(args))
    if g.rate is None:
        text = g.note
    else:
        text = f"{g.rate:.12f} (dominant root {'unique' if g.unique_dominant else 'NOT unique'})"
        if g.note:
            text += f"; {g.note}"
    return g.to_json(), text


def cmd_gf_fit(args):
    if args.series is not None:
        coeffs = _ints(args.series)
    else:
        data = json.loads(open(args.file).read())
        coeffs = list(Series.from_json(data).coeffs)
    fit = fit_rational(coeffs, args.max_den_degree)
    payload = {"fit": fit.to_json() if fit else None, "terms": len(coeffs)}
    if fit is None:
        raise VerificationFailed(payload, "no rational function within the degree bound")
    return payload, fit.pretty()


def cmd_closure_counts(args):
    from .closure import closure_counts

    res = closure_counts(spec_from_args(args), args.max_len, args.cutoff,
                         recheck=not args.no_recheck, cache_dir=args.cache_dir)
    text = ",".join(map(str, res.series.coeffs)) + f"\nstable at cutoff+4: {res.stable}"
    if res.stable is False:
        raise VerificationFailed(res.to_json(), text)
    return res.to_json(), text


def cmd_closure_grammar(args):
    from .closure import Grammar, grammar_soundness

    spec = spec_from_args(args)
    g = Grammar(spec, args.max_len)
    res = g.generate()
    payload = {
        "distinct": list(res.distinct.coeffs),
        "raw": list(res.raw.coeffs),
        "parts": res.parts,
    }
    text = f"distinct {','.join(map(str, res.distinct.coeffs))}\nraw      {','.join(map(str, res.raw.coeffs))}"
    if args.soundness:
        rep = grammar_soundness(spec, res.table, g)
        payload["soundness"] = {"checked": rep.checked, "failures": [list(p) for p in rep.failures]}
        text += f"\nsoundness: {rep.checked} certified, {len(rep.failures)} failures"
        if not rep.passed:
            raise VerificationFailed(payload, text)
    return payload, text


def cmd_closure_reconcile(args):
    from .closure import reconcile_report

    rep = reconcile_report(spec_from_args(args), args.max_len, args.cutoff, cache_dir=args.cache_dir)
    lines = ["  n      brute  grammar    raw(grammar)   paper_gf        delta"]
    for r in rep.rows():
        lines.append(f"{r['n']:3d} {r['brute']:10d} {r['grammar_distinct']:8d} {r['grammar_raw']:15d} "
                     f"{r['paper_gf']:10d} {r['delta_paper_brute']:12d}")
    lines.append(f"brute == grammar tables: {rep.tables_equal}; stable: {rep.stable}")
    lines.append(f"fit (den degree <= {rep.fit_degree}): {rep.fit.pretty() if rep.fit else 'none found'}")
    payload = rep.to_json()
    text = "\n".join(lines)
    if not rep.tables_equal or rep.stable is False:
        raise VerificationFailed(payload, text)
    return payload, text


def _basis(args):
    from .superclass import ClassSpec

    return ClassSpec(tuple(read_perm_file(args.basis)))


def cmd_class_counts(args):
    from .superclass import class_counts

    cls = _basis(args)
    counts = class_counts(cls, args.max_len, cap=max(args.max_len, 12))
    return {"basis": [list(b) for b in cls.basis], "coeffs": counts, "n_min": 1}, ",".join(map(str, counts))


def cmd_superclass_build(args):
    from .superclass import build_rational_superclass

    spec = spec_from_args(args)
    rep = build_rational_superclass(_basis(args), spec, args.max_len, paper_literal=args.paper_literal_xn)
    payload = rep.to_json()
    text = rep.summary().rstrip("\n")
    if not rep.ok or rep.downward_closed is False:
        raise VerificationFailed(payload, text)
    return payload, text


def cmd_verify_all(args):
    from .verify import Context, run_all

    tau = tuple(parse_perm(args.tau)) if args.tau else (2, 1)
    alpha = tuple(parse_perm(args.alpha)) if args.alpha else (1, 2, 3, 4)
    ctx = Context(args.k or 3, tau, alpha, args.max_len, args.cutoff, args.cache_dir)
    only = set(_ints(args.only)) if args.only else None
    echo = None
    if args.format == "text" and not args.output:
        echo = functools.partial(print, flush=True)
    results = run_all(ctx, only, echo)
    payload = {"results": [r.to_json() if args.timing else {**r.to_json(), "seconds": None} for r in results],
               "passed": all(r.passed for r in results)}
    lines = [] if echo else [r.line() for r in results]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    text = "\n".join(lines)
    if not payload["passed"]:
        raise VerificationFailed(payload, text)
    return payload, text


# --- parser -----------------------------------------------------------------

def _add_spec(p, tau_required=False):
    p.add_argument("--k", type=int, help="alpha has length k+1")
    p.add_argument("--alpha", help='long pattern, e.g. "1 2 3 4"')
    p.add_argument("--tau", help='length k-1 pattern defining A_tau, e.g. "2 1"')
    if not tau_required:
        p.add_argument("--A", help='explicit antichain A, ";"-separated, e.g. "2 1;1 2 3"')
        p.add_argument("--symmetric", action="store_true", help="A = all permutations of length k")
        p.add_argument("--split-end-paths", action="store_true", help="the antichain U (k=1, A={1}, alpha=12)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--cache-dir", default=os.environ.get("PERMCHAIN_CACHE_DIR"),
                        help="persist closure tables here (env PERMCHAIN_CACHE_DIR)")
    common.add_argument("--jobs", type=int, default=1, help="worker bound (computation is sequential)")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings")

    parser = argparse.ArgumentParser(prog="permchain", description="Permutation antichains and their closures.")
    parser.add_argument("--version", action="version", version=f"permchain {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    def group(name, help_):
        g = groups.add_parser(name, help=help_)
        return g.add_subparsers(dest="command", required=True)

    def cmd(sub, name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    g = group("perm", "single permutations")
    p = cmd(g, "contains", cmd_perm_contains, "least occurrence of PATTERN in HOST")
    p.add_argument("host")
    p.add_argument("pattern")
    p = cmd(g, "inflate", cmd_perm_inflate, "inflate QUOTIENT by BLOCKS")
    p.add_argument("quotient")
    p.add_argument("blocks", nargs="+")
    p = cmd(g, "decompose", cmd_perm_decompose, "simple quotient and blocks")
    p.add_argument("perm")
    p = cmd(g, "patterns", cmd_perm_patterns, "all patterns")
    p.add_argument("perm")
    p.add_argument("--length", type=int)
    p = cmd(g, "graph", cmd_perm_graph, "inversion graph")
    p.add_argument("perm")
    p.add_argument("--dot", action="store_true")

    g = group("osc", "oscillations")
    p = cmd(g, "sigma", cmd_osc_sigma, "the oscillation sigma_m")
    p.add_argument("m", type=int)
    p = cmd(g, "family", cmd_osc_family, "increasing oscillations of length m")
    p.add_argument("m", type=int)
    p = cmd(g, "classify", cmd_osc_classify, "tag each one-point deletion")
    p.add_argument("perm")

    g = group("antichain", "the antichains U_{A,alpha}")
    p = cmd(g, "elements", cmd_antichain_elements, "list elements")
    _add_spec(p)
    p.add_argument("--length", type=int)
    p.add_argument("--max-len", type=int, default=16)
    p = cmd(g, "verify", cmd_antichain_verify, "pairwise incomparability")
    _add_spec(p)
    p.add_argument("--max-len", type=int, default=16)
    p = cmd(g, "spec-check", cmd_antichain_spec_check, "validate A and alpha")
    _add_spec(p)

    g = group("gf", "generating functions")
    p = cmd(g, "antichain", cmd_gf_antichain, "GF of the antichain")
    _add_spec(p)
    p = cmd(g, "closure-paper", cmd_gf_closure_paper, "closed-form closure GF and its factors")
    _add_spec(p)
    for name, func, help_ in (("expand", cmd_gf_expand, "series coefficients"),
                              ("growth", cmd_gf_growth, "growth rate and dominant root check")):
        p = cmd(g, name, func, help_)
        p.add_argument("--num", required=True, help='coefficients from x^0, e.g. "0,0,1"')
        p.add_argument("--den", required=True)
        if name == "expand":
            p.add_argument("--terms", type=int, default=20)
    p = cmd(g, "fit", cmd_gf_fit, "fit a rational function to a series")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--series", help="coefficients of x^1, x^2, ...")
    src.add_argument("--file", help="series JSON file")
    p.add_argument("--max-den-degree", type=int, default=4)

    g = group("closure", "downward closures")
    for name, func, help_ in (("counts", cmd_closure_counts, "brute-force closure sizes"),
                              ("grammar", cmd_closure_grammar, "grammar generation"),
                              ("reconcile", cmd_closure_reconcile, "brute force vs grammar vs closed form")):
        p = cmd(g, name, func, help_)
        _add_spec(p)
        p.add_argument("--max-len", type=int, default=10)
        if name != "grammar":
            p.add_argument("--cutoff", type=int)
        if name == "counts":
            p.add_argument("--no-recheck", action="store_true")
        if name == "grammar":
            p.add_argument("--soundness", action="store_true", help="certify every member")

    g = group("class", "finitely based classes")
    p = cmd(g, "counts", cmd_class_counts, "sizes of Av(basis)")
    p.add_argument("--basis", required=True, help="file with one basis permutation per line")
    p.add_argument("--max-len", type=int, default=10)

    g = group("superclass", "rational superclasses")
    p = cmd(g, "build", cmd_superclass_build, "build C_rat")
    p.add_argument("--basis", required=True)
    _add_spec(p, tau_required=True)
    p.add_argument("--max-len", type=int, default=12)
    p.add_argument("--paper-literal-xn", action="store_true", help="remove |C_n| antichain elements per length")

    g = group("verify", "acceptance checks")
    p = cmd(g, "all", cmd_verify_all, "run every acceptance criterion")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--tau", default="2 1")
    p.add_argument("--alpha", default="1 2 3 4")
    p.add_argument("--max-len", type=int, default=14)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--only", help="comma-separated criterion numbers")
    return parser


def _emit(args, payload, text):
    if args.format == "json":
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        out = text + "\n" if text else ""
    if args.timing and args.format == "text":
        out = f"# elapsed {time.perf_counter() - args._t0:.3f}s\n" + out
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    try:
        payload, text = args.func(args)
    except VerificationFailed as fail:
        _emit(args, fail.payload, fail.text)
        return EXIT_FAIL
    except InvalidInputError as exc:
        print(f"permchain: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimitError, MemoryError) as exc:
        print(f"permchain: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    _emit(args, payload, text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
