"""Command line entry point.

Exit status: 0 on success, 1 when a checked property fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from pathlib import Path

from . import coarse, embed, metric, roe, suite
from .semigroup import (
    DescriptorError,
    classify,
    green_table,
    make_family,
    semigroup_from_json,
)

COMMANDS = ("green", "graph", "metric", "coarse", "embed", "roe", "verify")


class UsageError(Exception):
    pass


def _scales(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"scales must be integers, got {text!r}") from None
    if not vals or any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("scales must be nonnegative integers")
    return vals


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", help="family descriptor, e.g. I3, bicyclic, fim1, product(Z2,N), or JSON")
    common.add_argument("--input", help="input file (semigroup JSON, metric space CSV/JSON, operator JSON)")
    common.add_argument("--scope", type=int, help="truncation grade / ball radius")
    common.add_argument("--scales", type=_scales, default=None, help="comma separated scales r")
    common.add_argument("--weights", default="unit", help="unit, level, or a JSON file of [key, weight] pairs")
    common.add_argument("--cap", type=int, default=10_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "dot"), default="json")
    common.add_argument("--tolerance", type=float, default=roe.DEFAULT_TOLERANCE)

    p = argparse.ArgumentParser(prog="invcoarse", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("green", parents=[common], help="Green's relations of a finite table")
    g = sub.add_parser("graph", parents=[common], help="Schützenberger graph around an element")
    g.add_argument("--element", help="element key as JSON (default: the identity or first element)")
    sub.add_parser("metric", parents=[common], help="word metric table and validation")
    sub.add_parser("coarse", parents=[common], help="asdim-0, sparseness and triviality verdicts")
    e = sub.add_parser("embed", parents=[common], help="realise a finite metric space as an L-class")
    e.add_argument("--verify", action="store_true", help="check the distortion bounds")
    e.add_argument("--exact", action="store_true", help="use the (Delta+1)-colour edge colouring")
    e.add_argument("--basepoint", help="label of the basepoint (default: first point)")
    sub.add_parser("roe", parents=[common], help="band operator decomposition check")
    sub.add_parser("verify", parents=[common], help="run the whole property suite")
    return p


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items())}
    return cfg


def _oracle(args):
    if args.family is None:
        raise UsageError("--family is required")
    return make_family(args.family)


def _table(args):
    if args.input and args.command == "green":
        return semigroup_from_json(Path(args.input).read_text())
    o = _oracle(args)
    if not o.finite and args.scope is None:
        raise UsageError(f"{o.name} is infinite; pass --scope")
    return suite.scope_table(o, args.scope, args.cap)


def _weights(args, S):
    o = S.oracle
    if args.weights in ("unit", "level"):
        return suite.weighted_defaults(o, args.scope, args.weights)
    doc = json.loads(Path(args.weights).read_text())
    return metric.WeightedGenerators.from_pairs(o, [(o.decode(k), int(w)) for k, w in doc])


def _emit(obj, out):
    out.write(suite.dumps(obj) + "\n")


def cmd_green(args, out):
    S = _table(args)
    G = green_table(S)
    o = S.oracle
    rows = [
        (metric.key_json(o, a), G.l_id[i], G.r_id[i], G.d_id[i], bool(S.idempotent[i]))
        for i, a in enumerate(S.elements)
    ]
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["key", "L", "R", "D", "idempotent"])
        for k, l, r, d, e in rows:
            w.writerow([json.dumps(k, separators=(",", ":")), l, r, d, int(e)])
        return 0
    cls = classify(S)
    _emit(
        {
            "config": _config(args),
            "scope": S.label,
            "size": len(S),
            "classification": {"kind": cls.kind, "idempotents": len(cls.idempotents), "warning": cls.warning},
            "classes": {"L": len(G.l_classes), "R": len(G.r_classes), "D": len(G.d_classes)},
            "elements": [{"key": k, "L": l, "R": r, "D": d, "idempotent": e} for k, l, r, d, e in rows],
        },
        out,
    )
    return 0


def cmd_graph(args, out):
    S = _table(args)
    o = S.oracle
    W = _weights(args, S)
    if args.element:
        s = o.decode(json.loads(args.element))
        if s not in o:
            raise UsageError(f"{args.element} is not an element of {o.name}")
    else:
        s = o.identity() if o.identity() is not None else S.elements[0]
    radius = args.scope if args.scope is not None else 3
    G = metric.schuetzenberger_graph(o, W, s, radius)
    if args.format == "dot":
        out.write(G.to_dot())
        return 0
    _emit(
        {
            "config": _config(args),
            "scope": f"Ball({radius})",
            "root": metric.key_json(o, s),
            "vertices": [metric.key_json(o, v) for v in G.vertices],
            "edges": [
                [metric.key_json(o, a), metric.key_json(o, g), metric.key_json(o, b), w] for a, g, b, w in G.edges
            ],
        },
        out,
    )
    return 0


def cmd_metric(args, out):
    S = _table(args)
    d = metric.word_metric(S, _weights(args, S))
    if args.format == "csv":
        out.write(d.to_csv())
        return 0
    r_max = max(args.scales) if args.scales else 2
    rep = metric.validate_metric(d, r_max)
    _emit({"config": _config(args), "table": d.to_json(), "validation": rep.to_json(S.oracle)}, out)
    return 0 if rep.ok else 1


def cmd_coarse(args, out):
    S = _table(args)
    o = S.oracle
    d = metric.word_metric(S, _weights(args, S))
    scales = args.scales or [1]
    if args.format == "csv":
        part = coarse.r_components(d, scales[0])
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["key", "block", "size"])
        w.writerows(part.to_csv_rows(d))
        return 0
    asd = coarse.asdim0_evidence(d, scales)
    sp = coarse.sparse_evidence(d, scales)
    tr = metric.coarse_triviality(S, d)
    _emit(
        {
            "config": _config(args),
            "scope": d.status,
            "asdim0": asd.to_json(o),
            "sparse": sp.to_json(o),
            "coarsely_trivial": tr.to_json(o),
        },
        out,
    )
    return 0


def _read_space(path):
    text = Path(path).read_text()
    if path.endswith(".json"):
        return embed.FiniteMetricSpace.from_json(text)
    return embed.FiniteMetricSpace.from_csv(text)


def cmd_embed(args, out):
    if not args.input:
        raise UsageError("embed needs --input")
    X = _read_space(args.input)
    base = X.points.index(args.basepoint) if args.basepoint else 0
    e = embed.embed_space(X, base, exact=args.exact)
    if args.format == "dot":
        out.write(e.to_dot())
        return 0
    doc = {"config": _config(args), "generators": e.generators_json(), "distances": e.distances.tolist()}
    code = 0
    if args.verify:
        try:
            doc["distortion"] = embed.verify_distortion(e)
        except embed.DistortionViolation as exc:
            doc["distortion"] = {"violation": list(exc.pair), "found": exc.found, "certificates": exc.certificates}
            code = 1
    _emit(doc, out)
    return code


def cmd_roe(args, out):
    S = _table(args)
    o = S.oracle
    d = metric.word_metric(S, _weights(args, S))
    if args.input:
        T = roe.BandOperator.from_json(Path(args.input).read_text(), o, args.tolerance)
        if tuple(T.indices) != tuple(S.elements):
            raise UsageError("operator indices must list the table elements in order")
    else:
        r = (args.scales or [2])[0]
        T = roe.random_band_operator(random.Random(args.seed), d, S, r)
    try:
        res = roe.decompose_band(T, d, S)
    except roe.DecompositionUnavailable as exc:
        _emit({"config": _config(args), "error": str(exc)}, out)
        return 1
    ok = res.residual <= args.tolerance
    _emit({"config": _config(args), "scope": d.status, "decomposition": res.to_json(o), "passed": ok}, out)
    return 0 if ok else 1


def cmd_verify(args, out):
    reports = suite.run_all(args.seed)
    ok = all(r["passed"] for r in reports)
    _emit({"config": _config(args), "passed": ok, "criteria": reports}, out)
    return 0 if ok else 1


HANDLERS = {
    "green": cmd_green,
    "graph": cmd_graph,
    "metric": cmd_metric,
    "coarse": cmd_coarse,
    "embed": cmd_embed,
    "roe": cmd_roe,
    "verify": cmd_verify,
}


def main(argv=None, out=None):
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return HANDLERS[args.command](args, out)
    except (UsageError, DescriptorError, embed.MetricSpaceError, FileNotFoundError) as exc:
        print(f"invcoarse {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"invcoarse {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
