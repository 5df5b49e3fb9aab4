"""``lnnet`` command line.

Reports go to the output file (or stdout) as JSON or CSV; one-line human
summaries go to stderr. Exit codes: 0 success, 1 domain or validation
error, 2 usage error. Nothing is written unless the whole command succeeds.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import datasets as ds
from .config import from_env
from .errors import AmbiguityError, LnNetError, ParseError, ValidationError
from .net import Affine, LN, forward_batch, net_from_dict, net_to_dict
from .nonlinearity import group_ratios_closed, hessian_measure_fd, hessian_measure_lng_closed
from .rng import SplitMix64
from .ssr import ClassPair, break_lssr, lssr
from .synthesis import nearest_prototype, shatter_report, synthesize

# module named in error messages, per subcommand
_MODULE = {
    "gen": "datasets",
    "ssr": "ssr_analysis",
    "break-lssr": "ssr_analysis",
    "synth": "synthesis",
    "verify": "lnnet_model",
    "hessian": "nonlinearity_meter",
    "shatter": "synthesis",
}


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return " ".join(str(_cell(u)) for u in v)
    return "" if v is None else v


def _commit(outputs: dict) -> None:
    """Write ``{path or None: text}``; ``None`` means stdout. Files appear atomically."""
    staged = []
    try:
        for path, text in outputs.items():
            if path is None:
                continue
            target = Path(path)
            fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or ".")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((tmp, target))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, target in staged:
        os.replace(tmp, target)
    if None in outputs:
        sys.stdout.write(outputs[None])
        sys.stdout.flush()


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_data(path) -> ds.LabeledDataset:
    try:
        return ds.load_csv(path)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def _load_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", line=exc.lineno) from None


# -- subcommands -------------------------------------------------------------------

def cmd_gen(args, tol):
    if args.kind == "xor":
        data = ds.gen_xor()
    elif args.kind == "benchmark":
        data = ds.gen_benchmark_pair(args.row, args.m, args.seed)
    elif args.kind == "noisy-xor":
        data = ds.gen_noisy_xor(args.m, args.seed)
    else:
        data = ds.gen_random_labels(args.m, args.dim, args.classes, args.seed)
    _note(f"generated {data.size} points in R^{data.dim}, classes {data.classes}")
    return {args.output: ds.dumps_csv(data)}


def cmd_ssr(args, tol):
    data = _load_data(args.input)
    rep = lssr(ClassPair.from_dataset(data), tol)
    _note(f"SSR {rep.ssr:.6g}  LSSR {rep.lssr:.6g}  f'(0) {rep.fprime0:.6g}")
    doc = rep.to_dict()
    if args.format == "csv":
        keys = [k for k, v in doc.items() if not isinstance(v, list) or k == "u_star"]
        return {args.output: _dump_csv(keys, [[_cell(doc[k]) for k in keys]])}
    return {args.output: _dump_json(doc)}


def cmd_break(args, tol):
    data = _load_data(args.input)
    res = break_lssr(ClassPair.from_dataset(data), args.budget, tol)
    _note(f"LSSR {res.lssr:.6g} -> SSR {res.ssr_after:.6g} at t = {res.t_star:.6g}")
    out = {}
    if args.net:
        out[args.net] = _dump_json(net_to_dict(res.net))
    doc = res.to_dict()
    if args.format == "csv":
        keys = [k for k, v in doc.items() if not isinstance(v, dict)]
        out[args.output] = _dump_csv(keys, [[_cell(doc[k]) for k in keys]])
    else:
        out[args.output] = _dump_json(doc)
    return out


def cmd_synth(args, tol):
    data = _load_data(args.input)
    res = synthesize(data, args.seed, tol)
    doc = net_to_dict(res.net)
    doc["readout"] = res.readout_dict()["prototypes"]
    _note(f"{len(data.classes)} classes, {data.size} points: {res.depth} LN layers, "
          f"accuracy {res.accuracy:.4g}, max prototype error {res.max_proto_error:.3g}")
    out = {args.out: json.dumps(doc, separators=(",", ":")) + "\n"}
    if args.trace:
        trace = res.trace.to_dict()
        trace.update(seed=args.seed, attempt=res.attempt, ln_layers=res.depth,
                     accuracy=res.accuracy, max_prototype_error=res.max_proto_error)
        out[args.trace] = _dump_json(trace)
    return out


def _readout(doc):
    raw = doc.get("readout") if isinstance(doc, dict) else None
    if not isinstance(raw, list) or not raw:
        raise ValidationError("net document has no readout table")
    try:
        return sorted((float(p["value"]), int(p["label"])) for p in raw)
    except (KeyError, TypeError, ValueError):
        raise ParseError("malformed readout entry") from None


def _layer_kind(layer) -> str:
    if isinstance(layer, Affine):
        return "affine"
    return "ln" if isinstance(layer, LN) else f"lng({layer.groups})"


def cmd_verify(args, tol):
    doc = _load_json(args.net)
    net = net_from_dict(doc)
    table = _readout(doc)
    data = _load_data(args.input)
    if data.dim != net.in_dim:
        raise ValidationError(f"net expects dimension {net.in_dim}, data has {data.dim}")
    if net.out_dim != 1:
        raise ValidationError(f"readout needs a scalar output, net produces {net.out_dim}")
    out, acts = forward_batch(net, data.points, tol.eps_zero, trace=True)
    points, correct = [], 0
    for k in range(data.size):
        try:
            pred, dist = nearest_prototype(table, float(out[0, k]), tol.eps_proto)
        except AmbiguityError:
            pred, dist = None, None
        correct += pred == int(data.labels[k])
        points.append({"index": k, "label": int(data.labels[k]), "predicted": pred,
                       "output": float(out[0, k]), "distance": dist})
    accuracy = correct / data.size
    layers = [{"index": k, "kind": _layer_kind(layer), "width": int(A.shape[0]),
               "mean": float(A.mean()), "std": float(A.std())}
              for k, (layer, A) in enumerate(zip(net.layers, acts))]
    _note(f"accuracy {accuracy:.4g} ({correct}/{data.size}), {net.depth} LN layers")
    if args.format == "csv":
        keys = ["index", "label", "predicted", "output", "distance"]
        return {args.output: _dump_csv(keys, [[_cell(p[k]) for k in keys] for p in points])}
    return {args.output: _dump_json({"accuracy": accuracy, "ln_layers": net.depth,
                                     "points": points, "layers": layers})}


def cmd_hessian(args, tol):
    d, n = args.dim, args.samples
    for g in args.groups:
        if g < 1 or d % g:
            raise ValidationError(f"{g} groups do not divide dimension {d}")
        if d // g < 2:
            raise ValidationError(f"{g} groups leave groups of size {d // g}")
    X = SplitMix64(args.seed).normal(d * n).reshape(n, d).T
    rows = []
    for g in args.groups:
        h = np.array([hessian_measure_lng_closed(X[:, k], g, tol.eps_zero) for k in range(n)])
        row = {"groups": g, "group_size": d // g, "samples": n, "mean_h": float(h.mean()),
               "median_h": float(np.median(h))}
        if d > 2:
            r = group_ratios_closed(X, g, tol.eps_zero)
            row.update(min_ratio=float(r.min()), mean_ratio=float(r.mean()))
        if args.fd:
            fd = np.array([hessian_measure_fd(X[:, k], g, eps_zero=tol.eps_zero) for k in range(n)])
            err = np.abs(fd - h)
            # groups of two give H = 0 exactly; only the absolute error means anything there
            rel = float(np.max(err / h)) if d // g > 2 else None
            row.update(mean_h_fd=float(fd.mean()), max_abs_err=float(err.max()), max_rel_err=rel)
        rows.append(row)
        _note(f"g={g}: mean H {row['mean_h']:.6g}")
    if args.format == "csv":
        keys = list(rows[0])
        return {args.output: _dump_csv(keys, [[_cell(r[k]) for k in keys] for r in rows])}
    return {args.output: _dump_json({"dim": d, "samples": n, "seed": args.seed, "rows": rows})}


def cmd_shatter(args, tol):
    if args.input:
        X = _load_data(args.input).points
    else:
        X = SplitMix64(args.seed).normal(args.dim * args.m).reshape(args.m, args.dim).T
    recs = shatter_report(X, args.max_layers, args.seed, tol)
    ok = all(r["ok"] for r in recs)
    _note(f"{sum(r['ok'] for r in recs)}/{len(recs)} labelings within {args.max_layers} LN layers")
    if args.format == "csv":
        keys = ["code", "labels", "accuracy", "ln_layers", "ok"]
        return {args.output: _dump_csv(keys, [[_cell(r.get(k)) for k in keys] for r in recs])}
    return {args.output: _dump_json({"shattered": ok, "points": X.T.tolist(),
                                     "max_ln_layers": args.max_layers, "labelings": recs})}


# -- parser ----------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lnnet", description="LN-Net analysis and synthesis tools.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_, fmt=True, output=True):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
        if output:
            sp.add_argument("--output", "-o", default=None, help="report path (default stdout)")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json", help="report format")
        return sp

    g = add("gen", cmd_gen, "Generate a labeled dataset as CSV.", fmt=False)
    g.add_argument("--kind", choices=("xor", "benchmark", "noisy-xor", "random"), required=True)
    g.add_argument("--row", default="offset", help="distribution for --kind benchmark (xor, concentric, offset, elongated)")
    g.add_argument("--m", type=_positive, default=256, help="points (per class for benchmark/noisy-xor)")
    g.add_argument("--dim", type=_positive, default=2, help="dimension for --kind random")
    g.add_argument("--classes", type=_positive, default=2, help="classes for --kind random")

    s = add("ssr", cmd_ssr, "SSR, LSSR and the first-order break coefficient of a two-class CSV.")
    s.add_argument("--input", "-i", required=True)

    b = add("break-lssr", cmd_break, "Build an LN map whose output SSR falls below the LSSR.")
    b.add_argument("--input", "-i", required=True)
    b.add_argument("--budget", type=_positive, default=60, help="line-search halvings per sign")
    b.add_argument("--net", default=None, help="also write the LN-Net document here")

    y = add("synth", cmd_synth, "Synthesize a width-3 LN-Net memorizing a labeled CSV.",
            fmt=False, output=False)
    y.add_argument("--input", "-i", required=True)
    y.add_argument("--out", required=True, help="LN-Net document with readout table")
    y.add_argument("--trace", default=None, help="per-layer synthesis trace (JSON)")

    v = add("verify", cmd_verify, "Classify a CSV with a synthesized net and report accuracy.")
    v.add_argument("--net", required=True)
    v.add_argument("--input", "-i", required=True)

    h = add("hessian", cmd_hessian, "Sweep the Hessian nonlinearity measure over group counts.")
    h.add_argument("--dim", type=_positive, required=True)
    h.add_argument("--groups", type=_int_list, default=[1], help="comma-separated group counts")
    h.add_argument("--samples", type=_positive, default=1000)
    h.add_argument("--fd", action="store_true", help="also run the finite-difference oracle")

    t = add("shatter", cmd_shatter, "Check that every binary labeling of a point set is memorized.")
    t.add_argument("--input", "-i", default=None, help="points as CSV (labels ignored)")
    t.add_argument("--m", type=_positive, default=6, help="random points when no --input")
    t.add_argument("--dim", type=_positive, default=2)
    t.add_argument("--max-layers", type=int, default=4)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = from_env()
    except ValueError:
        _note("lnnet: LNNET_EPS_EQ is not a number")
        return 2
    try:
        outputs = args.func(args, tol)
        _commit(outputs)
    except LnNetError as exc:
        _note(f"lnnet {args.command}: {_MODULE[args.command]}: {exc}")
        return 1
    except OSError as exc:
        _note(f"lnnet {args.command}: cannot write output: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
