"""Command-line front end.

    wightman chi --state '{"type":"thermal","beta":0.6931}'
    wightman correlator --state '{"type":"vacuum"}' --times 1,0
    wightman diagrams --n 2 --order 1 --format dot --out figs/
    wightman verify all
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
import io
import json
import os
from pathlib import Path
import sys

from . import diagrams as dg
from .core import (ConvergenceError, PhysicalParams, TruncationError, complex_to_json,
                   eval_expsum)
from .fock import (build_density, chi_numeric, stable_evaluate,
                   wightman_exact_anharmonic, wightman_exact_free)
from .perturbation import MAX_ORDER, perturbative_orders
from .quadrature import QuadratureSpec
from .states import CustomXi, chi_closed, chi_table, state_from_json
from .verify import run_suite
from .wick import wightman_free

EXIT_OK, EXIT_USAGE, EXIT_TRUNCATION, EXIT_CONVERGENCE, EXIT_FAILED = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def load_state(text):
    if text is None:
        raise UsageError("--state is required")
    src = text.strip()
    if not src.startswith("{"):
        try:
            src = Path(src).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read state file: {exc}") from None
    try:
        return state_from_json(json.loads(src))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad state description: {exc}") from None


def parse_times(groups):
    if not groups:
        raise UsageError("--times is required")
    out = []
    for g in groups:
        try:
            ts = tuple(float(x) for x in g.replace(" ", "").split(",") if x)
        except ValueError:
            raise UsageError(f"bad time tuple {g!r}") from None
        if not ts:
            raise UsageError("empty time tuple")
        out.append(ts)
    return out


def thread_count(args):
    n = args.threads
    if n is None:
        env = os.environ.get("WIGHTMAN_THREADS")
        try:
            n = int(env) if env else 1
        except ValueError:
            raise UsageError("WIGHTMAN_THREADS must be an integer") from None
    if n < 1:
        raise UsageError("thread count must be positive")
    return n


def params_from(args):
    try:
        lam = args.lambda_rel * args.omega ** 3 / args.hbar
        return PhysicalParams(args.omega, args.hbar, lam, args.t0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def quad_from(args):
    return QuadratureSpec(base_nodes=args.quad_nodes, tol=args.quad_tol)


def emit(text, out):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# chi

def cmd_chi(args):
    state = load_state(args.state)
    p = params_from(args)
    N = args.max_order
    if args.oracle:
        if isinstance(state, CustomXi):
            raise UsageError("the numeric route needs a density matrix")
        data, dim, _ = stable_evaluate(
            lambda d: chi_numeric(build_density(state, d, p), N).data, state, p)
        table = type(chi_table(state, 0, p))(N, data)
        route, extra = "fock-numeric", {"dimension": dim}
    else:
        table = chi_table(state, N, p)
        route = "closed-form" if chi_closed(state, 0, 1, p) is not None else "moment-transform"
        extra = {}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "n", "re", "im"])
        for (m, n), v in table.items():
            w.writerow([m, n, repr(v.real), repr(v.imag)])
        emit(f"# route: {route}\n" + buf.getvalue().rstrip("\n"), args.out)
    else:
        emit(json.dumps({"route": route, **extra, "chi": table.to_json()}, indent=2), args.out)
    return EXIT_OK


# correlator

def _one_correlator(state, chi, times, p, K, quad, compare):
    row = {"times": list(times)}
    if p.lam == 0:
        free = _free_value(chi, times, p)
        row["perturbative"] = free
        row["diagrammatic"] = free
    else:
        pert = perturbative_orders(chi, times, p, K, quad)
        diag = dg.diagrammatic_orders(chi, times, p, K, quad)
        row["perturbative"] = complex(sum(pert))
        row["diagrammatic"] = complex(sum(diag))
        row["perturbative_orders"] = [complex(v) for v in pert]
    if compare:
        if p.lam == 0:
            exact = wightman_exact_free(state, times, p=p)
        else:
            exact = wightman_exact_anharmonic(state, times, p)
        row["oracle"] = exact
        diff = abs(row["perturbative"] - exact)
        row["abs_delta"] = diff
        row["rel_delta"] = diff / max(abs(exact), 1e-300)
    return row


def _free_value(chi, times, p):
    return complex(eval_expsum(wightman_free(len(times), chi), times, p))


def _json_row(row):
    out = {}
    for k, v in row.items():
        if isinstance(v, complex):
            out[k] = complex_to_json(v)
        elif isinstance(v, list) and v and isinstance(v[0], complex):
            out[k] = [complex_to_json(z) for z in v]
        else:
            out[k] = v
    return out


def cmd_correlator(args):
    state = load_state(args.state)
    p = params_from(args)
    K = args.order
    if not 0 <= K <= MAX_ORDER:
        raise UsageError(f"order must lie in 0..{MAX_ORDER}")
    tuples = parse_times(args.times)
    if any(t < p.t0 for ts in tuples for t in ts):
        raise UsageError("times must not precede t0")
    if args.compare_oracle and isinstance(state, CustomXi):
        raise UsageError("the oracle needs a density matrix")
    need = max(len(ts) for ts in tuples) + 4 * K
    chi = chi_table(state, need, p)
    quad = quad_from(args)

    def job(ts):
        return _one_correlator(state, chi, ts, p, K, quad, args.compare_oracle)
    workers = min(thread_count(args), len(tuples))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, tuples))
    else:
        rows = [job(ts) for ts in tuples]

    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        width = max(len(ts) for ts in tuples)
        cols = ["perturbative", "diagrammatic"] + (["oracle"] if args.compare_oracle else [])
        head = [f"t{i + 1}" for i in range(width)]
        for c in cols:
            head += [f"{c}_re", f"{c}_im"]
        if args.compare_oracle:
            head += ["abs_delta", "rel_delta"]
        w.writerow(head)
        for r in rows:
            line = [repr(t) for t in r["times"]] + [""] * (width - len(r["times"]))
            for c in cols:
                line += [repr(r[c].real), repr(r[c].imag)]
            if args.compare_oracle:
                line += [repr(r["abs_delta"]), repr(r["rel_delta"])]
            w.writerow(line)
        emit(buf.getvalue().rstrip("\n"), args.out)
    elif args.format == "json":
        doc = {"order": K, "params": {"omega": p.omega, "hbar": p.hbar, "lambda": p.lam,
                                      "t0": p.t0},
               "quadrature": quad.to_json(),
               "results": [_json_row(r) for r in rows]}
        if K == 0 or p.lam == 0:
            doc["free_expsum"] = {str(len(ts)): wightman_free(len(ts), chi).to_json()
                                  for ts in tuples}
        emit(json.dumps(doc, indent=2), args.out)
    else:
        raise UsageError("correlator output is json or csv")
    return EXIT_OK


# diagrams

def cmd_diagrams(args):
    K = args.order
    if not 0 <= K <= MAX_ORDER:
        raise UsageError(f"order must lie in 0..{MAX_ORDER}")
    if args.n < 1:
        raise UsageError("need at least one external point")
    chi = times = None
    p = params_from(args)
    if args.state:
        state = load_state(args.state)
        chi = chi_table(state, args.n + 4 * K, p)
    if args.times:
        times = parse_times(args.times)[0]
        if len(times) != args.n:
            raise UsageError("--times must list one time per external point")
        if chi is None:
            raise UsageError("--times needs --state")
    found = dg.enumerate_diagrams(args.n, K, chi=chi, connected_only=args.connected_only)
    quad = quad_from(args)
    docs = [dg.diagram_summary(d, chi, times, p, quad) for d in found]
    fmt = args.format
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for i, (d, doc) in enumerate(zip(found, docs)):
            name = f"diagram_n{args.n}_k{K}_{i:03d}"
            if fmt == "dot":
                text = _dot_with_notes(d, doc, name)
                (outdir / f"{name}.dot").write_text(text + "\n")
            else:
                (outdir / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote {len(found)} diagrams to {outdir}")
    elif fmt == "dot":
        print("\n\n".join(_dot_with_notes(d, doc, f"d{i}")
                          for i, (d, doc) in enumerate(zip(found, docs))))
    elif fmt == "json":
        print(json.dumps({"count": len(found), "diagrams": docs}, indent=2))
    else:
        raise UsageError("diagram output is json or dot")
    return EXIT_OK


def _dot_with_notes(d, doc, name):
    notes = [f"// symmetry factor S = {doc['symmetry_factor']}"]
    for labs, th in zip(doc["labels"], doc["step_weights"]):
        notes.append(f"// labels [{', '.join(labs)}] step {th}")
    if "value" in doc:
        notes.append(f"// value {doc['value']['re']!r} {doc['value']['im']:+r}i")
    return "\n".join(notes + [dg.to_dot(d, name)])


# verify

def cmd_verify(args):
    try:
        results = run_suite(args.suite, seed=args.seed)
    except KeyError:
        raise UsageError(f"unknown suite {args.suite!r}") from None
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_FAILED


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--omega", type=float, default=1.0)
    common.add_argument("--hbar", type=float, default=1.0)
    common.add_argument("--lambda-rel", type=float, default=0.0,
                        help="quartic coupling in units of omega^3/hbar")
    common.add_argument("--t0", type=float, default=0.0)
    common.add_argument("--out")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--quad-nodes", type=int, default=32)
    common.add_argument("--quad-tol", type=float, default=1e-9)

    ap = argparse.ArgumentParser(prog="wightman", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("chi", parents=[common], help="cumulant table of a state")
    c.add_argument("--state")
    c.add_argument("--max-order", type=int, default=4)
    c.add_argument("--oracle", action="store_true", help="use the truncated Fock route")
    c.add_argument("--format", choices=["json", "csv"], default="json")
    c.set_defaults(func=cmd_chi)

    c = sub.add_parser("correlator", parents=[common], help="Wightman correlator values")
    c.add_argument("--state")
    c.add_argument("--times", action="append", metavar="T1,T2,...",
                   help="one time tuple; repeat for several")
    c.add_argument("--order", type=int, default=0)
    c.add_argument("--compare-oracle", action="store_true")
    c.add_argument("--format", choices=["json", "csv"], default="json")
    c.set_defaults(func=cmd_correlator)

    c = sub.add_parser("diagrams", parents=[common], help="enumerate and export diagrams")
    c.add_argument("--n", type=int, required=True, help="number of external points")
    c.add_argument("--order", type=int, default=0)
    c.add_argument("--state")
    c.add_argument("--times", action="append", metavar="T1,T2,...")
    c.add_argument("--connected-only", action="store_true")
    c.add_argument("--format", choices=["json", "dot"], default="json")
    c.set_defaults(func=cmd_diagrams)

    c = sub.add_parser("verify", parents=[common], help="run a verification suite")
    c.add_argument("suite", help="transforms, free, perturbation, diagrams or all")
    c.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"truncation failure: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except ConvergenceError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
