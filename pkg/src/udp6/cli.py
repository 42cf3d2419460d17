"""Command-line front end.

Subcommands: evolve, verify, riccati, families, conjecture, qlimit.
Exit codes: 0 ok, 1 input/validation error, 2 branch-cap truncation,
3 verification failure.  Identical inputs and seed produce byte-identical
outputs; files are written atomically with LF line endings.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from fractions import Fraction
from typing import List, Optional, Tuple

from .evolution import EvolutionConfig, evolve, evolve_noparity, painleve_failures
from .families import FAMILY_IDS, FamilySpec, LinearAnsatz, detect_asymptotic_linearity, instantiate_family
from .generate import random_constrained_params
from .qoracle import EpsSchedule, ud_limit_compare
from .riccati import riccati_evolve, riccati_failures
from .system import ParityPair, StatePair, load_params, params_to_obj
from .tables import SolutionTable, branches_to_json_obj

__all__ = ["main"]

# flags that may take dash-prefixed values ("-1:43"); glued to --flag=value so
# argparse never mistakes the value for an option
_VALUE_FLAGS = {
    "--y0", "--z0", "--window", "--eps", "--c", "--cprime", "--m0",
    "--alpha", "--beta", "--gamma", "--w",
}


def _glue_values(argv: List[str]) -> List[str]:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and "=" not in tok:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _parse_pair(text: str) -> ParityPair:
    sign_s, _, amp_s = text.partition(":")
    if not amp_s:
        raise ValueError(f"expected sign:amplitude, got {text!r}")
    sign = int(sign_s)
    return ParityPair(sign, Fraction(amp_s))


def _parse_window(text: str) -> Tuple[int, int]:
    lo_s, _, hi_s = text.partition(":")
    if not hi_s:
        raise ValueError(f"expected lo:hi, got {text!r}")
    lo, hi = int(lo_s), int(hi_s)
    if lo > hi:
        raise ValueError(f"window {text!r} is empty")
    return lo, hi


def _write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-udp6-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        _write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _tables_text(tables, truncated: bool, fmt: str) -> str:
    if fmt == "json":
        return _json_text(branches_to_json_obj(tables, truncated))
    parts = []
    if len(tables) > 1:
        for i, t in enumerate(tables):
            parts.append(f"# branch {i} of {len(tables)}\n")
            parts.append(t.to_csv_text())
    else:
        parts.append(tables[0].to_csv_text())
    return "".join(parts)


# --- subcommands ----------------------------------------------------------------


def _cmd_evolve(args) -> int:
    p = load_params(args.params)
    y0 = _parse_pair(args.y0)
    z0 = _parse_pair(args.z0)
    lo, hi = _parse_window(args.window)
    cfg = EvolutionConfig(m_min=lo, m_max=hi, max_branches=args.branch_cap)
    tree = evolve(p, StatePair(args.m0, y0, z0), cfg)
    _emit(_tables_text(tree.tables, tree.truncated, args.format), args.out)
    if tree.truncated:
        print(f"branch cap {args.branch_cap} hit; output truncated", file=sys.stderr)
        return 2
    return 0


def _cmd_verify(args) -> int:
    p = load_params(args.params)
    with open(args.table, "r", encoding="utf-8") as fh:
        text = fh.read()
    table = SolutionTable.from_csv_text(text)
    failures = [(m, rel) for m, rel in painleve_failures(p, table)]
    if args.riccati:
        failures += riccati_failures(p, table)
    if failures:
        for m, rel in failures:
            print(f"FAIL m={m} relation={rel}", file=sys.stderr)
        return 3
    print(f"ok: {len(table)} rows verified")
    return 0


def _cmd_riccati(args) -> int:
    p = load_params(args.params)
    y0 = _parse_pair(args.y0)
    lo, hi = _parse_window(args.window)
    res = riccati_evolve(
        p, args.m0, y0, (lo, hi), sampling=args.sampling, max_branches=args.branch_cap
    )
    if not res.tables:
        print("no finite trajectory through the given state", file=sys.stderr)
        return 1
    _emit(_tables_text(res.tables, res.truncated, args.format), args.out)
    if res.truncated:
        print(f"branch cap {args.branch_cap} hit; output truncated", file=sys.stderr)
        return 2
    return 0


def _cmd_families(args) -> int:
    if args.list:
        sys.stdout.write("\n".join(FAMILY_IDS) + "\n")
        return 0
    if not args.params or not args.id:
        raise ValueError("--params and --id are required (or use --list)")
    p = load_params(args.params)
    ansatz = None
    if args.alpha is not None or args.beta is not None or args.gamma is not None:
        if None in (args.alpha, args.beta, args.gamma):
            raise ValueError("--alpha, --beta, --gamma must be given together")
        ansatz = LinearAnsatz(Fraction(args.alpha), Fraction(args.beta), Fraction(args.gamma))
    spec = FamilySpec(
        family=args.id,
        c=Fraction(args.c) if args.c is not None else None,
        c_prime=Fraction(args.cprime) if args.cprime is not None else None,
        m0=args.m0,
        ansatz=ansatz,
    )
    lo, hi = _parse_window(args.window)
    result = instantiate_family(spec, p, (lo, hi))
    report = result.to_json_obj()
    if args.format == "json":
        report["table"] = result.table.to_json_obj()
        _emit(_json_text(report), args.out)
    else:
        _emit(result.table.to_csv_text(), args.out)
        sys.stdout.write(_json_text({k: report[k] for k in ("family", "valid", "conditions")}))
    return 0


def _cmd_conjecture(args) -> int:
    lo, hi = _parse_window(args.window)
    rng = random.Random(args.seed)
    detected = 0
    candidates = []
    for i in range(args.n):
        p = random_constrained_params(rng)
        y0 = Fraction(rng.randint(-150, 150))
        z0 = Fraction(rng.randint(-150, 150))
        table = evolve_noparity(p, 0, y0, z0, (lo, hi))
        report = detect_asymptotic_linearity(p, table, args.w)
        if report.detected and report.verified:
            detected += 1
        else:
            candidates.append(
                {
                    "run": i,
                    "params": params_to_obj(p),
                    "y0": str(y0),
                    "z0": str(z0),
                    "forward_detected": report.forward is not None,
                    "backward_detected": report.backward is not None,
                }
            )
    summary = {
        "n": args.n,
        "seed": args.seed,
        "window": [lo, hi],
        "w": args.w,
        "linear_detected": detected,
        "fraction": f"{detected}/{args.n}",
        "counterexample_candidates": candidates,
    }
    _emit(_json_text(summary), args.out)
    return 0


def _cmd_qlimit(args) -> int:
    p = load_params(args.params)
    lo, hi = _parse_window(args.window)
    schedule = EpsSchedule.from_string(args.eps)
    if args.table:
        with open(args.table, "r", encoding="utf-8") as fh:
            table = SolutionTable.from_csv_text(fh.read())
    else:
        if not (args.y0 and args.z0):
            raise ValueError("qlimit needs either --table or --y0/--z0")
        y0 = _parse_pair(args.y0)
        z0 = _parse_pair(args.z0)
        if y0.sign != -1 or z0.sign != -1:
            raise ValueError("--y0/--z0 evolution uses the all-minus sector; signs must be -1")
        table = evolve_noparity(p, args.m0, y0.amp, z0.amp, (lo, hi))
    report = ud_limit_compare(p, table, schedule, (lo, hi), precision=args.precision)
    _emit(report.to_csv_text(), args.out)
    flagged = report.nonmonotone()
    for m, which in flagged:
        print(f"non-monotone amplitude error at m={m} ({which})", file=sys.stderr)
    for ab in report.aborts:
        print(f"aborted at eps={ab.eps}, m={ab.m}: {ab.reason}", file=sys.stderr)
    for m, rel in report.table_failures:
        print(f"input table violates {rel} at m={m}", file=sys.stderr)
    return 3 if (flagged or report.aborts or report.table_failures) else 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="udp6", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common_out(sp):
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("evolve", help="evolve an initial state over a window")
    sp.add_argument("--params", required=True)
    sp.add_argument("--y0", required=True, help="sign:amplitude, e.g. -1:43")
    sp.add_argument("--z0", required=True, help="sign:amplitude")
    sp.add_argument("--m0", type=int, default=0)
    sp.add_argument("--window", required=True, help="lo:hi inclusive")
    sp.add_argument("--branch-cap", type=int, default=64)
    common_out(sp)
    sp.set_defaults(fn=_cmd_evolve)

    sp = sub.add_parser("verify", help="re-check a table against the residuals")
    sp.add_argument("--params", required=True)
    sp.add_argument("--table", required=True)
    sp.add_argument("--riccati", action="store_true", help="also check the first-order relations")
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("riccati", help="evolve the first-order subsystem")
    sp.add_argument("--params", required=True)
    sp.add_argument("--y0", required=True, help="sign:amplitude")
    sp.add_argument("--m0", type=int, default=0)
    sp.add_argument("--window", required=True)
    sp.add_argument("--sampling", choices=("endpoints", "midpoint", "all-breakpoints"),
                    default="endpoints")
    sp.add_argument("--branch-cap", type=int, default=64)
    common_out(sp)
    sp.set_defaults(fn=_cmd_riccati)

    sp = sub.add_parser("families", help="instantiate a closed-form solution family")
    sp.add_argument("--params")
    sp.add_argument("--id", choices=FAMILY_IDS)
    sp.add_argument("--c")
    sp.add_argument("--cprime")
    sp.add_argument("--m0", type=int)
    sp.add_argument("--alpha")
    sp.add_argument("--beta")
    sp.add_argument("--gamma")
    sp.add_argument("--window", default="-10:10")
    sp.add_argument("--list", action="store_true", help="list family ids and exit")
    common_out(sp)
    sp.set_defaults(fn=_cmd_families)

    sp = sub.add_parser("conjecture", help="seeded scan for asymptotically affine runs")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--window", required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--w", type=int, default=4, help="affine-tail window length")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_conjecture)

    sp = sub.add_parser("qlimit", help="compare a table against the q-system oracle")
    sp.add_argument("--params", required=True)
    sp.add_argument("--table", help="CSV table to compare (alternative to --y0/--z0)")
    sp.add_argument("--y0", help="sign:amplitude (all-minus evolution seed)")
    sp.add_argument("--z0", help="sign:amplitude")
    sp.add_argument("--m0", type=int, default=0)
    sp.add_argument("--window", required=True)
    sp.add_argument("--eps", required=True, help="comma-separated decreasing eps values")
    sp.add_argument("--precision", type=int, help="working precision in bits (default: derived)")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_qlimit)

    return ap


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(_glue_values(argv))
        return args.fn(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
