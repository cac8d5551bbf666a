"""mcgwb command line: validate-atlas, replay, dilatation, homology closure, relations."""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

from . import __version__
from . import homology as H
from . import penner as P
from .atlas import AtlasError
from .certlang import CertError, CertSyntaxError, load, replay
from .mapclass import ExprError, engine
from .validation import Check, Report, relation_suite, validate_atlas

EXIT_USAGE = 3
PF_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    genus: List[int]
    budget: int
    pf_tol: float = PF_TOL
    fmt: str = "text"
    meta: bool = True


def _config(args) -> RunConfig:
    g = args.genus if isinstance(getattr(args, "genus", None), list) else [getattr(args, "genus", None)]
    try:
        budget = H.closure_budget()
    except ValueError:
        raise UsageError("MCGWB_BUDGET must be an integer") from None
    cfg = RunConfig([x for x in g if x is not None], budget,
                    getattr(args, "pf_tol", PF_TOL), "json" if args.json else "text", not args.no_meta)
    if cfg.budget < 1 or cfg.pf_tol <= 0:
        raise UsageError("budget and PF tolerance must be positive")
    return cfg


def _genus(text: str) -> int:
    g = int(text)
    if g < 1:
        raise argparse.ArgumentTypeError("genus must be >= 1")
    return g


def _build() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--no-meta", action="store_true", help="omit timestamps and timings")
    p = _Parser(prog="mcgwb", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    s = sub.add_parser("validate-atlas", parents=[common], help="check the curve atlas")
    s.add_argument("--genus", type=_genus, required=True)

    s = sub.add_parser("relations", parents=[common], help="run the relation suite")
    s.add_argument("--genus", type=_genus, required=True)

    s = sub.add_parser("replay", parents=[common], help="replay a certificate")
    s.add_argument("cert")
    s.add_argument("--genus", type=_genus, action="append",
                   help="replay genus (repeatable; default: the certificate's list)")
    s.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")

    s = sub.add_parser("dilatation", parents=[common], help="PF bound for rho_n^g")
    s.add_argument("--genus", type=_genus, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--certify", action="store_true", help="certify PF >= n+1 exactly")
    s.add_argument("--pf-tol", type=float, default=PF_TOL, help="power iteration tolerance")

    s = sub.add_parser("homology", help="homology shadows")
    hs = s.add_subparsers(dest="hcmd", parser_class=_Parser)
    c = hs.add_parser("closure", parents=[common], help="mod-p closure of a generating set")
    c.add_argument("--genus", type=_genus, required=True)
    c.add_argument("--prime", type=int, required=True)
    c.add_argument("--set", required=True, help="comma-separated names or expressions")
    return p


# -- commands ---------------------------------------------------------------

def _cmd_validate(args, cfg: RunConfig) -> Report:
    return validate_atlas(args.genus)


def _cmd_relations(args, cfg: RunConfig) -> Report:
    return relation_suite(args.genus)


def _resolve_cert(text: str) -> Path:
    p = Path(text)
    if p.is_file():
        return p
    for base in (Path("certs"), Path(__file__).resolve().parents[2] / "certs"):
        q = base / (text if text.endswith(".cert") else text + ".cert")
        if q.is_file():
            return q
    raise UsageError(f"certificate {text!r} not found")


def _params(items) -> dict:
    out = {}
    for it in items:
        name, sep, val = it.partition("=")
        if not sep:
            raise UsageError(f"bad --param {it!r}, expected NAME=VALUE")
        try:
            out[name.strip()] = int(val)
        except ValueError:
            raise UsageError(f"bad --param value {val!r}") from None
    return out


def _cmd_replay(args, cfg: RunConfig) -> Report:
    path = _resolve_cert(args.cert)
    try:
        cert = load(path)
    except CertSyntaxError as e:
        raise UsageError(str(e)) from None
    params = _params(args.param)
    genera = args.genus or cert.replay
    rep = Report("replay", {"cert": cert.name, "genus": genera, "params": params})
    for g in genera:
        try:
            rr = replay(cert, g, params)
        except CertError as e:
            raise UsageError(str(e)) from None
        for row in rr.checks():
            status = row["status"]
            rid = row["id"] if len(genera) == 1 else f"g={g}/{row['id']}"
            rep.checks.append(Check(rid, row["paper_label"], status, row["evidence"]))
    return rep


def _cmd_dilatation(args, cfg: RunConfig) -> Report:
    g, n = args.genus, args.n
    if n < 1:
        raise UsageError("--n must be positive")
    if g < 2:
        raise UsageError("the a/b/c train track needs genus >= 2")
    eng = engine(g)
    rep = Report("dilatation", {"genus": g, "n": n, "certify": bool(args.certify),
                                "pf_tolerance": cfg.pf_tol})
    word = P.conjugate_expand(P.rho_n_expr(n), g, eng)
    M = P.transition_matrix(word, g)
    rep.add("irreducible", "non-negative irreducible transition matrix", P.is_irreducible(M))
    pf = P.pf_eigenvalue(M, cfg.pf_tol)
    enc = P.pf_enclosure(M)
    rep.add("pf", "PF(M) of rho_n^g", True,
            f"pf_eigenvalue {pf:.12g}; enclosure [{float(enc.lower):.12g}, {float(enc.upper):.12g}]")
    if args.certify:
        ok = P.certified_pf_lower_bound(M, n + 1)
        rep.add("bound", "lambda_n^g >= n+1", ok,
                f"certified bound {n + 1}" if ok else f"no certificate for bound {n + 1}")
        rep.config["bound"] = n + 1
    return rep


_NAMED = {
    "h1": lambda g: P.h_expr(1, g), "h2": lambda g: P.h_expr(2, g),
    "f1": lambda g: P.f_expr(1, g), "f2": lambda g: P.f_expr(2, g),
    "rho": lambda g: P.rho_expr(), "rho_prime": lambda g: P.rho_prime_expr(),
    "R": lambda g: P.R_expr(g),
}


def _set_members(text: str, g: int) -> List[tuple]:
    eng = engine(g)
    names = [x.strip() for x in text.split(",") if x.strip()]
    if not names:
        raise UsageError("--set is empty")
    out = []
    for name in names:
        if name == "humphries":
            out += [(("t_" + c, 1),) for c in [f"alpha{j}" for j in range(1, 2 * g + 1)] + ["beta"]]
        elif name == "lickorish":
            out += [(("t_" + c, 1),) for c in eng.atlas.curve_names()]
        elif name in _NAMED:
            out.append(_NAMED[name](g))
        elif name.startswith("rho_"):
            out.append(P.rho_n_expr(int(name[4:])))
        else:
            try:
                out.append(eng.parse(name))
            except (ExprError, AtlasError, ValueError) as e:
                raise UsageError(f"cannot read set member {name!r}: {e}") from None
    return out


def _cmd_closure(args, cfg: RunConfig) -> Report:
    g, p = args.genus, args.prime
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise UsageError(f"{p} is not prime")
    eng = engine(g)
    exprs = _set_members(args.set, g)
    mats = [H.homology_image(e, eng) for e in exprs]
    budget = cfg.budget
    cr = H.mod_p_closure(mats, p, args.set, budget)
    rep = Report("homology closure", {"genus": g, "prime": p, "set": args.set, "budget": budget})
    ok = None if not cr.complete else cr.size == cr.target
    rep.add(f"closure:{args.set}:mod{p}", "surjection onto Sp(2g, p)", ok,
            f"size {cr.size} of {cr.target} ({cr.verdict})")
    return rep


# -- output -----------------------------------------------------------------

def _emit(rep: Report, cfg: RunConfig, started: float, out) -> None:
    if cfg.fmt == "json":
        doc = rep.to_json()
        if cfg.meta:
            doc["meta"] = {"version": __version__,
                           "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                           "elapsed_s": round(time.perf_counter() - started, 3)}
        out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
        return
    for c in rep.checks:
        label = f" [{c.paper_label}]" if c.paper_label else ""
        ev = f"  {c.evidence}" if c.evidence else ""
        out.write(f"{c.status.upper():9} {c.id}{label}{ev}\n")
    counts = {}
    for c in rep.checks:
        counts[c.status] = counts.get(c.status, 0) + 1
    tally = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
    tail = "" if not cfg.meta else f" in {time.perf_counter() - started:.2f}s"
    out.write(f"{rep.command}: {rep.verdict.upper()} ({tally}){tail}\n")
    if rep.command == "dilatation" and "bound" in rep.config and rep.verdict == "pass":
        out.write(f"certified lower bound: {rep.config['bound']}\n")


_COMMANDS = {"validate-atlas": _cmd_validate, "relations": _cmd_relations,
             "replay": _cmd_replay, "dilatation": _cmd_dilatation}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = _build()
    started = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        if args.cmd is None:
            raise UsageError("missing subcommand")
        if args.cmd == "homology":
            if getattr(args, "hcmd", None) != "closure":
                raise UsageError("expected 'homology closure'")
            fn = _cmd_closure
        else:
            fn = _COMMANDS[args.cmd]
        cfg = _config(args)
        rep = fn(args, cfg)
    except UsageError as e:
        sys.stderr.write(f"mcgwb: error: {e}\n")
        return EXIT_USAGE
    _emit(rep, cfg, started, out)
    return rep.exit_code()


if __name__ == "__main__":
    sys.exit(main())
