"""Command-line front end.

    subsetdesigns count --group 3,3 --k 3 --x 0,0
    subsetdesigns check --group 9 --k 3 --x 1 --t 1 --verify-oracle
    subsetdesigns scan-conjecture --orders 4..16
    subsetdesigns ec --curve p=43,a=0,b=3 --k 7..42:7 --t 1

Exit codes: 0 success, 1 usage or invalid input, 2 resource budget exceeded
(or a scan left a frontier), 3 mathematical surprise (oracle mismatch,
invariant violation, conjecture counterexample).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass

from . import __version__
from .counting import count_subsets, count_subsets_star, is_empty_family
from .designs import check_2design_elementary, decide_1design
from .errors import InvariantViolation, ResourceError, SubsetDesignError
from .groups import GroupSpec, e_of, element_index, enumerate_elements, eclass_representatives, parse_element
from .oracle import (
    MASK_BUDGET,
    SUBSET_BUDGET,
    census_counts,
    check_t_design,
    conjecture_scan,
    enumerate_blocks,
)

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_SURPRISE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec: str | None
    k: str | None
    x: str | None
    t: tuple[int, ...]
    fmt: str
    output: str | None
    jobs: int
    seed: int
    subset_budget: int
    mask_budget: int
    verify_oracle: bool
    extra: tuple[tuple[str, object], ...] = ()

    def __post_init__(self):
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if self.subset_budget < 1 or self.mask_budget < 1:
            raise UsageError("budgets must be positive")

    def get(self, key, default=None):
        return dict(self.extra).get(key, default)

    def header(self) -> dict:
        return {
            "tool": "subsetdesigns",
            "version": __version__,
            "command": self.command,
            "spec": self.spec,
            "seed": self.seed,
        }


# ---------------------------------------------------------------- parsing helpers


def parse_range(text: str, lo: int, hi: int) -> list[int]:
    """``"3"``, ``"1,4,6"``, ``"2..9"``, ``"7..42:7"`` or ``"all"`` (``lo..hi``)."""
    text = text.strip()
    if text == "all":
        return list(range(lo, hi + 1))
    out = []
    for part in text.split(","):
        step = 1
        if ":" in part:
            part, _, s = part.partition(":")
            step = _int(s)
            if step < 1:
                raise UsageError(f"bad step in {text!r}")
        if ".." in part:
            a, _, b = part.partition("..")
            out.extend(range(_int(a), _int(b) + 1, step))
        else:
            out.append(_int(part))
    if not out:
        raise UsageError(f"empty range {text!r}")
    return out


def _int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise UsageError(f"not an integer: {s!r}") from None


def parse_targets(G: GroupSpec, text: str) -> list[tuple[int, object]]:
    if text == "all-eclasses":
        return eclass_representatives(G)
    if text == "all":
        return [(e_of(G, x), x) for x in enumerate_elements(G)]
    out = []
    for part in text.split(";"):
        x = parse_element(G, part)
        out.append((e_of(G, x), x))
    return out


@contextmanager
def _mapper(jobs: int):
    if jobs == 1:
        yield map
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            yield lambda f, items: ex.map(f, items, chunksize=4)


# ---------------------------------------------------------------- count


def _count_row(args) -> dict:
    G, k, e, x, verify = args
    b = count_subsets(G, k, x)
    b_star = count_subsets_star(G, k, x) if k <= G.order - 1 else 0
    row = {"group": G.text(), "k": k, "x": x.text(), "e": e, "count": b, "count_star": b_star}
    row["note"] = "empty-by-theorem" if 1 <= k and is_empty_family(G, k, x) else ""
    return row


def cmd_count(cfg: RunConfig) -> tuple[dict, int]:
    G = GroupSpec.parse(cfg.spec)
    ks = parse_range(cfg.k, 0, G.order)
    targets = parse_targets(G, cfg.x)
    items = [(G, k, e, x, cfg.verify_oracle) for k in ks for e, x in targets]
    with _mapper(cfg.jobs) as m:
        rows = list(m(_count_row, items))
    code = EXIT_OK
    if cfg.verify_oracle:
        H = census_counts(G, False)
        Hs = census_counts(G, True)
        for row, (_, k, _, x, _) in zip(rows, items):
            xi = element_index(G, x)
            if not 0 <= k <= G.order:
                continue
            ok = int(H[k, xi]) == row["count"] and (k > G.order - 1 or int(Hs[k, xi]) == row["count_star"])
            row["oracle"] = "agree" if ok else "MISMATCH"
            if not ok:
                code = EXIT_SURPRISE
    return {"rows": rows}, code


# ---------------------------------------------------------------- check


def _check_row(args) -> dict:
    G, k, e, x, t, verify, budget = args
    row = {"group": G.text(), "k": k, "x": x.text(), "e": e, "t": t}
    verdict = None
    if t == 1:
        verdict = decide_1design(G, k, x)
    elif t == 2 and G.is_elementary():
        verdict = check_2design_elementary(G, k, x)
    if verdict is not None:
        row.update(is_design=verdict.is_design, **{"lambda": verdict.lam}, blocks=verdict.blocks, rule=verdict.rule)
    need_oracle = verify or verdict is None
    if need_oracle:
        if k < t:
            oracle_design, lam = False, None
        else:
            rep = check_t_design(enumerate_blocks(G, k, x, budget=budget), t, budget=budget)
            oracle_design, lam = rep.is_t_design, rep.lam
        if verdict is None:
            row.update(is_design=oracle_design, **{"lambda": lam}, blocks=None, rule="generic/oracle")
        else:
            row["oracle"] = "agree" if (oracle_design, lam) == (verdict.is_design, verdict.lam) else "MISMATCH"
    return row


def cmd_check(cfg: RunConfig) -> tuple[dict, int]:
    G = GroupSpec.parse(cfg.spec)
    ks = parse_range(cfg.k, 1, G.order)
    targets = parse_targets(G, cfg.x)
    for t in cfg.t:
        if t < 1:
            raise UsageError("--t must be >= 1")
    items = [
        (G, k, e, x, t, cfg.verify_oracle, cfg.subset_budget) for t in cfg.t for k in ks for e, x in targets
    ]
    with _mapper(cfg.jobs) as m:
        rows = list(m(_check_row, items))
    code = EXIT_SURPRISE if any(r.get("oracle") == "MISMATCH" for r in rows) else EXIT_OK
    return {"rows": rows}, code


# ---------------------------------------------------------------- scan-conjecture


def cmd_scan(cfg: RunConfig) -> tuple[dict, int]:
    orders = parse_range(cfg.spec, 1, 1)
    rng = range(min(orders), max(orders) + 1)
    t = cfg.t[0]
    with _mapper(cfg.jobs) as m:
        rep = conjecture_scan(rng, cfg.mask_budget, t=t, xmode=cfg.get("xmode", "eclass"), mapper=m)
    rows = [r.as_dict() for r in rep.records]
    summary = rep.summary()
    summary["orders"] = f"{rng.start}..{rng.stop - 1}"
    if rep.designs_found:
        code = EXIT_SURPRISE
    elif not rep.complete:
        code = EXIT_RESOURCE
    else:
        code = EXIT_OK
    return {"rows": rows, "summary": summary}, code


# ---------------------------------------------------------------- ec


def cmd_ec(cfg: RunConfig) -> tuple[dict, int]:
    from .curves import (
        CodeClass,
        CurveSpec,
        build_code,
        certificate_codeword,
        check_group_law,
        check_support_design,
        classify_mds,
        minimum_distance,
        point_group,
        zero_sum_census,
    )
    from .gf import min_weight_exhaustive

    E = CurveSpec.parse(cfg.spec)
    pg = point_group(E)
    N = len(pg.points)
    n = N - 1
    info = {
        "p": E.p,
        "a": E.a,
        "b": E.b,
        "discriminant": E.discriminant,
        "points": N,
        "hasse_ok": (N - E.p - 1) ** 2 <= 4 * E.p,
        "structure": str(pg.structure),
        "group": pg.group.text(),
        "group_law": check_group_law(E, cfg.seed),
        "n": n,
    }
    ks = parse_range(cfg.k, 1, n - 1) if cfg.k else list(range(1, n))
    rows = []
    code = EXIT_OK
    matrix_path = cfg.get("matrix_csv")
    if matrix_path and len(ks) != 1:
        raise UsageError("--matrix-csv needs a single --k")
    for k in ks:
        ec = build_code(E, k)
        status = classify_mds(E, k)
        d = minimum_distance(E, k)
        row = {"n": n, "k": k, "d": d, "mds_status": status.value}
        designs = []
        if status is CodeClass.NMDS:
            for t in cfg.t:
                if not 1 <= t <= n - k:
                    continue
                rep = check_support_design(E, k, t, method=cfg.get("method", "auto"), budget=cfg.subset_budget)
                designs.append(
                    {"t": t, "is_design": rep.is_t_design, "lambda": rep.lam, "blocks": rep.blocks, "method": rep.flag}
                )
            cert = certificate_codeword(E, k)
            row["certificate"] = {"zero_set": list(cert.zero_set), "weight": cert.weight, "codeword": list(cert.codeword)}
        row["designs"] = designs
        if cfg.verify_oracle:
            checks = {}
            if E.p**k <= 10**6:
                checks["min_weight"] = min_weight_exhaustive(ec.matrix(), E.p) == d
            try:
                c = zero_sum_census(E, k, budget=cfg.subset_budget)
                checks["zero_sum_census"] = (c.zero_sum > 0) == (status is CodeClass.NMDS)
            except ResourceError:
                checks["zero_sum_census"] = "skipped"
            row["oracle"] = "agree" if all(v is not False for v in checks.values()) else "MISMATCH"
            if row["oracle"] == "MISMATCH":
                code = EXIT_SURPRISE
        rows.append(row)
    if matrix_path:
        with open(matrix_path, "w", newline="") as fh:
            fh.write(build_code(E, ks[0]).to_csv())
    return {"curve": info, "rows": rows}, code


# ---------------------------------------------------------------- output


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (dict, list)):
        return json.dumps(v, separators=(",", ":"), sort_keys=True)
    return str(v).lower() if isinstance(v, bool) else str(v)


def _columns(rows: list[dict]) -> list[str]:
    cols: list[str] = []
    for r in rows:
        for key in r:
            if key not in cols:
                cols.append(key)
    return cols


def render(cfg: RunConfig, report: dict) -> str:
    head = cfg.header()
    rows = report.get("rows", [])
    extras = {k: v for k, v in report.items() if k != "rows"}
    if cfg.fmt == "json":
        if cfg.command == "scan-conjecture":
            lines = [json.dumps({"header": head}, sort_keys=True)]
            lines += [json.dumps(r, sort_keys=True) for r in rows]
            lines.append(json.dumps({"summary": report["summary"]}, sort_keys=True))
            return "\n".join(lines) + "\n"
        return json.dumps({"header": head, **report}, indent=2, sort_keys=True) + "\n"
    comment = "# " + " ".join(f"{k}={_cell(v)}" for k, v in head.items())
    extra_lines = [f"# {k}: {_cell(v)}" for k, v in extras.items()]
    cols = _columns(rows)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in cols])
        return "\n".join([comment, *extra_lines]) + "\n" + buf.getvalue()
    table = [cols] + [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    body = ["  ".join(s.ljust(w) for s, w in zip(row, widths)).rstrip() for row in table] if cols else []
    return "\n".join([comment, *extra_lines, *body]) + "\n"


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "pretty"), default="pretty")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks; recorded in the header")
    common.add_argument("--subset-budget", type=int, default=SUBSET_BUDGET)
    common.add_argument("--mask-budget", type=int, default=MASK_BUDGET)
    common.add_argument("--verify-oracle", action="store_true", help="re-check results by brute force")

    parser = _Parser(prog="subsetdesigns", description="Subset-sum designs in finite abelian groups.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", parents=[common], help="count k-subsets summing to x")
    p.add_argument("--group", required=True, help="cyclic orders, e.g. 2,4")
    p.add_argument("--k", default="all")
    p.add_argument("--x", default="all-eclasses", help="coordinates, 'all-eclasses' or 'all'; ';' separates several")

    p = sub.add_parser("check", parents=[common], help="decide whether (G, B_k^x) is a t-design")
    p.add_argument("--group", required=True)
    p.add_argument("--k", default="all")
    p.add_argument("--x", default="all-eclasses")
    p.add_argument("--t", default="1")

    p = sub.add_parser("scan-conjecture", parents=[common], help="search p-groups for 2-designs")
    p.add_argument("--orders", default="4..16")
    p.add_argument("--t", default="2")
    p.add_argument("--x-mode", choices=("eclass", "all"), default="eclass")
    p.set_defaults(mask_budget=SUBSET_BUDGET)

    p = sub.add_parser("ec", parents=[common], help="elliptic-curve evaluation codes")
    p.add_argument("--curve", required=True, help="e.g. p=43,a=0,b=3")
    p.add_argument("--k", default=None, help="default: every 1 <= k <= n-1")
    p.add_argument("--t", default="1")
    p.add_argument("--method", choices=("auto", "dp", "theorem", "enumerate"), default="auto")
    p.add_argument("--matrix-csv", help="export the generator matrix (single k) as CSV")
    return parser


COMMANDS = {"count": cmd_count, "check": cmd_check, "scan-conjecture": cmd_scan, "ec": cmd_ec}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    spec = {"count": "group", "check": "group", "scan-conjecture": "orders", "ec": "curve"}[ns.command]
    extra = []
    if ns.command == "scan-conjecture":
        extra.append(("xmode", ns.x_mode))
    if ns.command == "ec":
        extra += [("method", ns.method), ("matrix_csv", ns.matrix_csv)]
    return RunConfig(
        command=ns.command,
        spec=getattr(ns, spec),
        k=getattr(ns, "k", None),
        x=getattr(ns, "x", None),
        t=tuple(parse_range(getattr(ns, "t", "1"), 1, 1)),
        fmt=ns.fmt,
        output=ns.output,
        jobs=ns.jobs,
        seed=ns.seed,
        subset_budget=ns.subset_budget,
        mask_budget=ns.mask_budget,
        verify_oracle=ns.verify_oracle,
        extra=tuple(extra),
    )


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        report, code = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"subsetdesigns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"subsetdesigns: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvariantViolation, ArithmeticError) as exc:
        print(f"subsetdesigns: invariant violated: {exc}", file=sys.stderr)
        return EXIT_SURPRISE
    except (SubsetDesignError, ValueError) as exc:
        print(f"subsetdesigns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(cfg, report)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
