"""Command line front end: ``wirtgraph wirt|generate|bound|validate|quandle-check``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from . import gauss
from .diagram import NormalizationError, build_diagram
from .generate import ArityError, singularizable_pairs, singularize
from .quandle import BudgetExceeded as QuandleBudgetExceeded
from .quandle import (
    QuandleError,
    ShapeError,
    count_colorings,
    from_spec,
    is_homogeneous,
)
from .wirt import (
    BudgetExceeded,
    Pod,
    embedding_certificate,
    tangle_report,
    wirtinger_number,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_QUANDLE = 4

log = logging.getLogger("wirtgraph")


@dataclass
class Chunk:
    source: str
    line: int
    text: str


_ASSIGN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*\s*=\s*$")


def split_codes(text: str, source: str = "<input>") -> list[Chunk]:
    """Cut a file into top-level bracketed codes (one per line or multi-line).

    Text outside brackets may only be ``# comments`` or a ``name =`` prefix;
    anything else becomes a chunk of its own so parsing reports it.
    """
    text = re.sub(r"#[^\n]*", "", text)
    chunks: list[Chunk] = []
    depth = 0
    start = None
    line = 1
    outside_start, outside = 1, []
    for i, ch in enumerate(text):
        if depth == 0 and ch != "[":
            if not outside:
                outside_start = line
            outside.append(ch)
        if ch == "[":
            if depth == 0:
                junk = "".join(outside).strip()
                if junk and not _ASSIGN.match(junk):
                    chunks.append(Chunk(source, outside_start, junk))
                outside = []
                start, start_line = i, line
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                chunks.append(Chunk(source, start_line, text[start : i + 1]))
            elif depth < 0:
                chunks.append(Chunk(source, line, text[: i + 1]))
                depth = 0
        if ch == "\n":
            line += 1
    if depth > 0:
        chunks.append(Chunk(source, start_line, text[start:]))
    else:
        junk = "".join(outside).strip()
        if junk and not _ASSIGN.match(junk):
            chunks.append(Chunk(source, outside_start, junk))
    return chunks


def _read_inputs(paths: list[str]) -> list[Chunk]:
    chunks = []
    for p in paths:
        if p == "-":
            chunks.extend(split_codes(sys.stdin.read(), "<stdin>"))
        else:
            chunks.extend(split_codes(Path(p).read_text(encoding="utf-8"), p))
    return chunks


def _default_format() -> str:
    return "text" if sys.stdout.isatty() else "json"


def _threads(args) -> int:
    if args.threads:
        return args.threads
    env = os.environ.get("WIRTGRAPH_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def _nonnegative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return n


class _Emitter:
    """Collects result rows and prints them in the chosen format."""

    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out or sys.stdout
        self.rows: list[dict] = []

    def add(self, row: dict) -> None:
        self.rows.append(row)
        if self.fmt == "text":
            self.out.write(_text_row(row) + "\n")

    def finish(self) -> None:
        if self.fmt == "json":
            payload = self.rows[0] if len(self.rows) == 1 else {"schema_version": SCHEMA_VERSION, "results": self.rows}
            json.dump(payload, self.out, indent=2, ensure_ascii=False)
            self.out.write("\n")
        elif self.fmt == "csv":
            keys: list[str] = []
            for r in self.rows:
                keys.extend(k for k in r if k not in keys)
            writer = csv.DictWriter(self.out, fieldnames=keys)
            writer.writeheader()
            for r in self.rows:
                writer.writerow({k: _flat(v) for k, v in r.items()})


def _flat(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v, ensure_ascii=False)
    return v


_TEXT_HIDDEN = ("source", "line", "schema_version", "quandle", "sandwich", "exact", "verdict")


def _text_row(row: dict) -> str:
    where = f"{row['source']}:{row['line']}" if "source" in row else row.get("quandle", "")
    if "error" in row:
        return f"{where}: error: {row['error']}"
    parts = [f"{k}={_flat(v)}" for k, v in row.items() if k not in _TEXT_HIDDEN]
    text = f"{where}: " + " ".join(parts)
    if "sandwich" in row:
        tail = f"exact bridge index: {row['exact']}" if row["exact"] is not None else "not exact"
        text += f"\n  {row['sandwich']}  {tail}"
    return text


def _row(chunk: Chunk, **fields) -> dict:
    return {"schema_version": SCHEMA_VERSION, "source": chunk.source, "line": chunk.line, **fields}


def _load_diagram(chunk: Chunk):
    code = gauss.parse(chunk.text)
    return code, build_diagram(code)


_INPUT_ERRORS = (gauss.GaussSyntaxError, gauss.ValidationError, NormalizationError)


# --------------------------------------------------------------------------
# subcommands


def cmd_wirt(args) -> int:
    em = _Emitter(args.format or _default_format())
    status = EXIT_OK
    for chunk in _read_inputs(args.files):
        try:
            code, d = _load_diagram(chunk)
            r = wirtinger_number(
                d,
                max_k=args.max_k,
                require_pod_seed=args.require_pod_seed,
                budget=args.budget,
                threads=_threads(args),
            )
        except _INPUT_ERRORS as exc:
            em.add(_row(chunk, error=str(exc)))
            status = max(status, EXIT_INPUT)
            if not args.lenient:
                break
            log.warning("%s:%d skipped: %s", chunk.source, chunk.line, exc)
            continue
        except BudgetExceeded as exc:
            em.add(_row(chunk, error=str(exc)))
            status = max(status, EXIT_BUDGET)
            if not args.lenient:
                break
            continue
        cert = embedding_certificate(d, r)
        report = tangle_report(d, r)
        em.add(
            _row(
                chunk,
                omega=r.omega,
                witness=[_describe(d, it) for it in r.witness],
                multicolored=r.multicolored_crossings,
                tau2=r.tau2,
                certificate={
                    "upper_pods": cert.upper_pods,
                    "maxima": cert.maxima,
                    "minima": cert.minima,
                    "lower_pods": cert.lower_pods,
                    "degrees": report.degrees,
                    "euler_characteristic": report.euler_characteristic,
                },
            )
        )
    em.finish()
    return EXIT_OK if args.lenient else status


def _describe(d, item) -> str:
    if isinstance(item, Pod):
        return str(item)
    s = d.strands[item.strand]
    return f"Arc({item.strand}:{','.join(map(str, s.passages))})"


def cmd_generate(args) -> int:
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    stream = sys.stdout
    index_rows = []
    status = EXIT_OK
    produced = 0
    for n_chunk, chunk in enumerate(_read_inputs(args.files)):
        try:
            link = gauss.parse_link_gauss(chunk.text)
            pairs = singularizable_pairs(link, args.min_arc)
        except (*_INPUT_ERRORS, ArityError) as exc:
            status = EXIT_INPUT
            log.warning("%s:%d: %s", chunk.source, chunk.line, exc)
            index_rows.append({"source": chunk.source, "line": chunk.line, "x": "", "y": "", "output_id": "", "error": str(exc)})
            if not args.lenient:
                break
            continue
        for pair in pairs:
            code = singularize(link, pair)
            out_id = f"g{produced:06d}"
            produced += 1
            text = gauss.serialize(code)
            if out_dir:
                (out_dir / f"{out_id}.sg").write_text(text + "\n", encoding="utf-8")
            else:
                stream.write(text + "\n")
            index_rows.append({"source": chunk.source, "line": chunk.line, "x": pair.x, "y": pair.y, "output_id": out_id, "error": ""})
    index_path = Path(args.index) if args.index else (out_dir / "index.csv" if out_dir else None)
    if index_path:
        with index_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=["source", "line", "x", "y", "output_id", "error"])
            writer.writeheader()
            writer.writerows(index_rows)
    log.info("generated %d codes", produced)
    print(f"generated {produced} codes", file=sys.stderr)
    return EXIT_OK if args.lenient else status


def _load_quandle(spec: str):
    try:
        q = from_spec(spec)
    except ShapeError as exc:
        raise QuandleError(str(exc)) from exc
    if not q.axioms.ok:
        raise QuandleError(f"{spec} fails the quandle axioms: {q.axioms}")
    return q


def cmd_bound(args) -> int:
    em = _Emitter(args.format or _default_format())
    try:
        q = _load_quandle(args.quandle)
    except (QuandleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUANDLE
    status = EXIT_OK
    for chunk in _read_inputs(args.files):
        try:
            _, d = _load_diagram(chunk)
            r = wirtinger_number(d, max_k=args.max_k, budget=args.budget, threads=_threads(args))
        except _INPUT_ERRORS as exc:
            em.add(_row(chunk, error=str(exc)))
            status = max(status, EXIT_INPUT)
            if not args.lenient:
                break
            continue
        except BudgetExceeded as exc:
            em.add(_row(chunk, error=str(exc)))
            status = max(status, EXIT_BUDGET)
            if not args.lenient:
                break
            continue
        cc = count_colorings(d, q, witness=r.witness)
        row = _row(chunk, quandle=args.quandle, count=cc.count, order=cc.order, bound=cc.bound)
        if args.sandwich:
            row["omega"] = r.omega
            row["sandwich"] = f"{cc.bound} ≤ β ≤ {r.omega}"
            row["exact"] = r.omega if cc.bound == r.omega else None
            row["verdict"] = f"exact: {r.omega}" if cc.bound == r.omega else "not exact"
        em.add(row)
    em.finish()
    return EXIT_OK if args.lenient else status


def cmd_validate(args) -> int:
    em = _Emitter(args.format or _default_format())
    status = EXIT_OK
    for chunk in _read_inputs(args.files):
        try:
            lists = gauss._parse_nested(chunk.text)
            code = (
                gauss._spatial_from_lists(lists) if gauss._is_spatial(lists) else gauss._link_from_lists(lists)
            )
        except gauss.GaussSyntaxError as exc:
            em.add(_row(chunk, ok=False, issues=[{"code": "syntax", "message": str(exc), "location": ""}]))
            status = EXIT_INPUT
            continue
        report = gauss.validate(code)
        em.add(
            _row(
                chunk,
                ok=report.ok,
                kind="spatial" if isinstance(code, gauss.SpatialGaussCode) else "link",
                issues=[{"code": i.code, "message": i.message, "location": i.location} for i in report.issues],
                realizability="unchecked",
            )
        )
        if not report.ok:
            status = EXIT_INPUT
    em.finish()
    return status


def cmd_quandle_check(args) -> int:
    em = _Emitter(args.format or _default_format())
    status = EXIT_OK
    for spec in args.specs:
        try:
            q = from_spec(spec)
        except (ShapeError, ValueError) as exc:
            em.add({"schema_version": SCHEMA_VERSION, "quandle": spec, "error": str(exc)})
            status = EXIT_QUANDLE
            continue
        ax = q.axioms
        row = {
            "schema_version": SCHEMA_VERSION,
            "quandle": spec,
            "order": q.order,
            "idempotent": ax.idempotent[0],
            "right_invertible": ax.right_invertible[0],
            "self_distributive": ax.self_distributive[0],
        }
        failures = {
            name: list(w)
            for name, (ok, w) in (
                ("idempotent", ax.idempotent),
                ("right_invertible", ax.right_invertible),
                ("self_distributive", ax.self_distributive),
            )
            if not ok
        }
        if failures:
            row["witnesses"] = failures
            status = EXIT_QUANDLE
        else:
            row["n_quandle_order"] = q.n_order
            try:
                h = is_homogeneous(q, budget=args.budget)
                row.update(homogeneous=h.homogeneous, automorphisms=h.automorphisms, exhaustive=h.exhaustive)
            except QuandleBudgetExceeded as exc:
                row.update(homogeneous=None, error=str(exc), orbit_so_far=exc.partial)
                status = max(status, EXIT_BUDGET)
        em.add(row)
    em.finish()
    return status


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), help="output format (default: text on a terminal, json otherwise)")
    common.add_argument("--threads", type=_positive, help="worker processes (default: $WIRTGRAPH_THREADS or CPU count)")
    common.add_argument("--budget", type=_positive, help="maximum number of seed sets to examine")
    common.add_argument("--max-k", type=_positive, help="largest seed-set size to try")
    common.add_argument("--lenient", action="store_true", help="record bad inputs and keep going; exit 0")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="wirtgraph", description="Wirtinger numbers and quandle bounds for spatial graph diagrams.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wirt", parents=[common], help="Wirtinger number of each input diagram")
    p.add_argument("files", nargs="+")
    p.add_argument("--require-pod-seed", action="store_true", help="only try seed sets containing a pod")
    p.set_defaults(func=cmd_wirt)

    p = sub.add_parser("generate", parents=[common], help="Theta_4 codes from 2-component links")
    p.add_argument("files", nargs="+")
    p.add_argument("--min-arc", type=_nonnegative, default=4)
    p.add_argument("--out", help="directory for generated codes (default: stdout)")
    p.add_argument("--index", help="index CSV path (default: OUT/index.csv)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bound", parents=[common], help="quandle coloring count and lower bound")
    p.add_argument("files", nargs="+")
    p.add_argument("--quandle", required=True, help="dihedral:N, alexander:4, trivial:N or a CSV path")
    p.add_argument("--sandwich", action="store_true", help="also report the Wirtinger upper bound")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("validate", parents=[common], help="check Gauss codes")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("quandle-check", parents=[common], help="quandle axioms, n-quandle order, homogeneity")
    p.add_argument("specs", nargs="+")
    p.set_defaults(func=cmd_quandle_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
