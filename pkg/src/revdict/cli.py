"""Command-line entry point: build, query, stats, eval, serve."""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .evalharness import depth_sweep, evaluate, load_cases
from .graph import (
    MatrixKind,
    build_blm,
    build_flm,
    build_mblm,
    compute_stats,
    max_nonredundant_depth,
    write_stats_report,
)
from .ingest import build_back_list, build_forward_list, load_dictionary
from .similarity import NoContentWordsError, query
from .store import FORMAT_VERSION, IndexBundle, load, save
from .textproc import (
    default_exceptions_path,
    default_stopwords_path,
    load_lemma_rules,
    load_stopwords,
)

_ACCURACY_KS = (1, 10, 100)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _require_files(*paths: Path) -> None:
    for p in paths:
        if not p.is_file():
            raise FileNotFoundError(f"no such file: {p}")


def _cmd_build(args: argparse.Namespace) -> int:
    dict_paths = [Path(p) for p in args.dict]
    stop_path = Path(args.stopwords) if args.stopwords else default_stopwords_path()
    exc_path = Path(args.exceptions) if args.exceptions else default_exceptions_path()
    rules_path = Path(args.rules) if args.rules else None
    _require_files(*dict_paths, stop_path, exc_path, *([rules_path] if rules_path else []))
    out_path = Path(args.out)

    stop = load_stopwords(stop_path)
    rules = load_lemma_rules(rules_path, exc_path)

    dicts = []
    for p in dict_paths:
        with open(p, "rb") as fh:
            dicts.append(load_dictionary(fh, name=p.name))

    t0 = time.perf_counter()
    lexicon, fwd = build_forward_list(dicts, stop, rules)
    back = build_back_list(fwd)
    blm = build_blm(fwd, back)
    stats = compute_stats(blm)
    matrices = {MatrixKind.BLM: blm}
    depth_by_kind = {MatrixKind.BLM: stats.max_nonredundant_depth}
    if args.build_mblm:
        mblm = build_mblm(blm, stats.max_nonredundant_depth)
        matrices[MatrixKind.MBLM] = mblm
        depth_by_kind[MatrixKind.MBLM] = max_nonredundant_depth(mblm)
    if args.build_flm:
        flm = build_flm(fwd)
        matrices[MatrixKind.FLM] = flm
        depth_by_kind[MatrixKind.FLM] = max_nonredundant_depth(flm)

    manifest = {
        "sources": [p.name for p in dict_paths],
        "stopwords_sha256": _sha256(stop_path),
        "exceptions_sha256": _sha256(exc_path),
        "rules_sha256": _sha256(rules_path) if rules_path else "builtin",
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "tool_version": __version__,
        "format_version": FORMAT_VERSION,
    }
    bundle = IndexBundle(
        lexicon=lexicon,
        matrices=matrices,
        stats=stats,
        depth_by_kind=depth_by_kind,
        stopwords=stop,
        rules=rules,
        manifest=manifest,
    )
    save(bundle, out_path)
    elapsed = time.perf_counter() - t0

    print(f"wrote {out_path} ({out_path.stat().st_size / 1e6:.1f} MB) in {elapsed:.1f}s")
    print(f"lexicon size: {len(lexicon)}")
    mwe = int(lexicon.is_mwe.sum())
    added = int(lexicon.added_for_consistency.sum())
    print(f"multi-word nodes: {mwe}; added for consistency: {added}")
    for kind, matrix in matrices.items():
        print(
            f"{kind.value}: nnz={matrix.nnz} sparsity={matrix.sparsity:.4f} "
            f"max_nonredundant_depth={depth_by_kind[kind]}"
        )
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    _require_files(Path(args.index))
    bundle = load(args.index)
    kind = MatrixKind(args.matrix) if args.matrix else None
    ranked = query(
        args.phrase,
        bundle,
        depth=args.depth,
        limit=args.limit,
        kind=kind,
        include_inputs=args.include_inputs,
    )
    lex = bundle.lexicon
    inputs = ", ".join(
        f"{lex.word_of(wid)}(nu={nu})" for wid, nu in zip(ranked.input_ids, ranked.input_nus)
    )
    print(f"inputs: {inputs}")
    if ranked.unknown_tokens:
        print(f"unknown tokens: {', '.join(ranked.unknown_tokens)}")
    header = ["rank", "word", "score"] + [f"d({lex.word_of(wid)})" for wid in ranked.input_ids]
    print("\t".join(header))
    for pos, (wid, score_val) in enumerate(zip(ranked.word_ids, ranked.scores), start=1):
        dists = ranked.distances_for(int(wid))
        cells = [str(pos), lex.word_of(int(wid)), f"{score_val:.6f}"]
        cells += [str(d) if d >= 0 else "-" for d in dists.values()]
        print("\t".join(cells))
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    _require_files(Path(args.index))
    bundle = load(args.index)
    stats = bundle.stats
    print(f"lexicon size: {stats.n}")
    print(f"matrices: {', '.join(k.value for k in bundle.matrices)}")
    print(f"blm nnz: {stats.nnz}")
    print(f"blm sparsity: {stats.sparsity:.6f}")
    for kind, depth in bundle.depth_by_kind.items():
        print(f"max_nonredundant_depth[{kind.value}]: {depth}")
    print(f"backlink degree mean/std/max: {stats.degree_mean:.2f}/{stats.degree_std:.2f}/{stats.degree_max}")
    print(f"words with zero backlinks: {int((stats.backlink_degree == 0).sum())}")
    print(f"words that never excite the whole graph: {int((stats.min_full_depth == 0).sum())}")
    if args.out:
        paths = write_stats_report(stats, args.out)
        for p in paths:
            print(f"wrote {p}")
    return 0


def _format_accuracy(report) -> str:
    return "/".join(f"{report.accuracy[k]:.3f}" for k in _ACCURACY_KS)


def _cmd_eval(args: argparse.Namespace) -> int:
    _require_files(Path(args.index), Path(args.cases))
    bundle = load(args.index)
    cases = load_cases(args.cases)
    kind = MatrixKind(args.matrix) if args.matrix else None

    if args.depths:
        depths = [int(d) for d in args.depths.split(",")]
        reports, stable = depth_sweep(
            cases, bundle, depths, corr=args.corr, kind=kind, include_inputs=args.include_inputs
        )
        print("metric\t" + "\t".join(f"n={d}" for d in depths))
        for k in _ACCURACY_KS:
            print(f"acc@{k}\t" + "\t".join(f"{reports[d].accuracy[k]:.3f}" for d in depths))
        print(
            "median\t"
            + "\t".join(
                "-" if reports[d].median_rank is None else f"{reports[d].median_rank:g}"
                for d in depths
            )
        )
        if stable is not None:
            print(f"output stable from depth {stable}")
        last = reports[depths[-1]]
        _write_eval_tsv(args.out, last)
        return 0

    report = evaluate(
        cases, bundle, depth=args.depth, corr=args.corr, kind=kind, include_inputs=args.include_inputs
    )
    print(f"cases scored: {report.case_count} (skipped {report.skipped_count}, dropped {report.dropped_count})")
    print(f"depth: {report.depth}  matrix: {report.kind.value}  lexicon: {report.lexicon_size}")
    print(f"accuracy@1/10/100: {_format_accuracy(report)}")
    med = "-" if report.median_rank is None else f"{report.median_rank:g}"
    std_p = "-" if report.rank_std_population is None else f"{report.rank_std_population:.2f}"
    std_s = "-" if report.rank_std_sample is None else f"{report.rank_std_sample:.2f}"
    print(f"rank median (sub-100): {med}  std population/sample: {std_p}/{std_s}")
    _write_eval_tsv(args.out, report)
    return 0


def _write_eval_tsv(out: str | None, report) -> None:
    if not out:
        return
    path = Path(out)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("target\tphrase\trank\tstatus\n")
        for res in report.results:
            if res.skipped:
                status, rank = "skipped", "-"
            elif res.dropped:
                status, rank = "dropped", "-"
            elif res.not_found:
                status, rank = "not_found", str(res.rank)
            else:
                status, rank = "ok", str(res.rank)
            fh.write(f"{res.case.target}\t{res.case.phrase}\t{rank}\t{status}\n")
        fh.write(f"# accuracy@1/10/100\t{_format_accuracy(report)}\n")
        fh.write(f"# median_sub100\t{report.median_rank}\n")
        fh.write(f"# std_population_sub100\t{report.rank_std_population}\n")
        fh.write(f"# std_sample_sub100\t{report.rank_std_sample}\n")
        fh.write(f"# depth\t{report.depth}\n")
    print(f"wrote {path}")


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    _require_files(Path(args.index))
    static_dir = Path(args.static) if args.static else None
    if static_dir is not None and not static_dir.is_dir():
        raise FileNotFoundError(f"no such directory: {static_dir}")
    bundle = load(args.index)
    app = create_app(bundle, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revdict",
        description="Reverse dictionary: build an index from forward dictionaries, then query it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="ingest dictionaries and write an index bundle")
    p_build.add_argument("--dict", action="append", required=True, help="TSV forward dictionary (repeatable; multiple inputs are fused)")
    p_build.add_argument("--stopwords", help="stopword file (default: shipped English list)")
    p_build.add_argument("--rules", help="suffix-rule TSV (default: built-in table)")
    p_build.add_argument("--exceptions", help="irregular-form TSV (default: shipped English table)")
    p_build.add_argument("--out", required=True, help="output bundle path")
    p_build.add_argument("--build-mblm", action="store_true", help="also build the mixed back-linked matrix")
    p_build.add_argument("--build-flm", action="store_true", help="also build the forward-linked matrix")
    p_build.set_defaults(func=_cmd_build)

    p_query = sub.add_parser("query", help="rank words against a phrase")
    p_query.add_argument("--index", required=True)
    p_query.add_argument("phrase")
    p_query.add_argument("--limit", type=int, default=20)
    p_query.add_argument("--depth", type=int, default=None)
    p_query.add_argument("--matrix", choices=[k.value for k in MatrixKind], default=None)
    p_query.add_argument("--include-inputs", action="store_true")
    p_query.set_defaults(func=_cmd_query)

    p_stats = sub.add_parser("stats", help="print index diagnostics, optionally write report files")
    p_stats.add_argument("--index", required=True)
    p_stats.add_argument("--out", help="directory for the report and histogram TSVs")
    p_stats.set_defaults(func=_cmd_stats)

    p_eval = sub.add_parser("eval", help="rank targets of a test set and report accuracy@k")
    p_eval.add_argument("--index", required=True)
    p_eval.add_argument("--cases", required=True, help="TSV test set: target<TAB>phrase")
    p_eval.add_argument("--depth", type=int, default=None)
    p_eval.add_argument("--depths", help="comma-separated ascending depths for a sweep")
    p_eval.add_argument("--corr", action="store_true", help="drop cases whose target is outside the lexicon")
    p_eval.add_argument("--matrix", choices=[k.value for k in MatrixKind], default=None)
    p_eval.add_argument("--include-inputs", action="store_true")
    p_eval.add_argument("--out", help="write per-case ranks as TSV")
    p_eval.set_defaults(func=_cmd_eval)

    p_serve = sub.add_parser("serve", help="start the HTTP query service")
    p_serve.add_argument("--index", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--static", help="directory of web UI assets to serve at /")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, NoContentWordsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
