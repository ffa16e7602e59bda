"""Operator entry point.

Subcommands: ``play`` runs a contest from a config file, ``score`` recomputes
every metric from stored transcripts without touching any backend, ``words``
screens word pairs by embedding similarity. Exit codes: 0 ok, 2 config
problem, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import yaml

from .config import build_runtime, load_config, parse_word_pairs
from .errors import ArenaError, CorruptRecord, InvalidConfig
from .similarity import (
    PLAYABILITY_THRESHOLD,
    MockEmbedder,
    ServiceEmbedder,
    SimilarityIndex,
)
from .tournament import load_record, score_records, run_contest
from .words import DEFAULT_WORD_PAIRS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _write_report(report, out: Path) -> None:
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
    )
    with (out / "report.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "game_index",
                "seed",
                "citizen_word",
                "spy_word",
                "winner",
                "reason",
                "rounds_played",
                "eliminated_citizens",
                "fallback",
                "spy_score",
                "citizen_mean_score",
            ]
        )
        for row in report.per_game:
            spy_scores = [
                p["score"] for p in row["players"].values() if p["seat"] == "spy"
            ]
            cit_scores = [
                p["score"] for p in row["players"].values() if p["seat"] == "citizen"
            ]
            writer.writerow(
                [
                    row["game_index"],
                    row["seed"],
                    row["citizen_word"],
                    row["spy_word"],
                    row["winner"],
                    row["reason"],
                    row["rounds_played"],
                    row["eliminated_citizens"],
                    row["fallback"],
                    f"{spy_scores[0]:.6f}" if spy_scores else "",
                    f"{sum(cit_scores) / len(cit_scores):.6f}" if cit_scores else "",
                ]
            )


def _print_summary(report) -> None:
    m = report.metrics
    print(f"games scored        : {report.n_games} (aborted {report.aborted}, "
          f"fallback-excluded {report.excluded_fallback})")
    print(f"spy win rate        : {m['spy_win_rate']:.4f}")
    print(f"citizen elim. rate  : {m['citizen_elimination_rate']:.4f}")
    print(f"average rounds      : {m['avg_rounds']:.4f}")
    for seat in ("spy", "citizen"):
        a = report.attribution[seat]
        print(
            f"{seat:<8} attribution : soundness {a['soundness']:.4f}  "
            f"alignment {a['alignment']:.4f}  score {a['score']:.4f}  "
            f"(n={a['n_agents']})"
        )


def _prepare_out(path_str: str, force: bool) -> Path:
    out = Path(path_str)
    if out.exists() and any(out.iterdir()) and not force:
        raise InvalidConfig(
            f"output directory {out} is not empty; pass --force to overwrite"
        )
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_play(args) -> int:
    try:
        spec, services = load_config(args.config)
        if args.seed is not None:
            from dataclasses import replace

            spec = replace(spec, base_seed=args.seed)
        out = _prepare_out(args.out, args.force)
        runtime = build_runtime(services, spec.base_seed, force_mock=args.backend == "mock")
    except InvalidConfig as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        report, _records = run_contest(
            spec,
            runtime,
            out_dir=out,
            workers=args.workers,
            exclude_fallback=args.exclude_fallback_games,
            verbose=args.verbose,
        )
    except ArenaError as exc:
        return _fail(EXIT_RUNTIME, str(exc))
    _write_report(report, out)
    _print_summary(report)
    print(f"records + report written to {out}")
    return EXIT_OK


def _collect_transcripts(paths: list[str]) -> tuple[list[Path], str | None]:
    files: list[Path] = []
    embedder_hint = None
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            manifest = p / "manifest.json"
            if manifest.exists():
                data = json.loads(manifest.read_text(encoding="utf-8"))
                embedder_hint = data.get("embedder")
                files.extend(p / f for f in data.get("files", []))
            else:
                files.extend(sorted(p.glob("**/*.jsonl")))
        elif p.suffix == ".jsonl":
            files.append(p)
    return files, embedder_hint


def cmd_score(args) -> int:
    files, embedder_hint = _collect_transcripts(args.transcripts)
    if not files:
        return _fail(EXIT_CONFIG, "no .jsonl transcripts found under the given paths")
    records = []
    warnings = 0
    for path in files:
        try:
            records.append(load_record(path))
        except (CorruptRecord, OSError) as exc:
            warnings += 1
            print(f"warning: skipping {path}: {exc}", file=sys.stderr)
    if not records:
        return _fail(EXIT_CONFIG, "every transcript was unreadable")
    try:
        out = _prepare_out(args.out, args.force)
    except InvalidConfig as exc:
        return _fail(EXIT_CONFIG, str(exc))
    embedder = MockEmbedder()
    if args.embedding_url:
        embedder = ServiceEmbedder(args.embedding_url)
    elif embedder_hint and not embedder_hint.startswith("hashed-bow"):
        print(
            f"warning: records were scored with {embedder_hint!r}; "
            "re-scoring with the offline embedder",
            file=sys.stderr,
        )
    try:
        report = score_records(
            records,
            embedder,
            exclude_fallback=args.exclude_fallback_games,
            verbose=args.verbose,
        )
    except ArenaError as exc:
        return _fail(EXIT_RUNTIME, str(exc))
    _write_report(report, out)
    _print_summary(report)
    if warnings:
        print(f"finished with {warnings} skipped transcript(s)", file=sys.stderr)
    return EXIT_OK


def cmd_words(args) -> int:
    try:
        if args.pairs:
            data = yaml.safe_load(Path(args.pairs).read_text(encoding="utf-8"))
            pairs = parse_word_pairs(data.get("word_pairs", data) if isinstance(data, dict) else data)
        else:
            pairs = DEFAULT_WORD_PAIRS
    except (OSError, yaml.YAMLError, InvalidConfig) as exc:
        return _fail(EXIT_CONFIG, f"cannot read word pairs: {exc}")
    embedder = ServiceEmbedder(args.embedding_url) if args.embedding_url else MockEmbedder()
    index = SimilarityIndex(embedder)
    print(f"{'citizen word':<24} {'spy word':<24} {'cosine':>8}  advisory")
    try:
        for pair in pairs:
            cos = index.raw_cosine(pair.citizen_word, pair.spy_word)
            flag = "playable" if cos >= PLAYABILITY_THRESHOLD else "too easy"
            print(
                f"{pair.citizen_word:<24} {pair.spy_word:<24} {cos:>8.4f}  "
                f"{flag} (threshold {PLAYABILITY_THRESHOLD})"
            )
    except ArenaError as exc:
        return _fail(EXIT_RUNTIME, str(exc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="undercover", description="social-deduction arena operator tool"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    play = sub.add_parser("play", help="run a contest from a config file")
    play.add_argument("--config", required=True, help="contest config (YAML)")
    play.add_argument("--out", required=True, help="output directory")
    play.add_argument(
        "--backend", choices=["mock", "live"], default=None,
        help="mock forces offline services regardless of config",
    )
    play.add_argument("--workers", type=int, default=1)
    play.add_argument("--seed", type=int, default=None, help="override base seed")
    play.add_argument("--exclude-fallback-games", action="store_true")
    play.add_argument("--force", action="store_true", help="overwrite output dir")
    play.add_argument(
        "--verbose", action="store_true", help="include per-round metric traces"
    )
    play.set_defaults(func=cmd_play)

    score = sub.add_parser("score", help="recompute metrics from transcripts")
    score.add_argument("transcripts", nargs="+", help="JSONL files or contest dirs")
    score.add_argument("--out", required=True)
    score.add_argument("--embedding-url", default=None)
    score.add_argument("--exclude-fallback-games", action="store_true")
    score.add_argument("--force", action="store_true")
    score.add_argument(
        "--verbose", action="store_true", help="include per-round metric traces"
    )
    score.set_defaults(func=cmd_score)

    words = sub.add_parser("words", help="screen word pairs by similarity")
    words.add_argument("--pairs", default=None, help="YAML file of word pairs")
    words.add_argument("--embedding-url", default=None)
    words.set_defaults(func=cmd_words)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
