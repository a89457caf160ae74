"""Command-line interface.

The bare command annotates text from a file or stdin:

    echo "some text" | glitter --model demo.glng
    glitter letter.txt --model demo.glng --format html > letter.html

Three named subcommands cover the rest of the lifecycle:

    glitter train corpus.txt --out model.glng
    glitter batch *.txt --model model.glng
    glitter serve --config service.toml

Exit codes: 0 success, 1 usage or configuration problem, 2 unreadable or
invalid input, 3 backend failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import os
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import canonical
from .backends import (
    Backend,
    HttpLogprobBackend,
    NgramBackend,
    PrecomputedBackend,
    load_model,
    save_model,
    train_ngram,
    write_dump,
)
from .config import GlitterConfig, build_backend, load_settings
from .core import NUM_BUCKETS
from .errors import (
    AlignmentError,
    BackendError,
    ConfigError,
    DomainError,
    EmptyTextError,
    GlitterError,
    ModelFormatError,
    TrainingError,
)
from .palette import load_palette
from .pipeline import dump_records, glitter
from .render import to_ansi, to_html, to_structured

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_BACKEND = 3

SUBCOMMANDS = ("train", "batch", "serve")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; this interface reserves 2 for
    # input problems, so route parse errors through the usage path instead
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _fail(message: str, code: int) -> int:
    print(f"glitter: {message}", file=sys.stderr)
    return code


def _classify(exc: Exception) -> int:
    if isinstance(exc, (UsageError, ConfigError, DomainError)):
        return EXIT_USAGE
    if isinstance(exc, (EmptyTextError, AlignmentError, TrainingError, OSError, UnicodeDecodeError)):
        return EXIT_INPUT
    if isinstance(exc, (BackendError, ModelFormatError, GlitterError)):
        return EXIT_BACKEND
    raise exc


def _guarded(body: Callable[[], int]) -> int:
    try:
        return body()
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except Exception as exc:
        return _fail(str(exc), _classify(exc))


def _read_text(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _add_source_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("probability source (pick one)")
    group.add_argument("--model", help="model file for local scoring, or the remote model name when --endpoint is given")
    group.add_argument("--dump", help="precomputed score dump to replay")
    group.add_argument("--endpoint", help="completions endpoint URL")
    group.add_argument("--api-key-env", metavar="VAR", help="environment variable holding the endpoint API key")
    group.add_argument("--backend", help="backend id from the --config registry")
    group.add_argument("--config", help="TOML configuration file (for --backend)")
    group.add_argument("--mode", choices=("kn", "mle"), default="kn", help="model distribution: smoothed or raw counts")
    group.add_argument("--max-context", type=int, metavar="N", help="cap the scoring context at N tokens")


def _add_annotation_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("annotation options")
    group.add_argument("--base", choices=("2", "e"), help="surprisal log base (default 2, i.e. bits)")
    group.add_argument("--top-k", type=int, help="candidates to record per position (display caps at 5)")
    group.add_argument("--formulaic-threshold", type=float, help="per-word surprisal threshold for runs")
    group.add_argument("--formulaic-min-len", type=int, help="minimum words per formulaic run")


def _config_from_flags(args: argparse.Namespace) -> GlitterConfig:
    base = GlitterConfig()
    if args.backend and args.config:
        base = load_settings(args.config).annotation
    return base.override(
        base=None if args.base is None else (2.0 if args.base == "2" else math.e),
        top_k=args.top_k,
        formulaic_threshold=args.formulaic_threshold,
        formulaic_min_len=args.formulaic_min_len,
    )


def _backend_from_flags(args: argparse.Namespace) -> Backend:
    chosen = [
        name
        for name, value in (
            ("--model", args.model and not args.endpoint),
            ("--dump", args.dump),
            ("--endpoint", args.endpoint),
            ("--backend", args.backend),
        )
        if value
    ]
    if len(chosen) != 1:
        raise UsageError(
            "pick exactly one probability source: --model FILE, --dump FILE, "
            "--endpoint URL, or --backend ID with --config FILE"
        )
    if args.backend:
        if not args.config:
            raise UsageError("--backend needs --config pointing at the registry file")
        settings = load_settings(args.config)
        for spec in settings.backends:
            if spec.id == args.backend:
                return build_backend(spec)
        raise ConfigError(f"no backend {args.backend!r} in {args.config}")
    if args.endpoint:
        if not args.model:
            raise UsageError("--endpoint needs --model with the remote model name")
        api_key = None
        if args.api_key_env:
            api_key = os.environ.get(args.api_key_env)
            if api_key is None:
                raise ConfigError(f"environment variable {args.api_key_env} is not set")
        kwargs = {"max_context_tokens": args.max_context} if args.max_context else {}
        return HttpLogprobBackend(args.endpoint, args.model, api_key=api_key, **kwargs)
    if args.dump:
        return PrecomputedBackend.from_path(args.dump)
    return NgramBackend(
        load_model(args.model), mode=args.mode, max_context_tokens=args.max_context
    )


def cmd_glitter(argv: Sequence[str]) -> int:
    parser = _Parser(
        prog="glitter",
        description="Annotate text with per-token surprisal and render it as a heat map.",
    )
    parser.add_argument("input", nargs="?", help="text file to annotate (default: stdin)")
    _add_source_flags(parser)
    _add_annotation_flags(parser)
    render = parser.add_argument_group("rendering")
    render.add_argument("--format", choices=("ansi", "html", "json"), help="output format (default: ansi on a terminal, json otherwise)")
    render.add_argument("--theme", choices=("light", "dark"), default="dark", help="ANSI palette theme")
    render.add_argument("--palette", help="palette file overriding the bundled colors")
    render.add_argument("--force-color", action="store_true", help="color even when NO_COLOR is set or output is piped")
    parser.add_argument("--save-dump", metavar="FILE", help="also write the scores as a replayable dump")

    def body() -> int:
        args = parser.parse_args(argv)
        config = _config_from_flags(args)
        backend = _backend_from_flags(args)
        text = _read_text(args.input)
        document = glitter(text, backend, config)
        if args.save_dump:
            write_dump(
                args.save_dump,
                dump_records(document),
                tokenizer=f"{backend.backend_id}/{backend.model_id}",
            )
        fmt = args.format or ("ansi" if sys.stdout.isatty() else "json")
        palette = load_palette(args.palette) if args.palette else None
        if fmt == "json":
            sys.stdout.buffer.write(to_structured(document))
            sys.stdout.buffer.flush()
        elif fmt == "html":
            sys.stdout.write(to_html(document, palette))
        else:
            rendered = to_ansi(document, palette, theme=args.theme, force_color=args.force_color)
            sys.stdout.write(rendered)
            if not rendered.endswith("\n"):
                sys.stdout.write("\n")
        return EXIT_OK

    return _guarded(body)


def cmd_train(argv: Sequence[str]) -> int:
    parser = _Parser(prog="glitter train", description="Train an n-gram model and save it.")
    parser.add_argument("corpus", help="training text file ('-' for stdin)")
    parser.add_argument("--out", required=True, help="where to write the model file")
    parser.add_argument("--order", type=int, default=3, help="n-gram order (default 3)")
    parser.add_argument("--discount", type=float, default=0.75, help="absolute discount in (0, 1)")
    parser.add_argument("--unk-threshold", type=int, default=1, help="types at or below this count become the unknown token")
    parser.add_argument("--heldout", help="text file for a held-out perplexity report")

    def body() -> int:
        args = parser.parse_args(argv)
        corpus = _read_text(args.corpus)
        model = train_ngram(
            corpus, order=args.order, discount=args.discount, unk_threshold=args.unk_threshold
        )
        save_model(model, args.out)
        token_count = sum(sum(nexts.values()) for nexts in model.counts[0].values())
        print(f"trained order-{model.order} model: {len(model.vocab)} types, {token_count} tokens")
        print(f"saved to {args.out} ({Path(args.out).stat().st_size} bytes)")
        if args.heldout:
            backend = NgramBackend(model)
            ppl = backend.perplexity(_read_text(args.heldout))
            print(f"held-out perplexity: {ppl:.3f}")
        return EXIT_OK

    return _guarded(body)


def _cell(value: float | None) -> str:
    return "" if value is None else canonical.dumps(value)


def _stats_row(path: str, document) -> list[str]:
    stats = document.stats
    row = [
        path,
        str(stats.token_count),
        str(stats.word_count),
        _cell(stats.mean_surprisal),
        _cell(stats.perplexity),
        _cell(stats.formulaic_coverage),
    ]
    row.extend(str(n) for n in stats.bucket_histogram)
    return row


def cmd_batch(argv: Sequence[str]) -> int:
    parser = _Parser(
        prog="glitter batch",
        description="Annotate many files and print one TSV row of statistics per file.",
    )
    parser.add_argument("files", nargs="+", help="text files to annotate")
    _add_source_flags(parser)
    _add_annotation_flags(parser)
    parser.add_argument("--jobs", type=int, default=4, help="files annotated in parallel")

    def body() -> int:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        config = _config_from_flags(args)
        backend = _backend_from_flags(args)

        def annotate(path: str):
            return glitter(_read_text(path), backend, config)

        rows: list[list[str]] = []
        failure_codes: list[int] = []
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = {pool.submit(annotate, path): path for path in args.files}
            for future in concurrent.futures.as_completed(futures):
                path = futures[future]
                try:
                    rows.append(_stats_row(path, future.result()))
                except (GlitterError, OSError, UnicodeDecodeError) as exc:
                    failure_codes.append(_classify(exc))
                    print(f"glitter: {path}: {exc}", file=sys.stderr)
        header = [
            "path",
            "token_count",
            "word_count",
            "mean_surprisal",
            "perplexity",
            "formulaic_coverage",
        ] + [f"bucket_{b}" for b in range(NUM_BUCKETS)]
        print("\t".join(header))
        for row in sorted(rows, key=lambda r: r[0]):
            print("\t".join(row))
        return max(failure_codes) if failure_codes else EXIT_OK

    return _guarded(body)


def cmd_serve(argv: Sequence[str]) -> int:
    parser = _Parser(prog="glitter serve", description="Run the annotation service.")
    parser.add_argument("--config", required=True, help="TOML configuration file")
    parser.add_argument("--host", help="override the configured listen host")
    parser.add_argument("--port", type=int, help="override the configured listen port")

    def body() -> int:
        args = parser.parse_args(argv)
        settings = load_settings(args.config)
        # imported lazily so annotate/train/batch work without service deps
        import uvicorn

        from .config import build_registry
        from .service import create_app

        registry = build_registry(settings)
        app = create_app(registry, settings)
        uvicorn.run(app, host=args.host or settings.host, port=args.port or settings.port)
        return EXIT_OK

    return _guarded(body)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in SUBCOMMANDS:
        command, rest = argv[0], argv[1:]
        if command == "train":
            return cmd_train(rest)
        if command == "batch":
            return cmd_batch(rest)
        return cmd_serve(rest)
    return cmd_glitter(argv)


if __name__ == "__main__":
    raise SystemExit(main())
