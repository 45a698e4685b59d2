"""Command-line entry point.

Subcommands: ``normalize`` (adapt one utterance), ``gen-data`` (write the
synthetic dataset splits), ``eval`` (score a backend on a JSONL file),
``replay`` (legacy-vs-shimmed failure comparison), ``repl`` (interactive
session on stdin), and ``serve`` (run the WebSocket gateway).

Structured output is JSON on stdout; human-readable logs go to stderr.
Exit codes: 0 success (normalize: command produced), 2 clarification
question asked, 3 suggestions shown, 64 usage error, 66 unreadable or
malformed data, 69 port unavailable.

Option precedence: command-line flags, then ``VOICESHIM_*`` environment
variables, then the ``[voiceshim]`` section of ``--config`` (INI), then
built-in defaults.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .dataset import (
    DatasetFormatError,
    DistributionSpec,
    InfeasibleSpecError,
    read_jsonl,
    write_splits,
)
from .evaluation import (
    EchoBackend,
    ReplayCase,
    ReplayConfig,
    RuleEvalBackend,
    evaluate,
    golden_replay_corpus,
    replay_compare,
)
from .lexicon import NormalizerLexicon, default_lexicon
from .normalizer import Clarify, Corrected, PassThrough, Suggest, normalize
from .normalizer import SelectionContext
from .grammar import serialize_canonical
from .segmenter import SegmenterConfig
from .session import Session, SessionConfig, events_to_ndjson

EX_OK = 0
EX_CLARIFY = 2
EX_SUGGEST = 3
EX_USAGE = 64
EX_DATA = 66
EX_PORT = 69

ENV_PREFIX = "VOICESHIM_"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EX_USAGE)


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as err:
        print(f"cannot read config file: {err}", file=sys.stderr)
        raise SystemExit(EX_DATA) from err
    return dict(parser.items("voiceshim")) if parser.has_section("voiceshim") else {}


def _resolve(name: str, flag_value, config: dict, default, cast):
    """flags > environment > config file > defaults."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if env is not None:
        return cast(env)
    if name in config:
        return cast(config[name])
    return default


def _lexicon_from(path: Optional[str]) -> NormalizerLexicon:
    if path is None:
        return default_lexicon()
    try:
        return NormalizerLexicon.load(path)
    except (OSError, configparser.Error, ValueError) as err:
        print(f"cannot load lexicon: {err}", file=sys.stderr)
        raise SystemExit(EX_DATA) from err


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


# --- subcommands -------------------------------------------------------------


def _cmd_normalize(args, config: dict) -> int:
    lexicon = _lexicon_from(_resolve("lexicon", args.lexicon, config, None, str))
    threshold = _resolve("threshold", args.threshold, config, None, int)
    if threshold is not None:
        lexicon = dataclasses.replace(lexicon, auto_apply_threshold=threshold)
    result = normalize(args.utterance, SelectionContext.of(args.selection),
                       tuple(args.history or ()), lexicon)
    if isinstance(result, (Corrected, PassThrough)):
        body = {"result": "corrected" if isinstance(result, Corrected) else "pass_through",
                "command": serialize_canonical(result.command)}
        if isinstance(result, Corrected):
            body["confidence"] = result.confidence
            body["repairs"] = [r.category.value for r in result.trace]
        _emit(body)
        return EX_OK
    if isinstance(result, Clarify):
        _emit({"result": "clarify", "question": result.question})
        return EX_CLARIFY
    assert isinstance(result, Suggest)
    _emit({"result": "suggest", "code": result.code,
           "suggestions": [{"text": s.text, "reason": s.reason}
                           for s in result.suggestions]})
    return EX_SUGGEST


def _cmd_gen_data(args, config: dict) -> int:
    seed = _resolve("seed", args.seed, config, 0, int)
    out_dir = _resolve("out-dir", args.out_dir, config, None, str)
    try:
        spec = DistributionSpec(sizes=(args.train, args.val, args.test), seed=seed)
        manifest = write_splits(out_dir, spec)
    except InfeasibleSpecError as err:
        print(f"infeasible dataset spec: {err}", file=sys.stderr)
        return EX_USAGE
    except OSError as err:
        print(f"cannot write dataset: {err}", file=sys.stderr)
        return EX_DATA
    _emit(manifest)
    return EX_OK


def _cmd_eval(args, config: dict) -> int:
    lexicon = _lexicon_from(_resolve("lexicon", args.lexicon, config, None, str))
    try:
        samples = read_jsonl(args.data)
    except (OSError, DatasetFormatError) as err:
        print(f"cannot read data: {err}", file=sys.stderr)
        return EX_DATA
    backend = RuleEvalBackend(lexicon) if args.backend == "rule" else EchoBackend()
    report = evaluate(backend, samples)
    print(report.format_table(), file=sys.stderr)
    body = report.to_json()
    _emit(body)
    if args.report:
        try:
            Path(args.report).write_text(
                json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        except OSError as err:
            print(f"cannot write report: {err}", file=sys.stderr)
            return EX_DATA
    return EX_OK


def _load_replay_corpus(path: str) -> list[ReplayCase]:
    cases = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                timing = obj.get("timing")
                cases.append(ReplayCase(
                    name=obj.get("name", f"case {line_no}"),
                    utterance=obj["utterance"],
                    buffer=obj["buffer"],
                    setup=tuple(obj.get("setup", ())),
                    timing=tuple(timing) if timing is not None else None,
                ))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
                raise DatasetFormatError(f"malformed replay case: {err}", line_no)
    return cases


def _cmd_replay(args, config: dict) -> int:
    seed = _resolve("seed", args.seed, config, 0, int)
    if args.corpus:
        try:
            corpus = _load_replay_corpus(args.corpus)
        except (OSError, DatasetFormatError) as err:
            print(f"cannot read corpus: {err}", file=sys.stderr)
            return EX_DATA
    else:
        corpus = golden_replay_corpus()
    replay_config = ReplayConfig(seed=seed, jitter_min_ms=args.jitter_min,
                                 jitter_max_ms=args.jitter_max)
    report = replay_compare(corpus, replay_config)
    print(report.format_table(), file=sys.stderr)
    _emit(report.to_json())
    return EX_OK


def _cmd_repl(args, config: dict) -> int:
    lexicon = _lexicon_from(_resolve("lexicon", args.lexicon, config, None, str))
    window = _resolve("window-ms", args.window_ms, config,
                      SegmenterConfig.shim().window_ms, int)
    session = Session(
        initial_text=args.text or "",
        config=SessionConfig(segmenter=SegmenterConfig.shim(window_ms=window),
                             lexicon=lexicon),
    )
    print("type an utterance per line; empty line or EOF quits", file=sys.stderr)
    for line in sys.stdin:
        text = line.strip()
        if not text:
            break
        sys.stdout.write(events_to_ndjson(session.utter(text)))
        sys.stdout.flush()
    return EX_OK


def _cmd_serve(args, config: dict) -> int:
    from .gateway import serve

    lexicon = _lexicon_from(_resolve("lexicon", args.lexicon, config, None, str))
    port = _resolve("port", args.port, config, 8777, int)
    try:
        serve(port=port, host=args.host, lexicon=lexicon)
    except OSError as err:
        print(f"cannot bind port {port}: {err}", file=sys.stderr)
        return EX_PORT
    return EX_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="voiceshim",
                     description="Adapt natural voice commands to a fixed-syntax "
                                 "legacy voice interface.")
    parser.add_argument("--config", help="INI file with a [voiceshim] section")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="adapt one utterance", parents=[])
    p.add_argument("--utterance", required=True)
    p.add_argument("--selection", help="currently selected phrase")
    p.add_argument("--history", action="append",
                   help="recently executed command (repeatable, most recent first)")
    p.add_argument("--lexicon", help="rule lexicon INI file")
    p.add_argument("--threshold", type=int, help="auto-apply confidence threshold")
    p.set_defaults(run=_cmd_normalize)

    p = sub.add_parser("gen-data", help="write synthetic dataset splits")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--train", type=int, default=DistributionSpec().sizes[0])
    p.add_argument("--val", type=int, default=DistributionSpec().sizes[1])
    p.add_argument("--test", type=int, default=DistributionSpec().sizes[2])
    p.set_defaults(run=_cmd_gen_data)

    p = sub.add_parser("eval", help="score a backend on a JSONL dataset")
    p.add_argument("--data", required=True, help="JSONL dataset file")
    p.add_argument("--backend", choices=("rule", "echo", "stub"), default="rule",
                   help="'stub' is an alias for the echo baseline")
    p.add_argument("--report", help="also write the JSON report here")
    p.add_argument("--lexicon")
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("replay", help="legacy-vs-shimmed failure comparison")
    p.add_argument("--corpus", help="replay corpus JSONL; defaults to the "
                                    "built-in incorrect-command corpus")
    p.add_argument("--seed", type=int)
    p.add_argument("--jitter-min", type=int, default=ReplayConfig().jitter_min_ms)
    p.add_argument("--jitter-max", type=int, default=ReplayConfig().jitter_max_ms)
    p.set_defaults(run=_cmd_replay)

    p = sub.add_parser("repl", help="interactive line-oriented session")
    p.add_argument("--text", help="initial buffer text")
    p.add_argument("--lexicon")
    p.add_argument("--window-ms", type=int, dest="window_ms")
    p.set_defaults(run=_cmd_repl)

    p = sub.add_parser("serve", help="run the WebSocket gateway")
    p.add_argument("--port", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--lexicon")
    p.set_defaults(run=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _load_config(args.config)
    try:
        return args.run(args, config)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
