"""Command-line front end for the simplification pipeline.

Subcommands: simplify (raw lines in, simplified lines out), augment,
prepare-eval, report, filter-stats. Each is a thin adapter over the library
operations. Exit codes: 0 success, 2 configuration error, 3 input validation
error, 4 backend failure. Diagnostics go to stderr and never include dataset
content.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .augment import (
    EVAL_MODES,
    FILTERS,
    STRATEGIES,
    AugmentationPlan,
    run_plan,
    run_prepare_eval,
)
from .backends import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_TIMEOUT,
    Backend,
    BackendError,
    EchoBackend,
    create_backend,
    parse_backend_spec,
    simplify_batch,
)
from .data import (
    TASK_NLI,
    TASK_RELATION,
    TASKS,
    DatasetError,
    read_dataset,
    write_dataset,
)
from .metrics import ZERO_POLICIES, BleuConfig, divergence_report
from .preservation import filter_stats

log = logging.getLogger(__name__)

ENV_BACKEND = "SIMPAUG_BACKEND"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_BACKEND = 4


class ConfigError(Exception):
    """Inconsistent or incomplete command-line configuration."""


def _backend_from(args) -> Backend:
    spec = args.backend or os.environ.get(ENV_BACKEND)
    if not spec:
        raise ConfigError(f"no backend given (--backend or ${ENV_BACKEND})")
    try:
        parsed = parse_backend_spec(spec, batch_size=args.batch_size, timeout=args.timeout)
        return create_backend(parsed)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc


def _check_overwrite(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise ConfigError(f"refusing to overwrite {path} (use --force)")


def _manifest_path(output: Path) -> Path:
    return Path(str(output) + ".manifest")


def _write_manifest(manifest: dict, output: Path, force: bool) -> None:
    path = _manifest_path(output)
    _check_overwrite(path, force)
    path.write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _load(task: str, path: str):
    try:
        return read_dataset(task, path)
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror or exc}") from exc


# --- subcommands ----------------------------------------------------------------


def cmd_simplify(args) -> int:
    backend = _backend_from(args)
    if args.input == "-":
        lines = sys.stdin.read().splitlines()
    else:
        lines = Path(args.input).read_text(encoding="utf-8").splitlines()
    todo = [(i, line) for i, line in enumerate(lines) if line.strip()]
    with backend:
        outcomes = simplify_batch(backend, [line for _, line in todo])
    out = list(lines)
    for (i, _), outcome in zip(todo, outcomes):
        if outcome.error:
            log.warning("line %d failed, kept as-is", i + 1)
        out[i] = outcome.simplified
    payload = "".join(line + "\n" for line in out)
    if args.output == "-":
        sys.stdout.write(payload)
    else:
        Path(args.output).write_text(payload, encoding="utf-8")
    return EXIT_OK


def cmd_augment(args) -> int:
    fields = tuple(args.fields.split(",")) if args.fields else None
    plan = AugmentationPlan(
        strategy=args.strategy,
        fraction=args.fraction,
        seed=args.seed,
        filter=args.filter,
        fields=fields,
        id_suffix=args.id_suffix,
    )
    try:
        plan.validate(args.task)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    dataset = _load(args.task, args.input)
    output = Path(args.output)
    _check_overwrite(output, args.force)
    backend = _backend_from(args)
    with backend:
        result = run_plan(dataset, backend, plan)
    write_dataset(result.dataset, output)
    manifest = dict(result.manifest, input_path=args.input, output_path=str(output))
    _write_manifest(manifest, output, args.force)
    return EXIT_OK


def cmd_prepare_eval(args) -> int:
    dataset = _load(args.task, args.input)
    output = Path(args.output)
    _check_overwrite(output, args.force)
    if args.mode == "original" and not (args.backend or os.environ.get(ENV_BACKEND)):
        backend = EchoBackend()
    else:
        backend = _backend_from(args)
    with backend:
        try:
            result = run_prepare_eval(dataset, backend, args.mode)
        except DatasetError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    write_dataset(result.dataset, output)
    manifest = dict(result.manifest, input_path=args.input, output_path=str(output))
    _write_manifest(manifest, output, args.force)
    return EXIT_OK


def _report_pairs(task: str, original, simplified) -> list[tuple[str, str, str]]:
    by_id = {ex.id: ex for ex in simplified.examples}
    missing = [ex.id for ex in original.examples if ex.id not in by_id]
    extra = set(by_id) - {ex.id for ex in original.examples}
    if missing or extra:
        raise DatasetError(
            f"datasets are not aligned: {len(missing)} ids missing from the"
            f" simplified side, {len(extra)} extra"
        )
    pairs: list[tuple[str, str, str]] = []
    for orig in original.examples:
        simp = by_id[orig.id]
        if task == TASK_RELATION:
            pairs.append(("sentence", orig.text(), simp.text()))
        elif task == TASK_NLI:
            pairs.append(("premise", orig.premise, simp.premise))
            pairs.append(("hypothesis", orig.hypothesis, simp.hypothesis))
        else:
            for name, text in orig.fields.items():
                if name in simp.fields:
                    pairs.append((name, text, simp.fields[name]))
    return pairs


def cmd_report(args) -> int:
    original_path = args.original
    if not original_path:
        manifest_file = _manifest_path(Path(args.simplified))
        try:
            manifest = json.loads(manifest_file.read_text(encoding="utf-8"))
            original_path = manifest["input_path"]
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(
                f"--original not given and {manifest_file} does not name an input"
            ) from exc
    original = _load(args.task, original_path)
    simplified = _load(args.task, args.simplified)
    cfg = BleuConfig(
        max_order=args.max_order,
        zero_policy=args.zero_policy,
        lowercase=not args.case_sensitive,
    )
    report = divergence_report(_report_pairs(args.task, original, simplified), cfg)
    print(report.render_text())
    if args.json:
        Path(args.json).write_text(
            json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    return EXIT_OK


def cmd_filter_stats(args) -> int:
    dataset = _load(TASK_RELATION, args.input)
    backend = _backend_from(args)
    with backend:
        outcomes = simplify_batch(backend, [ex.text() for ex in dataset.examples])
    stats = filter_stats(dataset, outcomes)
    print(stats.render_text())
    if args.json:
        record = dict(stats.to_dict(), backend=backend.backend_id, input_path=args.input)
        Path(args.json).write_text(
            json.dumps(record, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def _add_backend_flags(sub) -> None:
    sub.add_argument(
        "--backend",
        help=f"backend spec: echo, rules:LEXICON, proc:CMD, http:URL (default ${ENV_BACKEND})",
    )
    sub.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE)
    sub.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT,
                     help="backend timeout in seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simpaug",
        description="Text simplification as a preprocessing and augmentation tool for NLP datasets.",
    )
    parser.add_argument("--log-level", default="warning",
                        choices=["debug", "info", "warning", "error"])
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("simplify", help="simplify raw text lines")
    p.add_argument("--input", default="-", help="text file, one item per line (default stdin)")
    p.add_argument("--output", default="-", help="output file (default stdout)")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_simplify)

    p = commands.add_parser("augment", help="build an augmented training set")
    p.add_argument("--task", required=True, choices=TASKS)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--strategy", required=True, choices=STRATEGIES)
    p.add_argument("--fraction", type=float, help="fraction to sample (append/swap)")
    p.add_argument("--seed", type=int, help="sampling seed; required for append/swap")
    p.add_argument("--filter", default="none", choices=FILTERS)
    p.add_argument("--fields", help="comma-separated text fields to simplify")
    p.add_argument("--id-suffix", default="-simp")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_augment)

    p = commands.add_parser("prepare-eval", help="simplify evaluation inputs")
    p.add_argument("--task", required=True, choices=TASKS)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--mode", required=True, choices=EVAL_MODES)
    p.add_argument("--force", action="store_true")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_prepare_eval)

    p = commands.add_parser("report", help="BLEU divergence between two aligned datasets")
    p.add_argument("--task", required=True, choices=TASKS)
    p.add_argument("--original", help="original dataset (default: from the manifest)")
    p.add_argument("--simplified", required=True)
    p.add_argument("--json", help="also write the structured report here")
    p.add_argument("--max-order", type=int, default=4)
    p.add_argument("--zero-policy", default="cap-order", choices=ZERO_POLICIES)
    p.add_argument("--case-sensitive", action="store_true")
    p.set_defaults(func=cmd_report)

    p = commands.add_parser("filter-stats", help="entity-preservation pass rate of a backend")
    p.add_argument("--input", required=True, help="relation dataset")
    p.add_argument("--json", help="also write the structured stats here")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_filter_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"run 'simpaug {args.command} --help' for usage", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BackendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
