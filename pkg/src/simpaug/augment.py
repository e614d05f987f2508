"""Training-set construction strategies and the prediction-time wrapper.

Three strategies build training data: ``append`` adds simplified copies of a
sampled fraction of examples, ``swap`` replaces a sampled fraction in place,
and ``replace-if-preserved`` substitutes every example whose simplification
keeps both entities. ``prepare_eval`` applies the same machinery to evaluation
data without touching labels or ids.

Sampling is exact-fraction over a seed-keyed permutation, so a (dataset, plan,
backend) triple always produces the same bytes. Simplified copies of relation
examples need relocated entity spans to stay valid, so relation augmentation
always runs the preservation check regardless of the plan's filter setting;
outputs that fail it are skipped and counted as filtered.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass

from .backends import Backend, SimplifyOutcome, simplify_batch
from .data import (
    TASK_GENERIC,
    TASK_NLI,
    TASK_RELATION,
    Dataset,
    DatasetError,
    GenericExample,
    NliExample,
    RelationExample,
)
from .metrics import tokenize
from .preservation import check_preservation

log = logging.getLogger(__name__)

STRATEGIES = ("append", "swap", "replace-if-preserved")
FILTERS = ("none", "entity-preservation")
EVAL_MODES = ("original", "simplified", "simplified-complement")

DEFAULT_ID_SUFFIX = "-simp"

RELATION_FIELD = "sentence"
NLI_FIELDS = ("premise", "hypothesis")


@dataclass(frozen=True)
class AugmentationPlan:
    """Everything that determines an augmented dataset, seed included."""

    strategy: str
    fraction: float | None = None
    seed: int | None = None
    filter: str = "none"
    fields: tuple[str, ...] | None = None
    id_suffix: str = DEFAULT_ID_SUFFIX

    def validate(self, task: str | None = None) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.filter not in FILTERS:
            raise ValueError(f"unknown filter {self.filter!r}")
        if self.strategy in ("append", "swap"):
            if self.fraction is None:
                raise ValueError(f"strategy {self.strategy} requires a fraction")
            if not 0.0 <= self.fraction <= 1.0:
                raise ValueError(f"fraction must be in [0, 1], got {self.fraction}")
            if self.seed is None:
                raise ValueError(f"strategy {self.strategy} requires a seed")
        else:
            if self.fraction is not None:
                raise ValueError("replace-if-preserved applies to all examples; drop the fraction")
        if self.filter == "entity-preservation" and task not in (None, TASK_RELATION):
            raise ValueError("entity-preservation filtering only applies to relation datasets")
        if not self.id_suffix:
            raise ValueError("id_suffix must be non-empty")

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "fraction": self.fraction,
            "seed": self.seed,
            "filter": self.filter,
            "fields": list(self.fields) if self.fields is not None else None,
            "id_suffix": self.id_suffix,
        }


@dataclass
class RunStats:
    """Counters for one engine run, echoed into the manifest."""

    selected: int = 0
    appended: int = 0
    swapped: int = 0
    replaced: int = 0
    simplified: int = 0
    unchanged: int = 0
    failed: int = 0
    filtered: int = 0

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass(frozen=True)
class RunResult:
    dataset: Dataset
    manifest: dict


def select_indices(n: int, fraction: float, seed: int) -> list[int]:
    """Exactly floor(fraction * n) indices, ascending, as the prefix of a
    seed-keyed permutation of range(n). Same (n, fraction, seed) gives the
    same set."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    # epsilon guards representation noise in fraction * n (e.g. 0.29 * 100)
    k = min(n, int(math.floor(fraction * n + 1e-9)))
    order = list(range(n))
    random.Random(seed).shuffle(order)
    return sorted(order[:k])


# --- field plumbing ---------------------------------------------------------------


def _task_fields(dataset: Dataset, requested: tuple[str, ...] | None) -> tuple[str, ...]:
    if dataset.task == TASK_RELATION:
        if requested not in (None, (RELATION_FIELD,)):
            raise ValueError(f"relation datasets have one text field, {RELATION_FIELD!r}")
        return (RELATION_FIELD,)
    if dataset.task == TASK_NLI:
        if requested is None:
            return NLI_FIELDS
        bad = [f for f in requested if f not in NLI_FIELDS]
        if bad:
            raise ValueError(f"unknown nli fields: {', '.join(bad)}")
        return tuple(requested)
    return requested if requested is not None else ()


def _field_text(example, name: str, task: str) -> str:
    if task == TASK_RELATION:
        return example.text()
    if task == TASK_NLI:
        return example.premise if name == "premise" else example.hypothesis
    try:
        return example.fields[name]
    except KeyError:
        raise DatasetError(f"example {example.id!r} has no field {name!r}") from None


def _simplify_examples(
    dataset: Dataset,
    backend: Backend,
    indices: list[int],
    fields: tuple[str, ...],
) -> dict[int, dict[str, SimplifyOutcome]]:
    """One backend pass over the chosen examples; outcomes keyed by (index, field)."""
    texts: list[str] = []
    slots: list[tuple[int, str]] = []
    for idx in indices:
        example = dataset.examples[idx]
        names = fields or tuple((example.fields or {}).keys())
        for name in names:
            text = _field_text(example, name, dataset.task)
            if not text.strip():
                continue
            slots.append((idx, name))
            texts.append(text)
    outcomes = simplify_batch(backend, texts)
    result: dict[int, dict[str, SimplifyOutcome]] = {idx: {} for idx in indices}
    for (idx, name), outcome in zip(slots, outcomes):
        result[idx][name] = outcome
    return result


def _build_simplified(example, per_field: dict[str, SimplifyOutcome], task: str, new_id: str):
    """Simplified copy of ``example``; None when a relation example loses an entity.

    Relation copies drop pos/ner: per-token tags cannot be carried across
    rewriting and no re-annotation backend is configured here.
    """
    if task == TASK_RELATION:
        simplified = per_field[RELATION_FIELD].simplified
        verdict = check_preservation(example, simplified)
        if not verdict.passed:
            return None
        return RelationExample(
            id=new_id,
            tokens=tokenize(simplified),
            subj_span=verdict.new_subj_span,
            obj_span=verdict.new_obj_span,
            subj_type=example.subj_type,
            obj_type=example.obj_type,
            relation=example.relation,
        )
    if task == TASK_NLI:
        return NliExample(
            pair_id=new_id,
            premise=per_field["premise"].simplified if "premise" in per_field else example.premise,
            hypothesis=per_field["hypothesis"].simplified
            if "hypothesis" in per_field
            else example.hypothesis,
            label=example.label,
            genre=example.genre,
        )
    new_fields = dict(example.fields)
    for name, outcome in per_field.items():
        new_fields[name] = outcome.simplified
    return GenericExample(id=new_id, fields=new_fields, label=example.label)


def _classify(per_field: dict[str, SimplifyOutcome]) -> str:
    """'failed' if any field errored, else 'changed'/'unchanged'."""
    if any(o.error is not None for o in per_field.values()):
        return "failed"
    if any(o.changed for o in per_field.values()):
        return "changed"
    return "unchanged"


def _finish(dataset: Dataset) -> Dataset:
    dataset.validate()
    return dataset


# --- strategies --------------------------------------------------------------------


def _append(dataset: Dataset, backend: Backend, plan: AugmentationPlan) -> tuple[Dataset, RunStats]:
    plan.validate(dataset.task)
    stats = RunStats()
    fields = _task_fields(dataset, plan.fields)
    indices = select_indices(len(dataset.examples), plan.fraction, plan.seed)
    stats.selected = len(indices)
    outcomes = _simplify_examples(dataset, backend, indices, fields)

    existing = {ex.id for ex in dataset.examples}
    appended = []
    for idx in indices:
        example = dataset.examples[idx]
        per_field = outcomes[idx]
        kind = _classify(per_field)
        if kind == "failed":
            stats.failed += 1
            log.warning("skipping %s: backend error on a field", example.id)
            continue
        if kind == "unchanged":
            stats.unchanged += 1
            continue
        new_id = example.id + plan.id_suffix
        if new_id in existing:
            raise DatasetError(f"augmented id {new_id!r} collides with an existing id")
        built = _build_simplified(example, per_field, dataset.task, new_id)
        if built is None:
            stats.filtered += 1
            continue
        appended.append(built)
        existing.add(new_id)
        stats.appended += 1

    out = Dataset(
        task=dataset.task,
        examples=list(dataset.examples) + appended,
        provenance=dataset.provenance,
    )
    return _finish(out), stats


def _swap(dataset: Dataset, backend: Backend, plan: AugmentationPlan) -> tuple[Dataset, RunStats]:
    plan.validate(dataset.task)
    stats = RunStats()
    fields = _task_fields(dataset, plan.fields)
    indices = select_indices(len(dataset.examples), plan.fraction, plan.seed)
    stats.selected = len(indices)
    outcomes = _simplify_examples(dataset, backend, indices, fields)

    examples = list(dataset.examples)
    for idx in indices:
        example = examples[idx]
        per_field = outcomes[idx]
        kind = _classify(per_field)
        if kind == "failed":
            stats.failed += 1
            log.warning("keeping %s: backend error on a field", example.id)
            continue
        if kind == "unchanged":
            stats.unchanged += 1
            continue
        built = _build_simplified(example, per_field, dataset.task, example.id)
        if built is None:
            stats.filtered += 1
            continue
        examples[idx] = built
        stats.swapped += 1

    out = Dataset(task=dataset.task, examples=examples, provenance=dataset.provenance)
    return _finish(out), stats


def _replace_if_preserved(dataset: Dataset, backend: Backend) -> tuple[Dataset, RunStats]:
    if dataset.task != TASK_RELATION:
        raise ValueError("replace-if-preserved needs entity spans; relation datasets only")
    stats = RunStats()
    indices = list(range(len(dataset.examples)))
    stats.selected = len(indices)
    outcomes = _simplify_examples(dataset, backend, indices, (RELATION_FIELD,))

    examples = []
    for idx, example in enumerate(dataset.examples):
        per_field = outcomes[idx]
        kind = _classify(per_field)
        if kind == "failed":
            stats.failed += 1
            examples.append(example)
            continue
        if kind == "unchanged":
            stats.unchanged += 1
            examples.append(example)
            continue
        built = _build_simplified(example, per_field, dataset.task, example.id)
        if built is None:
            stats.filtered += 1
            examples.append(example)
        else:
            stats.replaced += 1
            examples.append(built)

    out = Dataset(task=dataset.task, examples=examples, provenance=dataset.provenance)
    return _finish(out), stats


def _prepare_eval(dataset: Dataset, backend: Backend, mode: str) -> tuple[Dataset, RunStats]:
    if mode not in EVAL_MODES:
        raise ValueError(f"unknown eval mode {mode!r}")
    if mode == "original":
        return Dataset(dataset.task, list(dataset.examples), dataset.provenance), RunStats()
    if mode == "simplified-complement":
        if dataset.task != TASK_RELATION:
            raise ValueError("simplified-complement needs a preservation filter; relation only")
        return _replace_if_preserved(dataset, backend)

    stats = RunStats()
    fields = _task_fields(dataset, None)
    indices = list(range(len(dataset.examples)))
    stats.selected = len(indices)
    outcomes = _simplify_examples(dataset, backend, indices, fields)

    examples = []
    for idx, example in enumerate(dataset.examples):
        per_field = outcomes[idx]
        kind = _classify(per_field)
        if kind == "failed":
            stats.failed += 1
            examples.append(example)
            continue
        if kind == "unchanged":
            stats.unchanged += 1
            examples.append(example)
            continue
        built = _build_simplified(example, per_field, dataset.task, example.id)
        if built is None:
            # entity lost; keep the original so the record stays valid
            stats.filtered += 1
            examples.append(example)
        else:
            stats.simplified += 1
            examples.append(built)

    out = Dataset(task=dataset.task, examples=examples, provenance=dataset.provenance)
    return _finish(out), stats


# --- public operations --------------------------------------------------------------


def augment_append(dataset: Dataset, backend: Backend, plan: AugmentationPlan) -> Dataset:
    """Input examples unchanged and in order, then one simplified copy per
    selected example whose simplification changed the text (and, for relation
    data, preserved both entities). New ids carry the plan's suffix."""
    return _append(dataset, backend, plan)[0]


def augment_swap(dataset: Dataset, backend: Backend, plan: AugmentationPlan) -> Dataset:
    """Same length and order as the input; selected examples whose
    simplification succeeded are replaced in place, ids and labels kept."""
    return _swap(dataset, backend, plan)[0]


def replace_if_preserved(dataset: Dataset, backend: Backend) -> Dataset:
    """Every relation example swapped for its simplification when that changed
    the text and preserved both entities; originals otherwise."""
    return _replace_if_preserved(dataset, backend)[0]


def prepare_eval(dataset: Dataset, backend: Backend, mode: str) -> Dataset:
    """Evaluation-time variant of the dataset, same ids, labels, and length.

    ``original`` is the identity; ``simplified`` rewrites every text field and
    falls back to the original text on failure; ``simplified-complement``
    applies replace-if-preserved semantics (relation datasets only).
    """
    return _prepare_eval(dataset, backend, mode)[0]


def _manifest(operation: str, dataset_in: Dataset, dataset_out: Dataset,
              backend: Backend, stats: RunStats, extra: dict) -> dict:
    manifest = {
        "operation": operation,
        "task": dataset_in.task,
        "backend": backend.backend_id,
        "input": dataset_in.provenance,
        "input_examples": len(dataset_in.examples),
        "output_examples": len(dataset_out.examples),
        "counts": stats.to_dict(),
    }
    manifest.update(extra)
    return manifest


def run_plan(dataset: Dataset, backend: Backend, plan: AugmentationPlan) -> RunResult:
    """Execute an augmentation plan and describe the run for the manifest."""
    if plan.strategy == "append":
        out, stats = _append(dataset, backend, plan)
    elif plan.strategy == "swap":
        out, stats = _swap(dataset, backend, plan)
    else:
        plan.validate(dataset.task)
        out, stats = _replace_if_preserved(dataset, backend)
    manifest = _manifest("augment", dataset, out, backend, stats, {"plan": plan.to_dict()})
    return RunResult(out, manifest)


def run_prepare_eval(dataset: Dataset, backend: Backend, mode: str) -> RunResult:
    out, stats = _prepare_eval(dataset, backend, mode)
    manifest = _manifest("prepare-eval", dataset, out, backend, stats, {"mode": mode})
    return RunResult(out, manifest)
