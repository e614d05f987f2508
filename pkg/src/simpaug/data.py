"""Typed in-memory model and file adapters for the supported task formats.

Three record shapes are supported: TACRED-style relation extraction (JSON
array, public-release keys), MNLI-style NLI pairs (JSONL or tab-separated,
public field names), and a generic labeled-text record (JSONL). Readers
validate every invariant up front and name the offending record; writers
round-trip losslessly and produce byte-stable output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

NLI_LABELS = ("entailment", "contradiction", "neutral")

TASK_RELATION = "relation"
TASK_NLI = "nli"
TASK_GENERIC = "generic"
TASKS = (TASK_RELATION, TASK_NLI, TASK_GENERIC)


class DatasetError(ValueError):
    """Raised when a dataset file fails to parse or a record violates an invariant."""


def _check_tokens(tokens: list[str], where: str) -> None:
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise DatasetError(f"{where}: tokens must be a list of strings")
    # messages name positions, not text: they may end up on stderr
    for i, tok in enumerate(tokens):
        if not tok:
            raise DatasetError(f"{where}: token {i} is empty")
        if any(c.isspace() for c in tok):
            raise DatasetError(f"{where}: token {i} contains whitespace")


@dataclass
class RelationExample:
    """One TACRED-style record: a tokenized sentence with subject/object spans.

    Spans are inclusive token indices, matching the public TACRED schema.
    ``pos``/``ner`` are optional per-token tag lists; simplified copies drop
    them because tags cannot be carried across rewriting.
    """

    id: str
    tokens: list[str]
    subj_span: tuple[int, int]
    obj_span: tuple[int, int]
    subj_type: str
    obj_type: str
    relation: str
    pos: list[str] | None = None
    ner: list[str] | None = None

    def validate(self, where: str = "") -> None:
        where = where or f"example {self.id!r}"
        if not self.id:
            raise DatasetError(f"{where}: empty id")
        _check_tokens(self.tokens, where)
        for name, (start, end) in (("subj", self.subj_span), ("obj", self.obj_span)):
            if not (0 <= start <= end < len(self.tokens)):
                raise DatasetError(
                    f"{where}: {name} span ({start}, {end}) out of range for"
                    f" {len(self.tokens)} tokens"
                )
        s1, e1 = self.subj_span
        s2, e2 = self.obj_span
        if s1 <= e2 and s2 <= e1:
            raise DatasetError(f"{where}: subject and object spans overlap")
        if not self.relation:
            raise DatasetError(f"{where}: empty relation label")
        for name, tags in (("pos", self.pos), ("ner", self.ner)):
            if tags is not None and len(tags) != len(self.tokens):
                raise DatasetError(
                    f"{where}: {name} has {len(tags)} tags for {len(self.tokens)} tokens"
                )

    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass
class NliExample:
    """One MNLI-style premise/hypothesis pair."""

    pair_id: str
    premise: str
    hypothesis: str
    label: str
    genre: str = ""

    @property
    def id(self) -> str:
        return self.pair_id

    def validate(self, where: str = "") -> None:
        where = where or f"pair {self.pair_id!r}"
        if not self.pair_id:
            raise DatasetError(f"{where}: empty pairID")
        if not self.premise.strip():
            raise DatasetError(f"{where}: empty premise")
        if not self.hypothesis.strip():
            raise DatasetError(f"{where}: empty hypothesis")
        if self.label not in NLI_LABELS:
            raise DatasetError(
                f"{where}: unknown label {self.label!r} (expected one of {', '.join(NLI_LABELS)})"
            )


@dataclass
class GenericExample:
    """A labeled record with arbitrary named text fields.

    Lets the augmentation strategies run on tasks beyond relation extraction
    and NLI without a task-specific adapter.
    """

    id: str
    fields: dict[str, str]
    label: str = ""

    def validate(self, where: str = "") -> None:
        where = where or f"example {self.id!r}"
        if not self.id:
            raise DatasetError(f"{where}: empty id")
        if not self.fields:
            raise DatasetError(f"{where}: no text fields")
        for name, value in self.fields.items():
            if not isinstance(value, str):
                raise DatasetError(f"{where}: field {name!r} is not a string")


Example = RelationExample | NliExample | GenericExample

_TASK_TYPES = {
    TASK_RELATION: RelationExample,
    TASK_NLI: NliExample,
    TASK_GENERIC: GenericExample,
}


@dataclass
class Dataset:
    """An ordered, homogeneous collection of examples for one task.

    Treated as immutable after load; transformations build new datasets.
    ``provenance`` is carried for manifests only and never affects equality.
    """

    task: str
    examples: list = field(default_factory=list)
    provenance: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.examples)

    def validate(self) -> None:
        if self.task not in TASKS:
            raise DatasetError(f"unknown task {self.task!r}")
        expected = _TASK_TYPES[self.task]
        seen: set[str] = set()
        for i, ex in enumerate(self.examples):
            if not isinstance(ex, expected):
                raise DatasetError(f"record {i}: expected a {expected.__name__}")
            ex.validate(where=f"record {i} (id {ex.id!r})")
            if ex.id in seen:
                raise DatasetError(f"record {i}: duplicate id {ex.id!r}")
            seen.add(ex.id)


def surface(example: RelationExample, which: str) -> list[str]:
    """Tokens of the requested entity span; ``which`` is "subject" or "object"."""
    if which == "subject":
        start, end = example.subj_span
    elif which == "object":
        start, end = example.obj_span
    else:
        raise ValueError(f"which must be 'subject' or 'object', got {which!r}")
    return example.tokens[start : end + 1]


# --- relation adapter (public TACRED schema) ---------------------------------

_REL_REQUIRED = (
    "id",
    "token",
    "subj_start",
    "subj_end",
    "obj_start",
    "obj_end",
    "subj_type",
    "obj_type",
    "relation",
)


def _relation_from_record(rec: dict, where: str) -> RelationExample:
    if not isinstance(rec, dict):
        raise DatasetError(f"{where}: record is not an object")
    missing = [k for k in _REL_REQUIRED if k not in rec]
    if missing:
        raise DatasetError(f"{where}: missing keys {', '.join(missing)}")
    try:
        subj = (int(rec["subj_start"]), int(rec["subj_end"]))
        obj = (int(rec["obj_start"]), int(rec["obj_end"]))
    except (TypeError, ValueError) as exc:
        raise DatasetError(f"{where}: non-integer span: {exc}") from exc
    return RelationExample(
        id=str(rec["id"]),
        tokens=rec["token"],
        subj_span=subj,
        obj_span=obj,
        subj_type=str(rec["subj_type"]),
        obj_type=str(rec["obj_type"]),
        relation=str(rec["relation"]),
        pos=rec.get("stanford_pos"),
        ner=rec.get("stanford_ner"),
    )


def _relation_to_record(ex: RelationExample) -> dict:
    rec = {
        "id": ex.id,
        "token": ex.tokens,
        "subj_start": ex.subj_span[0],
        "subj_end": ex.subj_span[1],
        "obj_start": ex.obj_span[0],
        "obj_end": ex.obj_span[1],
        "subj_type": ex.subj_type,
        "obj_type": ex.obj_type,
        "relation": ex.relation,
    }
    if ex.pos is not None:
        rec["stanford_pos"] = ex.pos
    if ex.ner is not None:
        rec["stanford_ner"] = ex.ner
    return rec


def read_relation(path: str | Path) -> Dataset:
    """Load a TACRED-schema JSON array; every record is validated on the way in."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise DatasetError(f"{path}: expected a top-level JSON array")
    examples = [
        _relation_from_record(rec, where=f"record {i}") for i, rec in enumerate(raw)
    ]
    ds = Dataset(task=TASK_RELATION, examples=examples, provenance=str(path))
    try:
        ds.validate()
    except DatasetError as exc:
        raise DatasetError(f"{path}: {exc}") from exc
    return ds


def write_relation(dataset: Dataset, path: str | Path) -> None:
    if dataset.task != TASK_RELATION:
        raise DatasetError(f"expected a relation dataset, got task {dataset.task!r}")
    lines = [serialize_example(ex) for ex in dataset.examples]
    body = "[]\n" if not lines else "[\n " + ",\n ".join(lines) + "\n]\n"
    Path(path).write_text(body, encoding="utf-8")


# --- nli adapter (public MNLI field names) ------------------------------------

_NLI_KEYS = ("pairID", "sentence1", "sentence2", "gold_label", "genre")


def _nli_from_mapping(rec: dict, where: str) -> NliExample:
    missing = [k for k in ("pairID", "sentence1", "sentence2", "gold_label") if k not in rec]
    if missing:
        raise DatasetError(f"{where}: missing keys {', '.join(missing)}")
    return NliExample(
        pair_id=str(rec["pairID"]),
        premise=str(rec["sentence1"]),
        hypothesis=str(rec["sentence2"]),
        label=str(rec["gold_label"]),
        genre=str(rec.get("genre", "")),
    )


def read_nli(path: str | Path) -> Dataset:
    """Load MNLI pairs from JSONL or tab-separated-with-header files.

    The format is sniffed from the first non-blank line. Unknown gold labels
    are rejected with the offending line number.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    stripped = text.lstrip()
    examples: list[NliExample] = []
    if not stripped:
        return Dataset(task=TASK_NLI, examples=[], provenance=str(path))
    if stripped.startswith("{"):
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            where = f"line {lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}: {where}: invalid JSON: {exc}") from exc
            if not isinstance(rec, dict):
                raise DatasetError(f"{path}: {where}: record is not an object")
            examples.append(_nli_from_mapping(rec, where=where))
    else:
        lines = text.splitlines()
        if not lines or not lines[0].strip():
            raise DatasetError(f"{path}: empty file")
        header = lines[0].split("\t")
        col = {name: i for i, name in enumerate(header)}
        missing = [k for k in ("pairID", "sentence1", "sentence2", "gold_label") if k not in col]
        if missing:
            raise DatasetError(f"{path}: header missing columns {', '.join(missing)}")
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            cells = line.split("\t")
            if len(cells) != len(header):
                raise DatasetError(
                    f"{path}: line {lineno}: {len(cells)} columns, header has {len(header)}"
                )
            rec = {k: cells[i] for k, i in col.items()}
            examples.append(_nli_from_mapping(rec, where=f"line {lineno}"))
    ds = Dataset(task=TASK_NLI, examples=examples, provenance=str(path))
    try:
        ds.validate()
    except DatasetError as exc:
        raise DatasetError(f"{path}: {exc}") from exc
    return ds


def write_nli(dataset: Dataset, path: str | Path) -> None:
    """Write the one-object-per-line form (unambiguous escaping for tabs/newlines)."""
    if dataset.task != TASK_NLI:
        raise DatasetError(f"expected an nli dataset, got task {dataset.task!r}")
    with open(path, "w", encoding="utf-8") as f:
        for ex in dataset.examples:
            f.write(serialize_example(ex))
            f.write("\n")


# --- generic adapter -----------------------------------------------------------


def read_generic(path: str | Path) -> Dataset:
    """Load JSONL records with keys id, label, and arbitrary string fields."""
    path = Path(path)
    examples: list[GenericExample] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            where = f"line {lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}: {where}: invalid JSON: {exc}") from exc
            if not isinstance(rec, dict) or "id" not in rec:
                raise DatasetError(f"{path}: {where}: expected an object with an 'id'")
            fields = {
                k: v for k, v in rec.items() if k not in ("id", "label")
            }
            examples.append(
                GenericExample(id=str(rec["id"]), fields=fields, label=str(rec.get("label", "")))
            )
    ds = Dataset(task=TASK_GENERIC, examples=examples, provenance=str(path))
    try:
        ds.validate()
    except DatasetError as exc:
        raise DatasetError(f"{path}: {exc}") from exc
    return ds


def write_generic(dataset: Dataset, path: str | Path) -> None:
    if dataset.task != TASK_GENERIC:
        raise DatasetError(f"expected a generic dataset, got task {dataset.task!r}")
    with open(path, "w", encoding="utf-8") as f:
        for ex in dataset.examples:
            f.write(serialize_example(ex))
            f.write("\n")


# --- shared helpers -------------------------------------------------------------


def serialize_example(ex: Example) -> str:
    """Canonical single-line JSON for one record; the unit of byte-stability."""
    if isinstance(ex, RelationExample):
        rec = _relation_to_record(ex)
    elif isinstance(ex, NliExample):
        rec = {
            "pairID": ex.pair_id,
            "sentence1": ex.premise,
            "sentence2": ex.hypothesis,
            "gold_label": ex.label,
            "genre": ex.genre,
        }
    elif isinstance(ex, GenericExample):
        rec = {"id": ex.id, "label": ex.label, **ex.fields}
    else:
        raise TypeError(f"not an example: {type(ex).__name__}")
    return json.dumps(rec, ensure_ascii=False)


_READERS = {TASK_RELATION: read_relation, TASK_NLI: read_nli, TASK_GENERIC: read_generic}
_WRITERS = {TASK_RELATION: write_relation, TASK_NLI: write_nli, TASK_GENERIC: write_generic}


def read_dataset(task: str, path: str | Path) -> Dataset:
    if task not in _READERS:
        raise DatasetError(f"unknown task {task!r}")
    return _READERS[task](path)


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    _WRITERS[dataset.task](dataset, path)
