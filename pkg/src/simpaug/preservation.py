"""Critical-information checks for simplified relation-extraction sentences.

A simplification is usable for a relation example only when both the subject
and object entity surfaces survive it. Matching is token-level against the
shared tokenizer (substring matches inside longer words do not count), with a
case-insensitive retry for simplifiers that re-case.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import SimplifyOutcome
from .data import Dataset, RelationExample, surface
from .metrics import tokenize

SUBJECT_MISSING = "subject-missing"
OBJECT_MISSING = "object-missing"
SPANS_OVERLAP = "spans-overlap"


@dataclass(frozen=True)
class PreservationVerdict:
    """Pass with relocated entity spans, or fail with a reason."""

    passed: bool
    new_subj_span: tuple[int, int] | None = None
    new_obj_span: tuple[int, int] | None = None
    reason: str | None = None


def _occurrences(haystack: list[str], needle: list[str]) -> list[tuple[int, int]]:
    """All contiguous occurrences, exact token match first, else case-folded."""
    for key in (None, str.casefold):
        hay = haystack if key is None else [key(t) for t in haystack]
        ndl = needle if key is None else [key(t) for t in needle]
        found = [
            (i, i + len(ndl) - 1)
            for i in range(len(hay) - len(ndl) + 1)
            if hay[i : i + len(ndl)] == ndl
        ]
        if found:
            return found
    return []


def relocate_span(haystack: list[str], needle: list[str]) -> tuple[int, int] | None:
    """First occurrence of ``needle`` in ``haystack``, end-inclusive; None if absent."""
    if not needle:
        raise ValueError("needle must be non-empty")
    found = _occurrences(haystack, needle)
    return found[0] if found else None


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def check_preservation(example: RelationExample, simplified: str) -> PreservationVerdict:
    """Decide whether ``simplified`` still carries both entities of ``example``.

    The entity surfaces are re-tokenized so punctuation attached to entity
    tokens cannot defeat the match. The subject is placed at its earliest
    occurrence that leaves room for a disjoint object occurrence (earliest
    such object wins); entities that only ever collide fail as spans-overlap.
    Searching pairs rather than committing to the first subject hit keeps the
    identity law exact when one entity's surface recurs inside the other.
    """
    tokens = tokenize(simplified)
    subj_needle = tokenize(" ".join(surface(example, "subject")))
    obj_needle = tokenize(" ".join(surface(example, "object")))

    subj_candidates = _occurrences(tokens, subj_needle)
    if not subj_candidates:
        return PreservationVerdict(False, reason=SUBJECT_MISSING)
    obj_candidates = _occurrences(tokens, obj_needle)
    if not obj_candidates:
        return PreservationVerdict(False, reason=OBJECT_MISSING)

    for subj_span in subj_candidates:
        for obj_span in obj_candidates:
            if not _overlaps(subj_span, obj_span):
                return PreservationVerdict(True, subj_span, obj_span)
    return PreservationVerdict(False, reason=SPANS_OVERLAP)


@dataclass(frozen=True)
class FilterStats:
    """Preservation pass counts over a dataset; identity outputs count as pass.

    ``changed_*`` restrict the tally to outcomes the backend actually altered,
    which is the stricter number to watch when comparing simplifiers.
    """

    attempted: int
    passed: int
    pass_rate: float
    changed_attempted: int
    changed_passed: int
    changed_rate: float

    def render_text(self) -> str:
        return f"attempted={self.attempted} passed={self.passed} rate={self.pass_rate * 100:.0f}%"

    def to_dict(self) -> dict:
        return {
            "attempted": self.attempted,
            "passed": self.passed,
            "pass_rate": self.pass_rate,
            "changed_attempted": self.changed_attempted,
            "changed_passed": self.changed_passed,
            "changed_rate": self.changed_rate,
        }


def filter_stats(dataset: Dataset, outcomes: list[SimplifyOutcome]) -> FilterStats:
    """Count how many simplifications preserve both entities.

    ``outcomes`` must align 1:1 with ``dataset.examples``.
    """
    if len(outcomes) != len(dataset.examples):
        raise ValueError(
            f"{len(outcomes)} outcomes for {len(dataset.examples)} examples"
        )
    attempted = len(outcomes)
    passed = 0
    changed_attempted = 0
    changed_passed = 0
    for example, outcome in zip(dataset.examples, outcomes):
        ok = check_preservation(example, outcome.simplified).passed
        passed += ok
        if outcome.changed:
            changed_attempted += 1
            changed_passed += ok
    return FilterStats(
        attempted=attempted,
        passed=passed,
        pass_rate=passed / attempted if attempted else 0.0,
        changed_attempted=changed_attempted,
        changed_passed=changed_passed,
        changed_rate=changed_passed / changed_attempted if changed_attempted else 0.0,
    )
