"""Shared fixture builders for the test suite."""

from __future__ import annotations

import random
import sys
from pathlib import Path

from simpaug.data import Dataset, GenericExample, NliExample, RelationExample
from simpaug.metrics import tokenize

PROC_CHILD = Path(__file__).with_name("proc_child.py")

# The running example sentence: HSBC succession, per:title between
# "Douglas Flint" and "chairman".
SENTENCE = (
    "the CFO Douglas Flint will become chairman, succeeding Stephen Green"
    " is leaving for a government job."
)
SIMPLIFIED_SENTENCE = (
    "the CFO Douglas Flint will become chairman, and Stephen Green"
    " is leaving to take a government job."
)


def proc_command(*flags: str) -> str:
    return " ".join([sys.executable, str(PROC_CHILD), *flags])


def flint_example() -> RelationExample:
    return RelationExample(
        id="e001",
        tokens=tokenize(SENTENCE),
        subj_span=(2, 3),
        obj_span=(6, 6),
        subj_type="PERSON",
        obj_type="TITLE",
        relation="per:title",
    )


def relation_fixture() -> tuple[Dataset, dict[str, str]]:
    """Three relation examples plus a lexicon that changes all three sentences
    but destroys the object entity of exactly the second one."""
    examples = [
        RelationExample(
            id="r1",
            tokens=["Alice", "purchased", "the", "red", "car", "."],
            subj_span=(0, 0),
            obj_span=(4, 4),
            subj_type="PERSON",
            obj_type="VEHICLE",
            relation="per:owns",
        ),
        RelationExample(
            id="r2",
            tokens=["Bob", "sold", "the", "automobile", "yesterday", "."],
            subj_span=(0, 0),
            obj_span=(3, 3),
            subj_type="PERSON",
            obj_type="VEHICLE",
            relation="per:sold",
        ),
        RelationExample(
            id="r3",
            tokens=["Carol", "purchased", "the", "blue", "boat", "."],
            subj_span=(0, 0),
            obj_span=(4, 4),
            subj_type="PERSON",
            obj_type="VEHICLE",
            relation="per:owns",
        ),
    ]
    lexicon = {"purchased": "bought", "sold": "traded", "automobile": "vehicle"}
    return Dataset(task="relation", examples=examples), lexicon


def nli_fixture(n: int = 10) -> Dataset:
    labels = ["entailment", "contradiction", "neutral"]
    examples = [
        NliExample(
            pair_id=f"p{i}",
            premise=f"The tourist industry number {i} continued to expand quickly.",
            hypothesis=f"Tourism {i} is very big in Spain.",
            label=labels[i % 3],
            genre="travel",
        )
        for i in range(n)
    ]
    return Dataset(task="nli", examples=examples)


def generic_fixture(n: int) -> Dataset:
    labels = ["yes", "no", "maybe"]
    examples = [
        GenericExample(
            id=f"g{i}",
            fields={"text": f"record {i} alpha beta gamma delta."},
            label=labels[i % 3],
        )
        for i in range(n)
    ]
    return Dataset(task="generic", examples=examples)


_PLAIN = ["alpha", "Beta", "gamma", "DELTA", "epsilon", "zeta-7", "eta's", "THETA"]
_PUNCTED = ["St.", "Inc.", "(note)", '"so-called"', "end.", "U.S.", "co-op,"]


def random_relation_example(rng: random.Random, ident: str) -> RelationExample:
    """A structurally valid example with awkward tokens (punctuation, casing)."""
    n = rng.randint(4, 14)
    tokens = [rng.choice(_PLAIN + _PUNCTED) for _ in range(n)]
    # four distinct sorted cut points give two non-empty, disjoint spans
    cut = sorted(rng.sample(range(n + 1), 4))
    first = (cut[0], cut[1] - 1)
    second = (cut[2], cut[3] - 1)
    if rng.random() < 0.5:
        subj, obj = first, second
    else:
        subj, obj = second, first
    return RelationExample(
        id=ident,
        tokens=tokens,
        subj_span=subj,
        obj_span=obj,
        subj_type="PERSON",
        obj_type="THING",
        relation="no_relation",
    )
