"""Sentence BLEU and divergence reporting between original and simplified text.

BLEU here is a measurement tool, not a training objective: it quantifies how
far a simplifier departed from its source. The simplified text is scored as
the candidate against the original as the reference.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

# Detached as standalone tokens when they prefix/suffix a whitespace chunk.
PUNCTUATION = frozenset('.,;:!?"()')

ZERO_POLICIES = ("score-zero", "cap-order")


def tokenize(text: str) -> list[str]:
    """Split ``text`` into tokens: unicode whitespace plus punctuation detaching.

    Leading/trailing occurrences of ``. , ; : ! ? " ( )`` on a chunk become
    standalone tokens; interior ones (hyphens, apostrophes, abbreviation dots)
    are left alone. Deterministic; empty input yields an empty list.
    """
    tokens: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        while chunk and chunk[0] in PUNCTUATION:
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail: list[str] = []
        while chunk and chunk[-1] in PUNCTUATION:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


def ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def modified_precision(candidate: list[str], reference: list[str], n: int) -> tuple[int, int]:
    """Clipped and total n-gram counts of ``candidate`` against ``reference``.

    Returns ``(clipped, total)`` with ``total = max(0, len(candidate) - n + 1)``
    and each distinct candidate n-gram credited at most its reference count.
    """
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    total = max(0, len(candidate) - n + 1)
    if total == 0:
        return 0, 0
    cand = ngram_counts(candidate, n)
    ref = ngram_counts(reference, n)
    clipped = sum(min(count, ref[gram]) for gram, count in cand.items())
    return clipped, total


def brevity_penalty(candidate_len: int, reference_len: int) -> float:
    """Penalty for candidates shorter than the reference; 0.0 for an empty candidate."""
    if candidate_len >= reference_len:
        return 1.0
    if candidate_len == 0:
        return 0.0
    return math.exp(1.0 - reference_len / candidate_len)


@dataclass(frozen=True)
class BleuConfig:
    """Settings for sentence-level BLEU.

    ``zero_policy`` controls candidates shorter than ``max_order``:
    ``"cap-order"`` caps the order at the candidate length (default, since
    simplified sentences are often very short), ``"score-zero"`` keeps the
    full order and lets any zero precision zero the score.
    """

    max_order: int = 4
    zero_policy: str = "cap-order"
    lowercase: bool = True

    def __post_init__(self) -> None:
        if self.max_order < 1:
            raise ValueError(f"max_order must be >= 1, got {self.max_order}")
        if self.zero_policy not in ZERO_POLICIES:
            raise ValueError(
                f"zero_policy must be one of {ZERO_POLICIES}, got {self.zero_policy!r}"
            )


DEFAULT_BLEU = BleuConfig()


def sentence_bleu(
    candidate: list[str], reference: list[str], cfg: BleuConfig = DEFAULT_BLEU
) -> float:
    """Geometric mean of clipped n-gram precisions times the brevity penalty.

    Result is in [0, 1]. Identical sequences (empty ones included) score 1.0
    regardless of policy; an empty candidate against a non-empty reference
    scores 0.0.
    """
    if cfg.lowercase:
        candidate = [t.lower() for t in candidate]
        reference = [t.lower() for t in reference]
    if candidate == reference:
        # identical sequences score 1.0 under either zero policy, even when
        # shorter than max_order
        return 1.0
    if not candidate:
        return 0.0

    if cfg.zero_policy == "cap-order":
        order = min(cfg.max_order, len(candidate))
    else:
        order = cfg.max_order

    log_sum = 0.0
    for n in range(1, order + 1):
        clipped, total = modified_precision(candidate, reference, n)
        if clipped == 0 or total == 0:
            return 0.0
        log_sum += math.log(clipped / total)
    geo_mean = math.exp(log_sum / order)
    return brevity_penalty(len(candidate), len(reference)) * geo_mean


@dataclass(frozen=True)
class FieldDivergence:
    """Aggregate BLEU for one text field; mean/std are None when count is 0."""

    field: str
    count: int
    mean: float | None
    std: float | None


@dataclass(frozen=True)
class DivergenceReport:
    entries: tuple[FieldDivergence, ...]
    config: BleuConfig = DEFAULT_BLEU

    def to_dict(self) -> dict:
        """Structured form: one record per field plus a config echo. Full precision."""
        return {
            "fields": [
                {"name": e.field, "count": e.count, "mean": e.mean, "std": e.std}
                for e in self.entries
            ],
            "config": {
                "max_order": self.config.max_order,
                "zero_policy": self.config.zero_policy,
                "lowercase": self.config.lowercase,
                "std": "population",
            },
        }

    def render_text(self) -> str:
        """Two-decimal "mean ± std" table, one row per field."""
        width = max((len(e.field) for e in self.entries), default=5)
        lines = []
        for e in self.entries:
            if e.count == 0:
                lines.append(f"{e.field:<{width}}  n=0      -")
            else:
                lines.append(
                    f"{e.field:<{width}}  n={e.count:<5} {e.mean:.2f} ± {e.std:.2f}"
                )
        return "\n".join(lines)


def divergence_report(
    pairs: list[tuple[str, str, str]],
    cfg: BleuConfig = DEFAULT_BLEU,
    fields: list[str] | None = None,
) -> DivergenceReport:
    """Per-field mean/std of sentence BLEU over (field, original, simplified) pairs.

    The simplified text is the candidate and the original the reference. Fields
    are reported in first-seen order; std is the population standard deviation.
    ``fields`` forces an entry for each named field even when it has no pairs
    (count 0, mean/std absent).
    """
    scores: dict[str, list[float]] = {name: [] for name in fields or []}
    for name, original, simplified in pairs:
        score = sentence_bleu(tokenize(simplified), tokenize(original), cfg)
        scores.setdefault(name, []).append(score)

    entries = []
    for name, values in scores.items():
        n = len(values)
        if n == 0:
            entries.append(FieldDivergence(name, 0, None, None))
            continue
        mean = sum(values) / n
        std = math.sqrt(sum((v - mean) ** 2 for v in values) / n)
        entries.append(FieldDivergence(name, n, mean, std))
    return DivergenceReport(tuple(entries), cfg)
