"""Text simplification as a tool for NLP pipelines.

Two uses: simplifying task inputs at prediction time, and augmenting training
sets with simplified copies of existing examples. Simplifiers plug in as
backends (rule-based, child process, or HTTP); relation-extraction data is
guarded by an entity-preservation filter; BLEU divergence reports quantify how
much a simplifier rewrites.
"""

from .augment import (
    AugmentationPlan,
    RunResult,
    augment_append,
    augment_swap,
    prepare_eval,
    replace_if_preserved,
    run_plan,
    run_prepare_eval,
    select_indices,
)
from .backends import (
    Backend,
    BackendError,
    BackendSpec,
    EchoBackend,
    HttpBackend,
    ProcBackend,
    RulesBackend,
    SimplifyOutcome,
    create_backend,
    load_lexicon,
    parse_backend_spec,
    rules_simplify,
    simplify_batch,
)
from .data import (
    Dataset,
    DatasetError,
    GenericExample,
    NliExample,
    RelationExample,
    read_dataset,
    read_nli,
    read_relation,
    surface,
    write_dataset,
    write_nli,
    write_relation,
)
from .metrics import (
    BleuConfig,
    DivergenceReport,
    brevity_penalty,
    divergence_report,
    modified_precision,
    sentence_bleu,
    tokenize,
)
from .preservation import (
    FilterStats,
    PreservationVerdict,
    check_preservation,
    filter_stats,
    relocate_span,
)

__version__ = "0.1.0"
