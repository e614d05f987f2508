import json

import pytest
from hypothesis import given, strategies as st

from simpaug.data import (
    Dataset,
    DatasetError,
    GenericExample,
    NliExample,
    RelationExample,
    read_generic,
    read_nli,
    read_relation,
    surface,
    write_generic,
    write_nli,
    write_relation,
)
from support import flint_example

FLINT_RECORD = {
    "id": "e001",
    "token": [
        "the", "CFO", "Douglas", "Flint", "will", "become", "chairman", ",",
        "succeeding", "Stephen", "Green", "is", "leaving", "for", "a",
        "government", "job", ".",
    ],
    "subj_start": 2,
    "subj_end": 3,
    "obj_start": 6,
    "obj_end": 6,
    "subj_type": "PERSON",
    "obj_type": "TITLE",
    "relation": "per:title",
}


# --- relation -----------------------------------------------------------------


def test_read_relation_flint(tmp_path):
    path = tmp_path / "train.json"
    path.write_text(json.dumps([FLINT_RECORD]), encoding="utf-8")
    ds = read_relation(path)
    assert len(ds) == 1
    ex = ds.examples[0]
    assert ex.subj_span == (2, 3)
    assert ex.obj_span == (6, 6)
    assert ex.relation == "per:title"
    assert surface(ex, "subject") == ["Douglas", "Flint"]
    assert surface(ex, "object") == ["chairman"]


def test_read_relation_tolerates_extra_tacred_keys(tmp_path):
    record = dict(FLINT_RECORD, docid="AFP_ENG_001", stanford_head=[0] * 18)
    path = tmp_path / "train.json"
    path.write_text(json.dumps([record]), encoding="utf-8")
    assert len(read_relation(path)) == 1


def test_read_relation_empty_array(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("[]", encoding="utf-8")
    assert len(read_relation(path)) == 0


def test_read_relation_span_out_of_range_names_record(tmp_path):
    bad = dict(FLINT_RECORD, id="bad", subj_end=99)
    path = tmp_path / "train.json"
    path.write_text(json.dumps([FLINT_RECORD, bad]), encoding="utf-8")
    with pytest.raises(DatasetError, match="record 1"):
        read_relation(path)


def test_read_relation_duplicate_id_names_record(tmp_path):
    path = tmp_path / "train.json"
    path.write_text(json.dumps([FLINT_RECORD, FLINT_RECORD]), encoding="utf-8")
    with pytest.raises(DatasetError, match="record 1.*duplicate"):
        read_relation(path)


def test_read_relation_invalid_json(tmp_path):
    path = tmp_path / "train.json"
    path.write_text("[{", encoding="utf-8")
    with pytest.raises(DatasetError, match="invalid JSON"):
        read_relation(path)


def test_read_relation_missing_key(tmp_path):
    record = {k: v for k, v in FLINT_RECORD.items() if k != "relation"}
    path = tmp_path / "train.json"
    path.write_text(json.dumps([record]), encoding="utf-8")
    with pytest.raises(DatasetError, match="record 0.*relation"):
        read_relation(path)


def test_write_relation_round_trip(tmp_path):
    ex = flint_example()
    tagged = RelationExample(
        id="e002",
        tokens=["Green", "led", "HSBC", "."],
        subj_span=(0, 0),
        obj_span=(2, 2),
        subj_type="PERSON",
        obj_type="ORG",
        relation="per:employee_of",
        pos=["NNP", "VBD", "NNP", "."],
        ner=["PERSON", "O", "ORG", "O"],
    )
    ds = Dataset(task="relation", examples=[ex, tagged])
    path = tmp_path / "out.json"
    write_relation(ds, path)
    assert read_relation(path) == ds


def test_write_relation_omits_absent_annotations(tmp_path):
    ds = Dataset(task="relation", examples=[flint_example()])
    path = tmp_path / "out.json"
    write_relation(ds, path)
    (record,) = json.loads(path.read_text(encoding="utf-8"))
    assert "stanford_pos" not in record
    assert "stanford_ner" not in record


def test_write_relation_byte_stable(tmp_path):
    ds = Dataset(task="relation", examples=[flint_example()])
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    write_relation(ds, a)
    write_relation(ds, b)
    assert a.read_bytes() == b.read_bytes()


def test_surface_single_token_span():
    ex = flint_example()
    assert surface(ex, "object") == ["chairman"]
    with pytest.raises(ValueError):
        surface(ex, "both")


def test_relation_overlapping_spans_rejected():
    ex = RelationExample(
        id="x",
        tokens=["a", "b", "c"],
        subj_span=(0, 1),
        obj_span=(1, 2),
        subj_type="T",
        obj_type="T",
        relation="r",
    )
    with pytest.raises(DatasetError, match="overlap"):
        ex.validate()


def test_relation_annotation_length_checked():
    ex = RelationExample(
        id="x",
        tokens=["a", "b", "c"],
        subj_span=(0, 0),
        obj_span=(2, 2),
        subj_type="T",
        obj_type="T",
        relation="r",
        pos=["X"],
    )
    with pytest.raises(DatasetError, match="pos"):
        ex.validate()


# --- nli -------------------------------------------------------------------------


def test_read_nli_jsonl(tmp_path):
    path = tmp_path / "dev.jsonl"
    rows = [
        {"pairID": "1n", "sentence1": "A man eats.", "sentence2": "A person eats.",
         "gold_label": "entailment", "genre": "fiction"},
        {"pairID": "2c", "sentence1": "It rained.", "sentence2": "It was dry.",
         "gold_label": "contradiction", "genre": "letters"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    ds = read_nli(path)
    assert [ex.pair_id for ex in ds.examples] == ["1n", "2c"]
    assert ds.examples[0].label == "entailment"


def test_read_nli_tsv_with_extra_columns(tmp_path):
    path = tmp_path / "dev.txt"
    header = "index\tpromptID\tpairID\tgenre\tsentence1\tsentence2\tgold_label"
    rows = [
        "0\t100\t100n\tslate\tThe dog barked.\tAn animal barked.\tentailment",
        "1\t101\t101e\tslate\tShe left early.\tShe stayed.\tcontradiction",
    ]
    path.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    ds = read_nli(path)
    assert len(ds) == 2
    assert ds.examples[1].hypothesis == "She stayed."
    assert ds.examples[1].genre == "slate"


def test_read_nli_unknown_label_names_line(tmp_path):
    path = tmp_path / "dev.jsonl"
    rows = [
        {"pairID": "1", "sentence1": "a", "sentence2": "b", "gold_label": "entailment",
         "genre": "g"},
        {"pairID": "2", "sentence1": "a", "sentence2": "b", "gold_label": "maybe",
         "genre": "g"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    with pytest.raises(DatasetError, match="maybe"):
        read_nli(path)


def test_read_nli_ragged_tsv_rejected(tmp_path):
    path = tmp_path / "dev.txt"
    path.write_text("pairID\tsentence1\tsentence2\tgold_label\n1\ta\tb\n", encoding="utf-8")
    with pytest.raises(DatasetError, match="line 2"):
        read_nli(path)


def test_write_nli_round_trip(tmp_path):
    ds = Dataset(
        task="nli",
        examples=[
            NliExample("p1", 'He said "go\thome".', "Multi\nline premise.", "neutral", "travel"),
            NliExample("p2", "Plain.", "Also plain.", "entailment", ""),
        ],
    )
    path = tmp_path / "out.jsonl"
    write_nli(ds, path)
    assert read_nli(path) == ds


# --- generic ---------------------------------------------------------------------


def test_generic_round_trip(tmp_path):
    ds = Dataset(
        task="generic",
        examples=[
            GenericExample("g1", {"question": "Why?", "context": "Because."}, "yes"),
            GenericExample("g2", {"question": "How?", "context": "Like so."}, "no"),
        ],
    )
    path = tmp_path / "out.jsonl"
    write_generic(ds, path)
    assert read_generic(path) == ds


def test_generic_requires_a_text_field(tmp_path):
    path = tmp_path / "g.jsonl"
    path.write_text('{"id": "g1", "label": "x"}\n', encoding="utf-8")
    with pytest.raises(DatasetError, match="no text fields"):
        read_generic(path)


def test_writers_check_task():
    ds = Dataset(task="nli", examples=[])
    with pytest.raises(DatasetError):
        write_relation(ds, "/dev/null")


# --- property round-trips -----------------------------------------------------------

_token = st.from_regex(r"[A-Za-z0-9'().,:-]{1,8}", fullmatch=True)
_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=30
).filter(lambda s: s.strip())


@st.composite
def _relation_examples(draw, ident):
    n = draw(st.integers(4, 10))
    tokens = draw(st.lists(_token, min_size=n, max_size=n))
    cut = sorted(draw(st.sets(st.integers(0, n), min_size=4, max_size=4)))
    spans = [(cut[0], cut[1] - 1), (cut[2], cut[3] - 1)]
    if draw(st.booleans()):
        spans.reverse()
    return RelationExample(
        id=ident,
        tokens=tokens,
        subj_span=spans[0],
        obj_span=spans[1],
        subj_type=draw(st.sampled_from(["PERSON", "ORG"])),
        obj_type="THING",
        relation=draw(st.sampled_from(["no_relation", "per:title"])),
        pos=draw(st.none() | st.lists(st.sampled_from(["NN", "VB"]), min_size=n, max_size=n)),
        ner=None,
    )


@given(st.data())
def test_relation_round_trip_property(tmp_path_factory, data):
    count = data.draw(st.integers(0, 5))
    examples = [data.draw(_relation_examples(f"ex{i}")) for i in range(count)]
    ds = Dataset(task="relation", examples=examples)
    path = tmp_path_factory.mktemp("rt") / "ds.json"
    write_relation(ds, path)
    loaded = read_relation(path)
    assert loaded == ds
    assert [ex.id for ex in loaded.examples] == [ex.id for ex in ds.examples]


@given(
    st.lists(
        st.tuples(_text, _text, st.sampled_from(["entailment", "contradiction", "neutral"])),
        max_size=5,
    )
)
def test_nli_round_trip_property(tmp_path_factory, rows):
    examples = [
        NliExample(f"p{i}", premise, hypothesis, label, "genre")
        for i, (premise, hypothesis, label) in enumerate(rows)
    ]
    ds = Dataset(task="nli", examples=examples)
    path = tmp_path_factory.mktemp("rt") / "ds.jsonl"
    write_nli(ds, path)
    assert read_nli(path) == ds


@given(st.lists(st.dictionaries(st.sampled_from(["a", "b", "c"]), _text, min_size=1), max_size=5))
def test_generic_round_trip_property(tmp_path_factory, field_maps):
    examples = [
        GenericExample(f"g{i}", fields, "lab") for i, fields in enumerate(field_maps)
    ]
    ds = Dataset(task="generic", examples=examples)
    path = tmp_path_factory.mktemp("rt") / "ds.jsonl"
    write_generic(ds, path)
    assert read_generic(path) == ds
