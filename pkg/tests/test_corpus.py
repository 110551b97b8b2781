import json
import random

import pytest

from pareval.corpus import (
    Corpus,
    Direction,
    FactRef,
    corpus_to_json,
    load_directions,
    load_gold,
    load_predictions,
    load_ratings,
    load_submissions,
    predictions_to_json,
    save_gold,
    save_predictions,
)
from pareval.errors import InputError
from pareval.metrics import evaluate_system

from generators import random_corpus, random_predictions


def test_load_single_instance_file(tmp_path):
    record = {
        "_id": "fig2",
        "question": "What is the area of the desert that Ghanzi is in the middle of?",
        "answer": "900000 km²",
        "context": [
            ["Ghanzi", ["Ghanzi is a town in the middle of the Kalahari Desert."]],
            ["Kalahari Desert", ["The Kalahari Desert is extending for 900000 km²."]],
        ],
        "supporting_facts": [["Ghanzi", 0], ["Kalahari Desert", 0]],
    }
    path = tmp_path / "one.json"
    path.write_text(json.dumps([record]), encoding="utf-8")
    corpus = load_gold(path)
    assert len(corpus) == 1
    assert len(corpus.by_id["fig2"].gold_facts) == 2


def test_load_gold_toy(toy_corpus):
    assert len(toy_corpus) == 3
    inst = toy_corpus.by_id["kalahari-area"]
    assert inst.gold_answer == "900000 km²"
    assert len(inst.context) == 3
    assert FactRef("Ghanzi", 0) in inst.gold_facts
    assert len(inst.gold_facts) == 2


def test_load_gold_ignores_unknown_keys(toy_corpus):
    # fixture carries "type"/"level" keys on every record
    assert toy_corpus.by_id["kalahari-area"].question.startswith("What is the area")


def test_load_gold_empty_array_warns(tmp_path, caplog):
    path = tmp_path / "empty.json"
    path.write_text("[]")
    with caplog.at_level("WARNING", logger="pareval"):
        corpus = load_gold(path)
    assert len(corpus) == 0
    assert any("no instances" in r.message for r in caplog.records)


def test_load_gold_dangling_ref(tmp_path):
    record = {
        "_id": "x", "question": "q?", "answer": "a",
        "context": [["Ghanzi", ["s0", "s1", "s2"]]],
        "supporting_facts": [["Ghanzi", 99]],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps([record]))
    with pytest.raises(InputError, match="dangling fact.*'Ghanzi', 99.*'x'"):
        load_gold(path)


def test_load_gold_unknown_title(tmp_path):
    record = {
        "_id": "x", "question": "q?", "answer": "a",
        "context": [["Ghanzi", ["s0"]]],
        "supporting_facts": [["NoSuchTitle", 0]],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps([record]))
    with pytest.raises(InputError, match="no such context article"):
        load_gold(path)


def test_load_gold_duplicate_id(tmp_path):
    record = {
        "_id": "dup", "question": "q?", "answer": "a",
        "context": [["T", ["s0"]]], "supporting_facts": [["T", 0]],
    }
    path = tmp_path / "dup.json"
    path.write_text(json.dumps([record, record]))
    with pytest.raises(InputError, match="duplicate instance id"):
        load_gold(path)


def test_load_gold_parse_error_reports_offset(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('[{"_id": "x", }]')
    with pytest.raises(InputError, match="byte offset"):
        load_gold(path)


def test_titles_nfc_normalized(tmp_path):
    # decomposed e + combining acute in the context title, precomposed in the ref
    record = {
        "_id": "x", "question": "q?", "answer": "a",
        "context": [["Café", ["only sentence"]]],
        "supporting_facts": [["Café", 0]],
    }
    path = tmp_path / "nfc.json"
    path.write_text(json.dumps([record]), encoding="utf-8")
    corpus = load_gold(path)
    assert FactRef("Café", 0) in corpus.by_id["x"].gold_facts


def test_gold_round_trip(toy_corpus, tmp_path):
    path = tmp_path / "roundtrip.json"
    save_gold(toy_corpus, path)
    assert load_gold(path) == toy_corpus


def test_load_predictions_full(toy_corpus, data_dir, tmp_path):
    payload = {
        "answer": {i.id: i.gold_answer for i in toy_corpus},
        "sp": {i.id: [[r.title, r.sentence_index] for r in sorted(i.gold_facts)] for i in toy_corpus},
    }
    path = tmp_path / "pred.json"
    path.write_text(json.dumps(payload))
    preds = load_predictions(path, toy_corpus, system_id="gold-copy")
    assert preds.system_id == "gold-copy"
    assert not preds.missing_ids(toy_corpus)


def test_load_predictions_partial_warns(toy_corpus, tmp_path, caplog):
    payload = {"answer": {"kalahari-area": "900000 km²"}, "sp": {}}
    path = tmp_path / "pred.json"
    path.write_text(json.dumps(payload))
    with caplog.at_level("WARNING", logger="pareval"):
        preds = load_predictions(path, toy_corpus)
    assert len(preds.missing_ids(toy_corpus)) == 2
    assert any("score zero" in r.message for r in caplog.records)


def test_load_predictions_unknown_id(toy_corpus, tmp_path):
    path = tmp_path / "pred.json"
    path.write_text(json.dumps({"answer": {"nope": "x"}, "sp": {}}))
    with pytest.raises(InputError, match="unknown instance id 'nope'"):
        load_predictions(path, toy_corpus)


def test_load_predictions_unresolvable_ref(toy_corpus, tmp_path):
    path = tmp_path / "pred.json"
    path.write_text(json.dumps({"answer": {}, "sp": {"kalahari-area": [["NoSuchTitle", 0]]}}))
    with pytest.raises(InputError, match="kalahari-area"):
        load_predictions(path, toy_corpus)


def test_predictions_round_trip(toy_corpus, tmp_path):
    rng = random.Random(7)
    preds = random_predictions(rng, toy_corpus, system_id="p")
    path = tmp_path / "p.json"
    save_predictions(preds, path)
    again = load_predictions(path, toy_corpus, system_id="p")
    assert again == preds


def test_corpus_permutation_leaves_scores_identical():
    rng = random.Random(123)
    corpus = random_corpus(rng, 12)
    preds = random_predictions(rng, corpus)
    shuffled = list(corpus.instances)
    rng.shuffle(shuffled)
    permuted = Corpus.from_instances(tuple(shuffled))
    a = evaluate_system(corpus, preds)
    b = evaluate_system(permuted, preds)
    assert a.system.means == b.system.means
    assert a.system.loca == b.system.loca
    assert dict(a.per_instance) == dict(b.per_instance)


def test_load_human_ratings(human_ratings):
    assert len(human_ratings.rows) == 15
    assert human_ratings.dimensions == (
        "usability", "consistency", "utility", "correctness", "mental_effort", "completion_time",
    )
    assert human_ratings.rows["gold"]["correctness"] == 2.0
    assert human_ratings.directions["mental_effort"] is Direction.LOWER_BETTER


def test_load_ratings_single_cell(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("system_id,acc\nsysA,0.5\n")
    table = load_ratings(path, {"acc": Direction.HIGHER_BETTER})
    assert table.rows == {"sysA": {"acc": 0.5}}


def test_load_ratings_direction_not_covered(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("system_id,trust\nsysA,0.5\n")
    with pytest.raises(InputError, match="'trust' not covered"):
        load_ratings(path, {"acc": Direction.HIGHER_BETTER})


def test_load_ratings_missing_cell(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("system_id,acc,f1\nsysA,0.5,\n")
    directions = {"acc": Direction.HIGHER_BETTER, "f1": Direction.HIGHER_BETTER}
    with pytest.raises(InputError, match="missing value"):
        load_ratings(path, directions)
    table = load_ratings(path, directions, allow_missing=True)
    assert "f1" not in table.rows["sysA"]


def test_load_ratings_non_numeric(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("system_id,acc\nsysA,high\n")
    with pytest.raises(InputError, match="non-numeric"):
        load_ratings(path, {"acc": Direction.HIGHER_BETTER})


def test_load_directions_rejects_bad_value(tmp_path):
    path = tmp_path / "d.json"
    path.write_text('[{"name": "acc", "direction": "sideways"}]')
    with pytest.raises(InputError, match="'higher' or 'lower'"):
        load_directions(path)


def test_load_submissions(tmp_path):
    path = tmp_path / "subs.csv"
    path.write_text("system_id,submitted_on\nsysA,2020-03-01\n")
    log = load_submissions(path)
    assert log.dates["sysA"].isoformat() == "2020-03-01"


def test_load_submissions_duplicate(tmp_path):
    path = tmp_path / "subs.csv"
    path.write_text("system_id,submitted_on\nsysA,2020-03-01\nsysA,2020-04-01\n")
    with pytest.raises(InputError, match="duplicate system id"):
        load_submissions(path)


def test_load_submissions_bad_date(tmp_path):
    path = tmp_path / "subs.csv"
    path.write_text("system_id,submitted_on\nsysA,March 2020\n")
    with pytest.raises(InputError, match="unparseable date"):
        load_submissions(path)


def test_gold_json_shape_is_hotpot_compatible(toy_corpus):
    payload = corpus_to_json(toy_corpus)
    assert set(payload[0]) == {"_id", "question", "answer", "context", "supporting_facts"}
    assert payload[0]["context"][0][0] == "Ghanzi"


def test_prediction_json_shape_is_submission_compatible(toy_corpus):
    preds = random_predictions(random.Random(0), toy_corpus)
    payload = predictions_to_json(preds)
    assert set(payload) == {"answer", "sp"}
