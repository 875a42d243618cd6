"""
tests/test_evaluation.py — Semantic P/R/F1, LAS, the full report and its
categories, checked by hand on the demo sentence and against an independent
recount on a perturbed synthetic corpus.
"""
import random

import pytest

from src.conll_io import SemanticFrame, Sentence, Token
from src.evaluation import (EvaluationError, dependency_counts, full_report, las,
                            semantic_score)


def _replace_frame(sentence, predicate_id, arguments=None, sense=None):
    frames = []
    for f in sentence.frames:
        if f.predicate_id == predicate_id:
            f = SemanticFrame(f.predicate_id, sense or f.sense,
                              f.arguments if arguments is None else arguments, f.lemma)
        frames.append(f)
    return sentence.with_frames(frames)


def _with_head(sentence, token_id, head):
    tokens = [Token(t.id, t.form, t.lemma, t.pos, head if t.id == token_id else t.head, t.deprel,
                    t.pred) for t in sentence.tokens]
    return Sentence(tokens, sentence.frames)


def _perturb(sentence, rng):
    frames = []
    for f in sentence.frames:
        roll = rng.random()
        if roll < 0.1:
            continue
        arguments = list(f.arguments)
        sense = f.sense
        if roll < 0.25:
            sense = '09'
        elif roll < 0.45 and arguments:
            i = rng.randrange(len(arguments))
            arguments[i] = (arguments[i][0], 'A1' if arguments[i][1] != 'A1' else 'A0')
        elif roll < 0.6 and arguments:
            arguments.pop(rng.randrange(len(arguments)))
        elif roll < 0.75:
            taken = {a for a, _ in arguments}
            free = [t.id for t in sentence.tokens if t.id not in taken]
            if free:
                arguments.append((rng.choice(free), 'AM-TMP'))
        frames.append(SemanticFrame(f.predicate_id, sense, tuple(arguments), f.lemma))
    return sentence.with_frames(frames)


def _recount(gold, predicted, keep=lambda pos: True):
    """(correct, predicted, gold) walking frame by frame."""
    correct = n_predicted = n_gold = 0
    for g, p in zip(gold, predicted):
        gold_frames = {f.predicate_id: f for f in g.frames}
        for f in p.frames:
            if not keep(g.token(f.predicate_id).pos):
                continue
            n_predicted += 1 + len(f.arguments)
            match = gold_frames.get(f.predicate_id)
            if match is None:
                continue
            correct += match.roleset == f.roleset
            correct += sum(1 for arg in f.arguments if arg in match.arguments)
        n_gold += sum(1 + len(f.arguments) for f in g.frames if keep(g.token(f.predicate_id).pos))
    return correct, n_predicted, n_gold


def test_identical_corpora_score_perfectly(demo_sentence):
    # 1. Setup / 2. Run
    counts = dependency_counts([demo_sentence], [demo_sentence])['all']

    # 3. Assert
    assert semantic_score([demo_sentence], [demo_sentence]) == (1.0, 1.0, 1.0)
    assert (counts.correct, counts.gold) == (8, 8)


def test_one_flipped_role_costs_one_dependency(demo_sentence):
    # 1. Setup: focus takes Investor as A1 instead of A0
    predicted = _replace_frame(demo_sentence, 2, arguments=((1, 'A1'),))

    # 2. Run
    p, r, f1 = semantic_score([demo_sentence], [predicted])

    # 3. Assert
    assert p == r == f1 == pytest.approx(7 / 8)


def test_wrong_sense_is_an_error_even_with_right_arguments(demo_sentence):
    predicted = _replace_frame(demo_sentence, 7, sense='02')

    report = full_report([demo_sentence], [predicted])

    assert report.sem_p == pytest.approx(7 / 8)
    assert report.pred_f1 == pytest.approx(2 / 3)
    assert report.argu_f1 == 1.0


def test_empty_prediction(demo_sentence):
    p, r, f1 = semantic_score([demo_sentence], [demo_sentence.without_semantics()])

    assert (p, r, f1) == (1.0, 0.0, 0.0)


def test_las_counts_head_and_label(demo_sentence):
    predicted = _with_head(demo_sentence, 4, 7)

    assert las([demo_sentence], [demo_sentence]) == 1.0
    assert las([demo_sentence], [predicted]) == pytest.approx(7 / 8)


def test_las_can_skip_punctuation(demo_sentence):
    # 1. Setup: the period hangs off the wrong head
    predicted = _with_head(demo_sentence, 8, 3)

    # 2. Run / 3. Assert
    assert las([demo_sentence], [predicted]) == pytest.approx(7 / 8)
    assert las([demo_sentence], [predicted], punctuation=False) == 1.0


def test_empty_sentences_leave_las_undefined():
    empty = Sentence(())

    assert las([empty], [empty]) is None


def test_perfect_report(demo_sentence):
    report = full_report([demo_sentence], [demo_sentence])

    for name in report.METRICS:
        assert getattr(report, name) == 1.0, name
    assert {row['metric']: row['value'] for row in report.to_rows()}['sem_f1'] == 100.0


def test_verbal_only_gold_leaves_nominal_category_undefined(demo_sentence):
    # 1. Setup: drop the nominal predicate focus
    verbal = demo_sentence.with_frames([f for f in demo_sentence.frames if f.predicate_id != 2])

    # 2. Run
    report = full_report([verbal], [verbal])

    # 3. Assert
    assert report.nomi_f1 is None
    assert report.verb_f1 == 1.0
    rows = {row['metric']: row['value'] for row in report.to_rows()}
    assert rows['nomi_f1'] is None


def test_macro_scores_average_syntax_and_semantics(demo_sentence):
    # 1. Setup: one wrong head and one flipped role
    predicted = _with_head(_replace_frame(demo_sentence, 2, arguments=((1, 'A1'),)), 4, 7)

    # 2. Run
    report = full_report([demo_sentence], [predicted])

    # 3. Assert
    assert report.macro_p == pytest.approx((7 / 8 + 7 / 8) / 2)
    assert report.macro_f1 == pytest.approx(7 / 8)
    assert report.sem_over_las == pytest.approx(1.0)


def test_report_matches_an_independent_recount(synthetic_corpus):
    # 1. Setup
    rng = random.Random(4)
    gold = synthetic_corpus[:120]
    predicted = [_perturb(s, rng) for s in gold]

    # 2. Run
    report = full_report(gold, predicted)
    counts = report.counts

    # 3. Assert
    correct, n_predicted, n_gold = _recount(gold, predicted)
    assert (counts['all'].correct, counts['all'].predicted, counts['all'].gold) == \
        (correct, n_predicted, n_gold)
    assert report.sem_p == pytest.approx(correct / n_predicted)
    assert report.sem_r == pytest.approx(correct / n_gold)
    verb = _recount(gold, predicted, lambda pos: pos.startswith('V'))
    nomi = _recount(gold, predicted, lambda pos: pos.startswith('N'))
    assert (counts['verb'].correct, counts['verb'].gold) == (verb[0], verb[2])
    assert (counts['nomi'].correct, counts['nomi'].gold) == (nomi[0], nomi[2])
    assert counts['all'].correct == counts['pred'].correct + counts['argu'].correct
    assert counts['all'].correct == counts['verb'].correct + counts['nomi'].correct
    assert report.sem_f1 < 1.0


def test_scores_ignore_sentence_order(synthetic_corpus):
    rng = random.Random(8)
    gold = synthetic_corpus[:50]
    predicted = [_perturb(s, rng) for s in gold]

    forward = semantic_score(gold, predicted)
    backward = semantic_score(gold[::-1], predicted[::-1])

    assert forward == pytest.approx(backward)


def test_misaligned_corpora_are_rejected(demo_sentence, synthetic_corpus):
    with pytest.raises(EvaluationError, match='sentences'):
        semantic_score([demo_sentence], [])
    with pytest.raises(EvaluationError, match='tokens differ'):
        semantic_score([demo_sentence], [synthetic_corpus[0]])
