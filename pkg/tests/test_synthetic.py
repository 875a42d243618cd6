"""
tests/test_synthetic.py — Seeded synthetic corpus: determinism, validity and
the role grammar.
"""
import pytest

from src.conll_io import parse_corpus, serialize_corpus
from src.synthetic import GrammarError, GrammarParams, generate_synthetic_corpus, split_corpus


def test_same_seed_same_corpus():
    first = generate_synthetic_corpus(seed=11, n_sentences=30)
    second = generate_synthetic_corpus(seed=11, n_sentences=30)

    assert serialize_corpus(first) == serialize_corpus(second)
    assert serialize_corpus(first) != serialize_corpus(generate_synthetic_corpus(12, 30))


def test_sentences_are_valid_and_bounded(synthetic_corpus):
    # 1. Setup / 2. Run
    text = serialize_corpus(synthetic_corpus)

    # 3. Assert
    assert parse_corpus(text) == synthetic_corpus
    assert all(len(s) <= GrammarParams().max_len for s in synthetic_corpus)
    assert all(not s.problems for s in synthetic_corpus)


def test_every_verb_is_a_predicate_with_a_subject_role(synthetic_corpus):
    for sentence in synthetic_corpus:
        for token in sentence.tokens:
            if token.pos == 'VBD':
                frame = sentence.frame_for(token.id)
                assert frame is not None
                subjects = [c for c in sentence.tokens if c.head == token.id and c.deprel == 'SBJ']
                assert frame.role_of(subjects[0].id) in ('A0', 'A1')


def test_sense_is_a_function_of_the_lemma(synthetic_corpus):
    senses = {}
    for sentence in synthetic_corpus:
        for frame in sentence.frames:
            assert senses.setdefault(frame.lemma, frame.sense) == frame.sense


def test_split_is_positional():
    corpus = list(range(100))

    train, dev, test = split_corpus(corpus, 0.1, 0.1)

    assert (len(train), len(dev), len(test)) == (80, 10, 10)
    assert train + dev + test == corpus


@pytest.mark.parametrize("params", [
    GrammarParams(n_verbs=0),
    GrammarParams(max_len=3),
    GrammarParams(embed_prob=1.5),
])
def test_degenerate_grammar_is_rejected(params):
    with pytest.raises(GrammarError):
        generate_synthetic_corpus(1, 5, params)
