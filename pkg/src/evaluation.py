"""
src/evaluation.py — Semantic and syntactic scoring of a predicted corpus.

The unit of semantic credit is one labeled dependency. Every frame
contributes a sense dependency (VR -> predicate, labeled lemma.sense) and
one dependency per argument. Gold and predicted dependencies are compared
as sets, so duplicates never earn double credit.

Conventions: precision is 1 when nothing was predicted, recall is undefined
(None) when the gold side is empty, and F1 is 0 when P + R = 0. A category
whose gold side is empty reports None rather than a number.
"""
from dataclasses import dataclass, field
from typing import Optional

from src.config import PUNCTUATION_TAGS, SrlError
from src.syntax_graph import pos_in_class

CATEGORIES = ('all', 'pred', 'argu', 'verb', 'nomi')


class EvaluationError(SrlError):
    """Raised when the gold and predicted corpora are not aligned."""


def _harmonic(p, r):
    if p is None or r is None:
        return None
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


@dataclass
class Counts:
    correct: int = 0
    predicted: int = 0
    gold: int = 0

    @property
    def precision(self):
        return self.correct / self.predicted if self.predicted else 1.0

    @property
    def recall(self):
        if not self.gold:
            return 1.0 if not self.predicted else None
        return self.correct / self.gold

    @property
    def f1(self):
        return _harmonic(self.precision, self.recall)

    def add(self, gold, predicted):
        self.gold += len(gold)
        self.predicted += len(predicted)
        self.correct += len(gold & predicted)


def semantic_dependencies(sentence, index=0):
    deps = set()
    for frame in sentence.frames:
        deps.add(('sense', index, frame.predicate_id, frame.roleset))
        for arg, role in frame.arguments:
            deps.add(('arg', index, frame.predicate_id, arg, role))
    return deps


def check_alignment(gold, predicted):
    if len(gold) != len(predicted):
        raise EvaluationError(f"gold has {len(gold)} sentences, prediction has {len(predicted)}")
    for i, (g, p) in enumerate(zip(gold, predicted), start=1):
        if g.forms != p.forms:
            raise EvaluationError(f"sentence {i}: tokens differ between gold and prediction")


def dependency_counts(gold, predicted):
    """Counts per category: all, pred (senses), argu (arguments), verb and nomi predicates."""
    check_alignment(gold, predicted)
    counts = {name: Counts() for name in CATEGORIES}
    for i, (g, p) in enumerate(zip(gold, predicted)):
        gold_deps, pred_deps = semantic_dependencies(g, i), semantic_dependencies(p, i)
        counts['all'].add(gold_deps, pred_deps)
        for name, kind in (('pred', 'sense'), ('argu', 'arg')):
            counts[name].add({d for d in gold_deps if d[0] == kind}, {d for d in pred_deps if d[0] == kind})
        for name, pos_class in (('verb', 'verb'), ('nomi', 'noun')):
            def keep(deps):
                return {d for d in deps if pos_in_class(g.token(d[2]).pos, pos_class)}
            counts[name].add(keep(gold_deps), keep(pred_deps))
    return counts


def semantic_score(gold, predicted):
    """(P, R, F1) over all labeled semantic dependencies."""
    c = dependency_counts(gold, predicted)['all']
    return c.precision, c.recall, c.f1


def las(gold, predicted, punctuation=True):
    """Share of tokens with the gold head and deprel; None when no token is counted."""
    check_alignment(gold, predicted)
    correct = total = 0
    for g, p in zip(gold, predicted):
        for gt, pt in zip(g.tokens, p.tokens):
            if not punctuation and gt.pos in PUNCTUATION_TAGS:
                continue
            total += 1
            correct += (gt.head, gt.deprel) == (pt.head, pt.deprel)
    return correct / total if total else None


@dataclass
class ScoreReport:
    sem_p: Optional[float]
    sem_r: Optional[float]
    sem_f1: Optional[float]
    las: Optional[float]
    macro_p: Optional[float]
    macro_r: Optional[float]
    macro_f1: Optional[float]
    sem_over_las: Optional[float]
    pred_f1: Optional[float]
    argu_f1: Optional[float]
    verb_f1: Optional[float]
    nomi_f1: Optional[float]
    counts: dict = field(default_factory=dict, repr=False)

    METRICS = ('sem_p', 'sem_r', 'sem_f1', 'las', 'macro_p', 'macro_r', 'macro_f1',
               'sem_over_las', 'pred_f1', 'argu_f1', 'verb_f1', 'nomi_f1')

    def to_rows(self):
        """One row per metric, values in percent (None stays None)."""
        rows = []
        for name in self.METRICS:
            value = getattr(self, name)
            rows.append({'metric': name, 'value': None if value is None else round(100.0 * value, 2)})
        return rows

    def count_rows(self):
        rows = []
        for name in CATEGORIES:
            c = self.counts[name]
            rows.append({'category': name, 'correct': c.correct, 'predicted': c.predicted,
                         'gold': c.gold, 'precision': c.precision, 'recall': c.recall, 'f1': c.f1})
        return rows


def _category_f1(c):
    return c.f1 if c.gold else None


def full_report(gold, predicted, punctuation=True):
    counts = dependency_counts(gold, predicted)
    total = counts['all']
    syntactic = las(gold, predicted, punctuation)
    sem_p, sem_r, sem_f1 = total.precision, total.recall, total.f1
    if syntactic is None or sem_r is None:
        macro_p = macro_r = macro_f1 = None
    else:
        macro_p = (syntactic + sem_p) / 2
        macro_r = (syntactic + sem_r) / 2
        macro_f1 = _harmonic(macro_p, macro_r)
    ratio = sem_f1 / syntactic if syntactic and sem_f1 is not None else None
    return ScoreReport(sem_p, sem_r, sem_f1, syntactic, macro_p, macro_r, macro_f1, ratio,
                       _category_f1(counts['pred']), _category_f1(counts['argu']),
                       _category_f1(counts['verb']), _category_f1(counts['nomi']), counts)
