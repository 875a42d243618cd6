"""
src/pruning.py — Word-pair streams for training and decoding.

Predicate candidates are the verb- and noun-tagged tokens. Each predicate's
argument candidates come from one of two traversals:

  synPth — the predicate's children, then (nominal predicates only) the
           predicate itself, then for each ancestor up to the root the
           ancestor as its own level followed by its not-yet-emitted children.
  linPth — the predicate itself, then the left stream (p-1 .. 1) and the
           right stream (p+1 .. n).

With adaptive pruning the training stream stops as soon as the gold
arguments are saturated: synPth completes the current level with NONE_ARG
and puts noMoreArg on the first candidate of the next level; linPth labels
the token just past the outermost gold argument of each stream
noMoreLeftArg / noMoreRightArg.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from src.labels import NONE_ARG, NONE_PRED, NO_MORE_ARG, NO_MORE_LEFT_ARG, NO_MORE_RIGHT_ARG
from src.syntax_graph import DepGraph, pos_in_class

logger = logging.getLogger(__name__)

VR = 0
PREDICATE_STAGE = 'predicate'
ARGUMENT_STAGE = 'argument'


class TraverseScheme(str, Enum):
    SYN = 'synPth'
    LIN = 'linPth'


@dataclass(frozen=True)
class WordPair:
    head: int
    dependent: int
    stage: str
    label: Optional[str] = None

    def __post_init__(self):
        if (self.stage == PREDICATE_STAGE) != (self.head == VR):
            raise ValueError(f"stage {self.stage!r} does not match head {self.head}")


@dataclass(frozen=True)
class Segment:
    """A run of candidates sharing one auxiliary stop label.

    aux_first_only — the auxiliary label may only land on the first node.
    halts_all      — assigning it ends the whole predicate, not just this segment.
    """
    nodes: tuple
    aux: Optional[str]
    aux_first_only: bool
    halts_all: bool


def predicate_candidates(sentence, pos_classes=None):
    return [t.id for t in sentence.tokens
            if pos_in_class(t.pos, 'verb', pos_classes) or pos_in_class(t.pos, 'noun', pos_classes)]


def is_nominal_predicate(sentence, node, pos_classes=None):
    return pos_in_class(sentence.token(node).pos, 'noun', pos_classes)


def syn_traverse(predicate, graph, is_nominal):
    emitted = {predicate}
    levels = [list(graph.children(predicate))]
    emitted.update(levels[0])
    if is_nominal:
        levels.append([predicate])
    node = predicate
    while graph.head(node) is not None:
        ancestor = graph.head(node)
        levels.append([ancestor])
        emitted.add(ancestor)
        kids = [c for c in graph.children(ancestor) if c not in emitted]
        levels.append(kids)
        emitted.update(kids)
        node = ancestor
    return [level for level in levels if level]


def lin_traverse(predicate, sentence):
    """Left stream (p-1 down to 1) and right stream (p+1 up to n)."""
    n = len(sentence) if not isinstance(sentence, int) else sentence
    return list(range(predicate - 1, 0, -1)), list(range(predicate + 1, n + 1))


def candidate_plan(predicate, sentence, graph, scheme):
    """Decoding view of a traversal as a list of Segments."""
    scheme = TraverseScheme(scheme)
    if scheme is TraverseScheme.SYN:
        levels = syn_traverse(predicate, graph, is_nominal_predicate(sentence, predicate, graph.pos_classes))
        return [Segment(tuple(level), NO_MORE_ARG, True, True) for level in levels]
    left, right = lin_traverse(predicate, sentence)
    plan = [Segment((predicate,), None, False, False)]
    if left:
        plan.append(Segment(tuple(left), NO_MORE_LEFT_ARG, False, False))
    if right:
        plan.append(Segment(tuple(right), NO_MORE_RIGHT_ARG, False, False))
    return plan


def _syn_argument_pairs(predicate, gold, levels, adaptive):
    pairs = []
    if not adaptive:
        return [WordPair(predicate, x, ARGUMENT_STAGE, gold.get(x, NONE_ARG))
                for level in levels for x in level]
    remaining = {x for level in levels for x in level if x in gold}
    if not remaining:
        if levels:
            pairs.append(WordPair(predicate, levels[0][0], ARGUMENT_STAGE, NO_MORE_ARG))
        return pairs
    for i, level in enumerate(levels):
        for x in level:
            pairs.append(WordPair(predicate, x, ARGUMENT_STAGE, gold.get(x, NONE_ARG)))
            remaining.discard(x)
        if not remaining:
            if i + 1 < len(levels):
                pairs.append(WordPair(predicate, levels[i + 1][0], ARGUMENT_STAGE, NO_MORE_ARG))
            break
    return pairs


def _lin_stream_pairs(predicate, gold, stream, aux, adaptive):
    if not adaptive:
        return [WordPair(predicate, x, ARGUMENT_STAGE, gold.get(x, NONE_ARG)) for x in stream]
    hits = [i for i, x in enumerate(stream) if x in gold]
    cut = hits[-1] + 1 if hits else 0
    pairs = [WordPair(predicate, x, ARGUMENT_STAGE, gold.get(x, NONE_ARG)) for x in stream[:cut]]
    if cut < len(stream):
        pairs.append(WordPair(predicate, stream[cut], ARGUMENT_STAGE, aux))
    return pairs


def argument_pairs(sentence, frame, scheme, graph=None, adaptive=True):
    """Argument-stage pairs for one gold frame, in traversal order."""
    graph = graph or DepGraph.from_sentence(sentence)
    gold = dict(frame.arguments)
    predicate = frame.predicate_id
    if TraverseScheme(scheme) is TraverseScheme.SYN:
        levels = syn_traverse(predicate, graph, is_nominal_predicate(sentence, predicate, graph.pos_classes))
        reached = {x for level in levels for x in level}
        for x in gold:
            if x not in reached:
                logger.debug("Argument %d of predicate %d unreachable by synPth", x, predicate)
        return _syn_argument_pairs(predicate, gold, levels, adaptive)
    left, right = lin_traverse(predicate, sentence)
    pairs = [WordPair(predicate, predicate, ARGUMENT_STAGE, gold.get(predicate, NONE_ARG))]
    pairs += _lin_stream_pairs(predicate, gold, left, NO_MORE_LEFT_ARG, adaptive)
    pairs += _lin_stream_pairs(predicate, gold, right, NO_MORE_RIGHT_ARG, adaptive)
    return pairs


def predicate_pairs(sentence, pos_classes=None):
    senses = {f.predicate_id: f.sense for f in sentence.frames}
    return [WordPair(VR, c, PREDICATE_STAGE, senses.get(c, NONE_PRED))
            for c in predicate_candidates(sentence, pos_classes)]


def generate_training_pairs(sentence, scheme, graph=None, adaptive=True):
    """
    Labeled pairs for one gold sentence: every predicate-stage pair first,
    then the argument-stage pairs of each gold predicate in text order.
    Only gold predicates contribute argument pairs.
    """
    graph = graph or DepGraph.from_sentence(sentence)
    pairs = predicate_pairs(sentence, graph.pos_classes)
    for frame in sentence.frames:
        pairs.extend(argument_pairs(sentence, frame, scheme, graph, adaptive))
    return pairs


@dataclass
class PruningStats:
    scheme: str
    sentences: int = 0
    predicates: int = 0
    pairs_before: int = 0
    pairs_predicates: int = 0
    pairs_full: int = 0
    pairs_after: int = 0
    gold_arguments: int = 0
    covered_arguments: int = 0

    @property
    def reduction(self):
        return 100.0 * (1 - self.pairs_after / self.pairs_before) if self.pairs_before else 0.0

    @property
    def reduction_vs_full(self):
        return 100.0 * (1 - self.pairs_after / self.pairs_full) if self.pairs_full else 0.0

    @property
    def coverage(self):
        return 100.0 * self.covered_arguments / self.gold_arguments if self.gold_arguments else 100.0

    def to_row(self):
        return {
            'scheme': self.scheme,
            'sentences': self.sentences,
            'predicates': self.predicates,
            'pairs_before': self.pairs_before,
            'pairs_predicates': self.pairs_predicates,
            'pairs_full': self.pairs_full,
            'pairs_after': self.pairs_after,
            'reduction_pct': round(self.reduction, 2),
            'reduction_vs_full_pct': round(self.reduction_vs_full, 2),
            'gold_arguments': self.gold_arguments,
            'covered_arguments': self.covered_arguments,
            'coverage_pct': round(self.coverage, 2),
        }


def coverage_and_reduction_stats(corpus, scheme):
    """
    Candidate reduction and gold-argument coverage of adaptive pruning.

    pairs_before counts every (predicate candidate, other word) pair of the
    unpruned search space; pairs_predicates counts (gold predicate, word)
    pairs, the predicate itself included; pairs_full counts the non-adaptive
    traversal; pairs_after counts the adaptive stream, auxiliary-labeled pairs
    included.
    """
    scheme = TraverseScheme(scheme).value
    stats = PruningStats(scheme)
    for sentence in corpus:
        stats.sentences += 1
        graph = DepGraph.from_sentence(sentence)
        n_candidates = len(predicate_candidates(sentence, graph.pos_classes))
        stats.pairs_before += n_candidates * max(len(sentence) - 1, 0)
        for frame in sentence.frames:
            stats.predicates += 1
            stats.pairs_predicates += len(sentence)
            stats.pairs_full += len(argument_pairs(sentence, frame, scheme, graph, adaptive=False))
            adaptive = argument_pairs(sentence, frame, scheme, graph, adaptive=True)
            stats.pairs_after += len(adaptive)
            candidates = {pair.dependent for pair in adaptive}
            stats.gold_arguments += len(frame.arguments)
            stats.covered_arguments += sum(1 for x, _ in frame.arguments if x in candidates)
    return stats
