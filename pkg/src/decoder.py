"""
src/decoder.py — Turn a sentence and a trained model into semantic frames.

Decoding runs in two stages. identify_predicates() classifies every
(VR, candidate) pair over the sense labels and NONE_PRED. For each predicate,
in text order, beam_decode_arguments() walks the same candidate stream the
training pairs came from and scores a hypothesis as the chain-rule sum of
log p(label | features), where the features see the roles the hypothesis
has assigned so far. Auxiliary labels stop the traversal of the hypothesis
that chose them: noMoreArg ends a synPth predicate, noMoreLeftArg and
noMoreRightArg end one linPth stream.

Every classified pair contributes to the score, NONE_ARG and auxiliary
labels included. Ties are broken by fewer arguments, then by the label
sequence in model label order.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from src.config import DEFAULT_SETTINGS, ConfigError, SrlError
from src.conll_io import SemanticFrame
from src.features import EvalContext, exists_cross, extract_features
from src.labels import NONE_ARG, NONE_PRED, SCHEME_AUXILIARIES, is_auxiliary, is_role, is_sense
from src.pruning import (ARGUMENT_STAGE, PREDICATE_STAGE, VR, TraverseScheme, candidate_plan,
                         predicate_candidates)
from src.syntax_graph import DepGraph

logger = logging.getLogger(__name__)

MASK_POLICIES = ('position', 'stage')


class DecodeError(SrlError):
    """Raised when exhaustive decoding is asked for more candidates than its cap."""


@dataclass(frozen=True)
class DecodeConfig:
    scheme: str = 'synPth'
    beam_width: int = 8
    mask_policy: str = 'position'
    forbid_crossing: bool = False
    exhaustive_cap: int = 8
    widen: bool = True
    stage_features: bool = True
    distance_mode: str = 'bucket'

    def __post_init__(self):
        TraverseScheme(self.scheme)
        if self.beam_width < 1:
            raise ConfigError(f"beam width must be >= 1, got {self.beam_width}")
        if self.mask_policy not in MASK_POLICIES:
            raise ConfigError(f"unknown mask policy {self.mask_policy!r}")

    @classmethod
    def from_settings(cls, settings):
        decoder = settings.get('decoder', DEFAULT_SETTINGS['decoder'])
        pipeline = settings.get('pipeline', DEFAULT_SETTINGS['pipeline'])
        features = settings.get('features', DEFAULT_SETTINGS['features'])
        return cls(scheme=pipeline['scheme'],
                   stage_features=pipeline['stage_features'],
                   distance_mode=features['distance_mode'],
                   **decoder)

    def widths(self):
        """Beam widths run for one decode, ascending."""
        if not self.widen:
            return [self.beam_width]
        widths, k = [], 1
        while k < self.beam_width:
            widths.append(k)
            k *= 2
        return widths + [self.beam_width]


@dataclass(frozen=True)
class Hypothesis:
    """A labeled prefix of the candidate stream for one predicate."""
    assigned: tuple = ()           # ((node, label), ...)
    score: float = 0.0             # sum of log-probabilities over the prefix
    label_ids: tuple = ()          # model label ids of ``assigned``
    halted: frozenset = field(default_factory=frozenset)   # segment indices
    done: bool = False

    @property
    def arguments(self):
        return tuple((node, label) for node, label in self.assigned if is_role(label))

    @property
    def roles(self):
        return dict(self.arguments)

    def key(self):
        return (-self.score, len(self.arguments), self.label_ids)


@dataclass(frozen=True)
class _Step:
    node: int
    segment: int
    position: int


class _ArgumentScorer:
    """Masked, renormalized label log-probabilities for one predicate's candidate stream."""

    def __init__(self, predicate, sentence, model, templates, config, graph, senses, frames):
        self.predicate = predicate
        self.sentence = sentence
        self.model = model
        self.templates = templates
        self.config = config
        self.graph = graph
        self.senses = senses
        self.frames = frames
        self.plan = candidate_plan(predicate, sentence, graph, config.scheme)
        self.steps = [_Step(node, s, i) for s, segment in enumerate(self.plan)
                      for i, node in enumerate(segment.nodes)]
        self.base_ids = [i for i, label in enumerate(model.labels)
                         if label == NONE_ARG or is_role(label)]
        self.role_ids = [i for i in self.base_ids if is_role(model.labels[i])]
        self.scheme_aux = SCHEME_AUXILIARIES[TraverseScheme(config.scheme).value]
        self._cache = {}

    def context(self, node, current):
        return EvalContext(self.sentence, self.graph, ARGUMENT_STAGE, self.predicate, node,
                           senses=self.senses, frames=self.frames, current=dict(current),
                           distance_mode=self.config.distance_mode)

    def _allowed(self, step, ctx):
        segment = self.plan[step.segment]
        ids = list(self.base_ids)
        if self.config.forbid_crossing and exists_cross(ctx, step.node, self.predicate):
            ids = [i for i in ids if i not in self.role_ids]
        if self.config.mask_policy == 'stage':
            aux = self.scheme_aux
        elif segment.aux is not None and (step.position == 0 or not segment.aux_first_only):
            aux = (segment.aux,)
        else:
            aux = ()
        for label in aux:
            lid = self.model.label_id(label)
            if lid is not None:
                ids.append(lid)
        return sorted(ids)

    def log_probs(self, t, current):
        """(allowed label ids, their log-probabilities) at step ``t`` given assigned roles."""
        key = (t, tuple(sorted(current.items())))
        if key not in self._cache:
            step = self.steps[t]
            ctx = self.context(step.node, current)
            ids = self._allowed(step, ctx)
            if ids:
                scores = self.model.scores(extract_features(self.templates, ctx, self.config.stage_features))
                allowed = scores[ids]
                logp = allowed - logsumexp(allowed)
            else:
                logp = np.zeros(0)
            self._cache[key] = (ids, logp)
        return self._cache[key]

    def extend(self, h, t, lid, logp):
        step = self.steps[t]
        label = self.model.labels[lid]
        halted, done = h.halted, False
        if is_auxiliary(label):
            if self.plan[step.segment].halts_all:
                done = True
            else:
                halted = halted | {step.segment}
        return Hypothesis(h.assigned + ((step.node, label),), h.score + float(logp),
                          h.label_ids + (lid,), halted, done)

    def skips(self, h, t):
        return h.done or self.steps[t].segment in h.halted


def _beam_pass(scorer, width):
    beam = [Hypothesis()]
    for t in range(len(scorer.steps)):
        extended = []
        for h in beam:
            if scorer.skips(h, t):
                extended.append(h)
                continue
            ids, logps = scorer.log_probs(t, h.roles)
            if not ids:
                extended.append(h)
                continue
            for lid, lp in zip(ids, logps):
                extended.append(scorer.extend(h, t, lid, lp))
        extended.sort(key=Hypothesis.key)
        beam = extended[:width]
    return beam[0]


def _context_args(sentence, graph, senses, frames):
    graph = graph or DepGraph.from_sentence(sentence)
    return graph, dict(senses or {}), {p: dict(r) for p, r in (frames or {}).items()}


def best_hypothesis(predicate, sentence, model, templates, config, graph=None, senses=None, frames=None):
    """Best complete hypothesis over the configured beam widths."""
    graph, senses, frames = _context_args(sentence, graph, senses, frames)
    scorer = _ArgumentScorer(predicate, sentence, model, templates, config, graph, senses, frames)
    return min((_beam_pass(scorer, k) for k in config.widths()), key=Hypothesis.key)


def beam_decode_arguments(predicate, sentence, model, templates, config, graph=None, senses=None, frames=None):
    """(argument, role) pairs of the best hypothesis, auxiliary and NONE labels dropped."""
    return list(best_hypothesis(predicate, sentence, model, templates, config,
                                graph, senses, frames).arguments)


def exhaustive_hypothesis(predicate, sentence, model, templates, config, graph=None, senses=None, frames=None):
    """
    Exact argmax over every halting label assignment, found by depth-first
    branch-and-bound. Log-probabilities are never positive, so a prefix that
    already scores below the best complete hypothesis cannot win.
    """
    graph, senses, frames = _context_args(sentence, graph, senses, frames)
    scorer = _ArgumentScorer(predicate, sentence, model, templates, config, graph, senses, frames)
    if len(scorer.steps) > config.exhaustive_cap:
        raise DecodeError(f"predicate {predicate} has {len(scorer.steps)} candidates; "
                          f"exhaustive decoding is capped at {config.exhaustive_cap}")
    best = [None]

    def search(h, t):
        if best[0] is not None and h.score < best[0].score:
            return
        if t == len(scorer.steps):
            if best[0] is None or h.key() < best[0].key():
                best[0] = h
            return
        if scorer.skips(h, t):
            search(h, t + 1)
            return
        ids, logps = scorer.log_probs(t, h.roles)
        if not ids:
            search(h, t + 1)
            return
        for lid, lp in zip(ids, logps):
            search(scorer.extend(h, t, lid, lp), t + 1)

    search(Hypothesis(), 0)
    return best[0]


def exhaustive_decode(predicate, sentence, model, templates, config, graph=None, senses=None, frames=None):
    return list(exhaustive_hypothesis(predicate, sentence, model, templates, config,
                                      graph, senses, frames).arguments)


def identify_predicates(sentence, model, templates, config, graph=None):
    """
    (node, 'lemma.sense') for every candidate whose best predicate-stage
    label is a sense. Candidates are classified in text order and later
    candidates see the senses already assigned.
    """
    graph = graph or DepGraph.from_sentence(sentence)
    allowed = [i for i, label in enumerate(model.labels) if label == NONE_PRED or is_sense(label)]
    if not allowed:
        logger.warning("Model has no predicate-stage labels; no predicates identified")
        return []
    senses, found = {}, []
    for candidate in predicate_candidates(sentence, graph.pos_classes):
        ctx = EvalContext(sentence, graph, PREDICATE_STAGE, VR, candidate, senses=dict(senses),
                          distance_mode=config.distance_mode)
        scores = model.scores(extract_features(templates, ctx, config.stage_features))
        # argmax returns the first maximum: the lower label index wins ties
        label = model.labels[allowed[int(np.argmax(scores[allowed]))]]
        if label != NONE_PRED:
            senses[candidate] = label
            found.append((candidate, f"{sentence.token(candidate).lemma}.{label}"))
    return found


def parse_sentence(sentence, model, templates, config):
    """Frames for every identified predicate, ordered by predicate position."""
    if not len(sentence):
        return []
    graph = DepGraph.from_sentence(sentence)
    predicates = identify_predicates(sentence, model, templates, config, graph)
    senses = {node: roleset.rsplit('.', 1)[1] for node, roleset in predicates}
    frames, result = {}, []
    for node, roleset in predicates:
        arguments = beam_decode_arguments(node, sentence, model, templates, config,
                                          graph, senses, frames)
        frames[node] = dict(arguments)
        result.append(SemanticFrame(node, senses[node], tuple(arguments), sentence.token(node).lemma))
    return result
