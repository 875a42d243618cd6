"""
src/feature_selection.py — Greedy feature-template selection.

greedy_select() starts from a random fraction of the template space FT and
alternates two phases until the development score stops improving:

  recruit_more  adds every template f in FT - S with score(S + f) > score(S),
                all measured against the same base score;
  shake_off     sorts S by descending score(S - f) (least important first),
                drops templates front to back while keeping the best set seen
                (ties go to the smaller set), and repeats until a pass
                changes nothing.

Scores are cached by template-set fingerprint, so the same set is never
trained twice. routine_calls counts the train+evaluate runs actually made.
"""
import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from src.config import SrlError
from src.feature_dsl import TemplateSet
from src.pipeline import score_template_set

logger = logging.getLogger(__name__)


class SelectionError(SrlError):
    """Raised for an empty template space or an empty set to score."""


class CorpusScorer:
    """Dev-set semantic F1 of a model trained on the training corpus; config frozen per run."""

    def __init__(self, train_corpus, dev_corpus, config):
        self.train_corpus = train_corpus
        self.dev_corpus = dev_corpus
        self.config = config

    def __call__(self, templates):
        return score_template_set(templates, self.train_corpus, self.dev_corpus, self.config)


@dataclass
class SelectionState:
    scorer: object
    workers: int = 1
    cache: dict = field(default_factory=dict)
    k1: int = 0
    k2: int = 0                  # most outer passes of any one shake_off call
    shake_passes: int = 0        # outer passes over the whole run
    routine_calls: int = 0
    ranking_calls: int = 0
    max_complement: int = 0
    max_smax: int = 0
    ranking: bool = False

    def _record(self, templates, value):
        self.cache[templates.fingerprint()] = value
        if self.ranking:
            self.ranking_calls += 1
        else:
            self.routine_calls += 1
        logger.debug("score %.4f for %d templates", value, len(templates))

    def score(self, templates):
        if not len(templates):
            raise SelectionError("cannot score an empty template set")
        key = templates.fingerprint()
        if key in self.cache:
            logger.debug("cache hit for %d templates", len(templates))
            return self.cache[key]
        value = self.scorer(templates.canonical())
        self._record(templates, value)
        return value

    def prefetch(self, sets):
        """Score the uncached ``sets`` concurrently, recording results in the given order."""
        pending, seen = [], set()
        for s in sets:
            key = s.fingerprint()
            if key not in self.cache and key not in seen:
                seen.add(key)
                pending.append(s)
        if self.workers <= 1 or len(pending) < 2:
            return
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            values = list(pool.map(lambda s: self.scorer(s.canonical()), pending))
        for s, value in zip(pending, values):
            self._record(s, value)

    def call_bound(self):
        """k1 * (|FT - S| + 2 * k2 * |S_max|) with the maxima observed in the run."""
        return self.k1 * (self.max_complement + 2 * max(self.k2, 1) * self.max_smax)


def recruit_more(s, ft, state):
    """Templates of FT - S whose addition beats score(S), in FT order."""
    base = state.score(s)
    complement = [f for f in ft if f not in s]
    state.max_complement = max(state.max_complement, len(complement))
    state.prefetch([s.plus(f) for f in complement])
    return [f for f in complement if state.score(s.plus(f)) > base]


def shake_off(s_max, state):
    passes = 0
    while True:
        passes += 1
        state.shake_passes += 1
        state.max_smax = max(state.max_smax, len(s_max))
        s0 = s_max
        state.prefetch([s0.minus(f) for f in s0] if len(s0) > 1 else [])
        if len(s0) > 1:
            order = sorted(s0, key=lambda f: -state.score(s0.minus(f)))
        else:
            order = list(s0)
        s = s0.with_templates(order)
        best = state.score(s_max)
        while True:
            s = s.minus(s.templates[0])
            if not len(s):
                break
            value = state.score(s)
            if value >= best:
                s_max, best = s, value
        if s0.fingerprint() == s_max.fingerprint():
            state.k2 = max(state.k2, passes)
            return s0


@dataclass
class SelectionReport:
    initial: TemplateSet
    final: TemplateSet
    initial_score: float
    final_score: float
    history: list
    k1: int
    k2: int
    shake_passes: int
    routine_calls: int
    ranking_calls: int
    call_bound: int
    importance: list = field(default_factory=list)   # (rank, text, importance)

    def to_rows(self):
        return [{'iteration': i, 'templates': size, 'score': score}
                for i, (size, score) in enumerate(self.history)]

    def counter_rows(self):
        return [{'counter': name, 'value': getattr(self, name)}
                for name in ('k1', 'k2', 'shake_passes', 'routine_calls', 'ranking_calls', 'call_bound')]

    def importance_rows(self):
        return [{'rank': rank, 'template': text, 'importance': value}
                for rank, text, value in self.importance]

    def rank_notes(self):
        return {text: f"rank {rank} importance {value:.4f}" for rank, text, value in self.importance}


def importance_ranks(s, state):
    """score(S) - score(S - f) per template, ranked from most to least important."""
    state.ranking = True
    try:
        base = state.score(s)
        if len(s) == 1:
            values = [(s.templates[0].text, base)]
        else:
            state.prefetch([s.minus(f) for f in s])
            values = [(f.text, base - state.score(s.minus(f))) for f in s]
    finally:
        state.ranking = False
    values.sort(key=lambda item: (-item[1], item[0]))
    return [(rank, text, value) for rank, (text, value) in enumerate(values, start=1)]


def initial_subset(ft, init_fraction, seed):
    size = min(len(ft), max(1, math.ceil(init_fraction * len(ft))))
    chosen = set(random.Random(seed).sample(range(len(ft)), size))
    return ft.with_templates([t for i, t in enumerate(ft) if i in chosen], name='initial')


def greedy_select(ft, scorer, init_fraction=0.1, seed=1, workers=1, initial=None):
    """Run the selection loop; returns (final set, SelectionReport)."""
    if not len(ft):
        raise SelectionError("the template space is empty")
    state = scorer if isinstance(scorer, SelectionState) else SelectionState(scorer, workers)
    s = initial if initial is not None else initial_subset(ft, init_fraction, seed)
    state.max_smax = max(state.max_smax, len(s))
    start = s
    history = [(len(s), state.score(s))]
    logger.info("Initial set: %d of %d templates, score %.4f", len(s), len(ft), history[0][1])
    while True:
        state.k1 += 1
        recruited = recruit_more(s, ft, state)
        if not recruited:
            break
        logger.info("Iteration %d: recruited %d templates", state.k1, len(recruited))
        candidate = shake_off(s.with_templates(s.templates + tuple(recruited)), state)
        if state.score(s) >= state.score(candidate):
            break
        s = candidate
        history.append((len(s), state.score(s)))
        logger.info("Iteration %d: %d templates, score %.4f", state.k1, len(s), history[-1][1])
    final = s.with_templates(s.templates, name='selected')
    report = SelectionReport(start, final, history[0][1], state.score(s), history, state.k1, state.k2,
                             state.shake_passes, state.routine_calls, 0, state.call_bound())
    report.importance = importance_ranks(final, state)
    report.ranking_calls = state.ranking_calls
    return final, report
