"""
src/features.py — Evaluate feature templates against a word pair in context.

EvalContext carries the sentence, its DepGraph, the pair being classified
and the partial semantic structure built so far: senses assigned to earlier
predicate candidates, the frames of predicates already decoded, and the
roles assigned so far to the current predicate. Training fills it with gold
labels, decoding with predictions.

Every template yields exactly one feature string `<template>=<value>`.
Absent nodes and empty collections become NIL; tokens are escaped so that
'#' (the join separator) and '=' never collide.
"""
from dataclasses import dataclass, field

from src import config
from src.feature_dsl import (EXIST_PREFIX, SUPPORT_NAVIGATIONS, Attr, Equality, FamilyCollect,
                             Literal, PairQuery, PathCollect, PathDistance)
from src.pruning import PREDICATE_STAGE, VR
from src.syntax_graph import pos_in_class

NIL = 'NIL'
SEPARATOR = '#'
STAGE_FEATURE = '@stage={}'


def escape(token):
    """Feature-safe token; None (absent) becomes NIL."""
    if token is None:
        return NIL
    if token == NIL:
        return '\\' + NIL
    return token.replace('\\', '\\\\').replace('#', '\\#').replace('=', '\\=')


def bucket_distance(steps):
    """
    Bucket a path distance. Distances count steps along the path (its nodes
    minus one), so adjacent words are 1 apart on linePath and a head and its
    dependent are 1 apart on dpPath.
    """
    if steps <= 5:
        return str(steps)
    return '6-10' if steps <= 10 else '>10'


@dataclass
class EvalContext:
    sentence: object
    graph: object
    stage: str
    head: int
    dependent: int
    senses: dict = field(default_factory=dict)      # predicate node -> sense
    frames: dict = field(default_factory=dict)      # finished predicate -> {arg: role}
    current: dict = field(default_factory=dict)     # arg -> role for the current predicate
    distance_mode: str = 'bucket'

    @property
    def predicate(self):
        """The current predicate; for (VR, c) pairs it is the candidate c."""
        return self.dependent if self.stage == PREDICATE_STAGE or self.head == VR else self.head

    def roles_of(self, predicate):
        if predicate == self.predicate and self.stage != PREDICATE_STAGE:
            return self.current
        return self.frames.get(predicate, {})

    def arcs(self):
        for pred, roles in self.frames.items():
            for arg in roles:
                yield pred, arg
        if self.stage != PREDICATE_STAGE:
            for arg in self.current:
                yield self.head, arg


def _crosses(first, second):
    l1, r1 = sorted(first)
    l2, r2 = sorted(second)
    return l1 < l2 < r1 < r2 or l2 < l1 < r2 < r1


def exists_cross(ctx, a, p):
    return any(_crosses((p, a), arc) for arc in ctx.arcs())


def _node(ctx, expr):
    n = len(ctx.sentence)
    node = ctx.dependent if expr.anchor == 'a' else ctx.predicate

    def shift(x, k):
        if x is None or not k:
            return x
        return x + k if 1 <= x + k <= n else None

    node = shift(node, expr.offset)
    for nav, offset in expr.steps:
        if node is None:
            return None
        if nav == 'h':
            node = ctx.graph.head(node)
        elif nav in ('lm', 'ln', 'rm', 'rn'):
            node = ctx.graph.family(node)[nav]
        elif nav == 'pphead':
            node = ctx.graph.pphead(node)
        elif nav == 'isCurPred':
            node = node if node == ctx.predicate else None
        else:
            pos_class, level = SUPPORT_NAVIGATIONS[nav]
            node = ctx.graph.support_word(node, pos_class, level)
        node = shift(node, offset)
    return node


def _voice(ctx, node):
    token = ctx.sentence.token(node)
    if not pos_in_class(token.pos, 'verb', ctx.graph.pos_classes):
        return config.VOICE_DEFAULT
    if token.pos in config.PARTICIPLE_TAGS:
        auxiliaries = [c for c in ctx.graph.children(node)]
        for ancestor in ctx.graph.path_to_root(node)[1:]:
            if not pos_in_class(ctx.graph.pos(ancestor), 'verb', ctx.graph.pos_classes):
                break
            auxiliaries.append(ancestor)
        if any(ctx.sentence.token(x).lemma in config.PASSIVE_AUXILIARIES for x in auxiliaries):
            return config.VOICE_PASSIVE
    return config.VOICE_ACTIVE


def _baseline_ax(ctx, node):
    p = ctx.predicate
    nouns = [t.id for t in ctx.sentence.tokens if pos_in_class(t.pos, 'noun', ctx.graph.pos_classes)]
    left = [x for x in nouns if x < p]
    right = [x for x in nouns if x > p]
    if left and node == left[-1]:
        return 'A0'
    if right and node == right[0]:
        return 'A1'
    return None


def _baseline_mod(ctx, node):
    p = ctx.predicate
    related = ctx.graph.head(node) == p or ctx.graph.head(p) == node
    if ctx.sentence.token(node).pos in config.MODAL_TAGS and related:
        return 'AM-MOD'
    return None


def _typed_semdprel(ctx, node, prefix):
    found = None
    for role in ctx.roles_of(node).values():
        if role.startswith(prefix):
            found = role[len(prefix):]
    return found


def node_attribute(ctx, node, attr):
    """Raw (unescaped) value of one attribute, or None when absent."""
    if node is None:
        return None
    token = ctx.sentence.token(node)
    if attr in ('form', 'lemma', 'pos'):
        return getattr(token, attr)
    if attr == 'dprel':
        return token.deprel
    if attr == 'spForm':
        return token.sp_form
    if attr == 'spLemma':
        return token.sp_lemma
    if attr == 'spPos':
        return token.sp_pos
    if attr == 'semdprel':
        return ctx.current.get(node) if ctx.stage != PREDICATE_STAGE else None
    if attr in ('sense', 'currentSense'):
        return ctx.senses.get(node)
    if attr == 'voice':
        return _voice(ctx, node)
    if attr == 'isCurPred':
        return '1' if node == ctx.predicate else '0'
    if attr == 'isLeaf':
        return '1' if ctx.graph.is_leaf(node) else '0'
    if attr == 'baseline_Ax':
        return _baseline_ax(ctx, node)
    if attr == 'baseline_Mod':
        return _baseline_mod(ctx, node)
    if attr == 'ctypeSemdprel':
        return _typed_semdprel(ctx, node, 'C-')
    if attr == 'rtypeSemdprel':
        return _typed_semdprel(ctx, node, 'R-')
    if attr.startswith(EXIST_PREFIX):
        label = attr[len(EXIST_PREFIX):]
        roles = ctx.current if ctx.stage != PREDICATE_STAGE else {}
        return '1' if any(r == label and x != node for x, r in roles.items()) else '0'
    raise KeyError(attr)


def _reduce(tokens, reducer):
    if not tokens:
        return NIL
    if reducer == 'noDup':
        tokens = [t for i, t in enumerate(tokens) if i == 0 or t != tokens[i - 1]]
    elif reducer == 'bag':
        tokens = sorted(set(tokens))
    return SEPARATOR.join(tokens)


def _path_nodes(ctx, kind, start, end):
    if kind == 'linePath':
        return ctx.graph.linear_path(start, end)
    d = ctx.graph.decompose_paths(start, end)
    return {'dpPath': d.dp_path, 'dpPathArgu': d.dp_path_argu,
            'dpPathPred': d.dp_path_pred, 'dpPathShared': d.dp_path_shared}[kind]


def _term_value(ctx, term):
    if isinstance(term, Attr):
        node = _node(ctx, term.node)
        return SEPARATOR.join(escape(node_attribute(ctx, node, a)) for a in term.attrs)
    if isinstance(term, FamilyCollect):
        node = _node(ctx, term.node)
        if node is None:
            return NIL
        members = ctx.graph.family(node)[term.collection]
        return _reduce([escape(node_attribute(ctx, x, term.attr)) for x in members], term.reducer)
    if isinstance(term, Literal):
        return term.value
    if isinstance(term, Equality):
        return '1' if _term_value(ctx, term.left) == _term_value(ctx, term.right) else '0'
    start, end = _node(ctx, term.start), _node(ctx, term.end)
    if start is None or end is None:
        return NIL
    if isinstance(term, PathCollect):
        nodes = _path_nodes(ctx, term.kind, start, end)
        return _reduce([escape(node_attribute(ctx, x, term.attr)) for x in nodes], term.reducer)
    if isinstance(term, PathDistance):
        steps = len(_path_nodes(ctx, term.kind, start, end)) - 1
        return str(steps) if ctx.distance_mode == 'raw' else bucket_distance(steps)
    if isinstance(term, PairQuery):
        if term.query == 'direction':
            return 'self' if start == end else ('left' if start < end else 'right')
        if term.query == 'dpTreeRelation':
            return ctx.graph.dp_tree_relation(start, end)
        return '1' if exists_cross(ctx, start, end) else '0'
    raise TypeError(f"unknown term {term!r}")


def evaluate(template, ctx):
    value = SEPARATOR.join(_term_value(ctx, term) for term in template.terms)
    return f"{template.text}={value}"


def evaluate_all(templates, ctx):
    return [evaluate(t, ctx) for t in templates]


def stage_feature(stage):
    return STAGE_FEATURE.format(stage)


def extract_features(templates, ctx, stage_features=True):
    """Feature strings for one pair: every template plus the optional stage bias."""
    features = evaluate_all(templates, ctx)
    if stage_features:
        features.append(stage_feature(ctx.stage))
    return features
