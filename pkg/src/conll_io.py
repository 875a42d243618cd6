"""
src/conll_io.py — Column-format treebank reader and writer.

A sentence block is one row per token:

    ID FORM LEMMA POS [SPLIT_FORM SPLIT_LEMMA SPLIT_POS] HEAD DEPREL PRED ARG...

with one ARG column per predicate, bound positionally to the predicates in
text order. Blocks are separated by blank lines; `#` lines are comments; the
empty-cell marker is `-` (`_` accepted on read). The full official CoNLL-2008
column set is read through the 'conll2008' column map.

parse_corpus() either fails fast on the first malformed block or collects
CorpusFormatError records and skips bad blocks. serialize_corpus() writes the
canonical form: split columns appear only when some token's split values
differ from the unsplit ones, so parse∘serialize is the identity.
"""
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Optional

from src.config import SrlError
from src.labels import ROLE_LABELS

logger = logging.getLogger(__name__)

EMPTY = '-'
EMPTY_MARKERS = {'-', '_'}
PRED_PATTERN = re.compile(r'^(\S+)\.(\d{2})$')

COLUMN_LAYOUTS = {
    'simple': {'id': 0, 'form': 1, 'lemma': 2, 'pos': 3,
               'head': 4, 'deprel': 5, 'pred': 6, 'args': 7},
    'split': {'id': 0, 'form': 1, 'lemma': 2, 'pos': 3,
              'sp_form': 4, 'sp_lemma': 5, 'sp_pos': 6,
              'head': 7, 'deprel': 8, 'pred': 9, 'args': 10},
    # ID FORM LEMMA GPOS PPOS SPLIT_FORM SPLIT_LEMMA PPOSS HEAD DEPREL PRED ARG...
    'conll2008': {'id': 0, 'form': 1, 'lemma': 2, 'pos': 4,
                  'sp_form': 5, 'sp_lemma': 6, 'sp_pos': 7,
                  'head': 8, 'deprel': 9, 'pred': 10, 'args': 11},
}
AUTO_ORDER = ('split', 'simple')


class CorpusFormatError(SrlError):
    """Raised for a malformed sentence block; carries the offending line number."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ''
        super().__init__(prefix + message)


class SentenceInvariantError(SrlError):
    """Raised when a Token, SemanticFrame or Sentence breaks its invariants."""


def _check_cell(name, value):
    if not value or any(c.isspace() for c in value):
        raise SentenceInvariantError(f"{name} must be a non-empty string without whitespace: {value!r}")


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    lemma: str
    pos: str
    head: int
    deprel: str
    pred: Optional[str] = None
    sp_form: Optional[str] = None
    sp_lemma: Optional[str] = None
    sp_pos: Optional[str] = None

    def __post_init__(self):
        if self.id < 1:
            raise SentenceInvariantError(f"token id must be >= 1, got {self.id}")
        if self.head < 0 or self.head == self.id:
            raise SentenceInvariantError(f"token {self.id}: invalid head {self.head}")
        for name in ('form', 'lemma', 'pos', 'deprel'):
            _check_cell(name, getattr(self, name))
        if self.pred is not None and not PRED_PATTERN.match(self.pred):
            raise SentenceInvariantError(
                f"token {self.id}: predicate {self.pred!r} is not of the form lemma.NN")
        # Missing split values default to the unsplit ones.
        for split, plain in (('sp_form', 'form'), ('sp_lemma', 'lemma'), ('sp_pos', 'pos')):
            if getattr(self, split) is None:
                object.__setattr__(self, split, getattr(self, plain))
            else:
                _check_cell(split, getattr(self, split))

    @property
    def is_split(self):
        return (self.sp_form, self.sp_lemma, self.sp_pos) != (self.form, self.lemma, self.pos)


@dataclass(frozen=True)
class SemanticFrame:
    """One predicate with its sense and labeled arguments (sorted by token id)."""
    predicate_id: int
    sense: str
    arguments: tuple = ()
    lemma: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'arguments', tuple(sorted((int(i), r) for i, r in self.arguments)))
        if not re.fullmatch(r'\d{2}', self.sense):
            raise SentenceInvariantError(f"frame {self.predicate_id}: bad sense {self.sense!r}")
        ids = [i for i, _ in self.arguments]
        if len(ids) != len(set(ids)):
            raise SentenceInvariantError(f"frame {self.predicate_id}: duplicate argument token")
        for _, role in self.arguments:
            if role not in ROLE_LABELS:
                raise SentenceInvariantError(f"frame {self.predicate_id}: unknown role label {role!r}")

    @property
    def roleset(self):
        return f"{self.lemma}.{self.sense}"

    def role_of(self, token_id):
        for i, role in self.arguments:
            if i == token_id:
                return role
        return None


@dataclass(frozen=True)
class Sentence:
    tokens: tuple
    frames: tuple = ()
    problems: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'tokens', tuple(self.tokens))
        object.__setattr__(self, 'frames', tuple(self.frames))
        n = len(self.tokens)
        for position, token in enumerate(self.tokens, start=1):
            if token.id != position:
                raise SentenceInvariantError(f"token ids must run 1..n; found {token.id} at position {position}")
            if token.head > n:
                raise SentenceInvariantError(f"token {token.id}: head {token.head} does not resolve")
        pred_ids = [t.id for t in self.tokens if t.pred is not None]
        frame_ids = [f.predicate_id for f in self.frames]
        if pred_ids != frame_ids:
            raise SentenceInvariantError(
                f"frames {frame_ids} do not match predicate tokens {pred_ids}")
        for frame in self.frames:
            roleset = self.tokens[frame.predicate_id - 1].pred
            if roleset != frame.roleset:
                raise SentenceInvariantError(
                    f"frame {frame.predicate_id}: roleset {frame.roleset!r} != PRED column {roleset!r}")
            for arg_id, _ in frame.arguments:
                if not 1 <= arg_id <= n:
                    raise SentenceInvariantError(f"frame {frame.predicate_id}: argument {arg_id} out of range")
        if not self.problems:
            object.__setattr__(self, 'problems', tuple(_syntax_problems(self.tokens)))

    def __len__(self):
        return len(self.tokens)

    def token(self, token_id):
        return self.tokens[token_id - 1]

    @property
    def forms(self):
        return tuple(t.form for t in self.tokens)

    def frame_for(self, predicate_id):
        for frame in self.frames:
            if frame.predicate_id == predicate_id:
                return frame
        return None

    def with_frames(self, frames):
        """Copy with the PRED column rewritten from ``frames``."""
        frames = sorted(frames, key=lambda f: f.predicate_id)
        rolesets = {f.predicate_id: f.roleset for f in frames}
        tokens = [Token(t.id, t.form, t.lemma, t.pos, t.head, t.deprel, rolesets.get(t.id),
                        t.sp_form, t.sp_lemma, t.sp_pos) for t in self.tokens]
        return Sentence(tokens, frames, self.problems)

    def without_semantics(self):
        return self.with_frames(())


def _syntax_problems(tokens):
    """Multi-root and cycle findings; the dependency graph repairs them."""
    problems = []
    roots = [t.id for t in tokens if t.head == 0]
    if len(roots) != 1:
        problems.append(f"expected exactly one root, found {len(roots)}: {roots}")
    n = len(tokens)
    for t in tokens:
        node, steps = t.id, 0
        while node != 0 and steps <= n:
            node = tokens[node - 1].head
            steps += 1
        if node != 0:
            problems.append(f"token {t.id} does not reach the root (cycle)")
            break
    return problems


def _is_empty(cell):
    return cell in EMPTY_MARKERS


def _layout_error(rows, layout):
    """Return (message, line_no) if the block does not fit ``layout``, else None."""
    cols = COLUMN_LAYOUTS[layout]
    fixed = cols['args']
    for line_no, cells in rows:
        if len(cells) < fixed:
            return f"expected at least {fixed} columns, found {len(cells)}", line_no
        if not cells[cols['head']].lstrip('-').isdigit():
            return f"head {cells[cols['head']]!r} is not an integer", line_no
    n_preds = sum(1 for _, cells in rows if not _is_empty(cells[cols['pred']]))
    for line_no, cells in rows:
        if len(cells) != fixed + n_preds:
            return (f"ARG column count mismatch: expected {fixed + n_preds} columns "
                    f"for {n_preds} predicates, found {len(cells)}"), line_no
    return None


def _build_sentence(rows, layout):
    cols = COLUMN_LAYOUTS[layout]
    tokens, pred_rows = [], []
    for line_no, cells in rows:
        def optional(name):
            if name not in cols or _is_empty(cells[cols[name]]):
                return None
            return cells[cols[name]]
        try:
            token_id = int(cells[cols['id']])
            pred = optional('pred')
            token = Token(token_id, cells[cols['form']], cells[cols['lemma']], cells[cols['pos']],
                          int(cells[cols['head']]), cells[cols['deprel']], pred,
                          optional('sp_form'), optional('sp_lemma'), optional('sp_pos'))
        except (ValueError, SentenceInvariantError) as e:
            raise CorpusFormatError(str(e), line_no) from None
        tokens.append(token)
        if pred is not None:
            pred_rows.append(token)

    frames = []
    for j, pred_token in enumerate(pred_rows):
        arguments = []
        for line_no, cells in rows:
            label = cells[cols['args'] + j]
            if _is_empty(label):
                continue
            if label not in ROLE_LABELS:
                raise CorpusFormatError(f"unknown role label {label!r}", line_no)
            arguments.append((int(cells[cols['id']]), label))
        lemma, sense = PRED_PATTERN.match(pred_token.pred).groups()
        frames.append(SemanticFrame(pred_token.id, sense, tuple(arguments), lemma))
    try:
        sentence = Sentence(tokens, frames)
    except SentenceInvariantError as e:
        raise CorpusFormatError(str(e), rows[0][0]) from None
    for problem in sentence.problems:
        logger.warning("Sentence at line %d: %s", rows[0][0], problem)
    return sentence


def _parse_block(rows, layout):
    if layout == 'auto':
        for candidate in AUTO_ORDER:
            if _layout_error(rows, candidate) is None:
                return _build_sentence(rows, candidate)
        # Report against the simplified layout, the canonical one.
        message, line_no = _layout_error(rows, 'simple')
        raise CorpusFormatError(message, line_no)
    if layout not in COLUMN_LAYOUTS:
        raise CorpusFormatError(f"unknown column layout {layout!r}")
    error = _layout_error(rows, layout)
    if error:
        raise CorpusFormatError(*error)
    return _build_sentence(rows, layout)


def _split_line(line):
    line = line.rstrip('\r\n')
    return line.split('\t') if '\t' in line else line.split()


def _blocks(lines):
    rows = []
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if stripped.startswith('#'):
            continue
        if not stripped:
            if rows:
                yield rows
                rows = []
            continue
        rows.append((line_no, _split_line(line)))
    if rows:
        yield rows


def parse_corpus(source, layout='auto', fail_fast=True, problems=None):
    """
    Parse sentence blocks from ``source`` (a string or an iterable of lines).

    layout    — 'auto' (split layout if it fits, else simplified), 'simple',
                'split' or 'conll2008'.
    fail_fast — raise the first CorpusFormatError. When False, errors are
                appended to ``problems`` (a list) and the bad block is skipped.
    """
    if isinstance(source, str):
        source = source.splitlines()
    sentences = []
    for rows in _blocks(source):
        try:
            sentences.append(_parse_block(rows, layout))
        except CorpusFormatError as e:
            if fail_fast:
                raise
            logger.warning("Skipping sentence: %s", e)
            if problems is not None:
                problems.append(e)
    return sentences


def read_corpus(path, **kwargs):
    with open(path, encoding='utf-8') as f:
        return parse_corpus(f, **kwargs)


def _format_row(token, split, frames):
    cells = [str(token.id), token.form, token.lemma, token.pos]
    if split:
        cells += [token.sp_form, token.sp_lemma, token.sp_pos]
    cells += [str(token.head), token.deprel, token.pred or EMPTY]
    cells += [frame.role_of(token.id) or EMPTY for frame in frames]
    return '\t'.join(cells)


def format_sentence(sentence):
    split = any(t.is_split for t in sentence.tokens)
    return '\n'.join(_format_row(t, split, sentence.frames) for t in sentence.tokens)


def serialize_corpus(sentences):
    """Canonical text for ``sentences``; the empty corpus serializes to ''."""
    blocks = []
    for sentence in sentences:
        if not isinstance(sentence, Sentence):
            raise SentenceInvariantError(f"not a Sentence: {type(sentence).__name__}")
        if not sentence.tokens:
            raise SentenceInvariantError("cannot serialize an empty sentence")
        blocks.append(format_sentence(sentence))
    return '\n\n'.join(blocks) + '\n' if blocks else ''


def write_corpus(sentences, path):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(serialize_corpus(sentences))
    return path
