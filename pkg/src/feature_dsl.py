"""
src/feature_dsl.py — Feature-template macro language: syntax, printing, files.

A template is one or more terms joined by `+`:

    a.lm.lemma                  attribute of a navigated node
    p-1.pos                     surface offsets on anchors and navigations
    a.spPos.baseline_Ax         several attributes of one node, joined
    p.children.dprel.noDup      family collection reduced by seq/noDup/bag
    a:p|dpPath.lemma.bag        attribute collected along a path
    a:p|linePath.distance       path length (bucketed)
    a:p|dpTreeRelation          pair queries: direction, dpTreeRelation, existCross
    a.semdprel=A0?              equality query against a literal or another term

Canonical text joins terms with ' + ', always prints the reducer and never
prints parentheses; parse_template(t).text == t for canonical t. Evaluation
lives in src/features.py.
"""
import hashlib
import logging
import os
import re
from dataclasses import dataclass

from src.config import SrlError
from src.labels import ROLE_LABELS

logger = logging.getLogger(__name__)

ANCHORS = {'a', 'p'}
SUPPORT_NAVIGATIONS = {
    'highSupportVerb': ('verb', 'high'), 'lowSupportVerb': ('verb', 'low'),
    'highSupportNoun': ('noun', 'high'), 'lowSupportNoun': ('noun', 'low'),
    'highSupportProp': ('prep', 'high'), 'lowSupportProp': ('prep', 'low'),
}
NAVIGATIONS = {'h', 'lm', 'ln', 'rm', 'rn', 'pphead', 'isCurPred'} | set(SUPPORT_NAVIGATIONS)
COLLECTIONS = {'children', 'noFarChildren'}
LEXICAL_ATTRIBUTES = {'form', 'lemma', 'spForm', 'spLemma'}
SENSE_ATTRIBUTES = {'sense', 'currentSense'}
NODE_ATTRIBUTES = LEXICAL_ATTRIBUTES | SENSE_ATTRIBUTES | {
    'pos', 'spPos', 'dprel', 'semdprel', 'voice', 'isCurPred', 'baseline_Ax',
    'baseline_Mod', 'isLeaf', 'ctypeSemdprel', 'rtypeSemdprel'}
EXIST_PREFIX = 'existSemdprel_'
PATH_KINDS = {'dpPath', 'dpPathArgu', 'dpPathPred', 'dpPathShared', 'linePath'}
PAIR_QUERIES = {'direction', 'dpTreeRelation', 'existCross'}
REDUCERS = {'seq', 'noDup', 'bag'}
DEFAULT_REDUCER = 'seq'

_NAME = re.compile(EXIST_PREFIX + r'[A-Za-z0-9][A-Za-z0-9\-]*|[A-Za-z_]+')
_OFFSET = re.compile(r'-?\d+')
_LITERAL = re.compile(r'[^\s?()+=]+')
_TERM_START = re.compile(r'[ap](?=[.:\-\d]|$)')


class TemplateSyntaxError(SrlError):
    """Raised for an unparseable template; span is (start, end) in the source."""

    def __init__(self, message, text='', span=None, line_no=None):
        self.text = text
        self.span = span
        self.line_no = line_no
        where = f" at {span[0]}-{span[1]}" if span else ''
        line = f"line {line_no}: " if line_no is not None else ''
        super().__init__(f"{line}{message}{where} in {text!r}")


class TemplateLintError(TemplateSyntaxError):
    """Raised in strict mode when a template fails the lint rules."""


def is_attribute(name):
    return name in NODE_ATTRIBUTES or (name.startswith(EXIST_PREFIX) and name[len(EXIST_PREFIX):] in ROLE_LABELS)


def _offset_text(offset):
    return str(offset) if offset else ''


@dataclass(frozen=True)
class NodeExpr:
    anchor: str
    offset: int = 0
    steps: tuple = ()           # (navigation, offset) pairs

    @property
    def text(self):
        out = self.anchor + _offset_text(self.offset)
        for nav, offset in self.steps:
            out += f".{nav}{_offset_text(offset)}"
        return out


@dataclass(frozen=True)
class Attr:
    node: NodeExpr
    attrs: tuple

    @property
    def text(self):
        return self.node.text + ''.join('.' + a for a in self.attrs)


@dataclass(frozen=True)
class FamilyCollect:
    node: NodeExpr
    collection: str
    attr: str
    reducer: str

    @property
    def text(self):
        return f"{self.node.text}.{self.collection}.{self.attr}.{self.reducer}"


@dataclass(frozen=True)
class PathCollect:
    start: NodeExpr
    end: NodeExpr
    kind: str
    attr: str
    reducer: str

    @property
    def text(self):
        return f"{self.start.text}:{self.end.text}|{self.kind}.{self.attr}.{self.reducer}"


@dataclass(frozen=True)
class PathDistance:
    start: NodeExpr
    end: NodeExpr
    kind: str

    @property
    def text(self):
        return f"{self.start.text}:{self.end.text}|{self.kind}.distance"


@dataclass(frozen=True)
class PairQuery:
    start: NodeExpr
    end: NodeExpr
    query: str

    @property
    def text(self):
        return f"{self.start.text}:{self.end.text}|{self.query}"


@dataclass(frozen=True)
class Literal:
    value: str

    @property
    def text(self):
        return self.value


@dataclass(frozen=True)
class Equality:
    left: object
    right: object

    @property
    def text(self):
        return f"{self.left.text}={self.right.text}?"


@dataclass(frozen=True)
class FeatureTemplate:
    """A parsed template; ``text`` is its canonical source."""
    terms: tuple

    @property
    def text(self):
        return ' + '.join(term.text for term in self.terms)

    def __str__(self):
        return self.text


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message, start=None):
        start = self.pos if start is None else start
        raise TemplateSyntaxError(message, self.text, (start, max(start + 1, self.pos)))

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, char):
        self.skip()
        return self.text.startswith(char, self.pos)

    def accept(self, char):
        if self.peek(char):
            self.pos += len(char)
            return True
        return False

    def expect(self, char):
        if not self.accept(char):
            self.error(f"expected '{char}'")

    def name(self):
        self.skip()
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.error("expected a name")
        self.pos = m.end()
        return m.group(), m.start()

    def offset(self):
        m = _OFFSET.match(self.text, self.pos)
        if not m:
            return 0
        self.pos = m.end()
        return int(m.group())

    def template(self):
        terms = [self.term()]
        while self.accept('+'):
            terms.append(self.term())
        self.skip()
        if self.pos != len(self.text):
            self.error("unexpected trailing text")
        return FeatureTemplate(tuple(terms))

    def term(self):
        if self.accept('('):
            inner = self.term()
            self.expect(')')
            return inner
        start = self.pos
        left = self.primary()
        if self.accept('='):
            self.skip()
            if _TERM_START.match(self.text, self.pos):
                right = self.primary()
            else:
                m = _LITERAL.match(self.text, self.pos)
                if not m:
                    self.error("expected a literal or a term after '='")
                self.pos = m.end()
                right = Literal(m.group())
            if not self.accept('?'):
                self.error("equality query must end with '?'", start)
            return Equality(left, right)
        return left

    def node(self):
        name, start = self.name()
        if name not in ANCHORS:
            self.error(f"unknown anchor {name!r} (expected a or p)", start)
        anchor_offset = self.offset()
        steps = []
        while True:
            save = self.pos
            if not self.accept('.'):
                break
            self.skip()
            m = _NAME.match(self.text, self.pos)
            if not m or m.group() not in NAVIGATIONS:
                self.pos = save
                break
            self.pos = m.end()
            # isCurPred is a navigation only when something follows it.
            if m.group() == 'isCurPred' and not self.text.startswith('.', self.pos):
                self.pos = save
                break
            steps.append((m.group(), self.offset()))
        return NodeExpr(name, anchor_offset, tuple(steps))

    def reducer(self):
        if not self.accept('.'):
            return DEFAULT_REDUCER
        name, start = self.name()
        if name not in REDUCERS:
            self.error(f"unknown reducer {name!r}", start)
        return name

    def attribute(self):
        name, start = self.name()
        if name in REDUCERS:
            self.error(f"reducer {name!r} applied to a non-collection", start)
        if not is_attribute(name):
            self.error(f"unknown attribute {name!r}", start)
        return name

    def primary(self):
        start = self.pos
        first = self.node()
        if self.accept(':'):
            second = self.node()
            if not self.accept('|'):
                self.error("malformed path: expected '|' after x:y", start)
            kind, kind_start = self.name()
            if kind in PAIR_QUERIES:
                return PairQuery(first, second, kind)
            if kind not in PATH_KINDS:
                self.error(f"unknown path kind {kind!r}", kind_start)
            self.expect('.')
            name, name_start = self.name()
            if name == 'distance':
                return PathDistance(first, second, kind)
            if not is_attribute(name):
                self.error(f"unknown attribute {name!r}", name_start)
            return PathCollect(first, second, kind, name, self.reducer())
        self.skip()
        if self.text.startswith('.', self.pos):
            m = _NAME.match(self.text, self.pos + 1)
            if m and m.group() in COLLECTIONS:
                self.pos = m.end()
                self.expect('.')
                attr = self.attribute()
                return FamilyCollect(first, m.group(), attr, self.reducer())
        attrs = []
        while self.accept('.'):
            attrs.append(self.attribute())
        if not attrs:
            self.error("node expression needs an attribute", start)
        return Attr(first, tuple(attrs))


def parse_template(text):
    return _Parser(text.strip()).template()


def lint_template(template):
    """Messages for rule violations; sense values must travel with a lexical attribute of the same node."""
    problems = []
    terms = [t for t in template.terms]
    for term in terms:
        if isinstance(term, Attr) and SENSE_ATTRIBUTES & set(term.attrs):
            lexical = any(isinstance(other, Attr) and other.node == term.node
                          and LEXICAL_ATTRIBUTES & set(other.attrs) for other in terms)
            if not lexical:
                problems.append(f"{template.text}: sense used without a word form of {term.node.text}")
    return problems


class DuplicateTemplateError(TemplateSyntaxError):
    """Raised when a template set would contain the same template twice."""


@dataclass(frozen=True)
class TemplateSet:
    name: str
    templates: tuple
    provenance: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'templates', tuple(self.templates))
        seen = set()
        for t in self.templates:
            if t.text in seen:
                raise DuplicateTemplateError("duplicate template", t.text)
            seen.add(t.text)

    def __len__(self):
        return len(self.templates)

    def __iter__(self):
        return iter(self.templates)

    def __contains__(self, template):
        return template.text in self.texts

    @property
    def texts(self):
        return tuple(t.text for t in self.templates)

    def canonical(self):
        """Same templates sorted by text: the order used for training."""
        return TemplateSet(self.name, sorted(self.templates, key=lambda t: t.text), self.provenance)

    def fingerprint(self):
        digest = hashlib.sha1('\n'.join(sorted(self.texts)).encode('utf-8'))
        return digest.hexdigest()

    def with_templates(self, templates, name=None):
        return TemplateSet(name or self.name, templates, self.provenance)

    def plus(self, template):
        return self.with_templates(self.templates + (template,))

    def minus(self, template):
        return self.with_templates(tuple(t for t in self.templates if t.text != template.text))


def template_set(texts, name='inline', provenance=''):
    return TemplateSet(name, tuple(parse_template(t) for t in texts), provenance)


def load_template_file(path, name=None, strict=False):
    """
    Read one template per line. Blank lines and `#` comments are skipped,
    trailing ` # ...` notes are ignored, and a `# provenance: ...` line sets
    the set's provenance tag. Errors name the offending line.
    """
    templates, provenance, seen = [], '', {}
    with open(path, encoding='utf-8') as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if line.startswith('#'):
                if line[1:].strip().lower().startswith('provenance:'):
                    provenance = line.split(':', 1)[1].strip()
                continue
            line = line.split(' #', 1)[0].strip()
            if not line:
                continue
            try:
                template = parse_template(line)
            except TemplateSyntaxError as e:
                raise TemplateSyntaxError(str(e), line, e.span, line_no) from None
            if template.text in seen:
                raise DuplicateTemplateError(f"duplicate of line {seen[template.text]}", line,
                                             line_no=line_no)
            seen[template.text] = line_no
            for problem in lint_template(template):
                if strict:
                    raise TemplateLintError(problem, line, line_no=line_no)
                logger.warning("%s:%d: %s", path, line_no, problem)
            templates.append(template)
    name = name or os.path.splitext(os.path.basename(path))[0]
    return TemplateSet(name, tuple(templates), provenance or name)


def save_template_file(templates, path, notes=None):
    """Write ``templates``; ``notes`` maps template text to a trailing comment."""
    notes = notes or {}
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    lines = [f"# provenance: {templates.provenance or templates.name}"]
    for t in templates:
        note = notes.get(t.text)
        lines.append(f"{t.text}  # {note}" if note else t.text)
    with open(path, 'w', encoding='utf-8') as f:
        f.write('\n'.join(lines) + '\n')
    return path
