"""
src/synthetic.py — Seeded synthetic treebank with a learnable role grammar.

Stands in for the licensed shared-task corpus in tests and demos. Sentences
are clauses `[DT] [NN] NN VBD [RB] object [IN [DT] NN] .`, where the object
is a noun phrase or (once per sentence at most) an embedded clause.

Role rule, fixed by the lexicon so labels are learnable:
  * every verb is a predicate; its subject is A0 (A1 for unaccusative verbs,
    which take no object), its object A1, its adverb AM-MNR, and its
    preposition AM-LOC or AM-TMP depending on the preposition lemma;
  * nominal-predicate nouns take their noun modifier as A0, or, when
    agentive, themselves as A0 and the modifier as A1;
  * sense numbers are a function of the lemma.

Every argument is a child of its predicate or the predicate itself, unless
grandchild_arg_prob moves a preposition's role down to its object.
"""
import random
from dataclasses import dataclass, fields

from src.config import DEFAULT_SETTINGS, SrlError
from src.conll_io import SemanticFrame, Sentence, Token


class GrammarError(SrlError):
    """Raised for degenerate grammar parameters."""


@dataclass(frozen=True)
class GrammarParams:
    n_verbs: int = 12
    n_nouns: int = 20
    n_adverbs: int = 4
    n_preps: int = 4
    max_len: int = 18
    nominal_rate: float = 0.3
    agentive_rate: float = 0.5
    unaccusative_rate: float = 0.25
    embed_prob: float = 0.3
    grandchild_arg_prob: float = 0.0
    optional_prob: float = 0.3

    @classmethod
    def from_settings(cls, settings):
        section = settings.get('synthetic', DEFAULT_SETTINGS['synthetic'])
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in section.items() if k in names})

    def validate(self):
        if self.n_verbs < 1 or self.n_nouns < 1:
            raise GrammarError("grammar needs at least one verb and one noun lemma")
        if self.n_adverbs < 0 or self.n_preps < 0:
            raise GrammarError("vocabulary sizes must be non-negative")
        if self.max_len < 4:
            raise GrammarError("max_len must be at least 4 (subject, verb, object, period)")
        for name in ('nominal_rate', 'agentive_rate', 'unaccusative_rate', 'embed_prob',
                     'grandchild_arg_prob', 'optional_prob'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise GrammarError(f"{name} must lie in [0, 1]")
        return self


class _Lexicon:
    def __init__(self, params):
        self.params = params
        n_nominal = round(params.nominal_rate * params.n_nouns)
        self.n_nominal = n_nominal
        self.n_agentive = round(params.agentive_rate * n_nominal)
        self.n_unaccusative = round(params.unaccusative_rate * params.n_verbs)

    def verb(self, i):
        return f"vb{i}", f"{(i % 3) + 1:02d}", i < self.n_unaccusative

    def noun(self, i):
        nominal = i < self.n_nominal
        return f"nn{i}", f"{(i % 2) + 1:02d}" if nominal else None, nominal and i < self.n_agentive

    @staticmethod
    def prep_role(i):
        return 'AM-LOC' if i % 2 == 0 else 'AM-TMP'


class _Builder:
    """Accumulates words in surface order; heads are word indices."""

    def __init__(self):
        self.words = []
        self.senses = {}
        self.roles = {}

    def add(self, form, lemma, pos, deprel):
        self.words.append({'form': form, 'lemma': lemma, 'pos': pos, 'deprel': deprel, 'head': None})
        return len(self.words) - 1

    def attach(self, child, head):
        self.words[child]['head'] = head

    def predicate(self, index, sense):
        self.senses[index] = sense
        self.roles.setdefault(index, {})

    def role(self, pred, arg, label):
        self.roles[pred][arg] = label

    def to_sentence(self):
        tokens = []
        for i, w in enumerate(self.words):
            head = 0 if w['head'] is None else w['head'] + 1
            pred = f"{w['lemma']}.{self.senses[i]}" if i in self.senses else None
            tokens.append(Token(i + 1, w['form'], w['lemma'], w['pos'], head, w['deprel'], pred))
        frames = [SemanticFrame(i + 1, self.senses[i],
                                tuple((a + 1, r) for a, r in self.roles[i].items()),
                                self.words[i]['lemma'])
                  for i in sorted(self.senses)]
        return Sentence(tokens, frames)


class _Generator:
    def __init__(self, params, rng):
        self.p = params
        self.lex = _Lexicon(params)
        self.rng = rng

    def chance(self, prob):
        return self.rng.random() < prob

    def noun(self, b, deprel):
        lemma, sense, agentive = self.lex.noun(self.rng.randrange(self.p.n_nouns))
        plural = self.chance(0.3)
        index = b.add(lemma + ('s' if plural else ''), lemma, 'NNS' if plural else 'NN', deprel)
        if sense is not None:
            b.predicate(index, sense)
            if agentive:
                b.role(index, index, 'A0')
        return index, sense is not None, agentive

    def noun_phrase(self, b, deprel, optional=True):
        det = b.add(*(('the', 'the') if self.chance(0.5) else ('a', 'a')), 'DT', 'NMOD') \
            if optional and self.chance(0.5) else None
        mod = self.noun(b, 'NMOD')[0] if optional and self.chance(self.p.optional_prob) else None
        head, nominal, agentive = self.noun(b, deprel)
        for child in (det, mod):
            if child is not None:
                b.attach(child, head)
        if nominal and mod is not None:
            b.role(head, mod, 'A1' if agentive else 'A0')
        return head

    def clause(self, b, deprel, depth, optional=True):
        subject = self.noun_phrase(b, 'SBJ', optional)
        lemma, sense, unaccusative = self.lex.verb(self.rng.randrange(self.p.n_verbs))
        verb = b.add(lemma + 'ed', lemma, 'VBD', deprel)
        b.predicate(verb, sense)
        b.attach(subject, verb)
        b.role(verb, subject, 'A1' if unaccusative else 'A0')
        if optional and self.p.n_adverbs and self.chance(self.p.optional_prob):
            i = self.rng.randrange(self.p.n_adverbs)
            adverb = b.add(f"rb{i}ly", f"rb{i}", 'RB', 'MNR')
            b.attach(adverb, verb)
            b.role(verb, adverb, 'AM-MNR')
        if not unaccusative:
            if optional and depth == 0 and self.chance(self.p.embed_prob):
                obj = self.clause(b, 'OBJ', depth + 1)
            else:
                obj = self.noun_phrase(b, 'OBJ', optional)
            b.attach(obj, verb)
            b.role(verb, obj, 'A1')
        if optional and self.p.n_preps and self.chance(self.p.optional_prob):
            i = self.rng.randrange(self.p.n_preps)
            prep = b.add(f"in{i}", f"in{i}", 'IN', 'ADV')
            b.attach(prep, verb)
            pobj = self.noun_phrase(b, 'PMOD', optional)
            b.attach(pobj, prep)
            target = pobj if self.chance(self.p.grandchild_arg_prob) else prep
            b.role(verb, target, self.lex.prep_role(i))
        return verb

    def sentence(self, optional=True):
        b = _Builder()
        root = self.clause(b, 'ROOT', 0, optional)
        period = b.add('.', '.', '.', 'P')
        b.attach(period, root)
        return b

    def build(self, attempts=50):
        for _ in range(attempts):
            b = self.sentence()
            if len(b.words) <= self.p.max_len:
                return b.to_sentence()
        return self.sentence(optional=False).to_sentence()


def generate_synthetic_corpus(seed, n_sentences, grammar_params=None):
    """Deterministic for a fixed seed; every sentence satisfies all Sentence invariants."""
    params = (grammar_params or GrammarParams()).validate()
    if n_sentences < 0:
        raise GrammarError("n_sentences must be non-negative")
    generator = _Generator(params, random.Random(seed))
    return [generator.build() for _ in range(n_sentences)]


def split_corpus(corpus, dev_fraction=0.1, test_fraction=0.1):
    """Positional train/dev/test split (no shuffling; the generator is already random)."""
    n = len(corpus)
    n_test = int(round(n * test_fraction))
    n_dev = int(round(n * dev_fraction))
    n_train = n - n_dev - n_test
    return corpus[:n_train], corpus[n_train:n_train + n_dev], corpus[n_train + n_dev:]
