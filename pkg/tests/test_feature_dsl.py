"""
tests/test_feature_dsl.py — Template parsing, canonical printing, lint and
template files.
"""
import glob
import os

import pytest

from src.feature_dsl import (DuplicateTemplateError, Equality, FamilyCollect, PairQuery,
                             PathCollect, PathDistance, TemplateLintError, TemplateSyntaxError,
                             load_template_file, parse_template, save_template_file, template_set)

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.mark.parametrize("text", [
    'p.lemma',
    'p-1.pos + p.pos',
    'a.lm-1.spPos',
    'a.spPos.baseline_Ax + a.voice + a:p|direction',
    'p.children.dprel.noDup',
    'a:p|dpPath.dprel.seq',
    'a:p|linePath.distance',
    'a.semdprel=A0?',
    'a.form=p.form?',
    'a.isCurPred.lemma',
    'a.existSemdprel_A0',
    'a.lowSupportVerb:p|dpPathShared.spPos.seq',
    'a1:p|direction + a2:p|direction',
])
def test_canonical_text_is_a_fixed_point(text):
    assert parse_template(text).text == text


def test_loose_syntax_normalizes():
    # 1. Setup: parentheses, missing reducer, extra whitespace
    loose = '(a:p|dpPath.dprel) +  p.lemma'

    # 2. Run
    template = parse_template(loose)

    # 3. Assert
    assert template.text == 'a:p|dpPath.dprel.seq + p.lemma'


def test_term_kinds():
    terms = parse_template('p.children.pos.bag + a:p|dpPathArgu.lemma.noDup + '
                           'a:p|dpPath.distance + a:p|existCross + a.dprel=OBJ?').terms

    assert [type(t) for t in terms] == [FamilyCollect, PathCollect, PathDistance, PairQuery, Equality]
    assert terms[0].reducer == 'bag'
    assert terms[1].kind == 'dpPathArgu'


def test_iscurpred_alone_is_an_attribute():
    template = parse_template('a.isCurPred')

    assert template.terms[0].attrs == ('isCurPred',)
    assert template.terms[0].node.steps == ()


@pytest.mark.parametrize("text, message", [
    ('x.lemma', 'unknown anchor'),
    ('a.colour', 'unknown attribute'),
    ('a:p dpPath.lemma', 'malformed path'),
    ('a.lemma.bag', 'reducer'),
    ('a.semdprel=A0', 'must end with'),
    ('a:p|zigzag.lemma', 'unknown path kind'),
])
def test_syntax_errors_are_located(text, message):
    with pytest.raises(TemplateSyntaxError, match=message) as info:
        parse_template(text)

    assert info.value.span is not None


def test_template_set_fingerprint_ignores_order():
    first = template_set(['p.lemma', 'a.pos'])
    second = template_set(['a.pos', 'p.lemma'])

    assert first.fingerprint() == second.fingerprint()
    assert first.canonical().texts == ('a.pos', 'p.lemma')
    assert first.minus(first.templates[0]).texts == ('a.pos',)


def test_duplicates_are_rejected():
    with pytest.raises(DuplicateTemplateError):
        template_set(['p.lemma', '(p.lemma)'])


def test_file_round_trip_keeps_provenance_and_notes(tmp_path):
    # 1. Setup
    templates = template_set(['p.lemma', 'a:p|direction'], name='mine', provenance='hand-picked')

    # 2. Run
    path = save_template_file(templates, str(tmp_path / 'mine.ft'), notes={'p.lemma': 'rank 1'})
    loaded = load_template_file(path)

    # 3. Assert
    assert loaded.texts == templates.texts
    assert loaded.provenance == 'hand-picked'
    assert 'p.lemma  # rank 1' in (tmp_path / 'mine.ft').read_text()


def test_file_errors_name_the_line(tmp_path):
    path = tmp_path / 'bad.ft'
    path.write_text("# provenance: test\np.lemma\n\na.nope\n")

    with pytest.raises(TemplateSyntaxError) as info:
        load_template_file(str(path))

    assert info.value.line_no == 4


def test_strict_lint_rejects_bare_sense(tmp_path):
    path = tmp_path / 'lint.ft'
    path.write_text("p.currentSense + a.lemma\n")

    assert len(load_template_file(str(path))) == 1
    with pytest.raises(TemplateLintError, match='sense'):
        load_template_file(str(path), strict=True)


def test_shipped_catalogs_load():
    paths = sorted(glob.glob(os.path.join(ROOT, 'data', 'templates', '*.ft')))
    sizes = {os.path.basename(p): len(load_template_file(p)) for p in paths}

    assert sizes['overlap.ft'] == 5
    assert sizes['default.ft'] == 19
    assert min(sizes.values()) >= 5
    assert len(sizes) == 8
