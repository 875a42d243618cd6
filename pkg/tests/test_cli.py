"""
tests/test_cli.py — The run_pipeline.py commands end to end under a
temporary directory: generate, train, parse, evaluate, select and report
pruning statistics, plus error exits and run-to-run determinism.
"""
import os

import pandas as pd
import pytest

from src import config, conll_io
from src.cli import main
from src.feature_dsl import load_template_file
from src.maxent import load_model

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
TEMPLATES = os.path.join(ROOT, 'data', 'templates', 'default.ft')


def _run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def corpus_dir(tmp_path):
    assert _run('gen-synthetic', '--n-sentences', 60, '--synthetic-seed', 5, '--output', tmp_path, '-q') == 0
    return tmp_path


def _train_and_parse(corpus_dir, out):
    model = out / 'model.txt'
    assert _run('train', '--train', corpus_dir / 'synthetic_train.conll', '--templates', TEMPLATES,
                '--model', model, '--output', out, '--max-iterations', 40, '-q') == 0
    assert _run('parse', '--input', corpus_dir / 'synthetic_test.conll', '--templates', TEMPLATES,
                '--model', model, '--output', out, '-q') == 0
    return model, out / 'predicted.conll'


def test_gen_synthetic_writes_the_split(corpus_dir):
    sizes = {name: len(conll_io.read_corpus(str(corpus_dir / f"synthetic_{name}.conll")))
             for name in ('train', 'dev', 'test')}

    assert sizes == {'train': 48, 'dev': 6, 'test': 6}
    assert (corpus_dir / 'synthetic.config.ini').exists()


def test_train_parse_evaluate(corpus_dir, capsys):
    # 1. Setup
    out = corpus_dir / 'run'

    # 2. Run
    model, predicted = _train_and_parse(corpus_dir, out)
    code = _run('evaluate', '--gold', corpus_dir / 'synthetic_test.conll', '--predicted', predicted,
                '--output', out)

    # 3. Assert
    assert code == 0
    assert model.exists() and predicted.exists()
    assert (out / 'model.txt.config.ini').exists()
    assert (out / 'predicted.conll.config.ini').exists()
    scores = pd.read_csv(out / 'evaluation.csv')
    assert list(scores.columns) == ['metric', 'value']
    assert 'Sem-F1:' in capsys.readouterr().out


def test_effective_config_records_the_flags(corpus_dir):
    out = corpus_dir / 'run'
    model, _ = _train_and_parse(corpus_dir, out)

    with open(f"{model}.config.ini", encoding='utf-8') as f:
        text = f.read()

    assert 'max_iterations = 40' in text
    assert f"templates = {TEMPLATES}" in text


def test_gold_against_itself_scores_100(corpus_dir, capsys):
    gold = corpus_dir / 'synthetic_dev.conll'

    code = _run('evaluate', '--gold', gold, '--predicted', gold, '--output', corpus_dir / 'eval')

    assert code == 0
    assert 'Sem-F1: 100.00' in capsys.readouterr().out


def test_linear_pruning_stats_cover_everything(corpus_dir):
    code = _run('prune-stats', '--train', corpus_dir / 'synthetic_train.conll', '--scheme', 'linPth',
                '--output', corpus_dir / 'stats', '-q')

    rows = pd.read_csv(corpus_dir / 'stats' / 'pruning.csv')
    assert code == 0
    assert list(rows['scheme']) == ['linPth']
    assert rows['coverage_pct'].iloc[0] == 100.0


def test_pruning_stats_for_both_schemes(corpus_dir):
    code = _run('prune-stats', '--train', corpus_dir / 'synthetic_train.conll', '--all-schemes',
                '--output', corpus_dir / 'stats', '-q')

    rows = pd.read_csv(corpus_dir / 'stats' / 'pruning.csv')
    assert code == 0
    assert list(rows['scheme']) == ['synPth', 'linPth']
    assert (rows['pairs_after'] < rows['pairs_before']).all()


def test_select_features_writes_a_ranked_file(corpus_dir, tmp_path):
    # 1. Setup
    space = tmp_path / 'space.ft'
    space.write_text('a.dprel\np.lemma + a.dprel\na:p|dpTreeRelation\na3.form\n', encoding='utf-8')
    selected = tmp_path / 'selected.ft'

    # 2. Run
    code = _run('select-features', '--train', corpus_dir / 'synthetic_train.conll',
                '--dev', corpus_dir / 'synthetic_dev.conll', '--templates', space,
                '--selected', selected, '--output', tmp_path / 'sel', '--max-iterations', 30,
                '--init-fraction', 0.5, '-q')

    # 3. Assert
    assert code == 0
    chosen = load_template_file(str(selected))
    assert 1 <= len(chosen) <= 4
    assert (tmp_path / 'sel' / 'selection_counters.csv').exists()
    assert 'rank 1' in selected.read_text(encoding='utf-8')


def test_missing_input_exits_with_an_error(tmp_path, capsys):
    code = _run('evaluate', '--gold', tmp_path / 'nope.conll', '--predicted', tmp_path / 'nope.conll')

    assert code == 1
    assert '❌ ERROR' in capsys.readouterr().out


def test_bad_flag_value_exits_with_an_error(corpus_dir, capsys):
    code = _run('train', '--train', corpus_dir / 'synthetic_train.conll', '--sigma2', 'lots')

    assert code == 1
    assert 'expected float' in capsys.readouterr().out


def test_repeated_runs_are_byte_identical(corpus_dir):
    # 1. Run twice into separate directories
    model_a, predicted_a = _train_and_parse(corpus_dir, corpus_dir / 'a')
    model_b, predicted_b = _train_and_parse(corpus_dir, corpus_dir / 'b')
    for out, predicted in ((corpus_dir / 'a', predicted_a), (corpus_dir / 'b', predicted_b)):
        assert _run('evaluate', '--gold', corpus_dir / 'synthetic_test.conll', '--predicted', predicted,
                    '--output', out, '-q') == 0

    # 2. Assert
    assert model_a.read_bytes() == model_b.read_bytes()
    assert predicted_a.read_bytes() == predicted_b.read_bytes()
    assert (corpus_dir / 'a' / 'evaluation.txt').read_bytes() == (corpus_dir / 'b' / 'evaluation.txt').read_bytes()
    assert (corpus_dir / 'a' / 'train.txt').read_bytes() == (corpus_dir / 'b' / 'train.txt').read_bytes()


def test_seed_flag_reaches_the_selection_seed(corpus_dir, tmp_path):
    # 1. Setup
    space = tmp_path / 'space.ft'
    space.write_text('a.dprel\np.lemma\n', encoding='utf-8')
    selected = tmp_path / 'seeded.ft'

    # 2. Run
    code = _run('select-features', '--train', corpus_dir / 'synthetic_train.conll',
                '--dev', corpus_dir / 'synthetic_dev.conll', '--templates', space,
                '--selected', selected, '--output', tmp_path / 'sel', '--max-iterations', 10,
                '--init-fraction', 0.5, '--seed', 5, '-q')

    # 3. Assert
    effective = config.load_run_config(f"{selected}.config.ini", use_env=False)
    assert code == 0
    assert effective['selection']['seed'] == 5
    assert 'seed' not in effective['pipeline']


def test_train_records_provenance_and_full_label_set(corpus_dir):
    # 1. Setup
    out = corpus_dir / 'run'

    # 2. Run
    model_path, _ = _train_and_parse(corpus_dir, out)
    model = load_model(str(model_path))
    report = pd.read_csv(out / 'train.csv').set_index('field')['value']

    # 3. Assert
    assert model.provenance == load_template_file(TEMPLATES).canonical().fingerprint()
    assert len(model.labels) == 78
    assert int(report['samples']) > 0
    assert int(report['labels']) == 78
