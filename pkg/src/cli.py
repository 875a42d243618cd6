"""
src/cli.py — Command-line surface.

    python run_pipeline.py <command> [--config run.ini] [flags]

Commands: train, select-features, parse, evaluate, prune-stats,
gen-synthetic. Settings come from DEFAULT_SETTINGS, an optional config
file, SRL_* environment variables and finally the flags below; the effective
configuration is written next to every output as `<output>.config.ini`.
Any failure prints a `❌ ERROR:` line and exits with status 1.
"""
import argparse
import logging
import os
import sys

from src import config, conll_io, publish_data
from src.evaluation import full_report
from src.feature_dsl import load_template_file, save_template_file
from src.feature_selection import CorpusScorer, greedy_select
from src.maxent import load_model, save_model
from src.pipeline import PipelineConfig, corpus_samples, parse_corpus_with_model, train_model
from src.pruning import TraverseScheme, coverage_and_reduction_stats
from src.synthetic import GrammarParams, generate_synthetic_corpus, split_corpus

logger = logging.getLogger('src')

LOG_FORMAT = '   [%(levelname)s] %(message)s'


def setup_logging(verbose=0, quiet=False):
    level = logging.WARNING if quiet else (logging.DEBUG if verbose else logging.INFO)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


def _require(settings, key, flag):
    path = settings['paths'][key]
    if not path:
        raise config.ConfigError(f"No {key} corpus given; pass {flag} or set [paths] {key}")
    if not os.path.exists(path):
        raise config.ConfigError(f"{key} file not found: {path}")
    return path


def _dump_config(settings, output_path):
    return config.save_run_config(settings, f"{output_path}.config.ini")


def _templates(settings):
    path = settings['pipeline']['templates']
    if not os.path.exists(path):
        raise config.ConfigError(f"Template file not found: {path}")
    return load_template_file(path)


def _print_table(title, text):
    print(f"\n=== {title} ===")
    print(text)


def cmd_train(settings, args):
    print("--- Starting Training ---")
    corpus = conll_io.read_corpus(_require(settings, 'train', '--train'))
    templates = _templates(settings).canonical()
    pipeline = PipelineConfig.from_settings(settings)
    samples = corpus_samples(corpus, templates, pipeline)
    print(f"{len(corpus)} sentences, {len(templates)} templates, {len(samples)} samples")
    model = train_model(corpus, templates, pipeline, samples=samples)
    path = save_model(model, settings['paths']['model'])
    _dump_config(settings, path)
    print(f"Model written: {path}")
    report = publish_data.publish_train_report(model, len(samples), settings['paths']['output'], png=args.png)
    _print_table('TRAINING', report)


def cmd_select(settings, args):
    print("--- Starting Feature Selection ---")
    train_corpus = conll_io.read_corpus(_require(settings, 'train', '--train'))
    dev_corpus = conll_io.read_corpus(_require(settings, 'dev', '--dev'))
    ft = _templates(settings)
    scorer = CorpusScorer(train_corpus, dev_corpus, PipelineConfig.from_settings(settings))
    final, report = greedy_select(ft, scorer, settings['selection']['init_fraction'],
                                  settings['selection']['seed'], settings['pipeline']['workers'])
    output = settings['paths']['output']
    rank = {text: r for r, text, _ in report.importance}
    ranked = final.with_templates(sorted(final, key=lambda t: rank[t.text]))
    path = save_template_file(ranked, args.selected or os.path.join(output, 'selected.ft'),
                              notes=report.rank_notes())
    _dump_config(settings, path)
    print(f"Selected {len(final)} of {len(ft)} templates "
          f"(score {report.initial_score:.4f} -> {report.final_score:.4f}): {path}")
    _print_table('SELECTION', publish_data.publish_selection_report(report, output, png=args.png))


def cmd_parse(settings, args):
    print("--- Starting Parsing ---")
    corpus = conll_io.read_corpus(_require(settings, 'input', '--input'))
    model_path = settings['paths']['model']
    if not os.path.exists(model_path):
        raise config.ConfigError(f"Model file not found: {model_path}")
    model = load_model(model_path)
    predicted = parse_corpus_with_model(corpus, model, _templates(settings),
                                        PipelineConfig.from_settings(settings),
                                        workers=settings['pipeline']['workers'])
    out = settings['paths']['predicted'] or os.path.join(settings['paths']['output'], 'predicted.conll')
    conll_io.write_corpus(predicted, out)
    _dump_config(settings, out)
    n_frames = sum(len(s.frames) for s in predicted)
    print(f"Parsed {len(predicted)} sentences, {n_frames} predicates: {out}")


def cmd_evaluate(settings, args):
    print("--- Starting Evaluation ---")
    gold = conll_io.read_corpus(_require(settings, 'gold', '--gold'))
    predicted = conll_io.read_corpus(_require(settings, 'predicted', '--predicted'))
    report = full_report(gold, predicted, settings['evaluation']['punctuation'])
    output = settings['paths']['output']
    text = publish_data.publish_score_report(report, output, png=args.png)
    _dump_config(settings, os.path.join(output, 'evaluation'))
    _print_table('EVALUATION', text)
    if report.sem_f1 is not None:
        print(f"\nSem-F1: {100.0 * report.sem_f1:.2f}")
    return report


def cmd_prune_stats(settings, args):
    print("--- Starting Pruning Statistics ---")
    corpus = conll_io.read_corpus(_require(settings, 'train', '--train'))
    schemes = [s.value for s in TraverseScheme] if args.all_schemes else [settings['pipeline']['scheme']]
    stats = [coverage_and_reduction_stats(corpus, scheme) for scheme in schemes]
    output = settings['paths']['output']
    text = publish_data.publish_pruning_stats(stats, output, png=args.png)
    _dump_config(settings, os.path.join(output, 'pruning'))
    _print_table('PRUNING', text)
    return stats


def cmd_gen_synthetic(settings, args):
    print("--- Starting Synthetic Corpus Generation ---")
    synthetic = settings['synthetic']
    corpus = generate_synthetic_corpus(synthetic['seed'], synthetic['n_sentences'],
                                       GrammarParams.from_settings(settings))
    output = settings['paths']['output']
    parts = dict(zip(('train', 'dev', 'test'),
                     split_corpus(corpus, synthetic['dev_fraction'], synthetic['test_fraction'])))
    for name, part in parts.items():
        path = os.path.join(output, f"synthetic_{name}.conll")
        conll_io.write_corpus(part, path)
        print(f"{name}: {len(part)} sentences -> {path}")
    _dump_config(settings, os.path.join(output, 'synthetic'))


COMMANDS = {
    'train': (cmd_train, "Train a model from a gold corpus"),
    'select-features': (cmd_select, "Greedy template selection on train/dev corpora"),
    'parse': (cmd_parse, "Fill the semantic columns of a corpus with a trained model"),
    'evaluate': (cmd_evaluate, "Score a predicted corpus against gold"),
    'prune-stats': (cmd_prune_stats, "Candidate reduction and coverage of adaptive pruning"),
    'gen-synthetic': (cmd_gen_synthetic, "Write a seeded synthetic train/dev/test corpus"),
}

# flag -> (dest, settings key)
_OVERRIDES = {
    '--scheme': ('scheme', 'pipeline.scheme'),
    '--templates': ('templates', 'pipeline.templates'),
    '--seed': ('seed', 'selection.seed'),
    '--workers': ('workers', 'pipeline.workers'),
    '--sigma2': ('sigma2', 'maxent.sigma2'),
    '--max-iterations': ('max_iterations', 'maxent.max_iterations'),
    '--cutoff': ('cutoff', 'maxent.cutoff'),
    '--beam-width': ('beam_width', 'decoder.beam_width'),
    '--train': ('train', 'paths.train'),
    '--dev': ('dev', 'paths.dev'),
    '--input': ('input', 'paths.input'),
    '--gold': ('gold', 'paths.gold'),
    '--predicted': ('predicted', 'paths.predicted'),
    '--model': ('model', 'paths.model'),
    '--output': ('output', 'paths.output'),
    '--init-fraction': ('init_fraction', 'selection.init_fraction'),
    '--n-sentences': ('n_sentences', 'synthetic.n_sentences'),
    '--synthetic-seed': ('synthetic_seed', 'synthetic.seed'),
}


def build_parser():
    parser = argparse.ArgumentParser(prog='run_pipeline.py',
                                     description="Integrative semantic dependency parsing")
    sub = parser.add_subparsers(dest='command', required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument('--config', help="key = value config file")
        for flag, (dest, key) in _OVERRIDES.items():
            p.add_argument(flag, dest=dest, help=f"overrides [{key.replace('.', '] ')}")
        p.add_argument('--png', action='store_true', help="also render report tables as PNG")
        p.add_argument('-v', '--verbose', action='count', default=0)
        p.add_argument('-q', '--quiet', action='store_true')
        if name == 'select-features':
            p.add_argument('--selected', help="output template file (default <output>/selected.ft)")
        if name == 'prune-stats':
            p.add_argument('--all-schemes', action='store_true', help="report synPth and linPth")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    try:
        overrides = {key: getattr(args, dest) for dest, key in _OVERRIDES.values()}
        settings = config.validate_run_config(config.load_run_config(args.config, overrides))
        COMMANDS[args.command][0](settings, args)
    except (config.SrlError, OSError) as e:
        print(f"❌ ERROR: {e}")
        return 1
    print("\nDone.")
    return 0
