"""
src/pipeline.py — Training samples, model training, corpus parsing and
template-set scoring.

Training samples are built with the gold partial structure the decoder will
later rebuild from its own predictions: a predicate-stage pair sees the gold
senses of earlier candidates, an argument-stage pair sees every gold sense,
the gold frames of earlier predicates and the gold roles already assigned
earlier in the current predicate's candidate stream.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from src.config import DEFAULT_SETTINGS, ConfigError
from src.decoder import DecodeConfig, parse_sentence
from src.evaluation import semantic_score
from src.features import EvalContext, extract_features
from src.labels import LabelSet, is_auxiliary, is_role
from src.maxent import TrainConfig, train
from src.pruning import TraverseScheme, argument_pairs, predicate_pairs
from src.syntax_graph import DepGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    scheme: str = 'synPth'
    adaptive: bool = True
    stage_features: bool = True
    distance_mode: str = 'bucket'
    train: TrainConfig = field(default_factory=TrainConfig)
    decode: DecodeConfig = field(default_factory=DecodeConfig)

    def __post_init__(self):
        TraverseScheme(self.scheme)
        if self.decode.scheme != self.scheme:
            raise ConfigError(f"decoder scheme {self.decode.scheme!r} differs from {self.scheme!r}")

    @classmethod
    def from_settings(cls, settings):
        pipeline = settings.get('pipeline', DEFAULT_SETTINGS['pipeline'])
        features = settings.get('features', DEFAULT_SETTINGS['features'])
        return cls(scheme=pipeline['scheme'], adaptive=pipeline['adaptive'],
                   stage_features=pipeline['stage_features'],
                   distance_mode=features['distance_mode'],
                   train=TrainConfig.from_settings(settings),
                   decode=DecodeConfig.from_settings(settings))


def sentence_samples(sentence, templates, config):
    """(feature strings, label) for every training pair of one gold sentence."""
    graph = DepGraph.from_sentence(sentence)
    samples = []
    gold_senses = {f.predicate_id: f.sense for f in sentence.frames}
    for pair in predicate_pairs(sentence, graph.pos_classes):
        earlier = {p: s for p, s in gold_senses.items() if p < pair.dependent}
        ctx = EvalContext(sentence, graph, pair.stage, pair.head, pair.dependent,
                          senses=earlier, distance_mode=config.distance_mode)
        samples.append((extract_features(templates, ctx, config.stage_features), pair.label))
    finished = {}
    for frame in sentence.frames:
        current = {}
        for pair in argument_pairs(sentence, frame, config.scheme, graph, config.adaptive):
            ctx = EvalContext(sentence, graph, pair.stage, pair.head, pair.dependent,
                              senses=gold_senses, frames=finished, current=dict(current),
                              distance_mode=config.distance_mode)
            samples.append((extract_features(templates, ctx, config.stage_features), pair.label))
            if is_role(pair.label):
                current[pair.dependent] = pair.label
        finished = {**finished, frame.predicate_id: dict(frame.arguments)}
    return samples


def corpus_samples(corpus, templates, config):
    samples = []
    for sentence in corpus:
        samples.extend(sentence_samples(sentence, templates, config))
    return samples


def model_labels(config):
    """The scheme's label inventory; auxiliary labels only when traversal is adaptive."""
    labels = LabelSet.for_scheme(config.scheme).labels
    if config.adaptive:
        return labels
    return tuple(label for label in labels if not is_auxiliary(label))


def train_model(corpus, templates, config, samples=None):
    """
    Train one shared model for both stages over model_labels(config);
    provenance is the template-set fingerprint. ``samples`` may carry what
    corpus_samples already extracted for the same corpus and templates.
    """
    templates = templates.canonical()
    if samples is None:
        samples = corpus_samples(corpus, templates, config)
    logger.info("Extracted %d training samples from %d sentences", len(samples), len(corpus))
    return train(samples, config.train, provenance=templates.fingerprint(), labels=model_labels(config))


def parse_corpus_with_model(corpus, model, templates, config, workers=1):
    """Copies of ``corpus`` with the semantic columns replaced by decoded frames."""
    templates = templates.canonical()
    if model.provenance and model.provenance != templates.fingerprint():
        logger.warning("Template set %s does not match the set the model was trained with",
                       templates.name)

    def parse_one(sentence):
        bare = sentence.without_semantics()
        return bare.with_frames(parse_sentence(bare, model, templates.templates, config.decode))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(parse_one, corpus))
    return [parse_one(s) for s in corpus]


def score_template_set(templates, train_corpus, dev_corpus, config):
    """Labeled semantic F1 on ``dev_corpus`` of a model trained with ``templates``."""
    model = train_model(train_corpus, templates, config)
    predicted = parse_corpus_with_model(dev_corpus, model, templates, config)
    return semantic_score(dev_corpus, predicted)[2]
