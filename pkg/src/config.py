"""
src/config.py — Centralized configuration and constants.

Loads environment overrides from .local.env, defines every file path used
across the project, declares the POS class tables that drive predicate
filtering, support words and voice, and holds the DEFAULT_SETTINGS dict that
backs every CLI run. The settings dict is the run configuration: each section
below maps to a `[section]` of the `key = value` config file, and every key
has a documented default.

load_run_config() merges defaults <- config file <- SRL_* environment
variables <- CLI overrides, and validate_run_config() catches bad values
before any corpus is read.
"""
import configparser
import copy
import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv(dotenv_path='.local.env')


class SrlError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SrlError, ValueError):
    """Raised when a run configuration is missing, malformed or out of range."""


# 1. Define Directories
DATA_DIR = 'data'
TEMPLATES_DIR = os.path.join(DATA_DIR, 'templates')
DEMO_DIR = os.path.join(DATA_DIR, 'demo')
OUTPUT_DIR = os.getenv('SRL_OUTPUT_DIR', 'output')

# 2. Define File Paths
DEFAULT_TEMPLATE_FILE = os.path.join(TEMPLATES_DIR, 'default.ft')
EXAMPLE_SENTENCE_FILE = os.path.join(DEMO_DIR, 'table1.conll')

# 3. POS classes (Penn tag prefixes unless noted)
POS_CLASSES = {
    'verb': ('V',),
    'noun': ('N',),
    'prep': ('IN',),
}
MODAL_TAGS = {'MD'}
PARTICIPLE_TAGS = {'VBN'}
PASSIVE_AUXILIARIES = {'be', 'get'}
PUNCTUATION_TAGS = {',', '.', ':', '``', "''", '-LRB-', '-RRB-', '#', '$', 'PU'}

# 4. Voice values
VOICE_ACTIVE = 'Active'
VOICE_PASSIVE = 'Passive'
VOICE_DEFAULT = 'NoVoice'   # nouns and anything else without voice

# Defaults for every run. Booleans, ints, floats and strings are coerced from
# config-file text using the type of the default value.
DEFAULT_SETTINGS = {
    'pipeline': {
        'scheme': 'synPth',              # 'synPth' | 'linPth'
        'templates': DEFAULT_TEMPLATE_FILE,
        'adaptive': True,                # False = full traversal, no auxiliary labels
        'stage_features': True,          # implicit @stage=... bias feature per sample
        'workers': 1,                    # threads for selection scoring and parsing
    },
    'maxent': {
        'sigma2': 1.0,                   # Gaussian prior variance
        'memory': 10,                    # L-BFGS history size
        'max_iterations': 200,
        'tolerance': 1e-5,               # projected-gradient tolerance
        'cutoff': 1,                     # keep features seen at least this often
    },
    'decoder': {
        'beam_width': 8,
        'mask_policy': 'position',       # 'position' | 'stage'
        'forbid_crossing': False,
        'exhaustive_cap': 8,             # max candidates for exhaustive decoding
        'widen': True,                   # also run widths 1,2,4,... below beam_width
    },
    'features': {
        'distance_mode': 'bucket',       # 'bucket' | 'raw'
    },
    'selection': {
        'init_fraction': 0.1,
        'seed': 1,
    },
    'synthetic': {
        'n_sentences': 500,
        'seed': 1,
        'n_verbs': 12,
        'n_nouns': 20,
        'n_adverbs': 4,
        'n_preps': 4,
        'max_len': 18,
        'nominal_rate': 0.3,             # share of noun lemmas that are predicates
        'agentive_rate': 0.5,            # share of nominal predicates taking themselves as A0
        'unaccusative_rate': 0.25,       # share of verbs whose subject is A1
        'embed_prob': 0.3,               # chance the object is an embedded clause
        'grandchild_arg_prob': 0.0,      # chance a PP object (not the prep) is the argument
        'dev_fraction': 0.1,
        'test_fraction': 0.1,
    },
    'evaluation': {
        'punctuation': True,             # count punctuation tokens in LAS
    },
    'paths': {
        'train': '',
        'dev': '',
        'input': '',
        'gold': '',
        'predicted': '',
        'model': os.path.join(OUTPUT_DIR, 'model.txt'),
        'output': OUTPUT_DIR,
    },
}

_CHOICES = {
    ('pipeline', 'scheme'): ('synPth', 'linPth'),
    ('decoder', 'mask_policy'): ('position', 'stage'),
    ('features', 'distance_mode'): ('bucket', 'raw'),
}
_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


def _coerce(section, key, raw):
    """Convert config text to the type of the default value for section.key."""
    default = DEFAULT_SETTINGS[section][key]
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if isinstance(default, bool):
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigError(
            f"[{section}] {key} = {raw!r}: expected {type(default).__name__}") from None
    return text


def _apply(settings, section, key, value, origin):
    if section not in settings:
        raise ConfigError(f"Unknown config section [{section}] in {origin}")
    if key not in settings[section]:
        raise ConfigError(f"Unknown config key '{key}' in [{section}] ({origin})")
    settings[section][key] = _coerce(section, key, value)


def _env_overrides(settings):
    """SRL_<SECTION>_<KEY> environment variables (e.g. SRL_MAXENT_SIGMA2)."""
    for section, values in settings.items():
        for key in values:
            env_name = f"SRL_{section}_{key}".upper()
            if env_name in os.environ:
                _apply(settings, section, key, os.environ[env_name], env_name)


def load_run_config(path=None, overrides=None, use_env=True):
    """
    Build the effective run configuration.

    Precedence, lowest first: DEFAULT_SETTINGS, the `key = value` file at
    ``path``, SRL_* environment variables, then ``overrides``, the CLI flags as a mapping
    of 'section.key' or (section, key) to value. Returns a
    fresh nested dict; DEFAULT_SETTINGS is never mutated.
    """
    settings = copy.deepcopy(DEFAULT_SETTINGS)
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"Config file not found: {path}")
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read(path, encoding='utf-8')
        except configparser.Error as e:
            raise ConfigError(f"Cannot parse config file {path}: {e}") from e
        for section in parser.sections():
            for key, value in parser.items(section):
                _apply(settings, section, key, value, path)
    if use_env:
        _env_overrides(settings)
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        section, key = dotted if isinstance(dotted, tuple) else dotted.split('.', 1)
        _apply(settings, section, key, value, 'command line')
    return settings


def _format_value(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def save_run_config(settings, path):
    """Write settings in the `key = value` file form read by load_run_config."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    lines = []
    for section, values in settings.items():
        lines.append(f"[{section}]")
        for key, value in values.items():
            lines.append(f"{key} = {_format_value(value)}")
        lines.append('')
    with open(path, 'w', encoding='utf-8') as f:
        f.write('\n'.join(lines))
    return path


def validate_run_config(settings):
    for (section, key), allowed in _CHOICES.items():
        if settings[section][key] not in allowed:
            raise ConfigError(
                f"[{section}] {key} must be one of {', '.join(allowed)}, "
                f"got {settings[section][key]!r}")
    maxent = settings['maxent']
    if maxent['sigma2'] <= 0:
        raise ConfigError("[maxent] sigma2 must be positive.")
    if maxent['memory'] < 1:
        raise ConfigError("[maxent] memory must be at least 1.")
    if maxent['max_iterations'] < 0 or maxent['cutoff'] < 0:
        raise ConfigError("[maxent] max_iterations and cutoff must be non-negative.")
    decoder = settings['decoder']
    if decoder['beam_width'] < 1:
        raise ConfigError("[decoder] beam_width must be at least 1.")
    if decoder['exhaustive_cap'] < 0:
        raise ConfigError("[decoder] exhaustive_cap must be non-negative.")
    fraction = settings['selection']['init_fraction']
    if not 0 < fraction <= 1:
        raise ConfigError("[selection] init_fraction must lie in (0, 1].")
    if settings['pipeline']['workers'] < 1:
        raise ConfigError("[pipeline] workers must be at least 1.")
    return settings
