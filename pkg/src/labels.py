"""
src/labels.py — Class-label inventory for word-pair classification.

One label space covers both stages: predicate senses "01".."21" plus
NONE_PRED for (VR, candidate) pairs, the PropBank/NomBank argument roles plus
NONE_ARG for (predicate, candidate) pairs, and the auxiliary stop labels that
close a traversal. LabelSet fixes the order used for tie-breaking and for the
label list stored in model files.
"""
from dataclasses import dataclass

NONE_PRED = 'NONE_PRED'
NONE_ARG = 'NONE_ARG'
NO_MORE_ARG = 'noMoreArg'
NO_MORE_LEFT_ARG = 'noMoreLeftArg'
NO_MORE_RIGHT_ARG = 'noMoreRightArg'

SENSE_LABELS = tuple(f"{i:02d}" for i in range(1, 22))

ARGUMENT_LABELS = (
    'A0', 'A1', 'A2', 'A3', 'A4', 'A5', 'AA', 'AM',
    'C-A0', 'C-A1', 'C-A2', 'C-A3', 'C-A4',
    'R-A0', 'R-A1', 'R-A2', 'R-A3', 'R-A4', 'R-AA',
    'AM-PRD', 'AM-PRT', 'AM-REC', 'AM-TM', 'AM-TMP', 'AM-ADV', 'AM-CAU',
    'AM-DIR', 'AM-DIS', 'AM-EXT', 'AM-LOC', 'AM-MNR', 'AM-MOD', 'AM-NEG',
    'AM-PNC',
    'C-AM-ADV', 'C-AM-CAU', 'C-AM-DIR', 'C-AM-DIS', 'C-AM-EXT', 'C-AM-LOC',
    'C-AM-MNR', 'C-AM-NEG', 'C-AM-PNC', 'C-AM-TMP',
    'R-AM-ADV', 'R-AM-CAU', 'R-AM-DIR', 'R-AM-EXT', 'R-AM-LOC', 'R-AM-MNR',
    'R-AM-PNC', 'R-AM-TMP',
    'C-R-AM-TMP', 'SU',
)

ROLE_LABELS = frozenset(ARGUMENT_LABELS)
AUXILIARY_LABELS = frozenset({NO_MORE_ARG, NO_MORE_LEFT_ARG, NO_MORE_RIGHT_ARG})
SCHEME_AUXILIARIES = {
    'synPth': (NO_MORE_ARG,),
    'linPth': (NO_MORE_LEFT_ARG, NO_MORE_RIGHT_ARG),
}


def is_sense(label):
    return label in SENSE_LABELS


def is_role(label):
    return label in ROLE_LABELS


def is_auxiliary(label):
    return label in AUXILIARY_LABELS


def is_predicate_stage_label(label):
    return label == NONE_PRED or is_sense(label)


def is_argument_stage_label(label):
    return label == NONE_ARG or is_role(label) or is_auxiliary(label)


@dataclass(frozen=True)
class LabelSet:
    """Ordered label inventory for one traversal scheme."""
    scheme: str
    labels: tuple

    @classmethod
    def for_scheme(cls, scheme):
        if scheme not in SCHEME_AUXILIARIES:
            raise ValueError(f"Unknown traverse scheme: {scheme!r}")
        labels = (SENSE_LABELS + (NONE_PRED,) + ARGUMENT_LABELS + (NONE_ARG,)
                  + SCHEME_AUXILIARIES[scheme])
        return cls(scheme, labels)

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self.labels

    def index(self, label):
        return self.labels.index(label)


# Global order across both schemes, used to sort model label lists.
LABEL_ORDER = {label: i for i, label in enumerate(
    LabelSet.for_scheme('synPth').labels + SCHEME_AUXILIARIES['linPth'])}


def order_labels(labels):
    """Sort labels by inventory order; labels outside the inventory go last, sorted."""
    known = sorted((l for l in set(labels) if l in LABEL_ORDER), key=LABEL_ORDER.__getitem__)
    unknown = sorted(l for l in set(labels) if l not in LABEL_ORDER)
    return known + unknown
