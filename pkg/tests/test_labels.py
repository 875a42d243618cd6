"""
tests/test_labels.py — Label inventory sizes, stage membership and ordering.
"""
from src import labels


def test_label_set_sizes_per_scheme():
    assert len(labels.LabelSet.for_scheme('synPth')) == 78
    assert len(labels.LabelSet.for_scheme('linPth')) == 79


def test_auxiliary_labels_follow_the_scheme():
    syn = labels.LabelSet.for_scheme('synPth')
    lin = labels.LabelSet.for_scheme('linPth')

    assert labels.NO_MORE_ARG in syn and labels.NO_MORE_LEFT_ARG not in syn
    assert labels.NO_MORE_LEFT_ARG in lin and labels.NO_MORE_RIGHT_ARG in lin
    assert labels.NO_MORE_ARG not in lin


def test_stage_membership():
    assert labels.is_predicate_stage_label('01')
    assert labels.is_predicate_stage_label(labels.NONE_PRED)
    assert not labels.is_predicate_stage_label('A0')
    assert labels.is_argument_stage_label('AM-TMP')
    assert labels.is_argument_stage_label(labels.NO_MORE_ARG)
    assert not labels.is_argument_stage_label('21')


def test_order_labels_uses_inventory_order():
    # 1. Setup
    mixed = ['noMoreArg', 'A1', 'zz-unknown', '02', 'NONE_ARG', 'A0', 'NONE_PRED', '01', 'A1']

    # 2. Run
    ordered = labels.order_labels(mixed)

    # 3. Assert
    assert ordered == ['01', '02', 'NONE_PRED', 'A0', 'A1', 'NONE_ARG', 'noMoreArg', 'zz-unknown']
