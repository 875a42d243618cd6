"""
tests/test_syntax_graph.py — Tree queries on the demo sentence and repair of
malformed parses.
"""
from src.syntax_graph import DepGraph


def test_family_of_the_root(demo_sentence):
    graph = DepGraph.from_sentence(demo_sentence)

    family = graph.family(7)

    assert family['children'] == [3, 5, 6, 8]
    assert (family['lm'], family['rm']) == (3, 8)
    assert (family['ln'], family['rn']) == (6, 8)
    assert family['noFarChildren'] == [5, 6]


def test_path_decomposition_meets_at_lowest_common_ancestor(demo_sentence):
    # 1. Setup
    graph = DepGraph.from_sentence(demo_sentence)

    # 2. Run: Investor (1) to traders (6)
    d = graph.decompose_paths(1, 6)

    # 3. Assert
    assert d.meet == 7
    assert d.dp_path_argu == (1, 2, 3, 7)
    assert d.dp_path_pred == (6, 7)
    assert d.dp_path_shared == (7,)
    assert d.dp_path == (1, 2, 3, 7, 6)


def test_tree_relations(demo_sentence):
    graph = DepGraph.from_sentence(demo_sentence)

    assert graph.dp_tree_relation(3, 3) == 'self'
    assert graph.dp_tree_relation(2, 3) == 'child'
    assert graph.dp_tree_relation(3, 2) == 'parent'
    assert graph.dp_tree_relation(1, 3) == 'descendant'
    assert graph.dp_tree_relation(7, 2) == 'ancestor'
    assert graph.dp_tree_relation(6, 3) == 'sibling'
    assert graph.dp_tree_relation(6, 2) == 'uncle'
    assert graph.dp_tree_relation(2, 6) == 'nephew'
    assert graph.dp_tree_relation(1, 6) == 'else'


def test_support_words(demo_sentence):
    graph = DepGraph.from_sentence(demo_sentence)

    # Investor -> focus -> shifted -> said
    assert graph.support_word(1, 'verb', 'low') == 3
    assert graph.support_word(1, 'verb', 'high') == 7
    assert graph.support_word(1, 'noun', 'low') == 2
    assert graph.support_word(7, 'verb', 'low') is None


def test_linear_path_runs_in_both_directions():
    assert DepGraph.linear_path(2, 5) == (2, 3, 4, 5)
    assert DepGraph.linear_path(5, 2) == (5, 4, 3, 2)


def test_cycles_and_extra_roots_are_repaired():
    # 1. Setup: 1 and 3 are roots, 4 <-> 5 form a cycle
    heads = [0, 1, 0, 5, 4]

    # 2. Run
    graph = DepGraph(heads, ['NN', 'VB', 'NN', 'NN', 'NN'])

    # 3. Assert
    assert graph.root == 1
    assert graph.heads[3] == 1
    assert graph.heads[4] == 1
    assert all(graph.path_to_root(n)[-1] == 1 for n in range(1, 6))
    assert len(graph.repaired) == 2


CONVERSE = {'self': 'self', 'parent': 'child', 'child': 'parent', 'ancestor': 'descendant',
            'descendant': 'ancestor', 'sibling': 'sibling', 'uncle': 'nephew', 'nephew': 'uncle',
            'else': 'else'}


def test_pphead_takes_the_leftmost_sibling_under_a_preposition():
    # 1. Setup: went(1) <- to(2, IN) <- the(3), station(4)
    graph = DepGraph([0, 1, 2, 2], ['VBD', 'IN', 'DT', 'NN'])

    # 2. Run / 3. Assert
    assert graph.pphead(4) == 3
    assert graph.pphead(3) == 4
    assert graph.pphead(2) == 1       # head is a verb: plain head
    assert graph.pphead(1) == 1       # the root is its own pphead


def test_pphead_of_an_only_child_is_the_preposition():
    graph = DepGraph([0, 1, 2], ['VBD', 'IN', 'NN'])

    assert graph.pphead(3) == 2


def test_tree_relations_are_converses(demo_sentence, synthetic_corpus):
    for sentence in [demo_sentence] + synthetic_corpus[:40]:
        graph = DepGraph.from_sentence(sentence)
        nodes = range(1, len(sentence) + 1)
        for a in nodes:
            for p in nodes:
                assert graph.dp_tree_relation(p, a) == CONVERSE[graph.dp_tree_relation(a, p)]


def test_low_support_word_lies_below_the_high_one(synthetic_corpus):
    checked = 0
    for sentence in synthetic_corpus[:60]:
        graph = DepGraph.from_sentence(sentence)
        for node in range(1, len(sentence) + 1):
            path = graph.path_to_root(node)
            for pos_class in ('verb', 'noun', 'prep'):
                low = graph.support_word(node, pos_class, 'low')
                high = graph.support_word(node, pos_class, 'high')
                if low is None or high is None:
                    assert low is None and high is None
                    continue
                checked += 1
                assert 0 < path.index(low) <= path.index(high)

    assert checked > 0
