"""
src/syntax_graph.py — Indexed view of a sentence's dependency tree.

DepGraph precomputes head links, ordered child lists, depths and every
node's path to the root, then answers the structural queries behind the
feature templates: family members (lm, ln, rm, rn, children,
noFarChildren), the path decomposition between two nodes at their lowest
common ancestor, linear paths, support verbs/nouns/prepositions, pphead and
tree relations.

Malformed parses are repaired at construction: extra roots and cycle members
are re-headed to the sentence root, so every query is total.
"""
import logging
from dataclasses import dataclass

from src import config

logger = logging.getLogger(__name__)


def pos_in_class(pos, pos_class, pos_classes=None):
    prefixes = (pos_classes or config.POS_CLASSES)[pos_class]
    return any(pos.startswith(prefix) for prefix in prefixes)


@dataclass(frozen=True)
class PathDecomposition:
    meet: int
    dp_path_argu: tuple
    dp_path_pred: tuple
    dp_path_shared: tuple
    dp_path: tuple


class DepGraph:
    """Immutable dependency tree over token ids 1..n (0 is the virtual root)."""

    def __init__(self, heads, pos_tags, pos_classes=None):
        self.n = len(heads)
        self.pos_tags = tuple(pos_tags)
        self.pos_classes = pos_classes or config.POS_CLASSES
        self.repaired = []
        fixed = self._repair([0] + list(heads))
        self.heads = tuple(fixed)
        children = [[] for _ in range(self.n + 1)]
        for node in range(1, self.n + 1):
            children[self.heads[node]].append(node)
        self.children_of = tuple(tuple(c) for c in children)
        self.root = self.children_of[0][0] if self.n else 0
        ancestors = [()]
        for node in range(1, self.n + 1):
            path = [node]
            while self.heads[path[-1]] != 0:
                path.append(self.heads[path[-1]])
            ancestors.append(tuple(path))
        self._to_root = tuple(ancestors)
        self.depth = tuple(len(p) - 1 for p in ancestors)

    @classmethod
    def from_sentence(cls, sentence, pos_classes=None):
        graph = cls([t.head for t in sentence.tokens], [t.pos for t in sentence.tokens], pos_classes)
        for note in graph.repaired:
            logger.warning("Repaired syntax: %s", note)
        return graph

    def _repair(self, heads):
        n = self.n
        if n == 0:
            return heads
        roots = [i for i in range(1, n + 1) if heads[i] == 0]
        root = roots[0] if roots else 1
        if not roots:
            self.repaired.append(f"no root; token {root} made root")
            heads[root] = 0
        for extra in roots[1:]:
            self.repaired.append(f"extra root {extra} re-headed to {root}")
            heads[extra] = root
        for node in range(1, n + 1):
            seen = []
            current = node
            while current != 0 and current not in seen:
                seen.append(current)
                current = heads[current]
            if current != 0:
                cycle = seen[seen.index(current):]
                breaker = min(cycle)
                self.repaired.append(f"cycle {cycle} broken at {breaker}")
                heads[breaker] = root
        return heads

    # Basic access

    def head(self, node):
        """Syntactic head, or None for the root."""
        h = self.heads[node]
        return h or None

    def children(self, node):
        return self.children_of[node]

    def pos(self, node):
        return self.pos_tags[node - 1]

    def is_leaf(self, node):
        return not self.children_of[node]

    def path_to_root(self, node):
        return self._to_root[node]

    def family(self, node):
        kids = self.children_of[node]
        left = [c for c in kids if c < node]
        right = [c for c in kids if c > node]
        return {
            'lm': kids[0] if kids else None,
            'rm': kids[-1] if kids else None,
            'ln': left[-1] if left else None,
            'rn': right[0] if right else None,
            'children': list(kids),
            'noFarChildren': list(kids[1:-1]),
        }

    # Paths

    def decompose_paths(self, a, p):
        up_a = self._to_root[a]
        on_p = set(self._to_root[p])
        meet = next(x for x in up_a if x in on_p)
        argu = up_a[:up_a.index(meet) + 1]
        up_p = self._to_root[p]
        pred = up_p[:up_p.index(meet) + 1]
        shared = self._to_root[meet]
        return PathDecomposition(meet, argu, pred, shared, argu + tuple(reversed(pred[:-1])))

    @staticmethod
    def linear_path(a, p):
        step = 1 if a <= p else -1
        return tuple(range(a, p + step, step))

    # Support words and pphead

    def support_word(self, node, pos_class, level):
        matches = [x for x in self._to_root[node][1:]
                   if pos_in_class(self.pos(x), pos_class, self.pos_classes)]
        if not matches:
            return None
        return matches[0] if level == 'low' else matches[-1]

    def pphead(self, node):
        head = self.heads[node]
        if head == 0:
            return node
        if pos_in_class(self.pos(head), 'prep', self.pos_classes):
            siblings = [c for c in self.children_of[head] if c != node]
            return siblings[0] if siblings else head
        return head

    def dp_tree_relation(self, a, p):
        """Relation of a with respect to p, e.g. 'child' when p heads a."""
        d = self.decompose_paths(a, p)
        up, down = len(d.dp_path_argu) - 1, len(d.dp_path_pred) - 1
        if up == 0:
            return {0: 'self', 1: 'parent'}.get(down, 'ancestor')
        if down == 0:
            return 'child' if up == 1 else 'descendant'
        if up == 1 and down == 1:
            return 'sibling'
        if up == 1 and down == 2:
            return 'uncle'
        if up == 2 and down == 1:
            return 'nephew'
        return 'else'
