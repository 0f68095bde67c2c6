"""Random instance builders shared by the test modules."""

import random

from dynq.grammar import normalize

NT = ("S", "A", "B", "C", "D")


def random_grammar(rnd: random.Random, max_nt=5, terminals="ab"):
    """Random CNF grammar whose start symbol is productive."""
    while True:
        k = rnd.randint(1, max_nt)
        nts = NT[:k]
        binary = [(x, rnd.choice(nts), rnd.choice(nts)) for x in nts for _ in range(rnd.randint(0, 3))]
        unary = [(x, a) for x in nts for a in terminals if rnd.random() < 0.4]
        if not unary:
            continue
        g = normalize("S", sorted(set(binary)), sorted(set(unary)))
        if "S" in {x for x, _ in g.unary} | {x for x, _, _ in g.binary}:
            return g


def random_tree_children(rnd: random.Random, n, binary=False):
    """Random rooted tree on 0..n-1 with root 0 as a children map."""
    children = {v: [] for v in range(n)}
    for v in range(1, n):
        while True:
            p = rnd.randrange(v)
            if not binary or len(children[p]) < 2:
                break
        children[p].append(v)
    return children


def random_graph(rnd: random.Random, n, p, directed=False, acyclic=False):
    edges = set()
    for u in range(n):
        for v in range(n):
            if u == v and not directed:
                continue
            if not directed and u > v:
                continue
            if acyclic and u >= v:
                continue
            if rnd.random() < p:
                edges.add((u, v))
    return sorted(edges)
