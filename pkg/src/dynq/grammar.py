"""Chomsky-normal-form grammars: parsing, normalization, bundled examples."""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

from .errors import ScriptSyntaxError

BUILTIN = ("dyck", "regular", "anbn", "pal", "eqcount")


@dataclass(frozen=True)
class Grammar:
    nonterminals: tuple
    terminals: tuple
    start: str
    binary: tuple  # (X, Y, Z) for X -> Y Z
    unary: tuple  # (X, a) for X -> a

    @property
    def index(self):
        return {x: i for i, x in enumerate(self.nonterminals)}

    def __len__(self):
        return len(self.nonterminals)


def parse_grammar(text: str) -> Grammar:
    binary, unary, order = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise ScriptSyntaxError("expected 'X -> Y Z' or 'X -> a'", lineno, 1)
        head, body = (s.strip() for s in line.split("->", 1))
        if not head or len(head.split()) != 1:
            raise ScriptSyntaxError("bad production head", lineno, 1)
        order.append(head)
        for alt in body.split("|"):
            syms = alt.split()
            if len(syms) == 2:
                binary.append((head, syms[0], syms[1]))
                order.extend(syms)
            elif len(syms) == 1:
                unary.append((head, syms[0]))
            else:
                raise ScriptSyntaxError("production body must have one or two symbols", lineno, 1)
    if not order:
        raise ScriptSyntaxError("empty grammar", 1, 1)
    return normalize(order[0], binary, unary)


def normalize(start, binary, unary) -> Grammar:
    """Drop unproductive and unreachable nonterminals."""
    productive = {x for x, _ in unary}
    grew = True
    while grew:
        grew = False
        for x, y, z in binary:
            if x not in productive and y in productive and z in productive:
                productive.add(x)
                grew = True
    binary = [r for r in binary if all(s in productive for s in r)]
    unary = [r for r in unary if r[0] in productive]
    reach = {start}
    grew = True
    while grew:
        grew = False
        for x, y, z in binary:
            if x in reach:
                for s in (y, z):
                    if s not in reach:
                        reach.add(s)
                        grew = True
    binary = sorted(set(r for r in binary if r[0] in reach))
    unary = sorted(set(r for r in unary if r[0] in reach))
    nts = [start] + sorted((reach & productive) - {start})
    terms = sorted({a for _, a in unary})
    return Grammar(tuple(nts), tuple(terms), start, tuple(binary), tuple(unary))


def load_grammar(spec: str) -> Grammar:
    """Load a grammar from a file path or a bundled name."""
    if spec in BUILTIN and not os.path.exists(spec):
        text = resources.files("dynq.grammars").joinpath(spec + ".cfg").read_text()
    else:
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
    return parse_grammar(text)
