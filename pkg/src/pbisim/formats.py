"""Line-oriented text formats and their printers.

All formats share the same lexical rules: '#' starts a comment running to
the end of the line, blank lines are ignored, and tokens are separated by
whitespace.  Parsers report 1-based line numbers in every diagnostic.

System format (.pts)::

    states: s0 s1
    actions: a b
    s0 a s1 0.5
    s0 a s0 1/2      # fractions are evaluated in binary floating point

Kripke format (.kripke)::

    states: c0 c1
    marked: c0
    c0 -> c1

Galois format (.galois)::

    abstract: bot top
    leq: bot <= top
    alpha: c0 top

Classification sidecar (.cls): one ``state class-index`` pair per line.
Printing followed by parsing reproduces the same in-memory value.
"""

from __future__ import annotations

import numpy as np

from .core import Classification, DEFAULT_TOL, LabelledPTS, validate_pts
from .errors import ParseError, UnknownNameError
from .galois import FiniteLattice, GaloisSpec, KripkeStructure, Relation


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_prob(token: str, lineno: int) -> float:
    try:
        if "/" in token:
            num, den = token.split("/", 1)
            return float(num) / float(den)
        return float(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad probability {token!r}", lineno) from None


def parse_pts(text: str, tol: float = DEFAULT_TOL) -> tuple[LabelledPTS, tuple[str, ...]]:
    """Parse a system file; returns the system and its state-name table.

    Runs the reactive-system validation after building the matrices, so a
    syntactically fine file with bad row sums is still rejected.
    """
    names: list[str] | None = None
    actions: list[str] | None = None
    triples: list[tuple[int, str, int, float, int]] = []
    index: dict[str, int] = {}
    seen: set[tuple[int, str, int]] = set()

    for lineno, line in _lines(text):
        if line.startswith("states:"):
            if names is not None:
                raise ParseError("duplicate states: line", lineno)
            names = line[len("states:") :].split()
            if not names:
                raise ParseError("states: line declares no states", lineno)
            if len(set(names)) != len(names):
                raise ParseError("duplicate state name", lineno)
            index = {s: i for i, s in enumerate(names)}
        elif line.startswith("actions:"):
            if actions is not None:
                raise ParseError("duplicate actions: line", lineno)
            actions = line[len("actions:") :].split()
            if len(set(actions)) != len(actions):
                raise ParseError("duplicate action label", lineno)
        else:
            parts = line.split()
            if len(parts) != 4:
                raise ParseError(
                    f"expected 'src action dst prob', got {len(parts)} tokens", lineno
                )
            src, act, dst, prob = parts
            if names is None or src not in index:
                raise UnknownNameError(src, lineno)
            if actions is None or act not in actions:
                raise UnknownNameError(act, lineno)
            if dst not in index:
                raise UnknownNameError(dst, lineno)
            key = (index[src], act, index[dst])
            if key in seen:
                raise ParseError(f"duplicate transition {src} {act} {dst}", lineno)
            seen.add(key)
            triples.append((index[src], act, index[dst], _parse_prob(prob, lineno), lineno))

    if names is None:
        raise ParseError("missing states: line", 1)
    if actions is None:
        raise ParseError("missing actions: line", 1)

    n = len(names)
    trans = {a: np.zeros((n, n)) for a in actions}
    for s, a, t, p, _ in triples:
        trans[a][s, t] = p
    pts = LabelledPTS(n, tuple(actions), trans)
    validate_pts(pts, tol)
    return pts, tuple(names)


def print_pts(pts: LabelledPTS, names: tuple[str, ...] | None = None) -> str:
    """Canonical text of a system; floats use shortest round-trip repr."""
    if names is None:
        names = tuple(f"s{i}" for i in range(pts.n))
    out = ["states: " + " ".join(names), "actions: " + " ".join(pts.actions)]
    for s in range(pts.n):
        for a in pts.actions:
            row = pts.trans[a][s]
            for t in range(pts.n):
                if row[t] != 0.0:
                    out.append(f"{names[s]} {a} {names[t]} {float(row[t])!r}")
    return "\n".join(out) + "\n"


def parse_classification(text: str, names: tuple[str, ...]) -> Classification:
    """Parse a state-to-class map against a known state-name table."""
    index = {s: i for i, s in enumerate(names)}
    assign: dict[int, int] = {}
    for lineno, line in _lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'state class-index'", lineno)
        name, cls = parts
        if name not in index:
            raise UnknownNameError(name, lineno)
        if index[name] in assign:
            raise ParseError(f"state {name!r} classified twice", lineno)
        try:
            assign[index[name]] = int(cls)
        except ValueError:
            raise ParseError(f"bad class index {cls!r}", lineno) from None
    missing = [s for s in names if index[s] not in assign]
    if missing:
        raise ParseError(f"state {missing[0]!r} has no class", None)
    values = tuple(assign[i] for i in range(len(names)))
    return Classification(values, max(values) + 1)


def print_classification(c: Classification, names: tuple[str, ...] | None = None) -> str:
    if names is None:
        names = tuple(f"s{i}" for i in range(c.n))
    return "\n".join(f"{names[s]} {c.assign[s]}" for s in range(c.n)) + "\n"


def parse_kripke(text: str) -> tuple[KripkeStructure, tuple[str, ...]]:
    names: list[str] | None = None
    marked: list[int] = []
    edges: set[tuple[int, int]] = set()
    index: dict[str, int] = {}
    for lineno, line in _lines(text):
        if line.startswith("states:"):
            if names is not None:
                raise ParseError("duplicate states: line", lineno)
            names = line[len("states:") :].split()
            if not names:
                raise ParseError("states: line declares no states", lineno)
            if len(set(names)) != len(names):
                raise ParseError("duplicate state name", lineno)
            index = {s: i for i, s in enumerate(names)}
        elif line.startswith("marked:"):
            for tok in line[len("marked:") :].split():
                if tok not in index:
                    raise UnknownNameError(tok, lineno)
                marked.append(index[tok])
        else:
            parts = line.split()
            if len(parts) != 3 or parts[1] != "->":
                raise ParseError("expected 'src -> dst'", lineno)
            src, _, dst = parts
            if src not in index:
                raise UnknownNameError(src, lineno)
            if dst not in index:
                raise UnknownNameError(dst, lineno)
            edges.add((index[src], index[dst]))
    if names is None:
        raise ParseError("missing states: line", 1)
    return KripkeStructure(len(names), frozenset(edges), frozenset(marked)), tuple(names)


def print_kripke(k: KripkeStructure, names: tuple[str, ...] | None = None) -> str:
    if names is None:
        names = tuple(f"c{i}" for i in range(k.n))
    out = ["states: " + " ".join(names)]
    if k.marked:
        out.append("marked: " + " ".join(names[s] for s in sorted(k.marked)))
    for a, b in sorted(k.edges):
        out.append(f"{names[a]} -> {names[b]}")
    return "\n".join(out) + "\n"


def parse_relation(
    text: str, c_names: tuple[str, ...], a_names: tuple[str, ...]
) -> Relation:
    c_index = {s: i for i, s in enumerate(c_names)}
    a_index = {s: i for i, s in enumerate(a_names)}
    pairs: set[tuple[int, int]] = set()
    for lineno, line in _lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'concrete abstract'", lineno)
        c, a = parts
        if c not in c_index:
            raise UnknownNameError(c, lineno)
        if a not in a_index:
            raise UnknownNameError(a, lineno)
        pairs.add((c_index[c], a_index[a]))
    return Relation(frozenset(pairs))


def parse_galois(text: str) -> tuple[GaloisSpec, tuple[str, ...], tuple[str, ...]]:
    """Parse an abstraction spec.

    The ``leq:`` lines list generating inequalities; the reflexive and
    transitive closure is taken before the lattice axioms are checked.
    Concrete states are introduced by ``alpha:`` lines in order of first
    appearance.
    """
    abstract: list[str] | None = None
    a_index: dict[str, int] = {}
    leq_pairs: list[tuple[int, int]] = []
    concrete: list[str] = []
    c_index: dict[str, int] = {}
    alpha: dict[int, int] = {}

    for lineno, line in _lines(text):
        if line.startswith("abstract:"):
            if abstract is not None:
                raise ParseError("duplicate abstract: line", lineno)
            abstract = line[len("abstract:") :].split()
            if not abstract:
                raise ParseError("abstract: line declares no elements", lineno)
            if len(set(abstract)) != len(abstract):
                raise ParseError("duplicate abstract element", lineno)
            a_index = {s: i for i, s in enumerate(abstract)}
        elif line.startswith("leq:"):
            parts = line[len("leq:") :].split()
            if len(parts) != 3 or parts[1] != "<=":
                raise ParseError("expected 'leq: x <= y'", lineno)
            x, _, y = parts
            if x not in a_index:
                raise UnknownNameError(x, lineno)
            if y not in a_index:
                raise UnknownNameError(y, lineno)
            leq_pairs.append((a_index[x], a_index[y]))
        elif line.startswith("alpha:"):
            parts = line[len("alpha:") :].split()
            if len(parts) != 2:
                raise ParseError("expected 'alpha: state element'", lineno)
            state, elem = parts
            if elem not in a_index:
                raise UnknownNameError(elem, lineno)
            if state in c_index:
                raise ParseError(f"alpha for {state!r} given twice", lineno)
            c_index[state] = len(concrete)
            concrete.append(state)
            alpha[c_index[state]] = a_index[elem]
        else:
            raise ParseError(f"unrecognised line {line!r}", lineno)

    if abstract is None:
        raise ParseError("missing abstract: line", 1)
    if not concrete:
        raise ParseError("no alpha: lines", 1)
    lattice = FiniteLattice(len(abstract), leq_pairs)
    spec = GaloisSpec(len(concrete), lattice, tuple(alpha[i] for i in range(len(concrete))))
    return spec, tuple(concrete), tuple(abstract)
