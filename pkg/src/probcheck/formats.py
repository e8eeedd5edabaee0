"""Line-oriented model files.

Every file starts with ``kind: pfa|mdp|mc|poca`` (label and scheduler files
use ``kind: labels`` / ``kind: scheduler``). ``#`` starts a comment,
omitted transition entries are zero, probabilities are exact rationals
(``1/3``, ``0.25``). Example::

    kind: pfa
    states: q1 q2
    alphabet: a b
    init: q1=1
    accept: q2
    matrix a: q1->q1=1/2 q1->q2=1/2 q2->q2=1
    matrix b: q1->q1=1 q2->q2=1

MDPs use ``actions:`` and ``trans <action>:`` lines, chains ``trans:`` lines
(``init:`` optional), both may carry ``label <ap>: s1 s2`` lines. One-counter
automata use ``start:``, ``stack:``, ``bottom:``, ``counter:`` and rules
``rule: q0, eps, Z0 -> q1, Z @ 1`` where the push word is space separated
(``eps`` for the empty word).

:func:`serialize_model` emits a canonical form; parsing it back yields the
same model and serializing again yields the same bytes.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from . import numerics as nx
from .automata import PFA
from .counter import EPS, POCA, CounterRule
from .errors import ParseError
from .markov import MDP, MarkovChain, Scheduler

Model = Union[PFA, MDP, MarkovChain, POCA]

_HEADER = re.compile(r"\s*([A-Za-z_]+)(?:[ \t]+([^\s:]+))?[ \t]*:")
_NAME = re.compile(r"[A-Za-z0-9_.']+\Z")
_ENTRY = re.compile(r"([A-Za-z0-9_.']+)->([A-Za-z0-9_.']+)=(\S+)\Z")
_ASSIGN = re.compile(r"([A-Za-z0-9_.']+)=(\S+)\Z")
_RULE = re.compile(
    r"\s*(?P<src>\S+?)\s*,\s*(?P<sym>\S+?)\s*,\s*(?P<top>\S+?)\s*->\s*"
    r"(?P<dst>\S+?)\s*,\s*(?P<push>[^@]*?)\s*@\s*(?P<prob>\S+)\s*\Z"
)


@dataclass
class _Line:
    number: int
    key: str
    arg: Optional[str]
    body: str
    column: int

    def fail(self, message, column=None):
        raise ParseError(message, self.number, column or self.column)

    def tokens(self) -> List[Tuple[str, int]]:
        out = []
        for m in re.finditer(r"\S+", self.body):
            out.append((m.group(), self.column + m.start()))
        return out

    def names(self) -> List[str]:
        out = []
        for tok, col in self.tokens():
            if not _NAME.match(tok):
                self.fail(f"bad name {tok!r}", col)
            out.append(tok)
        return out


def _lines(text: str) -> List[_Line]:
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        m = _HEADER.match(content)
        if m is None:
            col = len(content) - len(content.lstrip()) + 1
            raise ParseError("expected 'key: ...'", number, col)
        out.append(_Line(number, m.group(1), m.group(2), content[m.end():], m.end() + 1))
    return out


def _prob(text: str, line: _Line, col: int) -> Fraction:
    try:
        value = nx.to_rational(text)
    except ValueError:
        line.fail(f"bad probability {text!r}", col)
    if not nx.ZERO <= value <= nx.ONE:
        line.fail(f"probability {text} outside [0, 1]", col)
    return value


def _entries(line: _Line, states: Sequence[str]) -> List[Tuple[str, str, Fraction]]:
    known = set(states)
    out = []
    for tok, col in line.tokens():
        m = _ENTRY.match(tok)
        if m is None:
            line.fail(f"expected 'src->dst=p', got {tok!r}", col)
        src, dst, p = m.groups()
        for s in (src, dst):
            if s not in known:
                line.fail(f"unknown state {s!r}", col)
        out.append((src, dst, _prob(p, line, col + len(src) + len(dst) + 3)))
    return out


def _assignments(line: _Line, states: Sequence[str]) -> Dict[str, Fraction]:
    out = {}
    for tok, col in line.tokens():
        m = _ASSIGN.match(tok)
        if m is None:
            line.fail(f"expected 'state=p', got {tok!r}", col)
        s, p = m.groups()
        if s not in states:
            line.fail(f"unknown state {s!r}", col)
        if s in out:
            line.fail(f"state {s!r} assigned twice", col)
        out[s] = _prob(p, line, col + len(s) + 1)
    return out


class _Reader:
    def __init__(self, text: str, kind: Optional[str] = None):
        self.lines = _lines(text)
        if not self.lines or self.lines[0].key != "kind":
            raise ParseError("file must start with 'kind: ...'", self.lines[0].number if self.lines else 1, 1)
        self.kind = self.lines[0].body.strip()
        if kind is not None and self.kind != kind:
            raise ParseError(f"expected kind {kind!r}, got {self.kind!r}", self.lines[0].number, self.lines[0].column)
        self.rest = self.lines[1:]

    def single(self, key: str, required: bool = True) -> Optional[_Line]:
        found = [ln for ln in self.rest if ln.key == key]
        if len(found) > 1:
            found[1].fail(f"duplicate '{key}:' line")
        if not found:
            if required:
                raise ParseError(f"missing '{key}:' line", self.lines[-1].number, 1)
            return None
        return found[0]

    def many(self, key: str) -> List[_Line]:
        return [ln for ln in self.rest if ln.key == key]

    def check_keys(self, allowed: Iterable[str]):
        allowed = set(allowed)
        for ln in self.rest:
            if ln.key not in allowed:
                ln.fail(f"unexpected key {ln.key!r} in a {self.kind} file", 1)


def _state_list(reader: _Reader, key="states") -> Tuple[str, ...]:
    line = reader.single(key)
    names = line.names()
    if not names:
        line.fail(f"'{key}:' needs at least one name")
    if len(set(names)) != len(names):
        line.fail(f"duplicate name in '{key}:'")
    return tuple(names)


def _subset(line: Optional[_Line], states: Sequence[str]) -> frozenset:
    if line is None:
        return frozenset()
    out = []
    for tok, col in line.tokens():
        if tok not in states:
            line.fail(f"unknown state {tok!r}", col)
        out.append(tok)
    return frozenset(out)


def _labels(reader: _Reader, states: Sequence[str]) -> Dict[str, frozenset]:
    labels = {}
    for line in reader.many("label"):
        if line.arg is None:
            line.fail("expected 'label <name>: ...'", 1)
        labels[line.arg] = labels.get(line.arg, frozenset()) | _subset(line, states)
    return labels


def _parse_pfa(r: _Reader) -> PFA:
    r.check_keys({"states", "alphabet", "init", "accept", "matrix"})
    states = _state_list(r)
    alphabet = _state_list(r, "alphabet")
    init = _assignments(r.single("init"), states)
    accept = _subset(r.single("accept", required=False), states)
    n = len(states)
    rows = {a: [[nx.ZERO] * n for _ in range(n)] for a in alphabet}
    seen = set()
    for line in r.many("matrix"):
        if line.arg not in rows:
            line.fail(f"matrix for unknown symbol {line.arg!r}", 1)
        for src, dst, p in _entries(line, states):
            if (line.arg, src, dst) in seen:
                line.fail(f"entry {src}->{dst} of matrix {line.arg} given twice")
            seen.add((line.arg, src, dst))
            rows[line.arg][states.index(src)][states.index(dst)] = p
    return PFA(
        states,
        alphabet,
        {a: tuple(map(tuple, m)) for a, m in rows.items()},
        tuple(init.get(q, nx.ZERO) for q in states),
        accept,
    )


def _parse_mdp(r: _Reader) -> MDP:
    r.check_keys({"states", "actions", "init", "trans", "label"})
    states = _state_list(r)
    actions = _state_list(r, "actions")
    init = _assignments(r.single("init"), states)
    n = len(states)
    rows: Dict[Tuple[str, str], List[Fraction]] = {}
    for line in r.many("trans"):
        if line.arg not in actions:
            line.fail(f"transitions for unknown action {line.arg!r}", 1)
        for src, dst, p in _entries(line, states):
            row = rows.setdefault((src, line.arg), [nx.ZERO] * n)
            j = states.index(dst)
            if row[j]:
                line.fail(f"entry {src}->{dst} for action {line.arg} given twice")
            row[j] = p
    return MDP(
        states,
        actions,
        {k: tuple(v) for k, v in rows.items()},
        tuple(init.get(q, nx.ZERO) for q in states),
        _labels(r, states),
    )


def _parse_mc(r: _Reader) -> MarkovChain:
    r.check_keys({"states", "init", "trans", "label"})
    states = _state_list(r)
    init_line = r.single("init", required=False)
    init = None if init_line is None else _assignments(init_line, states)
    trans: Dict[str, List[Tuple[str, Fraction]]] = {s: [] for s in states}
    for line in r.many("trans"):
        if line.arg is not None:
            line.fail("chain transitions take no action name", 1)
        for src, dst, p in _entries(line, states):
            if any(t == dst for t, _ in trans[src]):
                line.fail(f"entry {src}->{dst} given twice")
            trans[src].append((dst, p))
    return MarkovChain(states, {s: tuple(v) for s, v in trans.items()}, _labels(r, states), init)


def _parse_poca(r: _Reader) -> POCA:
    r.check_keys({"states", "alphabet", "stack", "start", "bottom", "counter", "accept", "rule"})
    states = _state_list(r)
    alphabet = _state_list(r, "alphabet")
    stack_line = r.single("stack", required=False)
    stack = tuple(stack_line.names()) if stack_line else ("Z", "Z0")
    start_line = r.single("start")
    start = start_line.names()
    if len(start) != 1:
        start_line.fail("exactly one start state")
    bottom_line = r.single("bottom", required=False)
    bottom = bottom_line.names()[0] if bottom_line else "Z0"
    counter_line = r.single("counter", required=False)
    counter = counter_line.names()[0] if counter_line else "Z"
    accept = _subset(r.single("accept", required=False), states)
    rules = []
    for line in r.many("rule"):
        m = _RULE.match(line.body)
        if m is None:
            line.fail("expected 'src, symbol|eps, top -> dst, push|eps @ p'")
        push = tuple(m.group("push").split())
        if push == ("eps",):
            push = ()
        sym = m.group("sym")
        prob_col = line.column + m.start("prob")
        try:
            prob = nx.to_rational(m.group("prob"))
        except ValueError:
            line.fail(f"bad probability {m.group('prob')!r}", prob_col)
        rules.append(
            CounterRule(m.group("src"), EPS if sym == "eps" else sym, m.group("top"),
                        m.group("dst"), push, prob)
        )
    return POCA(states, alphabet, tuple(rules), start[0], accept, stack, bottom, counter)


_PARSERS = {"pfa": _parse_pfa, "mdp": _parse_mdp, "mc": _parse_mc, "poca": _parse_poca}


def parse_model(text: str, kind: Optional[str] = None) -> Model:
    reader = _Reader(text, kind)
    try:
        parse = _PARSERS[reader.kind]
    except KeyError:
        first = reader.lines[0]
        raise ParseError(f"unknown model kind {reader.kind!r}", first.number, first.column) from None
    return parse(reader)


def load_model(path, kind: Optional[str] = None) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), kind)


def parse_labels(text: str) -> Dict[str, frozenset]:
    """Label file: optional ``kind: labels`` then ``label <ap>: states`` lines.

    State names are not checked here; the checker validates them against
    the model.
    """
    lines = _lines(text)
    if lines and lines[0].key == "kind":
        if lines[0].body.strip() != "labels":
            lines[0].fail("expected 'kind: labels'")
        lines = lines[1:]
    labels = {}
    for line in lines:
        if line.key != "label" or line.arg is None:
            line.fail("expected 'label <name>: ...'", 1)
        labels[line.arg] = labels.get(line.arg, frozenset()) | frozenset(line.names())
    return labels


def parse_scheduler(text: str) -> Scheduler:
    r = _Reader(text, "scheduler")
    r.check_keys({"type", "depth_actions", "default"})
    kind = r.single("type").body.strip()
    depth_line = r.single("depth_actions", required=False)
    depth = tuple(depth_line.names()) if depth_line else ()
    default = {}
    line = r.single("default")
    for tok, col in line.tokens():
        m = _ASSIGN.match(tok)
        if m is None:
            line.fail(f"expected 'state=action', got {tok!r}", col)
        default[m.group(1)] = m.group(2)
    return Scheduler(kind, depth, default)


# ----------------------------------------------------------------------
# serialization


def _fmt(p: Fraction) -> str:
    return str(Fraction(p))


def _join(key: str, items: Iterable[str]) -> str:
    items = list(items)
    return f"{key}: {' '.join(items)}" if items else f"{key}:"


def _ordered(subset: Iterable[str], states: Sequence[str]) -> List[str]:
    subset = set(subset)
    return [s for s in states if s in subset]


def _label_lines(labels: Mapping[str, Iterable], states: Sequence) -> List[str]:
    return [_join(f"label {ap}", _ordered(labels[ap], states)) for ap in sorted(labels)]


def _serialize_pfa(m: PFA) -> List[str]:
    lines = [
        "kind: pfa",
        _join("states", m.states),
        _join("alphabet", m.alphabet),
        _join("init", (f"{q}={_fmt(w)}" for q, w in zip(m.states, m.initial) if w)),
        _join("accept", _ordered(m.accepting, m.states)),
    ]
    for a in m.alphabet:
        lines.append(_join(f"matrix {a}", (
            f"{src}->{dst}={_fmt(w)}"
            for src, row in zip(m.states, m.matrices[a])
            for dst, w in zip(m.states, row) if w
        )))
    return lines


def _serialize_mdp(m: MDP) -> List[str]:
    lines = [
        "kind: mdp",
        _join("states", m.states),
        _join("actions", m.actions),
        _join("init", (f"{q}={_fmt(w)}" for q, w in zip(m.states, m.initial) if w)),
    ]
    for a in m.actions:
        entries = [
            f"{src}->{dst}={_fmt(w)}"
            for src in m.states if (src, a) in m.trans
            for dst, w in zip(m.states, m.trans[(src, a)]) if w
        ]
        if entries:
            lines.append(_join(f"trans {a}", entries))
    return lines + _label_lines(m.labels, m.states)


def _serialize_mc(m: MarkovChain) -> List[str]:
    lines = ["kind: mc", _join("states", m.states)]
    if m.initial is not None:
        lines.append(_join("init", (f"{q}={_fmt(m.initial[q])}" for q in m.states if q in m.initial)))
    for s in m.states:
        succ = dict(m.transitions[s])
        lines.append(_join("trans", (f"{s}->{t}={_fmt(succ[t])}" for t in m.states if t in succ)))
    return lines + _label_lines(m.labels, m.states)


def _serialize_poca(m: POCA) -> List[str]:
    lines = [
        "kind: poca",
        _join("states", m.states),
        _join("alphabet", m.alphabet),
        _join("stack", m.stack_symbols),
        f"start: {m.start_state}",
        f"bottom: {m.start_symbol}",
        f"counter: {m.counter_symbol}",
        _join("accept", _ordered(m.accepting, m.states)),
    ]
    for r in m.rules:
        sym = "eps" if r.symbol is EPS else r.symbol
        push = " ".join(r.push) if r.push else "eps"
        lines.append(f"rule: {r.source}, {sym}, {r.top} -> {r.target}, {push} @ {_fmt(r.prob)}")
    return lines


_SERIALIZERS = [
    (PFA, _serialize_pfa),
    (MDP, _serialize_mdp),
    (MarkovChain, _serialize_mc),
    (POCA, _serialize_poca),
]


def serialize_model(model: Model) -> str:
    for cls, fn in _SERIALIZERS:
        if isinstance(model, cls):
            return "\n".join(fn(model)) + "\n"
    raise TypeError(f"cannot serialize {type(model).__name__}")


def serialize_labels(labels: Mapping[str, Iterable], states: Sequence[str]) -> str:
    return "\n".join(["kind: labels"] + _label_lines(labels, states)) + "\n"


def serialize_scheduler(sch: Scheduler, states: Sequence[str]) -> str:
    lines = [
        "kind: scheduler",
        f"type: {sch.kind}",
        _join("depth_actions", sch.depth_actions),
        _join("default", (f"{s}={sch.default[s]}" for s in states if s in sch.default)),
    ]
    return "\n".join(lines) + "\n"


def serialize_counterexample(pfa: PFA, word: Sequence[str], report) -> str:
    """A PFA file whose leading comments record the word and the report."""
    header = [f"# word: {' '.join(word)}"] + [f"# {line}" for line in report.lines()]
    return "\n".join(header) + "\n" + serialize_model(pfa)


def write_counterexample(out_dir, pfa: PFA, word: Sequence[str], report) -> str:
    """Write ``lemma<id>_<digest>.pfa`` under ``out_dir`` and return its path.

    The name is a digest of the content, so re-running a suite rewrites the
    same files.
    """
    text = serialize_counterexample(pfa, word, report)
    digest = hashlib.sha256(text.encode()).hexdigest()[:12]
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"lemma{report.lemma}_{digest}.pfa")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path
