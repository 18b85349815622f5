"""Exact orbit graphs of rational points, loop enumeration and three-way classification."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .core import (
    REGION_SWITCH,
    REGION_BRANCHPOINT,
    SignDigit,
    branch_map,
    fmt_rational,
    psi_periodic,
    region_of,
    sign_digit,
)
from .errors import CapExceededError, DomainError

UNIQUE_PERIODIC = "unique-periodic"
COUNTABLY_PERIODIC = "countably-periodic"
UNCOUNTABLY_MANY = "uncountably-many"

DEFAULT_NODE_CAP = 10_000
DEFAULT_PATH_CAP = 1_000_000


@dataclass(frozen=True)
class Transition:
    bits: Tuple[int, ...]      # branch bits realizing this edge
    target: Fraction
    label: SignDigit


@dataclass
class OrbitGraph:
    """Finite labeled digraph of the exact random orbit of a rational point."""

    root: Fraction
    c: Fraction
    nodes: Set[Fraction] = field(default_factory=set)
    edges: Dict[Fraction, List[Transition]] = field(default_factory=dict)
    in_switch: Dict[Fraction, bool] = field(default_factory=dict)

    def choice_nodes(self) -> Set[Fraction]:
        return {v for v, ts in self.edges.items() if len(ts) > 1}


@dataclass(frozen=True)
class LoopClass:
    """A first-return word at anchor, identified by its sign-digit label word."""

    anchor: Fraction
    label_word: Tuple[SignDigit, ...]
    representative_bits: Tuple[int, ...]


@dataclass
class Classification:
    kind: str
    x: Fraction
    c: Fraction
    deterministic_cycle: Optional[List[Fraction]] = None
    witness_node: Optional[Fraction] = None
    witness_loops: Optional[Tuple[LoopClass, LoopClass]] = None
    loops_per_node: Optional[Dict[Fraction, LoopClass]] = None


def _is_choice(c: Fraction, x: Fraction) -> bool:
    """True iff the two branch transitions from x carry distinct labels or targets."""
    if x == 1:
        return False
    return region_of(c, x) in (REGION_SWITCH, REGION_BRANCHPOINT)


def _transitions(c: Fraction, x: Fraction) -> List[Transition]:
    sd0 = sign_digit(0, c, x)
    sd1 = sign_digit(1, c, x)
    t0 = branch_map(0, c, x)
    t1 = branch_map(1, c, x)
    if sd0 == sd1 and t0 == t1:
        return [Transition((0, 1), t0, sd0)]
    # ties inside S share the target but keep bit-dependent labels: two edges
    return [Transition((0,), t0, sd0), Transition((1,), t1, sd1)]


def build_orbit_graph(x: Fraction, c: Fraction,
                      node_cap: int = DEFAULT_NODE_CAP) -> OrbitGraph:
    """Breadth-first closure of x under both branch maps in exact arithmetic."""
    if node_cap < 1:
        raise DomainError("node_cap must be >= 1")
    x = Fraction(x)
    if not (c <= x <= 1) or (c == 0 and x == 0):
        raise DomainError(f"x = {x} not a valid starting point for c = {c}")
    g = OrbitGraph(root=x, c=c)
    queue = deque([x])
    g.nodes.add(x)
    while queue:
        v = queue.popleft()
        ts = _transitions(c, v)
        g.edges[v] = ts
        g.in_switch[v] = _is_choice(c, v)
        for t in ts:
            if t.target not in g.nodes:
                if len(g.nodes) >= node_cap:
                    raise CapExceededError(
                        f"orbit closure of {x} exceeded node cap {node_cap}")
                g.nodes.add(t.target)
                queue.append(t.target)
    return g


def deterministic_avoids_switch(x: Fraction, c: Fraction) -> Tuple[bool, Optional[List[Fraction]]]:
    """True iff the orbit of x never meets a choice point; witness is the cycle reached."""
    x = Fraction(x)
    seen: Dict[Fraction, int] = {}
    path: List[Fraction] = []
    cur = x
    while cur not in seen:
        if _is_choice(c, cur):
            return False, None
        seen[cur] = len(path)
        path.append(cur)
        cur = branch_map(0, c, cur)
    return True, path[seen[cur]:]


def enumerate_loop_classes(graph: OrbitGraph, y: Fraction,
                           max_classes: Optional[int] = None,
                           path_cap: int = DEFAULT_PATH_CAP,
                           max_len: Optional[int] = None) -> Dict[Tuple[SignDigit, ...], LoopClass]:
    """All first-return label words at y up to max_len (default node_count*4)."""
    y = Fraction(y)
    if y not in graph.nodes:
        raise DomainError(f"{y} not a node of the graph")
    if max_len is None:
        max_len = 4 * len(graph.nodes)
    classes: Dict[Tuple[SignDigit, ...], LoopClass] = {}
    states_seen = 0

    # DFS over distinct label prefixes; each state maps the nodes reachable by
    # that prefix (without an intermediate return) to representative branch bits,
    # so parallel paths sharing a label word are collapsed into one state
    stack: List[Tuple[Dict[Fraction, Tuple[int, ...]], Tuple[SignDigit, ...]]] = [({y: ()}, ())]
    while stack:
        reach, labels = stack.pop()
        states_seen += 1
        if states_seen > path_cap:
            raise CapExceededError(f"loop enumeration at {y} exceeded path cap {path_cap}")
        if len(labels) >= max_len:
            continue
        by_label: Dict[SignDigit, Dict[Fraction, Tuple[int, ...]]] = {}
        for node, bits in reach.items():
            for t in graph.edges[node]:
                new_bits = bits + (min(t.bits),)
                if t.target == y:
                    word = labels + (t.label,)
                    if word not in classes:
                        classes[word] = LoopClass(y, word, new_bits)
                        if max_classes is not None and len(classes) >= max_classes:
                            return classes
                else:
                    by_label.setdefault(t.label, {}).setdefault(t.target, new_bits)
        for label, targets in by_label.items():
            stack.append((targets, labels + (label,)))
    return classes


def _subset_graph(graph: OrbitGraph, y: Fraction, state_cap: int):
    """Determinized first-return transitions: state -> {label: (returns, next state)}."""
    start = frozenset({y})
    trans: Dict[frozenset, Dict[SignDigit, Tuple[bool, frozenset]]] = {}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        if state in trans:
            continue
        if len(trans) >= state_cap:
            raise CapExceededError(f"subset graph at {y} exceeded state cap {state_cap}")
        by_label: Dict[SignDigit, List] = {}
        for node in state:
            for t in graph.edges[node]:
                entry = by_label.setdefault(t.label, [False, set()])
                if t.target == y:
                    entry[0] = True
                else:
                    entry[1].add(t.target)
        trans[state] = {lab: (ret, frozenset(tgts)) for lab, (ret, tgts) in by_label.items()}
        for _, tgts in trans[state].values():
            if tgts and tgts not in trans:
                queue.append(tgts)
    return start, trans


def _useful_states(trans) -> Set[frozenset]:
    """States from which some first-return word can still be completed."""
    useful: Set[frozenset] = set()
    changed = True
    while changed:
        changed = False
        for state, ts in trans.items():
            if state in useful:
                continue
            if any(ret or (tgts and tgts in useful) for ret, tgts in ts.values()):
                useful.add(state)
                changed = True
    return useful


def _shortest_completions(trans, useful):
    """Shortest first-return word completing from each useful state."""
    best: Dict[frozenset, Tuple[SignDigit, ...]] = {}

    def key(w):
        return (len(w), w)

    for _ in range(len(useful)):
        changed = False
        for state in useful:
            cur = best.get(state)
            for lab, (ret, tgts) in trans[state].items():
                for cand in ([(lab,)] if ret else []) + \
                            ([(lab,) + best[tgts]] if tgts in best else []):
                    if cur is None or key(cand) < key(cur):
                        cur = cand
                        changed = True
            if cur is not None:
                best[state] = cur
        if not changed:
            break
    return best


def _find_useful_cycle(trans, useful, start):
    """A cycle through useful states reachable from start, or None.

    Returns (prefix labels to the cycle head, cycle labels, head state).
    """
    color = {s: 0 for s in useful}
    color[start] = 1
    pos = {start: 0}
    labels: List[SignDigit] = []
    stack = [(start, iter(sorted(trans[start].items())))]
    while stack:
        state, it = stack[-1]
        advanced = False
        for lab, (_, tgts) in it:
            if not tgts or tgts not in useful:
                continue
            if color[tgts] == 1:
                i = pos[tgts]
                return tuple(labels[:i]), tuple(labels[i:] + [lab]), tgts
            if color[tgts] == 0:
                color[tgts] = 1
                labels.append(lab)
                pos[tgts] = len(labels)
                stack.append((tgts, iter(sorted(trans[tgts].items()))))
                advanced = True
                break
        if not advanced:
            color[state] = 2
            stack.pop()
            if stack:
                labels.pop()
    return None


def _dag_words(trans, useful, start, limit):
    """Up to limit distinct first-return words when the useful part is acyclic."""
    out: List[Tuple[SignDigit, ...]] = []

    def rec(state, prefix):
        for lab, (ret, tgts) in sorted(trans[state].items()):
            if len(out) >= limit:
                return
            if ret:
                out.append(prefix + (lab,))
                if len(out) >= limit:
                    return
            if tgts in useful:
                rec(tgts, prefix + (lab,))

    rec(start, ())
    return out


def count_return_words(graph: OrbitGraph, y: Fraction,
                       state_cap: int = DEFAULT_PATH_CAP):
    """(count capped at 2, witness label words) of first-return words at y."""
    start, trans = _subset_graph(graph, Fraction(y), state_cap)
    useful = _useful_states(trans)
    if start not in useful:
        return 0, []
    cycle = _find_useful_cycle(trans, useful, start)
    if cycle is not None:
        prefix, loop, head = cycle
        completion = _shortest_completions(trans, useful)[head]
        return 2, [prefix + completion, prefix + loop + completion]
    words = _dag_words(trans, useful, start, 2)
    return len(words), words


def _bits_for_word(graph: OrbitGraph, y: Fraction,
                   word: Tuple[SignDigit, ...]) -> Tuple[int, ...]:
    """Branch bits of a concrete first-return path at y realizing the label word."""
    failed: Set[Tuple[int, Fraction]] = set()

    def rec(pos, node):
        if (pos, node) in failed:
            return None
        last = pos == len(word) - 1
        for t in graph.edges[node]:
            if t.label != word[pos]:
                continue
            if last:
                if t.target == y:
                    return (min(t.bits),)
            elif t.target != y:
                rest = rec(pos + 1, t.target)
                if rest is not None:
                    return (min(t.bits),) + rest
        failed.add((pos, node))
        return None

    bits = rec(0, Fraction(y))
    assert bits is not None, "label word must be realizable in the graph"
    return bits


def recurrent_nodes(graph: OrbitGraph) -> Set[Fraction]:
    """Nodes that lie on a cycle (reachable from one of their own successors)."""
    out = set()
    for y in graph.nodes:
        frontier = deque(t.target for t in graph.edges[y])
        seen = set()
        while frontier:
            v = frontier.popleft()
            if v == y:
                out.add(y)
                frontier.clear()
                break
            if v in seen:
                continue
            seen.add(v)
            frontier.extend(t.target for t in graph.edges[v])
    return out


def classify(x: Fraction, c: Fraction, node_cap: int = DEFAULT_NODE_CAP) -> Classification:
    """Three-way classification of the expansions of a rational point (independent of p)."""
    x = Fraction(x)
    det, cycle = deterministic_avoids_switch(x, c)
    if det:
        return Classification(UNIQUE_PERIODIC, x, c, deterministic_cycle=cycle)
    graph = build_orbit_graph(x, c, node_cap)
    singles: Dict[Fraction, LoopClass] = {}
    for y in sorted(recurrent_nodes(graph)):
        count, words = count_return_words(graph, y)
        if count >= 2:
            a, b = (LoopClass(y, w, _bits_for_word(graph, y, w)) for w in words[:2])
            return Classification(UNCOUNTABLY_MANY, x, c,
                                  witness_node=y, witness_loops=(a, b))
        if count == 1:
            singles[y] = LoopClass(y, words[0], _bits_for_word(graph, y, words[0]))
    return Classification(COUNTABLY_PERIODIC, x, c, loops_per_node=singles)


def _primitive_root(word: Tuple[SignDigit, ...]) -> Tuple[SignDigit, ...]:
    n = len(word)
    for k in range(1, n + 1):
        if n % k == 0 and word == word[k:] + word[:k]:
            return word[:k]
    return word


def _normalize(pre: Tuple[SignDigit, ...], per: Tuple[SignDigit, ...]):
    """Canonical (preperiod, period): primitive period, maximal absorption of the tail."""
    per = _primitive_root(per)
    while pre and pre[-1] == per[-1]:
        per = (per[-1],) + per[:-1]
        pre = pre[:-1]
    return pre, per


def enumerate_expansions(x: Fraction, c: Fraction, max_count: int, max_period: int,
                         node_cap: int = DEFAULT_NODE_CAP,
                         path_cap: int = DEFAULT_PATH_CAP):
    """Distinct ultimately periodic expansions of x realizable in its orbit graph.

    Returns a list of (preperiod, period) pairs of sign-digit words, each validated
    by exact psi closure back to x.  May return fewer than max_count.
    """
    if max_count < 1 or max_period < 1:
        raise DomainError("bounds must be positive")
    x = Fraction(x)
    graph = build_orbit_graph(x, c, node_cap)
    max_pre = len(graph.nodes) + max_period
    found: Dict[Tuple, Tuple] = {}
    paths_seen = 0

    # breadth-first over preperiod paths so short expansions are found first
    frontier: deque = deque([(x, ())])
    cycle_cache: Dict[Fraction, List[Tuple[SignDigit, ...]]] = {}
    while frontier and len(found) < max_count:
        node, pre = frontier.popleft()
        paths_seen += 1
        if paths_seen > path_cap:
            raise CapExceededError(f"expansion enumeration exceeded path cap {path_cap}")
        if node not in cycle_cache:
            classes = enumerate_loop_classes(graph, node, path_cap=path_cap,
                                             max_len=max_period)
            cycle_cache[node] = sorted(
                (w for w in classes if len(w) <= max_period), key=lambda w: (len(w), w))
        for per in cycle_cache[node]:
            key = _normalize(pre, per)
            if key not in found:
                assert psi_periodic(key[0], key[1]) == x, "psi closure must return x"
                found[key] = key
                if len(found) >= max_count:
                    break
        if len(pre) < max_pre:
            for t in graph.edges[node]:
                frontier.append((t.target, pre + (t.label,)))
    return sorted(found.values(), key=lambda k: (len(k[0]), len(k[1]), k))


def to_dot(graph: OrbitGraph) -> str:
    """DOT text export; edge label '(s,d);bits'."""
    lines = ["digraph orbit {"]
    lines.append(f'  root = "{fmt_rational(graph.root)}";')
    for v in sorted(graph.nodes):
        shape = "doublecircle" if graph.in_switch.get(v) else "circle"
        lines.append(f'  "{fmt_rational(v)}" [shape={shape}];')
    for v in sorted(graph.edges):
        for t in graph.edges[v]:
            bits = "".join(str(b) for b in t.bits)
            lines.append(
                f'  "{fmt_rational(v)}" -> "{fmt_rational(t.target)}" [label="{t.label};{bits}"];')
    lines.append("}")
    return "\n".join(lines)
