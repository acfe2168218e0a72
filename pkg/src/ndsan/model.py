"""Recursive network model.

A network is one of four immutable node types:

* :class:`Trivial` -- a single activity with a random duration;
* :class:`Acyclic` -- sub-networks substituted for the vertices of a DAG
  that has one source vertex and one sink vertex;
* :class:`Decision` -- ``entry``, then exactly one of several branches
  chosen at random, then ``exit``;
* :class:`Loop` -- ``entry``, a random number of serial executions of
  ``body``, then ``exit``.

Junction, decision and loop nodes of the graph formulation are not stored
as vertices; the composite types carry their meaning directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence, Union

import numpy as np

from .distributions import DurationDistribution
from .errors import CyclicGraphError, MultipleSourcesOrSinksError, ValidationError

PROB_TOL = 1e-9


@dataclass(frozen=True)
class Trivial:
    name: str
    duration: DurationDistribution


@dataclass(frozen=True)
class Acyclic:
    """Sub-networks placed on the vertices of a DAG.

    ``arcs`` holds ``(i, j)`` pairs of indices into ``children``.
    """

    children: tuple
    arcs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "arcs", tuple((int(i), int(j)) for i, j in self.arcs))

    @cached_property
    def successors(self) -> list[list[int]]:
        adj = [[] for _ in self.children]
        for i, j in self.arcs:
            adj[i].append(j)
        return adj

    @cached_property
    def predecessors(self) -> list[list[int]]:
        adj = [[] for _ in self.children]
        for i, j in self.arcs:
            adj[j].append(i)
        return adj

    @cached_property
    def order(self) -> list[int]:
        return topological_order(self.successors)


@dataclass(frozen=True)
class Decision:
    entry: "Ndsan"
    branches: tuple  # of (probability, Ndsan)
    exit: "Ndsan"

    def __post_init__(self):
        object.__setattr__(
            self, "branches", tuple((float(p), net) for p, net in self.branches)
        )

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for p, _ in self.branches)

    @cached_property
    def cumulative(self) -> np.ndarray:
        """Cumulative branch probabilities; the last entry is forced to 1."""
        cum = np.cumsum(self.probabilities)
        cum[-1] = 1.0
        return cum


@dataclass(frozen=True)
class Loop:
    entry: "Ndsan"
    body: "Ndsan"
    exit: "Ndsan"
    continue_probs: tuple = field(default=(0.0,))

    def __post_init__(self):
        object.__setattr__(
            self, "continue_probs", tuple(float(q) for q in self.continue_probs)
        )

    @property
    def beta(self) -> int:
        return len(self.continue_probs)

    @cached_property
    def iteration_weights(self) -> np.ndarray:
        """P(k body executions) for k = 0 .. beta - 1."""
        return loop_weights(self.continue_probs)

    @cached_property
    def cumulative(self) -> np.ndarray:
        cum = np.cumsum(self.iteration_weights)
        cum[-1] = 1.0
        return cum


Ndsan = Union[Trivial, Acyclic, Decision, Loop]


def series(*nets: Ndsan) -> Ndsan:
    """Serial composition; a single argument is returned unchanged."""
    if len(nets) == 1:
        return nets[0]
    return Acyclic(nets, [(i, i + 1) for i in range(len(nets) - 1)])


def loop_weights(continue_probs: Sequence[float]) -> np.ndarray:
    """Iteration-count law of a loop.

    weight[0] = 1 - q1, weight[j] = q1 ... qj (1 - q_{j+1}), and the last
    entry is q1 ... q_{beta-1}.
    """
    q = list(continue_probs)
    out = np.empty(len(q))
    run = 1.0
    for j in range(len(q) - 1):
        out[j] = run * (1.0 - q[j])
        run *= q[j]
    out[-1] = run
    return out


def topological_order(successors: Sequence[Sequence[int]]) -> list[int]:
    """Kahn's algorithm; raises :class:`CyclicGraphError` on a cycle."""
    n = len(successors)
    indeg = [0] * n
    for outs in successors:
        for j in outs:
            indeg[j] += 1
    queue = deque(i for i in range(n) if indeg[i] == 0)
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for j in successors[v]:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue.append(j)
    if len(order) != n:
        raise CyclicGraphError("graph contains a directed cycle")
    return order


def source_and_sink(successors: Sequence[Sequence[int]]) -> tuple[int, int]:
    n = len(successors)
    has_in = [False] * n
    for outs in successors:
        for j in outs:
            has_in[j] = True
    sources = [i for i in range(n) if not has_in[i]]
    sinks = [i for i in range(n) if not successors[i]]
    if len(sources) != 1 or len(sinks) != 1:
        raise MultipleSourcesOrSinksError(
            f"expected one source and one sink, found sources {sources} and sinks {sinks}"
        )
    return sources[0], sinks[0]


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def raise_for_violations(self):
        if not self.ok:
            raise ValidationError(self)


def validate(net, path: str = "root") -> ValidationReport:
    """Check every structural invariant of ``net`` recursively.

    Never raises on a malformed tree; each problem becomes a
    :class:`Violation` whose path locates the offending subtree, e.g.
    ``root.exit.branches[1]``.
    """
    found: list[Violation] = []
    _check(net, path, found)
    return ValidationReport(tuple(found))


def _check(net, path, found):
    add = lambda msg: found.append(Violation(path, msg))  # noqa: E731
    if isinstance(net, Trivial):
        if not isinstance(net.duration, DurationDistribution):
            add(f"activity {net.name!r} has no duration distribution")
        else:
            for msg in net.duration.problems():
                add(f"activity {net.name!r}: {msg}")
    elif isinstance(net, Acyclic):
        _check_acyclic(net, path, add)
        for i, child in enumerate(net.children):
            _check(child, f"{path}.vertices[{i}]", found)
    elif isinstance(net, Decision):
        probs = net.probabilities
        if len(probs) < 2:
            add(f"decision needs at least 2 branches, got {len(probs)}")
        for k, p in enumerate(probs):
            if not 0.0 < p <= 1.0:
                add(f"branch {k} probability {p} outside (0, 1]")
        total = sum(probs)
        if abs(total - 1.0) > PROB_TOL:
            add(f"branch probabilities sum {total:.12g} != 1")
        _check(net.entry, f"{path}.entry", found)
        for k, (_, child) in enumerate(net.branches):
            _check(child, f"{path}.branches[{k}]", found)
        _check(net.exit, f"{path}.exit", found)
    elif isinstance(net, Loop):
        q = net.continue_probs
        if not q:
            add("loop needs at least one continue probability")
        else:
            for k, qk in enumerate(q):
                if not 0.0 <= qk <= 1.0:
                    add(f"loop probability {k} = {qk} outside [0, 1]")
            if q[-1] != 0.0:
                add(f"last loop probability must be 0, got {q[-1]}")
        _check(net.entry, f"{path}.entry", found)
        _check(net.body, f"{path}.body", found)
        _check(net.exit, f"{path}.exit", found)
    else:
        add(f"not a network node: {type(net).__name__}")


def _check_acyclic(net, path, add):
    n = len(net.children)
    if n == 0:
        add("acyclic block has no vertices")
        return
    bad = False
    seen = set()
    for i, j in net.arcs:
        if not (0 <= i < n and 0 <= j < n):
            add(f"arc ({i}, {j}) refers to a vertex outside 0..{n - 1}")
            bad = True
        elif i == j:
            add(f"arc ({i}, {j}) is a self-loop")
            bad = True
        elif (i, j) in seen:
            add(f"arc ({i}, {j}) is repeated")
        seen.add((i, j))
    if bad:
        return
    try:
        topological_order(net.successors)
    except CyclicGraphError:
        add("vertex graph contains a directed cycle")
        return
    try:
        source_and_sink(net.successors)
    except MultipleSourcesOrSinksError as exc:
        add(str(exc))


# -- structure queries --------------------------------------------------------


def iter_activities(net) -> Iterator[Trivial]:
    if isinstance(net, Trivial):
        yield net
    elif isinstance(net, Acyclic):
        for child in net.children:
            yield from iter_activities(child)
    elif isinstance(net, Decision):
        yield from iter_activities(net.entry)
        for _, child in net.branches:
            yield from iter_activities(child)
        yield from iter_activities(net.exit)
    elif isinstance(net, Loop):
        yield from iter_activities(net.entry)
        yield from iter_activities(net.body)
        yield from iter_activities(net.exit)


def activity_count(net) -> int:
    """Number of activity leaves in the tree."""
    return sum(1 for _ in iter_activities(net))


def sp_decomposition(net: Acyclic):
    """Series-parallel decomposition of an acyclic block, or ``None``.

    Each vertex is split into an arc ``in -> out`` and every DAG arc becomes
    a zero-duration arc ``out -> in``; the resulting two-terminal graph is
    reduced by merging parallel arcs and contracting pass-through nodes.
    The returned expression is nested tuples over vertex indices::

        ("leaf", i) | ("series", [expr, ...]) | ("parallel", [expr, ...])

    in which every vertex occurs exactly once.  ``None`` means the graph
    does not reduce, i.e. some parallel branches share vertices.
    """
    n = len(net.children)
    src, snk = source_and_sink(net.successors)
    s_term, t_term = 2 * src, 2 * snk + 1
    edges = {}
    out_e = {v: set() for v in range(2 * n)}
    in_e = {v: set() for v in range(2 * n)}
    counter = 0

    def add(tail, head, expr):
        nonlocal counter
        edges[counter] = (tail, head, expr)
        out_e[tail].add(counter)
        in_e[head].add(counter)
        counter += 1

    def drop(eid):
        tail, head, _ = edges.pop(eid)
        out_e[tail].discard(eid)
        in_e[head].discard(eid)

    for v in range(n):
        add(2 * v, 2 * v + 1, ("leaf", v))
    for i, j in set(net.arcs):
        add(2 * i + 1, 2 * j, None)

    changed = True
    while changed and len(edges) > 1:
        changed = False
        # parallel arcs
        by_ends = {}
        for eid, (tail, head, _) in edges.items():
            by_ends.setdefault((tail, head), []).append(eid)
        for (tail, head), group in by_ends.items():
            if len(group) > 1:
                parts = [edges[e][2] for e in group]
                for e in group:
                    drop(e)
                add(tail, head, _parallel(parts))
                changed = True
        # pass-through nodes
        for v in range(2 * n):
            if v in (s_term, t_term) or len(in_e[v]) != 1 or len(out_e[v]) != 1:
                continue
            (e1,) = in_e[v]
            (e2,) = out_e[v]
            tail, _, x1 = edges[e1]
            _, head, x2 = edges[e2]
            drop(e1)
            drop(e2)
            add(tail, head, _series([x1, x2]))
            changed = True
    if len(edges) != 1:
        return None
    ((tail, head, expr),) = edges.values()
    if (tail, head) != (s_term, t_term):
        return None
    return expr


def _series(parts):
    flat = []
    for p in parts:
        if p is None:
            continue
        flat.extend(p[1] if p[0] == "series" else [p])
    if not flat:
        return None
    return flat[0] if len(flat) == 1 else ("series", flat)


def _parallel(parts):
    # Durations are nonnegative, so max(0, X) = X and zero arcs drop out.
    flat = []
    for p in parts:
        if p is None:
            continue
        flat.extend(p[1] if p[0] == "parallel" else [p])
    if not flat:
        return None
    return flat[0] if len(flat) == 1 else ("parallel", flat)


def is_series_parallel_reducible(net) -> bool:
    """True when every acyclic block reduces to nested series/parallel parts."""
    if isinstance(net, Trivial):
        return True
    if isinstance(net, Acyclic):
        if sp_decomposition(net) is None:
            return False
        return all(is_series_parallel_reducible(c) for c in net.children)
    if isinstance(net, Decision):
        return (
            is_series_parallel_reducible(net.entry)
            and all(is_series_parallel_reducible(c) for _, c in net.branches)
            and is_series_parallel_reducible(net.exit)
        )
    if isinstance(net, Loop):
        return all(
            is_series_parallel_reducible(c) for c in (net.entry, net.body, net.exit)
        )
    raise TypeError(f"not a network node: {type(net).__name__}")
