"""The 27-vertex digraph of value triples ``(x, y, z)`` for subsequent blocks.

``x`` and ``y`` are two values of one block and ``z`` the division value they
share; the subsequent block gets ``(mex{x,z}, mex{y,z}, z')`` for whatever
``z'`` the next division yields.  Blocks with ``x == y`` have started holding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import NamedTuple, Optional

from .engine import mex


class Triple(NamedTuple):
    x: int
    y: int
    z: int

    def __str__(self) -> str:
        return f"({self.x},{self.y},{self.z})"


PAPER_SINKS = frozenset(
    Triple(*t) for t in [(1, 2, 1), (1, 2, 2), (2, 1, 1), (2, 1, 2), (0, 2, 0), (2, 0, 0)]
)


def successors(v: Triple) -> list[Triple]:
    x, y, z = v
    return [Triple(mex((x, z)), mex((y, z)), z2) for z2 in range(3)]


@dataclass(frozen=True)
class TripleDigraph:
    vertices: tuple[Triple, ...]
    edges: frozenset[tuple[Triple, Triple]]

    def out(self, v: Triple) -> list[Triple]:
        return sorted(w for u, w in self.edges if u == v)

    def adjacency(self) -> dict[Triple, list[Triple]]:
        adj: dict[Triple, list[Triple]] = {v: [] for v in self.vertices}
        for u, w in self.edges:
            adj[u].append(w)
        for v in adj:
            adj[v].sort()
        return adj


def build() -> TripleDigraph:
    verts = tuple(Triple(*t) for t in product(range(3), repeat=3))
    edges = frozenset((v, w) for v in verts for w in successors(v))
    return TripleDigraph(verts, edges)


def _unequal(v: Triple) -> bool:
    return v.x != v.y


def sinks(dg: TripleDigraph) -> frozenset[Triple]:
    """Vertices with ``x != y`` all of whose successors have ``x == y``."""
    adj = dg.adjacency()
    return frozenset(
        v for v in dg.vertices if _unequal(v) and not any(_unequal(w) for w in adj[v])
    )


def layer_check(dg: TripleDigraph) -> bool:
    """No edge among non-sink ``x != y`` vertices climbs from ``z == 0`` to ``z != 0``."""
    sk = sinks(dg)
    live = {v for v in dg.vertices if _unequal(v) and v not in sk}
    return not any(
        u in live and w in live and u.z == 0 and w.z != 0 for u, w in dg.edges
    )


@dataclass(frozen=True)
class EscapeResult:
    ok: bool
    longest_bad_walk: Optional[list[Triple]]
    step_bound: Optional[int]

    def __bool__(self) -> bool:
        return self.ok


def bounded_escape(
    dg: TripleDigraph, L_zero: float, L_nonzero: float
) -> EscapeResult:
    """Do all walks reach ``x == y`` when ``z`` runs are capped?

    Runs of ``z == 0`` are at most ``L_zero`` long and runs of ``z != 0`` at
    most ``L_nonzero``.  The search is over the product of the digraph with a
    run-length counter; it succeeds when that product restricted to ``x != y``
    vertices is acyclic, and every walk then escapes within
    ``(L_zero + L_nonzero + 2) * 27`` steps.  Infinite caps are allowed and
    give the uncapped question.  ``longest_bad_walk`` is the longest walk that
    stays among ``x != y`` vertices, or a cycle witness when one exists.
    """
    if L_zero < 1 or L_nonzero < 1:
        raise ValueError("run-length caps must be >= 1")
    adj = dg.adjacency()
    cap_z = 1 if math.isinf(L_zero) else int(L_zero)
    cap_n = 1 if math.isinf(L_nonzero) else int(L_nonzero)

    def cap(zero: bool) -> int:
        return cap_z if zero else cap_n

    def step(state):
        v, run = state
        for w in adj[v]:
            if not _unequal(w):
                continue
            same = (w.z == 0) == (v.z == 0)
            if same:
                limit = L_zero if v.z == 0 else L_nonzero
                if math.isinf(limit):
                    yield (w, run)
                elif run + 1 <= limit:
                    yield (w, run + 1)
            else:
                yield (w, 1)

    starts = [(v, r) for v in dg.vertices if _unequal(v) for r in range(1, cap(v.z == 0) + 1)]
    # longest path in a DAG by DFS with colouring; a grey hit is a cycle
    WHITE, GREY, BLACK = 0, 1, 2
    colour: dict = {}
    best: dict = {}
    nxt: dict = {}
    for s in starts:
        if colour.get(s, WHITE) != WHITE:
            continue
        stack = [(s, iter(list(step(s))))]
        colour[s] = GREY
        path = [s]
        while stack:
            node, it = stack[-1]
            child = next(it, None)
            if child is None:
                stack.pop()
                path.pop()
                colour[node] = BLACK
                succ = [c for c in step(node)]
                if succ:
                    c = max(succ, key=lambda c: best[c])
                    best[node], nxt[node] = best[c] + 1, c
                else:
                    best[node], nxt[node] = 1, None
                continue
            cc = colour.get(child, WHITE)
            if cc == GREY:
                i = path.index(child)
                cycle = [p[0] for p in path[i:]] + [child[0]]
                return EscapeResult(False, cycle, None)
            if cc == WHITE:
                colour[child] = GREY
                path.append(child)
                stack.append((child, iter(list(step(child)))))
    top = max(starts, key=lambda s: best[s])
    walk = []
    node = top
    while node is not None:
        walk.append(node[0])
        node = nxt[node]
    bound = (cap_z + cap_n + 2) * 27
    return EscapeResult(len(walk) <= bound, walk, bound)


def simple_cycles(dg: TripleDigraph, vertices) -> list[list[Triple]]:
    """All simple directed cycles inside ``vertices`` (canonical start = min vertex)."""
    vs = sorted(set(vertices))
    adj = {v: [w for w in dg.adjacency()[v] if w in set(vs)] for v in vs}
    out = []
    for i, s in enumerate(vs):
        allowed = set(vs[i:])
        stack = [(s, [s])]
        while stack:
            v, path = stack.pop()
            for w in adj[v]:
                if w == s:
                    out.append(path[:])
                elif w in allowed and w not in path:
                    stack.append((w, path + [w]))
    return out


def to_dot(dg: TripleDigraph) -> str:
    sk = sinks(dg)
    lines = ["digraph blocks {"]
    for v in dg.vertices:
        name = f"{v.x}{v.y}{v.z}"
        attrs = []
        if not _unequal(v):
            attrs.append("shape=box")
        if v in sk:
            attrs.append("style=bold")
        lines.append(f'  "{name}"' + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    for u, w in sorted(dg.edges):
        lines.append(f'  "{u.x}{u.y}{u.z}" -> "{w.x}{w.y}{w.z}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def verify_all(d_values=(1, 2, 3)) -> dict:
    """Run every structural check and return a summary."""
    dg = build()
    sk = sinks(dg)
    out_deg = {len(dg.out(v)) for v in dg.vertices}
    report = {
        "vertices": len(dg.vertices),
        "edges": len(dg.edges),
        "uniform_out_degree": out_deg == {3},
        "sinks": sorted(map(str, sk)),
        "sinks_match": sk == PAPER_SINKS,
        "layer_check": layer_check(dg),
        "bounded_escape": {},
        "uncapped_escape": bool(bounded_escape(dg, math.inf, math.inf)),
    }
    for d in d_values:
        report["bounded_escape"][f"{2 * d},{4 * d * d}"] = bool(bounded_escape(dg, 2 * d, 4 * d * d))
    report["ok"] = (
        report["vertices"] == 27
        and report["edges"] == 81
        and report["uniform_out_degree"]
        and report["sinks_match"]
        and report["layer_check"]
        and all(report["bounded_escape"].values())
        and not report["uncapped_escape"]
    )
    return report
