"""DAGs, CPDAGs, equivalence-class conversion, SHD and graph file I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CyclicInput, DimensionMismatch, ParseError, UnknownNode


def default_labels(p: int) -> list[str]:
    return [f"x{i}" for i in range(p)]


@dataclass
class Dag:
    p: int
    parents: list[set[int]]
    labels: list[str] = field(default=None)

    def __post_init__(self):
        if self.labels is None:
            self.labels = default_labels(self.p)
        for v, ps in enumerate(self.parents):
            if v in ps:
                raise CyclicInput(f"self-loop at node {v}")
        self.topological_order()  # raises CyclicInput on cycles

    @classmethod
    def empty(cls, p: int, labels=None) -> "Dag":
        return cls(p, [set() for _ in range(p)], labels)

    def edges(self) -> set[tuple[int, int]]:
        return {(u, v) for v in range(self.p) for u in self.parents[v]}

    def children(self) -> list[set[int]]:
        ch = [set() for _ in range(self.p)]
        for v in range(self.p):
            for u in self.parents[v]:
                ch[u].add(v)
        return ch

    def topological_order(self) -> list[int]:
        indeg = [len(ps) for ps in self.parents]
        ch = [set() for _ in range(self.p)]
        for v in range(self.p):
            for u in self.parents[v]:
                ch[u].add(v)
        stack = [v for v in range(self.p) if indeg[v] == 0]
        out = []
        while stack:
            u = stack.pop()
            out.append(u)
            for w in ch[u]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    stack.append(w)
        if len(out) != self.p:
            raise CyclicInput("directed graph contains a cycle")
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Dag)
            and self.p == other.p
            and self.parents == other.parents
        )


@dataclass
class Cpdag:
    p: int
    directed: set[tuple[int, int]]
    undirected: set[tuple[int, int]]  # stored with u < v
    labels: list[str] = field(default=None)

    def __post_init__(self):
        if self.labels is None:
            self.labels = default_labels(self.p)
        self.undirected = {(min(u, v), max(u, v)) for u, v in self.undirected}
        for u, v in self.directed:
            if u == v:
                raise CyclicInput(f"self-loop at node {u}")
            if (v, u) in self.directed:
                raise CyclicInput(f"2-cycle between {u} and {v}")
            if (min(u, v), max(u, v)) in self.undirected:
                raise ValueError(f"edge {u},{v} both directed and undirected")

    @classmethod
    def empty(cls, p: int, labels=None) -> "Cpdag":
        return cls(p, set(), set(), labels)

    def n_edges(self) -> int:
        return len(self.directed) + len(self.undirected)

    def __eq__(self, other):
        return (
            isinstance(other, Cpdag)
            and self.p == other.p
            and self.directed == other.directed
            and self.undirected == other.undirected
        )


def _apply_meek(p, directed, undirected):
    """Close a pattern under orientation rules R1-R3, in place."""
    adj = [set() for _ in range(p)]
    pa = [set() for _ in range(p)]
    ch = [set() for _ in range(p)]
    und = [set() for _ in range(p)]
    for u, v in directed:
        adj[u].add(v); adj[v].add(u); pa[v].add(u); ch[u].add(v)
    for u, v in undirected:
        adj[u].add(v); adj[v].add(u); und[u].add(v); und[v].add(u)

    def orient(a, b):
        undirected.discard((min(a, b), max(a, b)))
        und[a].discard(b); und[b].discard(a)
        directed.add((a, b))
        pa[b].add(a); ch[a].add(b)

    changed = True
    while changed:
        changed = False
        for b in range(p):
            for c in sorted(und[b]):
                # R1: a -> b - c with a, c nonadjacent  =>  b -> c
                if any(a not in adj[c] and a != c for a in pa[b]):
                    orient(b, c)
                    changed = True
                    continue
                # R2: b -> d -> c and b - c  =>  b -> c
                if ch[b] & pa[c]:
                    orient(b, c)
                    changed = True
                    continue
                # R3: b - a1, b - a2, a1 -> c, a2 -> c, a1, a2 nonadjacent
                cands = sorted(und[b] & pa[c])
                done = False
                for i in range(len(cands)):
                    for j in range(i + 1, len(cands)):
                        if cands[j] not in adj[cands[i]]:
                            orient(b, c)
                            changed = True
                            done = True
                            break
                    if done:
                        break


def dag_to_cpdag(g: Dag) -> Cpdag:
    """Equivalence class of ``g``: v-structures stay directed, plus the
    orientations they force; every other edge becomes undirected."""
    directed = set()
    undirected = set()
    compelled = set()
    for v in range(g.p):
        ps = sorted(g.parents[v])
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                a, b = ps[i], ps[j]
                if a not in g.parents[b] and b not in g.parents[a]:
                    compelled.add((a, v))
                    compelled.add((b, v))
    for u, v in g.edges():
        if (u, v) in compelled:
            directed.add((u, v))
        else:
            undirected.add((min(u, v), max(u, v)))
    _apply_meek(g.p, directed, undirected)
    return Cpdag(g.p, directed, undirected, list(g.labels))


def consistent_extension(c: Cpdag) -> Dag:
    """A DAG in the class represented by ``c`` (Dor-Tarsi algorithm)."""
    p = c.p
    pa = [set() for _ in range(p)]
    ch = [set() for _ in range(p)]
    und = [set() for _ in range(p)]
    for u, v in c.directed:
        pa[v].add(u); ch[u].add(v)
    for u, v in c.undirected:
        und[u].add(v); und[v].add(u)
    out_parents = [set(pa[v]) for v in range(p)]
    alive = set(range(p))
    while alive:
        for v in sorted(alive):
            if ch[v] & alive:
                continue
            nb = (pa[v] | und[v]) & alive
            # every undirected neighbor of v must be adjacent to all other
            # neighbors of v (Dor-Tarsi condition)
            if all(
                (nb - {w}) <= (pa[w] | ch[w] | und[w])
                for w in und[v] & alive
            ):
                # orient all undirected edges at v into v, then remove v
                for w in und[v] & alive:
                    out_parents[v].add(w)
                for w in list(nb):
                    ch[w].discard(v); und[w].discard(v)
                alive.discard(v)
                break
        else:
            raise CyclicInput("graph admits no consistent DAG extension")
    return Dag(p, out_parents, list(c.labels))


def _pair_status(c: Cpdag, u: int, v: int):
    if (u, v) in c.directed:
        return ">"
    if (v, u) in c.directed:
        return "<"
    if (min(u, v), max(u, v)) in c.undirected:
        return "-"
    return None


def shd_cpdag(a: Cpdag, b: Cpdag) -> int:
    """Number of node pairs whose edge status differs between the graphs."""
    if a.p != b.p:
        raise DimensionMismatch(f"{a.p} vs {b.p} nodes")
    count = 0
    for u in range(a.p):
        for v in range(u + 1, a.p):
            if _pair_status(a, u, v) != _pair_status(b, u, v):
                count += 1
    return count


def write_graph(path, g: Dag | Cpdag) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("nodes: " + ",".join(g.labels) + "\n")
        if isinstance(g, Dag):
            for u, v in sorted(g.edges()):
                fh.write(f"{g.labels[u]} -> {g.labels[v]}\n")
        else:
            for u, v in sorted(g.directed):
                fh.write(f"{g.labels[u]} -> {g.labels[v]}\n")
            for u, v in sorted(g.undirected):
                fh.write(f"{g.labels[u]} -- {g.labels[v]}\n")


def _parse_graph_file(path):
    labels = None
    directed = []
    undirected = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if labels is None:
                if not line.startswith("nodes:"):
                    raise ParseError("expected 'nodes:' header", lineno)
                labels = [s.strip() for s in line[len("nodes:"):].split(",") if s.strip()]
                continue
            if "->" in line:
                lhs, rhs = line.split("->", 1)
                directed.append((lhs.strip(), rhs.strip(), lineno))
            elif "--" in line:
                lhs, rhs = line.split("--", 1)
                undirected.append((lhs.strip(), rhs.strip(), lineno))
            else:
                raise ParseError(f"unrecognized edge line {line!r}", lineno)
    if labels is None:
        raise ParseError("missing 'nodes:' header")
    index = {lab: i for i, lab in enumerate(labels)}

    def resolve(name):
        if name not in index:
            raise UnknownNode(name)
        return index[name]

    directed = [(resolve(a), resolve(b)) for a, b, _ in directed]
    undirected = [(resolve(a), resolve(b)) for a, b, _ in undirected]
    return labels, directed, undirected


def read_graph(path) -> Dag | Cpdag:
    """Read a graph file; a Dag if all edges are directed, else a Cpdag."""
    labels, directed, undirected = _parse_graph_file(path)
    p = len(labels)
    if undirected:
        return Cpdag(p, set(directed), set(undirected), labels)
    parents = [set() for _ in range(p)]
    for u, v in directed:
        parents[v].add(u)
    return Dag(p, parents, labels)


def read_edge_list(path) -> Dag:
    g = read_graph(path)
    if not isinstance(g, Dag):
        raise ParseError("file contains undirected edges; expected a DAG")
    return g


def as_cpdag(g: Dag | Cpdag) -> Cpdag:
    return dag_to_cpdag(g) if isinstance(g, Dag) else g
