"""Line-based scene files and the built-in presets.

Grammar (``#`` starts a comment, tokens are whitespace separated)::

    group <i> <spec>                      spec like Z/3, Z, Z/2+Z
    vertex <id> [factor=<i>]
    edge <id> <src> <dst> length=<decimal>
    basepoint <vertex>
    tree <edge> ...                       optional spanning tree
    metric <name> <edge>=<decimal> ...    extra metrics ("default" comes from edge lengths)
    tangent <name> <edge>=<decimal> ...
    path <name> = <metric>, <metric>, ...
    marking <name> gen <j> = <path expr>
    marking <name> factor <i> = <path expr>
    marking <name> metric <metric>
    marking <name> inverse edge <edge> = <word>
    marking <name> inverse factor <i> = <word>
    selfmap <name> edge <edge> = <path expr>
    selfmap <name> vertex <v> = <w>
    selfmap <name> factor <i> = <j>
    preset <name> {
      ...nested scene...
    }

A path expr is a comma list of edge ids (``~`` reverses) with optional
markers ``[g<i>]``, ``[g<i>^<k>]`` sitting at the current vertex.  A word is
a whitespace list of ``x<j>``, ``x<j>^-1``, ``g<i>``, ``g<i>^<k>`` (``1`` for
the empty word).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .freeprod import MarkedGraph, Marking, derive_inverse, identity_marking, validate_marking
from .graph import GraphOfGroups, Path, validate_graph, validate_tangent
from .groups import AbelianGroup, GroupSpec

NUMBER = re.compile(r"^-?\d+(\.\d{1,12})?$")
NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


class SceneError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f"line {line}" + (f", column {column}" if column else "") + ": " if line else ""
        super().__init__(where + message)


@dataclass
class Scene:
    groups: GroupSpec = field(default_factory=GroupSpec)
    graph: GraphOfGroups | None = None
    metrics: dict = field(default_factory=dict)
    tangents: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)
    markings: dict = field(default_factory=dict)
    selfmaps: dict = field(default_factory=dict)
    presets: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return self.graph.r if self.graph else 0

    @property
    def n(self) -> int:
        return self.graph.n if self.graph else 0

    def resolve(self, name: str) -> tuple["Scene", str]:
        """Follow ``preset.preset.item`` qualifiers."""
        scene = self
        parts = name.split(".")
        for p in parts[:-1]:
            if p not in scene.presets:
                raise SceneError(f"unknown preset {p!r} in {name!r}")
            scene = scene.presets[p]
        return scene, parts[-1]

    def _get(self, kind: str, name: str):
        scene, key = self.resolve(name)
        table = getattr(scene, kind)
        if key not in table:
            raise SceneError(f"unknown {kind[:-1]} {name!r}")
        return table[key]

    def marked(self, name: str) -> MarkedGraph:
        return self._get("markings", name)

    def metric(self, name: str = "default") -> tuple:
        return self._get("metrics", name)

    def tangent(self, name: str) -> tuple:
        return self._get("tangents", name)

    def path(self, name: str):
        return self._get("paths", name)

    def selfmap(self, name: str):
        return self._get("selfmaps", name)

    def scene(self, name: str | None) -> "Scene":
        if not name:
            return self
        scene = self
        for p in name.split("."):
            if p not in scene.presets:
                raise SceneError(f"unknown preset {p!r}")
            scene = scene.presets[p]
        return scene

    def graphs(self, prefix: str = ""):
        """All (qualified name, scene) pairs that carry a graph."""
        if self.graph is not None:
            yield prefix or "main", self
        for k, sub in self.presets.items():
            yield from sub.graphs(f"{prefix}.{k}" if prefix else k)


def _tokens(line: str):
    for m in re.finditer(r"\S+", line):
        yield m.group(0), m.start() + 1


def _number(tok: str, lineno: int, col: int) -> float:
    if not NUMBER.match(tok):
        raise SceneError(f"bad number {tok!r} (decimal with at most 12 fractional digits)", lineno, col)
    return float(tok)


def _strip(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


class _Builder:
    def __init__(self):
        self.groups: dict[int, tuple[str, int]] = {}
        self.vertices: list[tuple[str, int, int]] = []
        self.edges: list[tuple[str, str, str, float, int]] = []
        self.basepoint: tuple[str, int] | None = None
        self.tree: tuple[list[str], int] | None = None
        self.metrics: dict[str, tuple[dict, int]] = {}
        self.tangents: dict[str, tuple[dict, int]] = {}
        self.paths: dict[str, tuple[list[str], int]] = {}
        self.markings: dict[str, dict] = {}
        self.selfmaps: dict[str, dict] = {}
        self.presets: dict[str, Scene] = {}


def parse_scene(text: str) -> Scene:
    lines = text.splitlines()
    if not any(_strip(x).strip() for x in lines):
        raise SceneError("empty scene", 1, 1)
    scene, pos = _parse_block(lines, 0, top=True)
    return scene


def _parse_block(lines: list[str], start: int, top: bool) -> tuple[Scene, int]:
    b = _Builder()
    k = start
    while k < len(lines):
        lineno = k + 1
        raw = _strip(lines[k])
        toks = list(_tokens(raw))
        k += 1
        if not toks:
            continue
        head, col = toks[0]
        words = [t for t, _ in toks]
        if head == "}":
            if top:
                raise SceneError("unbalanced '}'", lineno, col)
            return _finish(b), k
        if head == "preset":
            if len(words) != 3 or words[2] != "{" or not NAME.match(words[1]):
                raise SceneError("expected: preset <name> {", lineno, col)
            if words[1] in b.presets:
                raise SceneError(f"duplicate preset {words[1]!r}", lineno, toks[1][1])
            try:
                sub, k = _parse_block(lines, k, top=False)
            except SceneError:
                raise
            b.presets[words[1]] = sub
            continue
        handler = _HANDLERS.get(head)
        if handler is None:
            raise SceneError(f"unknown key {head!r}", lineno, col)
        handler(b, toks, lineno, raw)
    if not top:
        raise SceneError("missing '}' at end of preset", len(lines), 1)
    return _finish(b), k


def _need(toks, n, lineno, usage):
    if len(toks) < n:
        raise SceneError(f"expected: {usage}", lineno, toks[-1][1] if toks else 1)


def _h_group(b, toks, lineno, raw):
    _need(toks, 3, lineno, "group <i> <spec>")
    if len(toks) != 3:
        raise SceneError("expected: group <i> <spec>", lineno, toks[3][1])
    i, col = toks[1]
    if not i.isdigit() or int(i) < 1:
        raise SceneError(f"bad factor index {i!r}", lineno, col)
    try:
        AbelianGroup.parse(toks[2][0])
    except ValueError as exc:
        raise SceneError(str(exc), lineno, toks[2][1]) from None
    if int(i) in b.groups:
        raise SceneError(f"group {i} declared twice", lineno, col)
    b.groups[int(i)] = (toks[2][0], lineno)


def _h_vertex(b, toks, lineno, raw):
    _need(toks, 2, lineno, "vertex <id> [factor=<i>]")
    name, col = toks[1]
    if not NAME.match(name):
        raise SceneError(f"bad vertex id {name!r}", lineno, col)
    factor = 0
    for t, c in toks[2:]:
        m = re.match(r"^factor=(\d+)$", t)
        if not m or int(m.group(1)) < 1:
            raise SceneError(f"unexpected {t!r}", lineno, c)
        factor = int(m.group(1))
    if any(v == name for v, _, _ in b.vertices):
        raise SceneError(f"duplicate vertex {name!r}", lineno, col)
    b.vertices.append((name, factor, lineno))


def _h_edge(b, toks, lineno, raw):
    if len(toks) != 5:
        raise SceneError("expected: edge <id> <src> <dst> length=<decimal>", lineno, toks[0][1])
    name, col = toks[1]
    if not NAME.match(name):
        raise SceneError(f"bad edge id {name!r}", lineno, col)
    if any(e == name for e, *_ in b.edges):
        raise SceneError(f"duplicate edge {name!r}", lineno, col)
    t, c = toks[4]
    if not t.startswith("length="):
        raise SceneError("expected length=<decimal>", lineno, c)
    length = _number(t[len("length="):], lineno, c + 7)
    b.edges.append((name, toks[2][0], toks[3][0], length, lineno))


def _h_basepoint(b, toks, lineno, raw):
    if len(toks) != 2:
        raise SceneError("expected: basepoint <vertex>", lineno, toks[0][1])
    b.basepoint = (toks[1][0], lineno)


def _h_tree(b, toks, lineno, raw):
    b.tree = ([t for t, _ in toks[1:]], lineno)


def _assignments(toks, lineno):
    out = {}
    for t, c in toks:
        if "=" not in t:
            raise SceneError(f"expected <edge>=<decimal>, got {t!r}", lineno, c)
        e, v = t.split("=", 1)
        if e in out:
            raise SceneError(f"edge {e!r} assigned twice", lineno, c)
        out[e] = (_number(v, lineno, c + len(e) + 1), c)
    return out


def _h_metric(b, toks, lineno, raw):
    _need(toks, 3, lineno, "metric <name> <edge>=<decimal> ...")
    name = toks[1][0]
    if name in b.metrics or name == "default":
        raise SceneError(f"metric {name!r} declared twice", lineno, toks[1][1])
    b.metrics[name] = (_assignments(toks[2:], lineno), lineno)


def _h_tangent(b, toks, lineno, raw):
    _need(toks, 3, lineno, "tangent <name> <edge>=<decimal> ...")
    name = toks[1][0]
    if name in b.tangents:
        raise SceneError(f"tangent {name!r} declared twice", lineno, toks[1][1])
    b.tangents[name] = (_assignments(toks[2:], lineno), lineno)


def _rest_after_equals(raw: str, lineno: int) -> str:
    if "=" not in raw:
        raise SceneError("expected '='", lineno, len(raw.rstrip()) + 1)
    return raw.split("=", 1)[1].strip()


def _h_path(b, toks, lineno, raw):
    if len(toks) < 3 or toks[2][0] != "=":
        raise SceneError("expected: path <name> = <metric>, <metric>, ...", lineno, toks[0][1])
    names = [x.strip() for x in _rest_after_equals(raw, lineno).split(",") if x.strip()]
    b.paths[toks[1][0]] = (names, lineno)


def _h_marking(b, toks, lineno, raw):
    _need(toks, 3, lineno, "marking <name> <gen|factor|metric|inverse> ...")
    name, kind = toks[1][0], toks[2][0]
    entry = b.markings.setdefault(name, {"gens": {}, "factors": {}, "metric": None,
                                         "inv_edge": {}, "inv_factor": {}, "line": lineno})
    if kind in ("gen", "factor"):
        if len(toks) < 5 or toks[4][0] != "=" or not toks[3][0].isdigit():
            raise SceneError(f"expected: marking <name> {kind} <index> = <path expr>", lineno, toks[2][1])
        entry[kind + "s"][int(toks[3][0])] = (_rest_after_equals(raw, lineno), lineno)
    elif kind == "metric":
        if len(toks) != 4:
            raise SceneError("expected: marking <name> metric <metric>", lineno, toks[2][1])
        entry["metric"] = (toks[3][0], lineno)
    elif kind == "inverse":
        if len(toks) < 6 or toks[3][0] not in ("edge", "factor") or toks[5][0] != "=":
            raise SceneError("expected: marking <name> inverse <edge|factor> <id> = <word>", lineno, toks[2][1])
        key = "inv_edge" if toks[3][0] == "edge" else "inv_factor"
        entry[key][toks[4][0]] = (_rest_after_equals(raw, lineno), lineno)
    else:
        raise SceneError(f"unknown marking clause {kind!r}", lineno, toks[2][1])


def _h_selfmap(b, toks, lineno, raw):
    if len(toks) < 5 or toks[4][0] != "=" or toks[2][0] not in ("edge", "vertex", "factor"):
        raise SceneError("expected: selfmap <name> <edge|vertex|factor> <id> = ...", lineno, toks[0][1])
    entry = b.selfmaps.setdefault(toks[1][0], {"edge": {}, "vertex": {}, "factor": {}, "line": lineno})
    entry[toks[2][0]][toks[3][0]] = (_rest_after_equals(raw, lineno), lineno)


_HANDLERS = {
    "group": _h_group,
    "vertex": _h_vertex,
    "edge": _h_edge,
    "basepoint": _h_basepoint,
    "tree": _h_tree,
    "metric": _h_metric,
    "tangent": _h_tangent,
    "path": _h_path,
    "marking": _h_marking,
    "selfmap": _h_selfmap,
}

_MARKER = re.compile(r"^\[(?:g(\d+)(?:\^(-?\d+))?)\]$")
_LETTER = re.compile(r"^(x|g)(\d+)(?:\^(-?\d+))?$")


def parse_path_expr(text: str, graph: GraphOfGroups, groups: GroupSpec, lineno: int,
                    start: int | None = None) -> Path:
    """Comma list of edges (``~`` reverses) with ``[g<i>^k]`` markers at the current vertex."""
    items = [x.strip() for x in text.split(",") if x.strip()]
    edges: list[int] = []
    markers: list = [None]
    vertex = start
    for it in items:
        m = _MARKER.match(it)
        if m:
            i = int(m.group(1))
            k = int(m.group(2)) if m.group(2) else 1
            if vertex is None:
                raise SceneError("marker before the path has a start vertex", lineno)
            if graph.factors[vertex] != i:
                raise SceneError(f"marker g{i} placed at vertex {graph.vertices[vertex]}, which does not carry G_{i}",
                                 lineno)
            if i not in groups:
                raise SceneError(f"no group declared for factor {i}", lineno)
            g = groups[i]
            x = g.power(g.generator, k)
            cur = markers[-1]
            x = x if cur is None else g.mul(cur, x)
            markers[-1] = x if any(x) else None
            continue
        name, back = (it[:-1], True) if it.endswith("~") else (it, False)
        if name not in graph.edges:
            raise SceneError(f"dangling reference to edge {name!r}", lineno)
        d = 2 * graph.edge_index(name) + (1 if back else 0)
        if vertex is None:
            vertex = graph.source(d)
        elif graph.source(d) != vertex:
            raise SceneError(f"path is not connected at {it!r}", lineno)
        edges.append(d)
        markers.append(None)
        vertex = graph.target(d)
    if start is None and not edges:
        start = graph.basepoint
    return Path(start if start is not None else graph.source(edges[0]), tuple(edges), tuple(markers))


def parse_word(text: str, groups: GroupSpec, lineno: int) -> tuple:
    text = text.strip()
    if text in ("", "1"):
        return ()
    out = []
    for tok in text.replace(",", " ").split():
        m = _LETTER.match(tok)
        if not m:
            raise SceneError(f"bad letter {tok!r}", lineno)
        kind, idx = m.group(1), int(m.group(2))
        k = int(m.group(3)) if m.group(3) else 1
        if kind == "x":
            if k not in (1, -1):
                raise SceneError("free letters take exponent 1 or -1", lineno)
            out.append((0, idx * k))
        else:
            if idx not in groups:
                raise SceneError(f"no group declared for factor {idx}", lineno)
            g = groups[idx]
            x = g.power(g.generator, k)
            if any(x):
                out.append((idx, x))
    return tuple(out)


def _vector(assign: dict, graph: GraphOfGroups, lineno: int, what: str) -> tuple:
    vals = [0.0] * graph.n_orbits
    for e, (v, col) in assign.items():
        if e not in graph.edges:
            raise SceneError(f"dangling reference to edge {e!r} in {what}", lineno, col)
        vals[graph.edge_index(e)] = v
    return tuple(vals)


def _finish(b: _Builder) -> Scene:
    scene = Scene(presets=b.presets)
    scene.groups = GroupSpec({i: AbelianGroup.parse(s) for i, (s, _) in b.groups.items()})
    if not b.vertices:
        if b.edges or b.metrics or b.tangents or b.markings or b.selfmaps or b.paths:
            raise SceneError("scene has no vertices", 1)
        if not b.presets:
            raise SceneError("scene declares neither a graph nor presets", 1)
        return scene
    names = {v for v, _, _ in b.vertices}
    for e, s, t, _, lineno in b.edges:
        for v in (s, t):
            if v not in names:
                raise SceneError(f"dangling reference: edge {e} endpoint {v!r} is not a vertex", lineno)
    if b.basepoint and b.basepoint[0] not in names:
        raise SceneError(f"dangling reference: basepoint {b.basepoint[0]!r}", b.basepoint[1])
    if b.tree:
        for e in b.tree[0]:
            if e not in {x[0] for x in b.edges}:
                raise SceneError(f"dangling reference to tree edge {e!r}", b.tree[1])
    for v, f, lineno in b.vertices:
        if f and f not in b.groups:
            raise SceneError(f"vertex {v} carries factor {f} but no group {f} is declared", lineno)
    graph = GraphOfGroups.build([(v, f) for v, f, _ in b.vertices], [(e, s, t) for e, s, t, _, _ in b.edges],
                                basepoint=b.basepoint[0] if b.basepoint else None,
                                tree=b.tree[0] if b.tree else None)
    scene.graph = graph
    if sorted(b.groups) != list(range(1, graph.r + 1)):
        raise SceneError(f"groups declared for factors {sorted(b.groups)}, graph has factors 1..{graph.r}", 1)
    default = tuple(length for *_, length, _ in b.edges)
    problems = validate_graph(graph, default)
    if problems:
        raise SceneError("invalid graph/metric: " + "; ".join(problems), b.edges[0][4] if b.edges else 1)
    scene.metrics["default"] = default
    for name, (assign, lineno) in b.metrics.items():
        vec = _vector(assign, graph, lineno, f"metric {name}")
        problems = validate_graph(graph, vec)
        if problems:
            raise SceneError(f"metric {name}: " + "; ".join(problems), lineno)
        scene.metrics[name] = vec
    for name, (assign, lineno) in b.tangents.items():
        vec = _vector(assign, graph, lineno, f"tangent {name}")
        problems = validate_tangent(graph, vec)
        if problems:
            raise SceneError(f"tangent {name}: " + "; ".join(problems), lineno)
        scene.tangents[name] = vec
    from .geodesy import PLPath

    for name, (mnames, lineno) in b.paths.items():
        pts = []
        for mn in mnames:
            if mn not in scene.metrics:
                raise SceneError(f"dangling reference to metric {mn!r} in path {name}", lineno)
            pts.append(scene.metrics[mn])
        try:
            scene.paths[name] = PLPath(graph, scene.groups, tuple(pts))
        except ValueError as exc:
            raise SceneError(f"path {name}: {exc}", lineno) from None
    scene.markings["std"] = MarkedGraph(graph, default, scene.groups, identity_marking(graph))
    for name, entry in b.markings.items():
        scene.markings[name] = _build_marking(scene, name, entry)
    for name, entry in b.selfmaps.items():
        scene.selfmaps[name] = _build_selfmap(scene, name, entry)
    return scene


def _build_marking(scene: Scene, name: str, entry: dict) -> MarkedGraph:
    g, groups = scene.graph, scene.groups
    lineno = entry["line"]
    metric = scene.metrics["default"]
    if entry["metric"]:
        mname, ml = entry["metric"]
        if mname not in scene.metrics:
            raise SceneError(f"dangling reference to metric {mname!r}", ml)
        metric = scene.metrics[mname]
    std = identity_marking(g)
    if entry["gens"] or entry["factors"]:
        gens = []
        for j in range(1, g.n + 1):
            if j not in entry["gens"]:
                raise SceneError(f"marking {name} has no image for generator {j}", lineno)
            text, ln = entry["gens"][j]
            p = parse_path_expr(text, g, groups, ln, start=g.basepoint)
            if p.end(g) != g.basepoint:
                raise SceneError(f"generator {j} image is not a loop at the basepoint", ln)
            gens.append(p)
        factors = []
        for i in range(1, g.r + 1):
            if i not in entry["factors"]:
                raise SceneError(f"marking {name} has no path for factor {i}", lineno)
            text, ln = entry["factors"][i]
            factors.append(parse_path_expr(text, g, groups, ln, start=g.basepoint))
        extra = set(entry["gens"]) - set(range(1, g.n + 1)) | set(entry["factors"]) - set(range(1, g.r + 1))
        if extra:
            raise SceneError(f"marking {name} refers to unknown indices {sorted(extra)}", lineno)
    else:
        gens, factors = list(std.gens), list(std.factors)
    edge_words: list = [None] * g.n_orbits
    for e, (text, ln) in entry["inv_edge"].items():
        if e not in g.edges:
            raise SceneError(f"dangling reference to edge {e!r}", ln)
        edge_words[g.edge_index(e)] = parse_word(text, groups, ln)
    vertex_conj: list = [None] * g.n_vertices
    for i, (text, ln) in entry["inv_factor"].items():
        if not i.isdigit() or int(i) > g.r:
            raise SceneError(f"unknown factor {i!r}", ln)
        # the factor's image vertex is the end of its path
        v = factors[int(i) - 1].end(g)
        w = parse_word(text, groups, ln)
        vertex_conj[v] = (int(i), w)
    try:
        marking = derive_inverse(g, groups, gens, factors, edge_words, vertex_conj)
    except ValueError as exc:
        raise SceneError(f"marking {name}: {exc}", lineno) from None
    marked = MarkedGraph(g, metric, groups, marking)
    problems = validate_marking(marked)
    if problems:
        raise SceneError(f"marking {name} fails validation: " + "; ".join(problems[:3]), lineno)
    return marked


def _build_selfmap(scene: Scene, name: str, entry: dict):
    from .spectral import GraphSelfMap

    g, groups = scene.graph, scene.groups
    lineno = entry["line"]
    images = []
    for e in g.edges:
        if e not in entry["edge"]:
            raise SceneError(f"selfmap {name} has no image for edge {e}", lineno)
        text, ln = entry["edge"][e]
        images.append(parse_path_expr(text, g, groups, ln))
    for e, (_, ln) in entry["edge"].items():
        if e not in g.edges:
            raise SceneError(f"dangling reference to edge {e!r}", ln)
    vmap = list(range(g.n_vertices))
    for v, (text, ln) in entry["vertex"].items():
        if v not in g.vertices or text not in g.vertices:
            raise SceneError(f"dangling reference in vertex map {v} = {text}", ln)
        vmap[g.vertex_index(v)] = g.vertex_index(text)
    if not entry["vertex"]:
        for e, img in enumerate(images):
            u, w = g.ends[e]
            vmap[u], vmap[w] = img.start, img.end(g)
    perm = list(range(1, g.r + 1))
    for i, (text, ln) in entry["factor"].items():
        if not i.isdigit() or not text.isdigit():
            raise SceneError("factor map entries are integers", ln)
        perm[int(i) - 1] = int(text)
    fmap = GraphSelfMap(g, groups, tuple(vmap), tuple(images), tuple(perm))
    problems = fmap.problems()
    if problems:
        raise SceneError(f"selfmap {name}: " + "; ".join(problems), lineno)
    return fmap


# -- built-in presets ---------------------------------------------------------------

def _fmt(x: float) -> str:
    s = f"{x:.12f}".rstrip("0").rstrip(".")
    return s if s else "0"


def example1_text(epsilon: float = 0.1, group: str = "Z/3") -> str:
    e = _fmt(epsilon)
    rest = _fmt(1.0 - float(e))
    return f"""# one non-free vertex with a loop (T) versus a free vertex with a short loop (S)
preset T {{
  group 1 {group}
  vertex v1 factor=1
  edge a v1 v1 length=1
}}
preset S {{
  group 1 {group}
  vertex w
  vertex v1 factor=1
  edge b w w length={e}
  edge c w v1 length={rest}
  basepoint w
}}
"""


def example2_text(group: str = "Z/3") -> str:
    return f"""# chain of three non-free vertices
group 1 {group}
group 2 {group}
group 3 {group}
vertex v1 factor=1
vertex v2 factor=2
vertex v3 factor=3
edge e1 v1 v2 length=0.25
edge e2 v2 v3 length=0.75
tangent tau e1=1 e2=-1
tangent minus e1=-1 e2=1
metric mid e1=0.5 e2=0.5
path seg = default, mid
path back = mid, default
# factor relabelling 1 <-> 3
marking relabel factor 1 = e1,e2
marking relabel factor 2 = e1
marking relabel factor 3 =
marking mid metric mid
"""


def rose_n2_text(group: str = "Z/3") -> str:
    return f"""# one non-free vertex with two petals: covers regime (r=1, n=2)
group 1 {group}
vertex v1 factor=1
edge a v1 v1 length=0.5
edge b v1 v1 length=0.5
tangent tau a=0.25 b=-0.25
# automorphism swapping the generators
marking swap gen 1 = b
marking swap gen 2 = a
marking swap factor 1 =
marking swap inverse edge a = x2
marking swap inverse edge b = x1
"""


def fibonacci_text() -> str:
    return """# free rose of rank two with the Fibonacci automorphism and its inverse
vertex w
edge a w w length=0.5
edge b w w length=0.5
tangent tau a=0.25 b=-0.25
selfmap phi edge a = a,b
selfmap phi edge b = a
selfmap phi_inv edge a = b
selfmap phi_inv edge b = b~,a
selfmap ident edge a = a
selfmap ident edge b = b
preset unit {
  group 1 Z/3
  vertex v1 factor=1
  edge a v1 v1 length=1
  selfmap ident edge a = a
  selfmap double edge a = a,a
}
"""


PRESETS = {
    "example1": example1_text,
    "example2": example2_text,
    "rose-n2": rose_n2_text,
    "fibonacci": fibonacci_text,
}

# further graphs used by the fuzz suites (not part of the preset surface)
EXTRA_GRAPHS = {
    "pair": """group 1 Z/3
group 2 Z/3
vertex v1 factor=1
vertex v2 factor=2
edge e v1 v2 length=1
""",
    "theta": """group 1 Z/3
group 2 Z/3
vertex v1 factor=1
vertex v2 factor=2
edge e v1 v2 length=0.5
edge f v1 v2 length=0.5
""",
    "tripod": """group 1 Z/3
group 2 Z/3
group 3 Z/3
vertex c
vertex v1 factor=1
vertex v2 factor=2
vertex v3 factor=3
edge e1 c v1 length=0.25
edge e2 c v2 length=0.25
edge e3 c v3 length=0.5
""",
    "theta0": """vertex p
vertex q
edge a p q length=0.25
edge b p q length=0.25
edge c p q length=0.5
""",
}


def preset_text(name: str, epsilon: float = 0.1) -> str:
    if name not in PRESETS:
        raise SceneError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    if name == "example1":
        return example1_text(epsilon)
    return PRESETS[name]()


def load_preset(name: str, epsilon: float = 0.1) -> Scene:
    return parse_scene(preset_text(name, epsilon))


def test_graphs(group: str = "Z/3") -> dict[str, Scene]:
    """Named single-graph scenes used by the suites, in a fixed order."""
    out = {}
    ex1 = parse_scene(example1_text(0.1, group))
    out["example1-T"] = ex1.presets["T"]
    out["example1-S"] = ex1.presets["S"]
    out["example2"] = parse_scene(example2_text(group))
    out["rose-n2"] = parse_scene(rose_n2_text(group))
    out["fibonacci"] = parse_scene(fibonacci_text())
    for k, text in EXTRA_GRAPHS.items():
        out[k] = parse_scene(text.replace("Z/3", group))
    return out


def fsum_check(values) -> bool:
    return abs(math.fsum(values) - 1.0) <= 1e-12
