"""Diagrammatic evaluation of quartic-oscillator Wightman correlators.

A diagram has n external points, K unlabeled four-legged vertices, directed
free propagators and cumulant blobs.  Endpoints are written ('e', i) for the
external time t_{i+1} and ('v', k) for vertex k.  A propagator from a vertex
to itself is a loop worth hbar/2w.  A blob lists the endpoints of its legs
as a sorted tuple (a vertex may appear several times) and evaluates to the
state-dependent part of the cumulant of that arity.

Evaluating a diagram sums over assignments of internal labels t_{j+}/t_{j-}
to its vertices, applies step functions to same-label vertex pairs, and
integrates each vertex time over [t0, t_j] with weight +i lambda or
-i lambda, divided by the diagram's automorphism count.
"""
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product
import json

import numpy as np

from .core import PhysicalParams, TimeLabel, internal_labels
from .quadrature import QuadratureSpec, integrate
from .wick import chi_part_grid, propagator_grid

EXT, VTX = "e", "v"
LEGS = 4


@dataclass(frozen=True)
class Diagram:
    n: int
    K: int
    edges: tuple    # ((src, dst), ...) sorted
    blobs: tuple    # (sorted endpoint tuple, ...) sorted

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        object.__setattr__(self, "blobs", tuple(sorted(tuple(sorted(b)) for b in self.blobs)))

    def valence(self):
        c = Counter()
        for s, d in self.edges:
            c[s] += 1
            c[d] += 1
        for b in self.blobs:
            c.update(b)
        return c

    def validate(self):
        c = self.valence()
        for i in range(self.n):
            if c[(EXT, i)] != 1:
                raise ValueError(f"external point {i} must have exactly one leg")
        for k in range(self.K):
            if c[(VTX, k)] != LEGS:
                raise ValueError(f"vertex {k} must have four legs")
        for s, d in self.edges:
            if s[0] == EXT and d[0] == EXT and s[1] >= d[1]:
                raise ValueError("external-external propagators run left to right")
        dirs = {}
        for s, d in self.edges:
            if s[0] == VTX and d[0] == VTX and s != d:
                key = tuple(sorted((s, d)))
                dirs.setdefault(key, set()).add((s, d))
        if any(len(v) > 1 for v in dirs.values()):
            raise ValueError("propagators between two vertices must share a direction")
        return self

    def blob_arities(self):
        return sorted(len(b) for b in self.blobs)

    def is_connected(self):
        nodes = [(EXT, i) for i in range(self.n)] + [(VTX, k) for k in range(self.K)]
        parent = {x: x for x in nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def join(a, b):
            parent[find(a)] = find(b)
        for s, d in self.edges:
            join(s, d)
        for b in self.blobs:
            for x in b[1:]:
                join(b[0], x)
        return len({find(x) for x in nodes}) <= 1

    def relabel(self, perm):
        """Apply a vertex permutation given as a tuple old -> new."""
        def m(x):
            return (VTX, perm[x[1]]) if x[0] == VTX else x
        return Diagram(self.n, self.K,
                       tuple((m(s), m(d)) for s, d in self.edges),
                       tuple(tuple(m(x) for x in b) for b in self.blobs))

    def key(self):
        return (self.edges, self.blobs)

    def to_json(self):
        def ep(x):
            return {"kind": "external" if x[0] == EXT else "vertex", "index": x[1]}
        return {"n": self.n, "K": self.K,
                "propagators": [{"from": ep(s), "to": ep(d)} for s, d in self.edges],
                "blobs": [{"legs": [ep(x) for x in b]} for b in self.blobs]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)

        def ep(o):
            return (EXT if o["kind"] == "external" else VTX, int(o["index"]))
        return cls(obj["n"], obj["K"],
                   tuple((ep(e["from"]), ep(e["to"])) for e in obj["propagators"]),
                   tuple(tuple(ep(x) for x in b["legs"]) for b in obj["blobs"]))


def _vertex_colours(d):
    """Iterated refinement of vertex colours from local structure."""
    colour = {k: 0 for k in range(d.K)}
    for _ in range(max(d.K, 1)):
        def name(x):
            return ("e", x[1]) if x[0] == EXT else ("v", colour[x[1]])
        sig = {}
        for k in range(d.K):
            me = (VTX, k)
            s = []
            for a, b in d.edges:
                if a == me or b == me:
                    s.append(("E", a == me, b == me, name(a), name(b)))
            for bl in d.blobs:
                if me in bl:
                    s.append(("B", bl.count(me), tuple(sorted(name(x) for x in bl))))
            sig[k] = (colour[k], tuple(sorted(s)))
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {k: ranks[sig[k]] for k in range(d.K)}
        if new == colour:
            break
        colour = new
    return colour


def canonicalize(d):
    """Representative of d's isomorphism class under vertex relabelling."""
    if d.K <= 1:
        return Diagram(d.n, d.K, d.edges, d.blobs)
    colour = _vertex_colours(d)
    order = sorted(range(d.K), key=lambda k: colour[k])
    groups = {}
    for k in order:
        groups.setdefault(colour[k], []).append(k)
    best = None
    slots = [groups[c] for c in sorted(groups)]
    for choice in product(*[list(permutations(g)) for g in slots]):
        flat = [k for g in choice for k in g]
        perm = [0] * d.K
        for new, old in enumerate(flat):
            perm[old] = new
        cand = d.relabel(tuple(perm))
        if best is None or cand.key() < best.key():
            best = cand
    return best


def _endpoints(n, K):
    return [(EXT, i) for i in range(n)] + [(VTX, k) for k in range(K)]


def _multisets(pool, caps, size):
    """Multisets of total ``size`` drawn from pool with per-item caps."""
    if size == 0:
        yield ()
        return
    if not pool:
        return
    head, rest = pool[0], pool[1:]
    for c in range(min(caps[head], size), -1, -1):
        for tail in _multisets(rest, caps, size - c):
            yield (head,) * c + tail


@lru_cache(maxsize=None)
def _enumerate(n, K, max_blob, arities):
    eps = _endpoints(n, K)
    caps0 = {x: (1 if x[0] == EXT else LEGS) for x in eps}
    found = {}

    def rec(caps, edges, blobs):
        live = [x for x in eps if caps[x] > 0]
        if not live:
            d = Diagram(n, K, tuple(edges), tuple(blobs))
            try:
                d.validate()
            except ValueError:
                return
            c = canonicalize(d)
            found.setdefault(c.key(), c)
            return
        e = live[0]
        caps[e] -= 1
        # propagator blocks
        for q in live:
            if caps[q] <= 0:
                continue
            if q == e:
                if e[0] != VTX:
                    continue
                dirs = [(e, e)]
            elif e[0] == EXT and q[0] == EXT:
                dirs = [(e, q)]
            else:
                dirs = [(e, q), (q, e)]
            caps[q] -= 1
            for pr in dirs:
                rec(caps, edges + [pr], blobs)
            caps[q] += 1
        # blob blocks containing e
        for size in range(0, max_blob):
            if size + 1 not in arities:
                continue
            for others in _multisets(live, caps, size):
                for x in others:
                    caps[x] -= 1
                rec(caps, edges, blobs + [tuple(sorted((e,) + others))])
                for x in others:
                    caps[x] += 1
        caps[e] += 1

    rec(dict(caps0), [], [])
    return tuple(sorted(found.values(), key=lambda d: d.key()))


def enumerate_diagrams(n, K, max_blob_legs=None, chi=None, connected_only=False):
    """All distinct diagrams with n external points and K vertices.

    Blobs whose cumulant coefficients all vanish for ``chi`` are skipped
    when a table is given.  Diagrams with no admissible labelling are kept;
    they evaluate to zero.
    """
    if not 0 <= K <= 2:
        raise NotImplementedError("diagrams are enumerated for K <= 2 only")
    if n < 1:
        raise ValueError("need at least one external point")
    total = n + LEGS * K
    max_blob = total if max_blob_legs is None else min(max_blob_legs, total)
    arities = set(range(1, max_blob + 1))
    if chi is not None:
        arities = {k for k in arities if k <= chi.max_order
                   and any(chi[m, k - m] != 0 for m in range(k + 1))}
    out = _enumerate(n, K, max_blob, frozenset(arities))
    if connected_only:
        out = tuple(d for d in out if d.is_connected())
    return list(out)


# labels, step functions, vertex factors

def _edge_constraint(src_pos, dst_pos, internal_pair):
    if internal_pair:
        return src_pos <= dst_pos
    return src_pos < dst_pos


def label_assignments(d):
    """All maps from vertices to internal labels satisfying the edge constraints.

    Vertices sharing a label get successive copy indices.
    """
    labels = internal_labels(d.n)
    out = []
    for choice in product(labels, repeat=d.K):
        def pos(x):
            return choice[x[1]].position if x[0] == VTX else TimeLabel(x[1] + 1).position
        ok = True
        for s, t in d.edges:
            if s == t or (s[0] == EXT and t[0] == EXT):
                continue
            if not _edge_constraint(pos(s), pos(t), s[0] == VTX and t[0] == VTX):
                ok = False
                break
        if ok:
            seen = Counter()
            labelled = []
            for lab in choice:
                labelled.append(TimeLabel(lab.j, lab.branch, seen[(lab.j, lab.branch)]))
                seen[(lab.j, lab.branch)] += 1
            out.append(tuple(labelled))
    return out


def step_weight(d, assignment):
    """Step-function weight of a labelled diagram.

    Returns 0 when some vertex-vertex propagator group runs backwards along
    the label chain, otherwise a list of (later, earlier) vertex pairs whose
    times must be ordered (an empty list means weight 1).
    """
    groups = {(s[1], t[1]) for s, t in d.edges
              if s[0] == VTX and t[0] == VTX and s != t}
    theta = []
    for u, v in sorted(groups):
        lu, lv = assignment[u], assignment[v]
        pu, pv = lu.position, lv.position
        if pu > pv:
            return 0
        if pu < pv:
            continue
        if lu.branch < 0:
            theta.append((u, v))
        else:
            theta.append((v, u))
    return theta


@dataclass(frozen=True)
class VertexFactor:
    coefficient: complex
    interval: tuple


def vertex_factor(label, times, p=None):
    """+i lambda (for t_{j+}) or -i lambda (for t_{j-}) integrated over [t0, t_j]."""
    p = p or PhysicalParams()
    if not label.internal:
        raise ValueError("vertex factors need an internal label")
    return VertexFactor(1j * label.branch * p.lam, (p.t0, float(times[label.j - 1])))


# symmetry factor

def _leg_structure(d):
    used = Counter()

    def leg(x):
        if x[0] == EXT:
            return x
        used[x[1]] += 1
        return (VTX, x[1], used[x[1]] - 1)
    blocks = []
    for s, t in d.edges:
        a, b = leg(s), leg(t)
        blocks.append(("L", frozenset((a, b))) if s == t else ("E", a, b))
    for bl in d.blobs:
        blocks.append(("B", frozenset(leg(x) for x in bl)))
    return Counter(blocks)


def _map_block(block, f):
    if block[0] == "E":
        return ("E", f(block[1]), f(block[2]))
    return (block[0], frozenset(f(x) for x in block[1]))


def symmetry_factor(d):
    """Order of the automorphism group of d.

    Counts vertex relabellings that fix d, times the leg permutations inside
    each vertex that fix the contraction pattern.  This equals
    K! (4!)^K divided by the number of Wick contraction patterns giving d.
    """
    base = canonicalize(d)
    vertex_auts = sum(1 for perm in permutations(range(d.K))
                      if base.relabel(perm).key() == base.key())
    struct = _leg_structure(base)
    count = 0
    for perms in product(list(permutations(range(LEGS))), repeat=d.K):
        def f(x, perms=perms):
            return x if x[0] == EXT else (VTX, x[1], perms[x[1]][x[2]])
        if Counter(_map_block(b, f) for b in struct.elements()) == struct:
            count += 1
    return vertex_auts * count


# evaluation

@dataclass
class DiagramValue:
    total: complex
    by_assignment: list = field(default_factory=list)


def evaluate_diagram(d, chi, times, p=None, quad=None, detail=False):
    p = p or PhysicalParams()
    quad = quad or QuadratureSpec()
    times = [float(t) for t in times]
    if len(times) != d.n:
        raise ValueError("one time per external point is required")
    S = symmetry_factor(d)
    rows = []
    total = 0j
    for assignment in label_assignments(d):
        theta = step_weight(d, assignment)
        if theta == 0:
            rows.append((assignment, 0j))
            continue
        factors = [vertex_factor(lab, times, p) for lab in assignment]
        coef = np.prod([f.coefficient for f in factors]) / S

        def f(x, assignment=assignment):
            def at(ep):
                return x[ep[1]] if ep[0] == VTX else np.full(x.shape[1], times[ep[1]])
            val = np.ones(x.shape[1], dtype=complex)
            for s, t in d.edges:
                val = val * propagator_grid(at(s), at(t), p)
            for bl in d.blobs:
                val = val * chi_part_grid(np.vstack([at(e) for e in bl]), chi, p)
            return val
        v = coef * integrate([fa.interval for fa in factors], theta, f, quad)
        rows.append((assignment, v))
        total += v
    return DiagramValue(total, rows) if detail else total


def diagrammatic_orders(chi, times, p, K, quad=None, max_blob_legs=None):
    out = []
    for k in range(K + 1):
        out.append(sum((evaluate_diagram(d, chi, times, p, quad)
                        for d in enumerate_diagrams(len(times), k, max_blob_legs, chi)), 0j))
    return out


def correlator_diagrammatic(chi, times, p, K, quad=None, max_blob_legs=None):
    return sum(diagrammatic_orders(chi, times, p, K, quad, max_blob_legs))


# export

def _label_str(assignment):
    return [str(l) for l in assignment]


def diagram_summary(d, chi=None, times=None, p=None, quad=None):
    assignments = label_assignments(d)
    info = {"diagram": d.to_json(), "symmetry_factor": symmetry_factor(d),
            "connected": d.is_connected(),
            "labels": [_label_str(a) for a in assignments],
            "step_weights": []}
    for a in assignments:
        th = step_weight(d, a)
        info["step_weights"].append(
            0 if th == 0 else [f"theta({a[i]}^({i}) - {a[j]}^({j}))" for i, j in th] or 1)
    if chi is not None and times is not None:
        v = evaluate_diagram(d, chi, times, p, quad)
        info["value"] = {"re": v.real, "im": v.imag}
    return info


def to_dot(d, name="diagram"):
    assignments = label_assignments(d)
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for i in range(d.n):
        lines.append(f'  e{i} [shape=box, label="t{i + 1}"];')
    for k in range(d.K):
        labs = sorted({str(a[k]) for a in assignments})
        lines.append(f'  v{k} [shape=circle, style=filled, fillcolor=black, '
                     f'fontcolor=white, xlabel="{{{", ".join(labs)}}}", label=""];')

    def node(x):
        return f"{x[0]}{x[1]}"
    for s, t in d.edges:
        lines.append(f"  {node(s)} -> {node(t)};")
    for b, bl in enumerate(d.blobs):
        lines.append(f'  b{b} [shape=doublecircle, label="C{len(bl)}"];')
        for x in bl:
            lines.append(f"  b{b} -> {node(x)} [dir=none, color=red];")
    lines.append(f'  label="S = {symmetry_factor(d)}";')
    lines.append("}")
    return "\n".join(lines)
