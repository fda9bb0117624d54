"""End-to-end pipelines and fan-blowup certificates.

A certificate witnesses that a graph embeds in the b-blowup of a fan: the
deleted set X goes to the center clique, and consecutive b-sized chunks of a
bandwidth-b ordering go to consecutive path nodes.  The converse direction
recovers a deleted set and an ordering of width at most 2b-1 from any such
embedding.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction

from .embedding import build_embedding, project_order
from .errors import ConstraintError, InputError
from .graphs import (
    Graph,
    ProductVertex,
    bandwidth_of_ordering,
    bfs_layering,
)
from .randomness import stream
from .sparsify import (
    BakerConfig,
    StructuredSparsifier,
    baker_sparsify,
    product_sparsify,
)
from .starmetric import StarMetric
from .treedec import TreeDecomposition, minfill_decomposition, ttree_complete

CENTER = 0  # fan node id of the center; path nodes are 1..fan_size-1


@dataclass
class FanCertificate:
    n: int
    b: int
    fan_size: int
    x: list
    ordering: list
    mapping: dict  # vertex -> (node, slot)
    measured_bandwidth: int
    seed: int = 0
    params: dict = field(default_factory=dict)


@dataclass
class PipelineResult:
    x: set
    ordering: list
    bandwidth: int
    bandwidth_median: float
    info: dict = field(default_factory=dict)


def fan_certificate(g: Graph, x, ordering, b: int, seed: int = 0,
                    params: dict | None = None) -> FanCertificate:
    """Certificate mapping g into the b-blowup of a fan on ceil(n/b) nodes.

    X is padded to exactly b vertices from the tail of the ordering, which
    cannot increase the ordering's width.
    """
    n = g.num_vertices
    if n == 0:
        raise ConstraintError("cannot certify the empty graph")
    if not (1 <= b <= n):
        raise ConstraintError(f"blowup factor b={b} outside 1..{n}")
    x = sorted(x)
    if len(x) > b:
        raise ConstraintError(f"|X| = {len(x)} exceeds b = {b}")
    ordering = list(ordering)
    bw = bandwidth_of_ordering(g.delete(x), ordering)
    if bw > b:
        raise ConstraintError(f"ordering width {bw} exceeds b = {b}")

    pad = b - len(x)
    if pad:
        x = x + ordering[len(ordering) - pad:]
        ordering = ordering[: len(ordering) - pad]

    fan_size = max(2, -(-n // b))
    p = fan_size - 1
    mapping = {}
    for slot, v in enumerate(x):
        mapping[v] = (CENTER, slot)
    for t, v in enumerate(ordering):
        node = 1 + t // b
        if node > p:
            raise AssertionError("chunking overflowed the fan path")
        mapping[v] = (node, t % b)
    measured = bandwidth_of_ordering(g.delete(x), ordering)
    return FanCertificate(
        n=n,
        b=b,
        fan_size=fan_size,
        x=x,
        ordering=ordering,
        mapping=mapping,
        measured_bandwidth=measured,
        seed=seed,
        params=dict(params or {}),
    )


def verify_certificate(g: Graph, cert: FanCertificate,
                       strict_shape: bool = True) -> list[str]:
    """Check the containment claim edge by edge; violations are data.

    With ``strict_shape`` the fan must have the canonical ceil(n/b) nodes
    that ``fan_certificate`` produces; without it any fan size is accepted
    (used for round-tripping foreign embeddings, where path blocks may be
    empty).
    """
    violations = []
    live = g.vertices()
    n = len(live)
    if cert.n != n:
        violations.append(f"certificate n={cert.n} but graph has {n} vertices")
    if not (1 <= cert.b <= max(n, 1)):
        violations.append(f"blowup factor {cert.b} out of range")
        return violations
    if strict_shape and cert.fan_size != max(2, -(-cert.n // cert.b)):
        violations.append(
            f"fan size {cert.fan_size} differs from ceil(n/b) = {-(-cert.n // cert.b)}"
        )

    mapped = set(cert.mapping)
    for v in live:
        if v not in mapped:
            violations.append(f"vertex {v} is not mapped")
    for v in mapped:
        if v not in set(live):
            violations.append(f"mapped vertex {v} is not in the graph")

    seen_slots = {}
    for v, (node, slot) in sorted(cert.mapping.items()):
        if not (0 <= node < cert.fan_size):
            violations.append(f"vertex {v} mapped to missing fan node {node}")
            continue
        if not (0 <= slot < cert.b):
            violations.append(f"vertex {v} mapped to slot {slot} outside 0..{cert.b - 1}")
            continue
        if (node, slot) in seen_slots:
            violations.append(
                f"vertices {seen_slots[(node, slot)]} and {v} share node {node} slot {slot}"
            )
        seen_slots[(node, slot)] = v

    x_set = set(cert.x)
    for v, (node, _) in cert.mapping.items():
        if (node == CENTER) != (v in x_set):
            violations.append(f"vertex {v}: center membership disagrees with X")

    if strict_shape:
        if sorted(cert.ordering) != sorted(set(live) - x_set):
            violations.append("ordering is not a permutation of the non-center vertices")
        else:
            width = bandwidth_of_ordering(g.delete(x_set), cert.ordering)
            if width != cert.measured_bandwidth:
                violations.append(
                    f"declared bandwidth {cert.measured_bandwidth} but ordering has {width}"
                )
            elif width > cert.b:
                violations.append(f"ordering width {width} exceeds b = {cert.b}")

    for u, v in g.edges():
        if u not in cert.mapping or v not in cert.mapping:
            continue
        nu, nv = cert.mapping[u][0], cert.mapping[v][0]
        if nu != CENTER and nv != CENTER and abs(nu - nv) > 1:
            violations.append(
                f"edge ({u},{v}) spans non-adjacent fan nodes {nu} and {nv}"
            )
    return violations


def blowup_to_bandwidth(g: Graph, cert: FanCertificate):
    """Recover (X, ordering) from a fan-blowup embedding; the ordering walks
    the path blocks in order and has width at most 2b-1."""
    violations = verify_certificate(g, cert, strict_shape=False)
    if violations:
        raise InputError("invalid fan mapping: " + "; ".join(violations))
    x = {v for v, (node, _) in cert.mapping.items() if node == CENTER}
    blocks: dict = {}
    for v, (node, slot) in cert.mapping.items():
        if node != CENTER:
            blocks.setdefault(node, []).append((slot, v))
    ordering = []
    for node in sorted(blocks):
        for _, v in sorted(blocks[node]):
            ordering.append(v)
    bw = bandwidth_of_ordering(g.delete(x), ordering)
    if bw > 2 * cert.b - 1:
        raise AssertionError(f"round-trip width {bw} exceeds 2b-1 = {2 * cert.b - 1}")
    return x, ordering, bw


# ---------------------------------------------------------------------------
# pipelines


def _best_of_orderings(gp: Graph, emb, seed: int, restarts: int):
    results = []
    for r in range(restarts):
        sub = stream(seed, f"order/restart={r}").integers(0, 2**63 - 1)
        ordering = project_order(emb, int(sub))
        results.append((bandwidth_of_ordering(gp, ordering), r, ordering))
    results.sort(key=lambda t: (t[0], t[1]))
    bws = sorted(t[0] for t in results)
    return results[0][2], results[0][0], float(statistics.median(bws))


def _compressed_rows(vertices, layer_of) -> dict:
    values = sorted({layer_of[v] for v in vertices})
    rank = {s: t + 1 for t, s in enumerate(values)}
    return {v: rank[layer_of[v]] for v in vertices}


def planar_pipeline(g: Graph, D, seed: int, k: int | None = None, a=193,
                    restarts: int = 5, dims_cap: int | None = None,
                    decomp_cache: dict | None = None) -> PipelineResult:
    """Sparsify with the layered Baker cut, then order the survivors by
    random projections of the product-style embedding.

    The survivors are treated as a subgraph of (bag-completed survivors) x
    (path of compressed BFS layers), with an empty structured sparsifier, so
    one embedding engine serves both this and the product pipeline.
    """
    n = g.num_vertices
    if n == 0:
        return PipelineResult(set(), [], 0, 0.0)
    if not (1 <= D <= n):
        raise InputError(f"D={D} outside [1, {n}]")
    if n == 1:
        return PipelineResult(set(), list(g.vertices()), 0, 0.0)

    layering = bfs_layering(g, min(g.vertices()))
    baker = baker_sparsify(g, BakerConfig(3, D, layering), decomp_cache)
    gp = g.delete(baker.x)
    survivors = gp.vertices()
    info = {
        "baker_scales": baker.num_scales,
        "baker_w_eff": baker.w_eff,
        "x_size": len(baker.x),
        "x_bound": baker.size_bound,
    }
    if not survivors:
        return PipelineResult(set(baker.x), [], 0, 0.0, info)
    if len(survivors) == 1:
        return PipelineResult(set(baker.x), survivors, 0, 0.0, info)

    td = minfill_decomposition(gp)
    host = ttree_complete(gp, td)
    rows = _compressed_rows(survivors, layering.layer_of)
    placements = [ProductVertex(v, rows[v]) for v in survivors]
    sp = StructuredSparsifier(host, len(survivors), max(D, 2), {})
    sm = StarMetric(sp, placements)
    kk = k if k is not None else max(2, math.ceil(math.log2(len(survivors))))
    emb = build_embedding(survivors, placements, sm, kk, a, seed, dims_cap)
    ordering, bw, bw_med = _best_of_orderings(gp, emb, seed, restarts)
    info["host_width"] = td.width
    return PipelineResult(set(baker.x), ordering, bw, bw_med, info)


def product_pipeline(host: Graph, td: TreeDecomposition | None, g: Graph,
                     placements, D, k: int | None = None, a=193,
                     seed: int = 0, restarts: int = 5,
                     dims_cap: int | None = None) -> PipelineResult:
    """Full product run: complete the host, cut the strips, build the
    detour metric and the embedding, and keep the best of R projections."""
    n = g.num_vertices
    if n == 0:
        return PipelineResult(set(), [], 0, 0.0)
    placements = list(placements)
    if len(placements) != g.n:
        raise InputError("one placement per vertex is required")
    if td is None:
        td = minfill_decomposition(host)
    completed = ttree_complete(host, td)

    # compress empty rows; product edges span at most one row either way
    live_ids = g.vertices()
    rows_present = sorted({placements[v].p for v in live_ids})
    rank = {p: t + 1 for t, p in enumerate(rows_present)}
    shifted = {v: ProductVertex(placements[v].h, rank[placements[v].p]) for v in live_ids}

    sp = product_sparsify(completed, td, [shifted[v] for v in live_ids], D)
    removed = {v for v in live_ids if sp.in_x(shifted[v])}
    gp = g.delete(removed)
    survivors = gp.vertices()
    info = {
        "host_width": td.width,
        "x_size": len(removed),
        "x_cylinder_size": sp.x_size(),
        "x_bound": Fraction(18) * (td.computed_width() + 1) * len(live_ids)
        * sp.num_scales / Fraction(D),
    }
    if not survivors:
        return PipelineResult(removed, [], 0, 0.0, info)
    if len(survivors) == 1:
        return PipelineResult(removed, survivors, 0, 0.0, info)

    surv_pvs = [shifted[v] for v in survivors]
    sm = StarMetric(sp, surv_pvs)
    kk = k if k is not None else max(2, math.ceil(math.log2(len(survivors))))
    emb = build_embedding(survivors, surv_pvs, sm, kk, a, seed, dims_cap)
    ordering, bw, bw_med = _best_of_orderings(gp, emb, seed, restarts)
    return PipelineResult(removed, ordering, bw, bw_med, info)


# ---------------------------------------------------------------------------
# drawings and reductions


@dataclass(frozen=True)
class Crossing:
    edge_a: tuple
    edge_b: tuple
    pos_a: float
    pos_b: float


@dataclass
class DrawnGraph:
    """A graph plus its crossing records.  Each crossing names the two edges
    involved and its position along each; no three edges meet at a point."""

    graph: Graph
    crossings: list

    def validate(self, k: int | None = None):
        edge_set = {tuple(sorted(e)) for e in self.graph.edges()}
        per_edge: dict = {}
        for t, cr in enumerate(self.crossings):
            ea, eb = tuple(sorted(cr.edge_a)), tuple(sorted(cr.edge_b))
            for e in (ea, eb):
                if e not in edge_set:
                    raise InputError(f"crossing {t} references missing edge {e}")
            if ea == eb:
                raise InputError(f"crossing {t} has an edge crossing itself")
            if set(ea) & set(eb):
                raise InputError(
                    f"crossing {t}: edges {ea} and {eb} share an endpoint"
                )
            for e, pos in ((ea, cr.pos_a), (eb, cr.pos_b)):
                if not (0.0 < pos < 1.0):
                    raise InputError(f"crossing {t}: position {pos} outside (0,1)")
                if pos in per_edge.setdefault(e, set()):
                    raise InputError(
                        f"crossing {t}: duplicate position {pos} on edge {e}"
                    )
                per_edge[e].add(pos)
        if k is not None:
            for e, spots in per_edge.items():
                if len(spots) > k:
                    raise InputError(
                        f"edge {e} has {len(spots)} crossings, more than k={k}"
                    )


def planarize_drawing(dg: DrawnGraph):
    """Replace each crossing by a degree-4 dummy vertex.

    Returns ``(g_prime, dummy_edges)`` where dummy ``n + t`` stands for
    crossing ``t`` and ``dummy_edges[t]`` is the pair of original edges
    meeting there.
    """
    g = dg.graph
    n = g.n
    chains: dict = {tuple(sorted(e)): [] for e in g.edges()}
    dummy_edges = []
    for t, cr in enumerate(dg.crossings):
        d = n + t
        chains[tuple(sorted(cr.edge_a))].append((cr.pos_a, d))
        chains[tuple(sorted(cr.edge_b))].append((cr.pos_b, d))
        dummy_edges.append((tuple(sorted(cr.edge_a)), tuple(sorted(cr.edge_b))))
    segments = set()
    for (u, v), stops in chains.items():
        path = [u] + [d for _, d in sorted(stops)] + [v]
        for s in range(len(path) - 1):
            a, b = path[s], path[s + 1]
            segments.add((min(a, b), max(a, b)))
    g_prime = Graph(n + len(dg.crossings), sorted(segments), removed=g.removed)
    return g_prime, dummy_edges


def _lift_deleted(x_prime, n: int, dummy_edges) -> set:
    """Replace each deleted dummy by the endpoints of its two crossing
    edges; original vertices pass through."""
    lifted: set = set()
    for v in x_prime:
        if v < n:
            lifted.add(v)
        else:
            ea, eb = dummy_edges[v - n]
            lifted.update(ea)
            lifted.update(eb)
    return lifted


def kplanar_reduce(dg: DrawnGraph, k: int, D, seed: int, a=193,
                   restarts: int = 5, dims_cap: int | None = None) -> PipelineResult:
    """Planarize a k-planar drawing, sparsify and order the planarization,
    then lift the deleted set back (each dummy costs its four endpoints).

    Rejects inputs whose edge count exceeds the k-planar budget
    ``8 sqrt(k) n`` (classic crossing-lemma constant 1/64).
    """
    if k < 0:
        raise InputError("k must be non-negative")
    dg.validate(k=k if k > 0 else None)
    g = dg.graph
    n = g.num_vertices
    m = g.num_edges
    if k > 0 and m > 8.0 * math.sqrt(k) * n:
        raise InputError(
            f"{m} edges exceed the k-planar budget 8*sqrt(k)*n = "
            f"{8.0 * math.sqrt(k) * n:.0f}; input is not {k}-planar"
        )
    if not dg.crossings:
        return planar_pipeline(g, D, seed, a=a, restarts=restarts, dims_cap=dims_cap)

    g_prime, dummy_edges = planarize_drawing(dg)
    inner = planar_pipeline(g_prime, D, seed, a=a, restarts=restarts,
                            dims_cap=dims_cap)
    x = _lift_deleted(inner.x, g.n, dummy_edges)
    if len(x) > 4 * len(inner.x):
        raise AssertionError("lifted set exceeds four times the planar set")

    crossings_per_edge: dict = {}
    for cr in dg.crossings:
        for e in (tuple(sorted(cr.edge_a)), tuple(sorted(cr.edge_b))):
            crossings_per_edge[e] = crossings_per_edge.get(e, 0) + 1
    for e, cnt in crossings_per_edge.items():
        if cnt + 1 > k + 1:
            raise AssertionError(f"edge {e} became a path of length {cnt + 1} > k+1")

    ordering = [v for v in inner.ordering if v < g.n and v not in x]
    gp = g.delete(x)
    bw = bandwidth_of_ordering(gp, ordering)
    info = dict(inner.info)
    info.update({
        "dummies": len(dg.crossings),
        "planar_x_size": len(inner.x),
        "lifted_x_size": len(x),
        "planar_bandwidth": inner.bandwidth,
    })
    return PipelineResult(x, ordering, bw, inner.bandwidth_median, info)


def gk_reduce(dg: DrawnGraph, genus: int, k: int, D, seed: int,
              planarizing_set=None, a=193, restarts: int = 5,
              dims_cap: int | None = None) -> PipelineResult:
    """Reduction for drawings on a genus-g surface with at most k crossings
    per edge: planarize crossings, remove an externally supplied planarizing
    set, run the planar pipeline, and lift everything back.

    Short-circuit branches (documented constants): when k > n^(2/3) or
    g > n, the guarantee bound already exceeds n, so X = V(G) is returned.
    With m >= 64n edges, the surface crossing bounds (adopted constants
    m^3 / (64 n^2) and m^2 / (64 g)) either force the same short-circuit or
    expose an inconsistent input.
    """
    g = dg.graph
    n = g.num_vertices
    m = g.num_edges
    if genus < 0:
        raise InputError("genus must be non-negative")
    if genus == 0:
        return kplanar_reduce(dg, k, D, seed, a=a, restarts=restarts,
                              dims_cap=dims_cap)

    if dg.crossings:
        dg.validate(k=k)
        if k > n ** (2.0 / 3.0) or genus > n:
            return PipelineResult(set(g.vertices()), [], 0, 0.0,
                                  {"short_circuit": "k or g too large"})
        if m >= 64 * n and m > 8.0 * math.sqrt(k) * n:
            if genus * m >= n * n:
                if m <= 64 * k * genus:
                    return PipelineResult(set(g.vertices()), [], 0, 0.0,
                                          {"short_circuit": "dense genus case"})
                raise InputError(
                    f"{m} edges exceed the genus-{genus} crossing budget"
                )
            raise InputError(
                f"{m} edges exceed the k-planar budget on any surface"
            )
        g_prime, dummy_edges = planarize_drawing(dg)
    else:
        dg.validate()
        g_prime, dummy_edges = g, []

    if planarizing_set is None:
        raise InputError(
            "positive genus needs an externally supplied planarizing set"
        )
    planarizing = set(planarizing_set)
    for v in planarizing:
        if not (0 <= v < g_prime.n) or v in g_prime.removed:
            raise InputError(f"planarizing vertex {v} is not in the augmented graph")

    residual = g_prime.delete(planarizing)
    if residual.num_vertices == 0:
        inner = PipelineResult(set(), [], 0, 0.0)
    else:
        inner = planar_pipeline(residual, D, seed, a=a, restarts=restarts,
                                dims_cap=dims_cap)
    x = _lift_deleted(planarizing | inner.x, g.n, dummy_edges)
    ordering = [v for v in inner.ordering if v < g.n and v not in x]
    gp = g.delete(x)
    bw = bandwidth_of_ordering(gp, ordering)
    info = dict(inner.info)
    info.update({
        "dummies": len(dg.crossings),
        "planarizing_size": len(planarizing),
        "lifted_x_size": len(x),
    })
    return PipelineResult(x, ordering, bw, inner.bandwidth_median, info)


def default_blowup_factor(result: PipelineResult) -> int:
    return max(len(result.x), result.bandwidth, 1)
