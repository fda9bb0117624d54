"""Local-density sparsifiers.

Two variants share one mechanism: cut dyadic slabs with weighted separators
so that every surviving ball of radius r contains O(D * r) vertices.

* ``baker_sparsify`` works on a layered graph directly (slabs are runs of
  consecutive layers, separators come from per-slab tree decompositions).
* ``product_sparsify`` works on a subgraph of ``host x path``: each scale-i
  strip of 3 * 2^i rows is cut by a full vertical cylinder ``Y x rows``, so
  strip components are host components times the strip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError
from .graphs import Graph, Layering, ProductVertex
from .treedec import (
    TreeDecomposition,
    minfill_decomposition,
    separator_bag_union,
    validate_decomposition,
    weighted_separator,
)


def _ceil_div(numer, denom) -> int:
    """Exact ceiling of numer / denom for int or Fraction operands."""
    return math.ceil(Fraction(numer) / Fraction(denom))


@dataclass(frozen=True)
class BakerConfig:
    t: int
    D: object
    layering: Layering


@dataclass
class BakerResult:
    """Sparsifying set plus the per-run accounting used by the size bound."""

    x: set
    num_scales: int
    w_eff: Fraction
    size_bound: Fraction
    slab_widths: dict = field(default_factory=dict)

    def __contains__(self, v):
        return v in self.x

    def __len__(self):
        return len(self.x)


def baker_sparsify(g: Graph, cfg: BakerConfig, decomp_cache: dict | None = None) -> BakerResult:
    """Sparsify a layered graph so ``g - X`` has local density at most D.

    Scales i cover every dyadic radius class with 2^i >= r for the radii
    r < n/D that the density bound must control.  At scale i, slab j is the
    union of layers ``j*2^i .. (j+1)*2^i - 1`` widened by one slab on each
    side; the widened slab is cut with unit weights and
    ``c = ceil(|slab| / (D * 2^(i-1)))``, so surviving slab components have
    at most ``D * 2^(i-1)`` vertices.
    """
    n = g.num_vertices
    D = cfg.D
    if n == 0:
        return BakerResult(set(), 0, Fraction(0), Fraction(0))
    if not (1 <= D <= n):
        raise InputError(f"D={D} outside [1, {n}]")
    cfg.layering.validate(g)
    layer = cfg.layering.normalized().layer_of
    if decomp_cache is None:
        decomp_cache = {}

    by_layer: dict = {}
    for v in g.vertices():
        by_layer.setdefault(layer[v], []).append(v)

    r_max = _ceil_div(n, D) - 1
    if r_max < 1:
        return BakerResult(set(), 0, Fraction(0), Fraction(0))
    top = max(0, (r_max - 1).bit_length())

    live = set(g.vertices())
    max_layer = max(by_layer)
    x: set = set()
    w_eff = Fraction(0)
    slab_widths = {}
    for i in range(top + 1):
        span = 1 << i
        threshold = Fraction(D) * Fraction(span, 2)
        for j in range(0, max_layer // span + 1):
            slab = []
            for s in range((j - 1) * span, (j + 2) * span):
                slab.extend(by_layer.get(s, ()))
            if not slab:
                continue
            c = max(1, _ceil_div(len(slab), threshold))
            if c == 1:
                continue
            key = frozenset(slab)
            td = decomp_cache.get(key)
            sub = g.delete(live - key)
            if td is None:
                td = minfill_decomposition(sub)
                decomp_cache[key] = td
            slab_widths[(i, j)] = td.width
            w_eff = max(w_eff, Fraction(td.width + 1, 3 * span))
            sep = weighted_separator(sub, td, {v: 1 for v in slab}, c)
            x |= separator_bag_union(td, sep)

    num_scales = top + 1
    size_bound = Fraction(18) * w_eff * n * num_scales / Fraction(D)
    if len(x) > size_bound:
        raise AssertionError(
            f"sparsifier size {len(x)} exceeds bound {float(size_bound):.1f}"
        )
    return BakerResult(x, num_scales, w_eff, size_bound, slab_widths)


class StructuredSparsifier:
    """The family of vertical cuts ``X[i][j] = Y[i][j] x rows(strip+)`` over a
    ``host x path`` product, plus their union X.

    Rows 1..N hold the target subgraph; the path is conceptually padded to
    rows ``-N+1 .. 2N`` so every strip has a detour row on each side except
    the full-width top strip.  ``comp[(i, j)]`` labels the components of
    ``host - Y[i][j]``.
    """

    def __init__(self, host: Graph, n_points: int, D, cells: dict):
        self.host = host
        self.n_points = n_points
        self.D = D
        if n_points < 0:
            raise InputError("negative point count")
        self.N = 1 << max(0, (max(1, n_points) - 1).bit_length())
        self.cells = cells  # (i, j) -> frozenset Y
        self.comp: dict = {}
        for key, y in cells.items():
            self.comp[key] = self._component_labels(y)

    # -- geometry ----------------------------------------------------------

    @property
    def num_scales(self) -> int:
        return self.N.bit_length()  # scales 0 .. log2(N)

    def strip_of(self, row: int, i: int) -> int:
        return (row - 1) >> i

    def strips_at(self, i: int) -> int:
        return self.N >> i

    def plus_interval(self, i: int, j: int):
        """Row interval of the widened strip (i, j), before padding clip."""
        return (j - 1) * (1 << i) + 1, (j + 2) * (1 << i)

    def pad_range(self):
        return -self.N + 1, 2 * self.N

    def _component_labels(self, y) -> dict:
        labels = {}
        sub = self.host.delete(y)
        for comp in sub.components():
            root = comp[0]
            for v in comp:
                labels[v] = root
        return labels

    # -- membership and size ------------------------------------------------

    def in_x(self, pv: ProductVertex) -> bool:
        for i in range(self.num_scales):
            s = self.strip_of(pv.p, i)
            for j in (s - 1, s, s + 1):
                if 0 <= j < self.strips_at(i) and pv.h in self.cells.get((i, j), ()):
                    lo, hi = self.plus_interval(i, j)
                    if lo <= pv.p <= hi:
                        return True
        return False

    def x_size(self) -> int:
        """Exact size of the union of cylinders, clipped to the padded path."""
        pad_lo, pad_hi = self.pad_range()
        by_host: dict = {}
        for (i, j), y in self.cells.items():
            if not y:
                continue
            lo, hi = self.plus_interval(i, j)
            lo, hi = max(lo, pad_lo), min(hi, pad_hi)
            for h in y:
                by_host.setdefault(h, []).append((lo, hi))
        total = 0
        for intervals in by_host.values():
            intervals.sort()
            cur_lo, cur_hi = intervals[0]
            for lo, hi in intervals[1:]:
                if lo > cur_hi + 1:
                    total += cur_hi - cur_lo + 1
                    cur_lo, cur_hi = lo, hi
                else:
                    cur_hi = max(cur_hi, hi)
            total += cur_hi - cur_lo + 1
        return total

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"N {self.N} n {self.n_points} D {self.D}"]
        for i in range(self.num_scales):
            for j in range(self.strips_at(i)):
                y = sorted(self.cells.get((i, j), ()))
                lines.append(f"{i} {j} | " + " ".join(str(v) for v in y))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, host: Graph) -> "StructuredSparsifier":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = lines[0].split()
        if len(header) != 6 or header[0] != "N" or header[2] != "n" or header[4] != "D":
            raise InputError("bad sparsifier header")
        n_points = int(header[3])
        d_raw = header[5]
        density = Fraction(d_raw) if "/" in d_raw or "." not in d_raw else float(d_raw)
        cells = {}
        for ln in lines[1:]:
            left, _, right = ln.partition("|")
            i, j = (int(t) for t in left.split())
            cells[(i, j)] = frozenset(int(t) for t in right.split())
        return cls(host, n_points, density, cells)


def product_sparsify(
    host: Graph,
    td: TreeDecomposition,
    g_vertices,
    D,
    rows: int | None = None,
) -> StructuredSparsifier:
    """Structured sparsifier for a subgraph placed in ``host x path``.

    ``g_vertices`` are the placements (host vertex, row); rows must lie in
    1..N for N the smallest power of two at least the placement count.  Each
    scale-i strip is cut with column weights
    ``xi(h) = #(G vertices in column h with rows in the widened strip)`` and
    ``c = ceil(xi(host) / (2^(i-1) D))``, so every component of host - Y
    carries at most ``2^(i-1) D`` G-vertices.
    """
    if D < 2:
        raise InputError(f"product sparsifier needs D >= 2, got {D}")
    placements = list(g_vertices)
    n = len(placements)
    if len(set(placements)) != n:
        raise InputError("duplicate product placements")
    errs = validate_decomposition(host, td)
    if errs:
        raise InputError("invalid host decomposition: " + "; ".join(errs))

    N = 1 << max(0, (max(1, n) - 1).bit_length())
    for pv in placements:
        if not (1 <= pv.p <= N):
            raise InputError(f"placement row {pv.p} outside 1..{N}")
        if pv.h in host.removed or not (0 <= pv.h < host.n):
            raise InputError(f"placement host vertex {pv.h} invalid")
    if rows is not None and rows > N:
        raise InputError(f"declared row count {rows} exceeds N={N}")

    cells = {}
    num_scales = N.bit_length()
    for i in range(num_scales):
        span = 1 << i
        strip_w: dict = {}
        for pv in placements:
            key = (pv.h, (pv.p - 1) >> i)
            strip_w[key] = strip_w.get(key, 0) + 1
        threshold = Fraction(D) * Fraction(span, 2)
        for j in range(N >> i):
            xi = {}
            for s in (j - 1, j, j + 1):
                for pv_h in range(host.n):
                    w = strip_w.get((pv_h, s))
                    if w:
                        xi[pv_h] = xi.get(pv_h, 0) + w
            total = sum(xi.values())
            if total == 0:
                cells[(i, j)] = frozenset()
                continue
            c = max(1, _ceil_div(total, threshold))
            if c == 1:
                cells[(i, j)] = frozenset()
                continue
            sep = weighted_separator(host, td, xi, c)
            y = frozenset(separator_bag_union(td, sep))
            cells[(i, j)] = y
            # recheck the separator guarantee on this strip
            for comp in host.delete(y).components():
                cw = sum(xi.get(v, 0) for v in comp)
                if cw > threshold:
                    raise AssertionError(
                        f"strip ({i},{j}): component weight {cw} exceeds {threshold}"
                    )

    sp = StructuredSparsifier(host, n, D, cells)
    width = td.computed_width()
    bound = Fraction(18) * (width + 1) * n * num_scales / Fraction(D)
    if sp.x_size() > bound:
        raise AssertionError(f"|X| = {sp.x_size()} exceeds bound {float(bound):.1f}")
    return sp
