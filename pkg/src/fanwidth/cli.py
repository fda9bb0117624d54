"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error.  All output
files are canonical text written atomically, so reruns with identical inputs
and seeds are byte-identical.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import formats
from .embedding import build_embedding
from .errors import InputError, VerificationFailure
from .graphs import bfs_layering
from .oracles import exact_bandwidth, exhaustive_local_density
from .pipeline import (
    blowup_to_bandwidth,
    default_blowup_factor,
    fan_certificate,
    gk_reduce,
    kplanar_reduce,
    planar_pipeline,
    product_pipeline,
    verify_certificate,
)
from .randomness import stream
from .sparsify import BakerConfig, baker_sparsify, product_sparsify
from .starmetric import StarMetric, metric_local_density, verify_metric_axioms
from .treedec import minfill_decomposition, ttree_complete
from .volumes import FiniteMetric, euclidean_volume, reciprocal_sum_check, tree_volume


@dataclass
class RunConfig:
    seed: int
    D: object
    k: int | None
    a: float
    restarts: int
    dims_cap: int | None
    mode: str

    def validate(self):
        if self.mode not in ("certified", "exploratory"):
            raise InputError(f"unknown mode {self.mode!r}")
        if self.mode == "certified" and self.dims_cap is not None:
            raise InputError("certified mode forbids --dims-cap")
        if self.restarts < 1:
            raise InputError("--restarts must be at least 1")
        if self.a <= 0:
            raise InputError("--a must be positive")

    def params(self) -> dict:
        out = {
            "D": str(self.D),
            "a": repr(self.a),
            "restarts": str(self.restarts),
            "mode": self.mode,
        }
        if self.k is not None:
            out["k"] = str(self.k)
        if self.dims_cap is not None:
            out["dims_cap"] = str(self.dims_cap)
        return out


def _parse_density(raw: str):
    if "/" in raw:
        return Fraction(raw)
    if "." in raw or "e" in raw.lower():
        return float(raw)
    return int(raw)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")


def _config(args) -> RunConfig:
    cfg = RunConfig(
        seed=args.seed,
        D=_parse_density(args.D) if args.D is not None else None,
        k=args.k,
        a=args.a,
        restarts=args.restarts,
        dims_cap=args.dims_cap,
        mode=args.mode,
    )
    cfg.validate()
    return cfg


def _load_product(path: str):
    host, td, rows, placements, g = formats.parse_product_input(_read(path))
    if td is None:
        td = minfill_decomposition(host)
    return host, td, rows, placements, g


def _report_lines(pairs) -> str:
    return "\n".join(f"{key} {value}" for key, value in pairs) + "\n"


# -- subcommands -----------------------------------------------------------------


def cmd_sparsify(args) -> int:
    cfg = _config(args)
    if args.graph:
        g = formats.parse_graph(_read(args.graph))
        layering = bfs_layering(g, min(g.vertices()))
        baker = baker_sparsify(g, BakerConfig(args.t, cfg.D, layering))
        gp = g.delete(baker.x)
        pairs = [
            ("kind", "baker"),
            ("n", g.num_vertices),
            ("m", g.num_edges),
            ("D", cfg.D),
            ("x_size", len(baker.x)),
            ("x_bound", baker.size_bound),
            ("scales", baker.num_scales),
            ("w_eff", baker.w_eff),
        ]
        if gp.num_vertices and gp.num_vertices <= 5000:
            density = exhaustive_local_density(gp)
            pairs.append(("density_after", formats.format_density(density)))
            pairs.append(("density_le_D", "yes" if density <= cfg.D else "no"))
        formats.write_atomic(args.out, formats.serialize_vertex_set(baker.x))
        formats.write_atomic(args.out + ".report", _report_lines(pairs))
    else:
        host, td, rows, placements, g = _load_product(args.product)
        completed = ttree_complete(host, td)
        sp = product_sparsify(completed, td, placements, cfg.D, rows=None)
        removed = sorted(v for v in g.vertices() if sp.in_x(placements[v]))
        gp = g.delete(removed)
        pairs = [
            ("kind", "product"),
            ("n", g.num_vertices),
            ("host_width", td.width),
            ("D", cfg.D),
            ("x_cylinder_size", sp.x_size()),
            ("removed_g_size", len(removed)),
            ("removed_g", " ".join(str(v) for v in removed)),
        ]
        if gp.num_vertices and gp.num_vertices <= 5000:
            density = exhaustive_local_density(gp)
            pairs.append(("density_after", formats.format_density(density)))
            pairs.append(("density_le_D", "yes" if density <= cfg.D else "no"))
        formats.write_atomic(args.out, sp.to_text())
        formats.write_atomic(args.out + ".report", _report_lines(pairs))
    return 0


def cmd_embed(args) -> int:
    cfg = _config(args)
    host, td, rows, placements, g = _load_product(args.product)
    completed = ttree_complete(host, td)
    sp = product_sparsify(completed, td, placements, cfg.D)
    ids = [v for v in g.vertices() if not sp.in_x(placements[v])]
    if not ids:
        raise InputError("sparsifier removed every vertex; nothing to embed")
    pvs = [placements[v] for v in ids]
    sm = StarMetric(sp, pvs)
    k = cfg.k if cfg.k is not None else max(2, math.ceil(math.log2(max(2, len(ids)))))
    emb = build_embedding(ids, pvs, sm, k, cfg.a, cfg.seed, cfg.dims_cap)
    formats.write_atomic(args.out, formats.serialize_embedding(emb))
    return 0


def _run_pipeline(args, cfg: RunConfig):
    if args.graph:
        g = formats.parse_graph(_read(args.graph))
        result = planar_pipeline(g, cfg.D, cfg.seed, k=cfg.k, a=cfg.a,
                                 restarts=cfg.restarts, dims_cap=cfg.dims_cap)
    else:
        host, td, rows, placements, g = _load_product(args.product)
        result = product_pipeline(host, td, g, placements, cfg.D, k=cfg.k,
                                  a=cfg.a, seed=cfg.seed, restarts=cfg.restarts,
                                  dims_cap=cfg.dims_cap)
    return g, result


def cmd_order(args) -> int:
    cfg = _config(args)
    g, result = _run_pipeline(args, cfg)
    pairs = [
        ("ordering", " ".join(str(v) for v in result.ordering)),
        ("bandwidth", result.bandwidth),
        ("bandwidth_median", result.bandwidth_median),
        ("x", " ".join(str(v) for v in sorted(result.x))),
    ]
    formats.write_atomic(args.out, _report_lines(pairs))
    return 0


def cmd_certify(args) -> int:
    cfg = _config(args)
    g, result = _run_pipeline(args, cfg)
    b = args.b if args.b is not None else default_blowup_factor(result)
    cert = fan_certificate(g, result.x, result.ordering, b, seed=cfg.seed,
                           params=cfg.params())
    violations = verify_certificate(g, cert)
    if violations:
        raise VerificationFailure(violations[0])
    formats.write_atomic(args.out, formats.serialize_certificate(cert))
    return 0


def cmd_verify(args) -> int:
    cert = formats.parse_certificate(_read(args.cert))
    if args.graph:
        g = formats.parse_graph(_read(args.graph))
    else:
        _, _, _, _, g = _load_product(args.product)
    violations = verify_certificate(g, cert)
    if violations:
        for line in violations:
            print(line, file=sys.stderr)
        return 1
    x, ordering, bw = blowup_to_bandwidth(g, cert)
    print(f"ok: round-trip width {bw} <= 2b-1 = {2 * cert.b - 1}")
    return 0


def cmd_reduce_kplanar(args) -> int:
    cfg = _config(args)
    dg = formats.parse_drawing(_read(args.drawing))
    result = kplanar_reduce(dg, args.kk, cfg.D, cfg.seed, a=cfg.a,
                            restarts=cfg.restarts, dims_cap=cfg.dims_cap)
    b = args.b if args.b is not None else default_blowup_factor(result)
    cert = fan_certificate(dg.graph, result.x, result.ordering, b,
                           seed=cfg.seed, params=cfg.params())
    violations = verify_certificate(dg.graph, cert)
    if violations:
        raise VerificationFailure(violations[0])
    formats.write_atomic(args.out, formats.serialize_certificate(cert))
    return 0


def cmd_reduce_gk(args) -> int:
    cfg = _config(args)
    dg = formats.parse_drawing(_read(args.drawing))
    planarizing = None
    if args.planarizing:
        planarizing = formats.parse_vertex_set(_read(args.planarizing))
    result = gk_reduce(dg, args.genus, args.kk, cfg.D, cfg.seed,
                       planarizing_set=planarizing, a=cfg.a,
                       restarts=cfg.restarts, dims_cap=cfg.dims_cap)
    b = args.b if args.b is not None else default_blowup_factor(result)
    cert = fan_certificate(dg.graph, result.x, result.ordering, b,
                           seed=cfg.seed, params=cfg.params())
    violations = verify_certificate(dg.graph, cert)
    if violations:
        raise VerificationFailure(violations[0])
    formats.write_atomic(args.out, formats.serialize_certificate(cert))
    return 0


def cmd_oracle(args) -> int:
    lines = []
    if args.what in ("bandwidth", "density"):
        if not args.graph:
            raise InputError(f"oracle {args.what} needs --graph")
        g = formats.parse_graph(_read(args.graph))
        if args.what == "bandwidth":
            lines.append(f"exact_bandwidth {exact_bandwidth(g)}")
        else:
            lines.append(f"exhaustive_local_density {exhaustive_local_density(g)}")
    elif args.what == "metric-axioms":
        if not args.product:
            raise InputError("oracle metric-axioms needs --product")
        if args.D is None:
            raise InputError("oracle metric-axioms needs --D")
        host, td, rows, placements, g = _load_product(args.product)
        completed = ttree_complete(host, td)
        sp = product_sparsify(completed, td, placements, _parse_density(args.D))
        pvs = [placements[v] for v in g.vertices() if not sp.in_x(placements[v])]
        if not pvs:
            raise InputError("sparsifier removed every vertex; no metric to check")
        sm = StarMetric(sp, pvs)
        mode = "exhaustive" if len(pvs) <= 150 else "sampled"
        rep = verify_metric_axioms(sm, mode=mode, seed=args.seed)
        lines.append(f"points {rep.points}")
        lines.append(f"mode {mode}")
        lines.append(f"pairs_checked {rep.pairs_checked}")
        lines.append(f"triples_checked {rep.triples_checked}")
        lines.append(f"violations {len(rep.violations)}")
        lines.extend(rep.violations)
        density = metric_local_density(pvs, lambda u, v: sm.d_star(u, v))
        lines.append(f"detour_metric_density {formats.format_density(density)}")
        if rep.violations:
            text = "\n".join(lines) + "\n"
            if args.out:
                formats.write_atomic(args.out, text)
            sys.stdout.write(text)
            raise VerificationFailure(rep.violations[0])
    elif args.what == "volume-sandwich":
        rng = stream(args.seed, "oracle/volume")
        bad = 0
        for _ in range(args.trials):
            k = int(rng.integers(2, 5))
            dim = int(rng.integers(k - 1, 7))
            pts = rng.random((k, dim)) * 10.0
            d = [[float(np.linalg.norm(pts[i] - pts[j])) for j in range(k)]
                 for i in range(k)]
            tvol = tree_volume(FiniteMetric(d))
            if euclidean_volume(pts) > tvol / math.factorial(k - 1) * (1 + 1e-9):
                bad += 1
        lines.append(f"volume_sandwich_trials {args.trials}")
        lines.append(f"violations {bad}")
    elif args.what == "reciprocal":
        rng = stream(args.seed, "oracle/reciprocal")
        worst = None
        for _ in range(args.trials):
            n = int(rng.integers(3, 9))
            pts = rng.random((n, 2)) * 4.0
            d = [[float(np.linalg.norm(pts[i] - pts[j])) for j in range(n)]
                 for i in range(n)]
            m = FiniteMetric(d)
            dens = metric_local_density(list(range(n)), d)
            k = int(rng.integers(2, 5))
            lhs, rhs, ok = reciprocal_sum_check(m, dens, min(k, n))
            margin = float(rhs) - float(lhs)
            if not ok:
                raise VerificationFailure(
                    f"reciprocal sum exceeded its bound: {lhs} > {rhs}"
                )
            if worst is None or margin < worst:
                worst = margin
        lines.append(f"reciprocal_trials {args.trials}")
        lines.append(f"worst_margin {worst!r}")
    else:
        raise InputError(f"unknown oracle {args.what!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        formats.write_atomic(args.out, text)
    sys.stdout.write(text)
    return 0


# -- parser -----------------------------------------------------------------------


def _add_common(sub, need_d=True):
    sub.add_argument("--seed", type=int, default=0)
    if need_d:
        sub.add_argument("--D", type=str, default=None, required=True)
    else:
        sub.add_argument("--D", type=str, default=None)
    sub.add_argument("--k", type=int, default=None)
    sub.add_argument("--a", type=float, default=193.0)
    sub.add_argument("--restarts", type=int, default=5)
    sub.add_argument("--dims-cap", dest="dims_cap", type=int, default=None)
    sub.add_argument("--mode", choices=("certified", "exploratory"),
                     default="certified")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fanwidth",
        description="Sparsify, order, and certify graphs into fan blowups.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("sparsify", help="compute a sparsifying vertex set")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph")
    group.add_argument("--product")
    sp.add_argument("--t", type=int, default=3)
    sp.add_argument("--out", required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_sparsify)

    em = subs.add_parser("embed", help="dump embedding coordinates")
    em.add_argument("--product", required=True)
    em.add_argument("--out", required=True)
    _add_common(em)
    em.set_defaults(func=cmd_embed)

    od = subs.add_parser("order", help="compute a low-bandwidth ordering")
    group = od.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph")
    group.add_argument("--product")
    od.add_argument("--out", required=True)
    _add_common(od)
    od.set_defaults(func=cmd_order)

    ct = subs.add_parser("certify", help="produce a fan-blowup certificate")
    group = ct.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph")
    group.add_argument("--product")
    ct.add_argument("--b", type=int, default=None)
    ct.add_argument("--out", required=True)
    _add_common(ct)
    ct.set_defaults(func=cmd_certify)

    vf = subs.add_parser("verify", help="verify a certificate")
    group = vf.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph")
    group.add_argument("--product")
    vf.add_argument("--cert", required=True)
    vf.set_defaults(func=cmd_verify)

    rk = subs.add_parser("reduce-kplanar", help="reduce a k-planar drawing")
    rk.add_argument("--drawing", required=True)
    rk.add_argument("--kk", "--crossings-per-edge", dest="kk", type=int,
                    required=True)
    rk.add_argument("--b", type=int, default=None)
    rk.add_argument("--out", required=True)
    _add_common(rk)
    rk.set_defaults(func=cmd_reduce_kplanar)

    rg = subs.add_parser("reduce-gk", help="reduce a genus-g drawing")
    rg.add_argument("--drawing", required=True)
    rg.add_argument("--genus", type=int, required=True)
    rg.add_argument("--kk", "--crossings-per-edge", dest="kk", type=int,
                    required=True)
    rg.add_argument("--planarizing", default=None)
    rg.add_argument("--b", type=int, default=None)
    rg.add_argument("--out", required=True)
    _add_common(rg)
    rg.set_defaults(func=cmd_reduce_gk)

    orc = subs.add_parser("oracle", help="run brute-force oracles")
    orc.add_argument("--what", required=True,
                     choices=("bandwidth", "density", "metric-axioms",
                              "volume-sandwich", "reciprocal"))
    orc.add_argument("--graph")
    orc.add_argument("--product")
    orc.add_argument("--D", type=str, default=None)
    orc.add_argument("--trials", type=int, default=100)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--out", default=None)
    orc.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
