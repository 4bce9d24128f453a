"""Command-line entry point.

Every subcommand writes machine-readable outputs (CSV/JSON, LF endings,
floats at 6 significant digits) plus a ``manifest.json`` recording the
subcommand, flags, seed, toolkit version, RNG algorithm, input digests and
stage timings.  Identical inputs, seed and version reproduce the primary
outputs byte for byte regardless of thread count; the manifest itself
carries wall-clock timings and is exempt.

Exit codes: 0 success, 2 usage error, 1 data/numeric/I-O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .boxdim import estimate_dimension
from .generators import (
    MotifSpec,
    balanced_tree,
    complete,
    cycle,
    default_motif,
    grid,
    igs_iterate,
    path,
)
from .graphs import (
    Graph,
    GraphCollection,
    graph_from_dict,
    load_graph_json,
    save_graph_json,
)
from .loss import EmbeddingBatch, GraphMeta, LossConfig, surrogate_fractal_loss
from .renorm import renormalise
from .rng import RNG_ALGORITHM
from .stats import (
    InsufficientDataError,
    collect_delta,
    gaussian_diagnostics,
    variance_scaling_check,
)
from .tu import parse_tu_dataset

DEFAULT_THRESHOLDS = (0.50, 0.80, 0.90, 0.95)


def fmt(x) -> str:
    """Canonical text form: floats at 6 significant digits, ints verbatim."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".6g")


def r2_prevalence(
    r_squared_values, thresholds=DEFAULT_THRESHOLDS
) -> list[tuple[float, int, float]]:
    """Count of graphs whose fractality R**2 strictly exceeds each
    threshold, with percentages.  Gated graphs carry R**2 = 0 and never
    pass."""
    values = list(r_squared_values)
    if not values:
        raise ValueError("empty collection")
    if list(thresholds) != sorted(thresholds):
        raise ValueError("thresholds must be sorted ascending")
    rows = []
    for t in thresholds:
        count = sum(1 for v in values if v > t)
        rows.append((float(t), count, 100.0 * count / len(values)))
    return rows


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_manifest(
    out_dir: Path,
    subcommand: str,
    args: argparse.Namespace,
    seed: int | None,
    inputs: dict[str, str],
    timings: dict[str, float],
    extra: dict | None = None,
) -> None:
    manifest = {
        "subcommand": subcommand,
        "arguments": {
            k: v for k, v in sorted(vars(args).items()) if k not in ("func",)
        },
        "seed": seed,
        "version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "inputs": inputs,
        "timings_s": {k: round(v, 6) for k, v in timings.items()},
    }
    if extra:
        manifest["outputs_meta"] = extra
    _write_text(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")


def _resolve_seed(args: argparse.Namespace) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("FRACTAL_SEED")
    return int(env) if env else 0


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _build_family_graph(args: argparse.Namespace) -> Graph:
    fam = args.family
    if fam == "path":
        return path(_need(args, "n"))
    if fam == "cycle":
        return cycle(_need(args, "n"))
    if fam == "complete":
        return complete(_need(args, "n"))
    if fam == "grid":
        return grid(_need(args, "w"), _need(args, "h"))
    if fam == "tree":
        return balanced_tree(_need(args, "branching"), _need(args, "depth"))
    if fam == "igs":
        motif = _load_motif(args)
        return igs_iterate(motif, _need(args, "k")).graph
    raise ValueError(f"unknown family {fam!r}")


def _need(args: argparse.Namespace, attr: str) -> int:
    value = getattr(args, attr, None)
    if value is None:
        raise ValueError(f"--family {args.family} requires --{attr}")
    return value


def _load_motif(args: argparse.Namespace) -> MotifSpec:
    motif_path = getattr(args, "motif", None)
    if not motif_path:
        return default_motif()
    with open(motif_path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    try:
        return MotifSpec(
            motif=graph_from_dict(obj["graph"]),
            anchor_a=int(obj["anchor_a"]),
            anchor_b=int(obj["anchor_b"]),
        )
    except KeyError as exc:
        raise ValueError(f"motif JSON must contain {exc.args[0]!r}") from exc


def _load_collection(args: argparse.Namespace) -> tuple[GraphCollection, dict[str, str]]:
    """Collection plus input digests, from --dataset / --graph / --family."""
    if getattr(args, "dataset", None):
        directory = Path(args.dataset)
        name = args.name or directory.name
        coll = parse_tu_dataset(directory, name)
        digests = {}
        for suffix in ("A", "graph_indicator", "graph_labels"):
            p = directory / f"{name}_{suffix}.txt"
            if p.is_file():
                digests[str(p)] = _sha256(p)
        return coll, digests
    if getattr(args, "graph", None):
        g = load_graph_json(args.graph)
        return (
            GraphCollection([g], name=Path(args.graph).stem),
            {str(args.graph): _sha256(Path(args.graph))},
        )
    if getattr(args, "family", None):
        if args.family == "igs" and getattr(args, "k_range", None):
            lo, hi = _parse_range(args.k_range)
            motif = _load_motif(args)
            graphs = [igs_iterate(motif, k).graph for k in range(lo, hi + 1)]
            return GraphCollection(graphs, name=f"igs-{lo}..{hi}"), {}
        return GraphCollection([_build_family_graph(args)], name=args.family), {}
    raise ValueError("provide --dataset, --graph or --family")


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        lo_i, hi_i = int(lo), int(hi)
    except ValueError as exc:
        raise ValueError(f"bad range {text!r}; expected A..B") from exc
    if hi_i < lo_i:
        raise ValueError(f"bad range {text!r}; expected A <= B")
    return lo_i, hi_i


def _thread_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gen(args: argparse.Namespace) -> int:
    g = _build_family_graph(args)
    t0 = time.monotonic()
    out_path = Path(args.out)
    if out_path.suffix == ".json":
        out_path.parent.mkdir(parents=True, exist_ok=True)
        save_graph_json(g, out_path)
    else:
        out_dir = _out_dir(args)
        save_graph_json(g, out_dir / "graph.json")
        _write_manifest(
            out_dir, "gen", args, None, {}, {"total": time.monotonic() - t0}
        )
    return 0


def _cmd_dim(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    coll, digests = _load_collection(args)
    t_load = time.monotonic() - t0

    t0 = time.monotonic()
    estimates = _thread_map(
        lambda g: estimate_dimension(g, mode=args.mode), coll.graphs, args.threads
    )
    t_estimate = time.monotonic() - t0

    out = _out_dir(args)
    header = "graph_id,n,diam,dimension,r_squared,sigma_sq,gated"
    rows = [
        ",".join(
            (
                str(i),
                str(g.n_vertices),
                fmt(est.diameter_used or 0),
                fmt(est.dimension),
                fmt(est.r_squared),
                fmt(est.residual_variance),
                fmt(est.gated),
            )
        )
        for i, (g, est) in enumerate(zip(coll.graphs, estimates))
    ]
    if args.format == "json":
        payload = [
            {
                "graph_id": i,
                "n": g.n_vertices,
                "diam": int(est.diameter_used or 0),
                "dimension": float(fmt(est.dimension)),
                "r_squared": float(fmt(est.r_squared)),
                "sigma_sq": float(fmt(est.residual_variance)),
                "gated": est.gated,
            }
            for i, (g, est) in enumerate(zip(coll.graphs, estimates))
        ]
        _write_text(out / "dim.json", json.dumps(payload, indent=2) + "\n")
    else:
        _write_text(out / "dim.csv", "\n".join([header] + rows) + "\n")
    if args.prevalence:
        prev = r2_prevalence([e.r_squared for e in estimates])
        lines = ["threshold,count,percent"] + [
            f"{fmt(t)},{c},{fmt(p)}" for t, c, p in prev
        ]
        _write_text(out / "prevalence.csv", "\n".join(lines) + "\n")
    _write_manifest(
        out,
        "dim",
        args,
        None,
        digests,
        {"load": t_load, "estimate": t_estimate},
        extra={"graphs": len(coll.graphs)},
    )
    return 0


def _cmd_cover(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    g = load_graph_json(args.graph)
    from .boxdim import box_counts

    table = box_counts(g, mode=args.mode)
    out = _out_dir(args)
    lines = ["l,n_boxes"] + [f"{l},{nb}" for l, nb, _ in table]
    _write_text(out / "cover.csv", "\n".join(lines) + "\n")
    if not table:
        print("graph is gated (diameter <= 9): no scales emitted", file=sys.stderr)
    _write_manifest(
        out,
        "cover",
        args,
        None,
        {str(args.graph): _sha256(Path(args.graph))},
        {"total": time.monotonic() - t0},
    )
    return 0


def _cmd_renorm(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    t0 = time.monotonic()
    g = load_graph_json(args.graph)
    result = renormalise(g, args.radius, seed)
    out = _out_dir(args)
    save_graph_json(result.super_graph, out / "renorm.json")
    lines = ["vertex,supervertex"] + [
        f"{v},{int(result.assignment[v])}" for v in range(g.n_vertices)
    ]
    _write_text(out / "assignment.csv", "\n".join(lines) + "\n")
    _write_manifest(
        out,
        "renorm",
        args,
        seed,
        {str(args.graph): _sha256(Path(args.graph))},
        {"total": time.monotonic() - t0},
        extra={
            "radius": args.radius,
            "supervertices": result.super_graph.n_vertices,
        },
    )
    return 0


def _cmd_augment(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    t0 = time.monotonic()
    g = load_graph_json(args.graph)
    result = renormalise(g, args.radius, seed)
    from .graphs import disjoint_union

    union = disjoint_union(g, result.super_graph)
    out = _out_dir(args)
    save_graph_json(union, out / "augment.json")
    lines = ["vertex,supervertex"] + [
        f"{v},{int(result.assignment[v])}" for v in range(g.n_vertices)
    ]
    _write_text(out / "assignment.csv", "\n".join(lines) + "\n")
    _write_manifest(
        out,
        "augment",
        args,
        seed,
        {str(args.graph): _sha256(Path(args.graph))},
        {"total": time.monotonic() - t0},
        extra={
            "original_size": g.n_vertices,
            "renorm_size": result.super_graph.n_vertices,
        },
    )
    return 0


def _load_matrix(path: str) -> np.ndarray:
    p = Path(path)
    if p.suffix == ".npy":
        return np.load(p)
    return np.loadtxt(p, delimiter=",", dtype=np.float64, ndmin=2)


def _load_meta_csv(path: str) -> list[GraphMeta]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"empty meta file {path}")
    header = [c.strip() for c in lines[0].split(",")]
    expected = ["graph_id", "diam", "dimension", "r_squared", "gated"]
    if header != expected:
        raise ValueError(f"meta header must be {','.join(expected)}")
    metas = []
    for line in lines[1:]:
        if not line.strip():
            continue
        gid, diam, dim, r2, gated = line.split(",")
        metas.append(
            GraphMeta(
                graph_id=int(gid),
                diameter=int(diam),
                dimension=float(dim),
                r_squared=float(r2),
                gated=gated.strip() in ("1", "true", "True"),
            )
        )
    return metas


def _cmd_loss(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    t0 = time.monotonic()
    z = _load_matrix(args.z)
    z_r = _load_matrix(args.zr)
    metas = _load_meta_csv(args.meta)
    batch = EmbeddingBatch(z=z, z_r=z_r)
    if len(metas) != batch.n:
        raise ValueError(f"{len(metas)} meta rows for {batch.n} embeddings")
    cfg = LossConfig(
        alpha=args.alpha,
        tau=args.tau,
        sigma=args.sigma,
        r2_threshold=args.r2_threshold,
        seed=seed,
    )
    report = surrogate_fractal_loss(batch, metas, cfg, epoch=args.epoch)
    payload = {
        "per_sample_loss": [float(fmt(x)) for x in report.per_sample_loss],
        "mean_loss": float(fmt(report.mean_loss)),
        "effective_alpha": [float(fmt(x)) for x in report.effective_alpha],
    }
    if args.audit:
        payload["perturbed_similarity"] = [
            [float(fmt(x)) for x in row] for row in report.perturbed_similarity
        ]
        payload["perturbation"] = [
            [float(fmt(x)) for x in row] for row in report.perturbation
        ]
    out = _out_dir(args)
    _write_text(out / "loss_report.json", json.dumps(payload, indent=2) + "\n")
    inputs = {
        str(args.z): _sha256(Path(args.z)),
        str(args.zr): _sha256(Path(args.zr)),
        str(args.meta): _sha256(Path(args.meta)),
    }
    _write_manifest(out, "loss", args, seed, inputs, {"total": time.monotonic() - t0})
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    t0 = time.monotonic()
    coll, digests = _load_collection(args)
    t_load = time.monotonic() - t0

    t0 = time.monotonic()
    samples = collect_delta(
        coll, r=args.radius, trials_per_graph=args.trials, seed=seed
    )
    t_collect = time.monotonic() - t0

    out = _out_dir(args)
    header = "graph_id,diam,dim_g,dim_r,delta,gated"
    rows = [
        ",".join(
            (
                str(s.graph_id),
                str(s.diameter),
                fmt(s.dim_g),
                fmt(s.dim_r),
                fmt(s.delta),
                fmt(s.gated),
            )
        )
        for s in samples
    ]
    _write_text(out / "delta_samples.csv", "\n".join([header] + rows) + "\n")

    diagnostics: dict = {"n_samples": len(samples)}
    try:
        diag = gaussian_diagnostics(samples)
        diagnostics.update(
            {
                "n": diag.n,
                "mean_delta": float(fmt(diag.mean)),
                "std_delta": float(fmt(diag.std)),
                "regression_intercept": float(fmt(diag.intercept)),
                "regression_slope": float(fmt(diag.slope)),
                "regression_r_squared": float(fmt(diag.r_squared)),
                "corr_dim_delta": float(fmt(diag.corr)),
                "corr_p_value": float(fmt(diag.corr_p_value)),
            }
        )
    except (InsufficientDataError, ValueError) as exc:
        diagnostics["diagnostics_note"] = str(exc)
    try:
        scaling = variance_scaling_check(
            samples, args.sigma, min_per_bucket=args.min_per_bucket
        )
        diagnostics["variance_buckets"] = [
            {
                "d_low": b.d_low,
                "d_high": b.d_high,
                "n": b.n,
                "empirical_var": float(fmt(b.empirical_var)),
                "kappa_sq": float(fmt(b.kappa_sq)),
                "ratio": float(fmt(b.ratio)),
            }
            for b in scaling.buckets
        ]
        diagnostics["variance_monotone_decreasing"] = scaling.monotone_decreasing
    except (InsufficientDataError, ValueError) as exc:
        diagnostics["variance_note"] = str(exc)
    _write_text(out / "diagnostics.json", json.dumps(diagnostics, indent=2) + "\n")
    _write_manifest(
        out,
        "validate",
        args,
        seed,
        digests,
        {"load": t_load, "collect": t_collect},
        extra={"graphs": len(coll.graphs), "samples": len(samples)},
    )
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    if len(sizes) < 2:
        raise ValueError("--sizes needs at least two comma-separated sizes")
    rows = []
    for n in sizes:
        g = _family_of_size(args.family, n)
        t0 = time.monotonic()
        estimate_dimension(g)
        rows.append((n, time.monotonic() - t0))
    x = np.log([n for n, _ in rows])
    y = np.log([max(t, 1e-9) for _, t in rows])
    xc = x - x.mean()
    slope = float((xc @ y) / (xc @ xc))
    out = _out_dir(args)
    lines = ["n,seconds"] + [f"{n},{fmt(t)}" for n, t in rows]
    _write_text(out / "bench.csv", "\n".join(lines) + "\n")
    _write_manifest(
        out, "bench", args, None, {}, {}, extra={"loglog_slope": float(fmt(slope))}
    )
    print(f"log-log runtime slope: {slope:.3f}")
    return 0


def _family_of_size(family: str, n: int) -> Graph:
    if family == "path":
        return path(n)
    if family == "cycle":
        return cycle(n)
    if family == "grid":
        side = max(2, int(round(n**0.5)))
        return grid(side, side)
    raise ValueError(f"bench does not support family {family!r}")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractalkit",
        description="Box dimensions, graph renormalisation and "
        "dimension-weighted contrastive losses.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p: argparse.ArgumentParser, *, seeded: bool = False) -> None:
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        if seeded:
            p.add_argument(
                "--seed", type=int, default=None, help="RNG seed (or FRACTAL_SEED)"
            )

    def add_inputs(p: argparse.ArgumentParser) -> None:
        p.add_argument("--dataset", help="TU dataset directory")
        p.add_argument("--name", help="dataset name (defaults to directory name)")
        p.add_argument("--graph", help="canonical JSON graph file")
        p.add_argument(
            "--family",
            choices=["path", "cycle", "grid", "complete", "tree", "igs"],
        )
        p.add_argument("--n", type=int)
        p.add_argument("--w", type=int)
        p.add_argument("--h", type=int)
        p.add_argument("--branching", type=int)
        p.add_argument("--depth", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--k-range", help="IGS iteration range A..B")
        p.add_argument("--motif", help="motif JSON for the IGS family")

    p = sub.add_parser("gen", help="emit a synthetic graph as canonical JSON")
    add_inputs(p)
    p.add_argument("--out", required=True, help="output file (.json) or directory")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("dim", help="per-graph box dimension table")
    add_inputs(p)
    add_common(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--prevalence", action="store_true", help="also write prevalence.csv")
    p.add_argument("--mode", choices=["original", "restricted"], default="original")
    p.set_defaults(func=_cmd_dim)

    p = sub.add_parser("cover", help="box-count table (l, N_B) for one graph")
    p.add_argument("--graph", required=True)
    add_common(p)
    p.add_argument("--mode", choices=["original", "restricted"], default="original")
    p.set_defaults(func=_cmd_cover)

    p = sub.add_parser("renorm", help="random-centre renormalisation")
    p.add_argument("--graph", required=True)
    p.add_argument("--radius", type=int, default=1)
    add_common(p, seeded=True)
    p.set_defaults(func=_cmd_renorm)

    p = sub.add_parser("augment", help="disjoint union of graph and renormalisation")
    p.add_argument("--graph", required=True)
    p.add_argument("--radius", type=int, default=1)
    add_common(p, seeded=True)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("loss", help="surrogate fractal loss on embeddings")
    p.add_argument("--z", required=True, help="anchor embeddings (.npy or .csv)")
    p.add_argument("--zr", required=True, help="renormalised-view embeddings")
    p.add_argument("--meta", required=True, help="graph_id,diam,dimension,r_squared,gated CSV")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--tau", type=float, default=0.4)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--r2-threshold", type=float, default=0.9, dest="r2_threshold")
    p.add_argument("--epoch", type=int, default=0)
    p.add_argument("--audit", action="store_true", help="include S* and G in the report")
    add_common(p, seeded=True)
    p.set_defaults(func=_cmd_loss)

    p = sub.add_parser("validate", help="dimension-gap statistics over a collection")
    add_inputs(p)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--min-per-bucket", type=int, default=30, dest="min_per_bucket")
    add_common(p, seeded=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bench", help="runtime scaling of estimate_dimension")
    p.add_argument("--family", default="path", choices=["path", "cycle", "grid"])
    p.add_argument("--sizes", required=True, help="comma-separated vertex counts")
    add_common(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
