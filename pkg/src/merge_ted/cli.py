"""Command-line driver.

Exit codes: 0 ok, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import diagram as dg
from . import distmatrix as dmx
from . import field as fd
from . import mergetree as mt
from . import plotting
from .cost import CostModel
from .oracle import brute_force_dc
from .ted import mapping_to_json, ted


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _load_field(path):
    """Grid (text or binary) or graph, detected from the leading bytes."""
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head.startswith(b"vertices"):
        return fd.load_graph(path)
    return fd.load_grid(path, "auto")


def _as_graph(obj):
    return obj if isinstance(obj, fd.ScalarGraph) else fd.grid_to_graph(obj)


def _stab(args):
    stab_cost = getattr(args, "stab_cost", None)
    return mt.StabilizationConfig(
        epsilon_fraction=args.eps,
        add_fixed_cost=stab_cost is not None,
        fixed_cost=stab_cost if stab_cost is not None else 0.0)


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("MERGE_TED_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"MERGE_TED_THREADS={env!r} is not an integer") from None
    return 1


def _labels(paths):
    labels = []
    seen = {}
    for p in paths:
        stem = Path(p).stem
        k = seen.get(stem, 0)
        seen[stem] = k + 1
        labels.append(stem if k == 0 else f"{stem}#{k + 1}")
    return labels


def _figure_path(out):
    return str(Path(out).with_suffix(".png"))


# ---------------------------------------------------------------------------
# commands

def cmd_tree_build(args):
    obj = _load_field(args.input)
    graph = _as_graph(obj)
    tree = mt.persistence_pair(mt.build_merge_tree(graph, args.tree))
    if args.simplify is not None:
        tree = mt.simplify(tree, args.simplify)
    mt.save_tree(tree, args.out)
    print(f"nodes {len(tree)}")
    print(f"max-persistence {repr(tree.max_persistence())}")
    return 0


def cmd_dist_pair(args):
    t1 = mt.load_tree(args.tree1)
    t2 = mt.load_tree(args.tree2)
    result = ted(t1, t2, CostModel(args.cost), _stab(args))
    d1 = dg.diagram_of(result.stabilized_t1)
    d2 = dg.diagram_of(result.stabilized_t2)
    print(f"ted {repr(result.distance)}")
    print(f"wasserstein1 {repr(dg.wasserstein1(d1, d2))}")
    print(f"bottleneck {repr(dg.bottleneck(d1, d2))}")
    if result.stabilization_surcharge:
        print(f"stabilization-surcharge {repr(result.stabilization_surcharge)}")
    if args.emit_mapping:
        text = mapping_to_json(result)
        if args.out:
            Path(args.out).write_text(text + "\n")
            print(f"mapping {args.out}")
        else:
            print(text)
    return 0


def cmd_dist_matrix(args):
    if len(args.trees) < 2:
        raise _UsageError("dist matrix needs at least 2 tree files")
    trees = [mt.load_tree(p) for p in args.trees]
    dm = dmx.compute_matrix(trees, _labels(args.trees), CostModel(args.cost),
                            _stab(args), threads=_threads(args))
    dmx.save_matrix_csv(dm, args.out)
    print(f"matrix {args.out}")
    if not args.no_plot:
        fig = _figure_path(args.out)
        plotting.save_matrix_heatmap(dm, fig, title="tree edit distance")
        print(f"figure {fig}")
    return 0


def cmd_periodicity(args):
    dm = dmx.load_matrix_csv(args.matrix)
    rep = dmx.periodicity_report(dm)
    print(f"frames {dm.n}")
    print(f"best-lag {rep.best_lag if rep.significant else 'none'}")
    minima = ",".join(str(m) for m in rep.local_minima)
    print(f"local-minima {minima if minima else 'none'}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("lag,mean\n")
            for l, m in zip(rep.lags, rep.means):
                fh.write(f"{int(l)},{repr(float(m))}\n")
        print(f"profile {args.out}")
        if not args.no_plot:
            fig = _figure_path(args.out)
            plotting.save_lag_profile(rep, fig, title="lag profile")
            print(f"figure {fig}")
    return 0


def cmd_symmetry(args):
    tree = mt.load_tree(args.tree)
    subs = mt.extract_subtrees(tree, args.min_pers, args.min_scalar)
    if len(subs) < 2:
        raise ValueError(f"only {len(subs)} subtrees extracted; need at least 2")
    labels = [f"sub{t.root}" for t in subs]
    dm = dmx.compute_matrix(subs, labels, CostModel(args.cost), _stab(args),
                            threads=_threads(args))
    dmx.save_matrix_csv(dm, args.out)
    print(f"subtrees {len(subs)}")
    print(f"matrix {args.out}")
    if not args.no_plot:
        fig = _figure_path(args.out)
        plotting.save_matrix_heatmap(dm, fig, title="subtree distances")
        print(f"figure {fig}")
    return 0


def _parse_spec(text, ndims):
    parts = text.split(",")
    if len(parts) != ndims + 2:
        raise ValueError(
            f"spec {text!r}: expected {ndims} center coordinates, amplitude, sigma")
    center = tuple(float(x) for x in parts[:ndims])
    return fd.GaussianSpec(center, float(parts[ndims]), float(parts[ndims + 1]))


def cmd_gen_gaussians(args):
    specs = [_parse_spec(s, len(args.dims)) for s in args.spec]
    grid = fd.gen_gaussian_sum(args.dims, specs)
    fd.save_grid(grid, args.out, args.format)
    print(f"grid {args.out} dims {'x'.join(str(d) for d in grid.dims)}")
    return 0


def cmd_field_subsample(args):
    grid = fd.load_grid(args.input, "auto")
    if args.step is not None:
        if not args.out:
            raise _UsageError("--step needs --out")
        fd.save_grid(fd.subsample(grid, args.step), args.out, args.format)
        print(f"grid {args.out}")
        return 0
    if args.reduce is None or args.iters is None or not args.out_dir:
        raise _UsageError("schedule mode needs --reduce, --iters, and --out-dir")
    grids = fd.subsample_schedule(grid, args.reduce, args.iters)
    os.makedirs(args.out_dir, exist_ok=True)
    for k, g in enumerate(grids):
        path = os.path.join(args.out_dir, f"{args.prefix}_{k:02d}.txt")
        fd.save_grid(g, path, args.format)
        print(f"grid {path} dims {'x'.join(str(d) for d in g.dims)}")
    return 0


def cmd_field_smooth(args):
    grid = fd.load_grid(args.input, "auto")
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        cur = grid
        for k in range(args.iters + 1):
            path = os.path.join(args.out_dir, f"{args.prefix}_{k:02d}.txt")
            fd.save_grid(cur, path, args.format)
            print(f"grid {path}")
            if k < args.iters:
                cur = fd.smooth_laplacian(cur, 1)
        return 0
    if not args.out:
        raise _UsageError("field smooth needs --out or --out-dir")
    fd.save_grid(fd.smooth_laplacian(grid, args.iters), args.out, args.format)
    print(f"grid {args.out}")
    return 0


def cmd_diag_export(args):
    tree = mt.load_tree(args.tree)
    dg.save_diagram_csv(dg.diagram_of(tree), args.out)
    print(f"diagram {args.out}")
    return 0


def cmd_oracle(args):
    t1 = mt.load_tree(args.tree1)
    t2 = mt.load_tree(args.tree2)
    model = CostModel(args.cost)
    res = brute_force_dc(t1, t2, model)
    dp = ted(t1, t2, model)
    print(f"oracle {repr(res.distance)}")
    print(f"ted {repr(dp.distance)}")
    print(f"mappings {res.mappings_enumerated}")
    return 0


# ---------------------------------------------------------------------------
# wiring

def _add_cost_flags(p, eps=True):
    p.add_argument("--cost", choices=[m.value for m in CostModel], default="winf")
    if eps:
        p.add_argument("--eps", type=float, default=0.0,
                       help="stabilization epsilon as a fraction of max persistence")
        p.add_argument("--stab-cost", type=float, default=None, dest="stab_cost",
                       help="fixed surcharge added when stabilization merged saddles")


def build_parser():
    par = _Parser(prog="merge-ted",
                  description="merge trees of scalar fields and distances between them")
    sub = par.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p_tree = sub.add_parser("tree", help="merge tree construction")
    tree_sub = p_tree.add_subparsers(dest="subcommand", metavar="subcommand")
    tree_sub.required = True
    p = tree_sub.add_parser("build", help="build a merge tree from a field")
    p.add_argument("input")
    p.add_argument("--tree", choices=[mt.JOIN, mt.SPLIT], default=mt.SPLIT)
    p.add_argument("--simplify", type=float, default=None,
                   help="cancel pairs below this fraction of max persistence")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tree_build)

    p_dist = sub.add_parser("dist", help="distances between trees")
    dist_sub = p_dist.add_subparsers(dest="subcommand", metavar="subcommand")
    dist_sub.required = True
    p = dist_sub.add_parser("pair", help="compare two trees")
    p.add_argument("tree1")
    p.add_argument("tree2")
    _add_cost_flags(p)
    p.add_argument("--emit-mapping", action="store_true", dest="emit_mapping")
    p.add_argument("--out", default=None, help="mapping JSON path")
    p.set_defaults(func=cmd_dist_pair)
    p = dist_sub.add_parser("matrix", help="all-pairs distance matrix")
    p.add_argument("trees", nargs="+")
    _add_cost_flags(p)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true", dest="no_plot")
    p.set_defaults(func=cmd_dist_matrix)

    p = sub.add_parser("periodicity", help="lag profile of a distance matrix")
    p.add_argument("matrix")
    p.add_argument("--out", default=None, help="lag profile CSV path")
    p.add_argument("--no-plot", action="store_true", dest="no_plot")
    p.set_defaults(func=cmd_periodicity)

    p = sub.add_parser("symmetry", help="distance matrix between subtrees")
    p.add_argument("tree")
    p.add_argument("--min-pers", type=float, required=True, dest="min_pers")
    p.add_argument("--min-scalar", type=float, required=True, dest="min_scalar")
    _add_cost_flags(p)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true", dest="no_plot")
    p.set_defaults(func=cmd_symmetry)

    p_gen = sub.add_parser("gen", help="generate synthetic fields")
    gen_sub = p_gen.add_subparsers(dest="subcommand", metavar="subcommand")
    gen_sub.required = True
    p = gen_sub.add_parser("gaussians", help="sum of gaussians on a grid")
    p.add_argument("--dims", type=int, nargs="+", required=True)
    p.add_argument("--spec", action="append", default=[],
                   help="cx[,cy[,cz]],amplitude,sigma; repeatable")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["text", "binary"], default="text")
    p.set_defaults(func=cmd_gen_gaussians)

    p_field = sub.add_parser("field", help="grid preprocessing")
    field_sub = p_field.add_subparsers(dest="subcommand", metavar="subcommand")
    field_sub.required = True
    p = field_sub.add_parser("subsample", help="nearest-index downsampling")
    p.add_argument("input")
    p.add_argument("--step", type=int, default=None)
    p.add_argument("--reduce", type=int, default=None,
                   help="samples removed per axis per iteration")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--out-dir", default=None, dest="out_dir")
    p.add_argument("--prefix", default="sub")
    p.add_argument("--format", choices=["text", "binary"], default="text")
    p.set_defaults(func=cmd_field_subsample)
    p = field_sub.add_parser("smooth", help="laplacian smoothing")
    p.add_argument("input")
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--out-dir", default=None, dest="out_dir")
    p.add_argument("--prefix", default="smooth")
    p.add_argument("--format", choices=["text", "binary"], default="text")
    p.set_defaults(func=cmd_field_smooth)

    p_diag = sub.add_parser("diag", help="persistence diagrams")
    diag_sub = p_diag.add_subparsers(dest="subcommand", metavar="subcommand")
    diag_sub.required = True
    p = diag_sub.add_parser("export", help="diagram of a tree as CSV")
    p.add_argument("tree")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diag_export)

    # debugging helper, intentionally undocumented in the command list
    p = sub.add_parser("oracle")
    p.add_argument("tree1")
    p.add_argument("tree2")
    _add_cost_flags(p, eps=False)
    p.set_defaults(func=cmd_oracle)

    return par


def main(argv=None):
    par = build_parser()
    try:
        args = par.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
