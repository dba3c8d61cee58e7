"""Command line interface.

Subcommands:

* ``gen-data``: write one of the synthetic datasets as CSV plus a JSON
  sidecar recording the generator spec and RNG identity.
* ``identify``: run concept identification on a CSV, writing model.json
  and labels_concept.csv.
* ``cluster``: run a baseline (kmeans, gmm, kmeans-trunc, gmm-trunc),
  writing labels_<method>.csv and a model JSON.
* ``evaluate``: compute the consistency report (MI + permutation p-values,
  silhouettes, overlap) for one or more labelings.
* ``reproduce``: run a full experiment (generate, identify, all baselines,
  evaluate) over a seed list and write a summary with assertions; exits 1
  when the experiment's acceptance assertions fail.

Exit codes: 0 success, 1 failed reproduce assertions, 2 usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import experiments
from .baselines import gmm_em, kmeans, truncate_by_radius, truncate_by_responsibility
from .cmaes import CmaesConfig
from .concept_core import CqmConfig, Labeling
from .dataset import SubspaceConfig, load_csv, write_csv
from .datagen import GeneratorSpec, generate
from .errors import ConceptIdError
from .identify import identify_concepts, select_archetypes
from .metrics import consistency_report
from .util import write_artifact

CLUSTER_METHODS = ("kmeans", "gmm", "kmeans-trunc", "gmm-trunc")


def _read_subspaces(path, column_names) -> SubspaceConfig:
    return SubspaceConfig.from_json(Path(path).read_text(encoding="utf-8"), column_names)


def _cmd_gen_data(args) -> int:
    spec = GeneratorSpec(args.kind, args.n, args.seed, sigma=args.sigma if args.kind == "gaussian4d" else None)
    dataset = generate(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(dataset, out)
    sidecar = out.with_name(out.name + ".json")
    write_artifact(sidecar, {"generator": spec.to_json_dict(), "columns": list(dataset.column_names)},
                   config=spec.to_json_dict(), seed=args.seed)
    print(f"wrote {dataset.n_samples} samples to {out} (sidecar {sidecar})")
    return 0


def _cmd_identify(args) -> int:
    dataset = load_csv(args.data, standardize=args.standardize)
    sub = _read_subspaces(args.subspaces, dataset.column_names)
    cqm = CqmConfig(s=args.s, p=args.p)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    best = None
    for restart in range(args.restarts):
        strategy = CmaesConfig(args.popsize, args.generations, args.sigma0, args.seed + restart)
        log = outdir / f"progress_seed{strategy.seed}.jsonl" if args.progress_log else None
        if log is not None:
            log.unlink(missing_ok=True)
        model = identify_concepts(dataset, sub, args.n_concepts, cqm_config=cqm,
                                  cmaes_config=strategy, log_path=log)
        if best is None or model.q > best.q:
            best = model

    body = best.to_json_dict(dataset.column_names)
    body["archetypes"] = [a if a is None else int(a) for a in select_archetypes(best, dataset)]
    write_artifact(outdir / "model.json", body, config=body["config"], seed=best.seed)
    best.labeling.to_csv(outdir / "labels_concept.csv")
    print(f"q={best.q:.6f} degenerate={best.degenerate} assigned={best.labeling.n_assigned}"
          f" -> {outdir / 'model.json'}")
    return 0


def _cmd_cluster(args) -> int:
    dataset = load_csv(args.data, standardize=args.standardize)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    method = args.method

    km_needed = method in ("kmeans", "kmeans-trunc")
    result = kmeans(dataset, args.k, seed=args.seed, max_iter=args.max_iter) if km_needed else \
        gmm_em(dataset, args.k, seed=args.seed, max_iter=args.max_iter, tol=args.tol)

    if method == "kmeans":
        labels, model = result.labels, {"centers": result.centers, "inertia": result.inertia}
    elif method == "kmeans-trunc":
        if args.radius_frac is None:
            raise ConceptIdError("kmeans-trunc needs --radius-frac")
        labels = truncate_by_radius(result, dataset, args.radius_frac)
        model = {"centers": result.centers, "inertia": result.inertia, "radius_fraction": args.radius_frac}
    elif method == "gmm":
        labels, model = result.labels, {
            "weights": result.weights, "means": result.means,
            "covariances": result.covariances, "log_likelihood": result.log_likelihood,
        }
    else:  # gmm-trunc
        if (args.radius_frac is None) == (args.resp_threshold is None):
            raise ConceptIdError("gmm-trunc needs exactly one of --radius-frac or --resp-threshold")
        if args.resp_threshold is not None:
            labels = truncate_by_responsibility(result, args.resp_threshold)
            mode = {"responsibility_threshold": args.resp_threshold}
        else:
            labels = truncate_by_radius(result, dataset, args.radius_frac)
            mode = {"radius_fraction": args.radius_frac}
        model = {"weights": result.weights, "means": result.means,
                 "covariances": result.covariances, "log_likelihood": result.log_likelihood, **mode}

    tag = method.replace("-", "_")
    labels.to_csv(outdir / f"labels_{tag}.csv")
    cfg = {"method": method, "k": args.k, "seed": args.seed, "max_iter": args.max_iter}
    write_artifact(outdir / f"model_{tag}.json", {"model": model, "n_assigned": labels.n_assigned},
                   config=cfg, seed=args.seed)
    print(f"{method}: assigned {labels.n_assigned}/{labels.n_samples} -> {outdir}")
    return 0


def _cmd_evaluate(args) -> int:
    dataset = load_csv(args.data, standardize=args.standardize)
    sub = _read_subspaces(args.subspaces, dataset.column_names)
    labelings = {}
    for item in args.labels:
        if "=" not in item:
            raise ConceptIdError(f"--labels expects name=path, got {item!r}")
        name, path = item.split("=", 1)
        labelings[name] = Labeling.from_csv(path)
    report = consistency_report(dataset, sub, labelings, k=args.k, n_perm=args.n_perm,
                                seed=args.seed, jitter_seed=args.jitter_seed, alpha=args.alpha)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = {"k": args.k, "n_perm": args.n_perm, "alpha": args.alpha, "jitter_seed": args.jitter_seed}
    write_artifact(outdir / "report.json", report.to_json_dict(), config=cfg, seed=args.seed)
    with open(outdir / "report.csv", "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(report.to_csv_rows())
    print(f"evaluated {len(labelings)} labelings -> {outdir / 'report.json'}")
    return 0


def _parse_seeds(text: str) -> tuple[int, ...]:
    """Seed lists as '0..9' ranges (inclusive) or comma-separated values."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(v) for v in text.split(",") if v)


def _cmd_reproduce(args) -> int:
    cfg = experiments.experiment_config(args.experiment, args.scale)
    seeds = _parse_seeds(args.seeds) if args.seeds else experiments.default_seeds(args.scale)
    if not seeds:
        raise ConceptIdError("reproduce needs at least one seed")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    def one(seed: int):
        result = experiments.run_seed(cfg, seed)
        seed_dir = outdir / f"seed_{seed}"
        seed_dir.mkdir(parents=True, exist_ok=True)
        write_csv(result.dataset, seed_dir / "dataset.csv")
        body = result.model.to_json_dict(result.dataset.column_names)
        body["archetypes"] = [a if a is None else int(a) for a in result.archetypes]
        write_artifact(seed_dir / "model.json", body, config=body["config"], seed=seed)
        for name, labeling in result.labelings.items():
            labeling.to_csv(seed_dir / f"labels_{name}.csv")
        sub = cfg.subspace_config(result.dataset.column_names)
        report = consistency_report(result.dataset, sub, result.labelings,
                                    k=cfg.mi_k, n_perm=args.n_perm, seed=seed)
        write_artifact(seed_dir / "report.json", report.to_json_dict(),
                       config=cfg.to_json_dict(), seed=seed)
        return result

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(seed) for seed in seeds]

    summary = experiments.summarize(cfg, results)
    write_artifact(outdir / "summary.json", summary, config=cfg.to_json_dict(),
                   seed=seeds[0] if seeds else 0)
    ok = summary["assertions"]["ok"]
    print(f"experiment {args.experiment} ({args.scale}): assertions {'PASS' if ok else 'FAIL'}")
    print(json.dumps({k: v for k, v in summary["assertions"].items() if k != "per_seed"},
                     default=str, indent=2)[:2000])
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conceptid",
                                     description="Concept identification across feature subspaces")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base RNG seed")
    common.add_argument("--out", required=True, help="output file or directory")
    common.add_argument("--config", default=None, metavar="JSON",
                        help="JSON file whose keys override option defaults (explicit flags win)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads where the command supports them")

    p = sub.add_parser("gen-data", parents=[common], help="write a synthetic dataset CSV + sidecar")
    p.add_argument("kind", choices=("uniform2d", "gaussian4d", "energy_surrogate"))
    p.add_argument("--n", type=int, required=True, help="number of samples")
    p.add_argument("--sigma", type=float, default=1.0, help="per-center std for gaussian4d")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("identify", parents=[common], help="run concept identification on a CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--subspaces", required=True, help="subspace config JSON file")
    p.add_argument("--n-concepts", type=int, required=True)
    p.add_argument("--s", type=float, default=0.1, help="size-band parameter")
    p.add_argument("--p", type=float, default=0.1, help="preference-band parameter")
    p.add_argument("--popsize", type=int, default=10)
    p.add_argument("--generations", type=int, default=1000)
    p.add_argument("--sigma0", type=float, default=0.3)
    p.add_argument("--restarts", type=int, default=1, help="independent runs, best quality kept")
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--progress-log", action="store_true", help="write per-generation JSONL")
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("cluster", parents=[common], help="run a clustering baseline")
    p.add_argument("method", choices=CLUSTER_METHODS)
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--radius-frac", type=float, default=None)
    p.add_argument("--resp-threshold", type=float, default=None)
    p.add_argument("--standardize", action="store_true")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("evaluate", parents=[common], help="consistency report for labelings")
    p.add_argument("--data", required=True)
    p.add_argument("--subspaces", required=True)
    p.add_argument("--labels", nargs="+", required=True, metavar="NAME=PATH")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--n-perm", type=int, default=200)
    p.add_argument("--jitter-seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--standardize", action="store_true")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("reproduce", parents=[common], help="run a canned experiment end to end")
    p.add_argument("experiment", choices=experiments.EXPERIMENT_NAMES)
    p.add_argument("--scale", choices=experiments.SCALES, default="desk")
    p.add_argument("--seeds", default=None, help="e.g. '0..9' or '1,5,7'")
    p.add_argument("--n-perm", type=int, default=50,
                   help="permutations for the per-seed consistency reports")
    p.set_defaults(func=_cmd_reproduce)
    return parser


def _apply_config_file(args, argv) -> None:
    """Overlay values from --config JSON onto options the user left at defaults."""
    overrides = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if not isinstance(overrides, dict):
        raise ConceptIdError(f"{args.config}: config must be a JSON object")
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=", 1)[0].replace("-", "_"))
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ConceptIdError(f"{args.config}: unknown config key {key!r}")
        if dest not in explicit:
            setattr(args, dest, value)


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            _apply_config_file(args, argv)
        return args.func(args)
    except ConceptIdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
