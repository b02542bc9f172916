"""Command-line pipeline: train, discover, explain, evaluate, demo.

All file I/O lives here: model JSON, attribute JSON, explanation manifests,
PGM/PPM images, and SIC CSVs. Every command is deterministic given
(config, seed); manifests embed the config snapshot for exact replay.
Exit codes: 0 success, 2 config error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .attributes import AttributeVector, sefa_directions, select_attribute
from .config import ConfigError, load_config
from .metrics import compare_methods
from .models import accuracy, cross_entropy_loss, load_model, save_model, train_classifier
from .netpbm import write_pgm, write_ppm
from .saliency import (
    contrastive_saliency,
    contrastive_saliency_raw,
    integrated_gradients,
    mean_threshold,
    normalize_max,
    plain_gradient,
    smoothgrad,
)
from .synthetic import make_lesion_dataset, make_planted_generator
from .traversal import build_path, retrieve_contrastives

# Sub-seeds derived from the run seed, one stream per pipeline stage.
DATASET_SEED = 0
GENERATOR_SEED = 1
TRAIN_SEED = 2
DISCOVER_SEED = 3
EVAL_SEED = 4
SMOOTHGRAD_SEED = 5
DEMO_QUERY_SEED = 6

# Fixture-world scale: attribute projection of synthesized abnormal queries.
QUERY_PROJECTION_RANGE = (16.0, 22.0)
PLANTED_LESION_AXIS = 0

METHOD_NAMES = ("contrastive", "integrated_gradients", "smoothgrad", "gradient")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n")


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["paths"]["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _model_path(cfg: dict, key: str) -> Path:
    p = Path(cfg["paths"][key])
    return p if p.is_absolute() else Path(cfg["paths"]["out_dir"]) / p


def _load_models(cfg: dict):
    generator = load_model(_model_path(cfg, "generator"))
    classifier = load_model(_model_path(cfg, "classifier"))
    return generator, classifier


def _load_attribute(cfg: dict) -> AttributeVector:
    doc = json.loads(_model_path(cfg, "attributes").read_text())
    return AttributeVector(
        np.array(doc["selected"]["direction"], dtype=np.float64),
        rank=doc["selected"]["rank"],
        eigenvalue=doc["selected"]["eigenvalue"],
    )


def cmd_train(cfg: dict) -> int:
    geom, tr = cfg["geometry"], cfg["training"]
    dataset = make_lesion_dataset(tr["n_samples"], geom["height"], geom["width"],
                                  seed=cfg["seed"] + DATASET_SEED)
    n_holdout = max(1, round(tr["holdout_fraction"] * len(dataset)))
    train_set = dataset.subset(np.arange(0, len(dataset) - n_holdout))
    holdout = dataset.subset(np.arange(len(dataset) - n_holdout, len(dataset)))

    classifier = train_classifier(train_set, epochs=tr["epochs"],
                                  learning_rate=tr["learning_rate"],
                                  seed=cfg["seed"] + TRAIN_SEED,
                                  architecture=tr["architecture"],
                                  hidden=tr["hidden"], batch_size=tr["batch_size"])
    generator, _ = make_planted_generator(geom["latent_dim"], geom["height"], geom["width"],
                                          lesion_axis=PLANTED_LESION_AXIS,
                                          seed=cfg["seed"] + GENERATOR_SEED)
    _out_dir(cfg)
    save_model(generator, _model_path(cfg, "generator"))
    save_model(classifier, _model_path(cfg, "classifier"))
    held_out_acc = accuracy(classifier, holdout)
    print(f"trained {tr['architecture']} classifier on {len(train_set)} images; "
          f"final training loss {cross_entropy_loss(classifier, train_set):.4f}; "
          f"held-out accuracy {held_out_acc:.3f}")
    print(f"wrote {_model_path(cfg, 'generator')} and {_model_path(cfg, 'classifier')}")
    return 0


def cmd_discover(cfg: dict, n_directions: int | None = None, samples: int = 200) -> int:
    generator, classifier = _load_models(cfg)
    n = n_directions if n_directions is not None else generator.latent_dim
    directions = sefa_directions(generator.first_layer_weights(), n)

    # Stand-in for expert-picked seed images: sample broadly in latent space,
    # call the classifier on the generated images, and contrast the most
    # abnormal latents against the most normal ones.
    rng = np.random.default_rng(cfg["seed"] + DISCOVER_SEED)
    latents = rng.normal(0.0, 8.0, (samples, generator.latent_dim))
    scores = np.array([classifier.classify(generator.generate(w)) for w in latents])
    order = np.argsort(scores, kind="stable")
    n_extreme = max(1, samples // 10)
    seed_latents = latents[order[-n_extreme:]]
    background_latents = latents[order[:n_extreme]]
    chosen = select_attribute(directions, seed_latents, background_latents)

    doc = {
        "directions": [
            {"rank": d.rank, "eigenvalue": d.eigenvalue,
             "direction": d.direction, "chosen": d.rank == chosen.rank}
            for d in directions
        ],
        "selected": {"rank": chosen.rank, "eigenvalue": chosen.eigenvalue,
                     "direction": chosen.direction},
    }
    _out_dir(cfg)
    _write_json(_model_path(cfg, "attributes"), doc)
    print(f"discovered {n} attribute directions; selected rank {chosen.rank} "
          f"(eigenvalue {chosen.eigenvalue:.4g})")
    print(f"wrote {_model_path(cfg, 'attributes')}")
    return 0


def _saliency_bundle(cfg: dict, classifier, path, query_index_seed: int):
    """The four saliency maps for one traversal path, in METHOD_NAMES order."""
    sal = cfg["saliency"]
    pair = retrieve_contrastives(path)
    query = path.query_image
    contrastive = contrastive_saliency(classifier, path,
                                       normalize_by_alpha=sal["diff_normalize_by_alpha"])
    baseline = path.images[pair.counterfactual] if pair.counterfactual is not None \
        else np.zeros_like(query)
    ig = integrated_gradients(classifier, query, baseline, steps=sal["ig_steps"])
    sg = smoothgrad(classifier, query, noise_sd=sal["smoothgrad_noise_sd"],
                    samples=sal["smoothgrad_samples"],
                    seed=cfg["seed"] + SMOOTHGRAD_SEED + query_index_seed)
    grad = plain_gradient(classifier, query)
    return {"contrastive": contrastive, "integrated_gradients": ig,
            "smoothgrad": sg, "gradient": grad}, pair


def _composite(query: np.ndarray, saliency: np.ndarray) -> np.ndarray:
    """Query in gray with max-normalized saliency blended into the red channel."""
    s = normalize_max(saliency)
    rgb = np.stack([np.maximum(query, s),
                    query * (1.0 - 0.8 * s),
                    query * (1.0 - 0.8 * s)], axis=-1)
    return np.clip(rgb, 0.0, 1.0)


def cmd_explain(cfg: dict, query_file: str) -> int:
    generator, classifier = _load_models(cfg)
    attribute = _load_attribute(cfg)
    qdoc = json.loads(Path(query_file).read_text())
    query_id = str(qdoc.get("id", Path(query_file).stem))
    latent = np.array(qdoc["latent"], dtype=np.float64)
    if latent.shape != (generator.latent_dim,):
        raise ValueError(f"query latent has dim {latent.shape}, "
                         f"generator expects ({generator.latent_dim},)")

    trav, sal = cfg["traversal"], cfg["saliency"]
    path = build_path(generator, classifier, latent, attribute,
                      trav["alpha_min"], trav["alpha_max"], trav["k"])
    pair = retrieve_contrastives(path)
    raw = contrastive_saliency_raw(classifier, path,
                                   normalize_by_alpha=sal["diff_normalize_by_alpha"])
    smap = mean_threshold(raw)

    case_dir = _out_dir(cfg) / "explanations" / query_id
    case_dir.mkdir(parents=True, exist_ok=True)
    point_files = []
    for j in range(len(path)):
        name = f"path_{j:03d}.pgm"
        write_pgm(case_dir / name, path.images[j])
        point_files.append(name)
    write_pgm(case_dir / "saliency_contrastive.pgm", normalize_max(smap))
    write_ppm(case_dir / "composite.ppm", _composite(path.query_image, smap))

    p = float(path.scores[path.query_index])
    label = "abnormal" if p > 0.5 else "normal"
    lines = [f"query {query_id}: classified {label} with probability {p:.3f}; "
             f"salient regions highlighted in saliency_contrastive.pgm"]
    if pair.semifactual is not None:
        lines.append(f"prediction holds even at alpha={float(path.alphas[pair.semifactual]):.6g} "
                     f"(score {float(path.scores[pair.semifactual]):.3f}) -- semifactual "
                     f"{point_files[pair.semifactual]}")
    else:
        lines.append("no semifactual found on path")
    if pair.counterfactual is not None:
        lines.append(f"prediction flips at alpha={float(path.alphas[pair.counterfactual]):.6g} "
                     f"(score {float(path.scores[pair.counterfactual]):.3f}) -- counterfactual "
                     f"{point_files[pair.counterfactual]}")
    else:
        lines.append("no counterfactual found on path")

    manifest = {
        "query_id": query_id,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "tool_version": __version__,
        "config": cfg,
        "attribute": {"direction": attribute.direction, "rank": attribute.rank,
                      "eigenvalue": attribute.eigenvalue},
        "query_latent": latent,
        "query_index": path.query_index,
        "points": [
            {"alpha": float(path.alphas[j]), "score": float(path.scores[j]),
             "image": point_files[j]}
            for j in range(len(path))
        ],
        "counterfactual": pair.counterfactual,
        "semifactual": pair.semifactual,
        "saliency": {"contrastive": "saliency_contrastive.pgm",
                     "composite": "composite.ppm"},
        "explanation": lines,
    }
    if sal["dump_raw"]:
        manifest["saliency_raw"] = raw
    _write_json(case_dir / "manifest.json", manifest)
    print("\n".join(lines))
    print(f"wrote {case_dir / 'manifest.json'}")
    return 0


def _synth_queries(cfg: dict, generator, attribute, n: int, seed: int) -> list[dict]:
    """Abnormal fixture queries: modest background plus a strong attribute component."""
    rng = np.random.default_rng(seed)
    lo, hi = QUERY_PROJECTION_RANGE
    queries = []
    for i in range(n):
        latent = rng.normal(0.0, 1.0, generator.latent_dim) \
            + rng.uniform(lo, hi) * attribute.direction
        queries.append({"id": f"q{i:03d}", "latent": latent})
    return queries


def cmd_evaluate(cfg: dict, queries_file: str | None = None) -> int:
    generator, classifier = _load_models(cfg)
    attribute = _load_attribute(cfg)
    if queries_file is not None:
        qdocs = json.loads(Path(queries_file).read_text())
        queries = [{"id": str(q.get("id", f"q{i:03d}")),
                    "latent": np.array(q["latent"], dtype=np.float64)}
                   for i, q in enumerate(qdocs)]
    else:
        queries = _synth_queries(cfg, generator, attribute,
                                 cfg["evaluate"]["n_queries"], cfg["seed"] + EVAL_SEED)
    if not queries:
        raise ValueError("query set is empty")

    trav, met = cfg["traversal"], cfg["metrics"]
    images = []
    maps: dict[str, list[np.ndarray]] = {name: [] for name in METHOD_NAMES}
    for qi, q in enumerate(queries):
        path = build_path(generator, classifier, q["latent"], attribute,
                          trav["alpha_min"], trav["alpha_max"], trav["k"])
        bundle, _ = _saliency_bundle(cfg, classifier, path, qi)
        images.append(path.query_image)
        for name in METHOD_NAMES:
            maps[name].append(bundle[name])

    comparison = compare_methods(classifier, images, maps,
                                 fractions=met["fractions"], blur_sigma=met["blur_sigma"])
    out = _out_dir(cfg)
    with (out / "sic_curves.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["query", "method", "fraction", "normalized_softmax"])
        for qi, name, frac, score in comparison.curve_rows():
            writer.writerow([queries[qi]["id"], name, repr(frac), repr(score)])
    with (out / "sic_median_curves.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "fraction", "median_normalized_softmax"])
        for name in METHOD_NAMES:
            median = comparison.median_curve(name)
            for frac, score in zip(comparison.fractions, median):
                writer.writerow([name, repr(float(frac)), repr(float(score))])
    with (out / "sic_summary.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "median_auc"])
        for name, med in comparison.summary_rows():
            writer.writerow([name, repr(med)])

    for name, med in comparison.summary_rows():
        print(f"{name}: median SIC AUC {med:.4f} over {len(queries)} queries")
    print(f"wrote {out / 'sic_curves.csv'}, {out / 'sic_median_curves.csv'}, "
          f"{out / 'sic_summary.csv'}")
    return 0


def cmd_demo(cfg: dict) -> int:
    cmd_train(cfg)
    cmd_discover(cfg)
    generator, _ = _load_models(cfg)
    attribute = _load_attribute(cfg)
    demo_query = _synth_queries(cfg, generator, attribute, 1,
                                cfg["seed"] + DEMO_QUERY_SEED)[0]
    demo_query["id"] = "demo_query"
    queries_dir = _out_dir(cfg) / "queries"
    queries_dir.mkdir(parents=True, exist_ok=True)
    query_file = queries_dir / "demo_query.json"
    _write_json(query_file, demo_query)
    cmd_explain(cfg, str(query_file))
    cmd_evaluate(cfg)
    print(f"demo complete under {_out_dir(cfg)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON run configuration")
    common.add_argument("--seed", type=int, metavar="N", help="override the config seed")
    common.add_argument("--out", metavar="DIR", help="override the output directory")

    parser = argparse.ArgumentParser(
        prog="cfpath",
        description="Contrastive explanations along latent attribute paths",
    )
    parser.add_argument("--version", action="version", version=f"cfpath {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("train", parents=[common],
                   help="build the fixture dataset, train the classifier, write models")
    p_disc = sub.add_parser("discover", parents=[common],
                            help="factor the generator and select the attribute direction")
    p_disc.add_argument("--n-directions", type=int, default=None,
                        help="directions to keep (default: latent dim)")
    p_disc.add_argument("--samples", type=int, default=200,
                        help="latents sampled for the seed/background contrast")
    p_exp = sub.add_parser("explain", parents=[common],
                           help="explain one query latent: path, contrastives, saliency")
    p_exp.add_argument("query", metavar="QUERY_JSON", help="file with {id, latent}")
    p_exp.add_argument("--dump-raw", action="store_true",
                       help="embed the raw pre-threshold saliency in the manifest")
    p_exp.add_argument("--diff-normalize-by-alpha", action="store_true",
                       help="divide each path difference by |alpha|")
    p_eval = sub.add_parser("evaluate", parents=[common],
                            help="SIC-compare saliency methods over a query set")
    p_eval.add_argument("--queries", metavar="FILE", default=None,
                        help="JSON list of {id, latent} (default: synthesized fixtures)")
    sub.add_parser("demo", parents=[common],
                   help="train, discover, explain, and evaluate end to end")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed, out_dir=args.out)
        if args.command == "explain":
            if args.dump_raw:
                cfg["saliency"]["dump_raw"] = True
            if args.diff_normalize_by_alpha:
                cfg["saliency"]["diff_normalize_by_alpha"] = True
            return cmd_explain(cfg, args.query)
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "discover":
            return cmd_discover(cfg, args.n_directions, args.samples)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.queries)
        if args.command == "demo":
            return cmd_demo(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"cfpath: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures map to exit 1
        print(f"cfpath: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
