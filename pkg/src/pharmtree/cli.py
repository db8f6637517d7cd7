"""Command-line surface.

Subcommands map one-to-one onto the library workflows: datagen, train,
generate, expand, optimize, neighbors, eval, dock. Every subcommand accepts
--seed / --config / --catalog / --templates / --checkpoint / --json where
meaningful. Exit codes: 0 success, 1 runtime error, 2 usage error, 3 missing
or failing external tool.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .apps import (
    GaConfig,
    GenerationConfig,
    InferenceSession,
    Scorer,
    generate,
    hit_expand,
    nearest_blocks,
    optimize,
)
from .chem.api import canonicalize, extract_pharmacophores, gen_conformer
from .chem.props import logp, qed
from .data import catalog_path, templates_path
from .errors import ExternalToolMissing, ToolFailure
from .evaluation import DockingJob, dock, property_table, random_baseline, similarity_report
from .model.checkpoint import load_checkpoint, save_checkpoint
from .synthesis.catalog import load_catalog, load_templates
from .synthesis.dataset import make_dataset, read_triples, write_triples
from .synthesis.tree import SyntheticTree, sample_tree
from .training import TrainConfig, train, write_metrics_csv

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_TOOL = 3

_OBJECTIVES = {
    "neg_logp": Scorer("neg_logp", lambda m: -logp(m.graph)),
    "qed": Scorer("qed", lambda m: qed(m.graph)),
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", type=Path, help="JSON file of config overrides")
    p.add_argument("--catalog", type=Path, default=None, help="building-block TSV")
    p.add_argument("--templates", type=Path, default=None, help="reaction-template TSV")
    p.add_argument("--checkpoint", type=Path, default=None)
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _load_overrides(path: Path | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text())


def _load_assets(args):
    catalog = load_catalog(args.catalog or catalog_path())
    templates = load_templates(args.templates or templates_path())
    return catalog, templates


def _session(args, catalog, templates) -> InferenceSession:
    if args.checkpoint is None:
        raise ValueError("--checkpoint is required for this subcommand")
    return InferenceSession.open(load_checkpoint(args.checkpoint), catalog, templates)


def _read_smiles_file(path: Path) -> list[str]:
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line.split()[0])
    return out


def _emit_tree(tree: SyntheticTree, as_json: bool) -> None:
    if as_json:
        print(json.dumps(tree.to_json(), sort_keys=True, separators=(",", ":")))
    else:
        print(tree.final)
        for i, s in enumerate(tree.steps):
            rxn = "-" if s.reaction is None else str(s.reaction)
            blk = "-" if s.block is None else str(s.block)
            print(f"  step {i}: block {blk} reaction {rxn} -> {tree.products[i]}")


def _cmd_datagen(args) -> int:
    catalog, templates = _load_assets(args)
    triples = make_dataset(catalog, templates, args.n, args.max_depth, args.seed)
    count = write_triples(triples, args.out)
    print(f"wrote {count} triples to {args.out}")
    return EXIT_OK


def _cmd_train(args) -> int:
    catalog, templates = _load_assets(args)
    triples = read_triples(args.data)
    overrides = _load_overrides(args.config)
    overrides.setdefault("seed", args.seed)
    cfg = TrainConfig(**overrides)
    ckpt, metrics = train(triples, catalog, templates, cfg, metrics_path=args.metrics)
    save_checkpoint(ckpt, args.out)
    last = metrics[-1]
    if args.json:
        print(json.dumps({
            "epochs": last.epoch + 1, "L_B": last.l_b, "L_rxn": last.l_rxn,
            "block_acc": last.block_acc, "rxn_acc": last.rxn_acc,
            "checkpoint": str(args.out),
        }, sort_keys=True))
    else:
        print(f"epoch {last.epoch}: L_B {last.l_b:.4f} L_rxn {last.l_rxn:.4f} "
              f"block_acc {last.block_acc:.3f} rxn_acc {last.rxn_acc:.3f}")
        print(f"saved {args.out}")
    return EXIT_OK


def _graph_from_smiles(smiles: str, seed: int):
    mol = canonicalize(smiles)
    return mol, extract_pharmacophores(gen_conformer(mol, seed=seed))


def _cmd_generate(args) -> int:
    catalog, templates = _load_assets(args)
    session = _session(args, catalog, templates)
    _, graph = _graph_from_smiles(args.smiles, args.seed)
    cfg = GenerationConfig(max_steps=args.max_steps)
    tree = generate(graph, session, catalog, templates, cfg)
    _emit_tree(tree, args.json)
    return EXIT_OK


def _cmd_expand(args) -> int:
    catalog, templates = _load_assets(args)
    session = _session(args, catalog, templates)
    seed_mol = canonicalize(args.smiles)
    cfg = GenerationConfig(max_steps=args.max_steps)
    analogs = hit_expand(seed_mol, session, catalog, templates, args.n,
                         cfg=cfg, seed=args.seed)
    for tree in analogs:
        _emit_tree(tree, args.json)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    catalog, templates = _load_assets(args)
    session = _session(args, catalog, templates)
    overrides = _load_overrides(args.config)
    ga = GaConfig(
        population=overrides.get("population", args.population),
        cycles=overrides.get("cycles", args.cycles),
        topk_parents=overrides.get("topk_parents", args.topk_parents),
        neighbor_k=overrides.get("neighbor_k", args.neighbor_k),
    )
    if args.seeds_file is not None:
        seed_trees = [SyntheticTree.from_json(json.loads(l))
                      for l in Path(args.seeds_file).read_text().splitlines() if l.strip()]
    else:
        import random as _random
        rng = _random.Random(args.seed)
        seed_trees = [sample_tree(catalog, templates, args.max_steps, rng)
                      for _ in range(args.n_seeds)]
    scorer = _OBJECTIVES[args.objective]
    population, events = optimize(seed_trees, session, scorer, ga, seed=args.seed)
    if args.lineage is not None:
        with open(args.lineage, "w") as fh:
            for e in events:
                fh.write(e.to_json() + "\n")
    for tree, score in population:
        if args.json:
            obj = tree.to_json()
            obj["score"] = score
            print(json.dumps(obj, sort_keys=True, separators=(",", ":")))
        else:
            print(f"{score:10.4f}  {tree.final}")
    return EXIT_OK


def _cmd_neighbors(args) -> int:
    catalog, templates = _load_assets(args)
    session = _session(args, catalog, templates)
    rows = nearest_blocks(args.block, session, catalog, templates, k=args.k)
    if args.json:
        print(json.dumps([{"block": b, "cosine": c} for b, c in rows]))
    else:
        for b, c in rows:
            print(f"{b:6d}  {c:8.4f}  {catalog.get(b).mol.smiles}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    catalog, templates = _load_assets(args)
    mols = _read_smiles_file(args.input)
    payload: dict = {}
    if args.reference is not None:
        report = similarity_report(mols, args.reference)
        payload["similarity"] = json.loads(report.to_json())
        if args.csv is not None:
            report.write_csv(args.csv)
    if args.properties:
        payload["properties"] = json.loads(property_table(mols).to_json())
    if args.baseline is not None:
        base = random_baseline(catalog, templates, args.baseline, seed=args.seed)
        payload["baseline_properties"] = json.loads(
            property_table(base).to_json())
    if not payload:
        raise ValueError("nothing to evaluate: pass --reference and/or --properties")
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        if "similarity" in payload:
            agg = payload["similarity"]["aggregates"]
            print(f"tanimoto mean {agg['tanimoto']['mean']:.4f} "
                  f"min {agg['tanimoto']['min']:.4f} max {agg['tanimoto']['max']:.4f}")
            print(f"murcko   mean {agg['murcko_tanimoto']['mean']:.4f} "
                  f"min {agg['murcko_tanimoto']['min']:.4f} "
                  f"max {agg['murcko_tanimoto']['max']:.4f}")
        if "properties" in payload:
            print(property_table(mols).render())
    return EXIT_OK


def _cmd_dock(args) -> int:
    ligands = tuple(_read_smiles_file(args.ligands))
    cx, cy, cz = (float(v) for v in args.center.split(","))
    job = DockingJob(
        receptor=str(args.receptor), ligands=ligands, center=(cx, cy, cz),
        box_edge=args.size, n_poses=args.poses, executable=args.exe,
    )
    scores = dock(job)
    if args.json:
        print(json.dumps([{"smiles": s, "affinity": a}
                          for s, a in zip(ligands, scores)]))
    else:
        for s, a in zip(ligands, scores):
            print(f"{a:8.2f}  {s}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pharmtree",
        description="Pharmacophore-conditioned synthesizable molecule generation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("datagen", help="sample a training dataset of (graph, tree) pairs")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(fn=_cmd_datagen)

    p = sub.add_parser("train", help="train a model on a triples file")
    _add_common(p)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--metrics", type=Path, default=None, help="per-epoch CSV")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("generate", help="decode a route for a pharmacophore graph")
    _add_common(p)
    p.add_argument("--smiles", required=True,
                   help="molecule whose pharmacophore graph conditions decoding")
    p.add_argument("--max-steps", type=int, default=4)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("expand", help="sample analog routes rooted at a seed molecule")
    _add_common(p)
    p.add_argument("--smiles", required=True)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--max-steps", type=int, default=4)
    p.set_defaults(fn=_cmd_expand)

    p = sub.add_parser("optimize", help="evolve routes against an objective")
    _add_common(p)
    p.add_argument("--objective", choices=sorted(_OBJECTIVES), default="neg_logp")
    p.add_argument("--seeds-file", type=Path, default=None,
                   help="JSONL of seed trees; default samples random ones")
    p.add_argument("--n-seeds", type=int, default=10)
    p.add_argument("--max-steps", type=int, default=3)
    p.add_argument("--population", type=int, default=16)
    p.add_argument("--cycles", type=int, default=3)
    p.add_argument("--topk-parents", type=int, default=4)
    p.add_argument("--neighbor-k", type=int, default=8)
    p.add_argument("--lineage", type=Path, default=None, help="JSONL event log")
    p.set_defaults(fn=_cmd_optimize)

    p = sub.add_parser("neighbors", help="nearest blocks in projected-fingerprint space")
    _add_common(p)
    p.add_argument("--block", type=int, required=True)
    p.add_argument("--k", type=int, default=8)
    p.set_defaults(fn=_cmd_neighbors)

    p = sub.add_parser("eval", help="similarity / property reports for a SMILES file")
    _add_common(p)
    p.add_argument("--input", type=Path, required=True, help="SMILES file, one per line")
    p.add_argument("--reference", default=None, help="reference SMILES for similarity")
    p.add_argument("--properties", action="store_true")
    p.add_argument("--baseline", type=int, default=None,
                   help="also report properties of n random-baseline molecules")
    p.add_argument("--csv", type=Path, default=None, help="write per-molecule CSV")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("dock", help="score ligands with an external docking binary")
    _add_common(p)
    p.add_argument("--receptor", type=Path, required=True)
    p.add_argument("--ligands", type=Path, required=True, help="SMILES file")
    p.add_argument("--center", required=True, help="box center as x,y,z")
    p.add_argument("--size", type=float, default=25.0)
    p.add_argument("--poses", type=int, default=10)
    p.add_argument("--exe", default="smina")
    p.set_defaults(fn=_cmd_dock)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (ExternalToolMissing, ToolFailure) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TOOL
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
