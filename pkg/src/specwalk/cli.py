"""Pipeline command line: ingest -> pagerank -> specificity -> walk -> train
-> recommend/eval, plus synthetic graph generation and sensitivity sweeps.

Every command accepts --seed and --config (JSON file mirroring the flag
names; explicit flags win) and writes a JSON metadata sidecar next to each
output artifact recording the seed, a config hash and the graph checksum.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import replace

from . import __version__
from .graph import Graph, GraphError, read_snapshot, write_snapshot
from .ntriples import load_graph, open_text, serialize_ntriples
from .pagerank import compute_pagerank, load_scores, save_scores
from .recommend import precision_at_k, sensitivity_sweep, top_k
from .skipgram import EmbeddingModel, TrainConfig, train
from .specificity import (EstimatorParams, SpecificityTable,
                          rank_by_specificity)
from .synth import (franchise_graph, layered_graph, relevance_inversion_graph,
                    sensitivity_fixture)
from .walks import (WalkCorpus, WalkStrategy, extract_corpus, read_corpus_lines,
                    write_corpus, write_stats_csv)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _write_sidecar(out_path: str, command: str, params: dict,
                   graph: Graph | None = None) -> None:
    payload = json.dumps(params, sort_keys=True, default=str)
    meta = {
        "command": command,
        "params": json.loads(payload),
        "config_hash": hashlib.sha256(payload.encode()).hexdigest(),
        "graph_checksum": graph.checksum() if graph is not None else None,
        "tool_version": __version__,
    }
    with open(str(out_path) + ".meta.json", "w", encoding="utf-8") as f:
        json.dump(meta, f, sort_keys=True, indent=2)
        f.write("\n")


def _public_args(args) -> dict:
    return {k: v for k, v in vars(args).items()
            if k not in ("func", "config") and not k.startswith("_")}


# -- commands ------------------------------------------------------------

def cmd_ingest(args) -> int:
    g = load_graph(args.input, strict=args.strict, rdf_type=args.rdf_type)
    write_snapshot(g, args.out)
    _write_sidecar(args.out, "ingest", _public_args(args), g)
    entities = sum(len(v) for v in g.type_index.values())
    print(f"triples={g.n_triples} terms={g.n_terms} "
          f"typed_entities={entities} types={len(g.type_index)}")
    if g.report is not None and g.report.skipped:
        print(f"skipped_lines={g.report.skipped}", file=sys.stderr)
    return 0


def cmd_pagerank(args) -> int:
    g = read_snapshot(args.snapshot)
    scores = compute_pagerank(g, damping=args.damping, epsilon=args.epsilon,
                              max_iters=args.max_iters)
    with open(args.out, "w", encoding="utf-8") as f:
        save_scores(scores, f)
    _write_sidecar(args.out, "pagerank", _public_args(args), g)
    print(f"scored_nodes={len(scores.scores)}")
    return 0


def _estimator_params(args, depth: int | None = None) -> EstimatorParams:
    return EstimatorParams(
        seed_set_size=args.seed_set_size,
        n_walks=args.n_walks,
        candidates_per_depth=args.candidates,
        max_depth=depth if depth is not None else args.depth,
        threshold=args.threshold,
        forward_retry_limit=args.retry_limit,
        seed=args.seed,
        mode="eq2" if getattr(args, "exact", False) else "alg2",
        include_type_edges=args.include_type_edges,
    )


def cmd_specificity(args) -> int:
    g = read_snapshot(args.snapshot)
    table = rank_by_specificity(g, g.term_id(args.type),
                                _estimator_params(args))
    with open(args.out, "w", encoding="utf-8") as f:
        table.to_tsv(g, f)
    with open(args.out + ".meta.json", "w", encoding="utf-8") as f:
        f.write(table.metadata_json())
    _write_sidecar(args.out + ".run", "specificity", _public_args(args), g)
    for depth in sorted(table.depths):
        kept = sum(1 for e in table.depths[depth] if e.score >= args.threshold)
        print(f"depth={depth} candidates={len(table.depths[depth])} "
              f"above_threshold={kept}")
    return 0


def _load_table(g: Graph, path: str) -> SpecificityTable:
    meta_path = path + ".meta.json"
    metadata = None
    if os.path.exists(meta_path):
        with open(meta_path, encoding="utf-8") as f:
            metadata = json.load(f)
    with open(path, encoding="utf-8") as f:
        return SpecificityTable.from_tsv(g, f, metadata)


def _walk_entities(g: Graph, args) -> list[int]:
    if args.entities:
        with open_text(args.entities) as f:
            return [g.term_id(line.strip()) for line in f if line.strip()]
    if not args.type:
        raise UsageError("walk requires --type or --entities")
    members = sorted(g.entities_of_type(g.term_id(args.type)))
    if not members:
        raise GraphError(f"type has no instances: {args.type!r}")
    if args.limit and args.limit < len(members):
        return g.sample_entities(g.term_id(args.type), args.limit, args.seed)
    return members


def cmd_walk(args) -> int:
    g = read_snapshot(args.snapshot)
    if args.bias == "specificity" and not args.table:
        raise UsageError("bias=specificity requires --table")
    if args.bias == "pagerank" and not args.scores:
        raise UsageError("bias=pagerank requires --scores")
    table = _load_table(g, args.table) if args.table else None
    scores = None
    if args.scores:
        with open(args.scores, encoding="utf-8") as f:
            scores = load_scores(f).bind(g)
    entities = _walk_entities(g, args)

    def strategy(depth: int) -> WalkStrategy:
        return WalkStrategy(bias=args.bias, pruning=args.pruning, depth=depth,
                            walks_per_entity=args.walks,
                            specificity_table=table, threshold=args.threshold,
                            pagerank_scores=scores)

    depths = [args.depth]
    if args.depth > 1 and not args.no_depth1:
        depths = [1, args.depth]  # depth-d corpora include depth-1 walks
    merged = WalkCorpus()
    for depth in depths:
        part = extract_corpus(g, entities, strategy(depth), seed=args.seed,
                              workers=args.workers)
        merged.walks.extend(part.walks)
        merged.stats.extend(part.stats)
    header = {"bias": args.bias, "pruning": args.pruning, "depth": args.depth,
              "walks_per_entity": args.walks, "seed": args.seed,
              "graph": g.checksum()}
    with open(args.out, "w", encoding="utf-8") as f:
        write_corpus(g, merged, f, header)
    _write_sidecar(args.out, "walk", _public_args(args), g)
    if args.stats:
        with open(args.stats, "w", encoding="utf-8") as f:
            write_stats_csv(g, merged, f)
    distinct = len({w.tokens for w in merged.walks})
    print(f"entities={len(entities)} walks={len(merged.walks)} "
          f"distinct={distinct}")
    if not merged.walks:
        print("warning: no walks generated", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    config = TrainConfig(dim=args.dim, window=args.window,
                         negatives=args.negatives, epochs=args.epochs,
                         lr=args.lr, min_count=args.min_count,
                         subsample=args.subsample, seed=args.seed)
    with open_text(args.corpus) as f:
        model = train(read_corpus_lines(f), config)
    with open(args.out, "w", encoding="utf-8") as f:
        model.save_text(f)
    _write_sidecar(args.out, "train", _public_args(args))
    print(f"vocab={len(model.vocab)} dim={config.dim} "
          f"final_loss={model.epoch_losses[-1] if model.epoch_losses else 0.0:.4f}")
    return 0


def _candidate_tokens(args) -> set[str] | None:
    if not args.snapshot or not args.type:
        return None
    g = read_snapshot(args.snapshot)
    return {g.render_token(v)
            for v in g.entities_of_type(g.term_id(args.type))}


def cmd_recommend(args) -> int:
    with open(args.model, encoding="utf-8") as f:
        model = EmbeddingModel.load_text(f)
    rec = top_k(model, args.query, args.k, candidates=_candidate_tokens(args))
    rows = [(args.query, token, f"{score:.6f}") for token, score in rec.ranked]
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["query", "token", "cosine"])
            w.writerows(rows)
        _write_sidecar(args.out, "recommend", _public_args(args))
    else:
        for _, token, score in rows:
            print(f"{token}\t{score}")
    return 0


def cmd_eval(args) -> int:
    with open(args.model, encoding="utf-8") as f:
        model = EmbeddingModel.load_text(f)
    with open(args.truth, encoding="utf-8") as f:
        truth = {q: set(v) for q, v in json.load(f).items()}
    candidates = _candidate_tokens(args)
    rows = []
    for query in sorted(truth):
        relevant = truth[query]
        k = args.k if args.k else len(relevant)
        if k != len(relevant) and not args.allow_mismatch:
            raise UsageError(
                f"k={k} differs from |truth|={len(relevant)} for {query!r}; "
                "pass --allow-mismatch to override")
        if query not in model.vocab.index:
            print(f"warning: query not in vocabulary: {query}", file=sys.stderr)
            continue
        rec = top_k(model, query, k, candidates=candidates)
        rows.append((args.label, args.depth, query, k,
                     f"{precision_at_k(rec, relevant):.6f}"))
    with open(args.out, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["scheme", "depth", "query", "k", "precision"])
        w.writerows(rows)
    _write_sidecar(args.out, "eval", _public_args(args))
    if rows:
        mean = sum(float(r[4]) for r in rows) / len(rows)
        print(f"queries={len(rows)} mean_precision={mean:.4f}")
    return 0


def cmd_sensitivity(args) -> int:
    g = read_snapshot(args.snapshot)
    t = g.term_id(args.type)
    values = [int(v) for v in args.values.split(",")]
    acc: dict[tuple[int, int], list[float]] = {}
    parameter = args.sweep
    for r in range(args.repeats):
        base = _estimator_params(args)
        base = replace(base, seed=args.seed + r)
        kwargs = {"n_walks_values": values} if parameter == "n_walks" \
            else {"s_values": values}
        for point in sensitivity_sweep(g, t, base, **kwargs):
            acc.setdefault((point.value, point.depth), []).append(point.ndcg)
    with open(args.out, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow([parameter, "depth", "ndcg", "repeats"])
        for (value, depth), scores in sorted(acc.items()):
            w.writerow([value, depth,
                        f"{sum(scores) / len(scores):.6f}", len(scores)])
    _write_sidecar(args.out, "sensitivity", _public_args(args), g)
    return 0


def cmd_synth(args) -> int:
    if args.kind == "franchise":
        g, info = franchise_graph(seed=args.seed, n_franchises=args.franchises,
                                  films_per=args.films_per,
                                  n_distractor_films=args.distractors)
    elif args.kind == "inversion":
        g, info = relevance_inversion_graph(seed=args.seed)
    elif args.kind == "layered":
        g, info = layered_graph(seed=args.seed)
    elif args.kind == "sensitivity":
        g, info = sensitivity_fixture(seed=args.seed)
    else:  # argparse choices guard this
        raise UsageError(f"unknown kind: {args.kind}")
    with open(args.out, "w", encoding="utf-8") as f:
        serialize_ntriples(g, f)
    _write_sidecar(args.out, "synth", _public_args(args), g)
    if args.truth_out:
        truth = info.get("truth", {})
        with open(args.truth_out, "w", encoding="utf-8") as f:
            json.dump(truth, f, sort_keys=True, indent=2)
            f.write("\n")
    if args.info_out:
        with open(args.info_out, "w", encoding="utf-8") as f:
            json.dump({k: v for k, v in info.items() if k != "truth"},
                      f, sort_keys=True, indent=2, default=str)
            f.write("\n")
    print(f"triples={g.n_triples} terms={g.n_terms}")
    return 0


# -- parser --------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="specwalk", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", default=None,
                       help="JSON file of flag defaults (flags override)")

    p = sub.add_parser("ingest", help="parse N-Triples/TSV into a snapshot")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--rdf-type",
                   default="http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("pagerank", help="power-iteration PageRank scores")
    p.add_argument("snapshot")
    p.add_argument("--out", required=True)
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--epsilon", type=float, default=1e-12)
    p.add_argument("--max-iters", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_pagerank)

    def estimator_flags(p):
        p.add_argument("--type", required=True)
        p.add_argument("--depth", type=int, default=2)
        p.add_argument("--seed-set-size", type=int, default=300)
        p.add_argument("--n-walks", type=int, default=2000)
        p.add_argument("--candidates", type=int, default=None,
                       help="candidates per depth (default 25*depth)")
        p.add_argument("--threshold", type=float, default=0.5)
        p.add_argument("--retry-limit", type=int, default=10)
        p.add_argument("--include-type-edges", action="store_true")

    p = sub.add_parser("specificity", help="ranked specificity table")
    p.add_argument("snapshot")
    p.add_argument("--out", required=True)
    estimator_flags(p)
    p.add_argument("--exact", action="store_true",
                   help="exhaustive computation instead of the estimator")
    common(p)
    p.set_defaults(func=cmd_specificity)

    p = sub.add_parser("walk", help="extract a walk corpus")
    p.add_argument("snapshot")
    p.add_argument("--out", required=True)
    p.add_argument("--bias", default="uniform",
                   choices=["uniform", "frequency", "pagerank", "specificity"])
    p.add_argument("--pruning", default="none",
                   choices=["none", "NRSE", "UE", "NRST", "UET"])
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--walks", type=int, default=500,
                   help="walk attempts per entity")
    p.add_argument("--type", default=None)
    p.add_argument("--entities", default=None,
                   help="file of entity IRIs, one per line")
    p.add_argument("--limit", type=int, default=None,
                   help="sample this many entities of --type")
    p.add_argument("--table", default=None, help="specificity table TSV")
    p.add_argument("--scores", default=None, help="PageRank score TSV")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--stats", default=None, help="per-entity stats CSV")
    p.add_argument("--no-depth1", action="store_true",
                   help="do not concatenate depth-1 walks for depth>1")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("train", help="train skip-gram embeddings")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=500)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--negatives", type=int, default=25)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--subsample", type=float, default=0.0)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recommend", help="top-k cosine recommendation")
    p.add_argument("model")
    p.add_argument("--query", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--snapshot", default=None)
    p.add_argument("--type", default=None,
                   help="restrict candidates to entities of this type")
    p.add_argument("--out", default=None)
    common(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("eval", help="precision@k against ground truth")
    p.add_argument("model")
    p.add_argument("--truth", required=True,
                   help="JSON map query -> list of relevant tokens")
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=None,
                   help="default: per-query ground-truth size")
    p.add_argument("--allow-mismatch", action="store_true")
    p.add_argument("--label", default="model")
    p.add_argument("--depth", type=int, default=0)
    p.add_argument("--snapshot", default=None)
    p.add_argument("--type", default=None)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sensitivity", help="NDCG sweep over estimator budgets")
    p.add_argument("snapshot")
    p.add_argument("--out", required=True)
    p.add_argument("--sweep", required=True,
                   choices=["n_walks", "seed_set_size"])
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--repeats", type=int, default=1)
    estimator_flags(p)
    common(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("synth", help="generate a planted synthetic graph")
    p.add_argument("--kind", required=True,
                   choices=["franchise", "inversion", "layered", "sensitivity"])
    p.add_argument("--out", required=True, help="N-Triples output")
    p.add_argument("--truth-out", default=None)
    p.add_argument("--info-out", default=None)
    p.add_argument("--franchises", type=int, default=5)
    p.add_argument("--films-per", type=int, default=4)
    p.add_argument("--distractors", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def _apply_config(argv: list[str], parser: _Parser) -> None:
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1]
    with open(path, encoding="utf-8") as f:
        config = json.load(f)
    if not isinstance(config, dict):
        raise UsageError("config file must contain a JSON object")
    # config keys use flag spelling without dashes, e.g. "n_walks"
    sub_actions = [a for a in parser._actions
                   if isinstance(a, argparse._SubParsersAction)]
    command = next((a for a in argv if not a.startswith("-")), None)
    for action in sub_actions:
        sp = action.choices.get(command)
        if sp is not None:
            known = {a.dest for a in sp._actions}
            unknown = set(config) - known
            if unknown:
                raise UsageError(f"unknown config keys: {sorted(unknown)}")
            sp.set_defaults(**config)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(argv, parser)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (GraphError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
