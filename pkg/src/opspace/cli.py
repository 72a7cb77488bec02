"""Command-line pipeline: extract, embed, build-ops, cluster, evaluate,
select-k, project, analyze, pipeline.

Stages communicate through files in the configured output directory, so
each one can be re-run independently. Every artifact embeds the hash of
the configuration that produced it; a stage refuses inputs whose hashes
disagree (--allow-config-mismatch overrides). Reports are byte-identical
across runs with the same config and seed, apart from timestamp header
lines.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import artifacts, corpus, embeddings, ops, patterns, tsne
from .cluster import (
    Clustering,
    kmeans,
    pattern_inertia,
    remove_noisy_patterns,
    select_k,
)
from .config import PipelineConfig, apply_overrides, load_config, validate_paths
from .errors import ConfigError, InputError, OpspaceError
from .metrics import compute_report

log = logging.getLogger("opspace")

_EXTERNAL_METRICS = ("ari", "homogeneity", "completeness", "v_measure", "ami")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _out(cfg: PipelineConfig, name: str) -> Path:
    return Path(cfg.out_dir) / name


def _write_manifest(cfg: PipelineConfig, command: str, summary: dict) -> None:
    doc = {
        "command": command,
        "created": _now(),
        "config": cfg.resolved(),
        "summary": summary,
    }
    artifacts.write_json(
        _out(cfg, f"manifest_{command.replace('-', '_')}.json"),
        doc,
        meta=artifacts.make_meta(cfg.config_hash()),
    )


def _write_pairs(cfg: PipelineConfig, pairs: list[corpus.SentencePair]) -> None:
    records = [
        {
            "pair_id": p.id,
            "premise": list(p.premise),
            "hypothesis": list(p.hypothesis),
            "label": p.label.value,
            "source": p.source,
        }
        for p in pairs
    ]
    artifacts.write_jsonl(
        _out(cfg, "pairs.jsonl"), records, artifacts.make_meta(cfg.config_hash())
    )


def _read_pairs(cfg: PipelineConfig) -> tuple[list[corpus.SentencePair], dict | None]:
    records, meta = artifacts.read_jsonl(_out(cfg, "pairs.jsonl"))
    pairs = []
    for r in records:
        pairs.append(
            corpus.SentencePair(
                int(r["pair_id"]),
                tuple(r["premise"]),
                tuple(r["hypothesis"]),
                corpus.Label(r["label"]),
                r.get("source", ""),
            )
        )
    return pairs, meta


def _write_sentences(cfg: PipelineConfig, pairs: list[corpus.SentencePair]) -> None:
    records = []
    for p in pairs:
        records.append(
            {"id": embeddings.premise_sentence_id(p.id), "tokens": list(p.premise)}
        )
        records.append(
            {"id": embeddings.hypothesis_sentence_id(p.id), "tokens": list(p.hypothesis)}
        )
    artifacts.write_jsonl(
        _out(cfg, "sentences.jsonl"), records, artifacts.make_meta(cfg.config_hash())
    )


def cmd_extract(cfg: PipelineConfig) -> dict:
    """Ingest corpora, mine patterns, write the report and group manifest."""
    validate_paths(cfg, need_corpus=True)
    pairs, stats = corpus.ingest(cfg.corpus_paths, cfg.corpus_format)
    log.info("ingested %s", stats.summary())
    all_groups = patterns.group_patterns(pairs)
    surviving = patterns.filter_groups(all_groups, cfg.min_support, cfg.drop_identity)
    if not surviving:
        log.warning(
            "no pattern group reached min_support=%d; the group manifest is empty",
            cfg.min_support,
        )
    meta = artifacts.make_meta(cfg.config_hash())
    patterns.write_pattern_report(
        _out(cfg, "patterns.csv"), all_groups, meta, timestamp=_now()
    )
    patterns.write_group_manifest(_out(cfg, "groups.jsonl"), surviving, meta)
    _write_pairs(cfg, pairs)
    _write_sentences(cfg, pairs)
    surviving_pairs = sum(g.size for g in surviving)
    summary = {
        "pairs": len(pairs),
        "groups_total": len(all_groups),
        "groups_surviving": len(surviving),
        "distinct_patterns_surviving": patterns.distinct_pattern_count(surviving),
        "surviving_pairs": surviving_pairs,
        "ingest": asdict(stats),
    }
    log.info(
        "extract: %d groups survive min_support=%d (%d distinct patterns across "
        "labels, %d pairs)",
        len(surviving),
        cfg.min_support,
        summary["distinct_patterns_surviving"],
        surviving_pairs,
    )
    _write_manifest(cfg, "extract", summary)
    return summary


def _load_groups(cfg: PipelineConfig, allow_mismatch: bool):
    groups, meta = patterns.read_group_manifest(_out(cfg, "groups.jsonl"))
    if not allow_mismatch:
        artifacts.require_consistent_meta(cfg.config_hash(), ("groups.jsonl", meta))
    return groups


def cmd_embed(cfg: PipelineConfig, allow_mismatch: bool = False) -> dict:
    """Produce embeddings.jsonl from the configured source."""
    validate_paths(cfg)
    groups = _load_groups(cfg, allow_mismatch)
    meta = artifacts.make_meta(cfg.config_hash(), source=cfg.embedding_source)
    if cfg.embedding_source == "planted":
        matrix = embeddings.synthesize_planted(
            groups,
            cfg.planted_dim,
            cfg.planted_offset_scale,
            cfg.planted_noise_scale,
            cfg.seed,
        )
    elif cfg.embedding_source == "token_average":
        pairs, pair_meta = _read_pairs(cfg)
        if not allow_mismatch:
            artifacts.require_consistent_meta(cfg.config_hash(), ("pairs.jsonl", pair_meta))
        member_ids = {m for g in groups for m in g.members}
        table = embeddings.load_token_vectors(cfg.token_vectors_path, cfg.oov_policy)
        matrix = embeddings.embed_pairs(
            [p for p in pairs if p.id in member_ids], table
        )
    elif cfg.embedding_source == "sentence_vectors":
        matrix = embeddings.load_sentence_vectors(cfg.sentence_vectors_path)
    else:
        raise ConfigError(f"unknown embedding_source {cfg.embedding_source!r}")
    embeddings.write_sentence_vectors(_out(cfg, "embeddings.jsonl"), matrix, meta)
    summary = {"sentences": len(matrix.rows), "dim": matrix.dim, "source": cfg.embedding_source}
    log.info("embed: %d sentence vectors, dim %d (%s)", len(matrix.rows), matrix.dim, cfg.embedding_source)
    _write_manifest(cfg, "embed", summary)
    return summary


def cmd_build_ops(cfg: PipelineConfig, allow_mismatch: bool = False) -> dict:
    """Map embedded pairs into the operation space, one file per kind."""
    groups = _load_groups(cfg, allow_mismatch)
    matrix = embeddings.load_sentence_vectors(_out(cfg, "embeddings.jsonl"))
    if not allow_mismatch:
        artifacts.require_consistent_meta(cfg.config_hash(), ("embeddings.jsonl", matrix.meta))
    summary: dict = {"kinds": {}}
    for kind_name in cfg.operations:
        kind = ops.OperationKind(kind_name)
        stats = ops.OpSpaceStats()
        points = ops.build_operation_space(
            groups, matrix, kind, normalize=cfg.normalize_ops, stats=stats
        )
        meta = artifacts.make_meta(
            cfg.config_hash(),
            kind=kind.value,
            dim=matrix.dim,
            guarded_components=stats.guarded_components,
        )
        ops.write_operation_space(_out(cfg, f"ops_{kind.value}.jsonl"), points, meta)
        summary["kinds"][kind.value] = {
            "points": stats.points,
            "guarded_components": stats.guarded_components,
        }
        log.info(
            "build-ops: %s -> %d points (%d guarded division components)",
            kind.value,
            stats.points,
            stats.guarded_components,
        )
    _write_manifest(cfg, "build-ops", summary)
    return summary


def _read_ops(cfg: PipelineConfig, kind: str, allow_mismatch: bool):
    path = _out(cfg, f"ops_{kind}.jsonl")
    if not path.exists():
        raise InputError(f"{path} not found; run build-ops first")
    points, meta = ops.read_operation_space(path)
    if not allow_mismatch:
        artifacts.require_consistent_meta(cfg.config_hash(), (path.name, meta))
    if not points:
        raise InputError(f"{path} contains no operation points")
    return points


def _cluster_points(cfg: PipelineConfig, x: np.ndarray, k: int) -> Clustering:
    return kmeans(
        x,
        k,
        restarts=cfg.kmeans_restarts,
        max_iter=cfg.kmeans_max_iter,
        tol=cfg.kmeans_tol,
        seed=cfg.seed,
    )


def _write_clustering(cfg: PipelineConfig, name: str, clustering: Clustering, pair_ids) -> None:
    doc = {
        "k": clustering.k,
        "pair_ids": [int(i) for i in pair_ids],
        "assignments": [int(c) for c in clustering.assignment],
        "centroids": [[float(v) for v in row] for row in clustering.centroids],
        "total_inertia": clustering.total_inertia,
        "n_iter": clustering.n_iter,
    }
    artifacts.write_json(_out(cfg, name), doc, artifacts.make_meta(cfg.config_hash()))


def _write_inertia_csv(cfg: PipelineConfig, name: str, ranking, groups) -> None:
    path = _out(cfg, name)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for line in artifacts.csv_header_lines(
            artifacts.make_meta(cfg.config_hash()), timestamp=_now()
        ):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["pattern_id", "premise_template", "hypothesis_template", "label", "inertia", "size"]
        )
        for record in ranking:
            group = groups[record.pattern_id]
            writer.writerow(
                [
                    record.pattern_id,
                    patterns.render_template(group.pattern.premise_template),
                    patterns.render_template(group.pattern.hypothesis_template),
                    group.label.value,
                    f"{record.value:.10g}",
                    record.size,
                ]
            )


def cmd_cluster(cfg: PipelineConfig, kind: str = "subtract", allow_mismatch: bool = False) -> dict:
    """k-means the operation space at k = number of patterns (or cluster_k)."""
    groups = _load_groups(cfg, allow_mismatch)
    points = _read_ops(cfg, kind, allow_mismatch)
    x, pattern_ids, pair_ids = ops.points_matrix(points)
    k = cfg.cluster_k or len(set(int(p) for p in pattern_ids))
    clustering = _cluster_points(cfg, x, k)
    ranking = pattern_inertia(points, clustering)
    _write_clustering(cfg, f"clustering_{kind}.json", clustering, pair_ids)
    _write_inertia_csv(cfg, f"inertia_{kind}.csv", ranking, groups)
    summary = {
        "kind": kind,
        "k": k,
        "total_inertia": clustering.total_inertia,
        "noisiest_patterns": [r.pattern_id for r in ranking[: cfg.noisy_top_n]],
    }
    log.info("cluster: %s at k=%d, inertia %.6g", kind, k, clustering.total_inertia)
    _write_manifest(cfg, "cluster", summary)
    return summary


def _grid_best(metric: str, row: dict) -> str:
    present = {k: v for k, v in row.items() if v is not None}
    if not present:
        return ""
    if metric == "davies_bouldin":
        return min(present, key=lambda k: present[k])
    return max(present, key=lambda k: present[k])


def cmd_evaluate(cfg: PipelineConfig, allow_mismatch: bool = False) -> dict:
    """Score every operation kind against the mined patterns."""
    grid: dict[str, dict[str, float | None]] = {}
    for kind_name in cfg.operations:
        points = _read_ops(cfg, kind_name, allow_mismatch)
        x, pattern_ids, _ = ops.points_matrix(points)
        k = cfg.cluster_k or len(set(int(p) for p in pattern_ids))
        clustering = _cluster_points(cfg, x, k)
        report = compute_report(
            pattern_ids, clustering.assignment, points=x, ami_normalizer=cfg.ami_normalizer
        )
        for metric, value in report.as_dict().items():
            grid.setdefault(metric, {})[kind_name] = value
        log.info(
            "evaluate: %s ari=%.4f v=%.4f ami=%.4f",
            kind_name,
            report.ari,
            report.v_measure,
            report.ami,
        )
    best = {metric: _grid_best(metric, row) for metric, row in grid.items()}
    meta = artifacts.make_meta(cfg.config_hash(), ami_normalizer=cfg.ami_normalizer)
    path = _out(cfg, "metrics.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for line in artifacts.csv_header_lines(meta, timestamp=_now()):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(["metric", *cfg.operations, "best"])
        for metric, row in grid.items():
            writer.writerow(
                [
                    metric,
                    *[
                        "" if row.get(k) is None else f"{row[k]:.6f}"
                        for k in cfg.operations
                    ],
                    best[metric],
                ]
            )
    artifacts.write_json(_out(cfg, "metrics.json"), {"grid": grid, "best": best}, meta)
    summary = {"best": best}
    _write_manifest(cfg, "evaluate", summary)
    return {"grid": grid, "best": best}


def _write_kselect(cfg: PipelineConfig, kind: str, report) -> None:
    path = _out(cfg, f"kselect_{kind}.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = artifacts.make_meta(cfg.config_hash())
    with path.open("w", encoding="utf-8", newline="") as fh:
        for line in artifacts.csv_header_lines(meta, timestamp=_now()):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(["k", "davies_bouldin", "silhouette"])
        for entry in report.entries:
            writer.writerow(
                [entry.k, f"{entry.davies_bouldin:.10g}", f"{entry.silhouette:.10g}"]
            )
    artifacts.write_json(
        _out(cfg, f"kselect_{kind}.json"),
        {
            "best_davies_bouldin_k": report.best_davies_bouldin_k,
            "best_silhouette_k": report.best_silhouette_k,
            "agree": report.agree,
        },
        meta,
    )


def cmd_select_k(cfg: PipelineConfig, kind: str = "subtract", allow_mismatch: bool = False) -> dict:
    """Scan cluster counts and report both internal validity indices."""
    points = _read_ops(cfg, kind, allow_mismatch)
    x, _, _ = ops.points_matrix(points)
    report = select_k(
        x,
        cfg.k_min,
        cfg.k_max,
        restarts=cfg.kmeans_restarts,
        seed=cfg.seed,
        max_iter=cfg.kmeans_max_iter,
        tol=cfg.kmeans_tol,
    )
    _write_kselect(cfg, kind, report)
    summary = {
        "kind": kind,
        "best_davies_bouldin_k": report.best_davies_bouldin_k,
        "best_silhouette_k": report.best_silhouette_k,
        "agree": report.agree,
    }
    log.info(
        "select-k: davies-bouldin -> %d, silhouette -> %d (%s)",
        report.best_davies_bouldin_k,
        report.best_silhouette_k,
        "agree" if report.agree else "disagree",
    )
    _write_manifest(cfg, "select-k", summary)
    return summary


def _tsne_config(cfg: PipelineConfig) -> tsne.TsneConfig:
    return tsne.TsneConfig(
        perplexity=cfg.tsne_perplexity,
        iterations=cfg.tsne_iterations,
        early_exaggeration=cfg.tsne_early_exaggeration,
        learning_rate=cfg.tsne_learning_rate,
        seed=cfg.seed,
    )


def _project_points(cfg: PipelineConfig, kind: str, points, cluster_ids, stem: str) -> None:
    x, pattern_ids, pair_ids = ops.points_matrix(points)
    projection = tsne.tsne(x, _tsne_config(cfg))
    meta = artifacts.make_meta(
        cfg.config_hash(),
        kind=kind,
        perplexity=cfg.tsne_perplexity,
        iterations=cfg.tsne_iterations,
        final_kl=f"{projection.kl_history[-1]:.6g}",
    )
    tsne.write_projection(
        _out(cfg, f"{stem}.tsv"),
        projection.coords,
        pattern_ids,
        cluster_ids,
        pair_ids,
        meta,
        timestamp=_now(),
    )
    tsne.svg_scatter(
        _out(cfg, f"{stem}_by_pattern.svg"),
        projection.coords,
        pattern_ids,
        title=f"{kind}: colored by pattern",
    )
    if any(int(c) >= 0 for c in cluster_ids):
        tsne.svg_scatter(
            _out(cfg, f"{stem}_by_cluster.svg"),
            projection.coords,
            cluster_ids,
            title=f"{kind}: colored by cluster",
        )


def cmd_project(cfg: PipelineConfig, kind: str = "subtract", allow_mismatch: bool = False) -> dict:
    """t-SNE the operation space to 2-D scatter files."""
    points = _read_ops(cfg, kind, allow_mismatch)
    clustering_path = _out(cfg, f"clustering_{kind}.json")
    cluster_ids = [-1] * len(points)
    if clustering_path.exists():
        doc, meta = artifacts.read_json(clustering_path)
        if not allow_mismatch:
            artifacts.require_consistent_meta(cfg.config_hash(), (clustering_path.name, meta))
        by_pair = dict(zip(doc["pair_ids"], doc["assignments"]))
        cluster_ids = [by_pair.get(pt.pair_id, -1) for pt in points]
    _project_points(cfg, kind, points, cluster_ids, f"tsne_{kind}")
    summary = {"kind": kind, "points": len(points)}
    _write_manifest(cfg, "project", summary)
    return summary


def _composition_lines(groups, points, assignment) -> list[str]:
    """Cluster composition in "premise → hypothesis (in/total)" style."""
    totals = {pid: g.size for pid, g in enumerate(groups)}
    clusters: dict[int, dict[int, int]] = {}
    for pt, cid in zip(points, assignment):
        clusters.setdefault(int(cid), {})
        clusters[int(cid)][pt.pattern_id] = clusters[int(cid)].get(pt.pattern_id, 0) + 1
    lines = []
    for cid in sorted(clusters):
        members = clusters[cid]
        size = sum(members.values())
        lines.append(f"Cluster {cid} ({size} points)")
        ranked = sorted(members.items(), key=lambda kv: (-kv[1], kv[0]))
        for pattern_id, in_cluster in ranked:
            group = groups[pattern_id]
            premise = patterns.render_template(group.pattern.premise_template)
            hypothesis = patterns.render_template(group.pattern.hypothesis_template)
            lines.append(
                f"  {premise} → {hypothesis} ({in_cluster}/{totals[pattern_id]})"
            )
    return lines


def cmd_analyze(cfg: PipelineConfig, kind: str = "subtract", allow_mismatch: bool = False) -> dict:
    """Inertia ranking, noise removal, unsupervised re-clustering, projections."""
    groups = _load_groups(cfg, allow_mismatch)
    points = _read_ops(cfg, kind, allow_mismatch)
    x, pattern_ids, pair_ids = ops.points_matrix(points)
    n_patterns = len(set(int(p) for p in pattern_ids))

    clustering = _cluster_points(cfg, x, cfg.cluster_k or n_patterns)
    ranking = pattern_inertia(points, clustering)
    _write_inertia_csv(cfg, f"inertia_{kind}.csv", ranking, groups)

    if cfg.noisy_top_n >= n_patterns:
        raise ConfigError(
            f"noisy_top_n={cfg.noisy_top_n} must be smaller than the number of "
            f"patterns ({n_patterns})"
        )
    surviving_groups = remove_noisy_patterns(groups, ranking, cfg.noisy_top_n)
    removed = {r.pattern_id for r in ranking[: cfg.noisy_top_n]}
    kept_ids = {pid for pid in range(len(groups)) if pid not in removed}
    filtered = [pt for pt in points if pt.pattern_id in kept_ids]
    patterns.write_group_manifest(
        _out(cfg, "filtered_groups.jsonl"),
        surviving_groups,
        artifacts.make_meta(cfg.config_hash(), removed_pattern_ids=sorted(removed)),
    )

    fx, f_pattern_ids, f_pair_ids = ops.points_matrix(filtered)
    distinct = np.unique(fx, axis=0).shape[0]
    k_max = min(cfg.k_max, distinct, fx.shape[0] - 1)
    if k_max < cfg.k_min:
        raise ConfigError(
            f"k range [{cfg.k_min}, {cfg.k_max}] is infeasible for {fx.shape[0]} "
            f"filtered points ({distinct} distinct)"
        )
    if k_max != cfg.k_max:
        log.warning("clamping k_max from %d to %d for %d points", cfg.k_max, k_max, fx.shape[0])
    report = select_k(
        fx,
        cfg.k_min,
        k_max,
        restarts=cfg.kmeans_restarts,
        seed=cfg.seed,
        max_iter=cfg.kmeans_max_iter,
        tol=cfg.kmeans_tol,
    )
    _write_kselect(cfg, kind, report)
    final_k = report.best_davies_bouldin_k
    if not report.agree:
        log.warning(
            "validity indices disagree (davies-bouldin %d vs silhouette %d); "
            "clustering at the davies-bouldin choice",
            report.best_davies_bouldin_k,
            report.best_silhouette_k,
        )
    final = _cluster_points(cfg, fx, final_k)
    _write_clustering(cfg, f"clustering_{kind}_final.json", final, f_pair_ids)

    lines = _composition_lines(groups, filtered, final.assignment)
    comp_path = _out(cfg, f"composition_{kind}.txt")
    comp_path.parent.mkdir(parents=True, exist_ok=True)
    header = artifacts.csv_header_lines(
        artifacts.make_meta(
            cfg.config_hash(),
            kind=kind,
            k=final_k,
            removed_patterns=cfg.noisy_top_n,
        ),
        timestamp=_now(),
    )
    comp_path.write_text("\n".join(header + lines) + "\n", encoding="utf-8")

    filtered_report = compute_report(
        f_pattern_ids, final.assignment, points=fx, ami_normalizer=cfg.ami_normalizer
    )
    artifacts.write_json(
        _out(cfg, f"metrics_{kind}_filtered.json"),
        {"k": final_k, "metrics": filtered_report.as_dict()},
        artifacts.make_meta(cfg.config_hash()),
    )

    cluster_by_pair = dict(zip((int(i) for i in f_pair_ids), (int(c) for c in final.assignment)))
    cluster_ids = [cluster_by_pair[pt.pair_id] for pt in filtered]
    _project_points(cfg, kind, filtered, cluster_ids, f"tsne_{kind}")

    summary = {
        "kind": kind,
        "removed_pattern_ids": sorted(removed),
        "best_davies_bouldin_k": report.best_davies_bouldin_k,
        "best_silhouette_k": report.best_silhouette_k,
        "agree": report.agree,
        "final_k": final_k,
        "filtered_metrics": filtered_report.as_dict(),
    }
    log.info(
        "analyze: removed %d noisy patterns, re-clustered %d points at k=%d",
        cfg.noisy_top_n,
        fx.shape[0],
        final_k,
    )
    _write_manifest(cfg, "analyze", summary)
    return summary


def cmd_pipeline(cfg: PipelineConfig, allow_mismatch: bool = False) -> dict:
    """Run extract, embed, build-ops, evaluate and analyze in order."""
    out = {"extract": cmd_extract(cfg)}
    out["embed"] = cmd_embed(cfg, allow_mismatch)
    out["build_ops"] = cmd_build_ops(cfg, allow_mismatch)
    out["evaluate"] = cmd_evaluate(cfg, allow_mismatch)
    analyze_kind = "subtract" if "subtract" in cfg.operations else cfg.operations[0]
    out["analyze"] = cmd_analyze(cfg, analyze_kind, allow_mismatch)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opspace",
        description=(
            "Mine string-edit patterns from sentence-pair corpora and measure "
            "how compactly each pattern clusters in the space of embedding "
            "operations."
        ),
    )
    parser.add_argument("-c", "--config", help="flat key-value config file")
    parser.add_argument(
        "-s",
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config value (repeatable)",
    )
    parser.add_argument(
        "--allow-config-mismatch",
        action="store_true",
        help="consume artifacts produced by a different configuration",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("extract", help="ingest corpora and mine patterns")
    sub.add_parser("embed", help="produce sentence vectors for the mined pairs")
    sub.add_parser("build-ops", help="map embedded pairs into the operation space")
    for name, help_text in (
        ("cluster", "k-means the operation space and rank pattern inertia"),
        ("select-k", "scan cluster counts with internal validity indices"),
        ("project", "t-SNE the operation space to 2-D"),
        ("analyze", "noise removal, unsupervised re-clustering, projections"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--kind", default="subtract", help="operation kind (default subtract)")
    sub.add_parser("evaluate", help="score every operation kind against the patterns")
    sub.add_parser("pipeline", help="run all stages in order")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = apply_overrides(load_config(args.config), args.set)
        mismatch = args.allow_config_mismatch
        if args.command == "extract":
            cmd_extract(cfg)
        elif args.command == "embed":
            cmd_embed(cfg, mismatch)
        elif args.command == "build-ops":
            cmd_build_ops(cfg, mismatch)
        elif args.command == "cluster":
            cmd_cluster(cfg, args.kind, mismatch)
        elif args.command == "evaluate":
            cmd_evaluate(cfg, mismatch)
        elif args.command == "select-k":
            cmd_select_k(cfg, args.kind, mismatch)
        elif args.command == "project":
            cmd_project(cfg, args.kind, mismatch)
        elif args.command == "analyze":
            cmd_analyze(cfg, args.kind, mismatch)
        elif args.command == "pipeline":
            cmd_pipeline(cfg, mismatch)
    except OpspaceError as exc:
        log.error("%s", exc)
        return exc.exit_code
    except (ValueError, AssertionError) as exc:
        log.error("%s", exc)
        return 4
    except OSError as exc:
        log.error("%s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
