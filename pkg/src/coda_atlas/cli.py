"""Command-line interface: the whole workflow as one executable.

Subcommands mirror the analysis stages: validate, describe, diagnose, clr,
biplot, rank, cluster, render, and pipeline (which runs everything and
writes a hash manifest). All domain failures exit with code 1 and print a
single-line machine-parseable record (ErrorName:detail) to stderr; usage
errors exit with code 2.
"""

from __future__ import annotations

import argparse
import os
import sys

from .biplot import fit_biplot, make_link, model_to_json, rank_along_link, ranking_csv
from .cluster import (
    assignment_csv,
    cluster_profile,
    distance_matrix,
    hierarchical_cluster,
    merge_history_json,
    profiles_json,
)
from .composition import IndicatorTable, clr_matrix
from .errors import CodaError, InvalidOptions, IoFailure, UnknownPart, UnknownRatio
from ._fmt import dumps_json
from .ingest import (
    IngestConfig,
    clr_csv,
    parse_table,
    serialize_table,
    write_reports,
)
from .render import RenderOptions, render_biplot
from .stats import describe_csv, pathology_json, pathology_report, summarize_table


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="indicator table CSV")
    parser.add_argument("--config", help="ingest config JSON file")
    parser.add_argument("-o", "--out", default=".", help="output directory")


def _load(args) -> tuple[IndicatorTable, IngestConfig]:
    if args.config:
        with open(args.config, "rb") as handle:
            config = IngestConfig.from_json(handle.read())
    else:
        config = IngestConfig()
    with open(args.input, "rb") as handle:
        table = parse_table(handle.read(), config)
    return table, config


def _write(args, name: str, content: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, name)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(content)
    return path


def _fit(table: IndicatorTable, alpha: float = 1.0, k: int = 2):
    return fit_biplot(clr_matrix(table), alpha=alpha, k=k)


def _cmd_validate(args) -> int:
    table, _ = _load(args)
    sectors = sorted({e.sector_code for e in table.entities})
    print(f"valid: {table.n} entities x {table.D} parts")
    print(f"sectors: {', '.join(sectors)}")
    for part in table.parts:
        print(f"part: {part.name} [{part.unit}, {part.role}]")
    return 0


def _cmd_describe(args) -> int:
    table, config = _load(args)
    summaries = summarize_table(table, config.ratio_catalog)
    print(_write(args, "describe.csv", describe_csv(summaries)))
    return 0


def _cmd_diagnose(args) -> int:
    table, config = _load(args)
    report = pathology_report(table, config.ratio_catalog)
    print(_write(args, "pathology.json", dumps_json(pathology_json(report))))
    return 0


def _cmd_clr(args) -> int:
    table, _ = _load(args)
    print(_write(args, "clr.csv", clr_csv(clr_matrix(table))))
    return 0


def _cmd_biplot(args) -> int:
    table, _ = _load(args)
    model = _fit(table, alpha=args.alpha, k=args.rank)
    print(_write(args, "model.json", model_to_json(model)))
    return 0


def _cmd_rank(args) -> int:
    table, config = _load(args)
    by_name = {r.name: r for r in config.ratio_catalog}
    if args.ratio not in by_name:
        raise UnknownRatio(args.ratio)
    definition = by_name[args.ratio]
    model = _fit(table)
    i, j = definition.resolve(table)
    result = rank_along_link(model, make_link(model, i, j, label=definition.name))
    print(_write(args, f"rankings_{definition.name}.csv", ranking_csv(result)))
    return 0


def _cmd_cluster(args) -> int:
    if args.clusters is not None and args.threshold is not None:
        raise InvalidOptions("--clusters and --threshold are mutually exclusive")
    table, _ = _load(args)
    dist = distance_matrix(clr_matrix(table))
    assignment = hierarchical_cluster(
        dist,
        linkage=args.linkage,
        n_clusters=args.clusters,
        threshold=args.threshold,
    )
    profiles = cluster_profile(table, assignment)
    print(_write(args, "clusters.csv", assignment_csv(assignment)))
    print(_write(args, "merges.json", dumps_json(merge_history_json(assignment))))
    print(
        _write(
            args,
            "cluster_profiles.json",
            dumps_json(profiles_json(profiles, table.part_names)),
        )
    )
    return 0


def _split_links(raw: str | None) -> tuple[str, ...]:
    if not raw:
        return ()
    return tuple(name.strip() for name in raw.split(",") if name.strip())


def _cmd_render(args) -> int:
    table, config = _load(args)
    model = _fit(table)
    options = RenderOptions(
        width=args.width,
        height=args.height,
        show_links=_split_links(args.links),
        ratio_catalog=config.ratio_catalog,
    )
    print(_write(args, "biplot.svg", render_biplot(model, table, options)))
    return 0


def _resolvable_links(table: IndicatorTable, config: IngestConfig, model):
    names = []
    for definition in config.ratio_catalog:
        try:
            i, j = definition.resolve(table)
        except UnknownPart:
            continue
        if not make_link(model, i, j, label=definition.name).degenerate:
            names.append(definition.name)
    return tuple(names)


def _cmd_pipeline(args) -> int:
    table, config = _load(args)
    clr = clr_matrix(table)
    model = fit_biplot(clr, alpha=1.0, k=2)

    outputs: dict[str, str] = {}
    outputs["table.csv"] = serialize_table(table)
    outputs["describe.csv"] = describe_csv(summarize_table(table, config.ratio_catalog))
    outputs["pathology.json"] = dumps_json(
        pathology_json(pathology_report(table, config.ratio_catalog))
    )
    outputs["clr.csv"] = clr_csv(clr)
    outputs["model.json"] = model_to_json(model)

    link_names = _resolvable_links(table, config, model)
    by_name = {r.name: r for r in config.ratio_catalog}
    for name in link_names:
        definition = by_name[name]
        i, j = definition.resolve(table)
        result = rank_along_link(model, make_link(model, i, j, label=name))
        outputs[f"rankings_{name}.csv"] = ranking_csv(result)

    dist = distance_matrix(clr)
    assignment = hierarchical_cluster(dist, linkage="complete")
    outputs["clusters.csv"] = assignment_csv(assignment)
    outputs["merges.json"] = dumps_json(merge_history_json(assignment))
    outputs["cluster_profiles.json"] = dumps_json(
        profiles_json(cluster_profile(table, assignment), table.part_names)
    )

    options = RenderOptions(show_links=link_names, ratio_catalog=config.ratio_catalog)
    outputs["biplot.svg"] = render_biplot(model, table, options)

    manifest = write_reports(outputs, args.out)
    for entry in manifest["files"]:
        print(os.path.join(args.out, entry["name"]))
    print(os.path.join(args.out, "manifest.json"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coda-atlas",
        description="Log-ratio analysis of strictly positive indicator tables",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("validate", help="parse and validate a table")
    _add_common(p)
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("describe", help="write summary statistics CSV")
    _add_common(p)
    p.set_defaults(handler=_cmd_describe)

    p = sub.add_parser("diagnose", help="write raw-vs-log pathology JSON")
    _add_common(p)
    p.set_defaults(handler=_cmd_diagnose)

    p = sub.add_parser("clr", help="write the CLR matrix CSV")
    _add_common(p)
    p.set_defaults(handler=_cmd_clr)

    p = sub.add_parser("biplot", help="fit a biplot and write model JSON")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=1.0, help="scaling exponent in [0,1]")
    p.add_argument("--rank", type=int, default=2, help="number of components")
    p.set_defaults(handler=_cmd_biplot)

    p = sub.add_parser("rank", help="rank entities along a ratio link")
    _add_common(p)
    p.add_argument("--ratio", required=True, help="catalog ratio name")
    p.set_defaults(handler=_cmd_rank)

    p = sub.add_parser("cluster", help="agglomerative clustering on Aitchison distance")
    _add_common(p)
    p.add_argument(
        "--linkage", default="complete", choices=("single", "complete", "average")
    )
    p.add_argument("--clusters", type=int, default=None, help="cut at this cluster count")
    p.add_argument("--threshold", type=float, default=None, help="cut at this distance")
    p.set_defaults(handler=_cmd_cluster)

    p = sub.add_parser("render", help="render the biplot SVG")
    _add_common(p)
    p.add_argument("--links", default="", help="comma-separated ratio names to draw")
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=600)
    p.set_defaults(handler=_cmd_render)

    p = sub.add_parser("pipeline", help="run every stage and write a manifest")
    _add_common(p)
    p.set_defaults(handler=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except CodaError as exc:
        print(exc.record(), file=sys.stderr)
        return 1
    except OSError as exc:
        print(IoFailure(str(exc)).record(), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
