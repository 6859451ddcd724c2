"""Command-line front end: analyze, metrics, refactor, render, serve.

Exit codes: 0 clean, 1 input or configuration error, 2 critical findings
present, 3 refactoring budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .corpus import CorpusError, CutIndex, load_corpus
from .graph import build_graph, export_graph
from .jsonio import canonical_dumps, write_json
from .model import Corpus, ModelError
from .names import DomainName, NameError_
from .refactor import (RULES, PreservationViolated, match_rule,
                       refactor_until_clean)
from .report import (metrics_table, render_graph_figure, render_metrics_figure,
                     write_metrics_csv)
from .smells import (HIGH_ADMINISTRATIVE_COMPLEXITY, CatalogueConfig,
                     ConfigError, Severity, findings_to_json, run_catalogue)
from .zonefile import ZoneFileError, serialize_zone

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CRITICAL_FINDINGS = 2
EXIT_BUDGET_EXHAUSTED = 3

# Environment override: a JSON file with CliConfig fields.
CONFIG_ENV = "DNS_ADVISOR_CONFIG"

_ENV_KEYS = {"zonePaths": "zones", "metadataPath": "metadata",
             "thresholdsPath": "thresholds", "outputDir": "out",
             "format": "format", "topAnchor": "anchor"}


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors with status 2; this tool reserves 2 for
    critical findings, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _env_defaults() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorpusError(f"cannot read {CONFIG_ENV} file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{CONFIG_ENV} file {path} is not valid JSON: {exc}")
    unknown = set(doc) - set(_ENV_KEYS)
    if unknown:
        raise CorpusError(
            f"{CONFIG_ENV} file {path} has unknown keys: {sorted(unknown)}")
    return {_ENV_KEYS[key]: value for key, value in doc.items()}


def _add_corpus_options(parser: argparse.ArgumentParser,
                        defaults: dict) -> None:
    parser.add_argument("--zones", nargs="+", metavar="GLOB",
                        default=defaults.get("zones"),
                        help="zone file paths or globs")
    parser.add_argument("--metadata", metavar="PATH",
                        default=defaults.get("metadata"),
                        help="deployment metadata JSON")
    parser.add_argument("--thresholds", metavar="PATH",
                        default=defaults.get("thresholds"),
                        help="smell threshold configuration JSON")
    parser.add_argument("--out", metavar="DIR",
                        default=defaults.get("out", "out"),
                        help="output directory (default: out)")
    parser.add_argument("--format", choices=["json", "text"],
                        default=defaults.get("format", "json"),
                        help="stdout format (default: json)")
    parser.add_argument("--anchor", metavar="NAME",
                        default=defaults.get("anchor", "."),
                        help="top zone resolution starts from (default: .)")


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    defaults = defaults or {}
    parser = _Parser(prog="dns-advisor",
                     description="DNS configuration analysis and refactoring")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, text in [("analyze", "build the graph, run detection, write artifacts"),
                       ("metrics", "compute per-zone metrics with CSV and chart"),
                       ("render", "export the dependency graph as JSON and PNG"),
                       ("refactor", "apply refactoring rules and regenerate zones")]:
        sub = commands.add_parser(name, help=text)
        _add_corpus_options(sub, defaults)
        if name == "refactor":
            sub.add_argument("--rules", metavar="ID[,ID...]",
                             default="add-glue-record,move-server-location",
                             help="comma-separated rule ids to apply in order")
            sub.add_argument("--budget", type=int, default=100,
                             help="maximum rule applications (default: 100)")
            sub.add_argument("--locations", metavar="TOKEN[,TOKEN...]",
                             default="",
                             help="candidate location pool for server moves")
            sub.add_argument("--dry-run", action="store_true",
                             help="report matches without applying anything")

    serve = commands.add_parser("serve", help="run the HTTP analysis service")
    _add_corpus_options(serve, defaults)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--persist", metavar="DIR", default=None,
                       help="directory for session snapshots")
    return parser


def _load(args) -> tuple[Corpus, CatalogueConfig]:
    if not args.zones:
        raise CorpusError("no zone files given; use --zones")
    anchor = DomainName.parse(args.anchor)
    corpus = load_corpus(args.zones, args.metadata, anchor=anchor)
    if args.thresholds:
        path = Path(args.thresholds)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise CorpusError(f"cannot read thresholds file {path}: {exc}")
        except json.JSONDecodeError as exc:
            raise CorpusError(
                f"thresholds file {path} is not valid JSON: {exc}")
        config = CatalogueConfig.from_json(doc)
    else:
        config = CatalogueConfig()
    return corpus, config


def _findings_text(findings) -> str:
    if not findings:
        return "no findings\n"
    lines = [f"{'severity':<10} {'smell':<34} zone"]
    for finding in findings:
        lines.append(f"{finding.severity.value:<10} {finding.smell:<34} "
                     f"{finding.zone}")
    critical = sum(1 for f in findings if f.severity is Severity.CRITICAL)
    lines.append(f"{len(findings)} finding(s), {critical} critical")
    return "\n".join(lines) + "\n"


def _exit_for(findings) -> int:
    if any(f.severity is Severity.CRITICAL for f in findings):
        return EXIT_CRITICAL_FINDINGS
    return EXIT_OK


def _zone_filename(origin: DomainName) -> str:
    text = str(origin)
    return "root.zone" if text == "." else f"{text.rstrip('.')}.zone"


def cmd_analyze(args) -> int:
    corpus, config = _load(args)
    cuts = CutIndex(corpus)
    graph = build_graph(corpus, cuts)
    findings = run_catalogue(corpus, graph, config, cuts)
    out = Path(args.out)
    write_json(out / "graph.json", export_graph(graph))
    write_json(out / "findings.json", findings_to_json(findings))
    write_json(out / "metrics.json", _metrics_document(corpus, graph, cuts, config))
    if args.format == "json":
        sys.stdout.write(canonical_dumps(findings_to_json(findings)))
    else:
        sys.stdout.write(_findings_text(findings))
    return _exit_for(findings)


def _metrics_document(corpus, graph, cuts, config) -> list[dict]:
    from .metrics import (administrative_complexity, server_redundancy,
                          zone_influence)
    document = []
    for cut in cuts.cuts:
        if not cuts.delegation(cut).targets:
            continue
        entries = [administrative_complexity(corpus, cut, cuts,
                                             config.ac_exponent)]
        entries.extend(server_redundancy(corpus, cut, cuts))
        entries.append(zone_influence(graph, str(cut)))
        document.append({"zone": str(cut),
                         "metrics": [entry.to_json() for entry in entries]})
    document.sort(key=lambda item: item["zone"])
    return document


def cmd_metrics(args) -> int:
    corpus, config = _load(args)
    cuts = CutIndex(corpus)
    graph = build_graph(corpus, cuts)
    rows = metrics_table(corpus, graph, cuts, config)
    out = Path(args.out)
    write_json(out / "metrics.json", _metrics_document(corpus, graph, cuts, config))
    write_metrics_csv(rows, out / "metrics.csv")
    render_metrics_figure(
        rows, out / "metrics.png",
        ac_threshold=config.threshold(HIGH_ADMINISTRATIVE_COMPLEXITY, "maxAc"))
    if args.format == "json":
        sys.stdout.write(canonical_dumps(_metrics_document(corpus, graph,
                                                           cuts, config)))
    else:
        header = "zone".ljust(24) + " Ac     SR GR NR PR influence"
        lines = [header]
        for row in rows:
            lines.append(
                f"{row['zone']:<24} {row['administrativeComplexity']:<6.4g} "
                f"{row['serverRedundancy']:<2.0f} {row['geographicRedundancy']:<2.0f} "
                f"{row['networkRedundancy']:<2.0f} {row['prefixRedundancy']:<2.0f} "
                f"{row['zoneInfluence']:.0f}")
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_render(args) -> int:
    corpus, _ = _load(args)
    cuts = CutIndex(corpus)
    graph = build_graph(corpus, cuts)
    out = Path(args.out)
    write_json(out / "graph.json", export_graph(graph))
    render_graph_figure(graph, out / "graph.png")
    if args.format == "json":
        sys.stdout.write(canonical_dumps(export_graph(graph)))
    else:
        sys.stdout.write(f"{len(graph.nodes)} nodes, {len(graph.edges)} edges "
                         f"written to {out / 'graph.png'}\n")
    return EXIT_OK


def cmd_refactor(args) -> int:
    corpus, config = _load(args)
    rule_ids = [token for token in args.rules.split(",") if token]
    for rule_id in rule_ids:
        if rule_id not in RULES:
            raise CorpusError(f"unknown rule id {rule_id!r}")
    pool = tuple(token for token in args.locations.split(",") if token)
    params = {"move-server-location": {"locations": pool},
              "add-server-in-location": {"locations": pool}}
    out = Path(args.out)

    if args.dry_run:
        cuts = CutIndex(corpus)
        graph = build_graph(corpus, cuts)
        findings = run_catalogue(corpus, graph, config, cuts)
        recommendations = []
        for rule_id in rule_ids:
            for match in match_rule(corpus, graph, rule_id, config,
                                    findings, cuts):
                recommendations.append(match.to_json())
        document = {"dryRun": True, "recommendations": recommendations}
        write_json(out / "refactoring.json", document)
        if args.format == "json":
            sys.stdout.write(canonical_dumps(document))
        else:
            sys.stdout.write(f"{len(recommendations)} recommendation(s)\n")
        return EXIT_OK

    outcome = refactor_until_clean(corpus, rule_ids, config,
                                   budget=args.budget, params=params)
    zones_dir = out / "zones"
    zones_dir.mkdir(parents=True, exist_ok=True)
    for zone in outcome.corpus.zones:
        path = zones_dir / _zone_filename(zone.origin)
        path.write_text(serialize_zone(zone), encoding="utf-8")
    document = outcome.to_json()
    write_json(out / "refactoring.json", document)
    if args.format == "json":
        sys.stdout.write(canonical_dumps(document))
    else:
        sys.stdout.write(
            f"applied {len(outcome.applied)} rule application(s), "
            f"{len(outcome.recommendations)} recommendation(s), "
            f"{len(outcome.findings)} finding(s) remain\n")
    if not outcome.complete:
        return EXIT_BUDGET_EXHAUSTED
    return _exit_for(outcome.findings)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    corpus, config = _load(args)
    app = create_app(corpus, config, persist_dir=args.persist)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


_COMMANDS = {"analyze": cmd_analyze, "metrics": cmd_metrics,
             "render": cmd_render, "refactor": cmd_refactor,
             "serve": cmd_serve}


def main(argv=None) -> int:
    try:
        defaults = _env_defaults()
        parser = build_parser(defaults)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (CorpusError, ZoneFileError, ModelError, NameError_,
            ConfigError) as exc:
        print(f"dns-advisor: error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except PreservationViolated as exc:
        print(f"dns-advisor: refactoring aborted: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
