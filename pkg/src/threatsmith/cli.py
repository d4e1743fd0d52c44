"""Command-line surface: scope management, library update, analysis, results, service.

File-based workflow (scope.json, snapshot.json, report.json) so runs are
scriptable and reproducible. Exit codes: 0 success, 1 usage, 2 validation,
3 partial analysis (missing data for some component), 4 network/update
failure.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import scopefile
from .analysis import MissingData, MitigationCatalog, analyze_scope, bundled_catalog, bundled_snapshot_path
from .library import (
    IoFailure,
    MalformedSnapshot,
    load_snapshot,
    save_snapshot,
    update_library,
)
from .model import (
    BUILTIN_KINDS,
    Component,
    ComponentKind,
    Scope,
    UnknownKind,
    validate_scope,
)
from .report import render_report
from .sources import API_KEY_ENV, SourceClient, SourceConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_PARTIAL = 3
EXIT_NETWORK = 4

# The spec'd exit-code map reserves 2 for validation; click's default
# usage-error code is 2, so usage errors are remapped to 1.
click.UsageError.exit_code = EXIT_USAGE


@click.group()
def cli() -> None:
    """Evidence-based ICS threat modeling from historical CVE-CWE pairs."""


# ---------------------------------------------------------------- scope ---

@cli.group()
def scope() -> None:
    """Manage the scope file (the set of components under analysis)."""


scope_file_option = click.option(
    "--file", "path", default="scope.json", show_default=True,
    help="Scope file to operate on.",
)


@scope.command("init")
@scope_file_option
@click.option("--name", default="scope", show_default=True)
def scope_init(path: str, name: str) -> None:
    """Create an empty scope file."""
    scopefile.save_scope(scopefile.empty_scope(name), path)
    click.echo(f"initialized {path}")


@scope.command("add")
@scope_file_option
@click.option("--kind", "kind_name", help=f"Built-in kind: one of {', '.join(BUILTIN_KINDS)}.")
@click.option("--custom", is_flag=True, help="Add a custom component instead of a built-in kind.")
@click.option("--name", help="Custom component name (with --custom).")
@click.option("--desc", default="", help="Custom component description.")
@click.option("--keywords", help="Comma-separated search keywords (overrides defaults).")
@click.pass_context
def scope_add(ctx, path, kind_name, custom, name, desc, keywords) -> None:
    """Add a component to the scope."""
    current = _load_scope_or_fail(path)
    if custom:
        if not name:
            raise click.UsageError("--custom requires --name")
        kind = ComponentKind(name=name, description=desc, custom=True)
        label = name
    else:
        if not kind_name:
            raise click.UsageError("provide --kind or --custom --name")
        try:
            kind = ComponentKind.builtin(kind_name)
        except UnknownKind:
            click.echo(f"unknown kind: {kind_name} (expected one of {', '.join(BUILTIN_KINDS)})", err=True)
            ctx.exit(EXIT_VALIDATION)
        label = kind_name
    kw = (
        tuple(k.strip() for k in keywords.split(",") if k.strip())
        if keywords
        else scopefile.default_keywords_for(kind)
    )
    component = Component(
        id=scopefile.new_component_id(current), kind=kind, label=label, keywords=kw
    )
    updated = Scope(
        name=current.name,
        components=current.components + (component,),
        created=current.created,
    )
    violations = [
        v for v in validate_scope(updated) if "duplicate" in v.message
    ]
    if violations:
        for v in violations:
            click.echo(f"validation: {v.message}", err=True)
        ctx.exit(EXIT_VALIDATION)
    scopefile.save_scope(updated, path)
    click.echo(f"added {component.id}: {label} (keywords: {', '.join(kw)})")


@scope.command("remove")
@scope_file_option
@click.argument("component_id")
@click.pass_context
def scope_remove(ctx, path, component_id) -> None:
    """Remove a component by id."""
    current = _load_scope_or_fail(path)
    remaining = tuple(c for c in current.components if c.id != component_id)
    if len(remaining) == len(current.components):
        click.echo(f"no component with id {component_id}", err=True)
        ctx.exit(EXIT_VALIDATION)
    scopefile.save_scope(
        Scope(name=current.name, components=remaining, created=current.created), path
    )
    click.echo(f"removed {component_id}")


@scope.command("list")
@scope_file_option
def scope_list(path: str) -> None:
    """List scope components with ids, kinds, and keywords."""
    current = _load_scope_or_fail(path)
    click.echo(f"scope: {current.name} ({len(current.components)} components)")
    for c in current.components:
        kind = f"custom:{c.kind.name}" if c.kind.custom else c.kind.name
        click.echo(f"  {c.id}  {c.label}  [{kind}]  keywords: {', '.join(c.keywords)}")


def _load_scope_or_fail(path: str) -> Scope:
    try:
        return scopefile.load_scope(path)
    except scopefile.MissingScopeFile:
        raise click.ClickException(
            f"scope file not found: {path} (run 'threatsmith scope init' first)"
        )
    except scopefile.MalformedScopeFile as exc:
        raise click.ClickException(f"malformed scope file {path}: {exc}")


# -------------------------------------------------------------- analyze ---

@cli.command("analyze")
@click.option("--scope", "scope_path", default="scope.json", show_default=True)
@click.option(
    "--snapshot", "snapshot_path", default=None,
    help="Threat-library snapshot file [default: bundled case-study snapshot].",
)
@click.option("--out", "out_path", default="report.json", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "markdown"]), default="json",
              show_default=True)
@click.option("--catalog", "catalog_path", default=None,
              help="Mitigation catalog file [default: bundled catalog].")
@click.pass_context
def cmd_analyze(ctx, scope_path, snapshot_path, out_path, fmt, catalog_path) -> None:
    """Apply the methodology to every component in scope and write a report."""
    current = _load_scope_or_fail(scope_path)
    violations = validate_scope(current)
    if violations:
        for v in violations:
            click.echo(f"validation: {v.message}", err=True)
        ctx.exit(EXIT_VALIDATION)
    try:
        snapshot = load_snapshot(snapshot_path or bundled_snapshot_path())
    except (MalformedSnapshot, IoFailure) as exc:
        click.echo(f"cannot load snapshot: {exc}", err=True)
        ctx.exit(EXIT_VALIDATION)
    catalog = MitigationCatalog.load(catalog_path) if catalog_path else bundled_catalog()
    results = analyze_scope(current, snapshot, catalog)
    Path(out_path).write_bytes(render_report(results, current, fmt))
    missing = [r for r in results.values() if isinstance(r, MissingData)]
    click.echo(f"wrote {out_path} ({len(results)} components, {len(missing)} missing data)")
    if missing:
        for m in missing:
            click.echo(
                f"  missing data for {m.component_id}: keyword(s) "
                f"{', '.join(m.missing_keywords)} not in snapshot", err=True,
            )
        ctx.exit(EXIT_PARTIAL)


# -------------------------------------------------------------- results ---

@cli.command("results")
@click.argument("report_path")
@click.option("--all", "show_all", is_flag=True, help="List every threat per component.")
@click.option("--top5", "show_top5", is_flag=True, help="List only the top five per component.")
@click.pass_context
def cmd_results(ctx, report_path, show_all, show_top5) -> None:
    """Print per-component threat tables from a JSON report."""
    if show_all and show_top5:
        raise click.UsageError("--all and --top5 are mutually exclusive")
    view = "all" if show_all else "top5"
    try:
        doc = json.loads(Path(report_path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise click.ClickException(f"report not found: {report_path}")
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"malformed report: {exc}")
    for comp in doc["components"]:
        click.echo(f"== {comp['label']} ({comp['kind']}) ==")
        if "missing_data" in comp:
            click.echo("  (no data)")
            continue
        rows = comp["threats"] if view == "all" else comp["top5"]
        for t in rows:
            click.echo(
                f"  {t['cwe']:<10} {t['count']:>4} CVEs  {t['percent']:>3}%  {t['title']}"
            )
        click.echo(
            f"  total: {len(comp['threats'])} threats / {comp['total_cves']} CVE entries"
        )


# --------------------------------------------------------------- update ---

@cli.command("update")
@click.option("--snapshot", "snapshot_path", required=True,
              help="Snapshot file to refresh in place (atomic replace).")
@click.option("--keywords", default=None,
              help="Comma-separated keywords to refresh [default: all built-in kinds].")
@click.option("--search-endpoint", required=True)
@click.option("--detail-endpoint", required=True)
@click.option("--note", default=None, help="Replace the snapshot's source note.")
@click.option("--retry-max", default=4, show_default=True,
              help="Retries per request on transient failures.")
@click.option("--backoff", default=1.0, show_default=True,
              help="Base backoff delay in seconds (doubles per retry, with jitter).")
@click.pass_context
def cmd_update(ctx, snapshot_path, keywords, search_endpoint, detail_endpoint, note,
               retry_max, backoff) -> None:
    """Refresh the threat library from the vulnerability sources."""
    from .model import DEFAULT_KEYWORDS

    try:
        current = load_snapshot(snapshot_path)
    except (MalformedSnapshot, IoFailure) as exc:
        click.echo(f"cannot load snapshot: {exc}", err=True)
        ctx.exit(EXIT_VALIDATION)
    config = SourceConfig.from_env(
        search_endpoint, detail_endpoint, retry_max=retry_max, backoff_base=backoff
    )
    if not config.api_key:
        click.echo(
            f"warning: {API_KEY_ENV} not set; using the keyless "
            f"{config.policy.max_requests}-per-{config.policy.window_seconds:.0f}s "
            "rate limit, which is slow for large components", err=True,
        )
    kws = (
        [k.strip() for k in keywords.split(",") if k.strip()]
        if keywords
        else [kw for kws_ in DEFAULT_KEYWORDS.values() for kw in kws_]
    )
    client = SourceClient(config)
    updated, report = update_library(current, kws, client)
    if note is not None:
        from dataclasses import replace
        updated = replace(updated, source_note=note)
    save_snapshot(updated, snapshot_path)
    for kw in report.refreshed:
        entry = updated.entries[kw]
        click.echo(f"  {kw}: {len(entry.pairs)} pairs, {entry.unmapped_count} unmapped")
    for kw, reason in report.failures:
        click.echo(f"  {kw}: FAILED ({reason}); previous entry kept", err=True)
    click.echo(
        f"updated {snapshot_path}: {len(report.refreshed)} refreshed, "
        f"{len(report.failures)} failed"
    )
    if report.failures:
        ctx.exit(EXIT_NETWORK)


# ---------------------------------------------------------------- serve ---

@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True)
@click.option("--snapshot", "snapshot_path", default=None)
@click.option("--scope", "scope_path", default="scope.json", show_default=True)
@click.option("--search-endpoint", default=None)
@click.option("--detail-endpoint", default=None)
def cmd_serve(host, port, snapshot_path, scope_path, search_endpoint, detail_endpoint) -> None:
    """Run the local HTTP API for the web UI."""
    import uvicorn

    from .service import create_app

    app = create_app(
        snapshot_path=snapshot_path or bundled_snapshot_path(),
        scope_path=scope_path,
        search_endpoint=search_endpoint,
        detail_endpoint=detail_endpoint,
    )
    uvicorn.run(app, host=host, port=port)


def main() -> int:
    return cli(standalone_mode=True)


if __name__ == "__main__":
    sys.exit(main())
