"""Command-line interface. Every failure exits nonzero with one
machine-parseable line on stderr: ``error code=<Code> <detail>``."""

from __future__ import annotations

import json
import sys

import click

from ..evaluation import (
    SystemKind,
    compare_systems,
    compute_metrics,
    fisher_exact,
    mcnemar_test,
    read_records_jsonl,
    render_report_table,
    wilson_interval,
    write_records_jsonl,
)
from ..evaluation.metrics import render_tier_breakdown
from ..governance.ledger import verify_ledger_file
from ..simulation import load_experiment_config, run_experiment
from ..submission import Submission


def fail(code: str, detail: str, status: int = 1) -> None:
    click.echo(f"error code={code} {detail}", err=True)
    sys.exit(status)


@click.group()
def main():
    """Decision-negative underwriting workflow tools."""


@main.command()
@click.option("--config", "config_path", default=None, help="Service config file (JSON or TOML).")
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
def serve(config_path, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .app import create_app
    from .config import ConfigError, load_service_config

    try:
        config = load_service_config(config_path)
    except (ConfigError, OSError, ValueError) as exc:
        fail("ConfigError", str(exc))
    app = create_app(config)
    uvicorn.run(app, host=host or config.listen_host, port=port or config.listen_port)


@main.command()
@click.argument("submission_file", type=click.Path(exists=True))
@click.option("--data-dir", default="./uwflow-data", show_default=True)
def ingest(submission_file, data_dir):
    """Run one submission file through the pipeline with the scripted backend."""
    from ..engine import Engine
    from ..gateway import fixture_gateway
    from ..governance.ledger import AuditLedger, FileLedgerStore
    from ..knowledge import RetrievalStore, build_default_registry
    from ..submission import MalformedSubmission
    from .store import CaseStore

    try:
        with open(submission_file, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        submission = Submission.from_dict(payload)
    except json.JSONDecodeError as exc:
        fail("NotJson", str(exc))
    except MalformedSubmission as exc:
        fail("MalformedSubmission", str(exc))
    store = CaseStore(data_dir)
    ledger = AuditLedger(FileLedgerStore(store.ledger_path()))
    retrieval = RetrievalStore.from_fixture()
    engine = Engine(fixture_gateway(), build_default_registry(retrieval, ledger),
                    ledger, retrieval)
    case = engine.run_case(submission)
    store.save_case(engine, case.case_id)
    click.echo(json.dumps({
        "case_id": case.case_id,
        "state": case.state.value,
        "critique_cycles_used": case.critique_cycles_used,
        "escalation_reason": case.last_escalation_detail(),
        "ledger": store.ledger_path(),
    }, sort_keys=True))


@main.group()
def simulate():
    """Monte Carlo simulation commands."""


@simulate.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, help="Write records as JSON Lines.")
@click.option("--summary/--no-summary", default=True)
def simulate_run(config_path, out_path, summary):
    """Run the configured experiment; emit records and a summary table."""
    from .config import ConfigError

    try:
        config = load_experiment_config(config_path)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        fail("ConfigError", str(exc))
    records = run_experiment(config)
    if out_path:
        write_records_jsonl(records, out_path)
        click.echo(f"wrote {len(records)} records to {out_path}")
    if summary:
        reports = []
        for system in config.systems:
            subset = [r for r in records if r.system is system]
            if subset:
                reports.append(compute_metrics(subset))
        click.echo(render_report_table(reports))


@main.command()
@click.argument("records_file", type=click.Path(exists=True))
@click.option("--stratify", type=click.Choice(["tier"]), default=None)
@click.option("--json", "as_json", is_flag=True, default=False)
def evaluate(records_file, stratify, as_json):
    """Metric battery over a JSON Lines record file."""
    from ..evaluation.metrics import EmptyInput, UnpairedComparison

    try:
        records = read_records_jsonl(records_file)
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        fail("BadRecords", str(exc))
    if not records:
        fail("EmptyInput", "no records in file")
    systems = sorted({r.system for r in records}, key=lambda s: s.value)
    reports = []
    for system in systems:
        subset = [r for r in records if r.system is system]
        try:
            reports.append(compute_metrics(subset, stratify_by_tier=stratify == "tier"))
        except (EmptyInput, UnpairedComparison) as exc:
            fail(type(exc).__name__, str(exc))
    if as_json:
        out = {rep.system: rep.to_dict() for rep in reports}
        if (SystemKind.AGENT_ONLY in systems and SystemKind.AGENT_CRITIC in systems):
            try:
                out["mcnemar_agent_vs_critic"] = compare_systems(
                    records, SystemKind.AGENT_ONLY, SystemKind.AGENT_CRITIC
                )
            except UnpairedComparison:
                pass
        click.echo(json.dumps(out, sort_keys=True, indent=2))
        return
    click.echo(render_report_table(reports))
    if stratify == "tier":
        for rep in reports:
            click.echo("")
            click.echo(render_tier_breakdown(rep))
    if SystemKind.AGENT_ONLY in systems and SystemKind.AGENT_CRITIC in systems:
        try:
            cmp = compare_systems(records, SystemKind.AGENT_ONLY, SystemKind.AGENT_CRITIC)
            click.echo(
                f"\nMcNemar decision accuracy: discordant "
                f"{cmp['discordant_a_only']}/{cmp['discordant_b_only']}, "
                f"p = {cmp['p_value']:.6g}"
            )
        except UnpairedComparison:
            pass


@main.group()
def audit():
    """Audit ledger commands."""


@audit.command("verify")
@click.argument("ledger_file", type=click.Path(exists=True))
def audit_verify(ledger_file):
    """Recompute the full hash chain of a ledger file."""
    report = verify_ledger_file(ledger_file)
    if report.clean:
        click.echo(f"clean: {report.records_verified} records verified")
        return
    fail("ChainBroken",
         f"first_bad_seq={report.first_bad_seq} detail={report.detail!r}", status=2)


@audit.command("export")
@click.option("--case", "case_id", required=True)
@click.option("--ledger", "ledger_file", default="./uwflow-data/ledger.jsonl",
              show_default=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None)
def audit_export(case_id, ledger_file, out_path):
    """Emit a self-verifying audit bundle for one case."""
    from ..governance.ledger import AuditLedger, FileLedgerStore

    ledger = AuditLedger(FileLedgerStore(ledger_file))
    bundle = ledger.export_case_bundle(case_id)
    if not bundle["records"]:
        fail("UnknownCase", f"no events for case {case_id!r}")
    text = json.dumps(bundle, sort_keys=True, indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        click.echo(f"wrote bundle to {out_path}")
    else:
        click.echo(text)


@main.group()
def stats():
    """Statistics kernel, exposed for spot checks."""


@stats.command("wilson")
@click.argument("successes", type=int)
@click.argument("n", type=int)
@click.option("--z", default=1.96, show_default=True)
def stats_wilson(successes, n, z):
    from ..evaluation.stats import DomainError

    try:
        lo, hi = wilson_interval(successes, n, z)
    except DomainError as exc:
        fail("DomainError", str(exc))
    click.echo(f"{lo:.10f} {hi:.10f}")


@stats.command("mcnemar")
@click.argument("b", type=int)
@click.argument("c", type=int)
@click.option("--method", type=click.Choice(["exact", "chi2_cc"]), default="exact",
              show_default=True)
def stats_mcnemar(b, c, method):
    from ..evaluation.stats import DomainError

    try:
        p = mcnemar_test(b, c, method=method)
    except DomainError as exc:
        fail("DomainError", str(exc))
    click.echo(f"{p:.10g}")


@stats.command("fisher")
@click.argument("a", type=int)
@click.argument("b", type=int)
@click.argument("c", type=int)
@click.argument("d", type=int)
def stats_fisher(a, b, c, d):
    from ..evaluation.stats import DomainError

    try:
        p = fisher_exact([[a, b], [c, d]])
    except DomainError as exc:
        fail("DomainError", str(exc))
    click.echo(f"{p:.10g}")


if __name__ == "__main__":
    main()
