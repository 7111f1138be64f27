import json

import pytest
from click.testing import CliRunner

from uwflow.scenario_fixtures import fixture_submission
from uwflow.service.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


class TestStatsCommands:
    def test_fisher_authority_boundary_row(self, runner):
        result = runner.invoke(main, ["stats", "fisher", "7", "18", "0", "25"])
        assert result.exit_code == 0
        assert float(result.output.strip()) == pytest.approx(0.00962512664, abs=1e-9)

    def test_wilson(self, runner):
        result = runner.invoke(main, ["stats", "wilson", "480", "500"])
        assert result.exit_code == 0
        low, high = map(float, result.output.split())
        assert low == pytest.approx(0.9390259449, abs=1e-9)
        assert high == pytest.approx(0.9739594060, abs=1e-9)

    def test_mcnemar(self, runner):
        result = runner.invoke(main, ["stats", "mcnemar", "0", "8"])
        assert result.exit_code == 0
        assert float(result.output.strip()) == pytest.approx(0.0078125, abs=1e-12)

    def test_domain_error_exits_nonzero_with_machine_line(self, runner):
        result = runner.invoke(main, ["stats", "wilson", "11", "10"])
        assert result.exit_code == 1
        assert result.output.startswith("error code=DomainError") or \
            "error code=DomainError" in result.output


class TestAuditCommands:
    def test_verify_pristine_ledger_exits_zero(self, runner, tmp_path):
        from uwflow.governance.ledger import AuditLedger, FileLedgerStore

        path = tmp_path / "ledger.jsonl"
        ledger = AuditLedger(FileLedgerStore(str(path)))
        for i in range(5):
            ledger.append("ToolCall", {"i": i}, case_id="c1")
        result = runner.invoke(main, ["audit", "verify", str(path)])
        assert result.exit_code == 0
        assert "clean" in result.output

    def test_verify_tampered_ledger_exits_nonzero(self, runner, tmp_path):
        from uwflow.governance.ledger import AuditLedger, FileLedgerStore

        path = tmp_path / "ledger.jsonl"
        ledger = AuditLedger(FileLedgerStore(str(path)))
        for i in range(5):
            ledger.append("ToolCall", {"i": i}, case_id="c1")
        raw = path.read_bytes().replace(b'"i":3', b'"i":9')
        path.write_bytes(raw)
        result = runner.invoke(main, ["audit", "verify", str(path)])
        assert result.exit_code == 2
        assert "error code=ChainBroken" in result.output
        assert "first_bad_seq=4" in result.output

    def test_export_case_bundle(self, runner, tmp_path):
        from uwflow.governance.ledger import AuditLedger, FileLedgerStore

        path = tmp_path / "ledger.jsonl"
        ledger = AuditLedger(FileLedgerStore(str(path)))
        ledger.append("Ingested", {"x": 1}, case_id="c7")
        out = tmp_path / "bundle.json"
        result = runner.invoke(main, [
            "audit", "export", "--case", "c7", "--ledger", str(path), "--out", str(out),
        ])
        assert result.exit_code == 0
        bundle = json.loads(out.read_text())
        assert bundle["verification"]["clean"]
        assert bundle["records"][0]["case_id"] == "c7"

    def test_export_unknown_case_fails(self, runner, tmp_path):
        from uwflow.governance.ledger import AuditLedger, FileLedgerStore

        path = tmp_path / "ledger.jsonl"
        AuditLedger(FileLedgerStore(str(path)))
        result = runner.invoke(main, ["audit", "export", "--case", "zz", "--ledger", str(path)])
        assert result.exit_code == 1
        assert "error code=UnknownCase" in result.output


class TestIngestCommand:
    def test_ingest_runs_pipeline_and_persists(self, runner, tmp_path):
        sub_file = tmp_path / "sub.json"
        sub_file.write_text(json.dumps(fixture_submission("case-A-wiring").to_dict()))
        result = runner.invoke(main, [
            "ingest", str(sub_file), "--data-dir", str(tmp_path / "data"),
        ])
        assert result.exit_code == 0, result.output
        out = json.loads(result.output)
        assert out["state"] == "awaiting_human_auth"
        assert out["critique_cycles_used"] == 1
        verify = runner.invoke(main, ["audit", "verify", out["ledger"]])
        assert verify.exit_code == 0

    def test_ingest_malformed_fails_with_reason(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"submission_id": "x"}')
        result = runner.invoke(main, ["ingest", str(bad)])
        assert result.exit_code == 1
        assert "error code=MalformedSubmission" in result.output


class TestSimulateAndEvaluate:
    def test_simulate_then_evaluate_reproduces_table_layout(self, runner, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps({
            "systems": ["manual", "agent_only", "agent_critic"],
            "n": 30,
            "seeds": [11],
        }))
        out = tmp_path / "records.jsonl"
        result = runner.invoke(main, [
            "simulate", "run", "--config", str(config), "--out", str(out), "--no-summary",
        ])
        assert result.exit_code == 0, result.output
        assert out.exists()

        evaluated = runner.invoke(main, ["evaluate", str(out)])
        assert evaluated.exit_code == 0, evaluated.output
        text = evaluated.output
        # Summary layout: metric rows crossed with one column per system.
        for label in ("Decision Accuracy", "Hallucination Rate", "Evidence Completeness",
                      "Source Traceability", "Guideline Compliance", "Critic Catch Rate",
                      "Boundary Violation Rate"):
            assert label in text
        for column in ("manual", "agent_only", "agent_critic"):
            assert column in text
        assert "McNemar decision accuracy" in text

    def test_evaluate_stratified(self, runner, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps({"systems": ["agent_critic"], "n": 30, "seeds": [5]}))
        out = tmp_path / "records.jsonl"
        runner.invoke(main, ["simulate", "run", "--config", str(config),
                             "--out", str(out), "--no-summary"])
        result = runner.invoke(main, ["evaluate", str(out), "--stratify", "tier"])
        assert result.exit_code == 0
        for tier in ("simple", "medium", "complex"):
            assert tier in result.output

    def test_evaluate_json_mode(self, runner, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps({"systems": ["agent_only"], "n": 10, "seeds": [5]}))
        out = tmp_path / "records.jsonl"
        runner.invoke(main, ["simulate", "run", "--config", str(config),
                             "--out", str(out), "--no-summary"])
        result = runner.invoke(main, ["evaluate", str(out), "--json"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["agent_only"]["metrics"]["decision_accuracy"]["n"] == 10

    def test_bad_config_fails_with_reason(self, runner, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text('{"systems": ["warp_drive"]}')
        result = runner.invoke(main, ["simulate", "run", "--config", str(config)])
        assert result.exit_code == 1
        assert "error code=ConfigError" in result.output
