"""End-to-end tests of the command-line interface and report envelope."""

import json
from fractions import Fraction

import pytest

from conecert.cli import main
from conecert.report import (
    EXIT_CERTIFIED,
    EXIT_FALSIFIED,
    EXIT_INCONCLUSIVE,
    EXIT_OPERATIONAL_ERROR,
    CertificationReport,
    ReportEnvelope,
    RunConfig,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out), err


# ---------------------------------------------------------------------------
# Envelope invariants
# ---------------------------------------------------------------------------


def test_report_rejects_certified_sampling():
    with pytest.raises(ValueError):
        CertificationReport(claim="x", method="sampled", verdict="certified")
    # The legitimate combinations construct fine.
    CertificationReport(claim="x", method="sampled", verdict="falsified")
    CertificationReport(claim="x", method="exact", verdict="certified")


def test_envelope_verdict_aggregation():
    env = ReportEnvelope(config=RunConfig(command="t"))
    env.add(CertificationReport(claim="a", method="exact", verdict="certified"))
    assert env.verdict == "certified" and env.exit_code() == EXIT_CERTIFIED
    env.add(CertificationReport(claim="b", method="interval", verdict="inconclusive"))
    assert env.verdict == "inconclusive" and env.exit_code() == EXIT_INCONCLUSIVE
    env.add(CertificationReport(claim="c", method="sampled", verdict="falsified"))
    assert env.verdict == "falsified" and env.exit_code() == EXIT_FALSIFIED


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def test_table_csv_contract(capsys):
    code, out, _ = run(capsys, "table", "--format", "csv")
    assert code == EXIT_CERTIFIED
    lines = out.strip().splitlines()
    assert lines[0] == "theta_lo_deg,theta_hi_deg,n_theta"
    assert lines[1] == "90.000,94.580,7"
    assert lines[2] == "94.580,106.664,6"
    assert lines[3] == "106.664,128.346,5"
    assert lines[4] == "128.346,180.000,4"


def test_table_json_has_schema_keys(capsys):
    code, doc, _ = run_json(capsys, "table")
    assert code == EXIT_CERTIFIED
    assert set(doc) == {"version", "config", "reports", "verdict", "elapsed_ms"}
    assert doc["verdict"] == "certified"
    assert doc["config"]["command"] == "table"
    assert doc["config"]["tol_deg"] == {"num": "1", "den": "1000"}


def test_table_text_format(capsys):
    code, out, _ = run(capsys, "table")
    assert code == EXIT_CERTIFIED
    assert "theta_lo_deg" in out
    assert "[CERTIFIED" in out
    assert out.rstrip().splitlines()[-1].startswith("elapsed_ms:")


def test_table_out_file(tmp_path, capsys):
    target = tmp_path / "table.csv"
    code, out, _ = run(capsys, "table", "--format", "csv", "--out", str(target))
    assert code == EXIT_CERTIFIED
    assert out == ""
    assert target.read_text().startswith("theta_lo_deg,theta_hi_deg,n_theta")


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "n,expected",
    [(4, ("18928", "18605")), (5, ("264924", "2713295")), (6, ("12002306544", "1858195670875"))],
)
def test_certify_default_parameters(capsys, n, expected):
    code, doc, _ = run_json(capsys, "certify", "--n", str(n))
    assert code == EXIT_CERTIFIED
    payload = doc["reports"][0]["payload"]
    assert payload["threshold"] == {"num": expected[0], "den": expected[1]}


def test_certify_n3_is_exact_and_parameterfree(capsys):
    code, doc, _ = run_json(capsys, "certify", "--n", "3")
    assert code == EXIT_CERTIFIED
    rep = doc["reports"][0]
    assert rep["method"] == "exact"
    assert rep["payload"]["theta_range"] == "(0°, 180°)"


def test_certify_n3_rejects_overrides(capsys):
    code, out, err = run(capsys, "certify", "--n", "3", "--alpha", "1/2")
    assert code == EXIT_OPERATIONAL_ERROR
    assert "overrides" in err


def test_certify_rejects_unsupported_dimension(capsys):
    code, _, err = run(capsys, "certify", "--n", "7")
    assert code == EXIT_OPERATIONAL_ERROR
    assert "supports n in" in err


def test_certify_bad_parameters_are_falsified_not_crash(capsys):
    code, doc, _ = run_json(
        capsys, "certify", "--n", "4", "--alpha", "1/1", "--delta", "1/2", "--q", "1/1"
    )
    assert code == EXIT_FALSIFIED
    rep = doc["reports"][0]
    assert rep["verdict"] == "falsified"
    assert "reason" in rep["payload"]


def test_certify_rejects_malformed_rational(capsys):
    code, _, err = run(capsys, "certify", "--n", "4", "--alpha", "0.42")
    assert code == EXIT_OPERATIONAL_ERROR
    assert "not an exact rational" in err


# ---------------------------------------------------------------------------
# pnbound
# ---------------------------------------------------------------------------


def test_pnbound_reports_exact_sup_and_oracle(capsys):
    code, doc, _ = run_json(capsys, "pnbound", "--m", "3", "--q", "6/11", "--samples", "10000")
    assert code == EXIT_CERTIFIED
    payload = doc["reports"][0]["payload"]
    assert payload["sup"]["coeff"] == {"num": "65", "den": "726"}
    assert payload["sup"]["radicand"] == "66"
    assert payload["oracle_within_tolerance"] is True
    assert payload["exhaustive"] is True


def test_pnbound_p2_comparison_verdicts(capsys):
    # Equality at the calibrated pair (m = n-2) certifies.
    code, doc, _ = run_json(
        capsys, "pnbound", "--m", "4", "--q", "43/391",
        "--p2", "646328929/717317652", "--samples", "10000",
    )
    assert code == EXIT_CERTIFIED
    assert doc["reports"][1]["payload"]["comparison"] == "sup^2 = p^2"
    # One more variable exceeds the same p^2: decided, falsified, exit 2.
    code, doc, _ = run_json(
        capsys, "pnbound", "--m", "5", "--q", "43/391",
        "--p2", "646328929/717317652", "--samples", "10000",
    )
    assert code == EXIT_FALSIFIED
    assert doc["reports"][1]["payload"]["comparison"] == "sup^2 > p^2"


def test_pnbound_clamps_low_sample_oracle(capsys):
    code, doc, _ = run_json(capsys, "pnbound", "--m", "2", "--q", "1", "--samples", "300")
    assert code == EXIT_CERTIFIED
    assert doc["config"]["low_sample"] is True
    prov = doc["reports"][0]["provenance"]
    assert prov["samples_requested"] == 300
    assert prov["samples_used"] == 10000


def test_pnbound_input_validation(capsys):
    code, _, err = run(capsys, "pnbound", "--m", "1", "--q", "1")
    assert code == EXIT_OPERATIONAL_ERROR
    code, _, err = run(capsys, "pnbound", "--m", "3", "--q", "-1/2")
    assert code == EXIT_OPERATIONAL_ERROR


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


def test_identities_certified_with_small_campaigns(capsys):
    code, doc, _ = run_json(capsys, "identities", "--samples", "2000", "--depth", "30")
    assert code == EXIT_CERTIFIED
    assert doc["verdict"] == "certified"
    claims = [r["claim"] for r in doc["reports"]]
    assert len(claims) == 5
    # Every certified verdict rests on an exact or interval method.
    for rep in doc["reports"]:
        if rep["verdict"] == "certified":
            assert rep["method"] in ("exact", "interval")
    # The campaigns' sampled residuals ride along as corroborating payload.
    grad = doc["reports"][0]["payload"]
    assert grad["symbolic_certificate"] is True
    assert grad["max_sampled_residual"] <= 1e-12


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------


def test_optimize_zero_budget_echoes_defaults(capsys):
    code, doc, _ = run_json(capsys, "optimize", "--n", "5")
    assert code == EXIT_CERTIFIED
    payload = doc["reports"][0]["payload"]
    assert payload["note"].startswith("no search")
    assert payload["best"]["q"] == {"num": "6", "den": "11"}
    assert payload["best_threshold"] == {"num": "264924", "den": "2713295"}
    assert payload["matches_or_improves_default"] is True


def test_optimize_with_budget_never_regresses(capsys):
    code, doc, _ = run_json(capsys, "optimize", "--n", "4", "--budget", "27")
    assert code == EXIT_CERTIFIED
    payload = doc["reports"][0]["payload"]
    assert payload["matches_or_improves_default"] is True
    assert payload["evaluated"] <= 28


def test_optimize_rejects_unsupported_dimension(capsys):
    code, _, err = run(capsys, "optimize", "--n", "3")
    assert code == EXIT_OPERATIONAL_ERROR


# ---------------------------------------------------------------------------
# selftest and determinism
# ---------------------------------------------------------------------------


def test_selftest_runs_certified_quick(capsys):
    code, doc, _ = run_json(
        capsys, "selftest", "--samples", "2000", "--depth", "30", "--seed", "42"
    )
    assert code == EXIT_CERTIFIED
    assert doc["verdict"] == "certified"
    assert len(doc["reports"]) == 13
    digest_rep = doc["reports"][-1]
    assert "content_digest_sha256" in digest_rep["payload"]


def test_selftest_reports_are_a_pure_function_of_config(capsys):
    code1, out1, _ = run(capsys, "selftest", "--samples", "2000", "--seed", "7", "--format", "json")
    code2, out2, _ = run(capsys, "selftest", "--samples", "2000", "--seed", "7", "--format", "json")
    assert code1 == code2 == EXIT_CERTIFIED
    doc1, doc2 = json.loads(out1), json.loads(out2)
    doc1.pop("elapsed_ms"), doc2.pop("elapsed_ms")
    assert doc1 == doc2
    # A different seed changes sampled payloads but not the verdicts.
    _, out3, _ = run(capsys, "selftest", "--samples", "2000", "--seed", "8", "--format", "json")
    doc3 = json.loads(out3)
    assert doc3["verdict"] == "certified"
    assert doc3["reports"][-1]["payload"] != doc1["reports"][-1]["payload"]


def test_version_and_help_exit_zero(capsys):
    assert main(["--version"]) == 0
    capsys.readouterr()
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    assert "selftest" in out


def test_unknown_command_is_operational_error(capsys):
    assert main(["frobnicate"]) == EXIT_OPERATIONAL_ERROR
