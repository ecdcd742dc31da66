import json

import pytest

from jetcheck import cli
from jetcheck.suites import FAULTS, SUITES


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_timing(path):
    d = json.loads(path.read_text())
    d.pop("timing")
    return json.dumps(d, sort_keys=True)


def test_config_validation():
    with pytest.raises(cli.UsageError):
        cli.RunConfig(n=5)
    with pytest.raises(cli.UsageError):
        cli.RunConfig(n=2, signature=(2, 1))
    with pytest.raises(cli.UsageError):
        cli.RunConfig(trials=0)
    with pytest.raises(cli.UsageError):
        cli.RunConfig(coeff_bound=1)
    with pytest.raises(cli.UsageError):
        cli.RunConfig(seed=-1)
    with pytest.raises(cli.UsageError):
        cli.RunConfig(suites=("bogus",))
    with pytest.raises(cli.UsageError):
        cli.RunConfig(faults=("bogus",))


def test_auto_mode():
    assert cli.RunConfig(n=2).effective_mode == "symbolic"
    assert cli.RunConfig(n=3).effective_mode == "randomized"
    assert cli.RunConfig(n=2, mode="randomized").effective_mode == "randomized"


def test_suite_order_is_canonical():
    assert cli.RunConfig(suites=("eh", "zeta")).suites == ("zeta", "eh")


def test_usage_error_exit_code(capsys):
    code, _, err = run(["--n", "7"], capsys)
    assert code == 2
    assert "error" in err


def test_bad_signature_exit_code(capsys):
    code, _, err = run(["--signature", "x,y"], capsys)
    assert code == 2


def test_passing_run_and_report(tmp_path, capsys):
    rep = tmp_path / "r.json"
    code, out, _ = run(["--suite", "zeta", "--suite", "retract", "--report", str(rep)], capsys)
    assert code == 0
    assert "PASS" in out and "FAIL" not in out
    d = json.loads(rep.read_text())
    assert d["schema"] == "jetcheck-report/1"
    assert d["summary"]["failed"] == 0
    assert {r["id"].split(":")[0] for r in d["records"]} == {"zeta", "retract"}
    assert all(set(r) == {"id", "anchor", "verdict", "detail"} for r in d["records"])
    assert d["config"]["effective_mode"] == "symbolic"
    ids = [r["id"] for r in d["records"]]
    assert ids == sorted(ids)


def test_report_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["--n", "3", "--seed", "42", "--suite", "zeta", "--suite", "legendre"]
    assert run(args + ["--report", str(a)], capsys)[0] == 0
    assert run(args + ["--report", str(b), "--jobs", "2"], capsys)[0] == 0
    assert strip_timing(a) == strip_timing(b)


def test_seed_changes_points_not_verdicts(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["--n", "3", "--suite", "zeta"]
    assert run(base + ["--seed", "1", "--report", str(a)], capsys)[0] == 0
    assert run(base + ["--seed", "2", "--report", str(b)], capsys)[0] == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert [r["verdict"] for r in ra["records"]] == [r["verdict"] for r in rb["records"]]


def test_fault_injection_named_failures(tmp_path, capsys):
    rep = tmp_path / "f.json"
    code, out, _ = run(["--suite", "zeta", "--fault-inject", "--report", str(rep)], capsys)
    assert code == 1
    d = json.loads(rep.read_text())
    faults = {r["id"]: r for r in d["records"] if r["id"].startswith("faults:")}
    assert set(faults) == {f"faults:{f}" for f in FAULTS}
    for r in faults.values():
        assert r["verdict"] == "fail"
        assert "witness" in json.dumps(r["detail"]) or r["detail"].get("jet_dependent")


def test_single_fault(capsys):
    code, out, _ = run(["--suite", "zeta", "--fault-inject", "cm-perturb"], capsys)
    assert code == 1
    assert "faults:cm-perturb" in out
    assert "faults:eh-cubic" not in out


def test_expr_named_lagrangian(capsys):
    code, out, _ = run(["--expr", "palatini"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["chart"] == "J1MxCsym"
    assert d["expr"]


def test_expr_connection(capsys):
    code, out, _ = run(["--expr", "connection-sym"], capsys)
    assert code == 0
    assert "gamma_C" in json.loads(out)


def test_expr_unknown(capsys):
    assert run(["--expr", "nothing"], capsys)[0] == 2


def test_jobs_env(monkeypatch):
    monkeypatch.setenv("JETCHECK_JOBS", "3")
    assert cli.default_jobs() == 3
    monkeypatch.setenv("JETCHECK_JOBS", "many")
    with pytest.raises(cli.UsageError):
        cli.default_jobs()
    monkeypatch.delenv("JETCHECK_JOBS")
    assert cli.default_jobs() == 1


def test_every_suite_contributes(capsys):
    report = cli.run_suite(cli.RunConfig(suites=("zeta", "retract", "legendre", "f-family")))
    assert {r.id.split(":")[0] for r in report.records} == {"zeta", "retract", "legendre", "f-family"}
    assert report.exit_code == 0


def test_suites_constant_matches_cli():
    assert set(SUITES) == set(cli.RunConfig().suites)


def test_full_run_n2_all_pass():
    report = cli.run_suite(cli.RunConfig(n=2))
    assert report.ok, [r.id for r in report.failures]
    assert {r.id.split(":")[0] for r in report.records} == set(SUITES)


def test_full_run_n3_randomized_all_pass():
    report = cli.run_suite(cli.RunConfig(n=3, mode="randomized", trials=20, seed=42))
    assert report.ok, [r.id for r in report.failures]
    assert {r.id.split(":")[0] for r in report.records} == set(SUITES)
    # the obstruction record documents why the full bundle is skipped at n = 3
    rec = next(r for r in report.records if r.id == "th2:full-bundle-compatibility")
    assert rec.detail["obstruction_nonzero"] and rec.detail["solver_reports_inconsistency"]


def test_inconsistency_is_reported_not_raised():
    from jetcheck.suites import Context
    from jetcheck.symexpr import CheckOptions
    from jetcheck import connections as cn

    ctx = Context("x", 3, (3, 0), CheckOptions())
    ctx.record("full", "anchor", lambda: (bool(cn.gamma_C_particular(3, "full")), {}))
    (rec,) = ctx.records
    assert not rec.passed
    assert rec.detail["residuals"]
