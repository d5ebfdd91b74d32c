"""CLI integration tests: output formats, precision contract, exit codes."""

from __future__ import annotations

import json
import socket
import threading
import time

import pytest

from tailbounds.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_binom_json(capsys):
    code, out, err = run_cli(capsys, "eval", "binom", "--n", "10", "--p", "0.3", "--k", "5")
    assert code == 0 and err == ""
    report = json.loads(out)
    assert set(report) == {"query", "exact", "bounds", "meta"}
    assert report["query"] == {"dist": "binomial", "n": 10, "p": 0.3, "k": 5}
    assert report["exact"]["sf"] == 0.1502683326
    assert report["bounds"]["factorial_upper"] == 0.324
    assert report["bounds"]["pelekis_lower"] == 0.004374
    assert report["meta"]["anomalies"] == []


def test_eval_accepts_fraction_probability(capsys):
    code_frac, out_frac, _ = run_cli(
        capsys, "eval", "binom", "--n", "10", "--p", "3/10", "--k", "5"
    )
    code_dec, out_dec, _ = run_cli(
        capsys, "eval", "binom", "--n", "10", "--p", "0.3", "--k", "5"
    )
    assert code_frac == code_dec == 0
    assert out_frac == out_dec


def test_eval_binom_text(capsys):
    code, out, _ = run_cli(
        capsys, "eval", "binom", "--n", "10", "--p", "0.5", "--k", "10",
        "--format", "text",
    )
    assert code == 0
    assert "binomial n=10 p=0.5 k=10" in out
    assert "out of domain" in out
    assert "0.0009765625" in out


def test_eval_pois_json(capsys):
    code, out, _ = run_cli(capsys, "eval", "pois", "--mu", "2", "--k", "3")
    assert code == 0
    report = json.loads(out)
    assert report["exact"]["sf"] == 0.323323583817  # 12 significant digits
    assert report["bounds"]["pelekis_lower"] == 0.08
    assert report["bounds"]["tce_upper"] == 4.0
    assert report["bounds"]["ell"] == 1


def test_eval_pois_noninteger_threshold(capsys):
    code, out, _ = run_cli(capsys, "eval", "pois", "--mu", "2", "--k", "2.5")
    assert code == 0
    report = json.loads(out)
    assert report["query"]["k"] == 3
    assert any("2.5" in note for note in report["meta"]["notes"])


def test_eval_pois_plus_mu_flag(capsys):
    code, out, _ = run_cli(
        capsys, "eval", "pois", "--mu", "2", "--k", "3", "--chernoff-plus-mu"
    )
    assert code == 0
    report = json.loads(out)
    assert report["bounds"]["chernoff_upper_plus_mu"] > 1.0


def test_eval_exit_codes(capsys):
    code, _, err = run_cli(capsys, "eval", "binom", "--n", "10", "--p", "0.3", "--k", "3")
    assert code == 2 and "error:" in err
    with pytest.raises(SystemExit) as exc:
        main(["eval", "binom", "--n", "10", "--p", "1.5", "--k", "5"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_sweep_csv_shape_and_determinism(capsys):
    args = ("sweep", "binom", "--n", "100", "--k", "80", "--step", "0.05")
    code, out1, _ = run_cli(capsys, *args)
    assert code == 0
    lines = out1.strip().split("\n")
    assert lines[0] == "p,exact_sf,chernoff_upper,factorial_upper,ash_lower,pelekis_lower,delta"
    assert len(lines) == 16  # header + 15 rows
    assert out1.endswith("\n") and "\r" not in out1
    code, out2, _ = run_cli(capsys, *args)
    assert out1 == out2


def test_sweep_round_trip_preserves_verdicts(capsys):
    _, out, _ = run_cli(capsys, "sweep", "binom", "--n", "60", "--k", "45")
    lines = out.strip().split("\n")
    for line in lines[1:]:
        p, sf, cher, fact, ash, pel, delta = (float(c) for c in line.split(","))
        assert pel <= sf <= fact <= cher * (1 + 1e-12)
        assert ash <= sf
        assert delta == pytest.approx(pel - ash, rel=1e-9, abs=1e-300)


def test_sweep_figure_exponent_scales_by_p_squared(capsys):
    base_args = ("sweep", "binom", "--n", "20", "--k", "15")
    _, default_out, _ = run_cli(capsys, *base_args)
    _, figure_out, _ = run_cli(capsys, *base_args, "--figure-exponent")
    for line_d, line_f in zip(
        default_out.strip().split("\n")[1:], figure_out.strip().split("\n")[1:]
    ):
        d = line_d.split(",")
        f = line_f.split(",")
        p = float(d[0])
        assert float(f[5]) == pytest.approx(float(d[5]) / p**2, rel=1e-9)
        # only the pelekis and delta columns change
        assert d[1:5] == f[1:5]


def test_sweep_exit_codes(capsys):
    code, _, err = run_cli(capsys, "sweep", "binom", "--n", "10", "--k", "10")
    assert code == 2 and "error:" in err
    # p range colliding with k/n: all rows would be undefined
    code, _, err = run_cli(
        capsys, "sweep", "binom", "--n", "10", "--k", "5", "--p-max", "0.6"
    )
    assert code == 2


def test_verify_subset_and_exit_zero(tmp_path, capsys):
    cfg = tmp_path / "medians.cfg"
    cfg.write_text(
        "suites = binom-median, pois-median\nn-max = 20\np-grid = 0.25, 0.75\nmu-grid = 1, 2\n"
    )
    code, out, _ = run_cli(capsys, "verify", "--config", str(cfg))
    assert code == 0
    body = json.loads(out)
    assert body["all_passed"] is True
    assert [v["inequality_id"] for v in body["verdicts"]] == ["binom-median", "pois-median"]


def test_verify_missing_and_malformed_config(tmp_path, capsys):
    code, _, err = run_cli(capsys, "verify", "--config", str(tmp_path / "nope.cfg"))
    assert code == 2 and "not found" in err
    bad = tmp_path / "bad.cfg"
    bad.write_text("suites = wat\n")
    code, _, err = run_cli(capsys, "verify", "--config", str(bad))
    assert code == 2


def test_verify_exit_one_on_failure(tmp_path, capsys):
    # an absurdly tight tolerance forces reported violations without touching
    # the underlying mathematics
    cfg = tmp_path / "tight.cfg"
    cfg.write_text(
        "suites = binom-sf-oracle\nn-max = 40\np-grid = 0.3\ntol.binom-sf-oracle = 1e-18\n"
    )
    code, out, _ = run_cli(capsys, "verify", "--config", str(cfg))
    assert code == 1
    body = json.loads(out)
    assert body["all_passed"] is False
    assert body["verdicts"][0]["violations"] > 0


@pytest.fixture(scope="module")
def live_server():
    uvicorn = pytest.importorskip("uvicorn")
    from tailbounds.service.app import app

    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    for _ in range(100):
        if server.started:
            break
        time.sleep(0.05)
    else:
        raise RuntimeError("server did not start")
    sock = server.servers[0].sockets[0]
    host, port = sock.getsockname()[:2]
    yield f"http://{host}:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_cli_against_live_server(live_server, capsys):
    code, remote, _ = run_cli(
        capsys, "--server", live_server, "eval", "binom", "--n", "10", "--p", "0.3", "--k", "5"
    )
    assert code == 0
    _, local, _ = run_cli(capsys, "eval", "binom", "--n", "10", "--p", "0.3", "--k", "5")
    assert remote == local
    code, _, err = run_cli(
        capsys, "--server", live_server, "eval", "binom", "--n", "10", "--p", "0.3", "--k", "3"
    )
    assert code == 2 and "error:" in err
