import json
import math

import pytest

import gapforge as gf
from gapforge.cli import main
from gapforge.model import GapRecord, JacobsthalValue, ProgressionStats, ScenarioResult


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gaps_table(capsys):
    code, out, _ = run(capsys, "gaps", "--limit", "1000")
    assert code == 0
    assert out.strip() == "G(1000) = 20 (887 → 907)"


def test_gaps_small_limit_uses_inclusive_convention(capsys):
    # endpoints <= x, so the scan at 5 sees the gap (3, 5)
    code, out, _ = run(capsys, "gaps", "--limit", "5")
    assert code == 0
    assert out.strip() == "G(5) = 2 (3 → 5)"


def test_gaps_json(capsys):
    code, out, _ = run(capsys, "gaps", "--limit", "100", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"gap": 8, "lo": 89, "hi": 97}


def test_gaps_csv(capsys):
    code, out, _ = run(capsys, "gaps", "--limit", "100", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "gap,lo,hi"
    assert lines[1] == "8,89,97"


def test_jacobsthal_lines(capsys):
    code, out, _ = run(capsys, "jacobsthal", "--u", "3")
    assert code == 0
    assert out.strip() == "J(3) = 4"
    code, out, _ = run(capsys, "jacobsthal", "--u", "2")
    assert code == 0
    assert out.strip() == "J(2) = 2"


def test_jacobsthal_period_exit(capsys):
    code, _, err = run(capsys, "jacobsthal", "--u", "29")
    assert code == 3
    assert "period" in err.lower()


def test_pi_ap(capsys):
    code, out, _ = run(capsys, "pi-ap", "--x", "100", "--q", "4", "--b", "3",
                       "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["count"] == 13
    assert obj["delta"] == {"num": 13, "den": 50}


def test_least_prime(capsys):
    code, out, _ = run(capsys, "least-prime", "--q", "25", "--b", "1",
                       "--limit", "200")
    assert code == 0
    assert "L(25, 1) = 101" in out
    code, out, _ = run(capsys, "least-prime", "--q", "25", "--b", "1",
                       "--limit", "100", "--format", "json")
    assert code == 0
    assert json.loads(out) == {
        "q": 25, "b": 1, "limit": 100, "found": False, "prime": None,
    }


def test_cover_writes_file_and_prints_bound(tmp_path, capsys):
    out_path = tmp_path / "cert.json"
    code, out, _ = run(capsys, "cover", "--x", "10000", "--q", "101",
                       "--b", "100", "--out", str(out_path))
    assert code == 0
    assert "J(565) ≥ 9900/101" in out
    obj = json.loads(out_path.read_text())
    assert obj["x"] == 10000 and obj["u"] == 565 and obj["y"] == 98
    assert "witness" not in obj


def test_cover_deterministic_bytes(tmp_path, capsys):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    for p in (p1, p2):
        code, _, _ = run(capsys, "cover", "--x", "10000", "--q", "101",
                         "--b", "100", "--witness", "--out", str(p))
        assert code == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_cover_then_verify_strict_witness(tmp_path, capsys):
    out_path = tmp_path / "cert.json"
    code, _, _ = run(capsys, "cover", "--x", "10000", "--q", "101",
                     "--b", "100", "--witness", "--out", str(out_path))
    assert code == 0
    code, out, _ = run(capsys, "verify", str(out_path), "--strict", "--witness")
    assert code == 0
    assert "[FAIL]" not in out
    assert "witness_matches_stored" in out


def test_cover_delta_override_empty_progression(tmp_path, capsys):
    out_path = tmp_path / "cert.json"
    code, out, _ = run(capsys, "cover", "--x", "100", "--q", "25", "--b", "1",
                       "--delta", "0", "--out", str(out_path))
    assert code == 0
    assert "J(21) ≥ 99/25" in out
    code, _, _ = run(capsys, "verify", str(out_path), "--strict", "--witness")
    assert code == 0


def test_cover_accepts_decimal_and_fraction_delta(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "cover", "--x", "100", "--q", "4", "--b", "3",
        "--delta", "13/50", "--out", str(a))
    run(capsys, "cover", "--x", "100", "--q", "4", "--b", "3",
        "--delta", "0.26", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["u"] == 388


def test_cover_bad_progression_exit(capsys):
    code, _, err = run(capsys, "cover", "--x", "100", "--q", "99", "--b", "33")
    assert code == 1
    assert "invalid parameters" in err
    # gcd(98, 99) = 1, so this neighbour is perfectly valid
    code, _, _ = run(capsys, "cover", "--x", "100", "--q", "99", "--b", "98")
    assert code == 0


def test_verify_mutated_certificate(tmp_path, capsys):
    out_path = tmp_path / "cert.json"
    run(capsys, "cover", "--x", "10000", "--q", "101", "--b", "100",
        "--out", str(out_path))
    obj = json.loads(out_path.read_text())
    dropped = next(
        i for i, c in enumerate(obj["classes"]) if c["kind"] == "matched"
    )
    del obj["classes"][dropped]
    out_path.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "verify", str(out_path))
    assert code == 5
    assert "covers_range" in out and "n=" in out


def test_verify_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 6
    missing = tmp_path / "missing.json"
    code, _, _ = run(capsys, "verify", str(missing))
    assert code == 6
    nocert = tmp_path / "nocert.json"
    nocert.write_text('{"x": 5}')
    code, _, _ = run(capsys, "verify", str(nocert))
    assert code == 6


def test_verify_json_report_is_pure_json(tmp_path, capsys):
    out_path = tmp_path / "cert.json"
    run(capsys, "cover", "--x", "100", "--q", "25", "--b", "1",
        "--delta", "0", "--out", str(out_path))
    code, out, _ = run(capsys, "verify", str(out_path), "--strict",
                       "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert all(set(entry) == {"check", "pass", "detail"} for entry in report)
    assert all(entry["pass"] for entry in report)


def test_scan_top_rows_sorted(capsys):
    code, out, _ = run(capsys, "scan", "--x", "10000", "--qmin", "3",
                       "--qmax", "50", "--top", "5", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 5
    deltas = [r["delta"]["num"] / r["delta"]["den"] for r in rows]
    assert deltas == sorted(deltas)
    for row in rows:
        assert math.gcd(row["b"], row["q"]) == 1


def test_scan_includes_empty_progressions(capsys):
    code, out, _ = run(capsys, "scan", "--x", "100", "--qmin", "97",
                       "--qmax", "97", "--top", "100", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    zero_b = {r["b"] for r in rows if r["delta"]["num"] == 0}
    assert 96 in zero_b


def test_scan_empty_range(capsys):
    code, out, _ = run(capsys, "scan", "--x", "100", "--qmin", "50",
                       "--qmax", "10", "--format", "csv")
    assert code == 0
    assert out.strip() == "q,b,count,delta_num,delta_den"


def test_scenario_single(capsys):
    code, out, _ = run(capsys, "scenario", "--log-q", "10", "--delta", "0.5",
                       "--B", "2")
    assert code == 0
    assert "log_u = 12.302585" in out
    code, _, err = run(capsys, "scenario", "--log-q", "10", "--delta", "1.0",
                       "--B", "2")
    assert code == 1
    assert "delta" in err


def test_scenario_sweep_monotone(capsys):
    code, out, _ = run(capsys, "scenario", "--sweep", "10,20,40",
                       "--delta-exponent", "2", "--B", "2", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    surplus = [r["log_gap_bound"] - math.log(r["log_x"]) for r in rows]
    assert surplus == sorted(surplus)
    assert all(a < b for a, b in zip(surplus, surplus[1:]))


def test_json_outputs_round_trip_into_emitting_types(capsys):
    code, out, _ = run(capsys, "gaps", "--limit", "1000", "--format", "json")
    assert code == 0
    assert GapRecord.from_json(json.loads(out)) == gf.max_prime_gap(1000)

    code, out, _ = run(capsys, "pi-ap", "--x", "100", "--q", "4", "--b", "3",
                       "--format", "json")
    assert ProgressionStats.from_json(json.loads(out)) == gf.prime_count_ap(100, 4, 3)

    code, out, _ = run(capsys, "jacobsthal", "--u", "5", "--format", "json")
    assert JacobsthalValue.from_json(json.loads(out)) == gf.jacobsthal_exact(5)

    code, out, _ = run(capsys, "scenario", "--log-q", "10", "--delta", "0.5",
                       "--B", "2", "--format", "json")
    assert ScenarioResult.from_json(json.loads(out)) == gf.scenario_bound(10, 0.5, 2)


def test_env_configuration_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("GAPFORGE_PERIOD_CAP", "100")
    code, _, _ = run(capsys, "jacobsthal", "--u", "7")
    assert code == 3  # primorial(7) = 210 over the env cap
    code, out, _ = run(capsys, "jacobsthal", "--u", "7", "--period-cap", "300")
    assert code == 0  # flag wins over the environment
    assert out.strip() == "J(7) = 10"


def test_env_rejects_inconsistent_budget(capsys, monkeypatch):
    monkeypatch.setenv("GAPFORGE_MEMORY_BUDGET", "1024")
    code, _, err = run(capsys, "gaps", "--limit", "100")
    assert code == 1
    assert "bad configuration" in err


def test_resource_limit_exit(capsys):
    code, _, err = run(capsys, "gaps", "--limit", "10000000",
                       "--memory-budget", str(1 << 17),
                       "--period-cap", str(1 << 20))
    assert code == 2
    assert "resource" in err.lower()
