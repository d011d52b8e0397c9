import csv
import subprocess
import sys

import pytest

from antsel.cli import CSV_HEADER, PRESETS, UsageError, main, parse_args, parse_values, write_csv
from antsel.harness import BerRecord, SimPoint, run_points

SMALL = ["--trials", "40", "--symbols", "5"]


class TestParseValues:
    def test_list(self):
        assert parse_values("0.6,0.8", "--phi") == (0.6, 0.8)

    def test_range_inclusive(self):
        assert parse_values("0:2:10", "--snr-db") == (0, 2, 4, 6, 8, 10)
        assert parse_values("0:0.1:0.9", "--phi")[-1] == 0.9
        assert len(parse_values("0:0.1:0.9", "--phi")) == 10
        assert parse_values("4:4:128", "--ks", integer=True)[:3] == (4, 8, 12)

    @pytest.mark.parametrize("text", ["", "a", "1:2", "5:1:0", "0:0:3", "nan", "1.5"])
    def test_bad(self, text):
        with pytest.raises(UsageError):
            parse_values(text, "--ks", integer=True)


class TestParseArgs:
    def test_defaults(self):
        cfg = parse_args(["simulate"])
        assert cfg.m == (64,) and cfg.k_s == (32,)
        assert cfg.snr_db == (0, 2, 4, 6, 8, 10)
        assert cfg.schemes == ("omp-selection", "mrc")

    def test_preset_override(self):
        cfg = parse_args(["simulate", "--preset", "fig4", "--m", "64"])
        assert cfg.m == (64,)
        assert cfg.phi == (0.8,) and cfg.tau == (0.8,)
        assert cfg.k_s == parse_values(PRESETS["fig4"]["ks"], "--ks", integer=True)

    def test_full_example(self):
        cfg = parse_args(
            "simulate --m 64 --ks 50 --phi 0.6 --tau 0.6 --snr-db 0:2:10 "
            "--schemes omp,mrc --trials 10000 --seed 42 --out r.csv".split()
        )
        pts = cfg.points()
        assert len(pts) == 12
        assert {p.scheme for p in pts} == {"omp-selection", "mrc"}
        assert sorted({p.snr_db for p in pts}) == [0, 2, 4, 6, 8, 10]
        assert all(p.seed == 42 and p.trials == 10000 for p in pts)
        assert cfg.out_path == "r.csv"

    def test_schemes_share_streams(self):
        pts = parse_args("simulate --m 8 --ks 2,4 --snr-db 0,5".split()).points()
        by_snr = {}
        for p in pts:
            by_snr.setdefault(p.snr_db, set()).add(p.stream)
        assert all(len(s) == 1 for s in by_snr.values())
        assert by_snr[0] != by_snr[5]

    def test_ks_above_m_skipped(self):
        pts = parse_args("simulate --preset fig4 --m 64 --snr-db 2".split()).points()
        assert max(p.k_s for p in pts if p.scheme == "omp-selection") == 64

    @pytest.mark.parametrize(
        "argv",
        [
            "simulate --phi 1.2",
            "simulate --tau -0.1",
            "simulate --m 0",
            "simulate --m 4 --ks 8",
            "simulate --schemes zf",
            "simulate --trials 0",
            "simulate --preset fig9",
            "simulate --workers 0",
            "simulate --bogus",
            "",
        ],
    )
    def test_usage_errors(self, argv):
        with pytest.raises(UsageError):
            parse_args(argv.split())

    def test_env_workers(self, monkeypatch):
        monkeypatch.setenv("ANTSEL_WORKERS", "3")
        assert parse_args(["simulate"]).workers == 3
        assert parse_args(["simulate", "--workers", "2"]).workers == 2


class TestCsv:
    def test_header_only(self, tmp_path):
        out = tmp_path / "e.csv"
        write_csv([], out)
        assert out.read_text() == ",".join(CSV_HEADER) + "\n"

    def test_header_text(self):
        assert ",".join(CSV_HEADER) == (
            "scheme,m,k_s,phi,tau,snr_db,trials,symbols_per_channel,seed,bits_sent,bit_errors,ber,stderr"
        )

    def test_round_trip(self, tmp_path):
        pt = SimPoint(4, 2, 0.1, 0.3, 1.0, trials=3, symbols_per_channel=1)
        rec = BerRecord(pt, 3, 1)
        out = tmp_path / "r.csv"
        write_csv([rec, rec], out)
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 2
        assert float(rows[0]["ber"]) == 1 / 3
        assert float(rows[0]["stderr"]) == rec.stderr
        assert float(rows[0]["phi"]) == 0.1


class TestMain:
    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "o.csv"
        code = main(["simulate", "--m", "4", "--ks", "2", "--snr-db", "0,3", *SMALL, "--out", str(out)])
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert [r["scheme"] for r in rows] == ["omp-selection", "mrc"] * 2
        assert all(int(r["bits_sent"]) == 200 for r in rows)
        assert "ber=" in capsys.readouterr().out

    def test_usage_error_exit(self, tmp_path, capsys):
        out = tmp_path / "o.csv"
        assert main(["simulate", "--phi", "1.2", "--out", str(out)]) == 2
        assert "--phi" in capsys.readouterr().err
        assert not out.exists()

    def test_unwritable(self, tmp_path):
        out = tmp_path / "missing" / "o.csv"
        assert main(["simulate", "--m", "2", "--ks", "1", "--snr-db", "0", *SMALL, "--out", str(out)]) == 1

    def test_workers_byte_identical(self, tmp_path):
        args = ["simulate", "--m", "8", "--ks", "2,4", "--phi", "0.5", "--tau", "0.5", "--snr-db", "0,4", *SMALL]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main([*args, "--workers", "1", "--out", str(a)]) == 0
        assert main([*args, "--workers", "4", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_matches_harness(self, tmp_path):
        out = tmp_path / "o.csv"
        main(["simulate", "--m", "4", "--ks", "3", "--snr-db", "2", "--schemes", "omp", *SMALL, "--out", str(out)])
        row = next(csv.DictReader(out.open()))
        rec = run_points([SimPoint(4, 3, 0.0, 0.0, 2.0, trials=40, symbols_per_channel=5, seed=1)])[0]
        assert int(row["bit_errors"]) == rec.bit_errors

    def test_help_lists_preset_defaults(self):
        res = subprocess.run(
            [sys.executable, "-m", "antsel", "simulate", "--help"], capture_output=True, text=True
        )
        assert res.returncode == 0
        text = " ".join(res.stdout.split())
        for flag in ("--preset", "--m", "--ks", "--phi", "--tau", "--snr-db", "--schemes",
                     "--trials", "--symbols", "--seed", "--workers", "--out"):
            assert flag in text
        assert "fig4: 4:4:128" in text
        assert "fig1: 0.6,0.8" in text

    def test_module_usage_exit_code(self):
        res = subprocess.run([sys.executable, "-m", "antsel", "simulate", "--phi", "1.2"], capture_output=True)
        assert res.returncode == 2
