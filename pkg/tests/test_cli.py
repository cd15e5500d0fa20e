import json
import subprocess

import pytest

from giomhash.cli import main

SMALL_MCC = ["--radius", "100", "--ns", "6", "--nd", "4"]
SMALL_KEY = ["--m", "8", "--q", "6"]


def read_bytes(directory):
    return {
        path.name: path.read_bytes()
        for path in sorted(directory.iterdir())
        if path.is_file()
    }


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "data"
    code = main(
        [
            "gen-data",
            "--fingers", "4",
            "--samples", "3",
            "--min-minutiae", "15",
            "--max-minutiae", "22",
            "--jitter-pos", "4",
            "--jitter-theta", "0.08",
            "--drop-rate", "0.1",
            "--field-size", "300",
            "--seed", "7",
            "--out", str(path),
        ]
    )
    assert code == 0
    return path


@pytest.fixture(scope="module")
def hashed_dir(data_dir, tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "hashed"
    code = main(
        ["hash", "--data", str(data_dir), "--seed", "3", "--out", str(path)]
        + SMALL_KEY
        + SMALL_MCC
    )
    assert code == 0
    return path


class TestGenData:
    def test_writes_expected_files(self, data_dir):
        files = sorted(p.name for p in data_dir.glob("*.txt"))
        assert len(files) == 4 * 3
        assert files[0] == "f0000_01.txt"

    def test_rerun_is_byte_identical(self, data_dir, tmp_path):
        rerun = tmp_path / "data2"
        main(
            [
                "gen-data",
                "--fingers", "4",
                "--samples", "3",
                "--min-minutiae", "15",
                "--max-minutiae", "22",
                "--jitter-pos", "4",
                "--jitter-theta", "0.08",
                "--drop-rate", "0.1",
                "--field-size", "300",
                "--seed", "7",
                "--out", str(rerun),
            ]
        )
        assert read_bytes(rerun) == read_bytes(data_dir)

    def test_bad_drop_rate_is_usage_error(self, tmp_path):
        code = main(
            ["gen-data", "--seed", "1", "--drop-rate", "1.5", "--out", str(tmp_path / "x")]
        )
        assert code == 1


class TestHash:
    def test_case_one_prints_code(self, capsys):
        assert main(["hash", "--case", "1"]) == 0
        assert capsys.readouterr().out == "1 2 1\n"

    def test_case_two_prints_code(self, capsys):
        assert main(["hash", "--case", "2"]) == 0
        assert capsys.readouterr().out == "1 2\n"

    def test_unknown_case_is_usage_error(self):
        assert main(["hash", "--case", "9"]) == 1

    def test_writes_key_and_templates(self, hashed_dir):
        names = sorted(p.name for p in hashed_dir.iterdir())
        assert "key.json" in names
        assert len([n for n in names if n != "key.json"]) == 12
        key = json.loads((hashed_dir / "key.json").read_text())
        assert key["m"] == 8 and key["q"] == 6 and key["d"] == 144
        hashed = json.loads((hashed_dir / "f0000_01.json").read_text())
        assert hashed["m"] == 8
        assert all(1 <= c <= 6 for row in hashed["codes"] for c in row)

    def test_missing_data_arguments_is_usage_error(self):
        assert main(["hash"]) == 1

    def test_missing_data_file_is_runtime_error(self, tmp_path, capsys):
        code = main(
            ["hash", "--data", str(tmp_path / "absent"), "--seed", "1", "--out", str(tmp_path / "o")]
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestMatch:
    def test_prints_score(self, hashed_dir, capsys):
        code = main(
            ["match", "--a", str(hashed_dir / "f0000_01.json"), "--b", str(hashed_dir / "f0000_02.json")]
        )
        assert code == 0
        value = float(capsys.readouterr().out.strip())
        assert 0.0 <= value <= 1.0

    def test_self_match_is_one(self, hashed_dir, capsys):
        main(
            ["match", "--a", str(hashed_dir / "f0001_01.json"), "--b", str(hashed_dir / "f0001_01.json")]
        )
        assert capsys.readouterr().out.strip() == "1.0"

    def test_detail_output(self, hashed_dir, tmp_path, capsys):
        detail = tmp_path / "detail.json"
        main(
            [
                "match",
                "--a", str(hashed_dir / "f0000_01.json"),
                "--b", str(hashed_dir / "f0000_02.json"),
                "--detail", str(detail),
            ]
        )
        payload = json.loads(detail.read_text())
        score = float(capsys.readouterr().out.strip())
        assert payload["score"] == score
        assert payload["n_p"] == len(payload["pairs"])
        assert payload["config"]["greedy_unique"] is True

    def test_cross_key_is_runtime_error(self, data_dir, hashed_dir, tmp_path, capsys):
        other = tmp_path / "other"
        main(
            ["hash", "--data", str(data_dir), "--seed", "4", "--out", str(other)]
            + SMALL_KEY
            + SMALL_MCC
        )
        code = main(
            ["match", "--a", str(hashed_dir / "f0000_01.json"), "--b", str(other / "f0000_01.json")]
        )
        assert code == 2
        assert "fingerprint mismatch" in capsys.readouterr().err


class TestEvaluate:
    def run(self, data_dir, out, extra=()):
        return main(
            ["evaluate", "--data", str(data_dir), "--seed", "11", "--out", str(out)]
            + SMALL_KEY
            + SMALL_MCC
            + list(extra)
        )

    def test_writes_report_and_roc(self, data_dir, tmp_path, capsys):
        out = tmp_path / "eval"
        assert self.run(data_dir, out) == 0
        assert capsys.readouterr().out.startswith("eer=")
        report = json.loads((out / "report.json").read_text())
        assert 0.0 <= report["eer"] <= 1.0
        assert len(report["genuine_scores"]) == 12
        assert len(report["impostor_scores"]) == 6
        assert report["config"]["data"] == str(data_dir)
        assert (out / "roc.csv").read_text().startswith("threshold,fmr,fnmr")

    def test_rerun_and_threads_are_byte_identical(self, data_dir, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        threaded = tmp_path / "c"
        self.run(data_dir, first)
        self.run(data_dir, second)
        self.run(data_dir, threaded, extra=["--threads", "3"])
        assert read_bytes(first) == read_bytes(second) == read_bytes(threaded)

    def test_zero_m_is_usage_error(self, data_dir, tmp_path):
        code = main(
            ["evaluate", "--data", str(data_dir), "--seed", "1", "--m", "0", "--out", str(tmp_path / "x")]
        )
        assert code == 1

    def test_missing_data_is_runtime_error(self, tmp_path):
        code = main(
            ["evaluate", "--data", str(tmp_path / "absent"), "--seed", "1", "--out", str(tmp_path / "x")]
        )
        assert code == 2


class TestSweep:
    def test_writes_grid_csvs(self, data_dir, tmp_path):
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "--data", str(data_dir),
                "--seed", "5",
                "--m", "4,8",
                "--q", "6",
                "--trials", "2",
                "--out", str(out),
            ]
            + SMALL_MCC
        )
        assert code == 0
        trials = (out / "sweep_trials.csv").read_text().splitlines()
        means = (out / "sweep_means.csv").read_text().splitlines()
        assert trials[0] == "m,q,trial,seed,eer"
        assert len(trials) == 1 + 2 * 1 * 2
        assert means[0] == "m,q,mean_eer"
        assert len(means) == 1 + 2

    def test_empty_grid_is_usage_error(self, data_dir, tmp_path):
        code = main(
            ["sweep", "--data", str(data_dir), "--seed", "5", "--m", ",", "--out", str(tmp_path / "x")]
        )
        assert code == 1


class TestAnalyze:
    def test_invert(self, tmp_path):
        out = tmp_path / "invert"
        code = main(
            [
                "analyze",
                "--mode", "invert",
                "--seed", "0",
                "--attempts", "20000",
                "--volume-samples", "20000",
                "--out", str(out),
            ]
        )
        assert code == 0
        report = json.loads((out / "invert.json").read_text())
        for name in ("square", "underdetermined"):
            assert report[name]["found"] is True
            assert report[name]["rehash_matches"] is True
        assert report["guess_space"]["decimal_digits"] == 6145
        rows = (out / "invert_volume.csv").read_text().splitlines()
        assert rows[0] == "case,constraints,volume_estimate"
        # 3 constraints for the square case, 2 for the underdetermined one
        assert len(rows) == 1 + 4 + 3

    def test_unlink(self, data_dir, tmp_path):
        out = tmp_path / "unlink"
        code = main(
            [
                "analyze",
                "--mode", "unlink",
                "--data", str(data_dir),
                "--seed-a", "1",
                "--seed-b", "2",
                "--out", str(out),
            ]
            + SMALL_KEY
            + SMALL_MCC
        )
        assert code == 0
        report = json.loads((out / "unlink.json").read_text())
        assert len(report["mated_genuine"]) == 12
        assert len(report["non_mated_impostor"]) == 6
        assert 0.0 <= report["histogram_intersection"] <= 1.0
        hist = (out / "unlink_hist.csv").read_text().splitlines()
        assert hist[0] == "bin_left,bin_right,mated_genuine_fraction,non_mated_impostor_fraction"
        assert len(hist) == 1 + 100

    def test_unlink_requires_both_seeds(self, data_dir, tmp_path):
        code = main(
            ["analyze", "--mode", "unlink", "--data", str(data_dir), "--seed-a", "1", "--out", str(tmp_path / "x")]
        )
        assert code == 1

    def test_revoke(self, data_dir, tmp_path):
        out = tmp_path / "revoke"
        code = main(
            [
                "analyze",
                "--mode", "revoke",
                "--data", str(data_dir),
                "--base-seed", "5",
                "--n-keys", "2",
                "--seed", "9",
                "--out", str(out),
            ]
            + SMALL_KEY
            + SMALL_MCC
        )
        assert code == 0
        report = json.loads((out / "revoke.json").read_text())
        assert len(report["mated_genuine"]) == 4 * 2
        assert len(report["genuine"]) == 12
        assert len(report["impostor"]) == 6
        assert 0.0 <= report["intersection_mated_vs_impostor"] <= 1.0
        hist = (out / "revoke_hist.csv").read_text().splitlines()
        assert len(hist) == 1 + 100

    def test_revoke_requires_base_seed(self, data_dir, tmp_path):
        code = main(
            ["analyze", "--mode", "revoke", "--data", str(data_dir), "--out", str(tmp_path / "x")]
        )
        assert code == 1

    def test_analyze_rerun_is_byte_identical(self, tmp_path):
        args = [
            "analyze", "--mode", "invert", "--seed", "0",
            "--attempts", "5000", "--volume-samples", "5000",
        ]
        first = tmp_path / "one"
        second = tmp_path / "two"
        main(args + ["--out", str(first)])
        main(args + ["--out", str(second)])
        assert read_bytes(first) == read_bytes(second)


class TestTopLevel:
    def test_unknown_command_is_usage_error(self):
        assert main(["frobnicate"]) == 1

    def test_unknown_flag_is_usage_error(self):
        assert main(["hash", "--case", "1", "--bogus"]) == 1

    def test_help_exits_zero(self):
        assert main(["--help"]) == 0

    def test_console_script_runs(self):
        proc = subprocess.run(
            ["giom", "hash", "--case", "1"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert proc.stdout == "1 2 1\n"

    def test_no_binary_artifacts(self, data_dir, hashed_dir):
        for directory in (data_dir, hashed_dir):
            assert list(directory.glob("*.npy")) == []
