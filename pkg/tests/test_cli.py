import csv
import textwrap

import pytest

from chaossep import cli


def write_config(tmp_path, text):
    path = tmp_path / "cfg.ini"
    path.write_text(textwrap.dedent(text))
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


SMALL_RUN = """\
    [run]
    kind = diff_params
    alpha = 0.4
    train_len = 1500
    test_len = 300
    n_nodes = 80
    washout = 100
"""


class TestConfigErrors:
    def run_expecting_3(self, tmp_path, capsys, text, command="separate"):
        cfg = write_config(tmp_path, text)
        code = cli.main([command, "--config", cfg, "--out", str(tmp_path / "out")])
        assert code == 3
        return capsys.readouterr().err

    def test_unknown_key_named(self, tmp_path, capsys):
        err = self.run_expecting_3(
            tmp_path, capsys, "[run]\nkind = diff_params\nalpha = 0.5\nfoo = 1\n"
        )
        assert "'foo'" in err and "'run'" in err

    def test_missing_kind(self, tmp_path, capsys):
        err = self.run_expecting_3(tmp_path, capsys, "[run]\nalpha = 0.5\n")
        assert "'kind'" in err

    def test_missing_alpha_for_separate(self, tmp_path, capsys):
        err = self.run_expecting_3(tmp_path, capsys, "[run]\nkind = diff_params\n")
        assert "'alpha'" in err

    def test_invalid_value(self, tmp_path, capsys):
        err = self.run_expecting_3(
            tmp_path, capsys, "[run]\nkind = diff_params\nalpha = much\n"
        )
        assert "'much'" in err

    def test_custom_kind_rejected(self, tmp_path, capsys):
        err = self.run_expecting_3(tmp_path, capsys, "[run]\nkind = custom\nalpha = 0.5\n")
        assert "kind" in err

    def test_missing_config_file(self, tmp_path, capsys):
        code = cli.main(["separate", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)])
        assert code == 3

    def test_empty_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "")
        assert cli.main(["separate", "--config", cfg]) == 3

    def test_jobs_below_one(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL_RUN)
        assert cli.main(["separate", "--config", cfg, "--jobs", "0"]) == 3

    def test_invalid_grid_step(self, tmp_path, capsys):
        err = self.run_expecting_3(
            tmp_path,
            capsys,
            "[run]\nkind = diff_params\ngrid_step = 0.7\n",
            command="estimate-alpha",
        )
        assert "grid_step" in err


class TestOutputDir:
    def test_file_in_path_gives_exit_2(self, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("occupied")
        cfg = write_config(tmp_path, SMALL_RUN)
        code = cli.main(["separate", "--config", cfg, "--out", str(blocker / "sub")])
        assert code == 2
        assert "chaossep: error:" in capsys.readouterr().err


GEN = """\
    [run]
    kind = diff_params
    alpha = 0.4
    n_samples = 400
    discard = 100
"""


class TestGenerate:
    def test_file_set_and_manifest(self, tmp_path):
        cfg = write_config(tmp_path, GEN)
        out = tmp_path / "out"
        assert cli.main(["generate", "--config", cfg, "--out", str(out)]) == 0
        names = {"traj1.csv", "traj2.csv", "s1.csv", "s2.csv", "mixed.csv", "manifest.csv"}
        assert names <= {p.name for p in out.iterdir()}
        rows = read_rows(out / "manifest.csv")
        assert rows[0] == ["kind", "component", "alpha", "seed", "n_samples", "dt", "normalization"]
        assert rows[1][0] == "diff_params"
        assert float(rows[1][2]) == 0.4
        assert rows[1][3] == "0"
        assert rows[1][6] == "amplitude"
        traj = read_rows(out / "traj1.csv")
        assert traj[0] == ["t", "x", "y", "z"]
        assert len(traj) == 401

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, GEN)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        cli.main(["generate", "--config", cfg, "--out", str(out_a)])
        cli.main(["generate", "--config", cfg, "--out", str(out_b)])
        for name in ("traj1.csv", "s1.csv", "mixed.csv", "manifest.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_seed_flag_changes_data(self, tmp_path):
        cfg = write_config(tmp_path, GEN)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        cli.main(["generate", "--config", cfg, "--out", str(out_a)])
        cli.main(["generate", "--config", cfg, "--out", str(out_b), "--seed", "9"])
        assert (out_a / "s1.csv").read_bytes() != (out_b / "s1.csv").read_bytes()
        assert read_rows(out_b / "manifest.csv")[1][3] == "9"

    def test_config_seed_key_used_without_flag(self, tmp_path):
        cfg = write_config(tmp_path, GEN + "    seed = 7\n")
        out = tmp_path / "out"
        cli.main(["generate", "--config", cfg, "--out", str(out)])
        assert read_rows(out / "manifest.csv")[1][3] == "7"

    def test_out_dir_key_used_without_flag(self, tmp_path):
        target = tmp_path / "from_config"
        cfg = write_config(tmp_path, GEN + f"    out_dir = {target}\n")
        assert cli.main(["generate", "--config", cfg]) == 0
        assert (target / "manifest.csv").exists()


class TestSeparate:
    def test_report_and_predictions_schema(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_RUN)
        out = tmp_path / "out"
        assert cli.main(["separate", "--config", cfg, "--out", str(out)]) == 0
        report = read_rows(out / "report.csv")
        assert report[0] == ["scenario", "alpha", "seed", "estimator", "e_norm", "e_num", "zeta_star", "n"]
        assert [r[3] for r in report[1:]] == ["rc", "wiener"]
        assert all(r[0] == "diff_params" and float(r[1]) == 0.4 for r in report[1:])
        preds = read_rows(out / "predictions.csv")
        assert preds[0] == ["t", "actual", "rc", "wiener"]
        assert len(preds) == 301


SWEEP = """\
    [run]
    kind = diff_params
    alphas = 0.3, 0.6
    repeats = 2
    train_len = 1500
    test_len = 300
    n_nodes = 80
    washout = 100
"""


class TestSweep:
    def test_outputs_identical_across_jobs(self, tmp_path):
        cfg = write_config(tmp_path, SWEEP)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert cli.main(["sweep", "--config", cfg, "--out", str(out_a), "--jobs", "1"]) == 0
        assert cli.main(["sweep", "--config", cfg, "--out", str(out_b), "--jobs", "2"]) == 0
        for name in ("fig2.csv", "report.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_table_schema(self, tmp_path):
        cfg = write_config(tmp_path, SWEEP)
        out = tmp_path / "out"
        cli.main(["sweep", "--config", cfg, "--out", str(out)])
        rows = read_rows(out / "fig2.csv")
        assert rows[0] == ["alpha", "estimator", "e_mean", "e_stderr", "num_mean", "num_stderr", "repeats"]
        assert len(rows) == 5  # 2 alphas x 2 estimators + header
        assert all(r[6] == "2" for r in rows[1:])
        records = read_rows(out / "report.csv")
        assert len(records) == 1 + 2 * 2 * 2  # alphas x seeds x estimators

    def test_fig_name_follows_kind(self, tmp_path):
        cfg = write_config(tmp_path, SWEEP.replace("diff_params", "diff_speed"))
        out = tmp_path / "out"
        cli.main(["sweep", "--config", cfg, "--out", str(out)])
        assert (out / "fig3.csv").exists()


class TestMultiSection:
    def test_sections_get_subdirectories(self, tmp_path):
        cfg = write_config(
            tmp_path,
            """\
            [first]
            kind = diff_params
            alpha = 0.3
            n_samples = 300
            discard = 50

            [second]
            kind = diff_speed
            alpha = 0.7
            n_samples = 300
            discard = 50
            """,
        )
        out = tmp_path / "out"
        assert cli.main(["generate", "--config", cfg, "--out", str(out)]) == 0
        assert (out / "first" / "manifest.csv").exists()
        assert (out / "second" / "manifest.csv").exists()
        assert read_rows(out / "second" / "manifest.csv")[1][0] == "diff_speed"


EST = """\
    [run]
    kind = diff_params
    n_nodes = 50
    sparsity = 0.9
    washout = 40
    train_len = 600
    test_len = 600
    grid_step = 0.25
"""


class TestEstimateAlpha:
    def test_writes_grid_table(self, tmp_path):
        cfg = write_config(tmp_path, EST)
        out = tmp_path / "out"
        assert cli.main(["estimate-alpha", "--config", cfg, "--out", str(out)]) == 0
        rows = read_rows(out / "fig5.csv")
        assert rows[0] == ["true_alpha", "corrected_estimate"]
        assert [float(r[0]) for r in rows[1:]] == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert all(0.0 <= float(r[1]) <= 1.0 for r in rows[1:])


INTERP = """\
    [run]
    kind = diff_params
    alpha = 0.5
    n_nodes = 60
    washout = 50
    train_len = 800
    test_len = 200
    spacings = 0, 0.2
    midpoints = 0.5
"""


class TestInterpStudy:
    def test_writes_ratio_table(self, tmp_path):
        cfg = write_config(tmp_path, INTERP)
        out = tmp_path / "out"
        assert cli.main(["interp-study", "--config", cfg, "--out", str(out)]) == 0
        rows = read_rows(out / "fig6.csv")
        assert rows[0] == ["spacing", "alpha", "direct", "interpolated", "ratio", "repeats"]
        by_spacing = {float(r[0]): r for r in rows[1:]}
        assert by_spacing[0.0][4] == "1.0"
        assert float(by_spacing[0.2][4]) > 0.0
