import numpy as np
import pytest

import pointspec as ps
from pointspec.cli import main
from pointspec.kvio import read_kv


def run(*argv):
    return main([str(a) for a in argv])


class TestSample:
    def test_poisson_roundtrip(self, tmp_path):
        out = tmp_path / "pat.csv"
        rc = run("sample", "--process", "poisson", "--intensity", "0.5",
                 "--window", "box", "--lengths", "20,20", "--seed", "3",
                 "--out", out)
        assert rc == 0
        pat = ps.load_pattern(out)
        assert pat.window == ps.Box((20.0, 20.0))
        manifest = read_kv(str(out) + ".manifest")
        assert manifest["subcommand"] == "sample"
        assert manifest["seed"] == "3"
        assert "versions.numpy" in manifest

    def test_seed_is_recorded_even_when_omitted(self, tmp_path):
        out = tmp_path / "pat.csv"
        rc = run("sample", "--process", "poisson", "--intensity", "0.5",
                 "--window", "box", "--lengths", "10,10", "--out", out)
        assert rc == 0
        manifest = read_kv(str(out) + ".manifest")
        int(manifest["seed"])  # parses as an integer

    def test_ginibre_needs_radius_window(self, tmp_path):
        out = tmp_path / "g.csv"
        rc = run("sample", "--process", "ginibre", "--window", "ball",
                 "--radius", "8", "--seed", "1", "--out", out)
        assert rc == 0
        pat = ps.load_pattern(out)
        assert pat.window == ps.Ball(8.0)

    def test_missing_lengths_is_validation_error(self, tmp_path):
        rc = run("sample", "--process", "poisson", "--window", "box",
                 "--out", tmp_path / "x.csv")
        assert rc == 2


class TestEstimate:
    @pytest.fixture()
    def pattern_file(self, tmp_path):
        out = tmp_path / "pat.csv"
        run("sample", "--process", "poisson", "--intensity", "0.3183",
            "--window", "box", "--lengths", "30,30", "--seed", "5", "--out", out)
        return out

    def test_si_with_bins(self, tmp_path, pattern_file):
        out = tmp_path / "est.csv"
        rc = run("estimate", "--pattern", pattern_file, "--estimator", "si",
                 "--k-max", "2.0", "--bins", "10", "--out", out)
        assert rc == 0
        est = ps.load_estimate(out)
        assert est.bins is not None and len(est.bins.k_bin) <= 10
        manifest = read_kv(str(out) + ".manifest")
        assert manifest["config.estimator"] == "si"
        assert manifest["rho_source"] == "declared"

    def test_multitaper_debias(self, tmp_path, pattern_file):
        out = tmp_path / "mt.csv"
        rc = run("estimate", "--pattern", pattern_file, "--estimator", "multitaper",
                 "--taper-count", "4", "--debias", "direct", "--k-max", "1.5",
                 "--out", out)
        assert rc == 0
        est = ps.load_estimate(out)
        assert np.all(est.values >= 0.0)

    def test_bartlett_requires_ball(self, tmp_path, pattern_file):
        rc = run("estimate", "--pattern", pattern_file, "--estimator", "bartlett",
                 "--out", tmp_path / "b.csv")
        assert rc == 2

    def test_bartlett_on_ball(self, tmp_path):
        pat_file = tmp_path / "ball.csv"
        run("sample", "--process", "poisson", "--intensity", "0.4",
            "--window", "ball", "--radius", "12", "--seed", "2", "--out", pat_file)
        out = tmp_path / "bi.csv"
        rc = run("estimate", "--pattern", pat_file, "--estimator", "bartlett",
                 "--n-k", "15", "--out", out)
        assert rc == 0
        est = ps.load_estimate(out)
        assert len(est) == 15
        assert est.wavevectors is None


class TestPcfAndDiagnostics:
    def test_pcf_csv(self, tmp_path):
        pat_file = tmp_path / "pat.csv"
        run("sample", "--process", "poisson", "--intensity", "0.5",
            "--window", "box", "--lengths", "30,30", "--seed", "4", "--out", pat_file)
        out = tmp_path / "pcf.csv"
        rc = run("pcf", "--pattern", pat_file, "--n-r", "32", "--out", out)
        assert rc == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "r,g_hat"
        assert len(rows) == 33

    def test_hindex_and_alpha_from_estimate_file(self, tmp_path):
        k = np.logspace(-3, 0, 100)
        ps.save_estimate(ps.SpectralEstimate(k, ps.structure_factor_thomas(k)),
                         tmp_path / "thomas.csv")
        out = tmp_path / "h.kv"
        rc = run("hindex", "--estimate", tmp_path / "thomas.csv",
                 "--fit-k-max", "0.3", "--out", out)
        assert rc == 0
        kv = read_kv(out)
        assert float(kv["h"]) == pytest.approx(21.262, abs=0.01)
        assert kv["effectively_hyperuniform"] == "false"

        ps.save_estimate(ps.SpectralEstimate(k, ps.structure_factor_ginibre(k)),
                         tmp_path / "gin.csv")
        out2 = tmp_path / "a.kv"
        rc = run("alpha", "--estimate", tmp_path / "gin.csv",
                 "--fit-k-max", "0.45", "--out", out2)
        assert rc == 0
        assert float(read_kv(out2)["alpha"]) == pytest.approx(2.0, abs=0.05)


class TestMultiscaleCli:
    def test_tiny_run_writes_report(self, tmp_path):
        out = tmp_path / "test.kv"
        rc = run("test", "--process", "poisson", "--intensity", "0.3",
                 "--size-min", "10", "--size-max", "20", "--size-step", "5",
                 "--a", "3", "--seed", "11", "--jobs", "1", "--out", out)
        assert rc == 0
        kv = read_kv(out)
        for key in ("z_bar", "sigma_bar", "ci_lo", "ci_hi", "reject",
                    "A", "lambda", "estimator", "schedule"):
            assert key in kv
        assert kv["A"] == "3"
        assert kv["estimator"] == "si"

    def test_ball_schedule_defaults_to_bartlett(self, tmp_path):
        out = tmp_path / "test.kv"
        rc = run("test", "--process", "poisson", "--intensity", "0.3",
                 "--window", "ball", "--size-min", "8", "--size-max", "12",
                 "--size-step", "2", "--a", "2", "--seed", "1", "--jobs", "1",
                 "--out", out)
        assert rc == 0
        assert read_kv(out)["estimator"] == "bartlett"


class TestBenchmarkCli:
    def test_small_benchmark(self, tmp_path):
        prefix = tmp_path / "bench"
        rc = run("benchmark", "--process", "poisson", "--intensity", "0.3183",
                 "--length", "20", "--a", "4", "--k-max", "2.0", "--bins", "12",
                 "--k-lo", "0.4", "--k-hi", "1.8", "--seed", "2",
                 "--out-prefix", prefix)
        assert rc == 0
        table = (tmp_path / "bench_imse.csv").read_text().splitlines()
        assert table[0] == "seed_index,imse_si,imse_ddmt"
        assert len(table) == 5
        kv = read_kv(tmp_path / "bench_ttest.kv")
        assert set(kv) >= {"t", "p", "df", "imse_si_mean", "imse_ddmt_mean"}


class TestPlotdataCli:
    def test_excludes_nonpositive_and_writes_svg(self, tmp_path):
        k = np.linspace(0.1, 2.0, 40)
        vals = np.sin(5 * k)  # some negative values to drop
        ps.save_estimate(ps.SpectralEstimate(k, vals), tmp_path / "est.csv")
        out = tmp_path / "plot.csv"
        svg = tmp_path / "plot.svg"
        rc = run("plotdata", "--estimate", tmp_path / "est.csv",
                 "--process", "poisson", "--svg", svg, "--out", out)
        assert rc == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "log10_k,log10_s,log10_s_exact"
        assert len(rows) - 1 == int((vals > 0).sum())
        body = svg.read_text()
        assert body.startswith("<svg") and "circle" in body
        manifest = read_kv(str(out) + ".manifest")
        assert manifest["excluded_nonpositive"] == str(int((vals <= 0).sum()))


class TestConfigPrecedence:
    def test_config_overrides_default_but_not_flag(self, tmp_path):
        pat_file = tmp_path / "pat.csv"
        run("sample", "--process", "poisson", "--intensity", "0.5",
            "--window", "box", "--lengths", "25,25", "--seed", "6", "--out", pat_file)
        cfg = tmp_path / "run.kv"
        cfg.write_text("k-max = 1.0\nbins = 5\n")
        out = tmp_path / "est.csv"
        rc = run("estimate", "--pattern", pat_file, "--bins", "8",
                 "--config", cfg, "--out", out)
        assert rc == 0
        manifest = read_kv(str(out) + ".manifest")
        assert manifest["config.k_max"] == "1.0"  # from config file
        assert manifest["config.bins"] == "8"     # explicit flag wins

    def test_unknown_config_key_fails(self, tmp_path):
        cfg = tmp_path / "run.kv"
        cfg.write_text("nonsense = 1\n")
        rc = run("sample", "--process", "poisson", "--intensity", "0.5",
                 "--window", "box", "--lengths", "10,10", "--config", cfg,
                 "--out", tmp_path / "x.csv")
        assert rc == 2

    def test_missing_input_file_is_exit_2(self, tmp_path):
        rc = run("estimate", "--pattern", tmp_path / "absent.csv",
                 "--out", tmp_path / "e.csv")
        assert rc == 2

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run("sample", "--bogus", "1")
        assert exc.value.code == 2
