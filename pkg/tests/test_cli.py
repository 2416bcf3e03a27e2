"""Command-line surface: emission, validation, exit codes, reproducibility."""

import numpy as np
import pytest
from math import exp, log

from stablewealth.cli import main
from stablewealth.stable import StableParams, sample


def read_table(path):
    """Config comments and rows of an emitted CSV."""
    config, header, rows = {}, None, []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[2:].partition("=")
            config[key] = value
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return config, header, rows


def col(header, rows, name, cast=float):
    i = header.index(name)
    return [cast(r[i]) for r in rows]


class TestBound:
    def test_dca_emission(self, tmp_path):
        out = tmp_path / "bound.csv"
        rc = main(
            [
                "--out", str(out), "bound", "--dca",
                "--alpha", "1.89", "--beta", "1", "--sigma", "0.110", "--mu", "0.0658",
                "--k", "12", "--quantiles", "0.05,0.95",
            ]
        )
        assert rc == 0
        config, header, rows = read_table(out)
        assert config["command"] == "bound"
        assert config["alpha"] == "1.89"
        assert header == ["k", "mu_k", "sigma_k", "logZ_q0.05", "logZ_q0.95", "logR_q0.05", "logR_q0.95"]
        assert len(rows) == 12
        for name in ("mu_k", "sigma_k", "logZ_q0.95"):
            vals = col(header, rows, name)
            assert all(b > a for a, b in zip(vals, vals[1:]))
        lo = col(header, rows, "logZ_q0.05")
        hi = col(header, rows, "logZ_q0.95")
        assert all(a < b for a, b in zip(lo, hi))

    def test_k1_equals_law_quantiles(self, tmp_path):
        out = tmp_path / "b1.csv"
        assert main(["--out", str(out), "bound", "--dca", "--k", "1", "--quantiles", "0.5"]) == 0
        _, header, rows = read_table(out)
        from stablewealth.stable import quantile

        v = col(header, rows, "logZ_q0.5")[0]
        assert v == pytest.approx(quantile(StableParams(1.89, 1.0, 0.110, 0.0658), 0.5), abs=1e-8)

    def test_closed_form_rejects_alpha_one(self, capsys):
        rc = main(["bound", "--dca", "--alpha", "1", "--closed-form", "--k", "5"])
        assert rc == 1
        assert "alpha != 1" in capsys.readouterr().err

    def test_general_schedule(self, tmp_path):
        out = tmp_path / "gen.csv"
        rc = main(
            [
                "--out", str(out), "bound",
                "--times", "0", "1", "2.5", "--amounts", "2", "1", "1",
            ]
        )
        assert rc == 0
        _, header, rows = read_table(out)
        assert len(rows) == 2


class TestWithdraw:
    def test_sixteen_withdrawals(self, tmp_path):
        out = tmp_path / "w.csv"
        rc = main(["--out", str(out), "withdraw", "--k", "16", "--C", "0.95"])
        assert rc == 0
        _, header, rows = read_table(out)
        assert col(header, rows, "necessary_principal")[0] >= 16.0

    def test_median_symmetric_closed_form(self, tmp_path):
        out = tmp_path / "w2.csv"
        rc = main(
            [
                "--out", str(out), "withdraw", "--k", "1", "--C", "0.5",
                "--alpha", "1.7", "--beta", "0", "--sigma", "0.2", "--mu", "0.05",
            ]
        )
        assert rc == 0
        _, header, rows = read_table(out)
        assert col(header, rows, "necessary_principal")[0] == pytest.approx(
            exp(-0.05), rel=1e-6
        )

    def test_continuous_curve_monotone(self, tmp_path):
        out = tmp_path / "wc.csv"
        rc = main(
            ["--out", str(out), "withdraw", "--continuous", "--n", "12",
             "--C", "0.6", "0.75", "0.9", "0.99"]
        )
        assert rc == 0
        _, header, rows = read_table(out)
        ps = col(header, rows, "necessary_principal")
        assert all(b > a for a, b in zip(ps, ps[1:]))

    def test_missing_k_is_usage_error(self, capsys):
        assert main(["withdraw", "--C", "0.9"]) == 1


class TestFrontier:
    def test_discrete_small(self, tmp_path):
        out = tmp_path / "f.csv"
        rc = main(
            ["--out", str(out), "frontier", "--C", "0.95", "--alpha", "1.89",
             "--beta", "1", "--k-min", "2", "--k-max", "6"]
        )
        assert rc == 0
        config, header, rows = read_table(out)
        s = col(header, rows, "s_k")
        assert len(s) == 5
        assert all(b <= a for a, b in zip(s, s[1:]))

    def test_continuous_table(self, tmp_path):
        out = tmp_path / "fc.csv"
        rc = main(
            ["--out", str(out), "frontier", "--continuous", "--C", "0.95",
             "--alpha", "2.0", "--beta", "0"]
        )
        assert rc == 0
        _, header, rows = read_table(out)
        assert header == ["mu", "s_mu", "min_sigma"]
        mus = col(header, rows, "mu")
        mins = col(header, rows, "min_sigma")
        assert len(rows) == 500
        assert all(m > 0 for m in mins)

    def test_surrogate_fit_summary(self, tmp_path):
        out = tmp_path / "fs.csv"
        rc = main(
            ["--out", str(out), "frontier", "--C", "0.95", "--beta", "0",
             "--alpha", "1.2", "1.4", "1.6", "1.8", "1.9", "2.0",
             "--k-min", "2", "--k-max", "12", "--fit-surrogate"]
        )
        assert rc == 0
        config, header, rows = read_table(out)
        assert "surrogate_max_abs_residual" in config
        assert "surrogate_coefficients" in config
        assert len(rows) == 6 * 11


class TestDiscount:
    def test_grid_and_bracket(self, tmp_path):
        out = tmp_path / "d.csv"
        rc = main(
            ["--out", str(out), "discount", "--alpha", "1.5", "2.0",
             "--mu-min", "0.01", "--mu-max", "0.5", "--mu-step", "0.01"]
        )
        assert rc == 0
        _, header, rows = read_table(out)
        assert header == ["mu", "alpha", "x", "s"]
        assert len(rows) == 100
        svals = col(header, rows, "s")
        assert all(s < 0.5 for s in svals)
        from math import expm1

        for r in rows:
            mu, alpha, x, s = (float(v) for v in r)
            rr = mu / expm1(mu)
            assert 1.0 / (alpha + 1.0) - 1e-9 <= s <= 1.0 / (rr * alpha + 1.0) + 1e-9


class TestOracle:
    def test_clean_run_exit_zero(self, capsys):
        rc = main(
            ["--seed", "3", "oracle", "--check", "all", "--k", "4",
             "--P", "4", "--n-paths", "4000"]
        )
        assert rc == 0
        text = capsys.readouterr().out
        assert "wealth_domination" in text
        assert "star_domination" in text
        assert "withdrawal_duality" in text
        assert "success_probability" in text
        assert "violations: 0" in text

    def test_violation_exit_three(self, capsys):
        rc = main(
            ["--seed", "3", "oracle", "--check", "domination", "--k", "4",
             "--n-paths", "2000", "--bound-scale", "1.01"]
        )
        assert rc == 3


class TestData:
    def make_csv(self, tmp_path, rng, n=61):
        gross = np.exp(sample(StableParams(1.89, 1.0, 0.110, 0.0658), rng, n - 1))
        level = 100.0 * np.concatenate([[1.0], np.cumprod(gross)])
        lines = ["year,I,D,C"]
        for i in range(n):
            lines.append(f"{1950 + i},{level[i]:.6f},0.000001,1.0")
        path = tmp_path / "annual.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def test_pipeline_outputs(self, tmp_path, rng, capsys):
        csv = self.make_csv(tmp_path, rng)
        rc = main(
            ["data", "--csv", str(csv), "--out-dir", str(tmp_path),
             "--init", "1.91,1,0.115,0.0658"]
        )
        assert rc == 0
        assert "fitted: alpha=" in capsys.readouterr().out
        _, h_r, rows_r = read_table(tmp_path / "returns.csv")
        assert h_r == ["year", "gross", "log"]
        assert len(rows_r) == 60
        config, h_q, rows_q = read_table(tmp_path / "qq.csv")
        assert h_q == ["p", "empirical", "model"]
        assert "fit_alpha" in config
        emp = col(h_q, rows_q, "empirical")
        mod = col(h_q, rows_q, "model")
        assert all(b >= a for a, b in zip(emp, emp[1:]))
        assert all(b > a for a, b in zip(mod, mod[1:]))

    def test_invalid_csv_exit_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("year,I,D,C\n2000,100,5,0\n2001,100,5,1\n", encoding="utf-8")
        rc = main(["data", "--csv", str(bad), "--out-dir", str(tmp_path)])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file_exit_one(self, tmp_path):
        rc = main(["data", "--csv", str(tmp_path / "nope.csv"), "--out-dir", str(tmp_path)])
        assert rc == 1


class TestGlobalBehavior:
    def test_unknown_command_usage_error(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_seed_determinism(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for out in (a, b):
            rc = main(
                ["--seed", "11", "--out", str(out), "oracle", "--check", "success",
                 "--k", "3", "--P", "3", "--n-paths", "3000"]
            )
            assert rc == 0
        assert a.read_text() == b.read_text()

    def test_config_echo_reproducibility(self, tmp_path):
        out = tmp_path / "echo.csv"
        main(["--seed", "5", "--out", str(out), "discount", "--alpha", "2.0",
              "--mu-min", "0.1", "--mu-max", "0.2", "--mu-step", "0.1"])
        config, _, _ = read_table(out)
        assert config["seed"] == "5"
        assert config["mu_min"] == "0.1"
        assert config["command"] == "discount"
