import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad

from fractoback import cli
from fractoback.config import ExperimentConfig
from fractoback.errors import ConfigError
from fractoback.presets import PROFILES, data_vector, poly_coefficients, preset_examples
from fractoback.spectral import DiagonalOperator, project

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
FAST = ["--n-modes", "8", "--times", "5"]


@pytest.fixture(autouse=True)
def _no_env_outdir(monkeypatch):
    monkeypatch.delenv(cli.OUTDIR_ENV, raising=False)


def _summary(out: str) -> dict:
    return json.loads(out[out.index("{"):])


class TestMlfEval:
    def test_value(self, capsys):
        code = cli.main(["mlf-eval", "--rho", "0.5", "--beta0", "1", "--z", "-1"])
        out = capsys.readouterr().out
        assert code == cli.EXIT_OK
        value = float(out.split("value = ")[1].split()[0])
        # E_{1/2}(-1) = e erfc(1)
        assert value == pytest.approx(0.42758357615580705, rel=1e-12)

    @pytest.mark.parametrize("method", ["series", "contour", "oracle"])
    def test_forced_methods_agree(self, method, capsys):
        assert cli.main(["mlf-eval", "--rho", "0.8,0.4", "--beta0", "1.8", "--z", "-2,-1",
                         "--method", method]) == cli.EXIT_OK
        out = capsys.readouterr().out
        assert f"method = {method}" in out
        assert float(out.split("value = ")[1].split()[0]) == pytest.approx(
            0.29770960523340545, rel=1e-11)  # mpmath invertlaplace

    def test_negative_lists(self, capsys):
        code = cli.main(["mlf-eval", "--rho", "0.8,0.4", "--beta0", "1.8", "--z", "-5,-1"])
        assert code == cli.EXIT_OK

    @pytest.mark.parametrize("argv", [
        ["--rho", "0.4,0.8", "--beta0", "1", "--z", "-1,-1"],
        ["--rho", "abc", "--beta0", "1", "--z", "-1"],
        ["--rho", "0.5", "--beta0", "1", "--z", "-1,-2"],
    ])
    def test_bad_input_is_config_error(self, argv, capsys):
        assert cli.main(["mlf-eval", *argv]) == cli.EXIT_CONFIG
        assert "config error" in capsys.readouterr().err


class TestSubcommands:
    def test_list_presets(self, capsys):
        assert cli.main(["list-presets"]) == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "poly" in out and "const" in out

    @pytest.mark.parametrize("cmd", ["forward", "backward", "roundtrip"])
    def test_runs_and_writes(self, cmd, tmp_path, capsys):
        code = cli.main([cmd, *FAST, "--final", "mode:2", "--out", str(tmp_path)])
        assert code == cli.EXIT_OK
        assert list(tmp_path.glob("*.csv")) and list(tmp_path.glob("*.json"))
        assert _summary(capsys.readouterr().out)["passed"]

    def test_illposed(self, tmp_path, capsys):
        assert cli.main(["illposed-demo", "--out", str(tmp_path)]) == cli.EXIT_OK

    def test_conditional(self, tmp_path, capsys):
        code = cli.main(["conditional-stability", "--n-modes", "16", "--cases", "5",
                         "--out", str(tmp_path)])
        assert code == cli.EXIT_OK

    def test_validate_default(self, tmp_path, capsys):
        assert cli.main(["validate", *FAST, "--out", str(tmp_path)]) == cli.EXIT_OK

    def test_failed_check_exit_code(self, tmp_path, capsys):
        # four steps are too few to see the asymptotic order
        code = cli.main(["validate", "--check", "residual", "--steps", "4", "--levels", "2",
                         "--n-modes", "4", "--out", str(tmp_path)])
        assert code == cli.EXIT_FAILED


class TestConfigHandling:
    def test_missing_file(self, capsys):
        assert cli.main(["forward", "--config", "/nonexistent.cfg"]) == cli.EXIT_CONFIG

    def test_bad_flag_value_names_flag(self, capsys):
        assert cli.main(["forward", "--rho", "1.5"]) == cli.EXIT_CONFIG
        assert "--rho" in capsys.readouterr().err

    def test_bad_file_value_names_line(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[operator]\nn_modes = 32\n\n[problem]\nT = -1\n")
        assert cli.main(["forward", "--config", str(cfg)]) == cli.EXIT_CONFIG
        err = capsys.readouterr().err
        assert "bad.cfg:5" in err and "[problem] T" in err

    def test_flag_overrides_config(self):
        args = cli.build_parser().parse_args(
            ["forward", "--config", str(CONFIGS / "twoterm.cfg"), "--n-modes", "48"])
        cfg = cli.load_config(args)
        assert cfg.operator().n_modes == 48
        assert cfg.orders().rhos == (0.8, 0.4)

    def test_override_conflicting_with_file(self, capsys):
        # the file pins k_max = 32
        code = cli.main(["illposed-demo", "--config", str(CONFIGS / "twoterm.cfg"), "--n-modes", "8"])
        assert code == cli.EXIT_CONFIG
        assert "twoterm.cfg:25" in capsys.readouterr().err

    def test_k_range_follows_modes(self):
        cfg = ExperimentConfig.defaults({"operator.n_modes": "12"})
        assert (cfg.get("experiment", "k_min"), cfg.get("experiment", "k_max")) == (3, 12)

    @pytest.mark.parametrize("name", ["twoterm", "threeterm", "diagonal", "classical"])
    def test_shipped_configs_parse(self, name):
        cfg = ExperimentConfig.from_file(CONFIGS / f"{name}.cfg")
        assert cfg.operator().n_modes > 0

    def test_numeric_failure_exit(self, capsys):
        code = cli.main(["forward", *FAST, "--source", "mode:1", "--panels", "1"])
        assert code in (cli.EXIT_OK, cli.EXIT_NUMERIC)


class TestOutputDir:
    def test_env_var(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path / "env"))
        assert cli.main(["forward", *FAST]) == cli.EXIT_OK
        assert list((tmp_path / "env").glob("*.csv"))

    def test_out_beats_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path / "env"))
        assert cli.main(["forward", *FAST, "--out", str(tmp_path / "flag")]) == cli.EXIT_OK
        assert not (tmp_path / "env").exists()
        assert list((tmp_path / "flag").glob("*.csv"))

    def test_unwritable(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert cli.main(["forward", *FAST, "--out", str(blocker / "sub")]) == cli.EXIT_IO

    def test_determinism(self, tmp_path, capsys):
        for d in ("a", "b"):
            assert cli.main(["roundtrip", *FAST, "--source", "random:3",
                             "--out", str(tmp_path / d)]) == cli.EXIT_OK
        a = sorted((tmp_path / "a").glob("*.csv"))
        assert a
        for p in a:
            assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()


class TestPresets:
    @pytest.mark.parametrize("name", preset_examples())
    def test_every_preset_parses_back(self, name):
        cfg = ExperimentConfig.defaults({"problem.phi": name, "source.data": name})
        assert cfg.phi().shape == (cfg.operator().n_modes,)
        cfg.source()

    @pytest.mark.parametrize("profile", sorted(PROFILES))
    def test_profiles_parse_back(self, profile):
        cfg = ExperimentConfig.defaults({"source.data": "mode:1", "source.profile": profile})
        assert np.all(np.isfinite(cfg.source()(np.linspace(0, 1, 5))))

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.defaults({"problem.phi": "nonsense"}).phi()

    def test_poly_matches_quadrature(self):
        op = DiagonalOperator.dirichlet1d(16)
        # QUADPACK's sine-weighted rule
        ref = np.array([
            np.sqrt(2 / np.pi) * quad(lambda x: x * (np.pi - x), 0, np.pi, weight="sin", wvar=k)[0]
            for k in range(1, 17)
        ])
        assert np.allclose(poly_coefficients(16), ref, rtol=0, atol=1e-13)
        assert np.array_equal(data_vector(op, "poly"), poly_coefficients(16))

    def test_poly_matches_project(self):
        op = DiagonalOperator.dirichlet1d(16)
        x = np.linspace(0, np.pi, 4097)
        coarse = project(op, lambda x: x * (np.pi - x))
        fine = project(op, lambda x: x * (np.pi - x), x)
        exact = poly_coefficients(16)
        # Simpson error is O(h^4): refining the grid 2^k times shrinks it ~16^k
        assert np.max(np.abs(fine - exact)) < 1e-3 * np.max(np.abs(coarse - exact))
        assert np.max(np.abs(fine - exact)) < 1e-10


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "fractoback.cli", "list-presets"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "random:seed" in out.stdout
