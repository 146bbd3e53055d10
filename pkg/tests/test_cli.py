import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qdephase import __version__
from qdephase.cli import EXIT_CONFIG, EXIT_DOMAIN, EXIT_OK, main, run_config
from qdephase.config import dump_config, parse_config
from qdephase.errors import ConfigError
from qdephase.experiments import grape_target, run_experiment
from qdephase.presets import PRESETS, preset, preset_names, preset_params, preset_text
from qdephase.tables import ResultTable, from_csv, from_json, read_table, to_csv, to_json

GAMMA_CFG = """\
[output]
format = both

[g]
kind = gamma
alpha = 0.5
omega0 = 0.06285, 0.1258
t_max = 100
points = 201
"""


def write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestPresets:
    def test_fig5b(self):
        p = preset_params("fig5b")
        assert (p["omega0"], p["omega_k"], p["alpha"], p["omegaJ"], p["ensemble"], p["t_max"]) == \
            (0.2514, 0.1257, 0.5, 50.0, 500, 100.0)

    def test_fig4d(self):
        p = preset_params("fig4d")
        assert (p["omega0"], p["omega_k"], p["alpha"], p["omegaJ"], p["t_max"]) == (0.03, 0.3, 0.5, 50.0, 100.0)

    def test_figA4a(self):
        p = preset_params("figA4a")
        assert (p["omega0"], p["omega_k"], p["t_max"]) == (0.3771, 0.1885, 50.0)
        assert p["omega0"] == pytest.approx(3 * 6.285 / 50.0, abs=1e-4)

    def test_unknown_lists_names(self):
        with pytest.raises(ConfigError, match="fig3c"):
            preset("fig9")

    def test_all_presets_parse(self):
        expected = {"fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4a",
                    "fig4b", "fig4c", "fig4d", "fig5a", "fig5b", "fig5c", "fig6a", "fig6b"}
        assert expected <= set(PRESETS)
        assert any(n.startswith("figA1") for n in PRESETS) and any(n.startswith("figA4") for n in PRESETS)
        for name in preset_names():
            assert preset(name).experiments


class TestConfig:
    def test_round_trip(self):
        for name in ("fig3b", "fig6a", "fig1b"):
            config = preset(name)
            again = parse_config(dump_config(config))
            assert [(e.name, e.kind, e.params) for e in again.experiments] == \
                [(e.name, e.kind, e.params) for e in config.experiments]

    @pytest.mark.parametrize("text,line,field", [
        ("[a]\nkind = gamma\nomega0 = 0.1\nt_max = 10\nbogus = 1\n", 5, "bogus"),
        ("[a]\nkind = gamma\nomega0 = 0.1\n", 1, "t_max"),
        ("[a]\nkind = gamma\nomega0 = 0.1, x\nt_max = 10\n", 3, "omega0"),
        ("[a]\nkind = gamma\nomega0 = 0.1\nt_max = -10\n", 4, "t_max"),
        ("[a]\nkind = coherence\nomega0 = 0.1\nt_max = 10\nensemble = 10\n", 5, "seed"),
        ("[a]\nkind = nope\n", 2, "kind"),
    ])
    def test_errors_carry_line_and_field(self, text, line, field):
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert info.value.line == line and info.value.field == field
        assert f"line {line}" in str(info.value)

    def test_structural_errors(self):
        for text in ("kind = gamma\n", "[a]\nkind = gamma\n[a]\nkind = gamma\n", "[output]\ndir = x\n"):
            with pytest.raises(ConfigError):
                parse_config(text)

    def test_grape_targets(self):
        assert grape_target("haar", 1, 3) == pytest.approx(grape_target("haar", 1, 3))
        np.testing.assert_allclose(grape_target("rx:3.141592653589793", 1, 0), [[0, -1j], [-1j, 0]],
                                   atol=1e-15)
        for bad in (("cnot", 1), ("hadamard", 2), ("warp", 1), ("rx:abc", 1)):
            with pytest.raises(ConfigError):
                grape_target(bad[0], bad[1], 0)


class TestTables:
    def table(self):
        return ResultTable.from_columns("x", {"t": [0.0, 0.1, 1 / 3], "y": [math.nan, 1e-300, -2.5]},
                                        {"experiment": "e", "seed": 7, "nested": {"a": [1, 2]}})

    def test_csv_round_trip(self):
        t = self.table()
        back = from_csv(to_csv(t), "x")
        assert back.columns == t.columns and back.metadata == t.metadata
        np.testing.assert_array_equal(np.array(back.rows), np.array(t.rows))

    def test_json_round_trip(self):
        t = self.table()
        back = from_json(to_json(t))
        assert back.metadata == t.metadata
        np.testing.assert_array_equal(np.array(back.rows), np.array(t.rows))

    def test_csv_format(self):
        text = to_csv(self.table())
        assert "\r" not in text and text.endswith("\n")
        assert "0.33333333333333331" in text

    def test_rectangular(self):
        with pytest.raises(ValueError):
            ResultTable("bad", ["a", "b"], [[1.0]], {})


class TestRun:
    def test_files_and_metadata(self, tmp_path):
        paths = run_config(parse_config(GAMMA_CFG), tmp_path)
        names = sorted(p.name for p in paths)
        assert names == ["g_gamma.csv", "g_gamma.json"]
        csv, js = read_table(tmp_path / "g_gamma.csv"), read_table(tmp_path / "g_gamma.json")
        assert csv.metadata == js.metadata
        assert csv.metadata["tool_version"] == __version__
        assert csv.metadata["config"]["omega0"] == [0.06285, 0.1258]
        np.testing.assert_array_equal(np.array(csv.rows), np.array(js.rows))
        assert [c["maxima"] for c in csv.metadata["curves"]] == [1, 2]

    def test_byte_identical_reruns(self, tmp_path):
        cfg = preset("fig3a")
        a = run_config(cfg, tmp_path / "a")
        b = run_config(cfg, tmp_path / "b")
        for pa, pb in zip(a, b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_fig3c_preset(self, tmp_path):
        assert main(["preset", "fig3c", "--out", str(tmp_path)]) == EXIT_OK
        table = read_table(tmp_path / "coherence_coherence.csv")
        assert {"t", "coh_analytic", "coh_mc"} <= set(table.columns)
        assert table.metadata["seed"] == preset_params("fig3c")["seed"]
        peaks = [pk for pk in table.metadata["peaks"] if pk["value"] >= 0.98]
        assert len(peaks) == 4
        for pk, expected in zip(peaks, (25, 50, 75, 100)):
            assert abs(pk["t"] - expected) <= 0.5
        assert table.metadata["revival_prediction"]["passed"]

    def test_fig2b_transition(self, tmp_path):
        assert main(["preset", "fig2b", "--out", str(tmp_path)]) == EXIT_OK
        table = read_table(tmp_path / "blp_scan_blp.csv")
        meta = table.metadata
        assert meta["critical_numeric"] == pytest.approx(0.0314, abs=1e-4)
        omega0, n = np.asarray(table.column("omega0")), np.asarray(table.column("N"))
        first = int(np.argmax(n > 0))
        assert n[first - 1] == 0 and omega0[first - 1] <= 0.0314 + 1e-4 and omega0[first] >= 0.0314 - 1e-4

    def test_revival_verify_kind(self):
        exp = parse_config("[r]\nkind = revival-verify\nomega0 = 0.3771\nt_max = 50\n").experiments[0]
        (table,) = run_experiment(exp)
        assert table.metadata["passed"] and len(table.rows) == 3

    def test_grape_kind(self, tmp_path):
        text = "[q]\nkind = grape\ntarget = identity\ninit = zero\nseed = 0\nsegments = 5\n"
        (controls, history) = run_experiment(parse_config(text).experiments[0])
        assert history.metadata["fidelity"] == 1.0 and history.metadata["iterations"] == 0
        assert controls.columns == ["segment", "u_x0", "u_y0"]


class TestMain:
    def test_list_presets(self, capsys):
        assert main(["list-presets"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "fig5b" in out and "figA4a" in out

    def test_dump(self, capsys):
        assert main(["preset", "fig4d", "--dump"]) == EXIT_OK
        assert capsys.readouterr().out == preset_text("fig4d")

    def test_config_error_exit(self, tmp_path, capsys):
        path = write(tmp_path, "[a]\nkind = gamma\nomega0 = 0.1\nt_max = ten\n")
        assert main(["run", str(path)]) == EXIT_CONFIG
        assert "line 4" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "none.ini")]) == EXIT_CONFIG
        assert main(["preset", "nope"]) == EXIT_CONFIG

    def test_domain_error_exit(self, tmp_path, capsys):
        text = "[q]\nkind = grape\ntarget = haar\nseed = 0\nqubits = 2\nsegments = 3\ndrift = 1, 2\n"
        path = write(tmp_path, text.replace("target = haar", "target = haar\namp_bound = 1e-400"))
        assert main(["run", str(path)]) == EXIT_CONFIG
        # parses fine but leaves no harmonic below the cutoff
        path = write(tmp_path, "[g]\nkind = gamma\nomegaJ = 50\nomega0 = 100\nt_max = 10\n")
        assert main(["run", str(path), "--out", str(tmp_path)]) == EXIT_DOMAIN
        assert "domain error" in capsys.readouterr().err

    def test_module_entry_point(self, tmp_path):
        path = write(tmp_path, GAMMA_CFG.replace("format = both", "format = json"))
        proc = subprocess.run([sys.executable, "-m", "qdephase", "run", str(path), "--out", str(tmp_path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        data = json.loads((tmp_path / "g_gamma.json").read_text())
        assert data["metadata"]["experiment"] == "g"
