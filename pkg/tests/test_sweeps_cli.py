import json
import subprocess
import sys

import numpy as np
import pytest

from nusphere.cli import main, parse_decay_coeff, read_config_file
from nusphere.output import parse_csv_metadata, render_csv, render_json, write_dataset
from nusphere.sweeps import FIGURES, Dataset, figure_columns, figure_dataset


@pytest.fixture(scope="module")
def fig2_dataset():
    return figure_dataset(2)


class TestFigureDatasets:
    def test_grid_and_columns(self, fig2_dataset):
        assert len(fig2_dataset.rows) == 256
        assert fig2_dataset.columns == ["phi_rad", "r_eta0.5", "r_eta1", "r_eta2"]
        phis = [row[0] for row in fig2_dataset.rows]
        assert phis[0] == 0.0
        assert phis[-1] == pytest.approx(2 * np.pi, rel=1e-15)

    def test_figure1_columns(self):
        assert figure_columns(1) == ["phi_rad", "r_t5e11", "r_t1e12", "r_t1.5e12", "r_t2e12"]
        assert figure_columns(4) == ["phi_rad", "gamma_t", "gamma_d1", "gamma_d2",
                                     "gamma_d", "gamma_p"]

    def test_radii_physical(self, fig2_dataset):
        data = np.asarray(fig2_dataset.rows)
        assert np.all(data[:, 1:] >= 0.0)
        assert np.all(data[:, 1:] <= 1.0 + 1e-9)

    def test_metadata_complete(self, fig2_dataset):
        meta = fig2_dataset.meta
        for key in ("command", "figure", "mode", "nodes", "phi_grid", "energy_ev",
                    "dm2_ev2", "theta_rad", "eta", "times_ev_inv", "c11", "offdiag"):
            assert key in meta
        assert meta["figure"] == 2
        assert meta["mode"] == "derived"

    def test_workers_reproduce_serial(self):
        serial = figure_dataset(2, workers=1)
        parallel = figure_dataset(2, workers=2)
        assert render_csv(serial) == render_csv(parallel)

    def test_figure4_component_shapes(self):
        # the electron-branch dynamic phase shows a two-dip structure over
        # phi in [4pi/5, 2pi] while its partner has a single distinct trough
        ds = figure_dataset(4)
        data = np.asarray(ds.rows)
        window = data[:, 0] >= 4 * np.pi / 5 - 1e-12
        gd1 = data[window, ds.columns.index("gamma_d1")]
        interior = (gd1[1:-1] < gd1[:-2]) & (gd1[1:-1] < gd1[2:])
        assert int(np.sum(interior)) >= 2
        gd2 = data[window, ds.columns.index("gamma_d2")]
        assert np.max(np.abs(gd1 - gd2)) > 0.5  # branches evolve differently

    def test_unknown_figure(self):
        with pytest.raises(ValueError):
            figure_dataset(6)


class TestOutput:
    def test_csv_round_trip_meta(self, tmp_path, fig2_dataset):
        path = write_dataset(fig2_dataset, tmp_path / "f2.csv", fmt="csv")
        meta = parse_csv_metadata(path)
        assert meta["figure"] == "2"
        assert meta["mode"] == "derived"
        body = path.read_text().splitlines()
        header_idx = next(i for i, line in enumerate(body) if not line.startswith("#"))
        assert body[header_idx] == ",".join(fig2_dataset.columns)
        assert len(body) == header_idx + 1 + 256

    def test_seventeen_digit_floats(self):
        ds = Dataset(meta={"command": "x"}, columns=["a"], rows=[[1.0 / 3.0]])
        assert "0.33333333333333331" in render_csv(ds)

    def test_json_structure(self, fig2_dataset):
        payload = json.loads(render_json(fig2_dataset))
        assert set(payload) == {"meta", "columns", "rows"}
        assert payload["columns"] == fig2_dataset.columns
        assert len(payload["rows"]) == 256

    def test_deterministic_render(self, fig2_dataset):
        assert render_csv(fig2_dataset) == render_csv(figure_dataset(2))


class TestConfigParsing:
    def test_decay_coefficient_forms(self):
        assert parse_decay_coeff("0.095v0") == (0.095, "v0")
        assert parse_decay_coeff("3.8e-13") == (3.8e-13, "ev")
        assert parse_decay_coeff("0.1V0") == (0.1, "v0")
        with pytest.raises(Exception):
            parse_decay_coeff("abc")

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("phi-rad = 1.5\nnodes=501\n# comment\nmode=paper\n")
        values = read_config_file(str(cfg))
        assert values == {"phi_rad": "1.5", "nodes": "501", "mode": "paper"}

    def test_config_file_unknown_key(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("bogus=1\n")
        with pytest.raises(Exception):
            read_config_file(str(cfg))


class TestCli:
    def run(self, *argv):
        return main(list(argv))

    def test_evolve_writes_dataset(self, tmp_path):
        out = tmp_path / "ev.csv"
        code = self.run("evolve", "--phi-rad", "0.7", "--c11", "0.095v0", "--c22", "0.15v0",
                        "--c33", "0.15v0", "--nodes", "201", "--out", str(out))
        assert code == 0
        meta = parse_csv_metadata(out)
        assert meta["command"] == "evolve"
        assert meta["solver"] == "spectral"
        assert float(meta["cross_check_max_dev"]) < 1e-6
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0].split(",")[:4] == ["t_ev_inv", "u", "v", "w"]
        assert len(lines) == 1 + 201

    def test_evolve_t_zero_single_node(self, tmp_path):
        out = tmp_path / "ev0.csv"
        code = self.run("evolve", "--t-max-ev-inv", "0", "--out", str(out))
        assert code == 0
        rows = [l for l in out.read_text().splitlines() if not l.startswith("#")][1:]
        assert len(rows) == 1
        cells = rows[0].split(",")
        assert float(cells[4]) == pytest.approx(1.0, abs=1e-12)   # r
        assert float(cells[9]) == pytest.approx(1.0, abs=1e-12)   # survival

    def test_flags_override_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("phi-rad=0.3\nnodes=101\n")
        out = tmp_path / "ev.csv"
        code = self.run("evolve", "--config", str(cfg), "--phi-rad", "0.9",
                        "--out", str(out))
        assert code == 0
        meta = parse_csv_metadata(out)
        assert float(meta["phi_rad"]) == 0.9          # flag wins
        assert meta["nodes"] == "101"                 # file applies

    def test_config_error_exit_code(self, tmp_path):
        code = self.run("evolve", "--c11", "0.1v0", "--c22", "1e-13",
                        "--out", str(tmp_path / "x.csv"))
        assert code == 2  # mixed decay units

    def test_json_format(self, tmp_path):
        out = tmp_path / "ev.json"
        code = self.run("evolve", "--nodes", "11", "--format", "json", "--out", str(out))
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["meta"]["command"] == "evolve"
        assert len(payload["rows"]) == 11

    def test_phases_report(self, tmp_path):
        out = tmp_path / "ph.csv"
        code = self.run("phases", "--phi-rad", "0.7", "--c11", "0.095v0", "--c22", "0.15v0",
                        "--c33", "0.15v0", "--product-n", "512", "--out", str(out))
        assert code == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        names = [l.split(",")[0] for l in lines[1:]]
        for expected in ("gamma_t", "gamma_d1", "gamma_d2", "gamma_d", "gamma_p",
                         "gamma_p_product_n512", "gamma_p_product_minus_decomposition",
                         "chain_trace_log10"):
            assert expected in names
        values = {l.split(",")[0]: float(l.split(",")[1]) for l in lines[1:]}
        assert values["gamma_p"] == pytest.approx(
            values["gamma_t"] + values["gamma_d1"] + values["gamma_d2"], abs=1e-15)
        wrapped = {l.split(",")[0]: float(l.split(",")[2]) for l in lines[1:]}
        assert abs(wrapped["gamma_p"]) <= np.pi

    def test_nmr_report(self, tmp_path):
        out = tmp_path / "nmr.csv"
        code = self.run("nmr", "--c11", "0.095v0", "--c22", "0.15v0", "--c33", "0.15v0",
                        "--out", str(out))
        assert code == 0
        text = out.read_text()
        assert "realizable_rank1,true" in text
        assert "omega_in_reference_range,true" in text

    def test_nmr_non_rank1_verdict(self, tmp_path):
        out = tmp_path / "nmr.csv"
        code = self.run("nmr", "--c11", "1e-13", "--c22", "2e-13", "--c33", "0",
                        "--offdiag", "zero", "--out", str(out))
        assert code == 0
        text = out.read_text()
        assert "realizable_rank1,false" in text
        assert "rank1_residual_ev" in text

    def test_figure_renders_png(self, tmp_path):
        out = tmp_path / "f2.csv"
        code = self.run("figure", "2", "--out", str(out))
        assert code == 0
        assert out.exists()
        assert out.with_suffix(".png").exists()

    def test_figure_no_plot(self, tmp_path):
        out = tmp_path / "f2.csv"
        code = self.run("figure", "2", "--no-plot", "--out", str(out))
        assert code == 0
        assert not out.with_suffix(".png").exists()

    def test_embedded_config_round_trip(self, tmp_path):
        first = tmp_path / "a.csv"
        assert self.run("figure", "2", "--no-plot", "--nodes", "1001", "--out", str(first)) == 0
        meta = parse_csv_metadata(first)
        cfg = tmp_path / "replay.cfg"
        cfg.write_text("".join(f"{k}={meta[k]}\n" for k in ("mode", "nodes", "format")))
        second = tmp_path / "b.csv"
        assert self.run("figure", "2", "--no-plot", "--config", str(cfg),
                        "--out", str(second)) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_bad_flag_exits_2(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["figure", "9"])
        assert excinfo.value.code == 2

    def test_console_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "nusphere.cli", "--version"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "nusphere" in proc.stdout
