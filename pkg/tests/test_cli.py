import numpy as np
import pytest

from drivenbath.cli import main


def run(args):
    return main([str(a) for a in args])


def read_rows(path):
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                header = line[1:].strip()
            elif line:
                rows.append(line.split(","))
    return header, rows


class TestWcf:
    def test_default_first_row_is_unity(self, tmp_path):
        out = tmp_path / "wcf.csv"
        assert run(["wcf", "--qubit", "none", "--samples", "32",
                    "--out", out]) == 0
        header, rows = read_rows(out)
        assert header == "v,re_chi2,im_chi2"
        assert len(rows) == 32
        v0, re0, im0 = (float(x) for x in rows[0])
        assert v0 == 0.0 and re0 == 1.0 and im0 == 0.0

    def test_nonperturbative_needs_pure_bath(self, tmp_path, capsys):
        code = run(["wcf", "--qubit", "spin", "--nonperturbative",
                    "--out", tmp_path / "x.csv"])
        assert code == 2
        assert "pure thermal bath" in capsys.readouterr().err

    def test_nonperturbative_columns(self, tmp_path):
        out = tmp_path / "wcf.csv"
        assert run(["wcf", "--qubit", "none", "--samples", "16",
                    "--nonperturbative", "--out", out]) == 0
        header, rows = read_rows(out)
        assert header == "v,re_chi2,im_chi2,re_chi,im_chi"
        assert len(rows) == 16


class TestWdf:
    def test_header_carries_atom_and_normalization(self, tmp_path):
        out = tmp_path / "wdf.csv"
        assert run(["wdf", "--qubit", "none", "--alpha", "5", "--beta", "1",
                    "--out", out]) == 0
        header, rows = read_rows(out)
        assert "atom_weight=" in header and "normalization=" in header
        norm = float(header.split("normalization=")[1].split(",")[0])
        assert abs(norm - 1.0) < 1e-6
        assert len(rows) == 800

    def test_asymmetry_grows_with_beta(self, tmp_path):
        asymmetry = []
        for beta in (0.5, 1.0, 2.0):
            out = tmp_path / f"wdf_{beta}.csv"
            assert run(["wdf", "--qubit", "none", "--alpha", "5",
                        "--beta", beta, "--out", out]) == 0
            _, rows = read_rows(out)
            w = np.array([float(r[0]) for r in rows])
            dens = np.array([float(r[1]) for r in rows])
            plus = dens[w > 0].sum()
            minus = dens[w < 0].sum()
            asymmetry.append((plus - minus) / (plus + minus))
        assert asymmetry[0] < asymmetry[1] < asymmetry[2]

    def test_spin_peak_dominates_other_couplings(self, tmp_path):
        peaks = {}
        for coupling in ("spin", "fermion", "topological"):
            out = tmp_path / f"wdf_{coupling}.csv"
            assert run(["wdf", "--qubit", coupling, "--alpha", "5",
                        "--beta", "1", "--p", "1.0", "--omega", "0.05",
                        "--out", out]) == 0
            _, rows = read_rows(out)
            peaks[coupling] = max(float(r[1]) for r in rows)
        assert peaks["spin"] > 10.0 * peaks["fermion"]
        assert peaks["spin"] > 10.0 * peaks["topological"]

    def test_nonperturbative_writes_second_file(self, tmp_path):
        out = tmp_path / "wdf.csv"
        assert run(["wdf", "--qubit", "none", "--nonperturbative",
                    "--out", out]) == 0
        assert (tmp_path / "wdf_nonperturbative.csv").exists()


class TestWextEngine:
    def test_pure_bath_extraction_nonpositive(self, tmp_path, capsys):
        out = tmp_path / "wext.csv"
        assert run(["wext", "--qubit", "none", "--out", out]) == 0
        _, rows = read_rows(out)
        assert float(rows[0][0]) <= 1e-14

    def test_engine_rejects_inverted_population(self, tmp_path, capsys):
        code = run(["engine", "--qubit", "spin", "--p", "0.4",
                    "--out", tmp_path / "e.csv"])
        assert code == 2
        assert "p > 1/2" in capsys.readouterr().err

    def test_engine_report_fields(self, tmp_path):
        out = tmp_path / "engine.csv"
        assert run(["engine", "--qubit", "spin", "--p", "0.9",
                    "--beta", "1", "--alpha", "5", "--omega", "0.05",
                    "--out", out]) == 0
        header, rows = read_rows(out)
        assert header.split(",") == ["mode", "w_bar", "delta_s", "q_b",
                                     "q_q", "t_h", "t_l", "r",
                                     "figure_of_merit"]
        mode = rows[0][0]
        assert mode in ("heat-engine", "refrigerator", "dissipator",
                        "degenerate")
        w_bar, delta_s, q_b, q_q = (float(x) for x in rows[0][1:5])
        assert q_b + q_q == pytest.approx(w_bar, abs=1e-12)
        assert delta_s >= -1e-10


class TestSweep:
    def test_writes_grid_and_sidecars(self, tmp_path):
        out = tmp_path / "sweepdir"
        assert run(["sweep", "--qubit", "spin", "--alpha", "5",
                    "--omega", "0.05", "--sweep-x", "p",
                    "--x-range", "0,1", "--sweep-y", "beta",
                    "--y-range", "0.1,100", "--y-scale", "log",
                    "--nx", "16", "--ny", "16", "--quantity", "wext",
                    "--threads", "1", "--out", out]) == 0
        header, rows = read_rows(out / "grid.csv")
        assert header == "p,beta,wext"
        assert len(rows) == 256
        assert (out / "contour.csv").exists()
        assert (out / "betaq.csv").exists()
        contour_text = (out / "contour.csv").read_text()
        assert len(contour_text.splitlines()) > 2

    def test_missing_axes_is_usage_error(self, tmp_path, capsys):
        assert run(["sweep", "--qubit", "spin",
                    "--out", tmp_path / "d"]) == 2

    def test_byte_identical_reruns(self, tmp_path):
        args = ["wdf", "--qubit", "none", "--alpha", "2", "--beta", "1"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(args + ["--out", out1]) == 0
        assert run(args + ["--out", out2]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestConfig:
    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[bath]\nalpha = 2.0\nbeta = 3.0\n"
                       "[qubit]\ncoupling = none\n")
        out = tmp_path / "wext.csv"
        assert run(["wext", "--config", cfg, "--beta", "5.0",
                    "--out", out]) == 0
        # flag beta overrides config beta; config alpha applies
        reference = tmp_path / "ref.csv"
        assert run(["wext", "--alpha", "2.0", "--beta", "5.0",
                    "--qubit", "none", "--out", reference]) == 0
        assert out.read_bytes() == reference.read_bytes()

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[bath]\nalfa = 2.0\n")
        assert run(["wext", "--config", cfg]) == 2
        assert "unknown key" in capsys.readouterr().err

    def test_unknown_section_rejected(self, tmp_path):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[weird]\nx = 1\n")
        assert run(["wext", "--config", cfg]) == 2

    def test_invalid_physics_is_usage_error(self, tmp_path, capsys):
        assert run(["wext", "--alpha", "-1"]) == 2
        assert "alpha" in capsys.readouterr().err


class TestVerifyCommand:
    def test_subset_passes(self, capsys):
        assert run(["verify", "--checks", "passivity-pure-bath",
                    "modal-structure"]) == 0
        out = capsys.readouterr().out
        assert "PASS passivity-pure-bath" in out
        assert "2/2" in out

    def test_unknown_check_rejected(self):
        with pytest.raises(ValueError):
            run(["verify", "--checks", "does-not-exist"])

    def test_verbose_prints_margins(self, capsys):
        assert run(["verify", "--checks", "modal-structure",
                    "--verbose"]) == 0
        assert "maxima" in capsys.readouterr().out

    def test_broken_detailed_balance_is_caught(self, monkeypatch, capsys):
        # mutate the emission density by a smooth factor: the pure-bath
        # detailed-balance cancellation must break and the check must fail
        import drivenbath.spectral as spectral
        original = spectral.bosonic_wightman

        def warped(omega, beta, spec):
            return original(omega, beta, spec) * 1.05

        monkeypatch.setattr(spectral, "bosonic_wightman", warped)
        code = run(["verify", "--checks", "jarzynski-pure-bath"])
        assert code == 1
        assert "FAIL jarzynski-pure-bath" in capsys.readouterr().out
