import os

import numpy as np
import pytest

from anisolab.cli import main

SMALL_CONFIG = """
[experiment]
seed = 3
stages = check solve energy

[norm]
kind = ellipsoid
matrix = 2 0 0 1

[b]
kind = power
p = 2

[f]
kind = double_well
a = 1

[domain]
half_width = 6
nx = 48
ny = 48

[solve]
trace = tanh_interface
epsilons = 0.125

[energy]
radii = 1 2 3
center = 0 0

[checks]
require = sign monotonicity
samples = 400
"""


def write_config(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_run_pipeline(tmp_path, capsys):
    cfg = write_config(tmp_path, SMALL_CONFIG)
    out = str(tmp_path / "out")
    assert main(["run", "--config", cfg, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "field.txt"))
    assert os.path.exists(os.path.join(out, "energy_trace.csv"))
    assert os.path.exists(os.path.join(out, "gradient.svg"))
    assert os.path.exists(os.path.join(out, "unit_ball.svg"))
    text = capsys.readouterr().out
    assert "sign_duality_pairing" in text
    assert "rescaled_energy_monotone" in text


def test_run_bundled_config(tmp_path):
    import anisolab

    bundled = os.path.join(os.path.dirname(anisolab.__file__), "configs",
                           "ellipsoid_monotonicity.cfg")
    out = str(tmp_path / "bundle_out")
    assert main(["run", "--config", bundled, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "energy_trace.csv"))


def test_malformed_config_exit_code(tmp_path):
    cfg = write_config(tmp_path, "[norm\nkind = euclid")  # broken section header
    assert main(["run", "--config", cfg]) == 2


def test_unknown_check_rejected(tmp_path):
    cfg = write_config(tmp_path, SMALL_CONFIG.replace("require = sign monotonicity",
                                                      "require = frobnicate"))
    assert main(["run", "--config", cfg]) == 2


def test_glued_p_range_rejected_at_parse(tmp_path):
    bad = SMALL_CONFIG.replace("kind = ellipsoid\nmatrix = 2 0 0 1",
                               "kind = glued_pq\np = 2")
    cfg = write_config(tmp_path, bad)
    assert main(["run", "--config", cfg]) == 2


def test_oversized_radius_rejected_before_solving(tmp_path):
    bad = SMALL_CONFIG.replace("radii = 1 2 3", "radii = 1 2 7")
    cfg = write_config(tmp_path, bad)
    assert main(["run", "--config", cfg]) == 2


def test_check_subcommand_exit_codes(tmp_path, capsys):
    assert main(["check", "--norm", "ellipsoid:4,0,0,1", "--condition", "exact",
                 "--samples", "300"]) == 0
    assert main(["check", "--norm", "glued_pq:3", "--condition", "exact",
                 "--samples", "500"]) == 4  # genuine failure of the condition
    assert main(["check", "--norm", "glued_pq:3", "--condition", "ellipticity",
                 "--samples", "256"]) == 0
    capsys.readouterr()


def test_bad_norm_spec_exit_code():
    assert main(["check", "--norm", "nonsense:1", "--condition", "exact"]) == 2
    assert main(["render", "--norm", "ellipsoid:1,2,3", "--out", "x.svg"]) == 2


def test_dual_subcommand(tmp_path):
    out = str(tmp_path / "dual_out")
    assert main(["dual", "--norm", "glued_pq:3", "--out", out,
                 "--samples", "512"]) == 0
    csv = open(os.path.join(out, "dual.csv")).read().splitlines()
    assert csv[0].startswith("# anisolab-csv v1")
    assert csv[1] == "theta,H,H_dual"
    assert len(csv) == 512 + 2


def test_construct_subcommand(tmp_path):
    out = str(tmp_path / "ctor_out")
    assert main(["construct", "--profile", "trig:0.3", "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "profile.csv"))
    assert os.path.exists(os.path.join(out, "unit_ball.svg"))
    # invalid profile: bump with oversized amplitude fails validation
    assert main(["construct", "--profile", "bump:10", "--out", out]) == 4


def test_render_unit_circle(tmp_path):
    out = str(tmp_path / "ball.svg")
    assert main(["render", "--norm", "euclidean", "--out", out, "--dual"]) == 0
    body = open(out).read()
    assert body.startswith("<?xml")
    assert "polyline" in body


def test_render_gallery_of_glued_norms(tmp_path):
    # unit circles for p = 5/2, 3, 4
    for tag in ("2.5", "3", "4"):
        out = str(tmp_path / f"glued_{tag}.svg")
        assert main(["render", "--norm", f"glued_pq:{tag}", "--out", out]) == 0
        assert os.path.getsize(out) > 1000


def test_solve_and_energy_subcommands(tmp_path):
    cfg = write_config(tmp_path, SMALL_CONFIG)
    out = str(tmp_path / "se_out")
    assert main(["solve", "--config", cfg, "--out", out]) == 0
    assert main(["energy", "--config", cfg, "--out", out,
                 "--radii", "1,2,3"]) == 0
    assert os.path.exists(os.path.join(out, "energy_trace.csv"))


def test_energy_missing_field_is_io_error(tmp_path):
    cfg = write_config(tmp_path, SMALL_CONFIG)
    assert main(["energy", "--config", cfg, "--out", str(tmp_path / "none")]) == 6


def test_deterministic_outputs(tmp_path):
    cfg = write_config(tmp_path, SMALL_CONFIG)
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["run", "--config", cfg, "--out", out1, "--seed", "5"]) == 0
    assert main(["run", "--config", cfg, "--out", out2, "--seed", "5"]) == 0
    for name in ("energy_trace.csv", "field.txt"):
        b1 = open(os.path.join(out1, name), "rb").read()
        b2 = open(os.path.join(out2, name), "rb").read()
        assert b1 == b2, f"{name} not bit-identical"


def test_field_checkpoint_reload(tmp_path):
    cfg = write_config(tmp_path, SMALL_CONFIG)
    out = str(tmp_path / "ck")
    assert main(["solve", "--config", cfg, "--out", out]) == 0
    from anisolab.pde import GridField

    field = GridField.load_text(os.path.join(out, "field.txt"))
    assert field.values.shape == (48, 48)
    assert np.isfinite(field.values).all()
