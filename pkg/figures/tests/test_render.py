import json
import subprocess
import sys

import numpy as np
import pandas as pd
import pytest
from PIL import Image

from dpcp_figures import FigureSpec, SchemaError, heatmap_matrix, render
from dpcp_figures.cli import main as cli_main

GRID_HEADER = ("D,d,N,M,ratio,sigma,trial,seed,method,separation,"
               "area_above,angle_deg,iterations,wall_ms,status")
THEORY_HEADER = "D,d,N,M,trial,eps_O,eps_X,gamma,condition_holds,phi0_star"
ROC_HEADER = "method,fpr,tpr,area_above"


def grid_csv(path, separation_by_cell, trials=3):
    """Grid-schema CSV with a fixed separation value per (d, ratio) cell."""
    rows = [GRID_HEADER]
    for (d, ratio), sep in separation_by_cell.items():
        for trial in range(trials):
            val = sep(trial) if callable(sep) else sep
            rows.append(f"10,{d},200,100,{ratio},0,{trial},1,dpcp-lp,"
                        f"{val},0.0,90.0,3,12.5,ok")
    path.write_text("\n".join(rows) + "\n")
    return str(path)


def roc_csv(path):
    rows = [ROC_HEADER]
    for fpr, tpr in [(0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (1.0, 1.0)]:
        rows.append(f"dpcp-lp,{fpr},{tpr},0.0")
    for fpr, tpr in [(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]:
        rows.append(f"ransac,{fpr},{tpr},0.5")
    path.write_text("\n".join(rows) + "\n")
    return str(path)


def cells(value):
    return {(d, r): value for d in (2, 5, 8) for r in (0.1, 0.3, 0.5)}


def center_pixel(png_path):
    img = np.asarray(Image.open(png_path).convert("L"), dtype=float)
    h, w = img.shape
    return img[h // 2, w // 2]


def test_all_success_matrix_is_ones(tmp_path):
    csv = grid_csv(tmp_path / "grid.csv", cells(1))
    matrix, rows, cols = heatmap_matrix(pd.read_csv(csv), "heatmap-separation")
    assert matrix.shape == (3, 3)
    assert np.all(matrix == 1.0)
    assert rows == [0.2, 0.5, 0.8]
    assert cols == [0.1, 0.3, 0.5]


def test_all_success_renders_white(tmp_path):
    csv = grid_csv(tmp_path / "grid.csv", cells(1))
    out = render(FigureSpec(input_csv=csv, kind="heatmap-separation",
                            output=str(tmp_path / "sep.png")))
    assert center_pixel(out[0]) >= 250


def test_all_failure_renders_black(tmp_path):
    csv = grid_csv(tmp_path / "grid.csv", cells(0))
    out = render(FigureSpec(input_csv=csv, kind="heatmap-separation",
                            output=str(tmp_path / "sep.png")))
    assert center_pixel(out[0]) <= 5


def test_mixed_cells_average_over_trials(tmp_path):
    # 2 of 3 trials succeed in every cell: the mean must be exactly 2/3
    csv = grid_csv(tmp_path / "grid.csv", cells(lambda t: int(t < 2)))
    matrix, _, _ = heatmap_matrix(pd.read_csv(csv), "heatmap-separation")
    assert np.allclose(matrix, 2.0 / 3.0)


def test_method_filter_selects_rows(tmp_path):
    path = tmp_path / "grid.csv"
    lines = [GRID_HEADER,
             "10,5,200,100,0.1,0,0,1,dpcp-lp,1,0.0,90.0,3,1.0,ok",
             "10,5,200,100,0.1,0,0,1,ransac,0,0.5,45.0,99,1.0,ok"]
    path.write_text("\n".join(lines) + "\n")
    m_lp, _, _ = heatmap_matrix(pd.read_csv(path), "heatmap-separation",
                                {"method": "dpcp-lp"})
    m_rs, _, _ = heatmap_matrix(pd.read_csv(path), "heatmap-separation",
                                {"method": "ransac"})
    assert m_lp[0, 0] == 1.0 and m_rs[0, 0] == 0.0


def test_theory_heatmaps_derive_ratio(tmp_path):
    path = tmp_path / "theory.csv"
    lines = [THEORY_HEADER]
    for d, m in ((2, 50), (5, 200)):
        for trial in range(2):
            lines.append(f"10,{d},200,{m},{trial},0.1,0.1,{m/200},1,30.0")
    path.write_text("\n".join(lines) + "\n")
    df = pd.read_csv(path)
    matrix, rows, cols = heatmap_matrix(df, "heatmap-condition")
    assert matrix.shape == (2, 2)
    assert cols == [0.2, 0.5]  # M/(N+M)
    angle, _, _ = heatmap_matrix(df, "heatmap-angle")
    assert np.allclose(angle[~np.isnan(angle)], 30.0)


def test_angle_heatmap_90_renders_white(tmp_path):
    path = tmp_path / "theory.csv"
    lines = [THEORY_HEADER, "10,5,200,100,0,0.0,0.0,0.5,1,90.0"]
    path.write_text("\n".join(lines) + "\n")
    out = render(FigureSpec(input_csv=str(path), kind="heatmap-angle",
                            output=str(tmp_path / "angle.png")))
    assert center_pixel(out[0]) >= 250


def test_roc_overlay_renders_with_annotations(tmp_path):
    csv = roc_csv(tmp_path / "roc.csv")
    out = render(FigureSpec(input_csv=csv, kind="roc-overlay",
                            output=str(tmp_path / "roc")))
    svg = open(out[1]).read()
    assert "0.000" in svg and "0.500" in svg
    assert "dpcp-lp" in svg


def test_rendering_is_deterministic(tmp_path):
    csv = grid_csv(tmp_path / "grid.csv", cells(lambda t: int(t % 2)))
    spec_a = FigureSpec(input_csv=csv, kind="heatmap-separation",
                        output=str(tmp_path / "a.png"))
    spec_b = FigureSpec(input_csv=csv, kind="heatmap-separation",
                        output=str(tmp_path / "b.png"))
    a_png, a_svg = render(spec_a)
    b_png, b_svg = render(spec_b)
    assert open(a_png, "rb").read() == open(b_png, "rb").read()
    assert open(a_svg, "rb").read() == open(b_svg, "rb").read()


def test_missing_column_names_it(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("D,d,N,M,ratio\n10,5,200,100,0.1\n")
    with pytest.raises(SchemaError, match="separation"):
        heatmap_matrix(pd.read_csv(path), "heatmap-separation")


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec(input_csv="x.csv", kind="pie-chart", output="y.png")


def test_cli_end_to_end(tmp_path):
    grid = grid_csv(tmp_path / "grid.csv", cells(1))
    roc = roc_csv(tmp_path / "roc.csv")
    config = [
        {"input_csv": grid, "kind": "heatmap-separation",
         "output": str(tmp_path / "sep.png"), "filters": {"method": "dpcp-lp"}},
        {"input_csv": roc, "kind": "roc-overlay", "output": str(tmp_path / "roc.png")},
    ]
    cfg = tmp_path / "figs.json"
    cfg.write_text(json.dumps(config))
    assert cli_main([str(cfg)]) == 0
    for stem in ("sep", "roc"):
        assert (tmp_path / f"{stem}.png").exists()
        assert (tmp_path / f"{stem}.svg").exists()


def test_cli_schema_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    cfg = tmp_path / "figs.json"
    cfg.write_text(json.dumps([{"input_csv": str(path),
                                "kind": "heatmap-separation",
                                "output": str(tmp_path / "x.png")}]))
    assert cli_main([str(cfg)]) == 1
    assert "column" in capsys.readouterr().err


def test_cli_missing_config(tmp_path, capsys):
    assert cli_main([str(tmp_path / "none.json")]) == 1


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "dpcp_figures.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
