"""Figure rendering: every kind, determinism, input-count rules."""

import pytest

from plotkit import ContractError, render

from conftest import write_csv

PNG_MAGIC = b"\x89PNG\r\n"


def test_heatmap_renders_png(heatmap_csv, tmp_path):
    out = tmp_path / "heat.png"
    render("heatmap_psi2", [heatmap_csv], str(out))
    assert out.read_bytes()[:6] == PNG_MAGIC


def test_current_curves_render(current_csv, tmp_path):
    out = tmp_path / "cur.png"
    render("current_curves", [current_csv], str(out))
    assert out.read_bytes()[:6] == PNG_MAGIC


def test_norm_decay_renders(norm_csv, tmp_path):
    out = tmp_path / "norm.png"
    render("norm_decay", [norm_csv], str(out))
    assert out.read_bytes()[:6] == PNG_MAGIC


def test_trace_purity_renders(trace_csv, tmp_path):
    out = tmp_path / "tp.png"
    render("trace_purity", [trace_csv], str(out))
    assert out.read_bytes()[:6] == PNG_MAGIC


def test_repeated_renders_are_byte_identical(heatmap_csv, tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render("heatmap_psi2", [heatmap_csv], str(a))
    render("heatmap_psi2", [heatmap_csv], str(b))
    assert a.read_bytes() == b.read_bytes()


def test_svg_output_is_deterministic(norm_csv, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render("norm_decay", [norm_csv], str(a))
    render("norm_decay", [norm_csv], str(b))
    assert a.read_bytes() == b.read_bytes()


def test_three_curve_overlay(tmp_path):
    paths = []
    for k, rate in enumerate((0.1, 0.5, 1.0)):
        rows = [(0.05 * j, 0.5, 0.3 * (1 - rate * 0.05 * j)) for j in range(40)]
        paths.append(write_csv(tmp_path / f"sigma2_{k}.csv", "t,probe_x,J_R", rows))
    out = tmp_path / "overlay.png"
    render("current_curves", paths, str(out))
    assert out.read_bytes()[:6] == PNG_MAGIC


def test_same_name_inputs_get_distinct_labels(tmp_path):
    paths = []
    for sub in ("run_a", "run_b"):
        d = tmp_path / sub
        d.mkdir()
        rows = [(0.05 * j, 1.0 - 0.01 * j) for j in range(10)]
        paths.append(write_csv(d / "norm.csv", "t,norm2", rows))
    out = tmp_path / "overlay.png"
    render("norm_decay", paths, str(out))
    assert out.exists()


def test_single_input_kinds_reject_multiple_files(heatmap_csv, trace_csv, tmp_path):
    with pytest.raises(ContractError, match="exactly one"):
        render("heatmap_psi2", [heatmap_csv, heatmap_csv], str(tmp_path / "x.png"))
    with pytest.raises(ContractError, match="exactly one"):
        render("trace_purity", [trace_csv, trace_csv], str(tmp_path / "y.png"))


def test_incomplete_heatmap_lattice_is_rejected(tmp_path):
    rows = [(0.0, -1.0, 1.0), (0.0, 1.0, 1.0), (0.1, -1.0, 1.0)]
    p = write_csv(tmp_path / "psi2_heatmap.csv", "t,x,psi2", rows)
    with pytest.raises(ContractError, match="lattice"):
        render("heatmap_psi2", [p], str(tmp_path / "x.png"))


def test_unknown_kind_is_rejected(norm_csv, tmp_path):
    with pytest.raises(ContractError, match="unknown figure kind"):
        render("sparkline", [norm_csv], str(tmp_path / "x.png"))


def test_empty_input_list_is_rejected(tmp_path):
    with pytest.raises(ContractError, match="at least one"):
        render("norm_decay", [], str(tmp_path / "x.png"))
