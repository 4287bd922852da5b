import json

import numpy as np
import pytest

from start_cli import main
from app.commands import RunConfig, load_run_config
from dyn_plane_domains import Annulus, PlanarDomain, build_DR
from dyn_report_utils import (artifact_meta, config_hash, render_curve_svg, render_domain_svg, render_heatmap_svg,
                              save_csv, save_json)
from dyn_winding import CoveringGridReport
from utils.errors import ConfigError

POLY = {"kind": "poly", "coeffs": [0.0, 0.0, 1.0]}


def _write_config(tmp_path, name="run.json", **data):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_polynomial_search_is_an_honest_negative(tmp_path, capsys):
    out = tmp_path / "out"
    config = _write_config(tmp_path, function=POLY, N=2, R_start=64, R_steps=2, out_dir=str(out))
    assert main(["covering-search", "--config", config]) == 3
    certificate = json.loads((out / "certificate.json").read_text(encoding="utf-8"))
    assert certificate["status"] == "BudgetExhausted"
    assert certificate["schedule"] == [64.0, 128.0]
    assert certificate["meta"]["toolkit_version"] == "1.0.0"
    assert (out / "trace.json").exists()
    assert "witness |f|>R^j never found" in capsys.readouterr().out


def test_artifacts_are_reproducible(tmp_path):
    config = _write_config(tmp_path, function=POLY, R_start=64, R_steps=1, out_dir=str(tmp_path / "a"))
    assert main(["covering-search", "--config", config]) == 3
    assert main(["covering-search", "--config", config, "--out-dir", str(tmp_path / "b"), "--threads", "2"]) == 3
    for name in ("certificate.json", "trace.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_function_flag_overrides_the_config(tmp_path):
    config = _write_config(tmp_path, function={"kind": "exp"}, R_start=64, R_steps=1, out_dir=str(tmp_path / "o"))
    assert main(["covering-search", "--config", config, "--function", json.dumps(POLY)]) == 3


@pytest.mark.parametrize("data", [
    {"N": 2},
    {"function": POLY, "colour": "red"},
    {"function": POLY, "N": 0},
    {"function": POLY, "mode": "lenient"},
    {"function": {"kind": "bessel"}},
])
def test_configuration_errors_exit_with_two(tmp_path, capsys, data):
    config = _write_config(tmp_path, **data)
    assert main(["covering-search", "--config", config]) == 2
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "ConfigError"


def test_malformed_and_missing_files(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert main(["covering-search", "--config", str(broken)]) == 2
    assert main(["covering-search", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["no-such-command", "--config", str(broken)]) == 2
    assert main(["covering-search"]) == 2


def test_entropy_command_writes_table_and_curve(tmp_path):
    out = tmp_path / "entropy"
    config = _write_config(tmp_path, function=POLY, out_dir=str(out),
                           entropy={"compact_set": {"kind": "circle", "samples": 1024}, "n_max": 3, "deltas": [0.2],
                                    "reference": 0.693})
    assert main(["entropy", "--config", config]) == 0
    lines = (out / "entropy.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# config_hash=")
    assert lines[1] == "n,delta,K_lower"
    assert len(lines) == 2 + 3
    assert "<metadata>" in (out / "curve.svg").read_text(encoding="utf-8")
    payload = json.loads((out / "entropy.json").read_text(encoding="utf-8"))
    assert payload["curve"]["estimate"]["n_max"] == 3


def test_entropy_command_needs_a_section(tmp_path):
    config = _write_config(tmp_path, function=POLY, out_dir=str(tmp_path / "e"))
    assert main(["entropy", "--config", config]) == 2


def test_example_product_single_zero(tmp_path):
    out = tmp_path / "example"
    config = _write_config(tmp_path, function={"kind": "product", "zeros": [100.0]}, out_dir=str(out),
                           example={"samples": 4, "m": 2})
    assert main(["example-product", "--config", config]) == 0
    payload = json.loads((out / "example.json").read_text(encoding="utf-8"))
    assert payload["status"] == "Checked"
    assert payload["rows"][0]["R"] == 1000.0
    assert payload["rows"][0]["i"] == 1
    assert payload["rows"][0]["disk_exact"] is None
    assert payload["verdicts"]["annulus_at_most_once"]


@pytest.mark.slow
def test_example_product_bounds_entropy_on_the_exact_disk(tmp_path):
    out = tmp_path / "example_disk"
    config = _write_config(tmp_path, function={"kind": "product", "zeros": [2.0, 4.0]}, out_dir=str(out),
                           example={"samples": 4, "m": 2, "radii": [64.0]})
    assert main(["example-product", "--config", config]) == 0
    payload = json.loads((out / "example.json").read_text(encoding="utf-8"))
    row = payload["rows"][0]
    assert row["i"] == 2
    assert row["disk_exact"] is True
    assert row["degree_product"] == 2
    bound = row["certificate_bound"]
    assert bound["status"] == "Bound"
    assert bound["m"] == 1 and bound["k"] == 2
    assert bound["floor"] == pytest.approx(0.0, abs=1e-12)
    assert bound["measured"] >= bound["floor"]
    assert bound["meets_floor"]
    assert payload["verdicts"]["certificate_bound"] == bound["measured"]


def test_example_product_needs_a_product(tmp_path):
    config = _write_config(tmp_path, function={"kind": "exp"}, out_dir=str(tmp_path / "x"))
    assert main(["example-product", "--config", config]) == 2


def test_config_hash_ignores_location_and_threads(tmp_path):
    path = _write_config(tmp_path, function=POLY)
    base = load_run_config(path)
    moved = load_run_config(path, {"out_dir": "elsewhere", "threads": 8})
    reseeded = load_run_config(path, {"seed": 7})
    assert config_hash(base.hashed_fields()) == config_hash(moved.hashed_fields())
    assert config_hash(base.hashed_fields()) != config_hash(reseeded.hashed_fields())


def test_run_config_rejects_bad_types():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"function": POLY, "N": "two"})
    with pytest.raises(ConfigError):
        RunConfig.from_dict([POLY])


def test_save_json_and_csv(tmp_path):
    meta = artifact_meta({"x": 1})
    path = save_json(str(tmp_path / "a" / "data.json"), {"value": 1 + 2j, "array": np.arange(3)}, meta)
    data = json.loads(open(path, encoding="utf-8").read())
    assert data["meta"] == meta
    assert data["array"] == [0, 1, 2]

    path = save_csv(str(tmp_path / "rows.csv"), [["a", "b"], [1, 0.1]], meta)
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines == [f"# config_hash={meta['config_hash']} toolkit_version=1.0.0", "a,b", "1,0.1"]


def test_svg_renderers():
    meta = artifact_meta({"x": 1})
    domain_svg = render_domain_svg(build_DR(9.0, 0.0), meta, {"w_M": 9.0 + 0j})
    assert domain_svg.count("<polygon") == 1
    assert "w_M" in domain_svg

    ring_svg = render_domain_svg(PlanarDomain(Annulus(1.0, 2.0)), meta)
    assert ring_svg.count("<polygon") == 2

    points = np.array([0j, 1 + 0j])
    report = CoveringGridReport("src", "dst", 2, 1.0, points, np.array([[0, 0], [0, 1]]), np.array([2, 1]))
    heatmap = render_heatmap_svg(report, meta)
    assert heatmap.count("<rect") == 3
    assert "#e74c3c" in heatmap

    curve = render_curve_svg({1: 0.5, 2: 0.6, 3: 0.65}, meta, "curve", reference=0.69)
    assert "<polyline" in curve and "stroke-dasharray" in curve
