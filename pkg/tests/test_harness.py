import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from tokq.cli import main
from tokq.harness.config import PARAMS, ConfigError, build_config, load_config_file
from tokq.harness.experiments import TRANSFER_TAGS, RUNNERS, write_csv
from tokq.harness.plots import box_stats, emit_boxplot, emit_errorbars, emit_lines
from tokq.harness.stats import quantile, summarize

SMALL = {
    "uc1": {"n": 12, "density": 0.5, "reads": 20, "runs": 2, "hold": 5, "fractions": "7,25"},
    "uc2": {"n": 6, "k": 3, "seeds": 2, "steps": 4, "transfers": 2, "k-prime": 2},
    "uc3": {"runs": 2, "iters": 5},
    "gen-instances": {"n": 12, "density": 0.5, "perturb-fractions": "7,50"},
}


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_summarize_linear_quantiles():
    st = summarize([1, 2, 3, 4])
    assert (st.median, st.q1, st.q3, st.iqr) == (2.5, 1.75, 3.25, 1.5)
    assert st.mean == 2.5
    assert st.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert quantile([3, 1, 2], 0.5) == 2


def test_summarize_single_value():
    st = summarize([7.0])
    assert st.median == 7.0 and st.iqr == 0.0 and st.stderr == 0.0


def test_box_stats_hundred():
    b = box_stats(range(1, 101))
    assert (b["q1"], b["median"], b["q3"]) == (25.75, 50.5, 75.25)


def test_boxplot_svg_structure(tmp_path):
    groups = {"b": list(range(1, 101)), "a": [5, 6, 7], "c": [1.0]}
    out = emit_boxplot(groups, tmp_path / "box.svg", title="t", ylabel="y")
    root = ET.parse(out).getroot()
    boxes = [el for el in root.iter() if el.get("class") == "box"]
    assert [b.get("data-label") for b in boxes] == ["b", "a", "c"]
    assert float(boxes[0].get("data-median")) == 50.5
    assert float(boxes[0].get("data-q1")) == 25.75


def test_line_and_errorbar_plots_parse(tmp_path):
    a = emit_lines({"s": ([0, 1, 2], [1.0, 0.5, 0.2])}, tmp_path / "l.svg", bands={"s": ([0.9, 0.4, 0.1], [1.1, 0.6, 0.3])})
    b = emit_errorbars([("x", 0.3, 0.05), ("y", 0.4, 0.01)], tmp_path / "e.svg")
    ET.parse(a)
    ET.parse(b)


def test_write_csv_formats(tmp_path):
    p = write_csv(tmp_path / "x.csv", ["a", "b"], [(0.1, None), (3, 1 / 3)])
    assert read_rows(p) == [{"a": "0.1", "b": "NA"}, {"a": "3", "b": repr(1 / 3)}]


def test_transfer_tags():
    assert TRANSFER_TAGS["uc1"].what == "individual" and TRANSFER_TAGS["uc1"].how == "sequential"
    assert TRANSFER_TAGS["uc2"].what == "parameter" and TRANSFER_TAGS["uc2"].how == "multitasking"
    assert TRANSFER_TAGS["uc3"].what == "parameter" and TRANSFER_TAGS["uc3"].how == "sequential"


@pytest.mark.parametrize("use_case, key, value", [
    ("uc1", "s-target", 1.5), ("uc1", "reads", 0), ("uc2", "strategy", "greedy"),
    ("uc2", "n", 40), ("uc3", "mode", "hot"), ("uc3", "iters", "x"), ("uc3", "bogus", 1),
])
def test_config_rejects(use_case, key, value):
    with pytest.raises(ConfigError) as exc:
        build_config(use_case, {key: value})
    assert exc.value.field == key
    assert json.loads(exc.value.as_json())["field"] == key


def test_config_defaults_and_aliases():
    cfg = build_config("uc2", {"k_prime": 3})
    assert cfg["k-prime"] == 3
    assert cfg["strategy"] == ["none", "static", "evolve"]


def test_config_file_formats(tmp_path):
    (tmp_path / "a.yaml").write_text("iters: 7\nmode: cold-start\n")
    (tmp_path / "b.json").write_text('{"iters": 9}')
    assert load_config_file(tmp_path / "a.yaml") == {"iters": 7, "mode": "cold-start"}
    assert load_config_file(tmp_path / "b.json") == {"iters": 9}
    (tmp_path / "c.yaml").write_text("outer:\n  inner: 1\n")
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "c.yaml")


def test_cli_invalid_value_exits_2(tmp_path, capsys):
    code = main(["uc1", "--s-target", "1.5", "--out", str(tmp_path / "x.csv")])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["field"] == "s-target"
    assert not (tmp_path / "x.csv").exists()


def test_cli_missing_file_exits_1(tmp_path, capsys):
    code = main(["uc1", "--base", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "x.csv")])
    assert code == 1
    assert "error" in json.loads(capsys.readouterr().err)


def test_cli_uc3_rows_and_manifest_rerun(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["uc3", "--runs", "2", "--iters", "5", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 2 * 54
    assert set(rows[0]) == {"mode", "run", "r", "theta_final", "energy", "exact_energy", "ica"}
    manifest = json.loads((tmp_path / "r.manifest.json").read_text())
    assert manifest["config"]["iters"] == 5
    assert manifest["transfer_tag"] == {"what": "parameter", "how": "sequential"}
    first = out.read_bytes()
    out.unlink()
    assert main(["uc3", "--config", str(tmp_path / "r.manifest.json")]) == 0
    assert out.read_bytes() == first


def test_cli_flag_beats_config(tmp_path):
    cfgfile = tmp_path / "c.yaml"
    cfgfile.write_text(f"runs: 3\niters: 4\nout: {tmp_path / 'a.csv'}\n")
    assert main(["uc3", "--config", str(cfgfile), "--runs", "1"]) == 0
    assert len(read_rows(tmp_path / "a.csv")) == 54


@pytest.mark.parametrize("use_case", ["uc1", "uc2", "uc3"])
def test_every_option_reaches_the_run(use_case, tmp_path):
    cfg = build_config(use_case, {**SMALL[use_case], "out": str(tmp_path / "o.csv"), "plot": True})
    manifest = RUNNERS[use_case](cfg)
    assert cfg.params.consumed == set(manifest["config"]) == {p.name for p in PARAMS[use_case]}
    for p in manifest["outputs"]:
        assert (tmp_path / p.split("/")[-1]).exists()
    for svg in tmp_path.glob("*.svg"):
        ET.parse(svg)


def test_gen_instances(tmp_path):
    cfg = build_config("gen-instances", {**SMALL["gen-instances"], "out-dir": str(tmp_path)})
    RUNNERS["gen-instances"](cfg)
    names = sorted(p.name for p in tmp_path.glob("MaxCut_*.txt"))
    assert names == ["MaxCut_12.txt", "MaxCut_12_100.txt", "MaxCut_12_50.txt", "MaxCut_12_7.txt"]
    assert len(read_rows(tmp_path / "instances.csv")) == 4
