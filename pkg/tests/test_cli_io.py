import json
import re
import subprocess
import sys
import warnings
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from medialparam import RunConfig, run_pipeline
from medialparam.cli import main
from medialparam.curves import CurveLoop
from medialparam.errors import OrientationWarning, ParseError, PipelineError, ValidationError
from medialparam.io import (domain_from_dict, domain_to_dict, parse_domain, read_mesh,
                            write_domain, write_mesh)
from medialparam.shapes import FIXTURES, annulus_domain, circle, disk_domain
from medialparam.svg import render_svg

from conftest import run_fixture

SVG = "{http://www.w3.org/2000/svg}"


def seg_list(loop):
    return loop.segments.tolist()


@pytest.fixture
def capsule_json(tmp_path):
    path = tmp_path / "capsule.json"
    write_domain(FIXTURES["capsule"](), path)
    return path


def test_parse_circle(tmp_path):
    path = tmp_path / "circle.json"
    path.write_text(json.dumps({"curves": [{"role": "outer", "segments": seg_list(circle())}]}))
    dom = parse_domain(path)
    assert len(dom) == 1 and dom[0].orientation == "CCW" and len(dom[0]) == 4


def test_parse_annulus_both_ccw_warns(tmp_path):
    path = tmp_path / "annulus.json"
    doc = {"curves": [{"role": "outer", "segments": seg_list(circle(2.0))},
                      {"role": "hole", "segments": seg_list(circle(1.0))}]}
    path.write_text(json.dumps(doc))
    with pytest.warns(OrientationWarning):
        dom = parse_domain(path)
    assert dom[1].orientation == "CW" and dom[0].orientation == "CCW"


def test_parse_figure_eight_rejected(tmp_path):
    # two lobes traced as one loop crossing itself at the origin
    lobe = lambda s: [[[0, 0], [s * 1, 1], [s * 2, 1], [s * 2, 0]],
                      [[s * 2, 0], [s * 2, -1], [s * 1, -1], [0, 0]]]
    segs = lobe(1) + [[[0, 0], [-1, 1], [-2, 1], [-2, 0]], [[-2, 0], [-2, -1], [-1, -1], [0, 0]]]
    path = tmp_path / "eight.json"
    path.write_text(json.dumps({"curves": [{"role": "outer", "segments": segs}]}))
    with pytest.raises(ValidationError):
        parse_domain(path)


def test_parse_malformed_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "curves": [\n    {"role": "outer",\n     "segments": [1, 2,]\n  ]\n}\n')
    with pytest.raises(ParseError, match=r"line 4"):
        parse_domain(path)


def test_parse_bad_structure(tmp_path):
    for doc in ({"loops": []}, {"curves": [{"role": "inner", "segments": []}]},
                {"curves": [{"role": "outer", "segments": [[[0, 0], [1, 1]]]}]}):
        with pytest.raises(ParseError):
            domain_from_dict(doc)


def test_non_g1_join_named():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    segs = [[sq[i], sq[i], sq[(i + 1) % 4], sq[(i + 1) % 4]] for i in range(4)]
    with pytest.raises(ValidationError, match="join"):
        domain_from_dict({"curves": [{"role": "outer", "segments": segs}]})


def test_domain_dict_roundtrip():
    dom = FIXTURES["l_with_holes"]()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        back = domain_from_dict(json.loads(json.dumps(domain_to_dict(dom))))
    for a, b in zip(dom, back):
        assert a.role == b.role and np.array_equal(a.segments, b.segments)


def test_mesh_roundtrip(tmp_path):
    mesh = run_fixture("l_with_holes").mesh
    path = tmp_path / "m.txt"
    write_mesh(mesh, path)
    back = read_mesh(path)
    assert np.array_equal(back.points, mesh.points)
    assert np.array_equal(back.curve_id, mesh.curve_id)
    assert np.array_equal(back.theta, mesh.theta)
    assert back.n_boundary == mesh.n_boundary
    assert [list(x) for x in back.loops] == [list(x) for x in mesh.loops]
    assert sorted(back.limbs) == sorted(mesh.limbs)
    assert back.faces == mesh.faces
    assert back.spine_edges == mesh.spine_edges
    assert back.spine_kind == mesh.spine_kind
    assert back.meta == mesh.meta


def test_mesh_header_echoes_config(tmp_path):
    art = run_fixture("capsule")
    path = tmp_path / "m.txt"
    write_mesh(art.mesh, path)
    text = path.read_text()
    assert re.search(r"^# alpha 0\.10000000000000001$", text, re.M)
    assert f"# epsilon {art.labeled.epsilon:.17g}\n" in text


def test_disk_mesh_lines(tmp_path):
    path = tmp_path / "disk.txt"
    write_mesh(run_fixture("disk").mesh, path)
    lines = path.read_text().splitlines()
    tris = [ln for ln in lines if re.fullmatch(r"f \d+ \d+ \d+", ln)]
    quads = [ln for ln in lines if re.fullmatch(r"f \d+ \d+ \d+ \d+", ln)]
    assert len(tris) == 36 and not quads
    spine = [ln for ln in lines if ln.startswith("v ") and ln.split()[3] == "s"]
    assert len(spine) == 1 and spine[0].split()[4:] == ["-1", "-1"]


def svg_groups(text):
    root = ET.fromstring(text)
    return {g.get("id"): g for g in root.iter(f"{SVG}g")}


def test_svg_single_red_group():
    art = run_fixture("capsule")
    text = render_svg(art)
    groups = svg_groups(text)
    red = [g for g in groups.values() if g.get("stroke") == "#d62728"]
    assert len(red) == 1 and red[0].get("id") == "spine"
    assert len(red[0].findall(f"{SVG}polyline")) == 1
    assert {"sites", "voronoi", "faces"} <= set(groups)
    assert "contours" not in groups


def test_svg_contour_layer_present_when_requested():
    art = run_fixture("disk")
    from medialparam.param import iso_contour
    text = render_svg(art, {0.5: {0: iso_contour(art.mesh, 0.5, 0)}})
    assert "contours" in svg_groups(text)


def test_svg_site_styles():
    art = run_fixture("disk")
    circles = svg_groups(render_svg(art))["sites"].findall(f"{SVG}circle")
    fills = [c.get("fill") for c in circles]
    assert fills.count("none") == 36 and len(fills) == 72


def test_pipeline_ellipse_hole_two_loops():
    art = run_fixture("ellipse_with_hole")
    assert len(art.mesh.loops) == 2


def test_pipeline_error_names_stage():
    with pytest.raises(PipelineError) as info:
        run_pipeline(RunConfig(domain=disk_domain(), samples=4))
    assert info.value.stage == "sample"


def test_cli_outputs_and_determinism(tmp_path, capsule_json, capsys):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        d.mkdir()
        code = main(["run", str(capsule_json), "--samples", "200", "--verify",
                     "--contours", "0.5,1", "--query", "0,0", "5,5",
                     "--svg", str(d / "o.svg"), "--mesh", str(d / "o.txt"),
                     "--field", str(d / "o.csv"), "--field-resolution", "21"])
        assert code == 0
        outs.append([(d / n).read_bytes() for n in ("o.svg", "o.txt", "o.csv")])
    assert outs[0] == outs[1]
    out = capsys.readouterr().out
    assert "voronoi oracle passed" in out
    assert "query 0,0 -> curve 0" in out and "query 5,5 -> outside" in out
    csv = (tmp_path / "run0" / "o.csv").read_text().splitlines()
    assert csv[0] == "x,y,F" and len(csv) == 1 + 21 * 21


def test_cli_too_few_samples(capsule_json, capsys):
    assert main(["run", str(capsule_json), "--samples", "4"]) == 2
    err = capsys.readouterr().err
    assert "[sample]" in err and "InvalidArgumentError" in err


def test_cli_missing_file(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.json")]) == 2
    assert "[parse]" in capsys.readouterr().err


def test_cli_warning_on_stderr(tmp_path, capsys):
    path = tmp_path / "annulus.json"
    doc = domain_to_dict(annulus_domain())
    doc["curves"][1]["segments"] = seg_list(CurveLoop(np.array(doc["curves"][1]["segments"])).reversed())
    path.write_text(json.dumps(doc))
    assert main(["run", str(path), "--samples", "60"]) == 0
    assert "warning:" in capsys.readouterr().err


def test_console_script(capsule_json):
    proc = subprocess.run([sys.executable, "-m", "medialparam.cli", "run", str(capsule_json),
                           "--samples", "64"], capture_output=True, text=True)
    assert proc.returncode == 0 and "mesh quads" in proc.stdout
