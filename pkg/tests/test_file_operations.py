import json
import math

import numpy as np
import numpy.testing as npt

from app.models import RegionLabel
from app.utils.file_operations import (
    canonical_json,
    cleanup_temp_file,
    header_lines,
    load_arrays,
    render_csv,
    render_json,
    save_arrays,
    write_atomic,
)


def test_canonical_json_is_stable():
    payload = {"b": np.float64(0.1), "a": [1, np.int64(2)], "c": math.inf, "d": RegionLabel.GAMMA_2}
    text = canonical_json(payload)
    assert text == '{"a":[1,2],"b":0.1,"c":"inf","d":"Gamma2"}'
    assert canonical_json(dict(reversed(list(payload.items())))) == text


def test_csv_carries_the_header_block():
    text = render_csv({"seed": 3, "command": "scan"}, ("value", "unstable", "note"), [[0.5, True, None]])
    lines = text.splitlines()
    assert lines[:3] == header_lines({"command": "scan", "seed": 3})
    assert lines[0] == "# artifact_version: 1"
    assert lines[1] == '# command: "scan"'
    assert lines[3] == "value,unstable,note"
    assert lines[4] == "0.5,true,"


def test_json_document_layout():
    document = json.loads(render_json({"command": "constants"}, {"tau_star": 0.25, "alpha": math.inf}))
    assert document["header"] == {"artifact_version": "1", "command": "constants"}
    assert document["result"] == {"tau_star": 0.25, "alpha": "inf"}


def test_write_atomic_leaves_no_temporary_files(tmp_path):
    target = tmp_path / "nested" / "out.txt"
    write_atomic(target, "first")
    write_atomic(target, "second")
    assert target.read_text(encoding="utf-8") == "second"
    assert [path.name for path in target.parent.iterdir()] == ["out.txt"]


def test_arrays_survive_the_archive(tmp_path):
    arrays = {"gamma": np.linspace(0.0, 1.0, 5), "scalar": np.array(2.5)}
    path = save_arrays(tmp_path / "blobs" / "key.npz", arrays)
    loaded = load_arrays(path)
    npt.assert_array_equal(loaded["gamma"], arrays["gamma"])
    assert float(loaded["scalar"]) == 2.5


def test_cleanup_temp_file(tmp_path):
    temp = tmp_path / "scratch.tmp"
    temp.write_text("x", encoding="utf-8")
    assert cleanup_temp_file(temp)
    assert not cleanup_temp_file(temp)
