import json
import math

import numpy as np
import pytest

import memsim


def flat_scene(height=4.0, tilt_deg=16.0):
    return {
        "mount": {"position": [0, 0, height], "tilt_deg": tilt_deg, "heading_deg": 0},
        "statics": [{"type": "ground", "id": 1, "z": 0.0, "reflectivity": 0.2}],
        "persons": [
            {"id": 100, "height": 1.75, "body_radius": 0.25, "speed": 1.0, "waypoints": [[12, 0], [14, 0]]}
        ],
        "frame_times": [0.0],
    }


def test_scan_directions():
    dirs = memsim.scan_directions()
    assert dirs.shape == (20000, 2)
    assert np.all(np.abs(dirs[:, 0]) <= math.radians(36))
    assert np.all(np.abs(dirs[:, 1]) <= math.radians(15))
    assert np.all(np.diff(dirs[:, 1]) <= 0)


def test_intrinsics():
    assert memsim.intrinsics_from_fov(math.pi / 2, 2, 2)["fx"] == 1.0
    with pytest.raises(ValueError):
        memsim.intrinsics_from_fov(4.0, 2, 2)


def test_iou():
    a = (0, 0, 0, 1, 1, 1, 0)
    assert memsim.iou3d(a, a) == pytest.approx(1.0)
    assert memsim.iou3d(a, (0.5, 0, 0, 1, 1, 1, 0)) == pytest.approx(1 / 3)
    assert memsim.iou3d(a, (5, 0, 0, 1, 1, 1, 0)) == 0.0


def test_average_precision():
    assert memsim.average_precision([0.9, 0.8, 0.7], [True, False, True], 2) == 5 / 6
    assert memsim.average_precision([], [], 3) == 0.0


def test_simulate_and_normalize():
    frame = memsim.simulate_frame(json.dumps(flat_scene()))
    points = frame["points"]
    assert points.shape[1] == 4 and len(points) > 1000
    assert [l["object_id"] for l in frame["labels"]] == [100]
    ground = points[np.array(frame["provenance"]) == 1]
    levelled = memsim.normalize(ground, 4.0, math.radians(16))
    assert np.max(np.abs(levelled[:, 2])) <= 1e-6
    back = memsim.denormalize(levelled, 4.0, math.radians(16))
    assert np.max(np.abs(back - ground)) <= 1e-9


def test_rounded_share():
    assert memsim.rounded_share(0.7, 2100) == 1470
    assert memsim.rounded_share(0.25, 10) == 3


def test_run_cli(tmp_path):
    script = tmp_path / "scene.json"
    script.write_text(json.dumps(flat_scene()))
    code, out, err = memsim.run_cli(["simulate", str(script), str(tmp_path / "out")])
    assert code == 0, err
    assert out.startswith("frames: 1")
    assert (tmp_path / "out" / "manifest.json").exists()
    code, _, _ = memsim.run_cli(["simulate"])
    assert code == 1
