import json
import math
from fractions import Fraction

import numpy as np
import pytest

from chatterlab import io
from chatterlab.cli import main


def run(tmp_path, *argv):
    return main([*argv, "--out-dir", str(tmp_path)])


def test_fmt_and_json_round_trip(tmp_path):
    assert io.fmt(0.1) == "0.10000000000000001"
    assert io.fmt(math.inf) == "inf"
    obj = {"a": [1.5, Fraction(1, 3), np.float64(2.0)], "b": {"c": None, "d": True},
           "e": math.nan}
    text = io.dumps(obj)
    back = json.loads(text)
    assert back["a"][1] == pytest.approx(1 / 3, rel=1e-16)
    assert back["e"] == "nan"


def test_csv_round_trip(tmp_path):
    path = io.write_csv(tmp_path / "a.csv", ("t", "x"), [(0.0, 1.0), (0.5, 1 / 3)])
    cols, data = io.read_csv(path)
    assert cols == ["t", "x"]
    assert data[1, 1] == 1 / 3
    bad = tmp_path / "b.csv"
    bad.write_text("t,x\n0,1\n")
    with pytest.raises(ValueError):
        io.read_csv(bad)


def test_fuller_mu(capsys):
    assert main(["fuller", "mu"]) == 0
    assert "0.24212137354815674" in capsys.readouterr().out


def test_fuller_simulate_origin(tmp_path, capsys):
    assert run(tmp_path, "fuller", "simulate", "--x0", "0", "--y0", "0") == 0
    assert "empty trajectory" in capsys.readouterr().out


def test_fuller_tf_json(tmp_path):
    out = tmp_path / "tf.json"
    assert main(["fuller", "tf", "--x0", "1", "--y0", "0", "--json", str(out)]) == 0
    assert json.loads(out.read_text())["T_F"] == pytest.approx(2.71519452770313)


def test_fuller_finite_exit_codes(tmp_path):
    assert run(tmp_path, "fuller", "finite", "--x0", "1", "--y0", "0", "--x1", "0", "--y1", "0",
               "--t1", "0.01") == 1
    assert run(tmp_path, "fuller", "finite", "--x0", "1", "--y0", "0", "--x1", "0", "--y1", "0",
               "--t1", "4", "--verify") == 0
    rep = json.loads((tmp_path / "fuller_finite_report.json").read_text())
    assert rep["pmp"]["certified"] is True


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["fuller", "tf", "--x0", "1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["fuller", "finite", "--x0", "1", "--y0", "0", "--x1", "0", "--y1", "0", "--t1", "-1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_r4_geodesic_csv(tmp_path):
    assert run(tmp_path, "geodesic", "r4-subfinsler", "--x0", "1", "--slack", "1",
               "--samples-out", "21") == 0
    cols, data = io.read_csv(tmp_path / "r4_subfinsler.csv")
    assert cols == ["t", "x", "y", "z", "w", "u", "v"]
    assert data.shape == (21, 7)
    assert np.all(data[:, 6] == 1.0)


def test_geodesic_inadmissible(tmp_path):
    # all-zero data with a positive slack is fine; a negative slack is a usage error
    with pytest.raises(SystemExit):
        run(tmp_path, "geodesic", "r4-finsler", "--slack", "-1")


def test_carnot_csv_columns(tmp_path):
    assert run(tmp_path, "geodesic", "carnot-finsler", "--x0", "1", "--slack", "0.5",
               "--samples-out", "11", "--verify") == 0
    cols, data = io.read_csv(tmp_path / "carnot_finsler.csv")
    assert cols == ["t", "x1", "x2", "x3", "x4", "x5", "x6", "u1", "u2"]
    rep = json.loads((tmp_path / "carnot_finsler_report.json").read_text())
    assert rep["verified"] is True
    assert rep["unit_speed_max_deviation"] < 1e-9


def test_json_format_and_determinism(tmp_path, monkeypatch):
    monkeypatch.setenv("CHATTERLAB_SEED", "5")
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["geodesic", "r4-subfinsler", "--x0", "1", "--slack", "1", "--verify",
            "--samples", "12", "--format", "json"]
    assert main([*args, "--out-dir", str(a)]) == 0
    assert main([*args, "--out-dir", str(b)]) == 0
    for name in ("r4_subfinsler.json", "r4_subfinsler_report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    rep = json.loads((a / "r4_subfinsler_report.json").read_text())
    assert rep["seed"] == 5
    assert rep["adversarial"]["violations"] == 0


def test_check_brackets(capsys):
    assert main(["check", "brackets", "--system", "builtin:r4"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 7


def test_check_bad_yaml(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("variables: [x]\nfields: {a: 'x +'}\nvertices: [a]\n")
    assert main(["check", "brackets", "--system", str(p)]) == 2
    assert main(["check", "brackets", "--system", str(tmp_path / "missing.yaml")]) == 2


def test_check_false_identity(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text("variables: [x, y]\nfields: {a: '1, 0', b: '0, x'}\n"
                 "vertices: [a, b, -a, -b]\ntable: ['[a,b] = a']\n")
    assert main(["check", "brackets", "--system", str(p)]) == 1


def test_check_chattering(tmp_path):
    out = tmp_path / "r4.json"
    assert main(["check", "chattering", "--system", "builtin:r4", "--json", str(out)]) == 1
    assert json.loads(out.read_text())["status"] == "DimensionTooSmall"
    out = tmp_path / "d9.json"
    assert main(["check", "chattering", "--system", "builtin:demo9",
                 "--point", "0,0,0,0,0,0,0,0,0", "--json", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["certificate"]["beta_pairing"] == -1
    assert rep["reverification"]["all"] is True
    assert main(["check", "chattering", "--system", "builtin:demo9", "--point", "0,0"]) == 2
    assert main(["check", "chattering", "--system", "builtin:demo9", "--edge", "0,2"]) == 1


def test_zero_data_geodesic(tmp_path):
    assert run(tmp_path, "geodesic", "r4-subfinsler", "--slack", "1", "--samples-out", "3") == 0
    _, data = io.read_csv(tmp_path / "r4_subfinsler.csv")
    np.testing.assert_allclose(data[:, 4], [0.0, 0.5, 1.0])
    assert run(tmp_path, "geodesic", "r4-finsler", "--verify", "--samples", "4") == 0


@pytest.mark.parametrize("kind", ["r4-subfinsler", "r4-finsler", "carnot-subfinsler",
                                  "carnot-finsler"])
def test_inadmissible_exit_code(tmp_path, kind, capsys):
    assert run(tmp_path, "geodesic", kind, "--x0", "1", "--z1", "5") == 1
    assert "inadmissible" in capsys.readouterr().err
    assert run(tmp_path, "geodesic", kind, "--x0", "1", "--w1", "0.5") == 1
