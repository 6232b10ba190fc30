import json
import math
import subprocess
import sys

import numpy as np
import pytest

from entmix import cli, quadrature
from entmix.errors import NonConvergence
from entmix.qstate import bell_states

B = {k: v.amplitudes.tolist() for k, v in bell_states().items()}


def _write(tmp_path, obj, name="in.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_certify_bell_pair(tmp_path, capsys):
    f = _write(tmp_path, {"states": [B["phi+"], B["psi+"]], "weights": [0.5, 0.5]})
    code, out, _ = _run(capsys, "certify", "--in", f)
    assert code == 0
    d = json.loads(out)
    assert d["optimal"] is False and d["rebit_coincident"] is True
    assert d["config"]["seed"] == 0 and d["config"]["samples"] == 10 ** 6


def test_certify_optimal_pair(tmp_path, capsys):
    t = math.pi / 8
    f = _write(tmp_path, {"states": [B["phi-"], [math.cos(t), 0, 0, -math.sin(t)]]})
    code, out, _ = _run(capsys, "certify", "--in", f)
    d = json.loads(out)
    assert code == 0 and d["optimal"] is True
    assert abs(d["concurrence"] - d["weighted_sum"]) < 1e-10


def test_certify_triple_and_quadruple(tmp_path, capsys):
    e = np.eye(4).tolist()
    code, out, _ = _run(capsys, "certify", "--in", _write(tmp_path, {"states": e[:3]}))
    assert code == 0 and json.loads(out)["kind"] == "triple"
    code, out, _ = _run(capsys, "certify", "--in", _write(tmp_path, {"states": e}))
    d = json.loads(out)
    assert code == 0 and d["kind"] == "rank4" and d["det_r"] > 0


def test_certify_exit_codes(tmp_path, capsys):
    assert _run(capsys, "certify", "--in", _write(tmp_path, "{not json"))[0] == 2
    assert _run(capsys, "certify", "--in", str(tmp_path / "missing.json"))[0] == 2
    assert _run(capsys, "certify")[0] == 2
    one = _write(tmp_path, {"states": [B["phi+"]]})
    assert _run(capsys, "certify", "--in", one)[0] == 2
    dep = _write(tmp_path, {"states": [B["phi+"], B["psi+"], B["phi+"]]})
    code, _, err = _run(capsys, "certify", "--in", dep)
    assert code == 3 and "dependent" in err
    cplx = _write(tmp_path, {"states": [[[1, 0], [0, 1], 0, 0], B["phi+"]]})
    assert _run(capsys, "certify", "--in", cplx)[0] == 3


def test_bad_flags_exit_2(capsys):
    assert _run(capsys, "estimate", "f2", "--samples", "0")[0] == 2
    assert _run(capsys, "estimate", "f2", "--threads", "0")[0] == 2
    assert _run(capsys, "estimate", "f2", "--format", "csv")[0] == 2
    assert _run(capsys, "estimate", "mu-moments", "--pairs", "1", "--samples", "10")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["estimate", "nope"])
    assert exc.value.code == 2


@pytest.mark.parametrize("which", cli.ESTIMATES)
def test_estimate_all_kinds(capsys, which):
    code, out, _ = _run(capsys, "estimate", which, "--samples", "2000", "--seed", "4")
    assert code == 0
    d = json.loads(out)
    assert d["which"] == which and d["config"]["seed"] == 4


def test_estimate_json_schema(capsys):
    d = json.loads(_run(capsys, "estimate", "f2", "--samples", "1000")[1])
    assert {"estimate", "stderr", "n", "seed", "target"} <= set(d)
    assert d["target"] == pytest.approx((math.pi - 2) / 4)


def test_byte_identical_and_thread_invariant(tmp_path, capsys):
    outs = []
    for i, th in enumerate(("1", "1", "3")):
        p = tmp_path / f"o{i}.json"
        assert cli.main(["estimate", "rebit3", "--samples", "150000", "--seed", "9",
                         "--threads", th, "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    sweeps = [_run(capsys, "dimer-sweep", "--pairs", "4", "--grid", "11", "--threads", t)[1]
              for t in ("1", "2")]
    assert sweeps[0] == sweeps[1]


def test_dimer_sweep_csv(capsys):
    code, out, _ = _run(capsys, "dimer-sweep", "--pairs", "4", "--grid", "5", "--seed", "2")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "p,C_coherent,C_incoherent,weighted_sum" and len(lines) == 6
    p0 = [float(v) for v in lines[1].split(",")]
    p1 = [float(v) for v in lines[-1].split(",")]
    assert abs(p0[1] - p0[2]) < 1e-12 and abs(p1[1] - p1[2]) < 1e-12


def test_dimer_sweep_json_and_file(tmp_path, capsys):
    code, out, _ = _run(capsys, "dimer-sweep", "--pairs", "3", "--grid", "3", "--format", "json")
    assert code == 0 and len(json.loads(out)["rows"]) == 3
    rng = np.random.default_rng(0)
    f = rng.standard_normal((2, 3, 4))
    f /= np.linalg.norm(f, axis=2, keepdims=True)
    path = _write(tmp_path, {"branches": f.tolist()})
    code, out, _ = _run(capsys, "dimer-sweep", "--in", path, "--grid", "3")
    assert code == 0 and len(out.splitlines()) == 4


def test_dimer_sweep_limits(capsys, tmp_path):
    assert _run(capsys, "dimer-sweep", "--pairs", "13")[0] == 4
    assert _run(capsys, "dimer-sweep", "--grid", "1")[0] == 2
    big = _write(tmp_path, {"branches": [[[1, 0, 0, 0]] * 13] * 2})
    assert _run(capsys, "dimer-sweep", "--in", big)[0] == 4
    three = _write(tmp_path, {"branches": [[[1, 0, 0, 0]]] * 3})
    assert _run(capsys, "dimer-sweep", "--in", three)[0] == 3


def test_quadrature_loose_tol(capsys):
    code, out, _ = _run(capsys, "quadrature", "--tol", "1e-3")
    d = json.loads(out)
    assert code == 0
    assert abs(d["f"] - math.pi / 4) < 2e-3
    assert abs(d["f2"] - (math.pi - 2) / 4) < 2e-3


def test_quadrature_tol_out_of_range(capsys):
    assert _run(capsys, "quadrature", "--tol", "1e-1")[0] == 2


def test_quadrature_nonconvergence_exit_5(capsys, monkeypatch):
    def fail(tol):
        raise NonConvergence("forced")
    monkeypatch.setattr(quadrature, "evaluate_appendix", fail)
    assert _run(capsys, "quadrature")[0] == 5


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "entmix", "estimate", "rank4", "--samples", "100"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["violations"] == 0
