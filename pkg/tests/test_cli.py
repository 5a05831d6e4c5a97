import csv
import io
import json
import math

import pytest

from erasure_lab.cli import main
from erasure_lab.revmap import load_map

LN2 = math.log(2)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_verify_default(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "delta_nats = 0.6931471805599453" in out
    assert "(1, 2) -> (0, 1)" in out


def test_verify_trit_system_csv(capsys):
    code, out, _ = run(capsys, "verify", "--system-dim", "3", "--trits", "2", "--format", "csv")
    assert code == 0
    (r,) = rows(out)
    assert float(r["entropy_nats"]) == pytest.approx(math.log(3), abs=1e-12)
    assert r["union_size"] == "3"


def test_verify_no_record_register(capsys):
    code, _, err = run(capsys, "verify", "--system-dim", "2", "--trits", "0")
    assert code == 2
    assert "record register" in err


def test_verify_large_space_summarises(capsys):
    code, out, _ = run(capsys, "verify", "--trits", "4", "--ensemble-size", "3")
    assert code == 0
    assert "mapping table omitted" in out


def test_verify_json_fields(capsys):
    code, out, _ = run(capsys, "verify", "--format", "json")
    (doc,) = json.loads(out)
    assert code == 0
    assert doc["entropy_nats"] == LN2
    assert doc["entropy_bits"] == 1.0
    assert doc["entropy_si_J_per_K"] == pytest.approx(9.5699e-24, rel=1e-4)
    assert doc["branch_sizes"] == [1, 1]


def test_verify_with_partition(tmp_path, capsys):
    part = tmp_path / "p.txt"
    part.write_text("# T=1\n0: 0,1\n1: 2\n")
    code, out, _ = run(capsys, "verify", "--partition", str(part), "--format", "json")
    assert code == 0 and json.loads(out)[0]["final_macro_size"] == 2

    # A partition that splits the final states: the macrostate reveals the bit.
    part.write_text("0: 0\n1: 1\n2: 2\n")
    code, out, _ = run(capsys, "verify", "--partition", str(part))
    assert code == 1
    assert "straddle" in out

    # Ensemble must be a class.
    part.write_text("0: 0\n1: 1,2\n")
    code, _, _ = run(capsys, "verify", "--partition", str(part))
    assert code == 2


def test_verify_dump_map(tmp_path, capsys):
    path = tmp_path / "m.txt"
    code, _, _ = run(capsys, "verify", "--dump-map", str(path), "--format", "csv")
    assert code == 0
    f = load_map(path)
    assert f.image == (2, 3, 0, 4, 5, 1)


def test_oracle_default(capsys):
    code, out, _ = run(capsys, "oracle", "--format", "csv")
    assert code == 0
    (r,) = rows(out)
    assert r == {
        "M": "2", "T": "1", "N": "1", "assignments": "6", "min_union": "2",
        "delta_nats": repr(LN2), "delta_bits": "1.0",
        "independent": "true", "disjoint": "true", "elapsed_ms": "",
    }


def test_oracle_two_trits(capsys):
    code, out, _ = run(capsys, "oracle", "--ensemble-size", "2", "--trits", "2", "--format", "json")
    assert code == 0
    (doc,) = json.loads(out)
    assert doc["assignments"] == 3024 and doc["min_union"] == 4


def test_oracle_refusal(capsys):
    code, out, err = run(capsys, "oracle", "--trits", "6", "--ensemble-size", "50", "--format", "csv")
    assert code == 3
    assert out == ""
    assert "refused" in err


def test_budget_env_var(capsys, monkeypatch):
    monkeypatch.setenv("ERASURE_LAB_BUDGET", "5")
    code, _, err = run(capsys, "oracle")
    assert code == 3 and "needs 6" in err
    code, _, _ = run(capsys, "oracle", "--budget", "6")
    assert code == 0


def test_oracle_timing_opt_in(capsys):
    code, out, _ = run(capsys, "oracle", "--format", "csv", "--timing")
    assert code == 0
    assert float(rows(out)[0]["elapsed_ms"]) >= 0


@pytest.mark.parametrize(
    "dist, expected",
    [("0.5,0.5", LN2), ("1,0", 0.0), ("0.75,0.25", 0.5623351446188083)],
)
def test_quantum(capsys, dist, expected):
    code, out, _ = run(capsys, "quantum", "--bit-distribution", dist, "--format", "json", "--samples", "10")
    assert code == 0
    doc = json.loads(out)
    swap, ctrl = doc["demos"]
    assert swap["delta_env_nats"] == pytest.approx(expected, abs=1e-9)
    assert ctrl["mutual_information_nats"] == pytest.approx(expected, abs=1e-9)
    assert set(swap) == {
        "name", "s_initial_nats", "s_system_final_nats", "s_env_final_nats",
        "delta_env_nats", "mutual_information_nats", "seed",
    }
    assert all(doc["checks"].values())


def test_quantum_bad_distribution(capsys):
    code, _, _ = run(capsys, "quantum", "--bit-distribution", "0.7,0.7")
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["quantum", "--bit-distribution", "half"])
    assert info.value.code == 2


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--system-dims", "1,2,3", "--ensemble-sizes", "1")
    assert code == 0
    deltas = [float(r["delta_nats"]) for r in rows(out)]
    assert deltas == pytest.approx([0.0, LN2, math.log(3)], abs=1e-12)


def test_sweep_empty(capsys):
    code, out, _ = run(capsys, "sweep", "--system-dims", "")
    assert code == 0
    assert out == "M,T,N,assignments,min_union,delta_nats,delta_bits,independent,disjoint,elapsed_ms\n"


def test_sweep_mixed_refusal(capsys):
    code, out, err = run(capsys, "sweep", "--system-dims", "1,2,3", "--budget", "100")
    assert code == 3
    assert len(rows(out)) == 2
    assert "M=3 T=2 N=1" in err


def test_sweep_explicit_trits(capsys):
    code, out, _ = run(capsys, "sweep", "--system-dims", "2", "--trits-values", "1,2", "--ensemble-sizes", "1")
    assert code == 0
    assert [r["T"] for r in rows(out)] == ["1", "2"]


def test_outputs_parse_back_losslessly(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.json"
    assert main(["oracle", "--system-dim", "3", "--trits", "2", "--format", "csv", "--out", str(a)]) == 0
    assert main(["oracle", "--system-dim", "3", "--trits", "2", "--format", "json", "--out", str(b)]) == 0
    r = rows(a.read_text())[0]
    j = json.loads(b.read_text())[0]
    assert float(r["delta_nats"]) == j["delta_nats"] == math.log(3)
    assert int(r["assignments"]) == j["assignments"] == 504


def test_workers_do_not_change_bytes(tmp_path):
    outs = []
    for w in ("1", "4"):
        p = tmp_path / f"w{w}.csv"
        assert main(["oracle", "--trits", "2", "--ensemble-size", "2", "--workers", w, "--format", "csv", "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
