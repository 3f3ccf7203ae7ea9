import json
import subprocess
import sys

import pytest

from vanetcert import certs, crypto
from vanetcert.cli import main
from vanetcert.messages import CrlAdd, encode_wire
from vanetcert.world import CA_KEY_SEED


def _ac_hex():
    ca = crypto.generate_keypair(CA_KEY_SEED)
    return certs.issue("AC", 9, ca, 20, reason=4).to_bytes().hex()


def test_cert_vc(capsys):
    assert main(["cert", "--type", "VC", "--vehicle", "42"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("type=VC vehicle=42 ")


def test_cert_ac_requires_reason(capsys):
    assert main(["cert", "--type", "AC", "--vehicle", "9"]) == 1
    assert "reason" in capsys.readouterr().err


def test_decode_vc(capsys):
    assert main(["cert", "--type", "VC", "--vehicle", "7"]) == 0
    hexline = capsys.readouterr().out.splitlines()[1]
    assert main(["decode", hexline]) == 0
    assert capsys.readouterr().out.startswith("type=VC vehicle=7 ")


def test_decode_ac_shows_reason_text(capsys):
    assert main(["decode", _ac_hex()]) == 0
    assert "Uncovering the identities of other vehicles" in capsys.readouterr().out


def test_decode_99_bytes(capsys):
    assert main(["decode", _ac_hex()[:198]]) == 1
    assert "99" in capsys.readouterr().err


def test_decode_bad_hex_offset(capsys):
    assert main(["decode", "00zz"]) == 1
    assert "offset 2" in capsys.readouterr().err


def test_decode_file_and_wire(tmp_path, capsys):
    path = tmp_path / "crl.bin"
    path.write_bytes(encode_wire(CrlAdd(9, 20, 1)))
    assert main(["decode", "--wire", str(path)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data == {"kind": "CrlAdd", "accused_id": 9, "timestamp": 20, "reason_code": 1}


def test_run_writes_outputs(tmp_path, capsys):
    config = tmp_path / "s.json"
    config.write_text(json.dumps({"vehicle_count": 10, "adversaries": [{"id": 9}], "duration": 60}))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(config), "--seed", "4", "--out", str(out_a)]) == 0
    assert main(["run", "--config", str(config), "--seed", "4", "--out", str(out_b)]) == 0
    assert (out_a / "events.jsonl").read_bytes() == (out_b / "events.jsonl").read_bytes()
    names = [line.split(",")[0] for line in (out_a / "metrics.csv").read_text().splitlines()]
    assert "time_to_isolation" in names


def test_run_missing_config(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 1


def test_run_bad_field(tmp_path, capsys):
    config = tmp_path / "s.json"
    config.write_text('{"beacon_period": 0}')
    assert main(["run", "--config", str(config), "--out", str(tmp_path)]) == 1
    assert "beacon_period" in capsys.readouterr().err


def test_compare_degenerate(tmp_path, capsys):
    config = tmp_path / "s.json"
    config.write_text('{"vehicle_count": 4, "duration": 20}')
    assert main(["compare", "--config", str(config), "--crl-size", "0", "--out", str(tmp_path)]) == 0
    assert "degenerate" in capsys.readouterr().out
    assert (tmp_path / "comparison.csv").exists()


@pytest.mark.parametrize("argv", [
    ["compare", "--crl-size", "-1"],
    ["run", "--bogus"],
    ["cert", "--type", "XX", "--vehicle", "1"],
    [],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.strip().endswith("checks passed")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "vanetcert.cli", "cert", "--type", "Identity", "--vehicle", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("type=Identity vehicle=3 ")
