"""Command-line interface: outputs, exit codes, determinism."""

import json

import pytest

from zinbiel5.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# single-shot computations
# ---------------------------------------------------------------------------


def test_h2_table_example(capsys):
    code, out, _ = run(capsys, "h2", "--algebra", "N_01")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "dim H2 = 9"
    assert sum(1 for ln in lines if ln.startswith("  [")) == 9


def test_identity_on_zero_algebra(capsys):
    code, out, _ = run(
        capsys, "identity", "--algebra", "zero", "--dim", "5", "--id", "zinbiel"
    )
    assert code == 0
    assert "pass" in out


def test_identity_failure_produces_witness_and_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "entries": [[1, 1, 1, "1"]]}))
    code, out, _ = run(capsys, "identity", "--file", str(bad))
    assert code == 1
    assert "fail" in out and "witness" in out


def test_ann_lists_basis(capsys):
    code, out, _ = run(capsys, "ann", "--algebra", "Z_25")
    assert code == 0
    assert out.splitlines()[0] == "dim Ann = 2"
    assert "e3+e4" in out and "e5" in out


def test_powers_on_symmetric_example(capsys):
    code, out, _ = run(capsys, "powers", "--algebra", "S_6")
    assert code == 0
    assert "power dims: 6 4 1 0" in out
    assert "nilpotent of index 3" in out


def test_der_orbit(capsys):
    code, out, _ = run(capsys, "der", "--algebra", "Z_22")
    assert code == 0
    assert "dim Der = 3" in out and "orbit dim = 22" in out


def test_fingerprint_json_fields(capsys):
    code, out, _ = run(
        capsys, "fingerprint", "--algebra", "Z_02^3", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["algebra"] == "Z_02^{a=3}"
    assert payload["verdict"] == "pass"
    assert set(payload) >= {"power_dims", "ann_dim", "der_dim", "z2_dim", "h2_dim"}


# ---------------------------------------------------------------------------
# extensions and basis changes
# ---------------------------------------------------------------------------


def test_extend_catalog_child(capsys):
    code, out, _ = run(capsys, "extend", "--child", "Z_24")
    assert code == 0
    assert "matches catalog constants: True" in out


def test_extend_family_child_requires_binding(capsys):
    code, _, err = run(capsys, "extend", "--child", "Z_30")
    assert code == 2
    assert "bind" in err


def test_extend_family_child_at_value(capsys):
    code, out, _ = run(capsys, "extend", "--child", "Z_30^2")
    assert code == 0
    assert "matches catalog constants: True" in out


def test_extend_explicit_cocycle(capsys, tmp_path):
    coc = tmp_path / "cocycle.json"
    coc.write_text(json.dumps({"components": [[[1, 2, "1"], [2, 1, "2"]]]}))
    code, out, _ = run(
        capsys, "extend", "--algebra", "zero", "--dim", "2", "--file", str(coc)
    )
    assert code == 0
    assert "e1 e2 = e3" in out and "e2 e1 = 2*e3" in out


def test_act_permutation(capsys, tmp_path):
    mat = tmp_path / "p.json"
    mat.write_text(
        json.dumps(
            [
                ["0", "1", "0", "0", "0"],
                ["1", "0", "0", "0", "0"],
                ["0", "0", "1", "0", "0"],
                ["0", "0", "0", "1", "0"],
                ["0", "0", "0", "0", "1"],
            ]
        )
    )
    code, out, _ = run(capsys, "act", "--algebra", "Z_01", "--matrix", str(mat))
    assert code == 0
    assert "det" in out


def test_act_rejects_singular_matrix(capsys, tmp_path):
    mat = tmp_path / "s.json"
    mat.write_text(json.dumps([["1", "1"], ["1", "1"]]))
    code, _, err = run(capsys, "act", "--algebra", "zero^2", "--matrix", str(mat))
    assert code == 2
    assert "singular" in err


# ---------------------------------------------------------------------------
# degeneration certificates
# ---------------------------------------------------------------------------


CERT = {
    "source": "Z_27",
    "target": "Z_28",
    "basis": [
        ["0", "1", "0", "0", "0"],
        ["t", "0", "1", "0", "0"],
        ["0", "0", "0", "t", "-1"],
        ["0", "0", "t", "0", "0"],
        ["0", "0", "0", "0", "-t"],
    ],
}


def test_degenerate_cert_file_verifies_exactly(capsys, tmp_path):
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(CERT))
    code, out, _ = run(capsys, "degenerate", "--cert", str(path))
    assert code == 0
    assert "verified (exact)" in out


def test_degenerate_numeric_mode(capsys, tmp_path):
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(CERT))
    code, out, _ = run(
        capsys, "degenerate", "--cert", str(path), "--mode", "numeric",
        "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "verified"
    assert payload["mode"] == "numeric"


def test_degenerate_catalog_label(capsys):
    code, out, _ = run(capsys, "degenerate", "--label", "Z_14 -> Z_10")
    assert code == 0
    assert "verified" in out


def test_degenerate_wrong_basis_fails_with_exit_1(capsys, tmp_path):
    path = tmp_path / "cert.json"
    wrong = dict(CERT, basis={"diag": ["t", "t", "t^2", "t^2", "t^3"]})
    path.write_text(json.dumps(wrong))
    code, out, _ = run(capsys, "degenerate", "--cert", str(path))
    assert code == 1
    assert "failed" in out and "mismatch" in out


# ---------------------------------------------------------------------------
# constraint sets
# ---------------------------------------------------------------------------


def test_rset_membership_and_separation(capsys, tmp_path):
    rset = tmp_path / "rset.json"
    rset.write_text(json.dumps({"containments": [[1, 1, 3], [3, 1, 6]]}))
    code, out, _ = run(capsys, "rset", "--algebra", "Z_27", "--file", str(rset))
    assert code == 0 and "inside" in out
    code, out, _ = run(capsys, "rset", "--algebra", "Z_34", "--file", str(rset))
    assert code == 1 and "outside" in out and "violated" in out


def test_rset_catalog_row(capsys):
    code, out, _ = run(capsys, "rset", "--row", "Z_14")
    assert code == 0
    assert "pass" in out


# ---------------------------------------------------------------------------
# catalog subcommands
# ---------------------------------------------------------------------------


def test_catalog_list_filters(capsys):
    code, out, _ = run(capsys, "catalog", "list", "--tags", "theoremA,family")
    assert code == 0
    assert out.split() == ["Z_02", "Z_10", "Z_14", "Z_30", "[N1C]^2_02", "[N1C]^2_09"]


def test_catalog_get_instantiates_parameters(capsys):
    code, out, _ = run(capsys, "catalog", "get", "--algebra", "Z_02^3")
    assert code == 0
    assert "Z_02^{a=3}" in out


def test_catalog_verify_all_subset(capsys):
    code, out, _ = run(
        capsys, "catalog", "verify-all", "--checks", "squares,identity"
    )
    assert code == 0
    assert "[PASS] identity" in out and "[PASS] squares" in out


# ---------------------------------------------------------------------------
# contracts: determinism and exit codes
# ---------------------------------------------------------------------------


def test_json_output_byte_identical(capsys):
    _, first, _ = run(capsys, "h2", "--algebra", "N_08^2", "--format", "json")
    _, second, _ = run(capsys, "h2", "--algebra", "N_08^2", "--format", "json")
    assert first == second
    _, tf, _ = run(
        capsys, "catalog", "verify-all", "--checks", "squares", "--format", "json"
    )
    _, ts, _ = run(
        capsys, "catalog", "verify-all", "--checks", "squares", "--format", "json"
    )
    assert tf == ts


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "ann", "--algebra", "Z_99")[0] == 2
    assert run(capsys, "ann")[0] == 2
    assert run(capsys, "identity", "--algebra", "Z_01", "--dim", "4")[0] == 2
    assert run(capsys, "degenerate", "--label", "nope -> nope")[0] == 2


def test_data_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert run(capsys, "degenerate", "--cert", str(bad))[0] == 2
    missing = tmp_path / "missing.json"
    assert run(capsys, "degenerate", "--cert", str(missing))[0] == 2


def test_excluded_family_value_exits_2(capsys):
    code, _, err = run(capsys, "catalog", "get", "--algebra", "Z_30^-1")
    assert code == 2
    assert "a" in err
