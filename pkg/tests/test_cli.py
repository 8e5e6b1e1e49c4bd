import json

import pytest

from pairlab.cli import format_pair, main, parse_matrix_file, parse_pair_file, write_matrix_file
from pairlab.construction import BasePair, build_P0
from pairlab.linalg import Mat, MatrixFormatError
from pairlab.pairs import MatPair

from conftest import jordan, rand_mat


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write_pair(path, P):
    path.write_text(format_pair(P))
    return path


def test_matrix_file_round_trip(tmp_path, rng):
    A = rand_mat(rng, 3, 101, 4)
    f = tmp_path / "a.txt"
    write_matrix_file(A, f)
    assert parse_matrix_file(f) == A
    f.write_text("2 2 5\n1 2\n3 7\n")
    with pytest.raises(MatrixFormatError):
        parse_matrix_file(f)
    f.write_text("1 1 6\n1\n")
    with pytest.raises(MatrixFormatError):
        parse_matrix_file(f)


def test_pair_file_round_trip(tmp_path, rng):
    P = MatPair(rand_mat(rng, 2, 7), rand_mat(rng, 2, 7))
    assert parse_pair_file(write_pair(tmp_path / "p.txt", P)) == P


def test_build_and_check_p0(tmp_path, capsys):
    one = Mat([[1]], 2)
    f = tmp_path / "MN.txt"
    write_pair(f, MatPair(one, one))
    out_file = tmp_path / "p0.txt"
    code, _, _ = run(["build-p0", f, "--out", out_file], capsys)
    assert code == 0
    assert parse_pair_file(out_file) == build_P0(BasePair(one, one)).pair
    code, out, _ = run(["check-n23", out_file], capsys)
    assert code == 0
    code, _, _ = run(["check-n23", f], capsys)  # (1, 1) is not nilpotent
    assert code == 1


def test_similar_exit_codes(tmp_path, capsys):
    J, Z = jordan(2, 3), Mat.zeros(2, 2, 3)
    a = write_pair(tmp_path / "a.txt", MatPair(J, Z))
    b = write_pair(tmp_path / "b.txt", MatPair(Z, J))
    code, out, _ = run(["similar", a, b, "--json"], capsys)
    assert code == 1
    rec = json.loads(out.strip().splitlines()[-1])
    assert rec["schema"] == 1 and rec["command"] == "similar"
    code, _, _ = run(["similar", a, a], capsys)
    assert code == 0


def test_poly_similar_swap(tmp_path, capsys):
    # (J, 0) and (0, J) are not polynomially similar: f has no y term
    J, Z = jordan(2, 3), Mat.zeros(2, 2, 3)
    a = write_pair(tmp_path / "a.txt", MatPair(J, Z))
    b = write_pair(tmp_path / "b.txt", MatPair(Z, J))
    code, _, _ = run(["poly-similar", a, b], capsys)
    assert code == 1
    c = write_pair(tmp_path / "c.txt", MatPair(2 * J, J))
    code, _, _ = run(["poly-similar", a, c], capsys)
    assert code == 0


def test_verify_lemma1(capsys):
    code, out, _ = run(["verify-lemma1", "--field", 5, "--n", 1, "--trials", 100, "--seed", 0], capsys)
    assert code == 0


def test_usage_errors(tmp_path, capsys):
    assert run(["verify-lemma1", "--field", 6, "--trials", 1], capsys)[0] == 2
    assert run(["similar", tmp_path / "missing.txt", tmp_path / "missing.txt"], capsys)[0] == 2
    assert run(["no-such-command"], capsys)[0] == 2


def test_json_reports_are_reproducible(capsys):
    argv = ["verify-theorem", "--field", 2, "--n", 1, "--trials", 4, "--seed", 3, "--json"]
    code1, out1, _ = run(argv, capsys)
    code2, out2, _ = run(argv, capsys)
    assert code1 == code2 == 0
    assert out1 == out2 and out1.strip()
    for line in out1.strip().splitlines():
        assert json.loads(line)["schema"] == 1


def test_verify_e1(capsys):
    code, _, _ = run(["verify-e1", "--field", 2, "--n", 2, "--mode", "exhaustive", "--trials", 6], capsys)
    assert code == 0
