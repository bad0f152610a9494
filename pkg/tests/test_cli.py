import orjson
import pytest

from certify import (
    EXIT_FUCHSIAN,
    EXIT_MALFORMED,
    EXIT_NON_HYPERBOLIC,
    EXIT_OK,
    EXIT_OPEN,
    EXIT_PRECONDITION,
    EXIT_SEARCH,
    EXIT_VERIFY,
    main,
    read_batch,
)

KLEIN = {
    "degree": 4,
    "generators": [[2, 1, 4, 3], [3, 4, 1, 2], [4, 3, 2, 1]],
    "roles": ["C0", "C1", "C2"],
    "declared_links": [2, 2, 2],
}
S4 = {
    "degree": 4,
    "generators": [[2, 1, 4, 3], [2, 1, 3, 4], [1, 3, 2, 4]],
    "roles": ["C0", "C1", "C2"],
    "declared_links": [2, 3, 4],
}
S3 = {
    "degree": 3,
    "generators": [[2, 1, 3], [1, 3, 2], [3, 2, 1]],
    "roles": ["C0", "C1", "C2"],
    "declared_links": [3, 3, 3],
}


def output(capsys):
    return orjson.loads(capsys.readouterr().out)


def group_file(tmp_path, record, name="group.json"):
    path = tmp_path / name
    path.write_bytes(orjson.dumps(record))
    return str(path)


@pytest.mark.parametrize(
    "text, code, status",
    [
        ("(0;+;[2,2];{(5)})", EXIT_OK, "certified"),
        ("(0;+;[2,3,7];{-})", EXIT_FUCHSIAN, "fuchsian"),
        ("(0;+;[2];{(5)})", EXIT_NON_HYPERBOLIC, "non_hyperbolic"),
        ("(0;+;[3,3];{(2)})", EXIT_OPEN, "open_table2"),
        ("(0;+;[2,;{-})", EXIT_MALFORMED, "malformed"),
        ("(0;+;[1];{-})", EXIT_MALFORMED, "malformed"),
    ],
)
def test_certify_exit_codes(capsys, text, code, status):
    assert main(["certify", text]) == code
    assert output(capsys)["status"] == status


def test_certify_reports_parse_stage(capsys):
    main(["certify", "(0;*;[-];{-})"])
    error = output(capsys)["error"]
    assert error["stage"] == "parse" and error["error"] == "SignatureSyntaxError"


def test_search_failure(capsys):
    assert main(["--max-degree", "4", "certify", "(1;-;[2,3,7];{-})"]) == EXIT_SEARCH
    assert output(capsys)["error"]["error"] == "SearchExhausted"


def test_both_conventions(capsys):
    assert main(["--both-conventions", "certify", "(0;+;[-];{(2,3,2)})"]) == EXIT_NON_HYPERBOLIC
    assert output(capsys)["bordered_kernel"] == {"cyclic": True, "linear": False}


def test_text_format(capsys):
    assert main(["--format", "text", "certify", "(2;+;[-];{-})"]) == EXIT_FUCHSIAN
    assert "status: fuchsian" in capsys.readouterr().out


def test_certify_then_verify(capsys, tmp_path):
    path = tmp_path / "cert.json"
    assert main(["certify", "(1;+;[4];{(2)})", "--out", str(path)]) == EXIT_OK
    capsys.readouterr()
    assert main(["verify", str(path)]) == EXIT_OK
    assert output(capsys)["verified"] is True

    data = orjson.loads(path.read_bytes())
    data["image_order"] += 1
    path.write_bytes(orjson.dumps(data))
    assert main(["verify", str(path)]) == EXIT_VERIFY
    assert output(capsys)["failures"] == ["image_order"]

    path.write_text("{}")
    assert main(["verify", str(path)]) == EXIT_MALFORMED


def test_orientable_certify(capsys):
    assert main(["certify", "--orientable", "(1;+;[4];{(2)})"]) == EXIT_OK
    assert output(capsys)["certificate"]["kind"] == "orientable"


def test_certify_from_group(capsys, tmp_path):
    path = group_file(tmp_path, KLEIN)
    assert main(["certify", "(0;+;[-];{(2,2,2)})", "--group", path]) == EXIT_OK
    assert output(capsys)["certificate"]["recipe"] == "5.1/odd-word"
    assert main(["certify", "(0;+;[-];{(2,2,3)})", "--group", path]) == EXIT_PRECONDITION


def test_read_batch_skips_comments(tmp_path):
    path = tmp_path / "rows.txt"
    path.write_text("# header\n(2;+;[-];{-})  # fuchsian\n\n(0;+;[3,3];{(2)})\n")
    assert read_batch(path) == ["(2;+;[-];{-})", "(0;+;[3,3];{(2)})"]


def test_batch_inline(capsys, tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text("(0;+;[2,2];{(5)})\n(2;+;[-];{-})\n(0;+;[3,3];{(2)})\n(0;+;[x];{-})\n")
    out = tmp_path / "report.json"
    assert main(["batch", str(rows), "--workers", "0", "--out", str(out)]) == EXIT_OK
    report = output(capsys)
    assert [r["status"] for r in report["rows"]] == ["certified", "fuchsian", "open_table2", "malformed"]
    assert report["rows"][0]["recipe"] == "T1/2" and report["rows"][0]["index"] == 10
    assert report["counts"] == {"certified": 1, "fuchsian": 1, "open_table2": 1, "malformed": 1}
    assert orjson.loads(out.read_bytes()) == report


def test_batch_rows_are_reproducible(capsys, tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text("(0;+;[2,3];{(-)})\n(1;-;[2,3];{-})\n")
    main(["--seed", "5", "batch", str(rows), "--workers", "0"])
    first = output(capsys)["rows"]
    main(["--seed", "5", "batch", str(rows), "--workers", "0"])
    second = output(capsys)["rows"]
    strip = lambda rs: [{k: v for k, v in r.items() if k != "seconds"} for r in rs]
    assert strip(first) == strip(second)


@pytest.mark.parametrize(
    "record, mode, code, key, value",
    [
        (S4, "prop51", EXIT_OK, "holds", True),
        (S3, "prop51", EXIT_OK, "holds", False),
        (KLEIN, "cor52", EXIT_OK, "holds", True),
        (S3, "cor52", EXIT_OK, "holds", False),
        (S4, "hemi", EXIT_OK, "certificate_verified", True),
        (S3, "hemi", EXIT_PRECONDITION, "mode", "hemi"),
        (S4, "perfect", EXIT_PRECONDITION, "mode", "perfect"),
    ],
)
def test_check_group(capsys, tmp_path, record, mode, code, key, value):
    path = group_file(tmp_path, record)
    assert main(["check-group", path, "--mode", mode]) == code
    assert output(capsys)[key] == value


def test_check_group_malformed(capsys, tmp_path):
    path = group_file(tmp_path, dict(S4, declared_links=[2, 3, 5]))
    assert main(["check-group", path, "--mode", "prop51"]) == EXIT_MALFORMED
    assert output(capsys)["problems"] == ["declared_links[2]: order(C2 C0) is 4, declared 5"]


def test_config_file(capsys, tmp_path):
    config = tmp_path / "fenchel.yaml"
    config.write_text("format: text\n")
    assert main(["--config", str(config), "certify", "(2;+;[-];{-})"]) == EXIT_FUCHSIAN
    assert "status: fuchsian" in capsys.readouterr().out


@pytest.mark.slow
def test_tables(capsys):
    assert main(["tables"]) == EXIT_OK
    report = output(capsys)
    assert report["table1_rows_certified"] == 10
    assert report["table2_rows_open"] == 8
