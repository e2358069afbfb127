import io
import json

import pytest

from searn.cli import main
from searn.io import evaluate, read_conll


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    paths = {k: d / f"{k}.conll" for k in ("train", "test", "pred")}
    assert run("generate", "--kind", "noisy_history", "--n", 60, "--seed", 1, "--out", paths["train"])[0] == 0
    assert run("generate", "--kind", "noisy_history", "--n", 30, "--seed", 2, "--out", paths["test"])[0] == 0
    paths["model"] = d / "m.model"
    paths["log"] = d / "train.log"
    code, _ = run("train", "--train", paths["train"], "--iterations", 3, "--beta", 0.5, "--seed", 5,
                  "--hash-bits", 16, "--log", paths["log"], "--out", paths["model"])
    assert code == 0
    assert run("predict", "--model", paths["model"], "--in", paths["test"], "--out", paths["pred"])[0] == 0
    return paths


def test_pipeline_eval_matches_in_process(pipeline):
    code, text = run("eval", "--gold", pipeline["test"], "--pred", pipeline["pred"], "--loss", "hamming")
    assert code == 0
    rep = json.loads(text)
    expected = evaluate(read_conll(pipeline["test"]), read_conll(pipeline["pred"]), "hamming")
    assert rep["value"] == expected.value and rep["count"] == 30


def test_train_is_deterministic(pipeline, tmp_path):
    other = tmp_path / "again.model"
    run("train", "--train", pipeline["train"], "--iterations", 3, "--beta", 0.5, "--seed", 5,
        "--hash-bits", 16, "--out", other)
    strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("timestamp ")]
    assert strip(other) == strip(pipeline["model"])
    pred2 = tmp_path / "pred2.conll"
    run("predict", "--model", other, "--in", pipeline["test"], "--out", pred2)
    assert pred2.read_bytes() == pipeline["pred"].read_bytes()


def test_predict_unlabeled_input(pipeline, tmp_path):
    words = tmp_path / "words.conll"
    words.write_text("\n\n".join("\n".join(l.split()[0] for l in block.splitlines())
                                 for block in pipeline["test"].read_text().strip().split("\n\n")) + "\n")
    out = tmp_path / "p.conll"
    assert run("predict", "--model", pipeline["model"], "--in", words, "--out", out)[0] == 0
    assert out.read_bytes() == pipeline["pred"].read_bytes()


def test_bound_report(pipeline):
    code, text = run("bound-report", "--model-log", pipeline["log"])
    assert code == 0
    rec = json.loads(text)
    assert rec["iterations"] == 3 and rec["T"] == 10 and rec["L_pi"] == 0.0
    assert rec["bound"] > 0


def test_eval_mismatch_exits_2(pipeline, tmp_path, capsys):
    short = tmp_path / "short.conll"
    short.write_text(pipeline["test"].read_text().split("\n\n")[0] + "\n")
    code, _ = run("eval", "--gold", pipeline["test"], "--pred", short, "--loss", "hamming")
    assert code == 2
    assert "gold sentences" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path):
    assert run("eval", "--gold", tmp_path / "nope", "--pred", tmp_path / "nope")[0] == 2


def test_unknown_flag_exits_1(capsys):
    assert run("train", "--bogus")[0] == 1
    assert "usage" in capsys.readouterr().err
    assert run("frobnicate")[0] == 1
    assert run("train", "--train", "x", "--beta", "7")[0] == 1


def test_chunk_with_hamming_is_usage_error(pipeline):
    code, _ = run("train", "--train", pipeline["train"], "--task", "chunk", "--loss", "hamming", "--out", "/dev/null")
    assert code == 1


def test_simulate_lowerbound():
    code, text = run("simulate-lowerbound", "--epsilon", 0.1, "--T", 10, "--trials", 100000, "--seed", 7)
    assert code == 0
    vals = dict(line.split() for line in text.splitlines())
    assert float(vals["formula_value"]) == pytest.approx(3.2147, abs=1e-4)
    assert abs(float(vals["measured_mean"]) - 3.214748) / 3.214748 < 0.05


def test_chunk_pipeline(tmp_path):
    train, model, pred = tmp_path / "c.conll", tmp_path / "c.model", tmp_path / "c.pred"
    run("generate", "--kind", "chunked", "--n", 40, "--seed", 3, "--out", train)
    code, _ = run("train", "--train", train, "--task", "chunk", "--max-phrase", 3, "--iterations", 2,
                  "--beta", 0.5, "--hash-bits", 16, "--out", model)
    assert code == 0
    assert run("predict", "--model", model, "--in", train, "--out", pred)[0] == 0
    code, text = run("eval", "--gold", train, "--pred", pred, "--loss", "f1")
    assert code == 0 and 0.0 <= json.loads(text)["f1"] <= 1.0


def test_beam_pipeline(tmp_path):
    train, model, pred = tmp_path / "b.conll", tmp_path / "b.model", tmp_path / "b.pred"
    run("generate", "--kind", "separable_sequence", "--n", 20, "--length", 4, "--seed", 3, "--out", train)
    code, _ = run("train", "--train", train, "--beam", 2, "--iterations", 1, "--beta", 1, "--hash-bits", 16,
                  "--out", model)
    assert code == 0
    assert run("predict", "--model", model, "--in", train, "--out", pred)[0] == 0
    assert len(read_conll(pred)) == 20


def test_f1_defaults_to_chunk_encoding(tmp_path):
    from searn.io import load_model

    train, model = tmp_path / "c.conll", tmp_path / "c.model"
    run("generate", "--kind", "chunked", "--n", 10, "--seed", 3, "--out", train)
    assert run("train", "--train", train, "--loss", "f1", "--iterations", 1, "--beta", 1, "--hash-bits", 16,
               "--out", model)[0] == 0
    assert load_model(model).task.kind == "chunk"
