import json

import numpy as np
import pandas
import pytest

from conftest import writeText
from localityPDL.experiments import trainAndScore
from localityPDL.labeledDataset import loadCSV, splitDataset
from localityPDL.lcpdlCLI import main, parseFixed, parseGrid, parseRange
from localityPDL.lcpdlParams import lcpdlParams
from localityPDL.modelIO import loadModel

QUICK = ["--atoms-per-class", "2", "--max-iters", "3"]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Blob data and a trained model shared by the CLI tests"""
    d = tmp_path_factory.mktemp("cli")
    data = str(d / "blobs.csv")
    model = str(d / "m.json")
    trace = str(d / "t.json")
    assert main(
        ["synth", "--classes", "3", "--dim", "6", "--per-class", "8", "--sep", "8",
         "--seed", "2", "--out", data]
    ) == 0
    assert main(
        ["train", "--data", data, "--out", model, "--trace", trace, "--seed", "2",
         "--preset", "cbcl"] + QUICK
    ) == 0
    return {"dir": d, "data": data, "model": model, "trace": trace}


class TestSynth:
    def test_deterministic(self, tmp_path):
        args = ["synth", "--classes", "2", "--dim", "4", "--per-class", "5", "--seed", "1"]
        assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
        assert main(args + ["--out", str(tmp_path / "b.csv")]) == 0
        assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()

    def test_zero_noise_equals_clean(self, tmp_path):
        args = ["synth", "--classes", "2", "--dim", "4", "--per-class", "5", "--seed", "1"]
        assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
        assert main(args + ["--out", str(tmp_path / "b.csv"), "--noise-var", "0"]) == 0
        assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()

    def test_noise_changes_data(self, tmp_path):
        args = ["synth", "--classes", "2", "--dim", "4", "--per-class", "5", "--seed", "1"]
        assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
        assert main(args + ["--out", str(tmp_path / "b.csv"), "--noise-var", "1"]) == 0
        assert (tmp_path / "a.csv").read_text() != (tmp_path / "b.csv").read_text()

    def test_invalid_dims(self, tmp_path, capsys):
        code = main(
            ["synth", "--classes", "5", "--dim", "3", "--per-class", "4",
             "--out", str(tmp_path / "x.csv")]
        )
        assert code == 2
        assert "n >= c" in capsys.readouterr().err


class TestTrain:
    def test_outputs(self, workspace, capsys):
        model = loadModel(workspace["model"])
        assert (model.n, model.c, model.k) == (6, 3, 2)
        assert model.params.tau == 0.01 and model.params.seed == 2
        with open(workspace["trace"]) as f:
            rows = json.load(f)
        assert 1 <= len(rows) <= 3

    def test_summary_printed(self, workspace, tmp_path, capsys):
        out = str(tmp_path / "m.json")
        assert main(["train", "--data", workspace["data"], "--out", out] + QUICK) == 0
        printed = capsys.readouterr().out
        assert "final J" in printed
        assert "iterations" in printed
        assert "wall time" in printed

    def test_missing_data_flag(self, tmp_path, capsys):
        assert main(["train", "--out", str(tmp_path / "m.json")]) == 2
        assert "usage" in capsys.readouterr().err

    def test_negative_tau(self, workspace, tmp_path, capsys):
        code = main(
            ["train", "--data", workspace["data"], "--out", str(tmp_path / "m.json"),
             "--tau", "-1"]
        )
        assert code == 2
        assert "tau must be >= 0" in capsys.readouterr().err
        assert not (tmp_path / "m.json").exists()

    def test_unknown_flag(self, workspace, tmp_path):
        code = main(
            ["train", "--data", workspace["data"], "--out", str(tmp_path / "m.json"),
             "--gamma", "1"]
        )
        assert code == 2

    def test_bad_data(self, tmp_path):
        data = writeText(tmp_path / "bad.csv", "0,1,2\n1,x,3\n")
        assert main(["train", "--data", data, "--out", str(tmp_path / "m.json")]) == 2

    def test_flags_override_params_file(self, workspace, tmp_path):
        pfile = tmp_path / "p.json"
        pfile.write_text(json.dumps({"tau": 0.5, "alpha": 0.3, "admm": {"rho": 2.0}}))
        out = str(tmp_path / "m.json")
        code = main(
            ["train", "--data", workspace["data"], "--out", out, "--params", str(pfile),
             "--preset", "caltech256", "--tau", "0.2"] + QUICK
        )
        assert code == 0
        params = loadModel(out).params
        assert params.tau == 0.2
        assert params.alpha == 0.3
        assert params.beta == 1e-4
        assert params.admm.rho == 2.0

    @pytest.mark.parametrize(
        "content, field",
        [
            ({"admm": {"rhoo": 2.0}}, "rhoo"),
            ({"admm": {"rho": None}}, "admm"),
            ({"admm": 5}, "admm"),
            ({"tau": None}, "tau"),
            ({"relTol": "small"}, "relTol"),
            ([0.1, 0.2], "expected a JSON object"),
        ],
    )
    def test_malformed_params_file(self, workspace, tmp_path, capsys, content, field):
        pfile = tmp_path / "p.json"
        pfile.write_text(json.dumps(content))
        out = tmp_path / "m.json"
        code = main(
            ["train", "--data", workspace["data"], "--out", str(out), "--params",
             str(pfile)] + QUICK
        )
        assert code == 2
        assert field in capsys.readouterr().err
        assert not out.exists()

    def test_same_flags_same_model(self, workspace, tmp_path):
        out = str(tmp_path / "m.json")
        assert main(
            ["train", "--data", workspace["data"], "--out", out, "--seed", "2",
             "--preset", "cbcl"] + QUICK
        ) == 0
        with open(out) as a, open(workspace["model"]) as b:
            assert a.read() == b.read()


class TestPredict:
    def test_rows_match_library(self, workspace, tmp_path):
        out = str(tmp_path / "pred.csv")
        code = main(
            ["predict", "--model", workspace["model"], "--data", workspace["data"],
             "--out", out]
        )
        assert code == 0
        ds = loadCSV(workspace["data"])
        model = loadModel(workspace["model"])
        soft, labels = model.predict(ds.features)

        df = pandas.read_csv(out, header=None, float_precision="round_trip")
        assert df.shape == (ds.N, 1 + model.c)
        np.testing.assert_array_equal(df[0].to_numpy(), model.labelMap[labels])
        np.testing.assert_array_equal(df.iloc[:, 1:].to_numpy().T, soft)

    def test_unlabeled_input(self, workspace, tmp_path):
        ds = loadCSV(workspace["data"])
        data = str(tmp_path / "x.csv")
        pandas.DataFrame(ds.features.T).to_csv(
            data, header=False, index=False, float_format="%.17g"
        )
        out = str(tmp_path / "pred.csv")
        code = main(
            ["predict", "--model", workspace["model"], "--data", data, "--out", out,
             "--unlabeled"]
        )
        assert code == 0
        assert pandas.read_csv(out, header=None).shape[0] == ds.N

    def test_normalize_flag_rescales_samples(self, workspace, tmp_path):
        ds = loadCSV(workspace["data"])
        data = str(tmp_path / "x.csv")
        pandas.DataFrame(3.0 * ds.features.T).to_csv(
            data, header=False, index=False, float_format="%.17g"
        )
        out = str(tmp_path / "pred.csv")
        code = main(
            ["predict", "--model", workspace["model"], "--data", data, "--out", out,
             "--unlabeled", "--normalize"]
        )
        assert code == 0
        soft, _ = loadModel(workspace["model"]).predict(ds.features)
        df = pandas.read_csv(out, header=None, float_precision="round_trip")
        np.testing.assert_allclose(df.iloc[:, 1:].to_numpy().T, soft, rtol=1e-10, atol=1e-12)

    def test_unreadable_model(self, workspace, tmp_path):
        code = main(
            ["predict", "--model", str(tmp_path / "none.json"), "--data",
             workspace["data"], "--out", str(tmp_path / "p.csv")]
        )
        assert code == 1

    def test_tampered_solver_settings(self, workspace, tmp_path, capsys):
        with open(workspace["model"]) as f:
            doc = json.load(f)
        doc["hyperparams"]["admm"] = 5
        model = writeText(tmp_path / "m.json", json.dumps(doc))
        code = main(
            ["predict", "--model", model, "--data", workspace["data"], "--out",
             str(tmp_path / "p.csv")]
        )
        assert code == 1
        assert "hyperparams: admm" in capsys.readouterr().err

    def test_dimension_mismatch(self, workspace, tmp_path):
        data = writeText(tmp_path / "d.csv", "0,1,2\n1,2,3\n")
        code = main(
            ["predict", "--model", workspace["model"], "--data", data, "--out",
             str(tmp_path / "p.csv")]
        )
        assert code == 1


class TestEval:
    def test_accuracy_matches_library(self, workspace, tmp_path, capsys):
        out = str(tmp_path / "e.json")
        code = main(
            ["eval", "--model", workspace["model"], "--data", workspace["data"],
             "--json", out]
        )
        assert code == 0
        accuracy, confusion = loadModel(workspace["model"]).evaluate(
            loadCSV(workspace["data"])
        )
        assert f"accuracy {accuracy:.4f}" in capsys.readouterr().out
        with open(out) as f:
            doc = json.load(f)
        assert doc["accuracy"] == accuracy
        assert doc["confusion"] == confusion.tolist()

    def test_empty_data(self, workspace, tmp_path):
        data = writeText(tmp_path / "empty.csv", "")
        code = main(["eval", "--model", workspace["model"], "--data", data])
        assert code == 2

    def test_unknown_labels(self, workspace, tmp_path):
        data = writeText(tmp_path / "d.csv", "7,1,2,3,4,5,6\n")
        assert main(["eval", "--model", workspace["model"], "--data", data]) == 1


class TestSweep:
    def test_grid_rows(self, workspace, tmp_path):
        out = str(tmp_path / "s.json")
        code = main(
            ["sweep", "--data", workspace["data"], "--fix", "tau=0.01", "--grid",
             "alpha,beta", "--range", "0.01:1", "--steps", "2", "--seed", "3",
             "--out", out] + QUICK
        )
        assert code == 0
        with open(out) as f:
            rows = json.load(f)
        assert len(rows) == 4
        assert rows[1]["params"] == {"tau": 0.01, "alpha": 0.01, "beta": 1.0}

    def test_all_fixed_matches_single_run(self, workspace, tmp_path):
        out = str(tmp_path / "s.json")
        code = main(
            ["sweep", "--data", workspace["data"], "--fix",
             "tau=0.01,alpha=0.01,beta=0.1", "--seed", "3", "--out", out] + QUICK
        )
        assert code == 0
        with open(out) as f:
            rows = json.load(f)
        assert len(rows) == 1

        train, test = splitDataset(loadCSV(workspace["data"]), seed=3)
        params = lcpdlParams(k=2, maxOuter=3, seed=3)
        assert rows[0]["accuracy"] == trainAndScore(train, test, params)

    def test_repeats_average_splits(self, workspace, tmp_path):
        out = str(tmp_path / "s.json")
        code = main(
            ["sweep", "--data", workspace["data"], "--fix",
             "tau=0.01,alpha=0.01,beta=0.1", "--seed", "3", "--repeats", "2",
             "--out", out] + QUICK
        )
        assert code == 0
        with open(out) as f:
            rows = json.load(f)

        ds = loadCSV(workspace["data"])
        params = lcpdlParams(k=2, maxOuter=3, seed=3)
        accs = [trainAndScore(*splitDataset(ds, seed=s), params) for s in (3, 4)]
        assert rows[0]["accuracy"] == pytest.approx(np.mean(accs), abs=1e-15)
        assert rows[0]["std"] == pytest.approx(np.std(accs), abs=1e-15)

    @pytest.mark.parametrize(
        "flags",
        [
            ["--grid", "gamma"],
            ["--grid", "alpha", "--range", "1e-3"],
            ["--grid", "alpha", "--range", "5:1"],
            ["--fix", "tau"],
            ["--fix", "tau=0.1", "--grid", "tau"],
            ["--grid", "alpha", "--steps", "0"],
            ["--repeats", "0"],
        ],
    )
    def test_malformed(self, workspace, flags):
        assert main(["sweep", "--data", workspace["data"]] + flags) == 2


class TestParsers:
    def test_fixed(self):
        assert parseFixed("tau=0.1, alpha=2") == {"tau": 0.1, "alpha": 2.0}
        assert parseFixed("") == {}

    def test_grid(self):
        assert parseGrid("alpha,beta") == ["alpha", "beta"]
        with pytest.raises(ValueError):
            parseGrid("alpha,alpha")

    def test_range(self):
        assert parseRange("1e-6:1e6") == (1e-6, 1e6)
        with pytest.raises(ValueError):
            parseRange("0:1")
