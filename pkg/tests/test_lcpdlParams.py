import json

import pytest

from localityPDL.dictionaryADMM import admmConfig
from localityPDL.lcpdlParams import PRESETS, lcpdlParams


class TestPresets:
    @pytest.mark.parametrize(
        "name, tau, alpha, beta",
        [
            ("cbcl", 0.01, 0.01, 0.1),
            ("ar", 0.01, 0.01, 0.1),
            ("caltech101", 0.01, 0.1, 0.1),
            ("caltech256", 0.001, 0.1, 1e-4),
        ],
    )
    def test_weights(self, name, tau, alpha, beta):
        p = lcpdlParams.fromPreset(name)
        assert (p.tau, p.alpha, p.beta) == (tau, alpha, beta)

    def test_overrides_win(self):
        p = lcpdlParams.fromPreset("ar", k=3, seed=9)
        assert p.k == 3 and p.seed == 9
        assert lcpdlParams.fromPreset("ar").k == 5

    def test_unknown_preset(self):
        with pytest.raises(AssertionError, match="unknown preset"):
            lcpdlParams.fromPreset("mnist")

    def test_all_presets_valid(self):
        for name in PRESETS:
            lcpdlParams.fromPreset(name).validate()


class TestValidation:
    @pytest.mark.parametrize(
        "kw, msg",
        [
            ({"tau": -1}, "tau must be >= 0"),
            ({"alpha": -0.1}, "alpha must be >= 0"),
            ({"beta": -2}, "beta must be >= 0"),
            ({"k": 0}, "k"),
            ({"maxOuter": 0}, "maxOuter"),
            ({"relTol": 0}, "relTol"),
            ({"ridge": -1e-3}, "ridge"),
            ({"initMode": "zeros"}, "initMode"),
            ({"qMode": "full"}, "qMode"),
            ({"admm": {"rho": -1}}, "rho"),
        ],
    )
    def test_rejected(self, kw, msg):
        with pytest.raises(AssertionError, match=msg):
            lcpdlParams(**kw)

    def test_defaults(self):
        p = lcpdlParams()
        assert (p.tau, p.alpha, p.beta, p.k) == (0.01, 0.01, 0.1, 4)
        assert p.knn is None and p.ridge is None
        assert isinstance(p.admm, admmConfig)


class TestSerialization:
    def test_dict_round_trip(self):
        p = lcpdlParams(tau=0.2, knn=2, ridge=1e-6, admm={"rho": 3.0, "adaptive": True})
        d = p.toDict()
        assert list(d) == lcpdlParams.fields
        assert d["admm"]["rho"] == 3.0
        assert lcpdlParams.fromDict(d).toDict() == d

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="gamma"):
            lcpdlParams.fromDict({"gamma": 1.0})

    def test_json_file(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"alpha": 0.5, "k": 3}))
        p = lcpdlParams.fromJSON(str(path))
        assert p.alpha == 0.5 and p.k == 3 and p.tau == 0.01

    def test_copy(self):
        p = lcpdlParams(beta=0.3)
        q = p.copy(tau=0.7)
        assert q.tau == 0.7 and q.beta == 0.3 and p.tau == 0.01


class TestMalformedValues:
    @pytest.mark.parametrize(
        "d, field",
        [
            ({"tau": None}, "tau"),
            ({"k": "four"}, "k"),
            ({"seed": [1]}, "seed"),
            ({"admm": 5}, "admm"),
            ({"admm": {"rhoo": 2.0}}, "rhoo"),
            ({"admm": {"rho": None}}, "admm"),
        ],
    )
    def test_named_value_error(self, d, field):
        with pytest.raises(ValueError, match=field):
            lcpdlParams.fromDict(d)

    def test_not_an_object(self):
        with pytest.raises(ValueError, match="expected an object"):
            lcpdlParams.fromDict([0.1, 0.2])

    def test_config_object_accepted(self):
        cfg = admmConfig(rho=4.0)
        assert lcpdlParams(admm=cfg).admm is cfg
