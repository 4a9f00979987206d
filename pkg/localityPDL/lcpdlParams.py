import json
from localityPDL.dictionaryADMM import admmConfig

# (tau, alpha, beta) and atoms per class of the published image experiments
PRESETS = {
    "cbcl": {"tau": 0.01, "alpha": 0.01, "beta": 0.1},
    "ar": {"tau": 0.01, "alpha": 0.01, "beta": 0.1, "k": 5},
    "caltech101": {"tau": 0.01, "alpha": 0.1, "beta": 0.1, "k": 2},
    "caltech256": {"tau": 0.001, "alpha": 0.1, "beta": 1e-4},
}

ADMM_FIELDS = list(admmConfig().toDict())


def _number(name, v, cast):
    if v is None or isinstance(v, (bool, list, dict)):
        raise ValueError(f"{name}: expected a number, got {v!r}")
    try:
        return cast(v)
    except (TypeError, ValueError):
        raise ValueError(f"{name}: expected a number, got {v!r}") from None


def _admmSettings(admm):
    if admm is None:
        return admmConfig()
    if isinstance(admm, admmConfig):
        return admm
    if not isinstance(admm, dict):
        raise ValueError(f"admm: expected an object of solver settings, got {admm!r}")
    unknown = set(admm) - set(ADMM_FIELDS)
    if unknown:
        raise ValueError(f"admm: unknown setting(s) {', '.join(sorted(unknown))}")
    try:
        return admmConfig(**admm)
    except (TypeError, ValueError) as e:
        raise ValueError(f"admm: {e}") from None


class lcpdlParams:
    """Hyperparameters of the locality-constrained projective dictionary learner

    Args:
        tau (float):
            Weight of the block-diagonal approximation term (>= 0)
        alpha (float):
            Weight of the atom locality term (>= 0)
        beta (float):
            Weight of the robust classification term (>= 0)
        k (int):
            Atoms per class. The dictionary has K = c * k atoms.
        knn (int):
            Neighbors per atom in the locality graph. None for min(5, k - 1).
        deltaMode (str):
            ``mean`` (mean pairwise atom distance per class) or ``fixed``
        delta (float):
            Kernel width used when deltaMode is ``fixed``
        admm (admmConfig or dict):
            Dictionary solver settings
        maxOuter (int):
            Outer iteration cap (>= 1)
        relTol (float):
            Relative objective change stop (> 0)
        ridge (float):
            Absolute conditioning shift for the code and projection systems.
            None for the relative defaults.
        seed (int):
            Random seed of the initialization
        initMode (str):
            ``gaussian`` (unit Frobenius norm random D, P, W) or ``samples``
            (atoms drawn from the class samples)
        qMode (str):
            ``ones`` (all-ones class blocks) or ``identity``
        epsilon (float):
            Smoothing floor of the Lambda update

    """

    fields = [
        "tau",
        "alpha",
        "beta",
        "k",
        "knn",
        "deltaMode",
        "delta",
        "admm",
        "maxOuter",
        "relTol",
        "ridge",
        "seed",
        "initMode",
        "qMode",
        "epsilon",
    ]

    def __init__(
        self,
        tau=0.01,
        alpha=0.01,
        beta=0.1,
        k=4,
        knn=None,
        deltaMode="mean",
        delta=1.0,
        admm=None,
        maxOuter=50,
        relTol=1e-4,
        ridge=None,
        seed=0,
        initMode="gaussian",
        qMode="ones",
        epsilon=1e-8,
    ):
        self.tau = _number("tau", tau, float)
        self.alpha = _number("alpha", alpha, float)
        self.beta = _number("beta", beta, float)
        self.k = _number("k", k, int)
        self.knn = None if knn is None else _number("knn", knn, int)
        self.deltaMode = deltaMode
        self.delta = _number("delta", delta, float)
        self.admm = _admmSettings(admm)
        self.maxOuter = _number("maxOuter", maxOuter, int)
        self.relTol = _number("relTol", relTol, float)
        self.ridge = None if ridge is None else _number("ridge", ridge, float)
        self.seed = _number("seed", seed, int)
        self.initMode = initMode
        self.qMode = qMode
        self.epsilon = _number("epsilon", epsilon, float)

        self.validate()

    def validate(self):
        """Check every hyperparameter invariant

        Raises AssertionError naming the first violated constraint.
        """

        assert self.tau >= 0, "tau must be >= 0"
        assert self.alpha >= 0, "alpha must be >= 0"
        assert self.beta >= 0, "beta must be >= 0"
        assert self.k >= 1, "atoms per class (k) must be >= 1"
        assert self.knn is None or self.knn >= 0, "knn must be >= 0"
        assert self.deltaMode in ["mean", "fixed"], "deltaMode must be mean or fixed"
        assert self.delta > 0, "delta must be > 0"
        assert self.maxOuter >= 1, "maxOuter must be >= 1"
        assert self.relTol > 0, "relTol must be > 0"
        assert self.ridge is None or self.ridge >= 0, "ridge must be >= 0"
        assert self.initMode in ["gaussian", "samples"], (
            "initMode must be gaussian or samples"
        )
        assert self.qMode in ["ones", "identity"], "qMode must be ones or identity"
        assert self.epsilon > 0, "epsilon must be > 0"
        self.admm.validate()

    @classmethod
    def fromPreset(cls, name, **overrides):
        """Parameters of a named preset, with optional overrides

        Args:
            name (str):
                One of cbcl, ar, caltech101, caltech256
            **overrides:
                Any constructor argument

        Returns:
            lcpdlParams:
                The parameters

        """

        assert name in PRESETS, (
            f"unknown preset {name}; choose from {', '.join(PRESETS)}"
        )
        kw = dict(PRESETS[name])
        kw.update(overrides)

        return cls(**kw)

    def toDict(self):
        """All fields in canonical order (ADMM settings nested)"""

        out = {}
        for f in self.fields:
            v = getattr(self, f)
            out[f] = v.toDict() if f == "admm" else v

        return out

    @classmethod
    def fromDict(cls, d):
        """Inverse of :py:meth:`toDict`

        Unknown keys and values of the wrong type raise ValueError naming the field.
        """

        if not isinstance(d, dict):
            raise ValueError(f"expected an object of hyperparameters, got {d!r}")
        unknown = set(d) - set(cls.fields)
        if unknown:
            raise ValueError(f"unknown hyperparameter(s): {', '.join(sorted(unknown))}")

        return cls(**d)

    @classmethod
    def fromJSON(cls, path):
        """Load parameters from a JSON file of field/value pairs

        Args:
            path (str):
                Full path to the JSON file

        Returns:
            lcpdlParams:
                The parameters

        """

        with open(path) as f:
            data = json.load(f)

        return cls.fromDict(data)

    def copy(self, **overrides):
        """Copy with some fields replaced"""

        d = self.toDict()
        d.update(overrides)

        return lcpdlParams.fromDict(d)

    def __repr__(self):
        return f"lcpdlParams(tau={self.tau}, alpha={self.alpha}, beta={self.beta}, k={self.k})"
