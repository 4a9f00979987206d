import itertools
import numpy as np
import pandas
from localityPDL.labeledDataset import (
    addGaussianNoise,
    normalizeSamples,
    splitDataset,
)
from localityPDL.localityPDL import localityPDL

SWEEPABLE = ["tau", "alpha", "beta"]


def trainAndScore(train, test, params):
    """Train on one set and return the accuracy on another

    Args:
        train (labeledDataset):
            Training set
        test (labeledDataset):
            Test set
        params (lcpdlParams):
            Hyperparameters

    Returns:
        float:
            Test accuracy

    """

    model, _ = localityPDL(params).fit(train)

    return model.evaluate(test)[0]


def logGrid(lo, hi, steps):
    """Log-spaced values from lo to hi inclusive

    Args:
        lo (float):
            First value (> 0)
        hi (float):
            Last value (>= lo)
        steps (int):
            Number of values (>= 1; 1 returns [lo])

    Returns:
        numpy.ndarray:
            The grid

    """

    assert lo > 0 and hi >= lo, "grid range must satisfy 0 < lo <= hi"
    assert steps >= 1, "steps must be >= 1"
    if steps == 1:
        return np.array([lo], dtype=float)

    return np.logspace(np.log10(lo), np.log10(hi), steps)


def parameterSweep(
    ds, params, grid=(), values=(), fixed=None, seed=0, trainFraction=0.5, repeats=1
):
    """Accuracy surface over a grid of (tau, alpha, beta) values

    Parameters named in ``fixed`` are held at the given values, every parameter
    in ``grid`` takes every entry of ``values``, and the rest keep their value in
    ``params``. Every grid point is scored on the same ``repeats`` seeded
    stratified splits (seeds ``seed``, ``seed + 1``, ...) and the accuracies
    are averaged.

    Args:
        ds (labeledDataset):
            Full dataset
        params (lcpdlParams):
            Base hyperparameters
        grid (list):
            Names of swept parameters (subset of tau, alpha, beta)
        values (array-like):
            Grid values shared by every swept parameter
        fixed (dict):
            Parameter name to fixed value
        seed (int):
            Split seed
        trainFraction (float):
            Fraction of every class used for training (default 0.5)
        repeats (int):
            Number of random splits averaged per grid point (default 1)

    Returns:
        list:
            One dict per grid point, {"params": {tau, alpha, beta}, "accuracy",
            "std"} with the mean and standard deviation over the splits,
            in row-major order of the grid names as given

    """

    fixed = dict(fixed or {})
    grid = list(grid)
    for name in list(fixed) + grid:
        assert name in SWEEPABLE, f"unknown sweep parameter {name}"
    overlap = set(fixed) & set(grid)
    assert not overlap, f"parameter(s) {sorted(overlap)} both fixed and swept"
    if grid:
        assert len(values) > 0, "grid values are empty"
    assert repeats >= 1, "repeats must be >= 1"

    splits = [
        splitDataset(ds, trainFraction=trainFraction, seed=seed + r)
        for r in range(repeats)
    ]
    base = params.copy(**fixed)

    rows = []
    for combo in itertools.product(*[list(values)] * len(grid)):
        p = base.copy(**dict(zip(grid, (float(v) for v in combo))))
        accs = [trainAndScore(train, test, p) for train, test in splits]
        rows.append(
            {
                "params": {"tau": p.tau, "alpha": p.alpha, "beta": p.beta},
                "accuracy": float(np.mean(accs)),
                "std": float(np.std(accs)),
            }
        )

    return rows


def sweepTable(rows, grid):
    """Accuracy table of sweep results

    Args:
        rows (list):
            Output of :py:func:`parameterSweep`
        grid (list):
            Swept parameter names

    Returns:
        pandas.DataFrame:
            Pivot (first name as rows, second as columns) for two swept
            parameters, otherwise a flat table

    """

    df = pandas.DataFrame([dict(r["params"], accuracy=r["accuracy"]) for r in rows])
    if len(grid) == 2:
        return df.pivot(index=grid[0], columns=grid[1], values="accuracy")

    return df


def noiseRobustness(ds, variances, params, seed=0, repeats=1, normalize=True):
    """Accuracy as Gaussian noise of growing variance is added to the data

    For every variance and repeat: add noise (the same seed for every
    variance, so only its scale changes), optionally renormalize the
    samples, split 50/50 and train/test.

    Args:
        ds (labeledDataset):
            Clean dataset
        variances (list):
            Noise variances (>= 0)
        params (lcpdlParams):
            Hyperparameters
        seed (int):
            Base seed for noise and splits
        repeats (int):
            Number of random repeats averaged per variance
        normalize (bool):
            l2-normalize samples after adding noise (default True)

    Returns:
        list:
            One dict per variance: variance, accuracy (mean), std

    """

    assert repeats >= 1, "repeats must be >= 1"

    out = []
    for var in variances:
        accs = []
        for r in range(repeats):
            noisy = addGaussianNoise(ds, var, seed + r)
            if normalize:
                noisy = normalizeSamples(noisy)
            train, test = splitDataset(noisy, trainFraction=0.5, seed=seed + r)
            accs.append(trainAndScore(train, test, params))
        out.append(
            {
                "variance": float(var),
                "accuracy": float(np.mean(accs)),
                "std": float(np.std(accs)),
            }
        )

    return out
