import numpy as np
import pytest

from localityPDL.labeledDataset import splitDataset, synthBlobs
from localityPDL.lcpdlParams import lcpdlParams
from localityPDL.localityPDL import lcpdlModel, localityPDL


def writeText(path, text):
    with open(path, "w") as f:
        f.write(text)
    return str(path)


@pytest.fixture(scope="session")
def smallBlobs():
    """Three well separated classes in 8 dimensions"""
    return synthBlobs(3, 8, 12, 8.0, seed=1)


@pytest.fixture(scope="session")
def smallParams():
    return lcpdlParams(k=2, maxOuter=4, seed=0)


@pytest.fixture(scope="session")
def trainedSmall(smallBlobs, smallParams):
    """(model, trace, train, test) of a short run on smallBlobs"""
    train, test = splitDataset(smallBlobs, seed=1)
    model, trace = localityPDL(smallParams).fit(train)
    return model, trace, train, test


@pytest.fixture
def randomModel():
    """Untrained model with feasible random matrices (n=5, c=3, k=2)"""
    rng = np.random.default_rng(11)
    n, c, k = 5, 3, 2
    K = c * k
    D = rng.standard_normal((n, K))
    D /= np.linalg.norm(D, axis=0)
    P = rng.standard_normal((K, n))
    W = rng.standard_normal((c, K))
    return lcpdlModel(
        D,
        P,
        W,
        lcpdlParams(k=k),
        labelMap=[2, 5, 9],
        provenance={"seed": 0, "iterations": 3, "finalJ": 1.25},
    )
