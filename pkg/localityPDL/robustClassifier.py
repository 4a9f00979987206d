import numpy as np
from localityPDL.utils import choSolve, columnNorms, frobSq


def l21Norm(W):
    """l2,1 norm of W^T: the sum of the Euclidean norms of the columns of W

    Args:
        W (numpy.ndarray):
            c x K classifier

    Returns:
        float:
            Norm value

    """

    return float(np.sum(columnNorms(W)))


def updateLambda(W, epsilon=1e-8):
    """Reweighting update Lambda_mm = 1 / (2 max(||w_m||, epsilon))

    Args:
        W (numpy.ndarray):
            c x K classifier
        epsilon (float):
            Smoothing floor on column norms (> 0)

    Returns:
        numpy.ndarray:
            Length-K vector holding the diagonal of Lambda

    """

    assert epsilon > 0, "epsilon must be > 0"

    return 1.0 / (2.0 * np.maximum(columnNorms(W), epsilon))


def updateClassifier(H, P, X, lam):
    """Closed-form classifier update at fixed Lambda

    W = H X^T P^T (P X X^T P^T + 2 Lambda)^-1

    Args:
        H (numpy.ndarray):
            c x N one-hot labels
        P (numpy.ndarray):
            K x n projection
        X (numpy.ndarray):
            n x N samples
        lam (numpy.ndarray):
            Diagonal of Lambda (length K, positive). A K x K diagonal matrix
            is also accepted.

    Returns:
        numpy.ndarray:
            c x K classifier

    """

    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 2:
        lam = np.diag(lam)
    assert np.all(lam > 0), "Lambda entries must be > 0"

    Z = P @ X
    S = Z @ Z.T + 2.0 * np.diag(lam)

    # S is symmetric: W = (S^-1 Z H^T)^T
    return choSolve(S, Z @ H.T, what="classifier system").T


def classifierObjective(W, H, Z):
    """Robust classification loss ||H - W Z||^2 + ||W^T||_2,1 with Z = P X"""

    return frobSq(H - W @ Z) + l21Norm(W)


def predictBatch(W, P, X):
    """Soft and hard labels for every column of X

    Args:
        W (numpy.ndarray):
            c x K classifier
        P (numpy.ndarray):
            K x n projection
        X (numpy.ndarray):
            n x N samples

    Returns:
        tuple:
            soft (numpy.ndarray):
                c x N soft labels W P X
            labels (numpy.ndarray):
                Length-N dense labels; ties go to the lowest class index

    """

    if not np.all(np.isfinite(X)):
        raise ValueError("input contains non-finite values.")
    assert X.shape[0] == P.shape[1], (
        f"input has {X.shape[0]} features, model expects {P.shape[1]}"
    )

    soft = W @ (P @ X)

    return soft, np.argmax(soft, axis=0)


def predict(W, P, x):
    """Soft label vector and class index for one sample

    Args:
        W (numpy.ndarray):
            c x K classifier
        P (numpy.ndarray):
            K x n projection
        x (numpy.ndarray):
            Length-n sample

    Returns:
        tuple:
            soft (numpy.ndarray):
                Length-c soft labels W P x
            label (int):
                Index of the largest soft label (lowest index on ties)

    """

    soft, labels = predictBatch(W, P, np.asarray(x, dtype=float).reshape(-1, 1))

    return soft[:, 0], int(labels[0])
