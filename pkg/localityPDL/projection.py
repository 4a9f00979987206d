import numpy as np
from localityPDL.utils import choSolve, frobSq


def blockTarget(Q, A):
    """Block-diagonal code target B = [Q_1 A_1, ..., Q_c A_c]

    Args:
        Q (blockIndicator):
            Block indicator
        A (list):
            c code blocks, A_i of shape k x N_i, in class order

    Returns:
        numpy.ndarray:
            K x N target

    """

    assert len(A) == Q.c, f"expected {Q.c} code blocks, got {len(A)}"

    return np.hstack([Q.slice(i) @ Ai for i, Ai in enumerate(A)])


def updateProjection(X, B, H, W, tau, beta, ridge=None):
    """Closed-form projection update

    P = (tau I + beta W^T W)^-1 (tau B X^T + beta W^T H X^T) (X X^T + ridge I)^-1,
    the minimizer of beta ||H - W P X||^2 + tau ||P X - B||^2.

    Args:
        X (numpy.ndarray):
            n x N training samples (partitioned order)
        B (numpy.ndarray):
            K x N block target
        H (numpy.ndarray):
            c x N one-hot labels
        W (numpy.ndarray):
            c x K classifier from the previous iteration
        tau (float):
            Approximation weight
        beta (float):
            Classification weight
        ridge (float):
            Diagonal shift of X X^T. Defaults to 1e-8 tr(X X^T) / n.

    Returns:
        numpy.ndarray:
            K x n projection

    """

    assert tau >= 0 and beta >= 0, "tau and beta must be >= 0"
    assert ridge is None or ridge >= 0, "ridge must be >= 0"

    n = X.shape[0]
    K = B.shape[0]
    XXt = X @ X.T
    if ridge is None:
        ridge = 1e-8 * np.trace(XXt) / n

    left = tau * np.eye(K) + beta * (W.T @ W)
    right = tau * (B @ X.T) + beta * (W.T @ (H @ X.T))

    # left^-1 right, then (.) (XX^T + ridge I)^-1 via the transposed system
    Y = choSolve(left, right, what="tau I + beta W^T W", hint="Use tau > 0.")
    P = choSolve(
        XXt + ridge * np.eye(n), Y.T, what="X X^T", hint="Use a larger ridge."
    ).T

    return P


def projectionObjective(P, X, B, H, W, tau, beta):
    """Projection sub-problem value beta ||H - W P X||^2 + tau ||P X - B||^2"""

    PX = P @ X
    return beta * frobSq(H - W @ PX) + tau * frobSq(PX - B)


def blockDiagonalRatio(P, ds, k):
    """Share of the energy of P X lying in the class-aligned diagonal blocks

    Args:
        P (numpy.ndarray):
            K x n projection
        ds (labeledDataset):
            Dataset whose features are projected
        k (int):
            Atoms per class

    Returns:
        float:
            Ratio in [0, 1]; 0 when P X is identically zero

    """

    assert P.shape == (ds.c * k, ds.n), "projection does not match dataset and k"

    V = P @ ds.features
    total = frobSq(V)
    if total == 0:
        return 0.0

    inBlock = 0.0
    for i in range(ds.c):
        inBlock += frobSq(V[i * k : (i + 1) * k, ds.labels == i])

    return inBlock / total
