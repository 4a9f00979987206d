import numpy as np
from localityPDL.utils import choSolve, frobSq


class blockIndicator:
    """Block indicator Q aligning code rows with class sub-dictionaries

    Args:
        c (int):
            Number of classes
        k (int):
            Atoms per class
        mode (str):
            ``ones`` (default): Q[m, j] = 1 iff atoms m and j share a class, i.e.,
            k x k all-ones blocks on the diagonal. ``identity``: Q = I_K.

    Attributes:
        Q (numpy.ndarray):
            K x K indicator
        K (int):
            Total number of atoms c * k

    """

    def __init__(self, c, k, mode="ones"):
        assert c >= 1, "c must be >= 1"
        assert k >= 1, "k must be >= 1"
        assert mode in ["ones", "identity"], f"unknown block indicator mode {mode}"

        self.c = c
        self.k = k
        self.K = c * k
        self.mode = mode
        if mode == "ones":
            self.Q = np.kron(np.eye(c), np.ones((k, k)))
        else:
            self.Q = np.eye(self.K)

    def slice(self, i):
        """Column block Q_i (K x k) of class i"""
        assert 0 <= i < self.c, f"class index {i} out of range"
        return self.Q[:, i * self.k : (i + 1) * self.k]


def buildBlockIndicator(c, k, mode="ones"):
    """Build the K x K block indicator for c classes of k atoms

    Args:
        c (int):
            Number of classes
        k (int):
            Atoms per class
        mode (str):
            ``ones`` or ``identity`` (see :py:class:`blockIndicator`)

    Returns:
        blockIndicator:
            The indicator

    """

    return blockIndicator(c, k, mode=mode)


def codeSystem(Di, Qi, Li, tau, alpha, ridge=None):
    """Normal matrix of the per-class code sub-problem

    G = D_i^T D_i + tau Q_i^T Q_i + alpha (L_i + L_i^T) / 2 + ridge I

    Args:
        Di (numpy.ndarray):
            n x k class dictionary
        Qi (numpy.ndarray):
            K x k indicator block
        Li (numpy.ndarray):
            k x k Laplacian
        tau (float):
            Approximation weight
        alpha (float):
            Locality weight
        ridge (float):
            Diagonal shift. Defaults to 1e-8 tr(G) / k.

    Returns:
        tuple:
            G (numpy.ndarray):
                k x k shifted system matrix
            ridge (float):
                Ridge actually applied

    """

    k = Di.shape[1]
    G = Di.T @ Di + tau * (Qi.T @ Qi) + alpha * (Li + Li.T) / 2
    if ridge is None:
        ridge = 1e-8 * np.trace(G) / k
    G = G + ridge * np.eye(k)

    return G, ridge


def updateCodes(Xi, Di, P, Qi, Li, tau, alpha, ridge=None, clamp=True):
    """Per-class code update with nonnegative clamp

    Solves the stationarity condition of
    ||X_i - D_i A_i||^2 + tau ||P X_i - Q_i A_i||^2 + alpha Tr(A_i^T L_i A_i)
    and replaces negative entries with 0.

    Args:
        Xi (numpy.ndarray):
            n x N_i class samples
        Di (numpy.ndarray):
            n x k class dictionary
        P (numpy.ndarray):
            K x n projection
        Qi (numpy.ndarray):
            K x k indicator block
        Li (numpy.ndarray):
            k x k Laplacian
        tau (float):
            Approximation weight (>= 0)
        alpha (float):
            Locality weight (>= 0)
        ridge (float):
            Diagonal shift of the system. Defaults to 1e-8 tr(G) / k.
        clamp (bool):
            Apply the nonnegative clamp (default True). False returns the
            unconstrained stationary point, for diagnostics.

    Returns:
        numpy.ndarray:
            k x N_i codes

    """

    assert tau >= 0, "tau must be >= 0"
    assert alpha >= 0, "alpha must be >= 0"
    assert ridge is None or ridge >= 0, "ridge must be >= 0"

    G, ridge = codeSystem(Di, Qi, Li, tau, alpha, ridge=ridge)
    rhs = tau * (Qi.T @ (P @ Xi)) + Di.T @ Xi
    Ai = choSolve(G, rhs, what="code system", hint="Use a larger ridge.")

    if clamp:
        Ai = np.maximum(Ai, 0)

    return Ai


def codeObjective(Ai, Xi, Di, P, Qi, Li, tau, alpha):
    """Value of the per-class code sub-problem objective"""

    return (
        frobSq(Xi - Di @ Ai)
        + tau * frobSq(P @ Xi - Qi @ Ai)
        + alpha * float(np.sum(Ai * (Li @ Ai)))
    )


def codeGradient(Ai, Xi, Di, P, Qi, Li, tau, alpha):
    """Gradient of :py:func:`codeObjective` with respect to A_i"""

    return (
        -2 * Di.T @ (Xi - Di @ Ai)
        - 2 * tau * Qi.T @ (P @ Xi - Qi @ Ai)
        + alpha * (Li + Li.T) @ Ai
    )


def codingResidual(Xi, Di, Ai):
    """Reconstruction error ||X_i - D_i A_i||_F^2

    Args:
        Xi (numpy.ndarray):
            n x N_i class samples
        Di (numpy.ndarray):
            n x k class dictionary
        Ai (numpy.ndarray):
            k x N_i codes

    Returns:
        float:
            Squared Frobenius residual

    """

    return frobSq(Xi - Di @ Ai)
