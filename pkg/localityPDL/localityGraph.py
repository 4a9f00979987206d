import warnings
import numpy as np
from scipy.spatial.distance import cdist, pdist


def defaultKnn(k):
    """Default neighbor count for a class dictionary with k atoms

    Args:
        k (int):
            Atoms per class

    Returns:
        int:
            min(5, k - 1)

    """

    return max(0, min(5, k - 1))


def defaultDelta(Di):
    """Mean pairwise atom distance, or 1.0 if there is none

    Args:
        Di (numpy.ndarray):
            n x k atom matrix

    Returns:
        float:
            Kernel width

    """

    if Di.shape[1] < 2:
        return 1.0
    d = pdist(Di.T)
    delta = float(np.mean(d))

    return delta if delta > 0 else 1.0


def atomAdjacency(Di, knn=None, delta=None):
    """k-nearest-neighbor heat-kernel adjacency over the atoms of one class

    M[v, j] = exp(-||d_v - d_j|| / delta) when atom j is among the knn nearest
    atoms of atom v (excluding v itself), and 0 otherwise. The result is
    symmetrized as max(M, M^T).

    Args:
        Di (numpy.ndarray):
            n x k atom matrix
        knn (int):
            Neighbor count, clamped to [0, k - 1]. Defaults to min(5, k - 1).
        delta (float):
            Kernel width (> 0). Defaults to the mean pairwise atom distance.

    Returns:
        numpy.ndarray:
            k x k symmetric adjacency with zero diagonal

    """

    if not np.all(np.isfinite(Di)):
        raise ValueError("atoms contain non-finite values.")

    k = Di.shape[1]
    assert k >= 1, "need at least one atom"
    if knn is None:
        knn = defaultKnn(k)
    if knn > k - 1 or knn < 0:
        warnings.warn(f"knn={knn} clamped to [0, {k - 1}]")
        knn = int(np.clip(knn, 0, k - 1))
    if delta is None:
        delta = defaultDelta(Di)
    assert delta > 0, "delta must be > 0"

    M = np.zeros((k, k))
    if knn == 0:
        return M

    dist = cdist(Di.T, Di.T)
    ranked = dist.copy()
    np.fill_diagonal(ranked, np.inf)
    nbrs = np.argsort(ranked, axis=1, kind="stable")[:, :knn]
    rows = np.repeat(np.arange(k), knn)
    cols = nbrs.ravel()
    M[rows, cols] = np.exp(-dist[rows, cols] / delta)

    return np.maximum(M, M.T)


def laplacian(M):
    """Graph Laplacian L = diag(row sums of M) - M

    Args:
        M (numpy.ndarray):
            Symmetric nonnegative k x k adjacency

    Returns:
        numpy.ndarray:
            k x k Laplacian

    """

    if np.max(np.abs(M - M.T), initial=0.0) > 1e-10:
        raise ValueError("adjacency is not symmetric.")

    return np.diag(M.sum(axis=1)) - M


def localityEnergy(Ai, Li):
    """Locality penalty Tr(A_i^T L_i A_i)

    Args:
        Ai (numpy.ndarray):
            k x N_i codes
        Li (numpy.ndarray):
            k x k Laplacian

    Returns:
        float:
            Energy value

    """

    return float(np.sum(Ai * (Li @ Ai)))


class atomGraph:
    """Locality graph over the atoms of one class dictionary

    Args:
        Di (numpy.ndarray):
            n x k atom matrix
        knn (int):
            Neighbor count. Defaults to min(5, k - 1).
        delta (float):
            Kernel width. Defaults to the mean pairwise atom distance.

    Attributes:
        M (numpy.ndarray):
            Symmetric adjacency
        L (numpy.ndarray):
            Graph Laplacian
        knn (int):
            Neighbor count actually used
        delta (float):
            Kernel width actually used

    """

    def __init__(self, Di, knn=None, delta=None):
        k = Di.shape[1]
        self.knn = defaultKnn(k) if knn is None else int(np.clip(knn, 0, k - 1))
        self.delta = defaultDelta(Di) if delta is None else float(delta)
        # atomAdjacency warns on an out-of-range knn
        self.M = atomAdjacency(Di, knn=knn, delta=self.delta)
        self.L = laplacian(self.M)

    def energy(self, Ai):
        """Locality energy of codes over this graph

        Args:
            Ai (numpy.ndarray):
                k x N_i codes

        Returns:
            float:
                Tr(A_i^T L A_i)

        """

        return localityEnergy(Ai, self.L)
