import numpy as np
import scipy.linalg
from localityPDL.utils import columnNorms


class admmConfig:
    """Settings of the ADMM dictionary solver

    Args:
        rho (float):
            Penalty parameter (> 0). Defaults to 1.0.
        maxInner (int):
            Iteration cap (>= 1). Defaults to 50.
        primalTol (float):
            Stop threshold on ||D - S||_F (> 0). Defaults to 1e-6.
        dualTol (float):
            Stop threshold on rho ||S - S_prev||_F. Defaults to primalTol.
        adaptive (bool):
            Multiply rho by rhoGrowth after every inner iteration (default False)
        rhoGrowth (float):
            Growth factor for adaptive mode. Defaults to 1.1.

    """

    def __init__(
        self,
        rho=1.0,
        maxInner=50,
        primalTol=1e-6,
        dualTol=None,
        adaptive=False,
        rhoGrowth=1.1,
    ):
        self.rho = float(rho)
        self.maxInner = int(maxInner)
        self.primalTol = float(primalTol)
        self.dualTol = self.primalTol if dualTol is None else float(dualTol)
        self.adaptive = bool(adaptive)
        self.rhoGrowth = float(rhoGrowth)
        self.validate()

    def validate(self):
        """Check the configuration invariants"""

        assert self.rho > 0, "rho must be > 0"
        assert self.maxInner >= 1, "maxInner must be >= 1"
        assert self.primalTol > 0, "primalTol must be > 0"
        assert self.dualTol > 0, "dualTol must be > 0"
        assert self.rhoGrowth >= 1, "rhoGrowth must be >= 1"

    def toDict(self):
        """Settings in canonical order"""

        return {
            "rho": self.rho,
            "maxInner": self.maxInner,
            "primalTol": self.primalTol,
            "dualTol": self.dualTol,
            "adaptive": self.adaptive,
            "rhoGrowth": self.rhoGrowth,
        }

    def __repr__(self):
        return "admmConfig(" + ", ".join(f"{k}={v}" for k, v in self.toDict().items()) + ")"


def projectColumnsUnitBall(U):
    """Project every column onto the unit l2 ball

    Args:
        U (numpy.ndarray):
            n x k matrix

    Returns:
        numpy.ndarray:
            Columns u_j / max(1, ||u_j||)

    """

    return U / np.maximum(1.0, columnNorms(U))


def updateDictionary(Xi, Ai, cfg=None, Dinit=None, returnInfo=False):
    """Norm-constrained dictionary update by scaled ADMM

    Minimizes ||X_i - D_i A_i||_F^2 subject to ||d_j|| <= 1 with the splitting
    D = S:

        D <- (X_i A_i^T + rho (S - T)) (A_i A_i^T + rho I)^-1
        S <- columnwise unit-ball projection of (D + T)
        T <- T + D - S

    starting from S = Dinit, T = 0.

    Args:
        Xi (numpy.ndarray):
            n x N_i class samples
        Ai (numpy.ndarray):
            k x N_i codes
        cfg (admmConfig):
            Solver settings. Defaults to admmConfig().
        Dinit (numpy.ndarray):
            n x k warm start. Defaults to zeros.
        returnInfo (bool):
            Also return a dict with the iteration count and residual history

    Returns:
        numpy.ndarray or tuple:
            The feasible iterate S (n x k), plus the info dict if returnInfo

    """

    if cfg is None:
        cfg = admmConfig()
    n = Xi.shape[0]
    k = Ai.shape[0]
    assert Ai.shape[1] == Xi.shape[1], "codes and samples disagree on N_i"
    if Dinit is None:
        Dinit = np.zeros((n, k))
    assert Dinit.shape == (n, k), "Dinit has the wrong shape"

    rho = cfg.rho
    XAt = Xi @ Ai.T
    AAt = Ai @ Ai.T
    fac = scipy.linalg.cho_factor(AAt + rho * np.eye(k))

    S = projectColumnsUnitBall(Dinit)
    T = np.zeros((n, k))
    primal = []
    dual = []
    for it in range(cfg.maxInner):
        D = scipy.linalg.cho_solve(fac, (XAt + rho * (S - T)).T).T
        Sprev = S
        S = projectColumnsUnitBall(D + T)
        T = T + D - S

        if not (np.all(np.isfinite(D)) and np.all(np.isfinite(T))):
            raise np.linalg.LinAlgError(
                f"ADMM diverged at inner iteration {it + 1} (rho={rho}); try another rho."
            )

        primal.append(float(np.linalg.norm(D - S)))
        dual.append(float(rho * np.linalg.norm(S - Sprev)))
        if primal[-1] <= cfg.primalTol and dual[-1] <= cfg.dualTol:
            break

        if cfg.adaptive:
            # scaled dual follows the penalty
            newRho = rho * cfg.rhoGrowth
            T = T * (rho / newRho)
            rho = newRho
            fac = scipy.linalg.cho_factor(AAt + rho * np.eye(k))

    if returnInfo:
        return S, {"iterations": len(primal), "primal": primal, "dual": dual}

    return S
