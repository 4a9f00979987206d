import numpy as np
import scipy.linalg


def frobSq(M):
    """Squared Frobenius norm

    Args:
        M (numpy.ndarray):
            Input matrix (any shape)

    Returns:
        float:
            Sum of squared entries

    """

    return float(np.sum(np.square(M)))


def columnNorms(M):
    """Euclidean norm of every column

    Args:
        M (numpy.ndarray):
            Input matrix (rows x columns)

    Returns:
        numpy.ndarray:
            1D array of column norms

    """

    return np.sqrt(np.sum(np.square(M), axis=0))


def assertFinite(M, name):
    """Raise if any entry of a matrix is NaN or infinite

    Args:
        M (numpy.ndarray):
            Array to check
        name (str):
            Name used in the error message

    Returns:
        None

    """

    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite values.")


def choSolve(G, R, what="system", hint=""):
    """Solve G Y = R for symmetric positive definite G

    One Cholesky factorization of G is shared by all columns of R.

    Args:
        G (numpy.ndarray):
            Symmetric positive definite matrix (m x m)
        R (numpy.ndarray):
            Right hand side (m x p) or (m,)
        what (str):
            Name of the system, used in error messages
        hint (str):
            Extra text appended to the error message

    Returns:
        numpy.ndarray:
            Solution Y with the shape of R

    """

    try:
        fac = scipy.linalg.cho_factor(G, lower=False, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise np.linalg.LinAlgError(
            f"{what} is numerically singular or not positive definite ({e}). {hint}"
        ) from e

    return scipy.linalg.cho_solve(fac, R)
