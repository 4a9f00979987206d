import json
import time
import warnings
import numpy as np
import pandas
from localityPDL.labeledDataset import oneHot, partitionByClass
from localityPDL.localityGraph import atomGraph, localityEnergy
from localityPDL.blockCode import blockIndicator, updateCodes, codingResidual
from localityPDL.projection import blockTarget, updateProjection, blockDiagonalRatio
from localityPDL.robustClassifier import (
    updateClassifier,
    updateLambda,
    l21Norm,
    predictBatch,
)
from localityPDL.dictionaryADMM import updateDictionary
from localityPDL.lcpdlParams import lcpdlParams
from localityPDL.utils import columnNorms, frobSq

TERMS = ["recon", "approx", "locality", "classif", "l21"]


class lcpdlModel:
    """Trained dictionary, projection and classifier

    Args:
        D (numpy.ndarray):
            n x K synthesis dictionary (class blocks of k atoms, in class order)
        P (numpy.ndarray):
            K x n analysis projection
        W (numpy.ndarray):
            c x K linear classifier
        params (lcpdlParams):
            Hyperparameters used for training
        labelMap (array-like):
            Original label of each dense class index
        provenance (dict):
            Training provenance: seed, iterations and final objective

    Notes:
        Dimensions, finiteness and the atom norm constraint are checked on
        construction; violations raise ValueError.

    """

    def __init__(self, D, P, W, params, labelMap=None, provenance=None):
        D = np.array(D, dtype=float)
        P = np.array(P, dtype=float)
        W = np.array(W, dtype=float)
        for name, M in (("D", D), ("P", P), ("W", W)):
            if M.ndim != 2:
                raise ValueError(f"{name} must be a 2D matrix")
            if not np.all(np.isfinite(M)):
                raise ValueError(f"{name} contains non-finite values.")

        n, K = D.shape
        c = W.shape[0]
        k = params.k
        if c < 2:
            raise ValueError(f"a model needs at least 2 classes (c={c})")
        if K != c * k:
            raise ValueError(f"D has {K} atoms, expected c*k = {c * k}")
        if P.shape != (K, n):
            raise ValueError(f"P has shape {P.shape}, expected {(K, n)}")
        if W.shape != (c, K):
            raise ValueError(f"W has shape {W.shape}, expected {(c, K)}")
        if np.any(columnNorms(D) > 1 + 1e-6):
            raise ValueError("atom norm constraint violated")

        if labelMap is None:
            labelMap = np.arange(c)
        labelMap = np.array(labelMap, dtype=int)
        if labelMap.size != c:
            raise ValueError(f"label map has {labelMap.size} entries, expected {c}")
        if np.any(np.diff(labelMap) <= 0):
            raise ValueError("label map must be strictly increasing")

        for M in (D, P, W, labelMap):
            M.setflags(write=False)

        self.D = D
        self.P = P
        self.W = W
        self.params = params
        self.labelMap = labelMap
        self.provenance = dict(provenance) if provenance else {}
        self.n = n
        self.c = c
        self.k = k
        self.K = K

    def dictionaryBlock(self, i):
        """Sub-dictionary D_i (n x k) of class i"""
        return self.D[:, i * self.k : (i + 1) * self.k]

    def predict(self, X):
        """Soft labels and dense hard labels for the columns of X

        Args:
            X (numpy.ndarray):
                n x N samples (a length-n vector is treated as one sample)

        Returns:
            tuple:
                soft (numpy.ndarray):
                    c x N soft labels
                labels (numpy.ndarray):
                    Length-N dense class indices

        """

        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[0] != self.n:
            raise ValueError(
                f"data has {X.shape[0]} features but the model expects {self.n}"
            )

        return predictBatch(self.W, self.P, X)

    def predictLabels(self, X):
        """Predicted labels in the original label space"""

        return self.labelMap[self.predict(X)[1]]

    def denseLabels(self, originalLabels):
        """Map original labels onto this model's dense class indices

        Args:
            originalLabels (array-like):
                Labels in the original label space

        Returns:
            numpy.ndarray:
                Dense class indices

        """

        originalLabels = np.asarray(originalLabels, dtype=int)
        idx = np.searchsorted(self.labelMap, originalLabels)
        idx = np.clip(idx, 0, self.c - 1)
        unknown = self.labelMap[idx] != originalLabels
        if np.any(unknown):
            raise ValueError(
                f"label(s) {sorted(set(originalLabels[unknown].tolist()))} "
                "are unknown to the model"
            )

        return idx

    def evaluate(self, ds):
        """Accuracy and confusion matrix on a labeled dataset

        Args:
            ds (labeledDataset):
                Evaluation data. Labels are matched through the original label
                values, so the dataset may contain a subset of the classes.

        Returns:
            tuple:
                accuracy (float):
                    Fraction of correct predictions
                confusion (numpy.ndarray):
                    c x c counts, confusion[i, j] = true i predicted j

        """

        truth = self.denseLabels(ds.originalLabels)
        _, pred = self.predict(ds.features)

        confusion = np.zeros((self.c, self.c), dtype=int)
        np.add.at(confusion, (truth, pred), 1)
        accuracy = float(np.trace(confusion)) / ds.N

        return accuracy, confusion

    def blockDiagonalRatio(self, ds):
        """Block-diagonality of P X over a dataset (see projection.blockDiagonalRatio)"""

        return blockDiagonalRatio(self.P, ds, self.k)

    def __repr__(self):
        return f"lcpdlModel(n={self.n}, c={self.c}, k={self.k}, K={self.K})"


class trainState:
    """Mutable variables of one training run

    Attributes:
        D (numpy.ndarray):
            n x K dictionary
        P (numpy.ndarray):
            K x n projection
        W (numpy.ndarray):
            c x K classifier
        lam (numpy.ndarray):
            Diagonal of Lambda (length K)
        A (list):
            c code blocks (k x N_i)
        graphs (list):
            c atomGraph objects built from the current class dictionaries

    """

    def __init__(self, D, P, W, lam, A, graphs):
        self.D = D
        self.P = P
        self.W = W
        self.lam = lam
        self.A = A
        self.graphs = graphs


class trainTrace:
    """Per-iteration record of a training run

    Attributes:
        rows (list):
            One dict per outer iteration: iter, J, terms (recon, approx,
            locality, classif, l21; already weighted so they sum to J) and ms
        converged (bool):
            True if the relative change criterion stopped the run
        iterations (int):
            Number of outer iterations performed

    """

    def __init__(self, rows=None, converged=False):
        self.rows = [] if rows is None else list(rows)
        self.converged = converged

    @property
    def iterations(self):
        """int: number of recorded iterations"""
        return len(self.rows)

    @property
    def J(self):
        """numpy.ndarray: objective value of every iteration"""
        return np.array([r["J"] for r in self.rows])

    def addRow(self, it, J, terms, ms, blockRatio=None):
        """Append one iteration"""

        row = {
            "iter": int(it),
            "J": float(J),
            "terms": {t: float(terms[t]) for t in TERMS},
            "ms": float(ms),
        }
        if blockRatio is not None:
            row["blockRatio"] = float(blockRatio)
        self.rows.append(row)

    def isMonotone(self, tol=1e-9):
        """True if J never increased by more than tol (relative)"""

        J = self.J
        if J.size < 2:
            return True

        return bool(np.all(np.diff(J) <= tol * np.maximum(np.abs(J[:-1]), 1e-30)))

    def toRecords(self):
        """List of per-iteration dicts, as exported to JSON"""

        return [dict(r, terms=dict(r["terms"])) for r in self.rows]

    def toJSON(self):
        """Trace as a JSON array of per-iteration records"""

        return json.dumps(self.toRecords(), indent=2)

    @classmethod
    def fromJSON(cls, text):
        """Inverse of :py:meth:`toJSON`"""

        return cls(rows=json.loads(text))

    def toDataFrame(self):
        """Trace as a pandas DataFrame with one column per term"""

        flat = []
        for r in self.rows:
            d = {"iter": r["iter"], "J": r["J"]}
            d.update(r["terms"])
            d["ms"] = r["ms"]
            if "blockRatio" in r:
                d["blockRatio"] = r["blockRatio"]
            flat.append(d)

        return pandas.DataFrame(flat)


class localityPDL:
    """Scalable locality-constrained projective dictionary learning

    Args:
        params (lcpdlParams):
            Hyperparameters. Defaults to lcpdlParams().
        verbose (bool):
            Print one line per outer iteration (default False)

    Attributes:
        model (lcpdlModel):
            Model of the last :py:meth:`fit` call
        trace (trainTrace):
            Trace of the last :py:meth:`fit` call

    """

    def __init__(self, params=None, verbose=False):
        if params is None:
            params = lcpdlParams()
        params.validate()
        self.params = params
        self.verbose = verbose
        self.model = None
        self.trace = None

    def _graph(self, Di):
        p = self.params
        delta = None if p.deltaMode == "mean" else p.delta
        return atomGraph(Di, knn=p.knn, delta=delta)

    def _blocks(self, D):
        k = self.params.k
        return [D[:, i * k : (i + 1) * k] for i in range(D.shape[1] // k)]

    def initState(self, ds):
        """Random initial D, P, W and Lambda = I

        Args:
            ds (labeledDataset):
                Partitioned training data

        Returns:
            trainState:
                Initial state (codes are zero until the first update)

        Notes:
            ``gaussian`` mode fills D (n x K), P (K x n) and W (c x K) with seeded
            standard normals scaled to unit Frobenius norm. ``samples`` mode draws
            the atoms of D_i from the (l2-normalized) samples of class i, without
            replacement when N_i >= k; P and W are drawn as in ``gaussian`` mode.

        """

        p = self.params
        n, c, k = ds.n, ds.c, p.k
        K = c * k
        rng = np.random.default_rng(p.seed)

        if p.initMode == "gaussian":
            D = rng.standard_normal((n, K))
            D /= np.linalg.norm(D)
        else:
            D = np.zeros((n, K))
            for i in range(c):
                Xi = ds.classFeatures(i)
                idx = rng.choice(Xi.shape[1], size=k, replace=Xi.shape[1] < k)
                atoms = Xi[:, idx]
                norms = columnNorms(atoms)
                D[:, i * k : (i + 1) * k] = atoms / np.where(norms == 0, 1.0, norms)

        P = rng.standard_normal((K, n))
        P /= np.linalg.norm(P)
        W = rng.standard_normal((c, K))
        W /= np.linalg.norm(W)

        A = [np.zeros((k, Ni)) for Ni in ds.classCounts]
        graphs = [self._graph(Di) for Di in self._blocks(D)]

        return trainState(D, P, W, np.ones(K), A, graphs)

    def objective(self, state, ds, H=None, Q=None):
        """Full objective and its weighted term breakdown

        J = sum_i {||X_i - D_i A_i||^2 + tau ||P X_i - Q_i A_i||^2
        + alpha Tr(A_i^T L_i A_i)} + beta (||H - W P X||^2 + ||W^T||_2,1)

        Args:
            state (trainState):
                Current variables
            ds (labeledDataset):
                Partitioned training data
            H (numpy.ndarray):
                One-hot labels. Computed from ds if None.
            Q (blockIndicator):
                Block indicator. Built from the parameters if None.

        Returns:
            tuple:
                J (float):
                    Objective value
                terms (dict):
                    recon, approx (times tau), locality (times alpha),
                    classif and l21 (times beta)

        """

        p = self.params
        if H is None:
            H = oneHot(ds)
        if Q is None:
            Q = blockIndicator(ds.c, p.k, mode=p.qMode)

        recon = approx = locality = 0.0
        for i, Di in enumerate(self._blocks(state.D)):
            Xi = ds.classFeatures(i)
            Ai = state.A[i]
            recon += codingResidual(Xi, Di, Ai)
            approx += frobSq(state.P @ Xi - Q.slice(i) @ Ai)
            locality += localityEnergy(Ai, state.graphs[i].L)

        terms = {
            "recon": recon,
            "approx": p.tau * approx,
            "locality": p.alpha * locality,
            "classif": p.beta * frobSq(H - state.W @ (state.P @ ds.features)),
            "l21": p.beta * l21Norm(state.W),
        }

        return sum(terms[t] for t in TERMS), terms

    def step(self, state, ds, H, Q, it=0):
        """One outer iteration: codes, projection, classifier, Lambda, dictionary

        Args:
            state (trainState):
                Variables, updated in place
            ds (labeledDataset):
                Partitioned training data
            H (numpy.ndarray):
                One-hot labels
            Q (blockIndicator):
                Block indicator
            it (int):
                Iteration index used in error messages

        Returns:
            trainState:
                The updated state

        """

        p = self.params
        c = ds.c
        X = ds.features

        Dblocks = self._blocks(state.D)
        for i in range(c):
            try:
                state.A[i] = updateCodes(
                    ds.classFeatures(i),
                    Dblocks[i],
                    state.P,
                    Q.slice(i),
                    state.graphs[i].L,
                    p.tau,
                    p.alpha,
                    ridge=p.ridge,
                )
            except np.linalg.LinAlgError as e:
                raise np.linalg.LinAlgError(f"iteration {it}, class {i}: {e}") from e

        try:
            B = blockTarget(Q, state.A)
            state.P = updateProjection(X, B, H, state.W, p.tau, p.beta, ridge=p.ridge)
            state.W = updateClassifier(H, state.P, X, state.lam)
        except np.linalg.LinAlgError as e:
            raise np.linalg.LinAlgError(f"iteration {it}: {e}") from e
        state.lam = updateLambda(state.W, p.epsilon)

        D = np.empty_like(state.D)
        for i in range(c):
            try:
                D[:, i * p.k : (i + 1) * p.k] = updateDictionary(
                    ds.classFeatures(i), state.A[i], cfg=p.admm, Dinit=Dblocks[i]
                )
            except np.linalg.LinAlgError as e:
                raise np.linalg.LinAlgError(f"iteration {it}, class {i}: {e}") from e
        state.D = D
        state.graphs = [self._graph(Di) for Di in self._blocks(D)]

        return state

    def fit(self, ds, recordBlockRatio=False, callback=None, verbose=None):
        """Train on a labeled dataset

        Args:
            ds (labeledDataset):
                Training data. Partitioned by class first if needed.
            recordBlockRatio (bool):
                Also record the block-diagonal ratio of P X at every iteration
            callback (callable):
                Called as callback(iteration, state) after every iteration
            verbose (bool):
                Overrides the verbosity given to the constructor for this call

        Returns:
            tuple:
                model (lcpdlModel):
                    Trained model
                trace (trainTrace):
                    Objective trace

        """

        p = self.params
        if verbose is None:
            verbose = self.verbose
        if not ds.isPartitioned:
            ds = partitionByClass(ds)
        assert ds.c >= 2, "training needs at least 2 classes"

        H = oneHot(ds)
        Q = blockIndicator(ds.c, p.k, mode=p.qMode)
        state = self.initState(ds)
        trace = trainTrace()

        prevJ = None
        for it in range(1, p.maxOuter + 1):
            t0 = time.perf_counter()
            self.step(state, ds, H, Q, it=it)
            ms = (time.perf_counter() - t0) * 1000.0

            J, terms = self.objective(state, ds, H=H, Q=Q)
            ratio = blockDiagonalRatio(state.P, ds, p.k) if recordBlockRatio else None
            trace.addRow(it, J, terms, ms, blockRatio=ratio)
            if verbose:
                print(f"Iteration {it}: J = {J:.6e} ({ms:.1f} ms)")
            if callback is not None:
                callback(it, state)

            if prevJ is not None and abs(J - prevJ) / max(prevJ, 1e-30) < p.relTol:
                trace.converged = True
                break
            prevJ = J

        if verbose and not trace.isMonotone():
            warnings.warn("objective was not monotonically non-increasing")

        model = lcpdlModel(
            state.D,
            state.P,
            state.W,
            p,
            labelMap=ds.labelMap,
            provenance={
                "seed": p.seed,
                "iterations": trace.iterations,
                "finalJ": trace.rows[-1]["J"],
            },
        )
        self.model = model
        self.trace = trace

        return model, trace


def evaluate(model, ds):
    """Accuracy and confusion matrix of a model on a dataset

    See :py:meth:`lcpdlModel.evaluate`.
    """

    return model.evaluate(ds)
