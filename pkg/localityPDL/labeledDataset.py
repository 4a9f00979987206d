import warnings
import numpy as np
import pandas
from localityPDL.utils import columnNorms


class labeledDataset:
    """Dense labeled feature matrix with one sample per column

    Args:
        features (numpy.ndarray):
            n x N feature matrix (feature dimension x number of samples)
        labels (array-like):
            N dense integer labels in [0, c)
        labelMap (array-like):
            Original label of each dense class index (length c). Defaults to
            0, ..., max(labels).
        classOffsets (array-like):
            c + 1 column offsets delimiting contiguous class blocks. Only set for
            partitioned datasets (see :py:func:`partitionByClass`).
        permutation (array-like):
            Source column of every column, as recorded by partitioning and splitting.

    Notes:
        Arrays are stored read-only. All operations in this module return new
        datasets rather than modifying their input.

    """

    def __init__(
        self, features, labels, labelMap=None, classOffsets=None, permutation=None
    ):
        features = np.array(features, dtype=float)
        labels = np.array(labels)
        assert features.ndim == 2, "features must be a 2D (n x N) matrix"
        assert labels.ndim == 1, "labels must be a 1D array"
        assert features.shape[1] == labels.size, (
            f"{labels.size} labels for {features.shape[1]} samples"
        )
        assert labels.size > 0, "dataset has no samples"
        assert features.shape[0] > 0, "dataset has no features"
        assert np.all(np.mod(labels, 1) == 0), "labels must be integers"
        labels = labels.astype(int)

        if not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite values.")

        if labelMap is None:
            labelMap = np.arange(labels.max() + 1)
        labelMap = np.array(labelMap, dtype=int)
        c = labelMap.size

        assert labels.min() >= 0 and labels.max() < c, (
            f"labels must lie in [0, {c})"
        )
        counts = np.bincount(labels, minlength=c)
        empty = np.flatnonzero(counts == 0)
        assert empty.size == 0, f"class(es) {empty.tolist()} have no samples"

        if classOffsets is not None:
            classOffsets = np.array(classOffsets, dtype=int)
            expected = np.concatenate([[0], np.cumsum(counts)])
            assert np.array_equal(classOffsets, expected), "inconsistent classOffsets"
            assert np.array_equal(labels, np.repeat(np.arange(c), counts)), (
                "classOffsets given but columns are not grouped by ascending class"
            )

        if permutation is None:
            permutation = np.arange(labels.size)
        permutation = np.array(permutation, dtype=int)
        assert permutation.size == labels.size, "permutation length mismatch"

        for arr in (features, labels, labelMap, permutation):
            arr.setflags(write=False)
        if classOffsets is not None:
            classOffsets.setflags(write=False)

        self.features = features
        self.labels = labels
        self.labelMap = labelMap
        self.classOffsets = classOffsets
        self.permutation = permutation

    @property
    def n(self):
        """int: feature dimension"""
        return self.features.shape[0]

    @property
    def N(self):
        """int: number of samples"""
        return self.features.shape[1]

    @property
    def c(self):
        """int: number of classes"""
        return self.labelMap.size

    @property
    def classCounts(self):
        """numpy.ndarray: number of samples in each class"""
        return np.bincount(self.labels, minlength=self.c)

    @property
    def isPartitioned(self):
        """bool: True if columns are grouped by ascending class"""
        return self.classOffsets is not None

    @property
    def originalLabels(self):
        """numpy.ndarray: labels expressed in the original (pre-remap) label space"""
        return self.labelMap[self.labels]

    def classFeatures(self, i):
        """Feature columns of one class

        Args:
            i (int):
                Dense class index

        Returns:
            numpy.ndarray:
                n x N_i matrix of class-i samples

        """

        assert 0 <= i < self.c, f"class index {i} out of range"
        if self.isPartitioned:
            return self.features[:, self.classOffsets[i] : self.classOffsets[i + 1]]

        return self.features[:, self.labels == i]

    def withFeatures(self, features):
        """Copy of this dataset with new features and identical labels

        Args:
            features (numpy.ndarray):
                Replacement n' x N feature matrix

        Returns:
            labeledDataset:
                New dataset

        """

        return labeledDataset(
            features,
            self.labels,
            labelMap=self.labelMap,
            classOffsets=self.classOffsets,
            permutation=self.permutation,
        )

    def __repr__(self):
        return (
            f"labeledDataset(n={self.n}, N={self.N}, c={self.c}, "
            f"partitioned={self.isPartitioned})"
        )


def _readNumericCSV(path, minWidth):
    # all rows as floats; errors name the offending line
    try:
        df = pandas.read_csv(
            path, header=None, dtype=str, na_filter=False, skip_blank_lines=True
        )
    except pandas.errors.EmptyDataError:
        raise ValueError(f"{path}: empty file")
    except pandas.errors.ParserError as e:
        raise ValueError(f"{path}: ragged rows ({e})")

    if df.shape[0] == 0:
        raise ValueError(f"{path}: empty file")
    if df.shape[1] < minWidth:
        raise ValueError(f"{path}: rows need at least {minWidth} fields")

    raw = df.to_numpy(dtype=object)
    width = raw.shape[1]
    for j, row in enumerate(raw):
        if any((not isinstance(v, str)) or (v.strip() == "") for v in row):
            raise ValueError(f"{path}: line {j + 1}: expected {width} fields")

    try:
        vals = raw.astype(float)
    except ValueError:
        for j, row in enumerate(raw):
            for f, v in enumerate(row):
                try:
                    float(v)
                except ValueError:
                    raise ValueError(
                        f"{path}: line {j + 1}, field {f + 1}: non-numeric value '{v}'"
                    )
        raise

    bad = np.flatnonzero(~np.all(np.isfinite(vals), axis=1))
    if bad.size > 0:
        raise ValueError(f"{path}: line {bad[0] + 1}: non-finite value")

    return vals


def loadCSV(path):
    """Load a headerless CSV file with one ``label,f1,...,fn`` row per sample

    Args:
        path (str):
            Full path to the CSV file

    Returns:
        labeledDataset:
            Dataset with features transposed to one column per sample and labels
            remapped to dense [0, c) in ascending order of the original labels.

    Notes:
        Errors (ragged rows, non-numeric fields, empty files, bad labels) raise
        ValueError naming the offending line.

    """

    vals = _readNumericCSV(path, 2)

    rawLabels = vals[:, 0]
    bad = np.flatnonzero((rawLabels < 0) | (np.mod(rawLabels, 1) != 0))
    if bad.size > 0:
        raise ValueError(
            f"{path}: line {bad[0] + 1}: label must be a nonnegative integer"
        )

    rawLabels = rawLabels.astype(int)
    labelMap = np.unique(rawLabels)
    labels = np.searchsorted(labelMap, rawLabels)

    return labeledDataset(vals[:, 1:].T, labels, labelMap=labelMap)


def loadFeatureCSV(path):
    """Load a headerless CSV file of unlabeled ``f1,...,fn`` rows

    Args:
        path (str):
            Full path to the CSV file

    Returns:
        numpy.ndarray:
            n x N feature matrix, one column per row of the file

    """

    return _readNumericCSV(path, 1).T


def saveCSV(ds, path, originalLabels=True):
    """Write a dataset as headerless ``label,f1,...,fn`` CSV at full precision

    Args:
        ds (labeledDataset):
            Dataset to write
        path (str):
            Output file path
        originalLabels (bool):
            Write original labels (default) rather than dense indices

    Returns:
        None

    """

    labels = ds.originalLabels if originalLabels else ds.labels
    df = pandas.DataFrame(ds.features.T)
    df.insert(0, "label", labels)
    try:
        df.to_csv(path, header=False, index=False, float_format="%.17g")
    except OSError as e:
        raise OSError(f"Could not write {path}: {e}") from e


def normalizeSamples(ds):
    """Scale every sample (column) to unit Euclidean norm

    All-zero columns are left unchanged and reported through a warning.

    Args:
        ds (labeledDataset):
            Input dataset

    Returns:
        labeledDataset:
            Normalized dataset

    """

    norms = columnNorms(ds.features)
    zero = norms == 0
    if np.any(zero):
        warnings.warn(f"{int(zero.sum())} all-zero sample(s) left unnormalized")

    return ds.withFeatures(ds.features / np.where(zero, 1.0, norms))


def partitionByClass(ds):
    """Stable reordering of samples into contiguous ascending class blocks

    Args:
        ds (labeledDataset):
            Input dataset

    Returns:
        labeledDataset:
            Partitioned dataset with classOffsets populated

    """

    order = np.argsort(ds.labels, kind="stable")
    counts = ds.classCounts

    return labeledDataset(
        ds.features[:, order],
        ds.labels[order],
        labelMap=ds.labelMap,
        classOffsets=np.concatenate([[0], np.cumsum(counts)]),
        permutation=ds.permutation[order],
    )


def oneHot(ds):
    """One-hot label matrix

    Args:
        ds (labeledDataset):
            Input dataset

    Returns:
        numpy.ndarray:
            c x N matrix H with H[labels[j], j] = 1 and zeros elsewhere

    """

    H = np.zeros((ds.c, ds.N))
    H[ds.labels, np.arange(ds.N)] = 1.0

    return H


def _blobCenters(rng, c, n):
    # orthonormal columns from the QR factor of a Gaussian matrix
    Qc, _ = np.linalg.qr(rng.standard_normal((n, c)))
    return Qc


def blobCenters(c, n, seed):
    """Unit class centers used by :py:func:`synthBlobs` for a given seed

    Args:
        c (int):
            Number of classes
        n (int):
            Feature dimension
        seed (int):
            Random seed

    Returns:
        numpy.ndarray:
            n x c matrix of mutually orthogonal unit columns

    """

    assert n >= c, f"need n >= c to place orthogonal centers (n={n}, c={c})"

    return _blobCenters(np.random.default_rng(seed), c, n)


def synthBlobs(c, n, perClass, separation, seed, normalize=True):
    """Gaussian blobs around mutually orthogonal class centers

    Class i is drawn from a unit-variance isotropic Gaussian centered at
    ``separation * mu_i``.

    Args:
        c (int):
            Number of classes (>= 2)
        n (int):
            Feature dimension (>= c)
        perClass (int):
            Samples per class (>= 2)
        separation (float):
            Distance of each center from the origin
        seed (int):
            Random seed. Output is deterministic for a fixed seed.
        normalize (bool):
            Scale samples to unit l2 norm (default True)

    Returns:
        labeledDataset:
            Partitioned dataset

    """

    assert c >= 2, "synthBlobs needs at least 2 classes"
    assert n >= c, f"need n >= c to place orthogonal centers (n={n}, c={c})"
    assert perClass >= 2, "synthBlobs needs at least 2 samples per class"
    assert separation >= 0, "separation must be >= 0"

    rng = np.random.default_rng(seed)
    centers = _blobCenters(rng, c, n)
    labels = np.repeat(np.arange(c), perClass)
    X = separation * centers[:, labels] + rng.standard_normal((n, labels.size))

    ds = labeledDataset(
        X, labels, classOffsets=np.arange(c + 1) * perClass, labelMap=np.arange(c)
    )
    if normalize:
        ds = normalizeSamples(ds)

    return ds


def addGaussianNoise(ds, variance, seed):
    """Add i.i.d. zero-mean Gaussian noise to every feature entry

    Args:
        ds (labeledDataset):
            Input dataset
        variance (float):
            Noise variance (>= 0). Zero returns the input features exactly.
        seed (int):
            Random seed

    Returns:
        labeledDataset:
            Noisy dataset with unchanged labels

    """

    assert variance >= 0, "variance must be >= 0"
    if variance == 0:
        return ds.withFeatures(ds.features)

    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, np.sqrt(variance), size=ds.features.shape)

    return ds.withFeatures(ds.features + noise)


def splitDataset(ds, trainFraction=0.5, seed=0):
    """Seeded stratified train/test split

    Every class keeps at least one sample on each side.

    Args:
        ds (labeledDataset):
            Input dataset. Every class needs at least 2 samples.
        trainFraction (float):
            Fraction of each class used for training (default 0.5)
        seed (int):
            Random seed

    Returns:
        tuple:
            train (labeledDataset):
                Partitioned training set
            test (labeledDataset):
                Partitioned test set

    """

    assert 0 < trainFraction < 1, "trainFraction must lie in (0, 1)"
    counts = ds.classCounts
    assert counts.min() >= 2, "every class needs at least 2 samples to split"

    rng = np.random.default_rng(seed)
    trainIdx = []
    testIdx = []
    for i in range(ds.c):
        idx = rng.permutation(np.flatnonzero(ds.labels == i))
        nTrain = int(np.clip(np.round(trainFraction * idx.size), 1, idx.size - 1))
        trainIdx.append(np.sort(idx[:nTrain]))
        testIdx.append(np.sort(idx[nTrain:]))

    out = []
    for idx in (np.concatenate(trainIdx), np.concatenate(testIdx)):
        sub = labeledDataset(
            ds.features[:, idx],
            ds.labels[idx],
            labelMap=ds.labelMap,
            permutation=ds.permutation[idx],
        )
        out.append(partitionByClass(sub))

    return tuple(out)
