import json
import numpy as np
from localityPDL.lcpdlParams import lcpdlParams
from localityPDL.localityPDL import lcpdlModel, trainTrace

FORMAT_VERSION = 1
MATRICES = ["D", "P", "W"]


def _formatMatrix(M, indent):
    pad = " " * indent
    rows = [
        pad + "  [" + ", ".join(format(float(v) + 0.0, ".17g") for v in row) + "]"
        for row in M
    ]
    return "[\n" + ",\n".join(rows) + "\n" + pad + "]"


def modelToText(model):
    """Canonical text form of a model file

    Args:
        model (lcpdlModel):
            Model to serialize

    Returns:
        str:
            JSON document. Matrices are row-major arrays of 17 significant digit
            decimals; keys appear in a fixed order.

    """

    prov = model.provenance
    doc = {
        "format_version": FORMAT_VERSION,
        "dims": {"n": model.n, "c": model.c, "k": model.k, "K": model.K},
        "hyperparams": model.params.toDict(),
        "label_map": [int(v) for v in model.labelMap],
        "provenance": {
            "seed": prov.get("seed", model.params.seed),
            "iterations": prov.get("iterations"),
            "final_J": prov.get("finalJ"),
        },
        "matrices": {m: f"@@{m}@@" for m in MATRICES},
    }
    text = json.dumps(doc, indent=2)
    for m in MATRICES:
        text = text.replace(f'"@@{m}@@"', _formatMatrix(getattr(model, m), 4))

    return text + "\n"


def saveModel(model, path):
    """Write a model file

    Args:
        model (lcpdlModel):
            Model to save
        path (str):
            Output path

    Returns:
        None

    """

    text = modelToText(model)
    try:
        with open(path, "w") as f:
            f.write(text)
    except OSError as e:
        raise OSError(f"Could not write model to {path}: {e}") from e


def _field(doc, path):
    cur = doc
    for key in path.split("."):
        if not isinstance(cur, dict) or key not in cur:
            raise ValueError(f"missing field {path}")
        cur = cur[key]
    return cur


def _intField(doc, path, minimum):
    v = _field(doc, path)
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ValueError(f"{path}: expected an integer >= {minimum}, got {v!r}")
    return v


def modelFromText(text, source="<text>"):
    """Parse and validate a model file

    Args:
        text (str):
            File contents
        source (str):
            Name used in error messages

    Returns:
        lcpdlModel:
            Fully validated model

    """

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"{source}: not a valid model file ({e})") from e
    if not isinstance(doc, dict):
        raise ValueError(f"{source}: not a valid model file")

    version = _field(doc, "format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"{source}: unsupported version {version}")

    n = _intField(doc, "dims.n", 1)
    c = _intField(doc, "dims.c", 2)
    k = _intField(doc, "dims.k", 1)
    K = _intField(doc, "dims.K", 1)
    if K != c * k:
        raise ValueError(f"dims.K: {K} is not dims.c * dims.k = {c * k}")

    try:
        params = lcpdlParams.fromDict(_field(doc, "hyperparams"))
    except (AssertionError, TypeError, ValueError) as e:
        raise ValueError(f"hyperparams: {e}") from e
    if params.k != k:
        raise ValueError(f"dims.k: {k} disagrees with hyperparams.k = {params.k}")

    expected = {"D": (n, K), "P": (K, n), "W": (c, K)}
    mats = {}
    for m in MATRICES:
        raw = _field(doc, f"matrices.{m}")
        try:
            M = np.array(raw, dtype=float)
        except (TypeError, ValueError) as e:
            raise ValueError(f"matrices.{m}: malformed matrix ({e})") from e
        if M.shape != expected[m]:
            raise ValueError(
                f"matrices.{m}: shape {M.shape} does not match dims {expected[m]}"
            )
        if not np.all(np.isfinite(M)):
            raise ValueError(f"matrices.{m}: non-finite values")
        mats[m] = M

    labelMap = _field(doc, "label_map")
    if not isinstance(labelMap, list) or len(labelMap) != c:
        raise ValueError(f"label_map: expected {c} labels")
    if any(isinstance(v, bool) or not isinstance(v, int) for v in labelMap):
        raise ValueError("label_map: labels must be integers")
    if any(a >= b for a, b in zip(labelMap, labelMap[1:])):
        raise ValueError("label_map: labels must be strictly increasing")

    prov = doc.get("provenance", {})

    return lcpdlModel(
        mats["D"],
        mats["P"],
        mats["W"],
        params,
        labelMap=labelMap,
        provenance={
            "seed": prov.get("seed"),
            "iterations": prov.get("iterations"),
            "finalJ": prov.get("final_J"),
        },
    )


def loadModel(path):
    """Read and validate a model file

    Args:
        path (str):
            Full path to the model file

    Returns:
        lcpdlModel:
            The model. Dictionary and classifier invariants are re-checked.

    """

    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise OSError(f"Could not read model {path}: {e}") from e

    return modelFromText(text, source=path)


def saveTrace(trace, path):
    """Write a training trace as a JSON array of per-iteration records

    Args:
        trace (trainTrace):
            Trace to write
        path (str):
            Output path

    Returns:
        None

    """

    try:
        with open(path, "w") as f:
            f.write(trace.toJSON() + "\n")
    except OSError as e:
        raise OSError(f"Could not write trace to {path}: {e}") from e


def loadTrace(path):
    """Read a trace written by :py:func:`saveTrace`"""

    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise OSError(f"Could not read trace {path}: {e}") from e

    return trainTrace.fromJSON(text)
