#!python

"""
Command line interface: train, predict, eval, synth and sweep

Exit codes are 0 on success, 1 when the work itself fails (unreadable model,
model/data mismatch, numerical failure, I/O error) and 2 for bad flags or
bad input data.
"""

import argparse
import json
import sys
import time

import numpy as np
import pandas

from localityPDL.experiments import (
    SWEEPABLE,
    logGrid,
    parameterSweep,
    sweepTable,
)
from localityPDL.labeledDataset import (
    addGaussianNoise,
    loadCSV,
    loadFeatureCSV,
    normalizeSamples,
    saveCSV,
    synthBlobs,
)
from localityPDL.lcpdlParams import PRESETS, lcpdlParams
from localityPDL.localityPDL import localityPDL
from localityPDL.modelIO import loadModel, saveModel, saveTrace
from localityPDL.utils import columnNorms

# errors raised by the numerical work itself
RUNTIME_ERRORS = (np.linalg.LinAlgError, OSError, RuntimeError)


def _fail(msg, code):
    print(f"lcpdl: error: {msg}", file=sys.stderr)
    return code


def _addModelFlags(parser):
    """Hyperparameter flags shared by train and sweep"""

    parser.add_argument(
        "--preset", choices=sorted(PRESETS), help="Named hyperparameter preset."
    )
    parser.add_argument(
        "--params",
        type=str,
        help="JSON file of hyperparameter values (overrides the preset).",
    )
    parser.add_argument(
        "--atoms-per-class", dest="k", type=int, help="Atoms per class (int)."
    )
    parser.add_argument(
        "--max-iters", dest="maxOuter", type=int, help="Outer iteration cap (int)."
    )
    parser.add_argument("--seed", type=int, default=0, help="Random seed (int).")
    parser.add_argument(
        "--normalize",
        action="store_true",
        help="Scale every sample to unit l2 norm before training.",
    )


def buildParams(args, **extra):
    """Assemble hyperparameters from defaults, preset, parameter file and flags

    Later sources win: defaults < ``--preset`` < ``--params`` < explicit flags.

    Args:
        args (argparse.Namespace):
            Parsed arguments
        **extra:
            Further overrides (applied last)

    Returns:
        lcpdlParams:
            Validated parameters

    """

    if args.preset:
        d = lcpdlParams.fromPreset(args.preset).toDict()
    else:
        d = lcpdlParams().toDict()

    if args.params:
        with open(args.params) as f:
            fromFile = json.load(f)
        if not isinstance(fromFile, dict):
            raise ValueError(f"{args.params}: expected a JSON object")
        if isinstance(fromFile.get("admm"), dict):
            d["admm"].update(fromFile.pop("admm"))
        d.update(fromFile)

    flags = {
        "tau": getattr(args, "tau", None),
        "alpha": getattr(args, "alpha", None),
        "beta": getattr(args, "beta", None),
        "k": args.k,
        "knn": getattr(args, "knn", None),
        "maxOuter": args.maxOuter,
        "relTol": getattr(args, "tol", None),
        "ridge": getattr(args, "ridge", None),
        "initMode": getattr(args, "init", None),
    }
    d.update({key: v for key, v in flags.items() if v is not None})
    d["seed"] = args.seed
    if getattr(args, "rho", None) is not None:
        d["admm"]["rho"] = args.rho
    d.update(extra)

    return lcpdlParams.fromDict(d)


def _loadData(args):
    ds = loadCSV(args.data)
    if getattr(args, "normalize", False):
        ds = normalizeSamples(ds)
    return ds


def cmdTrain(args):
    """Train a model and write it (and optionally its trace)"""

    try:
        params = buildParams(args)
        ds = _loadData(args)
        assert ds.c >= 2, f"{args.data}: training needs at least 2 classes"
    except (AssertionError, ValueError, OSError) as e:
        return _fail(e, 2)

    t0 = time.perf_counter()
    try:
        model, trace = localityPDL(params, verbose=args.verbose).fit(ds)
    except RUNTIME_ERRORS as e:
        return _fail(f"training failed: {e}", 1)
    wall = time.perf_counter() - t0

    try:
        saveModel(model, args.out)
        if args.trace:
            saveTrace(trace, args.trace)
    except OSError as e:
        return _fail(e, 1)

    print(f"final J {trace.rows[-1]['J']:.6e}")
    print(f"iterations {trace.iterations}{' (converged)' if trace.converged else ''}")
    print(f"wall time {wall:.3f} s")

    return 0


def _loadModelFor(args):
    try:
        return loadModel(args.model), None
    except (OSError, ValueError) as e:
        return None, _fail(f"could not load model: {e}", 1)


def cmdPredict(args):
    """Write predicted labels and soft scores for every sample"""

    model, code = _loadModelFor(args)
    if model is None:
        return code

    try:
        if args.unlabeled:
            X = loadFeatureCSV(args.data)
        else:
            X = loadCSV(args.data).features
        if args.normalize:
            norms = columnNorms(X)
            X = X / np.where(norms == 0, 1.0, norms)
    except (AssertionError, ValueError, OSError) as e:
        return _fail(e, 2)

    try:
        soft, labels = model.predict(X)
    except ValueError as e:
        return _fail(e, 1)

    out = pandas.DataFrame(soft.T)
    out.insert(0, "label", model.labelMap[labels])
    try:
        out.to_csv(args.out, header=False, index=False, float_format="%.17g")
    except OSError as e:
        return _fail(f"Could not write {args.out}: {e}", 1)

    print(f"Wrote {out.shape[0]} predictions to {args.out}")

    return 0


def cmdEval(args):
    """Print accuracy and the confusion table of a model on labeled data"""

    model, code = _loadModelFor(args)
    if model is None:
        return code

    try:
        ds = _loadData(args)
    except (AssertionError, ValueError, OSError) as e:
        return _fail(e, 2)

    try:
        accuracy, confusion = model.evaluate(ds)
    except ValueError as e:
        return _fail(e, 1)

    labels = [int(v) for v in model.labelMap]
    table = pandas.DataFrame(
        confusion,
        index=pandas.Index(labels, name="true"),
        columns=pandas.Index(labels, name="predicted"),
    )
    print(f"accuracy {accuracy:.4f}")
    print(table.to_string())

    if args.json:
        doc = {
            "accuracy": accuracy,
            "labels": labels,
            "confusion": confusion.tolist(),
        }
        try:
            with open(args.json, "w") as f:
                json.dump(doc, f, indent=2)
                f.write("\n")
        except OSError as e:
            return _fail(f"Could not write {args.json}: {e}", 1)

    return 0


def cmdSynth(args):
    """Write a synthetic Gaussian blob dataset"""

    try:
        ds = synthBlobs(
            args.classes, args.dim, args.per_class, args.sep, args.seed, normalize=False
        )
        if args.noise_var is not None:
            # separate stream from the blob draw
            ds = addGaussianNoise(ds, args.noise_var, [args.seed, 1])
        ds = normalizeSamples(ds)
    except (AssertionError, ValueError) as e:
        return _fail(e, 2)

    try:
        saveCSV(ds, args.out)
    except OSError as e:
        return _fail(e, 1)

    print(f"Wrote {ds.N} samples ({ds.c} classes, {ds.n} features) to {args.out}")

    return 0


def parseFixed(spec):
    """Parse ``name=value[,name=value...]`` into a dict of floats"""

    out = {}
    if not spec:
        return out
    for item in spec.split(","):
        if "=" not in item:
            raise ValueError(f"malformed --fix entry '{item}' (expected name=value)")
        name, val = item.split("=", 1)
        name = name.strip()
        if name not in SWEEPABLE:
            raise ValueError(f"--fix: unknown parameter '{name}'")
        try:
            out[name] = float(val)
        except ValueError:
            raise ValueError(f"--fix: '{val}' is not a number")

    return out


def parseGrid(spec):
    """Parse ``name[,name...]`` into a list of swept parameter names"""

    if not spec:
        return []
    names = [s.strip() for s in spec.split(",")]
    for name in names:
        if name not in SWEEPABLE:
            raise ValueError(f"--grid: unknown parameter '{name}'")
    if len(set(names)) != len(names):
        raise ValueError("--grid: repeated parameter")

    return names


def parseRange(spec):
    """Parse ``lo:hi`` into two floats with 0 < lo <= hi"""

    parts = spec.split(":")
    if len(parts) != 2:
        raise ValueError(f"malformed --range '{spec}' (expected lo:hi)")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ValueError(f"malformed --range '{spec}' (expected lo:hi)")
    if not (0 < lo <= hi):
        raise ValueError(f"--range must satisfy 0 < lo <= hi, got {spec}")

    return lo, hi


def cmdSweep(args):
    """Accuracy over a log grid of (tau, alpha, beta) values"""

    try:
        fixed = parseFixed(args.fix)
        grid = parseGrid(args.grid)
        overlap = set(fixed) & set(grid)
        if overlap:
            raise ValueError(f"parameter(s) {sorted(overlap)} both fixed and swept")
        lo, hi = parseRange(args.range)
        values = logGrid(lo, hi, args.steps)
        params = buildParams(args)
        ds = _loadData(args)
    except (AssertionError, ValueError, OSError) as e:
        return _fail(e, 2)

    try:
        rows = parameterSweep(
            ds,
            params,
            grid=grid,
            values=values,
            fixed=fixed,
            seed=args.seed,
            repeats=args.repeats,
        )
    except AssertionError as e:
        return _fail(e, 2)
    except RUNTIME_ERRORS as e:
        return _fail(f"sweep failed: {e}", 1)

    print(sweepTable(rows, grid).to_string())

    if args.out:
        try:
            with open(args.out, "w") as f:
                json.dump(rows, f, indent=2)
                f.write("\n")
        except OSError as e:
            return _fail(f"Could not write {args.out}: {e}", 1)

    return 0


def getParser():
    """Argument parser of the ``lcpdl`` command"""

    parser = argparse.ArgumentParser(
        prog="lcpdl",
        description="Locality-constrained projective dictionary learning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="Train a model on a labeled CSV file.")
    train.add_argument("--data", required=True, help="Training CSV (label,f1,...).")
    train.add_argument("--out", required=True, help="Output model file (JSON).")
    _addModelFlags(train)
    train.add_argument("--tau", type=float, help="Approximation weight.")
    train.add_argument("--alpha", type=float, help="Locality weight.")
    train.add_argument("--beta", type=float, help="Classification weight.")
    train.add_argument("--knn", type=int, help="Neighbors per atom.")
    train.add_argument("--rho", type=float, help="ADMM penalty.")
    train.add_argument("--tol", type=float, help="Relative objective change stop.")
    train.add_argument("--ridge", type=float, help="Absolute conditioning shift.")
    train.add_argument(
        "--init", choices=["gaussian", "samples"], help="Initialization mode."
    )
    train.add_argument("--trace", help="Optional output trace file (JSON).")
    train.add_argument(
        "--verbose", action="store_true", help="Print every outer iteration."
    )
    train.set_defaults(func=cmdTrain)

    predict = sub.add_parser("predict", help="Predict labels of CSV samples.")
    predict.add_argument("--model", required=True, help="Model file (JSON).")
    predict.add_argument("--data", required=True, help="Input CSV.")
    predict.add_argument("--out", required=True, help="Output CSV.")
    predict.add_argument(
        "--unlabeled",
        action="store_true",
        help="Input rows hold features only (no leading label).",
    )
    predict.add_argument(
        "--normalize", action="store_true", help="Scale samples to unit l2 norm."
    )
    predict.set_defaults(func=cmdPredict)

    ev = sub.add_parser("eval", help="Evaluate a model on a labeled CSV file.")
    ev.add_argument("--model", required=True, help="Model file (JSON).")
    ev.add_argument("--data", required=True, help="Labeled CSV.")
    ev.add_argument("--json", help="Optional output file for the results (JSON).")
    ev.add_argument(
        "--normalize", action="store_true", help="Scale samples to unit l2 norm."
    )
    ev.set_defaults(func=cmdEval)

    synth = sub.add_parser("synth", help="Write a synthetic Gaussian blob dataset.")
    synth.add_argument("--classes", type=int, required=True, help="Classes (int).")
    synth.add_argument("--dim", type=int, required=True, help="Dimension (int).")
    synth.add_argument(
        "--per-class", type=int, required=True, help="Samples per class (int)."
    )
    synth.add_argument("--sep", type=float, default=8.0, help="Center distance.")
    synth.add_argument("--seed", type=int, default=0, help="Random seed (int).")
    synth.add_argument("--out", required=True, help="Output CSV.")
    synth.add_argument("--noise-var", type=float, help="Added noise variance.")
    synth.set_defaults(func=cmdSynth)

    sweep = sub.add_parser("sweep", help="Grid search over tau, alpha and beta.")
    sweep.add_argument("--data", required=True, help="Labeled CSV.")
    sweep.add_argument("--fix", default="", help="Fixed values, e.g. tau=0.01.")
    sweep.add_argument("--grid", default="", help="Swept names, e.g. alpha,beta.")
    sweep.add_argument("--range", default="1e-6:1e6", help="Grid range lo:hi.")
    sweep.add_argument("--steps", type=int, default=7, help="Grid points (int).")
    sweep.add_argument(
        "--repeats", type=int, default=1, help="Random splits averaged per point (int)."
    )
    sweep.add_argument("--out", help="Optional output file for the rows (JSON).")
    _addModelFlags(sweep)
    sweep.set_defaults(func=cmdSweep)

    return parser


def main(argv=None):
    """Entry point of the ``lcpdl`` command

    Args:
        argv (list):
            Arguments (defaults to sys.argv[1:])

    Returns:
        int:
            Exit code

    """

    parser = getParser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
