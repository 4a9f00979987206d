#!python

"""
Accuracy of locality-constrained projective dictionary learning as Gaussian
noise of growing variance is added to a synthetic blob dataset.

Every variance uses the same noise draw (only its scale changes); samples are
renormalized, split 50/50 per class and a model is trained and scored.
"""

import argparse

import pandas

from localityPDL.experiments import noiseRobustness
from localityPDL.labeledDataset import loadCSV, synthBlobs
from localityPDL.lcpdlParams import PRESETS, lcpdlParams

if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Noise robustness of a locality-constrained projective dictionary"
    )
    parser.add_argument(
        "--data",
        type=str,
        help="Labeled CSV file (string). Skip to generate Gaussian blobs.",
    )
    parser.add_argument("--classes", type=int, default=5, help="Blob classes (int).")
    parser.add_argument("--dim", type=int, default=20, help="Blob dimension (int).")
    parser.add_argument(
        "--per-class", type=int, default=20, help="Blob samples per class (int)."
    )
    parser.add_argument("--sep", type=float, default=8.0, help="Blob separation.")
    parser.add_argument(
        "--variances",
        type=str,
        default="0,0.5,1,2,4",
        help="Comma separated noise variances (string).",
    )
    parser.add_argument("--preset", choices=sorted(PRESETS), default="cbcl")
    parser.add_argument("--atoms-per-class", type=int, default=4)
    parser.add_argument("--repeats", type=int, default=1, help="Splits per variance.")
    parser.add_argument("--seed", type=int, default=0, help="Random seed (int).")
    parser.add_argument("--csv", type=str, help="Write the table to this CSV file.")

    args = parser.parse_args()

    if args.data:
        ds = loadCSV(args.data)
    else:
        # noise is added to the raw blobs and the samples renormalized afterwards
        ds = synthBlobs(
            args.classes, args.dim, args.per_class, args.sep, args.seed, normalize=False
        )

    variances = [float(v) for v in args.variances.split(",")]
    params = lcpdlParams.fromPreset(
        args.preset, k=args.atoms_per_class, seed=args.seed
    )

    print(f"Dataset: {ds.N} samples, {ds.c} classes, {ds.n} features")
    rows = noiseRobustness(
        ds, variances, params, seed=args.seed, repeats=args.repeats
    )
    table = pandas.DataFrame(rows)
    print(table.to_string(index=False))

    if args.csv:
        table.to_csv(args.csv, index=False)
        print(f"Wrote {args.csv}")
