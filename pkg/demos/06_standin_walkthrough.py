"""End-to-end CLI run on a synthetic stand-in for an expression study.

Shapes mimic a real subtype study: n = 506 samples, K = 4 subtypes, a
48-gene panel X and 100 other genes Y.  Eight genes of each block carry
subtype signal, X's more strongly.  The real data are not bundled, so
nothing here reproduces published numbers; the point is the pipeline.
"""
import os
import subprocess
import sys
import tempfile

import numpy as np

from catgini import LabeledDataset, write_csv

n, K, p, q = 506, 4, 48, 100
gen = np.random.default_rng(12)
labels = np.repeat(np.arange(K), [200, 150, 100, 56])
x = gen.normal(size=(n, p)) + (gen.normal(size=(K, p)) * (np.arange(p) < 8) * 1.2)[labels]
y = gen.normal(size=(n, q)) + (gen.normal(size=(K, q)) * (np.arange(q) < 8) * 0.5)[labels]
xs = [f"x{j + 1}" for j in range(p)]
ys = [f"y{j + 1}" for j in range(q)]

tmp = tempfile.mkdtemp()
path = os.path.join(tmp, "standin.csv")
write_csv(LabeledDataset(np.hstack([x, y]), [f"type{k}" for k in labels]), path,
          feature_names=xs + ys, label_name="subtype")


def catgini(*args):
    cmd = [sys.executable, "-m", "catgini", *args]
    print("$ catgini", " ".join(a if len(a) < 40 else a[:37] + "..." for a in args))
    out = subprocess.run(cmd, capture_output=True, text=True)
    print(out.stdout or out.stderr)


# 1. is each block associated with the subtype at all?
catgini("independence", path, "--label", "subtype", "--features", ",".join(xs), "--R", "199")
catgini("independence", path, "--label", "subtype", "--features", ",".join(ys), "--R", "199")
# 2. is the panel more associated than the rest?
catgini("compare", path, "--label", "subtype", "--x", ",".join(xs), "--y", ",".join(ys))
# 3. does the rest add anything to the panel?
catgini("added-value", path, "--label", "subtype", "--x", ",".join(xs), "--y", ",".join(ys),
        "--method", "bootstrap", "--B", "500", "--seed", "1")
