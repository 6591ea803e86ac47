"""Permutation check that a single group is associated with the labels at all.

Worth running before a comparison: the comparison assumes each group has
non-zero Gini correlation with the labels.
"""
import numpy as np

from catgini import LabeledDataset, RngStream, permutation_independence_test

gen = np.random.default_rng(4)
labels = np.repeat(["a", "b", "c"], 15)
informative = gen.normal(size=(45, 3)) + np.repeat([0.0, 0.8, 1.6], 15)[:, None]
noise = gen.normal(size=(45, 3))

for name, x in (("informative", informative), ("noise", noise)):
    res = permutation_independence_test(LabeledDataset(x, labels), r=999, rng=RngStream(4))
    print(f"{name:12s} rho={res.rho_hat:7.4f}  p={res.p_value:.3f}")

# perfectly separated classes: the p-value counts every relabeling that keeps
# the two blocks intact, including the wholesale swap of the two labels
sep = LabeledDataset([0, 0, 0, 10, 10, 10], list("aaabbb"))
res = permutation_independence_test(sep, r=199, rng=RngStream(0))
print("separated {0,0,0}/{10,10,10}: rho", res.rho_hat, "p", res.p_value,
      "ties", int(np.count_nonzero(res.replicates >= 1.0)))
