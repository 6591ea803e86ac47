"""Gini correlation on four points, small enough to check by hand.

Two classes {0, 0} and {1, 1}: every within-class distance is 0, so the
label explains all of the spread and rho = 1.  Moving to {0, 1} and {0, 1}
makes the class-conditional laws identical and the sample value goes
negative, which is allowed for the estimator.
"""
from catgini import LabeledDataset, PairedDataset, cgc_difference, gini_correlation, gmd

print("GMD of {0, 1, 3}:", gmd([0.0, 1.0, 3.0]))   # (1 + 3 + 2) / 3

sep = gini_correlation(LabeledDataset([0, 0, 1, 1], ["a", "a", "b", "b"]))
print("separated classes : delta", sep.delta, "class deltas", sep.class_deltas, "rho", sep.rho)

mix = gini_correlation(LabeledDataset([0, 1, 0, 1], ["a", "a", "b", "b"]))
print("mixed classes     : delta", mix.delta, "class deltas", mix.class_deltas, "rho", mix.rho)

# put the two columns side by side and compare them
pair = PairedDataset([0, 0, 1, 1], [0, 1, 0, 1], ["a", "a", "b", "b"])
print("D_n = rho(X) - rho(Y) =", cgc_difference(pair).d_n)
