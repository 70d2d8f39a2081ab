"""
Exact regularized discriminant directions
=========================================

Build a labelled synthetic dataset, solve the regularized problem exactly and
check that the eigen-decomposition route gives the same geometry.
"""
import numpy as np

from rfda_sketch import (classify_nearest_centroid, evd_projection, exact_g, geometric_spectrum,
                         stratified_split, synthesize_dataset)

# 120 samples in 500 dimensions, 4 classes, rank-30 geometric spectrum
raw, labels = synthesize_dataset(120, 500, 4, geometric_spectrum(30, 10.0, 0.85), 1.0, seed=0)
train, test = stratified_split(raw, labels, 0.75, seed=0)
print("train", train.a.shape, "test", test.a.shape, "class sizes", train.class_counts)

lam = 0.5
g = exact_g(train, lam).g
model = evd_projection(train, lam)
print("G is", g.shape, "; X is", model.x.shape)

# X X^T and G G^T agree, so every distance-based classifier sees the same picture
gg = g @ g.T
print("||XX^T - GG^T|| / ||GG^T|| =", np.linalg.norm(model.x @ model.x.T - gg) / np.linalg.norm(gg))

for name, p in (("G", g), ("X", model.x)):
    acc = classify_nearest_centroid(train.a @ p, train.labels, test.a @ p, test.labels)
    print(f"nearest-centroid accuracy with {name}: {acc:.3f}")
