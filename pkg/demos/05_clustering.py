"""Cluster points around several ellipses and draw the result.

Writes demo_out/ellipses.svg and demo_out/circles.svg.

Run: python demos/05_clustering.py
"""
import os
import warnings

import numpy as np

from ctef import adjusted_rand_index, cluster, matched_accuracy
from ctef.datasim import THREE_ELLIPSES, concentric_circles, noisy_ellipses
from ctef.svg import ellipse_outline, scatter_plot

os.makedirs("demo_out", exist_ok=True)


def draw(path, X, state, title):
    outlines = [ellipse_outline(f.center, f.rotation, f.axis_lengths) for f in state.fits]
    with open(path, "w") as fh:
        fh.write(scatter_plot(X, state.labels, outlines, title))


X, labels = noisy_ellipses(300, THREE_ELLIPSES, 0.01, np.random.default_rng(0))
state = cluster(X, 3, rng=np.random.default_rng(0))
print(f"three ellipses: ARI {adjusted_rand_index(labels, state.labels):.3f} after {state.steps} steps")
for f in state.fits:
    print("  center", f.center.round(2), "axes", np.sort(f.axis_lengths).round(2))
draw("demo_out/ellipses.svg", X, state, "three ellipses")

# Concentric circles are hard for a k-means start: it cuts both rings in
# half, and alternating fits keep that split. Random restarts escape it.
X, labels = concentric_circles(100, noise=0.01, rng=np.random.default_rng(0))
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    km = cluster(X, 2, rng=np.random.default_rng(0))
    rnd = cluster(X, 2, rng=np.random.default_rng(0), init="random", n_init=10)
print(f"circles, k-means start:      accuracy {matched_accuracy(labels, km.labels):.2f}")
print(f"circles, 10 random restarts: accuracy {matched_accuracy(labels, rnd.labels):.2f}")
draw("demo_out/circles.svg", X, rnd, "concentric circles")
