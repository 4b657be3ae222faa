#!/usr/bin/env python3
"""Regenerate the ground-truth Pareto fronts shipped in data/fronts/.

zdt3  : dense sweep of f1 in [0, 1] on the g = 1 manifold, nondominated filter,
        1000 evenly spaced survivors.
dtlz5 : the g = 0 degenerate curve, x1 swept over [0, 1] (x2 has no effect).
re5   : rocket injector (RE37). Dense uniform sampling of the unit box plus
        augmented-Tchebycheff refinement with L-BFGS-B from many weight vectors,
        followed by a nondominated filter.

Usage: python3 scripts/generate_fronts.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import minimize


def write_csv(path, pts):
    m = pts.shape[1]
    with open(path, "w") as fh:
        fh.write(",".join(f"f{i + 1}" for i in range(m)) + "\n")
        for row in pts:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def nondominated(pts):
    keep = np.ones(len(pts), dtype=bool)
    for i in range(len(pts)):
        if not keep[i]:
            continue
        p = pts[i]
        dominated_by_p = np.all(p <= pts, axis=1) & np.any(p < pts, axis=1)
        keep &= ~dominated_by_p
        dominates_p = np.all(pts <= p, axis=1) & np.any(pts < p, axis=1)
        if dominates_p.any():
            keep[i] = False
    return pts[keep]


def zdt3_front(count=1000):
    f1 = np.linspace(0.0, 1.0, 400001)
    f2 = 1.0 - np.sqrt(f1) - f1 * np.sin(10.0 * np.pi * f1)
    order = np.argsort(f1)
    f1, f2 = f1[order], f2[order]
    best = np.inf
    keep = []
    for i in range(len(f1)):
        if f2[i] < best:
            keep.append(i)
            best = f2[i]
    pts = np.stack([f1[keep], f2[keep]], axis=1)
    idx = np.unique(np.round(np.linspace(0, len(pts) - 1, count)).astype(int))
    return pts[idx]


def dtlz5_front(count=1000):
    x1 = np.linspace(0.0, 1.0, count)
    t1 = np.pi / 2.0 * x1
    c = np.cos(t1) * np.cos(np.pi / 4.0)
    return np.stack([c, c, np.sin(t1)], axis=1)


def re37(x):
    a, ha, oa, optt = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    f1 = (0.692 + 0.477 * a - 0.687 * ha - 0.080 * oa - 0.0650 * optt - 0.167 * a * a
          - 0.0129 * ha * a + 0.0796 * ha * ha - 0.0634 * oa * a - 0.0257 * oa * ha
          + 0.0877 * oa * oa - 0.0521 * optt * a + 0.00156 * optt * ha + 0.00198 * optt * oa
          + 0.0184 * optt * optt)
    f2 = (0.153 - 0.322 * a + 0.396 * ha + 0.424 * oa + 0.0226 * optt + 0.175 * a * a
          + 0.0185 * ha * a - 0.0701 * ha * ha - 0.251 * oa * a + 0.179 * oa * ha
          + 0.0150 * oa * oa + 0.0134 * optt * a + 0.0296 * optt * ha + 0.0752 * optt * oa
          + 0.0192 * optt * optt)
    f3 = (0.370 - 0.205 * a + 0.0307 * ha + 0.108 * oa + 1.019 * optt - 0.135 * a * a
          + 0.0141 * ha * a + 0.0998 * ha * ha + 0.208 * oa * a - 0.0301 * oa * ha
          - 0.226 * oa * oa + 0.353 * optt * a - 0.0497 * optt * oa - 0.423 * optt * optt
          + 0.202 * ha * a * a - 0.281 * oa * a * a - 0.342 * ha * ha * a
          - 0.245 * ha * ha * oa + 0.281 * oa * oa * ha - 0.184 * optt * optt * a
          - 0.281 * ha * a * oa)
    return np.stack([f1, f2, f3], axis=-1)


def re5_front(seed=0, samples=200000, weights=3000, cap=2000):
    rng = np.random.default_rng(seed)
    xs = rng.random((samples, 4))
    fs = re37(xs)
    ideal = fs.min(axis=0)
    scale = fs.max(axis=0) - ideal
    found = [nondominated(fs[np.argsort(fs.sum(axis=1))[:20000]])]
    for w in rng.dirichlet(np.ones(3), size=weights):
        obj = lambda x: np.max(w * (re37(x) - ideal) / scale) + 1e-4 * np.sum(w * re37(x) / scale)
        start = xs[np.argmin(np.max(w * (fs - ideal) / scale, axis=1))]
        res = minimize(obj, start, method="L-BFGS-B", bounds=[(0, 1)] * 4)
        found.append(re37(np.clip(res.x, 0, 1))[None, :])
    pts = nondominated(np.concatenate(found))
    if len(pts) > cap:
        pts = pts[np.sort(rng.choice(len(pts), cap, replace=False))]
    return pts


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "fronts")
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "zdt3.csv", zdt3_front())
    write_csv(out / "dtlz5.csv", dtlz5_front())
    write_csv(out / "re5.csv", re5_front())


if __name__ == "__main__":
    main()
