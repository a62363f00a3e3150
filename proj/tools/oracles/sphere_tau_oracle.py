#!/usr/bin/env python3
"""Independent reference for the sphere benchmark tolerance.

Re-derives the x4 bicubic upsampling of the 2048-point Fibonacci unit sphere
with numpy/scipy (KD-tree from scipy, eigh from LAPACK, dense normal
equations) and prints the mean radial error of the children. The printed
value is frozen into tests/data/sphere_tau.txt and the acceptance suite
checks the C++ pipeline against it.
"""
import numpy as np
from scipy.spatial import cKDTree

N = 2048
K = 16
RIDGE = 1e-10
HIGHER_ORDER_DAMPING = 0.1
SWEEPS = 4
OFFSET_RADIUS = 0.5


PENALTY = np.array([RIDGE + (HIGHER_ORDER_DAMPING if i + j >= 3 else 0.0)
                    for j in range(4) for i in range(4)])


def fibonacci_sphere(n):
    i = np.arange(n, dtype=np.float64)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    theta = i * np.pi * (3.0 - np.sqrt(5.0))
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)


def monomials(u, v):
    return np.array([u**i * v**j for j in range(4) for i in range(4)])


def orient(col):
    for c in (2, 1, 0):
        if abs(col[c]) > 1e-12:
            return col if col[c] > 0 else -col
    return col


def frame(offsets):
    cov = offsets.T @ offsets / len(offsets)
    _, vecs = np.linalg.eigh(cov)          # ascending
    normal = orient(vecs[:, 0])
    second = orient(vecs[:, 1])
    first = np.cross(second, normal)
    return np.stack([first, second, normal], axis=1)


def ring_offsets():
    # m = 4: parent plus three points at 90, 210, 330 degrees
    out = [(0.0, 0.0)]
    for t in range(3):
        a = np.pi / 2 + 2 * np.pi * t / 3
        out.append((OFFSET_RADIUS * np.cos(a), OFFSET_RADIUS * np.sin(a)))
    return out


def main():
    pts = fibonacci_sphere(N)
    dist, idx = cKDTree(pts).query(pts, K)
    children = []
    for p in range(N):
        offsets = pts[idx[p]] - pts[p]
        scale = dist[p, -1]
        rot = frame(offsets)
        local = offsets @ rot / scale
        a_mat = np.array([monomials(u, v) for u, v, _ in local])
        w = local[:, 2]
        normal_mat = a_mat.T @ a_mat + np.diag(PENALTY)
        coeffs = np.zeros(16)
        for _ in range(SWEEPS + 1):
            coeffs += np.linalg.solve(normal_mat, a_mat.T @ (w - a_mat @ coeffs))
        coeffs[0] = 0.0
        for du, dv in ring_offsets():
            dw = monomials(du, dv) @ coeffs
            children.append(pts[p] + scale * rot @ np.array([du, dv, dw]))
    children = np.array(children)
    err = np.abs(np.linalg.norm(children, axis=1) - 1.0)
    print(f"{err.mean():.12e}")


if __name__ == "__main__":
    main()
