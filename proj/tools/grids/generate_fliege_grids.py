#!/usr/bin/env python3
"""Regenerate the bundled near-uniform sphere grids (core/data/grids/fliege_<Q>.csv).

Two-stage construction in the style of Fliege and Maier:
  1. minimise the Coulomb energy of Q = (N+1)^2 points on the sphere;
  2. refine nodes and weights by trust-region least squares until the cubature
     integrates every spherical harmonic of degree <= 2(N-1) exactly.

Output columns: theta,phi,weight (radians, weights sum to 4*pi).
"""
import argparse
import pathlib

import warnings

import numpy as np
from scipy.optimize import least_squares, minimize
from scipy.special import sph_harm

warnings.filterwarnings("ignore", category=DeprecationWarning)


def coulomb_points(q, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(q, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)

    def energy(flat):
        p = flat.reshape(q, 3)
        r = np.linalg.norm(p, axis=1, keepdims=True)
        u = p / r
        d = u[:, None, :] - u[None, :, :]
        dist = np.linalg.norm(d, axis=2) + np.eye(q)
        inv = 1.0 / dist
        np.fill_diagonal(inv, 0.0)
        e = 0.5 * inv.sum()
        # gradient wrt unit vectors, then chain rule through normalisation
        g = -(d * (inv ** 3)[:, :, None]).sum(axis=1)
        g = (g - (g * u).sum(axis=1, keepdims=True) * u) / r
        return e, g.ravel()

    res = minimize(energy, x.ravel(), jac=True, method="L-BFGS-B",
                   options={"maxiter": 20000, "gtol": 1e-12})
    p = res.x.reshape(q, 3)
    return p / np.linalg.norm(p, axis=1, keepdims=True)


def real_harmonics(degree, theta, phi):
    rows = []
    for n in range(degree + 1):
        for m in range(-n, n + 1):
            y = sph_harm(abs(m), n, phi, theta)
            if m < 0:
                rows.append(np.sqrt(2.0) * y.imag)
            elif m == 0:
                rows.append(y.real)
            else:
                rows.append(np.sqrt(2.0) * y.real)
    return np.array(rows)


def refine(points, degree):
    q = len(points)
    theta = np.arccos(np.clip(points[:, 2], -1, 1))
    phi = np.mod(np.arctan2(points[:, 1], points[:, 0]), 2 * np.pi)
    target = np.zeros((degree + 1) ** 2)
    target[0] = np.sqrt(4 * np.pi)
    # initial weights: least-squares fit at fixed nodes
    w0 = np.linalg.lstsq(real_harmonics(degree, theta, phi), target, rcond=None)[0]
    w0 = np.clip(w0, 1e-3, None)

    def residual(v):
        t, p, w = v[:q], v[q:2 * q], v[2 * q:]
        return real_harmonics(degree, t, p) @ w - target

    def jacobian(v):
        # column q of the residual depends only on node q, so one shifted
        # evaluation per coordinate gives every node's derivative at once
        t, p, w = v[:q], v[q:2 * q], v[2 * q:]
        h = 1e-7
        y = real_harmonics(degree, t, p)
        dt = (real_harmonics(degree, t + h, p) - real_harmonics(degree, t - h, p)) / (2 * h)
        dp = (real_harmonics(degree, t, p + h) - real_harmonics(degree, t, p - h)) / (2 * h)
        return np.hstack([dt * w, dp * w, y])

    res = least_squares(residual, np.concatenate([theta, phi, w0]), jac=jacobian, method="trf",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=20000)
    t, p, w = res.x[:q], res.x[q:2 * q], res.x[2 * q:]
    u = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=1)
    t = np.arccos(np.clip(u[:, 2], -1, 1))
    p = np.mod(np.arctan2(u[:, 1], u[:, 0]), 2 * np.pi)
    return t, p, w, np.max(np.abs(res.fun))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[2] / "core/data/grids"))
    ap.add_argument("--counts", default="16,25,36,49,64,100")
    ap.add_argument("--seeds", type=int, default=8)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for q in (int(c) for c in args.counts.split(",")):
        order = int(round(np.sqrt(q))) - 1
        degree = 2 * (order - 1)
        best = None
        for seed in range(args.seeds):
            t, p, w, err = refine(coulomb_points(q, seed), degree)
            ok = err < 1e-13 and np.all(w > 0)
            print(f"Q={q} seed={seed} degree={degree} residual={err:.2e} min_w={w.min():.3e} ok={ok}")
            if ok and (best is None or w.min() / w.max() > best[2].min() / best[2].max()):
                best = (t, p, w)
        if best is None:
            raise SystemExit(f"no exact grid found for Q={q}")
        t, p, w = best
        order_idx = np.lexsort((p, t))
        w = w * (4 * np.pi / w.sum())
        with open(out / f"fliege_{q}.csv", "w") as f:
            f.write("theta,phi,weight\n")
            for i in order_idx:
                f.write(f"{t[i]:.17g},{p[i]:.17g},{w[i]:.17g}\n")


if __name__ == "__main__":
    main()
