"""Best-known 13-point configuration on the unit sphere (maximal minimum angle).

Independent reference for the demo13 data: multi-start SLSQP on
    maximize s  subject to  |p_i - p_j|^2 >= s,  |p_i| = 1,
followed by extraction of the contact graph (pairs within 1e-7 rad of the
minimum angle). Writes JSON to stdout.
"""
import json
import numpy as np
from scipy.optimize import minimize

N = 13


def unpack(z):
    return z[:-1].reshape(N, 3), z[-1]


def solve(rng):
    p = rng.normal(size=(N, 3))
    p /= np.linalg.norm(p, axis=1)[:, None]
    iu = np.triu_indices(N, 1)
    d2 = ((p[:, None, :] - p[None, :, :]) ** 2).sum(-1)[iu]
    z0 = np.concatenate([p.ravel(), [d2.min()]])
    cons = [
        {"type": "ineq", "fun": lambda z: (lambda P, s: ((P[:, None, :] - P[None, :, :]) ** 2).sum(-1)[iu] - s)(*unpack(z))},
        {"type": "eq", "fun": lambda z: (unpack(z)[0] ** 2).sum(1) - 1.0},
    ]
    res = minimize(lambda z: -z[-1], z0, constraints=cons, method="SLSQP",
                   options={"maxiter": 2000, "ftol": 1e-15})
    P, _ = unpack(res.x)
    P /= np.linalg.norm(P, axis=1)[:, None]
    return P


def min_angle(P):
    g = np.clip(P @ P.T, -1, 1)
    np.fill_diagonal(g, -1)
    return np.arccos(g.max())


rng = np.random.default_rng(20040609)
best = None
for _ in range(300):
    P = solve(rng)
    a = min_angle(P)
    if best is None or a > best[0]:
        best = (a, P)
a, P = best
ang = np.arccos(np.clip(P @ P.T, -1, 1))
edges = [(i, j) for i in range(N) for j in range(i + 1, N) if ang[i, j] < a + 1e-7]
print(json.dumps({
    "min_angle_deg": float(np.degrees(a)),
    "points": [[float(x) for x in p] for p in P],
    "contacts": edges,
}, indent=1))
