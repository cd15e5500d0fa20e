"""Independent reference implementations used to check the package.

Everything here is written with plain loops and stdlib math, deliberately
avoiding the vectorized code paths under test.
"""

from __future__ import annotations

import math


def oracle_hash(vector, matrices):
    """1-based argmax indices of vector against each matrix, first-wins ties."""
    code = []
    for mat in matrices:
        d = len(mat)
        q = len(mat[0])
        proj = [sum(vector[a] * mat[a][j] for a in range(d)) for j in range(q)]
        best = 0
        for j in range(1, q):
            if proj[j] > proj[best]:
                best = j
        code.append(best + 1)
    return code


def oracle_point_similarity(a, b, q):
    dist = math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))
    sim = 1.0 - dist / ((q - 1) * math.sqrt(len(a)))
    return min(1.0, max(0.0, sim))


def oracle_similarity_matrix(codes_a, codes_b, q):
    return [[oracle_point_similarity(a, b, q) for b in codes_b] for a in codes_a]


def oracle_greedy_score_set(sim, n_p):
    """All mean scores reachable by greedy unique selection under any tie order.

    Exponential in ties; intended for matrices up to about 5 x 5.
    """
    rows = len(sim)
    cols = len(sim[0])
    results = set()

    def recurse(used_rows, used_cols, picked):
        if len(picked) == n_p:
            results.add(round(sum(picked) / n_p, 12))
            return
        best = None
        for r in range(rows):
            if r in used_rows:
                continue
            for c in range(cols):
                if c in used_cols:
                    continue
                if best is None or sim[r][c] > best:
                    best = sim[r][c]
        if best is None:
            return
        for r in range(rows):
            if r in used_rows:
                continue
            for c in range(cols):
                if c in used_cols or sim[r][c] != best:
                    continue
                recurse(used_rows | {r}, used_cols | {c}, picked + [best])

    recurse(frozenset(), frozenset(), [])
    return results


def oracle_flat_topk_score(sim, n_p):
    values = sorted((v for row in sim for v in row), reverse=True)
    return sum(values[:n_p]) / n_p


def oracle_eer(genuine, impostor):
    """Brute-force threshold scan; first minimizer of |FMR - FNMR| wins."""
    thresholds = sorted(set(genuine) | set(impostor))
    best_diff = None
    best_eer = None
    for t in thresholds:
        fmr = sum(1 for s in impostor if s >= t) / len(impostor)
        fnmr = sum(1 for s in genuine if s < t) / len(genuine)
        diff = abs(fmr - fnmr)
        if best_diff is None or diff < best_diff:
            best_diff = diff
            best_eer = (fmr + fnmr) / 2.0
    return best_eer


def oracle_wrap(theta):
    while theta < 0.0:
        theta += 2.0 * math.pi
    while theta >= 2.0 * math.pi:
        theta -= 2.0 * math.pi
    return theta


def oracle_angle_distance(a, b):
    delta = abs(oracle_wrap(a) - oracle_wrap(b))
    return min(delta, 2.0 * math.pi - delta)


def oracle_cylinders(template, params):
    """Per-cell loop encoder mirroring the documented construction."""
    points = [(p.x, p.y, p.theta) for p in template.points]
    g = 2.0 * params.radius / params.ns
    out = []
    for k, (xk, yk, tk) in enumerate(points):
        cells = []
        for ix in range(params.ns):
            for iy in range(params.ns):
                cx = -params.radius + g * (ix + 0.5)
                cy = -params.radius + g * (iy + 0.5)
                outside = math.hypot(cx, cy) > params.radius
                ax = xk + math.cos(tk) * cx - math.sin(tk) * cy
                ay = yk + math.sin(tk) * cx + math.cos(tk) * cy
                for h in range(1, params.nd + 1):
                    if outside:
                        cells.append(0.0)
                        continue
                    phi = (2.0 * h - 1.0) * math.pi / params.nd
                    total = 0.0
                    for l, (xl, yl, tl) in enumerate(points):
                        if l == k:
                            continue
                        if math.hypot(xl - xk, yl - yk) > params.radius:
                            continue
                        spatial = math.exp(-((ax - xl) ** 2 + (ay - yl) ** 2) / (2.0 * params.sigma_s**2))
                        delta = oracle_angle_distance(phi, tk - tl)
                        directional = math.exp(-(delta**2) / (2.0 * params.sigma_d**2))
                        total += spatial * directional
                    cells.append(min(total, 1.0))
        out.append(cells)
    return out


def oracle_genuine_count(fingers, samples):
    return fingers * samples * (samples - 1) // 2


def oracle_impostor_count(fingers):
    return fingers * (fingers - 1) // 2
