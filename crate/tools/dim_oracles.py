"""Reference values for the per-step interestingness formulas.

Computed with numpy/scipy independently of the Rust code and written as a
Rust fixture module. Regenerate with:

    python3 tools/dim_oracles.py > crates/ixdrl/tests/fixtures/dim_cases.rs
"""
import math

import numpy as np
from scipy.spatial.distance import pdist
from scipy.stats import entropy

rng = np.random.default_rng(20240611)


def f(x):
    x = float(x)
    r = repr(x)
    return r if ("." in r or "e" in r or "inf" in r or "nan" in r) else r + ".0"


def vec(xs):
    return "&[" + ", ".join(f(x) for x in xs) + "]"


def simplex(n, alpha=1.0):
    p = rng.dirichlet([alpha] * n)
    return p / p.sum()


out = ["// @generated by tools/dim_oracles.py; do not edit.", ""]

# value: (v, lo, hi, expected)
rows = [(2.0, 2.0, 6.0), (6.0, 2.0, 6.0), (4.0, 2.0, 6.0), (3.0, 3.0, 3.0), (-1.5, -2.0, 0.5)]
rows += [tuple(sorted(rng.uniform(-5, 5, 2))) for _ in range(7)]
rows = [(r[0], r[0], r[1]) if len(r) == 2 else r for r in rows]
cases = []
for i, r in enumerate(rows):
    lo, hi = r[1], r[2]
    v = r[0] if i < 5 else rng.uniform(lo, hi)
    exp = 0.0 if hi == lo else 2 * (v - lo) / (hi - lo) - 1
    cases.append(f"    ({f(v)}, {f(lo)}, {f(hi)}, {f(exp)}),")
out += ["pub const VALUE: &[(f64, f64, f64, f64)] = &["] + cases + ["];", ""]

# confidence, discrete: (probs, expected)
dists = [[1.0], [0.5, 0.5], [1.0, 0.0], [0.25] * 4, [0.5, 0.5, 0.0, 0.0], [0.7, 0.2, 0.1], [0.9, 0.05, 0.05, 0.0]]
dists += [simplex(n, a) for n, a in [(2, 1.0), (3, 0.3), (5, 1.0), (6, 5.0), (9, 0.5), (4, 0.1)]]
cases = []
for p in dists:
    p = np.asarray(p, dtype=float)
    exp = 1.0 if len(p) < 2 else 1 - 2 * entropy(p) / math.log(len(p))
    cases.append(f"    ({vec(p)}, {f(exp)}),")
out += ["pub const CONFIDENCE_DISCRETE: &[(&[f64], f64)] = &["] + cases + ["];", ""]

# confidence, gaussian: (mean, std, lower, upper, expected)
cases = []
ref = 2.0 / math.sqrt(2 * math.pi * math.e)  # stddev whose entropy matches the uniform on [-1, 1]
gauss = [([0.0], [1e-12]), ([0.0], [ref]), ([0.3], [ref / 2])]
gauss += [(rng.uniform(-1, 1, d), rng.uniform(0.01, 0.6, d)) for d in [1, 1, 2, 3]]
for mean, std in gauss:
    mean, std = np.asarray(mean), np.asarray(std)
    d = len(mean)
    lower = -np.ones(d)
    upper = np.ones(d)
    ratio = np.prod(np.sqrt(2 * math.pi * math.e) * std / (upper - lower))
    exp = 1 - 2 * min(1.0, ratio)
    cases.append(f"    ({vec(mean)}, {vec(std)}, {vec(lower)}, {vec(upper)}, {f(exp)}),")
out += ["pub const CONFIDENCE_GAUSSIAN: &[(&[f64], &[f64], &[f64], &[f64], f64)] = &["] + cases + ["];", ""]

# goal conduciveness: (v_t, v_prev, v_prev2 or NaN, rho, expected)
cases = []
hand = [(0.5, 0.5, None, 100.0), (0.2, 0.1, 0.0, 100.0), (0.6, 0.5, None, 100.0), (0.4, 0.5, None, 100.0), (0.5, 0.5, 0.5, 100.0),
        (0.6, 0.5, 0.4, 1.0), (0.3, 0.5, 0.9, 10.0)]
hand += [(rng.uniform(), rng.uniform(), rng.uniform() if k % 2 else None, float(rng.choice([1, 10, 100])))
         for k in range(6)]
for vt, vp, vp2, rho in hand:
    slope = vt - vp if vp2 is None else (3 * vt - 4 * vp + vp2) / 2
    x = rho * slope
    exp = x / math.sqrt(1 + x * x)
    cases.append(f"    ({f(vt)}, {f(vp)}, {f(vp2) if vp2 is not None else 'f64::NAN'}, {f(rho)}, {f(exp)}),")
out += ["pub const GOAL: &[(f64, f64, f64, f64, f64)] = &["] + cases + ["];", ""]

# incongruity: (r, v_t, v_prev, gamma, width, expected)
cases = []
hand = [(1.0, 2.0, 2.0, 0.9, 10.0), (0.5, 2.0, 1.5, 0.5, 3.0), (0.0, 1.0, 1.0, 1.0, 2.0), (1.0, 0.0, 0.0, 0.9, 2.0), (-1.0, 0.0, 0.0, 0.9, 0.5), (0.0, 0.0, 0.0, 0.9, 0.0),
        (0.5, 2.0, 1.0, 0.99, 4.0)]
hand += [(rng.uniform(-1, 1), rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.5, 1.0), rng.uniform(0.5, 4))
         for _ in range(7)]
for r, vt, vp, g, w in hand:
    exp = 0.0 if w <= 0 else float(np.clip((r + g * vt - vp) / w, -1, 1))
    cases.append(f"    ({f(r)}, {f(vt)}, {f(vp)}, {f(g)}, {f(w)}, {f(exp)}),")
out += ["pub const INCONGRUITY: &[(f64, f64, f64, f64, f64, f64)] = &["] + cases + ["];", ""]

# riskiness from a policy: (probs, expected)
dists = [[0.5, 0.5], [1.0, 0.0], [0.4, 0.4, 0.2], [0.6, 0.3, 0.1], [0.7, 0.2, 0.1], [0.25] * 4]
dists += [simplex(n, a) for n, a in [(2, 1.0), (3, 0.5), (4, 1.0), (6, 0.2), (8, 2.0)]]
cases = []
for p in dists:
    s = np.sort(np.asarray(p, dtype=float))
    exp = 2 * (s[-1] - s[-2]) - 1
    cases.append(f"    ({vec(p)}, {f(exp)}),")
out += ["pub const RISK_POLICY: &[(&[f64], f64)] = &["] + cases + ["];", ""]

# riskiness from action values: (q, width, expected)
cases = []
qs = [([1.0, 1.0], 2.0), ([0.0, 2.0], 2.0), ([1.0, 3.0], 4.0), ([0.0, 1.0, 0.5], 2.0), ([3.0, 3.0, 3.0], 0.0)]
qs += [(rng.uniform(-2, 2, int(rng.integers(2, 6))), 4.0) for _ in range(6)]
for q, w in qs:
    q = np.asarray(q, dtype=float)
    exp = -1.0 if w <= 0 else float(np.clip(2 * (q.max() - q.min()) / w - 1, -1, 1))
    cases.append(f"    ({vec(q)}, {f(w)}, {f(exp)}),")
out += ["pub const RISK_VALUES: &[(&[f64], f64, f64)] = &["] + cases + ["];", ""]


def leik(p):
    c = np.cumsum(p)
    c = np.clip(c, 0, 1)
    return 2 * np.minimum(c, 1 - c).sum() / (len(p) - 1)


# stochasticity from return distributions: (flattened probs, atoms per action, expected)
cases = []
hand = [[[1.0, 0.0, 0.0]], [[0.5, 0.0, 0.5]], [[0.5, 0.5, 0.0]], [[0.0, 1.0, 0.0]], [[1 / 3] * 3], [[0.5, 0.5], [1.0, 0.0]]]
hand += [[simplex(k, a) for _ in range(int(rng.integers(1, 5)))] for k, a in [(5, 1.0), (11, 0.5), (21, 2.0), (51, 1.0), (3, 0.2), (7, 5.0), (2, 1.0)]]
for qs in hand:
    k = len(qs[0])
    exp = float(np.mean([1 - 4 * abs(leik(np.asarray(p)) - 0.5) for p in qs]))
    flat = [x for p in qs for x in p]
    cases.append(f"    ({vec(flat)}, {k}, {f(exp)}),")
out += ["pub const STOCH_ATOMS: &[(&[f64], usize, f64)] = &["] + cases + ["];", ""]

# stochasticity from gaussian predictions: (flattened means, flattened stds, dim, scale, expected)
cases = []
# zero-spread limit and a coefficient of variation of exactly one half
for m, s_, scale in [([0.5], [1e-12], 1.0), ([0.3], [0.4], 1.0)]:
    m, s_ = np.asarray(m), np.asarray(s_)
    cv = s_ / (s_ + np.abs(m) + scale / 10)
    exp = float(np.mean(1 - 4 * np.abs(cv - 0.5)))
    cases.append(f"    ({vec(m)}, {vec(s_)}, 1, {f(scale)}, {f(exp)}),")
for _ in range(4):
    k = int(rng.integers(2, 5))
    d = int(rng.integers(1, 3))
    m = rng.uniform(-1, 1, k * d)
    s = rng.uniform(0.01, 1.0, k * d)
    scale = float(rng.uniform(0.5, 2))
    cv = s / (s + np.abs(m) + scale / 10)
    exp = float(np.mean(1 - 4 * np.abs(cv - 0.5)))
    cases.append(f"    ({vec(m)}, {vec(s)}, {d}, {f(scale)}, {f(exp)}),")
out += ["pub const STOCH_GAUSSIAN: &[(&[f64], &[f64], usize, f64, f64)] = &["] + cases + ["];", ""]

# familiarity, point members: (flattened members, dim, expected)
cases = []
hand = [[[1.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]], list(np.eye(8)), [[1.0, 0.0], [-1.0, 0.0]], [[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]]
hand += [[rng.normal(size=d) for _ in range(k)] for k, d in [(2, 3), (3, 2), (5, 4), (4, 1), (6, 6), (10, 3)]]
for ms in hand:
    d = len(ms[0])
    dist = np.clip(pdist(np.asarray(ms, dtype=float), "cosine"), 0, 1)
    k = len(ms)
    exp = float(np.clip(1 - 2 * (2 * dist.sum()) / (k * k), -1, 1))
    flat = [x for m in ms for x in m]
    cases.append(f"    ({vec(flat)}, {d}, {f(exp)}),")
out += ["pub const FAMILIARITY_POINT: &[(&[f64], usize, f64)] = &["] + cases + ["];", ""]


def hellinger_sq(m1, s1, m2, s2):
    bc = np.prod(np.sqrt(2 * s1 * s2 / (s1 ** 2 + s2 ** 2)) * np.exp(-((m1 - m2) ** 2) / (4 * (s1 ** 2 + s2 ** 2))))
    return float(np.clip(1 - bc, 0, 1))


cases = []
for k, d in [(2, 1), (3, 2), (5, 3), (4, 1)]:
    m = rng.normal(size=(k, d))
    s = rng.uniform(0.1, 1.5, size=(k, d))
    tot = sum(hellinger_sq(m[i], s[i], m[j], s[j]) for i in range(k) for j in range(k) if i != j)
    exp = float(np.clip(1 - 2 * tot / (k * k), -1, 1))
    cases.append(f"    ({vec(m.ravel())}, {vec(s.ravel())}, {d}, {f(exp)}),")
out += ["pub const FAMILIARITY_GAUSSIAN: &[(&[f64], &[f64], usize, f64)] = &["] + cases + ["];"]

print("\n".join(out))
