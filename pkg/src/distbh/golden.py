"""Brute-force reference values for the oracle, written to a text fixture.

Kept independent of :mod:`distbh.oracle`: the alternative CDF is evaluated in
closed form (the uniform average of Phi has antiderivative x Phi(x) + phi(x))
and the threshold is located on a dense 1e-6 grid instead of by bisection.

Fixture format: one record per line, whitespace separated ``key=value``
pairs; ``#`` starts a comment.
"""

import numpy as np
from scipy.special import ndtr, ndtri

GRID_STEP = 1e-6


def _phi(x):
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)


def _psi(x):
    return x * ndtr(x) + _phi(x)


def closed_form_cdf(t, mu_base, half_width, symmetric=True):
    """F(t) for mu uniform on mu_base +- half_width (mirrored sign irrelevant)."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        z = -ndtri(t / 2.0)  # = Phi^{-1}(1 - t/2)
    a, b = mu_base - half_width, mu_base + half_width
    if half_width == 0.0:
        f = ndtr(a - z) + ndtr(-a - z)
    else:
        f = (_psi(b - z) - _psi(a - z) + _psi(-a - z) - _psi(-b - z)) / (b - a)
    # the two-sided p-value depends on |mu| only, so ``symmetric`` does not enter
    return np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, f))


def grid_tau(alpha, r0, mu_base, half_width, step=GRID_STEP):
    """Largest root of F(t) = beta t located on a ``step`` grid, then secant-refined."""
    beta = (1.0 / alpha - r0) / (1.0 - r0)
    k = np.arange(1, int(np.floor(1.0 / beta / step)) + 1)
    t = k * step
    g = closed_form_cdf(t, mu_base, half_width) - beta * t
    pos = np.flatnonzero(g > 0.0)
    if pos.size == 0:
        return 0.0
    j = pos[-1]
    if j + 1 >= t.size:
        return float(t[j])
    t0, t1, g0, g1 = t[j], t[j + 1], g[j], g[j + 1]
    return float(t0 - g0 * (t1 - t0) / (g1 - g0))


CASES = [
    # (name, alpha, r0, mu_base, half_width)
    ("point3_r08", 0.2, 0.8, 3.0, 0.0),
    ("point3_r05", 0.2, 0.5, 3.0, 0.0),
    ("exp1_r08", 0.2, 0.8, 3.0, 0.5),
    ("exp1_r095", 0.2, 0.95, 3.0, 0.5),
    ("mu2_r085", 0.2, 0.85, 2.0, 0.5),
]
CDF_POINTS = [0.001, 0.01, 0.05, 0.2, 0.5, 0.9]
CDF_MODELS = [(3.0, 0.0), (3.0, 0.5), (2.0, 0.5), (5.0, 0.5)]


def build_records():
    recs = []
    for mu, hw in CDF_MODELS:
        for t in CDF_POINTS:
            f = float(closed_form_cdf(t, mu, hw))
            recs.append(dict(kind="alt_cdf", mu_base=mu, half_width=hw, t=t, value=f))
    for name, alpha, r0, mu, hw in CASES:
        tau = grid_tau(alpha, r0, mu, hw)
        recs.append(dict(kind="tau_star", name=name, alpha=alpha, r0=r0, mu_base=mu,
                         half_width=hw, value=tau))
        power = float(closed_form_cdf(tau, mu, hw)) if tau > 0 else 0.0
        recs.append(dict(kind="power_limit", name=name, alpha=alpha, r0=r0, mu_base=mu,
                         half_width=hw, value=power))
    return recs


def write_fixture(path):
    recs = build_records()
    with open(path, "w") as fh:
        fh.write(f"# golden oracle values; grid step {GRID_STEP:g}, closed-form F\n")
        for r in recs:
            fh.write(" ".join(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}"
                              for k, v in r.items()) + "\n")
    return len(recs)


def read_fixture(path):
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            rec = {}
            for tok in line.split():
                k, v = tok.split("=", 1)
                try:
                    rec[k] = float(v)
                except ValueError:
                    rec[k] = v
            out.append(rec)
    return out


def lookup(records, kind, **match):
    for r in records:
        if r.get("kind") == kind and all(r.get(k) == v for k, v in match.items()):
            return r
    raise KeyError(f"no {kind} record matching {match}")
