"""Slow, direct-from-definition reference implementations used by the tests.

Nothing here imports from ``ffm``; each function follows the textbook
formula with plain loops so it can check the vectorized code paths.
"""

import itertools
import math

import numpy as np


def naive_dft_real_half(x):
    x = [float(v) for v in x]
    d = len(x)
    return np.array([sum(x[t] * math.cos(2 * math.pi * f * t / d) for t in range(d)) for f in range(d // 2)])


def naive_idft(spectrum):
    d = len(spectrum)
    out = []
    for t in range(d):
        acc = 0j
        for f in range(d):
            acc += spectrum[f] * complex(math.cos(2 * math.pi * f * t / d), math.sin(2 * math.pi * f * t / d))
        out.append(acc / d)
    return np.array(out)


def naive_signature(chunk):
    rows = [naive_dft_real_half(r) for r in chunk]
    return np.mean(rows, axis=0)


def naive_pipeline(chunks, n):
    """Per-sample DFT, chunk mean, population variance, top-n (ties to lower index)."""
    F = np.array([naive_signature(c) for c in chunks])
    k = len(F)
    var = []
    for j in range(F.shape[1]):
        mu = sum(F[:, j]) / k
        var.append(sum((v - mu) ** 2 for v in F[:, j]) / k)
    order = sorted(range(len(var)), key=lambda j: (-var[j], j))[:n]
    return F[:, order], order, np.array(var)


def entropy(labels):
    n = len(labels)
    counts = {}
    for v in labels:
        counts[v] = counts.get(v, 0) + 1
    return -sum(c / n * math.log(c / n) for c in counts.values())


def mutual_information(a, b):
    n = len(a)
    joint, ca, cb = {}, {}, {}
    for x, y in zip(a, b):
        joint[(x, y)] = joint.get((x, y), 0) + 1
        ca[x] = ca.get(x, 0) + 1
        cb[y] = cb.get(y, 0) + 1
    return sum(c / n * math.log(c * n / (ca[x] * cb[y])) for (x, y), c in joint.items())


def conditional_entropy(a, b):
    """H(a | b)."""
    n = len(a)
    total = 0.0
    for y in set(b):
        sub = [x for x, yy in zip(a, b) if yy == y]
        total += len(sub) / n * entropy(sub)
    return total


def external_scores(truth, pred):
    ht, hp = entropy(truth), entropy(pred)
    mi = mutual_information(truth, pred)
    if ht == 0 and hp == 0:
        nmi = 1.0
    elif ht == 0 or hp == 0:
        nmi = 0.0
    else:
        nmi = mi / math.sqrt(ht * hp)
    hom = 1.0 if ht == 0 else 1 - conditional_entropy(truth, pred) / ht
    comp = 1.0 if hp == 0 else 1 - conditional_entropy(pred, truth) / hp
    return {"nmi": nmi, "adjusted_rand": adjusted_rand_pairs(truth, pred), "completeness": comp, "homogeneity": hom}


def adjusted_rand_pairs(a, b):
    """ARI from explicit pair enumeration."""
    n = len(a)
    pairs = list(itertools.combinations(range(n), 2))
    if not pairs:
        return 1.0
    both = sum(1 for i, j in pairs if a[i] == a[j] and b[i] == b[j])
    same_a = sum(1 for i, j in pairs if a[i] == a[j])
    same_b = sum(1 for i, j in pairs if b[i] == b[j])
    expected = same_a * same_b / len(pairs)
    maximum = (same_a + same_b) / 2
    if maximum == expected:
        return 1.0
    return (both - expected) / (maximum - expected)


def _dist(p, q):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(p, q)))


def silhouette(X, labels):
    X = [list(map(float, p)) for p in X]
    vals = []
    for i, p in enumerate(X):
        own = [_dist(p, q) for j, q in enumerate(X) if labels[j] == labels[i] and j != i]
        if not own:
            vals.append(0.0)
            continue
        a = sum(own) / len(own)
        b = min(
            sum(_dist(p, q) for j, q in enumerate(X) if labels[j] == c) / sum(1 for v in labels if v == c)
            for c in set(labels) if c != labels[i]
        )
        top = max(a, b)
        vals.append(0.0 if top == 0 else (b - a) / top)
    return sum(vals) / len(vals)


def _centroid(points):
    return [sum(c) / len(points) for c in zip(*points)]


def calinski_harabasz(X, labels):
    X = [list(map(float, p)) for p in X]
    n, clusters = len(X), sorted(set(labels))
    g = _centroid(X)
    B = W = 0.0
    for c in clusters:
        members = [p for p, l in zip(X, labels) if l == c]
        m = _centroid(members)
        B += len(members) * _dist(m, g) ** 2
        W += sum(_dist(p, m) ** 2 for p in members)
    return B / (len(clusters) - 1) / (W / (n - len(clusters)))


def davies_bouldin(X, labels):
    X = [list(map(float, p)) for p in X]
    clusters = sorted(set(labels))
    cents, scat = {}, {}
    for c in clusters:
        members = [p for p, l in zip(X, labels) if l == c]
        cents[c] = _centroid(members)
        scat[c] = sum(_dist(p, cents[c]) for p in members) / len(members)
    worst = []
    for i in clusters:
        worst.append(max(
            (scat[i] + scat[j]) / _dist(cents[i], cents[j]) if _dist(cents[i], cents[j]) > 0 else 0.0
            for j in clusters if j != i
        ))
    return sum(worst) / len(worst)


def exhaustive_two_partition_inertia(X):
    """Minimal within-cluster sum of squares over all splits into 2 non-empty groups."""
    X = np.asarray(X, dtype=float)
    k = len(X)
    best = math.inf
    # fix point 0 in group A to skip mirrored partitions
    for mask in range(0, 2 ** (k - 1)):
        in_b = [(mask >> (i - 1)) & 1 == 1 if i > 0 else False for i in range(k)]
        if not any(in_b):
            continue
        total = 0.0
        for flag in (False, True):
            grp = X[[i for i in range(k) if in_b[i] == flag]]
            total += float(((grp - grp.mean(axis=0)) ** 2).sum())
        best = min(best, total)
    return best


def ced_direct(chunk):
    """CED metafeatures with explicit per-attribute loops."""
    X = [list(map(float, r)) for r in chunk]
    rows, d = len(X), len(X[0])
    cols = [[X[i][j] for i in range(rows)] for j in range(d)]

    def moments(col):
        mu = sum(col) / rows
        return mu, [sum((v - mu) ** p for v in col) / rows for p in (2, 3, 4)]

    means, stds, corrs, skews, kurts = [], [], [], [], []
    for j, col in enumerate(cols):
        mu, (m2, m3, m4) = moments(col)
        means.append(mu)
        stds.append(math.sqrt(m2))
        skews.append(m3 / m2 ** 1.5 if m2 > 0 else 0.0)
        kurts.append(m4 / m2 ** 2 - 3 if m2 > 0 else 0.0)
        acc = []
        for i, other in enumerate(cols):
            if i == j:
                continue
            mo, (o2, _, _) = moments(other)
            if m2 == 0 or o2 == 0:
                acc.append(0.0)
                continue
            cov = sum((a - mu) * (b - mo) for a, b in zip(col, other)) / rows
            acc.append(abs(cov / math.sqrt(m2 * o2)))
        corrs.append(sum(acc) / len(acc) if acc else 0.0)

    out = []
    for v in (means, stds, corrs, skews, kurts):
        mu = sum(v) / len(v)
        out += [mu, math.sqrt(sum((x - mu) ** 2 for x in v) / len(v))]
    return np.array(out)
