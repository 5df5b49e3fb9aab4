"""Constructive synthesis of LN-Nets that memorize a labeled point set.

Every point is first projected onto a line (``init_direction``). Each merge
layer takes two same-label values ``p_i < p_j``, shifts the pair to
``(-d, h)`` and ``(d, h)`` with ``d = (p_j - p_i) / 2`` and a lift height
``h > 0``, projects onto the unit circle and keeps the ``y`` coordinate.
``p_i`` and ``p_j`` land on the same value; all other points keep their
relative distinctness except mirror images about the midpoint. The
parallel-breaking step (lift by ``(0, 1)``, project to the circle, read off
a random direction) removes mirror pairs across labels.

``pma`` follows the plain rule: leftmost active point, its nearest
same-label partner to the right, ``h = d``. The synthesizers default to a
conditioned schedule that picks the pair and ``h`` so the round-off carried
by deep nets stays far below the gaps between labels.

Points travel as 2-vectors ``(p, 0)``; each step is an affine map, a
spherical projection on R^2 and another affine map, so it compiles into one
LN layer on R^3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .datasets import LabeledDataset
from .errors import AmbiguityError, SeparationFailureError, ShapeError, ValidationError
from .net import AffineStage, LnNet, SpStage, compile_stages, forward, forward_batch, run_stages
from .rng import SplitMix64
from .tensor_core import as_mat, as_vec

DRAW_BUDGET = 1000
ATTEMPTS = 8
_ATTEMPT_STREAM = 1 << 40
_PROJ_Y = np.array([[0.0, 1.0], [0.0, 0.0]])


@dataclass
class LayerRecord:
    kind: str                      # "merge" or "pba"
    values: list                   # x-coordinates after this layer
    pivots: tuple | None = None    # (i, j) for merge layers
    shift: tuple | None = None     # ((p_i + p_j) / 2, -height); height (p_j - p_i) / 2 by default
    angles: list | None = None     # polar angle of each shifted point
    merges: list = field(default_factory=list)   # index groups that became equal
    confusions: list = field(default_factory=list)
    direction: list | None = None  # PBA direction
    roundoff: float = 0.0          # first-order bound on accumulated floating-point error

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "values": self.values, "merges": self.merges, "roundoff_bound": self.roundoff}
        if self.kind == "merge":
            out.update(pivots=list(self.pivots), shift=list(self.shift), angles=self.angles)
        else:
            out["direction"] = self.direction
        if self.confusions:
            out["confusions"] = self.confusions
        return out


@dataclass
class SynthesisTrace:
    initial_values: list
    labels: list
    layers: list = field(default_factory=list)
    init_direction: list | None = None

    @property
    def merge_layers(self) -> int:
        return sum(1 for r in self.layers if r.kind == "merge")

    @property
    def pba_layers(self) -> int:
        return sum(1 for r in self.layers if r.kind == "pba")

    @property
    def confusions(self) -> list:
        return [c for r in self.layers for c in r.confusions]

    def to_dict(self) -> dict:
        return {
            "init_direction": self.init_direction,
            "labels": self.labels,
            "initial_values": self.initial_values,
            "layers": [r.to_dict() for r in self.layers],
        }


@dataclass(eq=False)
class SynthesisResult:
    net: LnNet
    trace: SynthesisTrace
    readout: list       # [(prototype value, class id)], sorted by value
    stages: list
    accuracy: float
    max_proto_error: float
    attempt: int = 0    # index of the random redraw that produced this net

    @property
    def depth(self) -> int:
        return self.net.depth

    def readout_dict(self) -> dict:
        return {"prototypes": [{"value": v, "label": c} for v, c in self.readout]}


# -- helpers -------------------------------------------------------------------

def _groups(vals: np.ndarray, eps_eq: float) -> np.ndarray:
    """Group id per index; values within ``eps_eq`` of a group's first member share it."""
    order = np.argsort(vals, kind="stable")
    gid = np.empty(vals.size, dtype=np.int64)
    g, anchor = -1, None
    for k in order:
        if anchor is None or vals[k] - anchor > eps_eq:
            g += 1
            anchor = vals[k]
        gid[k] = g
    return gid


def _snap(vals: np.ndarray, gid: np.ndarray) -> np.ndarray:
    """Replace every member of a group by the value at its lowest index."""
    first = np.full(int(gid.max()) + 1, vals.size)
    np.minimum.at(first, gid, np.arange(vals.size))
    return vals[first[gid]]


def _merge_events(before: np.ndarray, after: np.ndarray, labels: np.ndarray):
    """Groups of ``after`` that collect more than one group of ``before``."""
    merges, confusions = [], []
    n_after = int(after.max()) + 1
    pairs = np.unique(np.stack([after, before]), axis=1)
    joined = np.nonzero(np.bincount(pairs[0], minlength=n_after) > 1)[0]
    for g in joined:
        idx = np.nonzero(after == g)[0]
        merges.append([int(k) for k in idx])
        if np.unique(labels[idx]).size > 1:
            confusions.append([int(k) for k in idx])
    return merges, confusions


def _pick_pivots(vals: np.ndarray, gid: np.ndarray, labels: np.ndarray):
    """Leftmost active point and its nearest distinct same-label partner.

    Returns ``None`` once every label sits on a single value. Ties go to the
    lowest index.
    """
    active = np.ones(vals.size, dtype=bool)
    while active.any():
        cand = np.nonzero(active)[0]
        i = int(cand[np.lexsort((cand, vals[cand]))[0]])
        same = cand[(labels[cand] == labels[i]) & (gid[cand] != gid[i])]
        if same.size:
            j = int(same[np.lexsort((same, vals[same]))[0]])
            return i, j
        active &= gid != gid[i]
    return None


def _merge_map(vals: np.ndarray, i: int, j: int, height: float | None = None):
    """Shift by ``(mid, -height)``, project to the circle, keep ``y``.

    ``height`` defaults to ``(p_j - p_i) / 2``; any positive height merges
    ``p_i`` with ``p_j`` because both sit at the same distance from ``mid``.
    """
    mid = 0.5 * (vals[i] + vals[j])
    h = 0.5 * (vals[j] - vals[i]) if height is None else height
    dx = vals - mid
    new = h / np.hypot(dx, h)
    angles = np.arctan2(h, dx)
    return new, (float(mid), float(-h)), angles


def _merge_stages(shift) -> list:
    return [AffineStage(np.eye(2), -np.asarray(shift)), SpStage(2), AffineStage(_PROJ_Y, np.zeros(2))]


def _pba_stages(u) -> list:
    return [AffineStage(np.eye(2), np.array([0.0, 1.0])), SpStage(2),
            AffineStage(np.array([[u[0], u[1]], [0.0, 0.0]]), np.zeros(2))]


def _lift(p: np.ndarray) -> np.ndarray:
    """Rows ``SP((p, 1))`` for scalars ``p``."""
    r = np.hypot(p, 1.0)
    return np.column_stack([p / r, 1.0 / r])


def _has_parallelogram(v: np.ndarray, eps: float) -> bool:
    """True if two disjoint pairs of distinct values have equal sums within ``eps``.

    Pairs sharing an index cannot tie when the values are distinct, so it
    suffices to look at neighbouring entries of the sorted pair sums.
    """
    n = v.size
    if n < 4:
        return False
    a, b = np.triu_indices(n, 1)
    s = v[a] + v[b]
    order = np.argsort(s, kind="stable")
    gaps = np.diff(s[order])
    return bool(np.any(gaps <= eps))


# -- public operations -----------------------------------------------------------

def init_direction(points, seed: int = 0, tol: Tolerances = DEFAULT, rng: SplitMix64 | None = None) -> np.ndarray:
    """Unit vector keeping every pair of distinct points apart after projection."""
    X = as_mat(points)
    d, m = X.shape
    rng = rng or SplitMix64(seed)
    a, b = np.triu_indices(m, 1)
    D = X[:, a] - X[:, b]
    keep = np.max(np.abs(D), axis=0) > tol.eps_eq if D.size else np.zeros(0, dtype=bool)
    D = D[:, keep]
    norms = np.linalg.norm(D, axis=0)
    for _ in range(DRAW_BUDGET):
        u = rng.unit_vector(d)
        if D.shape[1] == 0 or np.all(np.abs(u @ D) > tol.eps_sep * norms):
            return u
    raise SeparationFailureError(f"no separating direction in {DRAW_BUDGET} draws")


def pba_direction(p, seed: int = 0, tol: Tolerances = DEFAULT, rng: SplitMix64 | None = None,
                  labels=None, tries: int = 1) -> np.ndarray:
    """Direction for the parallel-breaking step on the scalars ``p``.

    ``p`` may also be given as 2-D points on the x-axis (an ``m x 2`` array).
    Without ``labels`` no two disjoint pairs of distinct outputs may share a
    sum. With ``labels`` only the pairings that can cause a cross-label
    merge are checked: a same-label pair against a cross-label pair.
    With ``tries > 1`` that many admissible draws are compared and the one
    leaving the widest gap between outputs wins.
    """
    v = _scalars(p)
    rng = rng or SplitMix64(seed)
    first = np.unique(_groups(v, tol.eps_eq), return_index=True)[1]
    distinct = v[first]
    lab = None if labels is None else np.asarray(labels)[first]
    L = _lift(distinct)
    a, b = np.triu_indices(distinct.size, 1)
    D = L[a] - L[b]
    norms = np.linalg.norm(D, axis=1)
    best, found = None, 0
    for _ in range(DRAW_BUDGET):
        u = rng.unit_vector(2)
        proj = L @ u
        if np.any(np.abs(D @ u) <= tol.eps_sep * norms):
            continue
        scale = max(float(np.max(np.abs(proj))), 1.0)
        if lab is None:
            bad = _has_parallelogram(proj, tol.eps_par * scale)
        else:
            bad = _has_risky_sum(proj, lab, tol.eps_par * scale)
        if bad:
            continue
        gap = float(np.min(np.diff(np.sort(proj)))) if proj.size > 1 else np.inf
        if best is None or gap > best[0]:
            best = (gap, u)
        found += 1
        if found >= tries:
            break
    if best is None:
        raise SeparationFailureError(f"no parallel-breaking direction in {DRAW_BUDGET} draws")
    return best[1]


def _has_risky_sum(v: np.ndarray, labels: np.ndarray, eps: float) -> bool:
    """True if a same-label pair and a cross-label pair have equal sums within ``eps``."""
    a, b = np.triu_indices(v.size, 1)
    same = labels[a] == labels[b]
    s1 = np.sort(v[a[same]] + v[b[same]])
    s2 = np.sort(v[a[~same]] + v[b[~same]])
    if s1.size == 0 or s2.size == 0:
        return False
    pos = np.searchsorted(s2, s1)
    lo = np.abs(s1 - s2[np.clip(pos - 1, 0, s2.size - 1)])
    hi = np.abs(s1 - s2[np.clip(pos, 0, s2.size - 1)])
    return bool(np.any(np.minimum(lo, hi) <= eps))


def pba(p, u) -> np.ndarray:
    """Lift, project to the circle and read off direction ``u``; returns ``m x 2`` points on the x-axis."""
    v = _scalars(p)
    u = as_vec(u)
    if u.size != 2:
        raise ShapeError("PBA direction must be 2-D")
    out = np.zeros((v.size, 2))
    out[:, 0] = _lift(v) @ u
    return out


def _scalars(p) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.ndim == 2 and a.shape[1] == 2:
        if np.any(np.abs(a[:, 1]) > 0):
            raise ShapeError("points must lie on the x-axis")
        a = a[:, 0]
    return as_vec(a)


_ROUNDOFF = 2.0 ** -52
_HEIGHTS = 2.0 ** np.arange(-12, 3, 2)   # lift heights tried, relative to the value spread
_SAFE_RATIO = 1e-7                        # propagated round-off over smallest cross-label gap


def _pick_conditioned(vals: np.ndarray, gid: np.ndarray, labels: np.ndarray, err: np.ndarray,
                      eps_eq: float, err_cap: float = np.inf):
    """Pivot pair and lift height for the next merge, chosen for round-off safety.

    Candidates are neighbouring same-label values and a handful of lift
    heights (the textbook height ``(p_j - p_i) / 2`` among them). Each
    candidate is scored by the worst propagated round-off error divided by
    the smallest gap between values of different labels after the merge;
    the lowest score wins. Candidates that would bring two labels within
    ``10 * eps_eq`` are discarded. Among candidates whose error stays below
    ``_SAFE_RATIO`` times that gap and below ``err_cap``, and that keep every
    pair of distinct values ``1000 * eps_eq`` apart, the one with the
    widest relative gap is taken; otherwise the smallest ratio.

    Returns ``(i, j, height)``, ``None`` when every label is collapsed, or
    ``(i, j, None)`` when every candidate is unsafe.
    """
    _, first = np.unique(gid, return_index=True)
    reps = first[np.argsort(vals[first], kind="stable")]   # one index per value, ascending
    r, y = vals[reps], labels[reps]
    gmax = np.zeros(int(gid.max()) + 1)
    np.maximum.at(gmax, gid, err)
    e = gmax[gid[reps]]
    ca, cb = [], []
    for c in np.unique(y):
        pos = np.nonzero(y == c)[0]
        ca.extend(pos[:-1])
        cb.extend(pos[1:])
    if not ca:
        return None
    ca, cb = np.array(ca), np.array(cb)
    spread = r[-1] - r[0]
    delta = 0.5 * (r[cb] - r[ca])
    mid = 0.5 * (r[ca] + r[cb])
    H = np.concatenate([delta[:, None], np.broadcast_to(spread * _HEIGHTS, (ca.size, _HEIGHTS.size))], axis=1)
    H = np.where(H >= delta[:, None], H, np.nan)          # heights below the textbook one are not tried
    K = ca.size
    # outputs fall with |dx| at every height, so one ordering serves all heights;
    # the partner (which lands on the pivot) is sorted last and dropped
    key = -np.abs(r[None, :] - mid[:, None])
    key[np.arange(K), cb] = np.inf
    order = np.argsort(key, axis=1)[:, :-1]
    adx = -np.take_along_axis(key, order, 1)[:, None, :]
    h = H[:, :, None]
    rad = np.hypot(adx, h)
    new = h / rad                                          # ascending along the last axis
    worst = np.max((h * adx / rad ** 3) * e[order][:, None, :], axis=2) + _ROUNDOFF
    gaps = np.diff(new, axis=2)
    ys = y[order][:, None, :]
    cross = ys[:, :, 1:] != ys[:, :, :-1]
    with np.errstate(invalid="ignore"):
        gmin = np.min(np.where(cross, gaps, np.inf), axis=2, initial=np.inf)
        gall = np.min(gaps, axis=2, initial=np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = worst / gmin
        relgap = gmin / (new[:, :, -1] - new[:, :, 0])
    bad = np.isnan(H) | (gmin <= 10 * eps_eq)
    ratio = np.where(bad, np.inf, ratio)
    # prefer well-spread outputs among the numerically safe candidates
    safe = (ratio <= _SAFE_RATIO) & (worst <= err_cap) & (gall >= 1e3 * eps_eq)
    pool = np.where(safe, -np.nan_to_num(relgap, nan=0.0), np.inf) if safe.any() else ratio
    k, t = np.unravel_index(int(np.argmin(pool)), pool.shape)
    i, j = int(reps[ca[k]]), int(reps[cb[k]])
    if not np.isfinite(ratio[k, t]):
        return i, j, None
    return i, j, float(H[k, t])


def _run(values, labels, mode: str, rng: SplitMix64 | None, tol: Tolerances, schedule: str = "leftmost"):
    """Merge loop.

    ``mode`` is ``never``, ``auto`` (PBA only to avoid a cross-label merge)
    or ``always`` (PBA before every merge). ``schedule`` picks the pivots:
    ``leftmost`` is the textbook rule with lift height ``(p_j - p_i) / 2``;
    ``conditioned`` picks pivots and height to keep round-off far below the
    gaps between labels, which deep nets need in floating point.
    """
    labels = np.asarray(labels)
    vals = np.asarray(values, dtype=float).copy()
    trace = SynthesisTrace([float(v) for v in vals], [int(c) for c in labels])
    stages: list = []
    gid = _groups(vals, tol.eps_eq)
    vals = _snap(vals, gid)
    err = np.full(vals.size, _ROUNDOFF * max(float(np.max(np.abs(vals))), 1.0))
    layer = 0

    def settle(new, new_err, record):
        nonlocal vals, gid, err, layer
        new_gid = _groups(new, tol.eps_eq)
        snapped = _snap(new, new_gid)
        record.merges, record.confusions = _merge_events(gid, new_gid, labels)
        vals, gid, err = snapped, new_gid, new_err + np.abs(new - snapped)
        record.values = [float(v) for v in vals]
        record.roundoff = float(np.max(err))
        trace.layers.append(record)
        layer += 1

    def apply_pba():
        u = pba_direction(vals, tol=tol, rng=rng.split(layer + 1), labels=labels,
                          tries=1 if schedule == "leftmost" else 8)
        rad = np.hypot(vals, 1.0)
        new = (u[0] * vals + u[1]) / rad
        slope = np.abs(u[0] - u[1] * vals) / rad ** 3
        settle(new, slope * err + _ROUNDOFF, LayerRecord("pba", [], direction=[float(u[0]), float(u[1])]))
        stages.extend(_pba_stages(u))

    def pick():
        if schedule == "leftmost":
            piv = _pick_pivots(vals, gid, labels)
            return None if piv is None else (*piv, 0.5 * (vals[piv[1]] - vals[piv[0]]))
        return _pick_conditioned(vals, gid, labels, err, tol.eps_eq, 1e-3 * tol.eps_proto)

    def confuses(i, j, h) -> bool:
        if h is None:
            return True
        if schedule == "conditioned":   # the scoring already rejects cross-label coincidences
            return False
        new, _, _ = _merge_map(vals, i, j, h)
        return bool(_merge_events(gid, _groups(new, tol.eps_eq), labels)[1])

    while True:
        piv = pick()
        if piv is None:
            break
        if mode == "always" or (mode == "auto" and confuses(*piv)):
            apply_pba()
            piv = pick()
            if piv is None:
                break
        i, j, h = piv
        if h is None:
            raise SeparationFailureError("every admissible merge would bring two labels together")
        new, shift, angles = _merge_map(vals, i, j, h)
        rad = np.hypot(vals - shift[0], h)
        slope = h * np.abs(vals - shift[0]) / rad ** 3
        settle(new, slope * err + _ROUNDOFF,
               LayerRecord("merge", [], pivots=(i, j), shift=shift, angles=[float(a) for a in angles]))
        stages.extend(_merge_stages(shift))
        if layer > 4 * vals.size + 4:   # each merge removes a distinct value, so this is unreachable
            raise SeparationFailureError("merge loop failed to terminate")
    return trace, stages, vals


def pma(p, labels, tol: Tolerances = DEFAULT):
    """Plain merge loop on scalars for exactly two labels.

    Returns ``(trace, stages)``; the stages act on 2-vectors ``(p, 0)``.
    Cross-label merges are recorded in the trace, not prevented.
    """
    v = _scalars(p)
    y = np.asarray(labels)
    if y.shape != v.shape:
        raise ShapeError(f"{y.size} labels for {v.size} points")
    n_labels = np.unique(y).size
    if n_labels > 2:
        raise ValidationError(f"{n_labels} labels; use the multi-class synthesizer")
    _check_scalar_consistency(v, y, tol)
    trace, stages, _ = _run(v, y, "never", None, tol)
    return trace, stages


def _check_scalar_consistency(v, y, tol):
    gid = _groups(v, tol.eps_eq)
    for g in np.unique(gid):
        if np.unique(y[gid == g]).size > 1:
            raise ValidationError("coincident points carry different labels")


def _prepare(data: LabeledDataset, tol: Tolerances):
    if not isinstance(data, LabeledDataset):
        raise ValidationError("expected a LabeledDataset")
    data.check_consistent(tol.eps_eq)


def _synthesize(data: LabeledDataset, seed: int, mode: str, tol: Tolerances,
                schedule: str = "conditioned") -> SynthesisResult:
    """Run the merge loop, redrawing directions if floating point defeats an attempt.

    Attempt 0 draws from ``SplitMix64(seed)``; attempt ``k`` from a child
    stream of it. An attempt is kept once it is exact to ``eps_proto`` on the
    training points; otherwise the best one seen is returned.
    """
    best, failure = None, None
    base = SplitMix64(seed)
    for attempt in range(ATTEMPTS if schedule == "conditioned" else 1):
        root = base if attempt == 0 else base.split(_ATTEMPT_STREAM + attempt)
        try:
            res = _attempt(data, root, mode, tol, schedule)
        except SeparationFailureError as exc:
            failure = failure or exc
            continue
        res.attempt = attempt
        if res.accuracy == 1.0 and res.max_proto_error <= tol.eps_proto:
            return res
        if best is None or (res.accuracy, -res.max_proto_error) > (best.accuracy, -best.max_proto_error):
            best = res
    if best is None:
        raise failure
    return best


def _attempt(data: LabeledDataset, root: SplitMix64, mode: str, tol: Tolerances, schedule: str) -> SynthesisResult:
    u = init_direction(data.points, tol=tol, rng=root.split(0))
    p = u @ data.points
    trace, stages, final = _run(p, data.labels, mode, root, tol, schedule)
    trace.init_direction = [float(c) for c in u]
    stages = [AffineStage(np.vstack([u, np.zeros_like(u)]), np.zeros(2))] + stages
    stages.append(AffineStage(np.array([[1.0, 0.0]]), np.zeros(1)))
    net = compile_stages(stages)

    readout = {}
    for k in np.argsort(final, kind="stable"):
        readout.setdefault(float(final[k]), int(data.labels[k]))
    table = sorted(readout.items())

    out = forward_batch(net, data.points)[0]
    err = np.abs(out - final)
    correct = 0
    for k in range(data.size):
        try:
            correct += nearest_prototype(table, out[k], tol.eps_proto)[0] == int(data.labels[k])
        except AmbiguityError:
            pass
    return SynthesisResult(net, trace, table, stages, correct / data.size, float(np.max(err)))


def synthesize_binary(data: LabeledDataset, seed: int = 0, tol: Tolerances = DEFAULT) -> SynthesisResult:
    _prepare(data, tol)
    if len(data.classes) != 2:
        raise ValidationError(f"binary synthesis needs exactly 2 classes, found {len(data.classes)}")
    return _synthesize(data, seed, "auto", tol)


def synthesize_multiclass(data: LabeledDataset, seed: int = 0, tol: Tolerances = DEFAULT,
                          use_pba: bool = True) -> SynthesisResult:
    """PBA before every merge.

    ``use_pba=False`` runs the bare leftmost merge loop instead, which can
    merge points of different labels; the trace records such confusions.
    """
    _prepare(data, tol)
    if len(data.classes) < 2:
        raise ValidationError("synthesis needs at least 2 classes")
    if use_pba:
        return _synthesize(data, seed, "always", tol)
    return _synthesize(data, seed, "never", tol, schedule="leftmost")


def synthesize(data: LabeledDataset, seed: int = 0, tol: Tolerances = DEFAULT) -> SynthesisResult:
    """Binary path for two classes, multi-class path otherwise."""
    if len(data.classes) == 2:
        return synthesize_binary(data, seed, tol)
    return synthesize_multiclass(data, seed, tol)


def nearest_prototype(table, y: float, eps_proto: float):
    """``(label, distance)`` of the prototype closest to ``y`` in a ``[(value, label)]`` table."""
    vals = np.array([v for v, _ in table])
    dist = np.abs(vals - y)
    order = np.argsort(dist, kind="stable")
    if order.size > 1 and dist[order[1]] - dist[order[0]] <= eps_proto:
        raise AmbiguityError(
            f"output {y:.12g} is equidistant from prototypes {vals[order[0]]:.12g} and {vals[order[1]]:.12g}"
        )
    k = int(order[0])
    return table[k][1], float(dist[k])


def classify(result: SynthesisResult, x, tol: Tolerances = DEFAULT):
    """``(label, distance to its prototype)`` for a single input vector."""
    y = forward(result.net, x)
    return nearest_prototype(result.readout, float(y[0]), tol.eps_proto)


def reference_outputs(result: SynthesisResult, X) -> np.ndarray:
    """Evaluate the uncompiled stages (SP used directly) on every column of ``X``."""
    X = as_mat(X)
    return np.array([run_stages(result.stages, X[:, k])[0] for k in range(X.shape[1])])


def shatter_report(points, max_ln_layers: int, seed: int = 0, tol: Tolerances = DEFAULT,
                   stop_early: bool = False) -> list[dict]:
    """One record per nontrivial binary labeling (bit ``k`` of ``code`` labels point ``k``).

    Labeling ``code`` is synthesized with the child seed ``split(code)`` of
    ``seed``, so any subset can be rerun on its own.
    """
    X = as_mat(points)
    m = X.shape[1]
    root = SplitMix64(seed)
    out = []
    for code in range(1, 2 ** m - 1):
        labels = np.array([(code >> k) & 1 for k in range(m)])
        rec = {"code": code, "labels": [int(c) for c in labels]}
        try:
            res = synthesize_binary(LabeledDataset(X, labels), seed=root.split(code).seed, tol=tol)
            rec.update(accuracy=res.accuracy, ln_layers=res.depth,
                       ok=bool(res.accuracy == 1.0 and res.depth <= max_ln_layers))
        except SeparationFailureError as exc:
            rec.update(accuracy=None, ln_layers=None, ok=False, error=str(exc))
        out.append(rec)
        if stop_early and not rec["ok"]:
            break
    return out


def shatter_check(points, max_ln_layers: int, seed: int = 0, tol: Tolerances = DEFAULT) -> bool:
    """Whether every nontrivial binary labeling is memorized within ``max_ln_layers``."""
    return all(r["ok"] for r in shatter_report(points, max_ln_layers, seed, tol, stop_early=True))


# -- the hand-built XOR pipeline ---------------------------------------------------

def xor_stages(height: float = 0.5) -> list:
    """Rotate by 45 degrees, drop onto ``y = height``, project to the circle, keep ``y``."""
    c = math.sqrt(0.5)
    rot = np.array([[c, -c], [c, c]])
    return [
        AffineStage(rot, np.zeros(2)),
        AffineStage(np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([0.0, height])),
        SpStage(2),
        AffineStage(np.array([[0.0, 1.0]]), np.zeros(1)),
    ]


def xor_net(height: float = 0.5) -> LnNet:
    return compile_stages(xor_stages(height))
