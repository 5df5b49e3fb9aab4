"""Sum-of-squares ratio, its linear lower bound, and how LN breaks that bound.

``lssr`` solves the generalized eigenproblem ``M u = lam N u`` (within-class
scatter ``M``, total scatter ``N``). ``break_lssr`` builds
``psi = out o LN o in`` whose SSR drops strictly below the LSSR whenever the
first-order coefficient ``f'(0)`` of the one-parameter family is nonzero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .datasets import LabeledDataset
from .errors import DegenerateInputError, NoDescentError, SearchFailureError, ShapeError, ValidationError
from .linalg import min_generalized_eig
from .net import LN, Affine, LnNet, forward_batch, sp_as_lnnet
from .rng import SplitMix64
from .tensor_core import as_mat, sum_of_squares


@dataclass(frozen=True, eq=False)
class ClassPair:
    X1: np.ndarray
    X2: np.ndarray

    def __post_init__(self):
        X1, X2 = as_mat(self.X1), as_mat(self.X2)
        if X1.shape[0] != X2.shape[0]:
            raise ShapeError(f"classes live in different dimensions ({X1.shape[0]} vs {X2.shape[0]})")
        if X1.shape[1] < 1 or X2.shape[1] < 1:
            raise ShapeError("each class needs at least one sample")
        object.__setattr__(self, "X1", X1)
        object.__setattr__(self, "X2", X2)

    @classmethod
    def from_dataset(cls, data: LabeledDataset) -> "ClassPair":
        cl = data.classes
        if len(cl) != 2:
            raise ValidationError(f"SSR needs exactly two classes, found {len(cl)}")
        return cls(data.class_points(cl[0]), data.class_points(cl[1]))

    @property
    def dim(self) -> int:
        return self.X1.shape[0]

    def project(self, u) -> "ClassPair":
        u = np.asarray(u, dtype=float).reshape(1, -1)
        return ClassPair(u @ self.X1, u @ self.X2)

    def map(self, fn) -> "ClassPair":
        """Apply a column-wise map ``fn(X) -> Y`` to both classes."""
        return ClassPair(fn(self.X1), fn(self.X2))


@dataclass(frozen=True, eq=False)
class ScatterPair:
    M: np.ndarray   # within-class scatter
    N: np.ndarray   # total scatter


@dataclass(frozen=True, eq=False)
class SsrReport:
    ssr: float
    lssr: float
    lambda_star: float
    u_star: np.ndarray
    ssr_along_u: float
    fprime0: float
    t1: float
    t2: float
    t3: float
    eig_multiplicity: int
    optimal_w_diagnostic: np.ndarray
    scatter: ScatterPair

    def to_dict(self) -> dict:
        return {
            "ssr": self.ssr,
            "lssr": self.lssr,
            "lambda_star": self.lambda_star,
            "u_star": [float(v) for v in self.u_star],
            "ssr_along_u_star": self.ssr_along_u,
            "fprime0": self.fprime0,
            "t1": self.t1,
            "t2": self.t2,
            "t3": self.t3,
            "eigen_multiplicity": self.eig_multiplicity,
            "optimal_wtw": self.optimal_w_diagnostic.tolist(),
            "M": self.scatter.M.tolist(),
            "N": self.scatter.N.tolist(),
        }


@dataclass(frozen=True, eq=False)
class BreakResult:
    t_star: float
    lssr: float
    fprime0: float
    fssr_at_t: float
    psi_affine_in: Affine
    psi_affine_out: Affine
    ssr_after: float
    steps: int

    @property
    def net(self) -> LnNet:
        return LnNet((self.psi_affine_in, LN(), self.psi_affine_out))

    def to_dict(self) -> dict:
        return {
            "t_star": self.t_star,
            "lssr": self.lssr,
            "fprime0": self.fprime0,
            "fssr_at_t_star": self.fssr_at_t,
            "ssr_after": self.ssr_after,
            "line_search_steps": self.steps,
            "psi_in": {"w": self.psi_affine_in.W.tolist(), "b": self.psi_affine_in.b.tolist()},
            "psi_out": {"w": self.psi_affine_out.W.tolist(), "b": self.psi_affine_out.b.tolist()},
        }


def ssr(pair: ClassPair, eps_zero: float = DEFAULT.eps_zero) -> float:
    """Within-class over total sum of squares.

    The data count as degenerate when their RMS deviation is below
    ``eps_zero`` relative to their magnitude.
    """
    allX = np.hstack([pair.X1, pair.X2])
    within = sum_of_squares(pair.X1) + sum_of_squares(pair.X2)
    total = sum_of_squares(allX)
    scale = max(1.0, float(np.max(np.abs(allX))))
    if np.sqrt(total / allX.shape[1]) <= eps_zero * scale:
        raise DegenerateInputError("total sum of squares is zero")
    return float(min(max(within / total, 0.0), 1.0))


def scatter_matrices(pair: ClassPair) -> ScatterPair:
    """Within-class scatter ``M`` and total scatter ``N``.

    ``N`` is taken around the pooled mean, which coincides with the midpoint
    of the class means when both classes have the same size.
    """
    d1 = pair.X1 - pair.X1.mean(axis=1, keepdims=True)
    d2 = pair.X2 - pair.X2.mean(axis=1, keepdims=True)
    M = d1 @ d1.T + d2 @ d2.T
    allX = np.hstack([pair.X1, pair.X2])
    dt = allX - allX.mean(axis=1, keepdims=True)
    N = dt @ dt.T
    return ScatterPair(0.5 * (M + M.T), 0.5 * (N + N.T))


def _moments(x: np.ndarray):
    mean = x.mean()
    dev = x - mean
    return x.size, mean, np.mean(dev ** 2), np.mean(dev ** 3)


def fssr_derivative_at_zero(pair: ClassPair, u=None, eps_zero: float = DEFAULT.eps_zero):
    """``(f'(0), T1, T2, T3)`` of the one-parameter family along ``u``.

    ``u`` defaults to the LSSR direction. The derivative uses per-class sample
    counts, so it also holds for unequal class sizes; with equal sizes it
    equals ``-2 (T1 + T2) / T3``.
    """
    if u is None:
        u = _lssr_direction(pair)[1]
    p = pair.project(u)
    n1, m1, v1, s1 = _moments(p.X1[0])
    n2, m2, v2, s2 = _moments(p.X2[0])
    diff = m1 - m2
    t1 = diff ** 2 * (s1 + s2)
    t2 = diff * (v1 - v2) * (diff ** 2 - (v1 + v2))
    t3 = (2 * v1 + 2 * v2 + diff ** 2) ** 2
    if t3 <= eps_zero ** 2:
        raise DegenerateInputError("all projected points coincide")
    # expansion of SS per class and of the between-class term up to t^3
    b12, b22 = n1 * v1, n2 * v2
    b13 = -n1 * (s1 + 2 * m1 * v1)
    b23 = -n2 * (s2 + 2 * m2 * v2)
    k = n1 * n2 / (n1 + n2)
    b2 = k * diff ** 2
    b3 = -k * diff * ((m1 ** 2 + v1) - (m2 ** 2 + v2))
    fprime0 = (b2 * (b13 + b23) - b3 * (b12 + b22)) / (b12 + b22 + b2) ** 2
    return float(fprime0), float(t1), float(t2), float(t3)


def _lssr_direction(pair: ClassPair, tol: Tolerances = DEFAULT):
    sc = scatter_matrices(pair)
    lam, u, mult = min_generalized_eig(sc.M, sc.N, eps_pd=tol.eps_pd)
    return lam, u, mult, sc


def lssr(pair: ClassPair, tol: Tolerances = DEFAULT) -> SsrReport:
    lam, u, mult, sc = _lssr_direction(pair, tol)
    lam = float(min(max(lam, 0.0), 1.0))
    along = ssr(pair.project(u), tol.eps_zero)
    fp, t1, t2, t3 = fssr_derivative_at_zero(pair, u, tol.eps_zero)
    return SsrReport(
        ssr=ssr(pair, tol.eps_zero),
        lssr=lam,
        lambda_star=lam,
        u_star=u,
        ssr_along_u=along,
        fprime0=fp,
        t1=t1, t2=t2, t3=t3,
        eig_multiplicity=mult,
        optimal_w_diagnostic=np.outer(u, u),
        scatter=sc,
    )


def lssr_bruteforce(pair: ClassPair, trials: int = 10_000, seed: int = 0) -> float:
    """Minimum SSR over ``trials`` random unit directions."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = SplitMix64(seed)
    U = rng.normal(trials * pair.dim).reshape(trials, pair.dim)
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    P1, P2 = U @ pair.X1, U @ pair.X2
    within = (np.sum((P1 - P1.mean(axis=1, keepdims=True)) ** 2, axis=1)
              + np.sum((P2 - P2.mean(axis=1, keepdims=True)) ** 2, axis=1))
    P = np.hstack([P1, P2])
    total = np.sum((P - P.mean(axis=1, keepdims=True)) ** 2, axis=1)
    ok = total > 0
    if not np.any(ok):
        raise DegenerateInputError("every sampled direction collapses the data")
    return float(np.min(within[ok] / total[ok]))


def psi_bar(t: float, x: np.ndarray) -> np.ndarray:
    """``1^T [x t, 1] / ||[x t, 1]||`` applied elementwise to scalars ``x``."""
    return (x * t + 1.0) / np.sqrt((x * t) ** 2 + 1.0)


def _psi_bar_minus_one(t: float, x: np.ndarray) -> np.ndarray:
    # psi_bar - 1 without cancellation; SSR is shift-invariant, and near t = 0
    # psi_bar itself sits within O(t) of 1, which costs digits in the deviations
    a = x * t
    s = np.sqrt(a * a + 1.0)
    return (a - a * a / (s + 1.0)) / s


def fssr(t: float, pair: ClassPair, u=None, report: SsrReport | None = None) -> float:
    if u is None:
        if report is None:
            report = lssr(pair)
        u = report.u_star
    if t == 0:
        if report is None:
            report = lssr(pair)
        return report.lssr
    p = pair.project(u)
    return ssr(ClassPair(_psi_bar_minus_one(t, p.X1), _psi_bar_minus_one(t, p.X2)))


def break_affines(t: float, u) -> tuple[Affine, Affine]:
    """Affine maps around an LN on R^3 realizing ``x -> psi_bar(t, u^T x)``."""
    u = np.asarray(u, dtype=float)
    emb = sp_as_lnnet(2)
    W_lift = np.vstack([t * u, np.zeros_like(u)])
    b_lift = np.array([0.0, 1.0])
    w_in = emb.pre.W @ W_lift
    b_in = emb.pre.W @ b_lift + emb.pre.b
    v = np.ones((1, 2))
    w_out = v @ emb.post.W
    b_out = v @ emb.post.b
    return Affine(w_in, b_in), Affine(w_out, b_out)


def break_lssr(pair: ClassPair, search_budget: int = 60, tol: Tolerances = DEFAULT) -> BreakResult:
    rep = lssr(pair, tol)
    if abs(rep.fprime0) <= tol.eps_deriv:
        raise NoDescentError(f"f'(0) = {rep.fprime0:.3g}; no first-order descent direction")
    first = -np.sign(rep.fprime0)
    steps = 0
    for sign in (first, -first):
        t = 0.1
        for _ in range(search_budget):
            steps += 1
            val = fssr(sign * t, pair, rep.u_star, rep)
            if val < rep.lssr - tol.eps_margin:
                t_star = float(sign * t)
                a_in, a_out = break_affines(t_star, rep.u_star)
                net = LnNet((a_in, LN(), a_out))
                after = ssr(pair.map(lambda X: forward_batch(net, X)))
                return BreakResult(t_star, rep.lssr, rep.fprime0, val, a_in, a_out, after, steps)
            t *= 0.5
    raise SearchFailureError(f"no t within {search_budget} halvings beat LSSR {rep.lssr:.6g}")
