"""LN-Net representation, the SP-into-LN embedding, compilation and I/O.

Layers are listed in data-flow order: ``layers[0]`` acts on the input.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .config import DEFAULT
from .errors import DegenerateInputError, ParseError, ShapeError, ValidationError
from .tensor_core import as_mat, as_vec, compose_affine, group_layer_norm, layer_norm, spherical_project

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class Affine:
    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        W = as_mat(self.W).copy()
        b = as_vec(self.b).copy()
        if W.shape[0] != b.size:
            raise ShapeError(f"weight {W.shape} does not match bias of size {b.size}")
        W.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)

    @property
    def in_dim(self) -> int:
        return self.W.shape[1]

    @property
    def out_dim(self) -> int:
        return self.W.shape[0]


@dataclass(frozen=True)
class LN:
    pass


@dataclass(frozen=True)
class LNG:
    groups: int


Layer = Union[Affine, LN, LNG]


def _validate(layers: Sequence[Layer]) -> None:
    if not layers:
        raise ValidationError("an LN-Net needs at least one layer")
    if not isinstance(layers[0], Affine) or not isinstance(layers[-1], Affine):
        raise ValidationError("first and last layers must be affine")
    dim = layers[0].in_dim
    prev_norm = False
    for k, layer in enumerate(layers):
        if isinstance(layer, Affine):
            if layer.in_dim != dim:
                raise ValidationError(f"layer {k}: affine expects {layer.in_dim} inputs, receives {dim}")
            dim = layer.out_dim
            prev_norm = False
            continue
        if not isinstance(layer, (LN, LNG)):
            raise ValidationError(f"layer {k}: unknown layer {layer!r}")
        if prev_norm:
            raise ValidationError(f"layer {k}: normalization layers may not be adjacent")
        if dim < 2:
            raise ValidationError(f"layer {k}: normalization over {dim} neuron(s)")
        if isinstance(layer, LNG):
            if layer.groups < 1 or dim % layer.groups or dim // layer.groups < 2:
                raise ValidationError(f"layer {k}: {layer.groups} groups invalid for dimension {dim}")
        prev_norm = True


@dataclass(frozen=True)
class LnNet:
    layers: tuple

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        _validate(self.layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def depth(self) -> int:
        """Number of normalization layers."""
        return sum(1 for layer in self.layers if not isinstance(layer, Affine))

    @property
    def widths(self) -> list[int]:
        return [layer.out_dim for layer in self.layers if isinstance(layer, Affine)]

    def __call__(self, x):
        return forward(self, x)


def forward(net: LnNet, x, trace: bool = False, eps_zero: float = DEFAULT.eps_zero):
    """Evaluate ``net`` on a single vector.

    With ``trace=True`` returns ``(output, activations)`` where
    ``activations[k]`` is the output of ``net.layers[k]``.
    """
    v = as_vec(x)
    if v.size != net.in_dim:
        raise ShapeError(f"net expects dimension {net.in_dim}, got {v.size}")
    acts = []
    for k, layer in enumerate(net.layers):
        if isinstance(layer, Affine):
            v = layer.W @ v + layer.b
        else:
            try:
                if isinstance(layer, LN):
                    v = layer_norm(v, eps_zero)
                else:
                    v = group_layer_norm(v, layer.groups, eps_zero)
            except DegenerateInputError as exc:
                raise DegenerateInputError(str(exc), layer=k) from None
        if trace:
            acts.append(v)
    return (v, acts) if trace else v


def forward_batch(net: LnNet, X, eps_zero: float = DEFAULT.eps_zero, trace: bool = False):
    """Apply ``forward`` to every column of ``X`` (vectorized over columns).

    ``trace=True`` also returns the activation matrix after every layer.
    """
    X = as_mat(X)
    if X.shape[0] != net.in_dim:
        raise ShapeError(f"net expects dimension {net.in_dim}, got {X.shape[0]}")
    V = X
    acts = []
    for k, layer in enumerate(net.layers):
        if isinstance(layer, Affine):
            V = layer.W @ V + layer.b[:, None]
            acts.append(V)
            continue
        g = layer.groups if isinstance(layer, LNG) else 1
        c = V.shape[0] // g
        G = V.reshape(g, c, -1)
        dev = G - G.mean(axis=1, keepdims=True)
        norm = np.sqrt(np.sum(dev * dev, axis=1, keepdims=True))
        sigma = norm / np.sqrt(c)
        if np.any(sigma <= eps_zero):
            col = int(np.nonzero(np.any(sigma[:, 0, :] <= eps_zero, axis=0))[0][0])
            raise DegenerateInputError(f"column {col}: zero variance", layer=k)
        V = (np.sqrt(c) * dev / norm).reshape(V.shape)
        acts.append(V)
    return (V, acts) if trace else V


# -- SP as an LN-Net -------------------------------------------------------

def build_orthogonal_q(d: int) -> np.ndarray:
    """Orthogonal ``d x d`` matrix whose last column is ``1/sqrt(d)``.

    The first ``d-1`` columns come from Gram-Schmidt on ``e_1 .. e_{d-1}``
    against the constant direction, so every ``Q @ [x; 0]`` sums to zero.
    """
    if d < 2:
        raise ShapeError("orthogonal completion needs d >= 2")
    ones = np.full(d, 1.0 / np.sqrt(d))
    basis = [ones]
    cols = []
    for k in range(d - 1):
        v = np.zeros(d)
        v[k] = 1.0
        for _ in range(2):  # second pass for numerical orthogonality
            for q in basis:
                v = v - (q @ v) * q
        v = v / np.linalg.norm(v)
        basis.append(v)
        cols.append(v)
    return np.column_stack(cols + [ones])


@dataclass(frozen=True, eq=False)
class SpEmbedding:
    """``post(LN(pre(x))) == x / ||x||`` with LN acting on one extra neuron."""
    pre: Affine
    post: Affine
    q: np.ndarray

    @property
    def d_sp(self) -> int:
        return self.pre.in_dim

    def __call__(self, x, eps_zero: float = DEFAULT.eps_zero):
        h = self.pre.W @ as_vec(x) + self.pre.b
        return self.post.W @ layer_norm(h, eps_zero) + self.post.b

    def as_net(self) -> LnNet:
        return LnNet((self.pre, LN(), self.post))


def sp_as_lnnet(d_sp: int) -> SpEmbedding:
    if d_sp < 2:
        raise ShapeError("spherical projection embedding needs d_sp >= 2")
    d = d_sp + 1
    Q = build_orthogonal_q(d)
    lift = Q[:, :d_sp]
    pre = Affine(lift, np.zeros(d))
    post = Affine(lift.T / np.sqrt(d), np.zeros(d_sp))
    return SpEmbedding(pre=pre, post=post, q=Q)


# -- staged pipelines --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AffineStage:
    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "W", as_mat(self.W))
        object.__setattr__(self, "b", as_vec(self.b))
        if self.W.shape[0] != self.b.size:
            raise ShapeError(f"stage weight {self.W.shape} vs bias {self.b.size}")


@dataclass(frozen=True)
class SpStage:
    d: int


Stage = Union[AffineStage, SpStage]


def run_stages(stages: Sequence[Stage], x, eps_zero: float = DEFAULT.eps_zero) -> np.ndarray:
    """Reference evaluation of a stage list, using SP directly."""
    v = as_vec(x)
    for st in stages:
        if isinstance(st, AffineStage):
            if st.W.shape[1] != v.size:
                raise ShapeError(f"stage expects {st.W.shape[1]} inputs, got {v.size}")
            v = st.W @ v + st.b
        else:
            if v.size != st.d:
                raise ShapeError(f"SP stage of dimension {st.d} receives {v.size}")
            v = spherical_project(v, eps_zero)
    return v


def compile_stages(stages: Sequence[Stage], in_dim: int | None = None) -> LnNet:
    """Replace each SP stage by its LN embedding and merge adjacent affines.

    ``in_dim`` is only needed when the first stage is an SP stage (it is
    then inferred) or when the list is empty (identity map).
    """
    stages = list(stages)
    pending: tuple[np.ndarray, np.ndarray] | None = None
    dim = in_dim
    layers: list[Layer] = []
    cache: dict[int, SpEmbedding] = {}

    def push(W, b):
        nonlocal pending
        pending = (W, b) if pending is None else compose_affine(*pending, W, b)

    for k, st in enumerate(stages):
        if isinstance(st, AffineStage):
            if dim is not None and st.W.shape[1] != dim:
                raise ShapeError(f"stage {k}: expects {st.W.shape[1]} inputs, chain provides {dim}")
            push(st.W, st.b)
            dim = st.W.shape[0]
        elif isinstance(st, SpStage):
            if dim is not None and dim != st.d:
                raise ShapeError(f"stage {k}: SP of dimension {st.d}, chain provides {dim}")
            if st.d not in cache:
                cache[st.d] = sp_as_lnnet(st.d)
            emb = cache[st.d]
            push(emb.pre.W, emb.pre.b)
            layers.append(Affine(*pending))
            layers.append(LN())
            pending = (emb.post.W, emb.post.b)
            dim = st.d
        else:
            raise ShapeError(f"stage {k}: unknown stage {st!r}")
    if pending is None:
        if dim is None:
            raise ValidationError("cannot compile an empty pipeline without in_dim")
        pending = (np.eye(dim), np.zeros(dim))
    layers.append(Affine(*pending))
    return LnNet(tuple(layers))


# -- serialization -----------------------------------------------------------

def net_to_dict(net: LnNet) -> dict:
    out = []
    for layer in net.layers:
        if isinstance(layer, Affine):
            out.append({
                "kind": "affine",
                "rows": layer.out_dim,
                "cols": layer.in_dim,
                "w": [float(v) for v in layer.W.ravel()],
                "b": [float(v) for v in layer.b],
            })
        elif isinstance(layer, LN):
            out.append({"kind": "ln"})
        else:
            out.append({"kind": "lng", "groups": int(layer.groups)})
    return {"version": FORMAT_VERSION, "layers": out}


def serialize(net: LnNet) -> str:
    # float repr is the shortest string that round-trips (<= 17 significant digits)
    return json.dumps(net_to_dict(net), indent=None, separators=(",", ":")) + "\n"


def net_from_dict(doc) -> LnNet:
    if not isinstance(doc, dict):
        raise ParseError("document root must be an object")
    if doc.get("version") != FORMAT_VERSION:
        raise ParseError(f"unsupported version {doc.get('version')!r}")
    raw = doc.get("layers")
    if not isinstance(raw, list):
        raise ParseError("'layers' must be an array")
    layers: list[Layer] = []
    for k, item in enumerate(raw):
        where = f"layers[{k}]"
        if not isinstance(item, dict) or "kind" not in item:
            raise ParseError(f"{where}: expected an object with a 'kind'")
        kind = item["kind"]
        if kind == "affine":
            try:
                rows, cols = int(item["rows"]), int(item["cols"])
                w = np.array(item["w"], dtype=float)
                b = np.array(item["b"], dtype=float)
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{where}: bad affine layer ({exc})") from None
            if w.ndim != 1 or w.size != rows * cols or b.ndim != 1 or b.size != rows:
                raise ParseError(f"{where}: entry counts do not match rows={rows}, cols={cols}")
            layers.append(Affine(w.reshape(rows, cols), b))
        elif kind == "ln":
            layers.append(LN())
        elif kind == "lng":
            try:
                layers.append(LNG(int(item["groups"])))
            except (KeyError, TypeError, ValueError):
                raise ParseError(f"{where}: 'lng' needs an integer 'groups'") from None
        else:
            raise ParseError(f"{where}: unknown kind {kind!r}")
    return LnNet(tuple(layers))


def deserialize(text: str) -> LnNet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"column {exc.colno}: {exc.msg}", line=exc.lineno) from None
    return net_from_dict(doc)


def merged_affine(net: LnNet) -> tuple[np.ndarray, np.ndarray]:
    """Collapse a normalization-free net into one ``(W, b)``."""
    if net.depth:
        raise ValidationError("net contains normalization layers")
    W, b = net.layers[0].W, net.layers[0].b
    for layer in net.layers[1:]:
        W, b = compose_affine(W, b, layer.W, layer.b)
    return W, b
