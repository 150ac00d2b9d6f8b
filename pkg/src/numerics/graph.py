"""
Define-by-run reverse-mode autodiff over rank-2 float64 matrices.

Every operation returns a new Node holding its value, its parents and a
closure that pushes the output gradient back into the parents. The graph is
rebuilt for every minibatch; parameters are long-lived leaf nodes.
"""

from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit, softmax

from src.exceptions import ContractError, DimensionError

Matrix = np.ndarray
Operand = Union["Node", np.ndarray, float, int]


def as_matrix(value) -> Matrix:
    """Coerce to a C-contiguous float64 matrix (scalars become 1x1, vectors a single row)"""
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    elif arr.ndim != 2:
        raise DimensionError(f"Only rank-2 matrices are supported, got rank {arr.ndim}")
    return np.ascontiguousarray(arr)


class Node:
    """A value in the computation graph plus the gradient flowing into it"""

    __slots__ = ("value", "grad", "op", "parents", "requires_grad", "name", "_backward")

    def __init__(
        self,
        value: Matrix,
        parents: Tuple["Node", ...] = (),
        op: str = "leaf",
        requires_grad: bool = False,
        name: Optional[str] = None,
    ):
        self.value = value
        self.grad: Optional[Matrix] = np.zeros_like(value) if requires_grad else None
        self.op = op
        self.parents = parents
        self.requires_grad = requires_grad
        self.name = name
        self._backward: Optional[Callable[[], None]] = None

    @property
    def shape(self) -> Tuple[int, int]:
        return self.value.shape

    @property
    def rows(self) -> int:
        return self.value.shape[0]

    @property
    def cols(self) -> int:
        return self.value.shape[1]

    def zero_grad(self):
        self.grad = np.zeros_like(self.value)

    def item(self) -> float:
        if self.value.size != 1:
            raise ContractError(f"item() needs a 1x1 node, got {self.shape}")
        return float(self.value[0, 0])

    def __repr__(self):
        label = self.name or self.op
        return f"Node({label}, shape={self.shape})"

    # Operator sugar

    def __add__(self, other: Operand) -> "Node":
        return add(self, other)

    def __radd__(self, other: Operand) -> "Node":
        return add(other, self)

    def __sub__(self, other: Operand) -> "Node":
        return sub(self, other)

    def __rsub__(self, other: Operand) -> "Node":
        return sub(other, self)

    def __mul__(self, other: Operand) -> "Node":
        return mul(self, other)

    def __rmul__(self, other: Operand) -> "Node":
        return mul(other, self)

    def __matmul__(self, other: Operand) -> "Node":
        return matmul(self, other)

    def __neg__(self) -> "Node":
        return scale(self, -1.0)


def parameter(value, name: Optional[str] = None) -> Node:
    """Trainable leaf"""
    return Node(as_matrix(value).copy(), requires_grad=True, name=name)


def constant(value) -> Node:
    """Non-trainable leaf; gradients are never propagated into it"""
    return Node(as_matrix(value), op="const")


def _lift(x: Operand) -> Node:
    return x if isinstance(x, Node) else constant(x)


def _result(value: Matrix, parents: Sequence[Node], op: str) -> Node:
    return Node(value, tuple(parents), op=op, requires_grad=any(p.requires_grad for p in parents))


def _accumulate(node: Node, grad: Matrix):
    if node.requires_grad:
        node.grad += grad


def _broadcast_shape(a: Node, b: Node, op: str) -> Tuple[int, int]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} do not match")


def _unbroadcast(grad: Matrix, shape: Tuple[int, int]) -> Matrix:
    """Sum a broadcast gradient back down to an operand's shape"""
    if grad.shape == shape:
        return grad
    if shape[0] == 1 and grad.shape[0] != 1:
        grad = grad.sum(axis=0, keepdims=True)
    if shape[1] == 1 and grad.shape[1] != 1:
        grad = grad.sum(axis=1, keepdims=True)
    return grad


# === Linear algebra ===

def matmul(a: Operand, b: Operand) -> Node:
    a, b = _lift(a), _lift(b)
    if a.cols != b.rows:
        raise DimensionError(f"matmul: {a.shape} @ {b.shape}")
    out = _result(a.value @ b.value, (a, b), "matmul")

    def _backward():
        if a.requires_grad:
            a.grad += out.grad @ b.value.T
        if b.requires_grad:
            b.grad += a.value.T @ out.grad

    out._backward = _backward
    return out


# === Elementwise ===

def add(a: Operand, b: Operand) -> Node:
    a, b = _lift(a), _lift(b)
    _broadcast_shape(a, b, "add")
    out = _result(a.value + b.value, (a, b), "add")

    def _backward():
        _accumulate(a, _unbroadcast(out.grad, a.shape))
        _accumulate(b, _unbroadcast(out.grad, b.shape))

    out._backward = _backward
    return out


def sub(a: Operand, b: Operand) -> Node:
    a, b = _lift(a), _lift(b)
    _broadcast_shape(a, b, "sub")
    out = _result(a.value - b.value, (a, b), "sub")

    def _backward():
        _accumulate(a, _unbroadcast(out.grad, a.shape))
        _accumulate(b, _unbroadcast(-out.grad, b.shape))

    out._backward = _backward
    return out


def mul(a: Operand, b: Operand) -> Node:
    a, b = _lift(a), _lift(b)
    _broadcast_shape(a, b, "mul")
    out = _result(a.value * b.value, (a, b), "mul")

    def _backward():
        if a.requires_grad:
            a.grad += _unbroadcast(out.grad * b.value, a.shape)
        if b.requires_grad:
            b.grad += _unbroadcast(out.grad * a.value, b.shape)

    out._backward = _backward
    return out


def scale(a: Operand, factor: float) -> Node:
    a = _lift(a)
    out = _result(a.value * factor, (a,), "scale")

    def _backward():
        _accumulate(a, out.grad * factor)

    out._backward = _backward
    return out


def tanh(a: Operand) -> Node:
    a = _lift(a)
    out = _result(np.tanh(a.value), (a,), "tanh")

    def _backward():
        _accumulate(a, out.grad * (1.0 - out.value ** 2))

    out._backward = _backward
    return out


def sigmoid(a: Operand) -> Node:
    a = _lift(a)
    out = _result(expit(a.value), (a,), "sigmoid")

    def _backward():
        _accumulate(a, out.grad * out.value * (1.0 - out.value))

    out._backward = _backward
    return out


def log(a: Operand) -> Node:
    a = _lift(a)
    out = _result(np.log(a.value), (a,), "log")

    def _backward():
        _accumulate(a, out.grad / a.value)

    out._backward = _backward
    return out


_ELEMENTWISE = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "tanh": tanh,
    "sigmoid": sigmoid,
    "log": log,
}


def elementwise(op: str, *inputs: Operand) -> Node:
    """Dispatch an elementwise op by name ("add", "mul", "tanh", "sigmoid", ...)"""
    fn = _ELEMENTWISE.get(op)
    if fn is None:
        raise ContractError(f"Unknown elementwise op: {op}")
    return fn(*inputs)


# === Structural ===

def softmax_rows(x: Operand, mask: Optional[np.ndarray] = None) -> Node:
    """
    Row-wise softmax, max-stabilized.

    Entries where ``mask`` is False get probability exactly 0 and receive
    no gradient. Every row must keep at least one unmasked entry.
    """
    x = _lift(x)
    if x.value.size == 0:
        raise ContractError("softmax_rows: empty input")
    logits = x.value
    if mask is not None:
        mask = np.asarray(mask, dtype=bool).reshape(x.shape)
        if not mask.any(axis=1).all():
            raise ContractError("softmax_rows: a row is fully masked")
        logits = np.where(mask, logits, -np.inf)
    out = _result(softmax(logits, axis=1), (x,), "softmax")

    def _backward():
        if x.requires_grad:
            y = out.value
            dot = (out.grad * y).sum(axis=1, keepdims=True)
            x.grad += y * (out.grad - dot)

    out._backward = _backward
    return out


def concat_cols(nodes: Sequence[Operand]) -> Node:
    parts = [_lift(n) for n in nodes]
    rows = {p.rows for p in parts}
    if len(rows) != 1:
        raise DimensionError(f"concat_cols: row counts differ {sorted(rows)}")
    out = _result(np.concatenate([p.value for p in parts], axis=1), parts, "concat_cols")
    offsets = np.cumsum([0] + [p.cols for p in parts])

    def _backward():
        for p, start, stop in zip(parts, offsets[:-1], offsets[1:]):
            _accumulate(p, out.grad[:, start:stop])

    out._backward = _backward
    return out


def slice_cols(x: Operand, start: int, stop: int) -> Node:
    x = _lift(x)
    if not 0 <= start < stop <= x.cols:
        raise DimensionError(f"slice_cols: [{start}:{stop}] out of range for {x.shape}")
    out = _result(x.value[:, start:stop], (x,), "slice_cols")

    def _backward():
        if x.requires_grad:
            x.grad[:, start:stop] += out.grad

    out._backward = _backward
    return out


def slice_rows(x: Operand, start: int, stop: int) -> Node:
    x = _lift(x)
    if not 0 <= start < stop <= x.rows:
        raise DimensionError(f"slice_rows: [{start}:{stop}] out of range for {x.shape}")
    out = _result(x.value[start:stop, :], (x,), "slice_rows")

    def _backward():
        if x.requires_grad:
            x.grad[start:stop, :] += out.grad

    out._backward = _backward
    return out


def sum_all(x: Operand) -> Node:
    x = _lift(x)
    out = _result(np.array([[x.value.sum()]]), (x,), "sum")

    def _backward():
        _accumulate(x, np.full_like(x.value, out.grad[0, 0]))

    out._backward = _backward
    return out


def mean_all(x: Operand) -> Node:
    x = _lift(x)
    return scale(sum_all(x), 1.0 / x.value.size)


def binary_cross_entropy(p: Operand, targets, eps: float = 1e-12) -> Node:
    """
    Mean binary cross-entropy of probabilities ``p`` (B x 1) against 0/1 targets.

    Probabilities are clamped to [eps, 1 - eps]; clamped entries get zero gradient.
    """
    p = _lift(p)
    y = as_matrix(targets).reshape(p.shape)
    clipped = np.clip(p.value, eps, 1.0 - eps)
    losses = -(y * np.log(clipped) + (1.0 - y) * np.log(1.0 - clipped))
    n = p.value.size
    out = _result(np.array([[losses.sum() / n]]), (p,), "bce")

    def _backward():
        if p.requires_grad:
            inside = (p.value >= eps) & (p.value <= 1.0 - eps)
            dp = (clipped - y) / (clipped * (1.0 - clipped)) / n
            p.grad += out.grad[0, 0] * np.where(inside, dp, 0.0)

    out._backward = _backward
    return out


# === Backward pass ===

def topological_order(root: Node) -> List[Node]:
    """Post-order over the subgraph reachable from ``root`` (iterative, no recursion limit)"""
    order: List[Node] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in reversed(node.parents):
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss: Node):
    """
    Fill ``grad`` of every node reachable from a 1x1 ``loss`` with dLoss/dNode.

    Gradients are zeroed first, so repeated calls on the same graph give
    identical results.
    """
    if loss.shape != (1, 1):
        raise ContractError(f"backward needs a scalar (1x1) loss, got {loss.shape}")
    order = topological_order(loss)
    for node in order:
        if node.requires_grad:
            node.zero_grad()
    loss.grad = np.ones((1, 1))
    for node in reversed(order):
        if node._backward is not None and node.requires_grad:
            node._backward()
