"""
Central finite-difference gradient checking.

``loss_fn`` must rebuild the graph from the current parameter values on
every call and return a 1x1 loss node.
"""

from typing import Callable, Dict, Sequence

import numpy as np

from src.numerics.graph import Matrix, Node, backward


def numerical_gradient(loss_fn: Callable[[], Node], param: Node, h: float = 1e-5) -> Matrix:
    grad = np.zeros_like(param.value)
    for idx in np.ndindex(*param.shape):
        original = param.value[idx]
        param.value[idx] = original + h
        plus = loss_fn().item()
        param.value[idx] = original - h
        minus = loss_fn().item()
        param.value[idx] = original
        grad[idx] = (plus - minus) / (2.0 * h)
    return grad


def relative_error(analytic: Matrix, numeric: Matrix, floor: float = 1e-4) -> float:
    """max |a - n| / max(|a| + |n|, floor) over all entries"""
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_gradients(
    loss_fn: Callable[[], Node],
    params: Sequence[Node],
    h: float = 1e-5,
) -> Dict[str, float]:
    """
    Compare backward() against central differences for every parameter.

    Returns:
        Mapping of parameter name (or index) to max relative error
    """
    loss = loss_fn()
    for p in params:
        p.zero_grad()
    backward(loss)
    analytic = {i: p.grad.copy() for i, p in enumerate(params)}

    errors: Dict[str, float] = {}
    for i, p in enumerate(params):
        numeric = numerical_gradient(loss_fn, p, h)
        errors[p.name or str(i)] = relative_error(analytic[i], numeric)
    return errors
