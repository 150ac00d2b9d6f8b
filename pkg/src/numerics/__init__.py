from .graph import (
    Matrix, Node, as_matrix, parameter, constant,
    matmul, add, sub, mul, scale, tanh, sigmoid, log, elementwise,
    softmax_rows, concat_cols, slice_cols, slice_rows, sum_all, mean_all,
    binary_cross_entropy, backward, topological_order,
)
from .init import make_rng, glorot_uniform, zeros
from .gradcheck import check_gradients, numerical_gradient, relative_error

__all__ = [
    "Matrix", "Node", "as_matrix", "parameter", "constant",
    "matmul", "add", "sub", "mul", "scale", "tanh", "sigmoid", "log", "elementwise",
    "softmax_rows", "concat_cols", "slice_cols", "slice_rows", "sum_all", "mean_all",
    "binary_cross_entropy", "backward", "topological_order",
    "make_rng", "glorot_uniform", "zeros",
    "check_gradients", "numerical_gradient", "relative_error",
]
