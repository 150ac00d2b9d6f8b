"""
Stacked unidirectional LSTM classifier with an optional attention head.

Gates follow the original formulation (no peepholes):

    i, f, o = sigmoid(.), g = tanh(.)
    c_t = f * c_{t-1} + i * g
    h_t = o * tanh(c_t)

Padded steps carry the previous state forward, so the state after the last
step equals the state at each sequence's last real frame.
"""

from typing import List, Optional, Tuple

import numpy as np

from src.embeddings import EmbeddingStore, FeatureBatch
from src.models.base import Architecture, Classifier, ForwardResult, ModelSpec
from src.numerics import (
    Node, add, concat_cols, constant, glorot_uniform, make_rng, mul, sigmoid,
    slice_cols, slice_rows, softmax_rows, sub, tanh, zeros,
)

FORGET_BIAS = 1.0


class AttentionHead:
    """e_t = tanh(h_t . Wa + ba); alpha = softmax over unmasked t; embedding = sum_t alpha_t h_t"""

    def __init__(self, model: Classifier, rng: np.random.Generator, hidden_size: int):
        self.Wa = model.register("attn.Wa", glorot_uniform(rng, hidden_size, 1))
        self.ba = model.register("attn.ba", zeros(1, 1))

    def __call__(self, states: List[Node], mask: np.ndarray) -> Tuple[Node, np.ndarray]:
        energies = concat_cols([tanh(h @ self.Wa + self.ba) for h in states])
        alpha = softmax_rows(energies, mask=mask)
        embedding = None
        for t, h in enumerate(states):
            if not mask[:, t].any():
                continue
            term = mul(slice_cols(alpha, t, t + 1), h)
            embedding = term if embedding is None else add(embedding, term)
        return embedding, alpha.value.copy()


class LstmModel(Classifier):
    arch = Architecture.LSTM

    def __init__(self, spec: ModelSpec, store: Optional[EmbeddingStore] = None):
        super().__init__(spec, store)
        rng = make_rng(spec.seed)
        H = spec.hidden_size
        self.layers = []
        for layer in range(spec.num_layers):
            fan_in = spec.input_dim if layer == 0 else H
            bias = zeros(1, 4 * H)
            bias[0, H:2 * H] = FORGET_BIAS
            self.layers.append((
                self.register(f"lstm{layer}.Wx", glorot_uniform(rng, fan_in, 4 * H)),
                self.register(f"lstm{layer}.Wh", glorot_uniform(rng, H, 4 * H)),
                self.register(f"lstm{layer}.b", bias),
            ))
        self.attention = self._build_attention(rng)
        self.Wd = self.register("dense.W", glorot_uniform(rng, H, H))
        self.bd = self.register("dense.b", zeros(1, H))
        self.Wo = self.register("out.W", glorot_uniform(rng, H, 1))
        self.bo = self.register("out.b", zeros(1, 1))

    def _build_attention(self, rng: np.random.Generator) -> Optional[AttentionHead]:
        return None

    def _cell(self, z: Node, c: Node) -> Tuple[Node, Node]:
        H = self.spec.hidden_size
        i = sigmoid(slice_cols(z, 0, H))
        f = sigmoid(slice_cols(z, H, 2 * H))
        g = tanh(slice_cols(z, 2 * H, 3 * H))
        o = sigmoid(slice_cols(z, 3 * H, 4 * H))
        c_new = f * c + i * g
        h_new = o * tanh(c_new)
        return h_new, c_new

    @staticmethod
    def _carry(mask_t: np.ndarray, new: Node, old: Node) -> Node:
        if mask_t.all():
            return new
        m = constant(mask_t.astype(np.float64)[:, None])
        return add(mul(m, new), mul(sub(1.0, m), old))

    def encode(self, batch: FeatureBatch) -> List[Node]:
        """Top-layer hidden state at every step"""
        B, T, H = batch.size, batch.steps, self.spec.hidden_size
        stacked = self.stacked_inputs(batch)
        states: List[Node] = []
        for layer, (Wx, Wh, b) in enumerate(self.layers):
            if layer == 0:
                projected = stacked @ Wx
                step_inputs = [slice_rows(projected, t * B, (t + 1) * B) for t in range(T)]
            else:
                step_inputs = [h_below @ Wx for h_below in states]
            h = constant(zeros(B, H))
            c = constant(zeros(B, H))
            outputs = []
            for t in range(T):
                z = step_inputs[t] + h @ Wh + b
                h_new, c_new = self._cell(z, c)
                h = self._carry(batch.mask[:, t], h_new, h)
                c = self._carry(batch.mask[:, t], c_new, c)
                outputs.append(h)
            states = outputs
        return states

    def forward(self, batch: FeatureBatch) -> ForwardResult:
        self._check_input(batch)
        states = self.encode(batch)
        attention = None
        if self.attention is not None:
            embedding, attention = self.attention(states, batch.mask)
        else:
            embedding = states[-1]
        dense = tanh(embedding @ self.Wd + self.bd)
        logits = dense @ self.Wo + self.bo
        return ForwardResult(logits=logits, scores=sigmoid(logits), attention=attention)


class LstmAttentionModel(LstmModel):
    arch = Architecture.LSTM_ATTN

    def _build_attention(self, rng: np.random.Generator) -> Optional[AttentionHead]:
        return AttentionHead(self, rng, self.spec.hidden_size)
