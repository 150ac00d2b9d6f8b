"""
Word-average baseline: mean of the unmasked frames through one tanh hidden
layer of 150 units and a sigmoid output.
"""

from typing import Optional

import numpy as np

from src.embeddings import EmbeddingStore, FeatureBatch
from src.models.base import Architecture, Classifier, ForwardResult, ModelSpec
from src.numerics import constant, glorot_uniform, make_rng, matmul, sigmoid, tanh, zeros


class AvgDnnModel(Classifier):
    arch = Architecture.AVG_DNN

    def __init__(self, spec: ModelSpec, store: Optional[EmbeddingStore] = None):
        super().__init__(spec, store)
        rng = make_rng(spec.seed)
        H = spec.hidden_size
        self.W1 = self.register("W1", glorot_uniform(rng, spec.input_dim, H))
        self.b1 = self.register("b1", zeros(1, H))
        self.W2 = self.register("W2", glorot_uniform(rng, H, 1))
        self.b2 = self.register("b2", zeros(1, 1))

    def forward(self, batch: FeatureBatch) -> ForwardResult:
        self._check_input(batch)
        weights = batch.mask / batch.lengths[:, None]
        mean = np.einsum("bt,btd->bd", weights, batch.frames)
        s = constant(mean)
        special = np.einsum("bt,btk->bk", weights, batch.special)
        if special.any():
            s = s + matmul(constant(special), self.lexicon_block())
        hidden = tanh(s @ self.W1 + self.b1)
        logits = hidden @ self.W2 + self.b2
        return ForwardResult(logits=logits, scores=sigmoid(logits))
