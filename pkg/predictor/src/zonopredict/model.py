"""Encoder-decoder set predictor over token grids.

The encoder sees the current set's grid and the interval endpoint's grid
as one sequence with additive type, position, and step embeddings. The
decoder runs a fixed block of learned queries (one per output row) with
causal self-attention and cross-attention to the encoder; a linear head
maps back to token features. One forward pass yields one substep's grid;
chaining passes, each conditioned on its predecessor's prediction with
the endpoint fixed, makes the interval autoregressive.
"""

from dataclasses import dataclass, asdict

import torch
from torch import nn

MAX_STEP = 16


@dataclass
class SurrogateConfig:
    kappa: int = 20
    n: int = 5
    d_model: int = 128
    heads: int = 4
    encoder_layers: int = 2
    decoder_layers: int = 2
    ffn_width: int = 512
    learning_rate: float = 3e-4
    epochs: int = 200
    samples: int = 2000
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        for field in ("kappa", "n", "d_model", "heads", "encoder_layers",
                      "decoder_layers", "ffn_width", "epochs", "samples",
                      "batch_size"):
            if int(getattr(self, field)) <= 0:
                raise ValueError(f"{field} must be a positive integer")
        if self.d_model % self.heads:
            raise ValueError("d_model must be divisible by heads")

    @property
    def rows(self):
        return self.kappa + 1

    @property
    def d_tok(self):
        return self.n + 1

    def to_dict(self):
        return asdict(self)


class SetPredictorModel(nn.Module):
    def __init__(self, cfg):
        super().__init__()
        self.cfg = cfg
        d = cfg.d_model
        self.embed = nn.Linear(cfg.d_tok, d)
        self.type_embed = nn.Embedding(2, d)      # 0 current, 1 endpoint
        self.pos_embed = nn.Embedding(cfg.rows, d)
        self.step_embed = nn.Embedding(MAX_STEP, d)
        self.queries = nn.Parameter(torch.zeros(cfg.rows, d))
        nn.init.normal_(self.queries, std=0.02)
        layer = dict(d_model=d, nhead=cfg.heads,
                     dim_feedforward=cfg.ffn_width, batch_first=True,
                     dropout=0.0)
        self.encoder = nn.TransformerEncoder(
            nn.TransformerEncoderLayer(**layer), cfg.encoder_layers)
        self.decoder = nn.TransformerDecoder(
            nn.TransformerDecoderLayer(**layer), cfg.decoder_layers)
        self.head = nn.Linear(d, cfg.d_tok)
        mask = torch.triu(torch.full((cfg.rows, cfg.rows), float("-inf")), 1)
        self.register_buffer("causal_mask", mask)

    def forward(self, current, endpoint, j):
        """current, endpoint: (B, rows, d_tok); j: (B,) int substep index."""
        B, rows, _ = current.shape
        pos = self.pos_embed.weight.unsqueeze(0)
        step = self.step_embed(j.clamp(max=MAX_STEP - 1)).unsqueeze(1)
        src = torch.cat([
            self.embed(current) + self.type_embed.weight[0] + pos + step,
            self.embed(endpoint) + self.type_embed.weight[1] + pos + step,
        ], dim=1)
        memory = self.encoder(src)
        tgt = self.queries.unsqueeze(0).expand(B, -1, -1) + pos + step
        out = self.decoder(tgt, memory, tgt_mask=self.causal_mask)
        # one fine step is a small perturbation; predict the change
        return current + self.head(out)
