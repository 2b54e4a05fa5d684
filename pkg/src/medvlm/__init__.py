"""Desk-scale multimodal medical VLM pipeline.

Subpackages:
    nn          numpy autograd core: attention, RoPE, optimizer, schedules
    model       tokenizer, image tiling, ViT encoder, decoder LM, checkpoints
    curriculum  staged training with per-stage freezing and LR maps
    bench       deterministic benchmark construction from raw corpora
    harness     evaluation loop, chat templates, endpoint clients, scoring
    metrics     report quality metrics and composite scores
    server      chat-completions HTTP service wrapping a local model
"""

__version__ = "0.1.0"
