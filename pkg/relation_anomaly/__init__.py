"""Relation Anomaly Package

Detects anomalous subject-predicate-object triplets in scene graphs. Triplets
are embedded with pretrained word vectors, compressed by an autoencoder and
scored by a RealNVP normalizing flow trained only on normal images. A counting
baseline, ranking metrics and robustness/ablation sweeps ship alongside.
"""

__version__ = "0.1.0"
