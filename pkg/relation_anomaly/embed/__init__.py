"""Word-vector tables and triplet embeddings."""

from .table import EmbeddingTable, PhraseVector, embed_phrase, load_embeddings, split_words
from .triplet import MODES, TEMPLATE, TripletVector, add_noise, add_noise_batch, embed_triplet, embed_triplets, vector_width

__all__ = [
    "EmbeddingTable",
    "PhraseVector",
    "load_embeddings",
    "embed_phrase",
    "split_words",
    "MODES",
    "TEMPLATE",
    "TripletVector",
    "vector_width",
    "embed_triplet",
    "embed_triplets",
    "add_noise",
    "add_noise_batch",
]
