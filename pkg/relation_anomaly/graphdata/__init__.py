"""Scene-graph records, dataset ingestion, preprocessing and perturbations."""

from .loader import dataset_from_dict, dataset_to_dict, load_dataset, load_stoplist, load_synonyms, save_dataset
from .models import SLOTS, Dataset, Descriptor, SceneGraph, Subgroup, SynonymMap, Triplet, TripletKey
from .perturb import apply_synonyms, count_mapped_occurrences, synonym_variants
from .synthetic import SyntheticConfig, gen_synthetic, load_synthetic_config, normal_vocabulary, zipf_weights
from .transforms import (
    as_training_set,
    build_subgroups,
    filter_minor_objects,
    inject_ground_truth,
    label_ground_truth,
    preprocess_dataset,
    preprocess_graph,
    select_top_k,
    split_dataset,
)

__all__ = [
    "SLOTS",
    "Dataset",
    "Descriptor",
    "SceneGraph",
    "Subgroup",
    "SynonymMap",
    "Triplet",
    "TripletKey",
    "dataset_from_dict",
    "dataset_to_dict",
    "load_dataset",
    "save_dataset",
    "load_stoplist",
    "load_synonyms",
    "apply_synonyms",
    "synonym_variants",
    "count_mapped_occurrences",
    "SyntheticConfig",
    "gen_synthetic",
    "load_synthetic_config",
    "normal_vocabulary",
    "zipf_weights",
    "select_top_k",
    "filter_minor_objects",
    "label_ground_truth",
    "inject_ground_truth",
    "preprocess_graph",
    "preprocess_dataset",
    "split_dataset",
    "as_training_set",
    "build_subgroups",
]
