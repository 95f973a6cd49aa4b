"""Merge trees of scalar fields and a metric tree edit distance between them."""

from .cost import CostModel, delete_cost, insert_cost, relabel_cost
from .diagram import PersistenceDiagram, bottleneck, diagram_of, wasserstein1
from .field import (GaussianSpec, ScalarGraph, ScalarGrid, gen_gaussian_sum,
                    grid_to_graph, load_grid, resample_nearest, save_grid,
                    smooth_laplacian, subsample, subsample_schedule)
from .mergetree import (JOIN, SPLIT, Interval, MergeTree, MergeTreeNode,
                        StabilizationConfig, build_merge_tree, deserialize_tree,
                        extract_subtrees, load_tree, persistence_pair, save_tree,
                        serialize_tree, simplify, stabilize)
from .ted import (EditMapping, TedResult, mapping_cost, mapping_to_json, ted,
                  validate_mapping)

__version__ = "0.1.0"

__all__ = [
    "CostModel", "delete_cost", "insert_cost", "relabel_cost",
    "PersistenceDiagram", "bottleneck", "diagram_of", "wasserstein1",
    "GaussianSpec", "ScalarGraph", "ScalarGrid", "gen_gaussian_sum",
    "grid_to_graph", "load_grid", "resample_nearest", "save_grid",
    "smooth_laplacian", "subsample", "subsample_schedule",
    "JOIN", "SPLIT", "Interval", "MergeTree", "MergeTreeNode",
    "StabilizationConfig", "build_merge_tree", "deserialize_tree",
    "extract_subtrees", "load_tree", "persistence_pair", "save_tree",
    "serialize_tree", "simplify", "stabilize",
    "EditMapping", "TedResult", "mapping_cost", "mapping_to_json", "ted",
    "validate_mapping",
    "__version__",
]
