"""Lipschitz geometry of relative Outer space for free products, on small graphs of groups."""
from .kernels import BACKEND
from .groups import FLAG, AbelianGroup, GroupSpec
from .graph import GraphOfGroups, MarkedLoop, Path, evaluate_loop, is_integrable, tighten_loop, validate_graph
from .freeprod import MarkedGraph, Marking, identity_marking, translation_length, validate_marking, word_of_loop
from .lipschitz import Candidate, distance, enumerate_candidates, lip_norm, max_cone_witness, metric_distance
from .correction import (
    class_length,
    class_lengths,
    corrected_norm,
    correction_constants,
    double_covers,
    enumerate_classes,
    n_value,
    psi,
    psi_invariance,
)
from .geodesy import PLPath, check_main_theorem, path_length_L, path_length_N, reverse_path
from .spectral import ReducibleMatrixWarning, check_expansion_bound, pf_factor, transition_matrix
from .scene import Scene, SceneError, load_preset, parse_scene
from .suites import run_suite

__all__ = [
    "BACKEND", "FLAG", "AbelianGroup", "GroupSpec", "GraphOfGroups", "MarkedLoop", "Path", "evaluate_loop",
    "is_integrable", "tighten_loop", "validate_graph", "MarkedGraph", "Marking", "identity_marking",
    "translation_length", "validate_marking", "word_of_loop", "Candidate", "distance", "enumerate_candidates",
    "lip_norm", "max_cone_witness", "metric_distance", "class_length", "class_lengths", "corrected_norm",
    "correction_constants", "double_covers", "enumerate_classes", "n_value", "psi", "psi_invariance", "PLPath",
    "check_main_theorem", "path_length_L", "path_length_N", "reverse_path", "ReducibleMatrixWarning",
    "check_expansion_bound", "pf_factor", "transition_matrix", "Scene", "SceneError", "load_preset",
    "parse_scene", "run_suite",
]
