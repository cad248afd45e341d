"""Learn how a codebase orders Java class members, then apply the model."""

from .comments import CommentSpec, infer_comment, split_boundary_text
from .dtree import (
    Dataset,
    DecisionTree,
    Sample,
    classify,
    cleanup_consistency,
    cleanup_significance,
    specialize,
    train,
    used_attributes,
)
from .extract import (
    CallFacts,
    Component,
    ParseError,
    SourceFile,
    collect_corpus,
    compute_call_facts,
    parse_file,
)
from .insert import (
    InsertionPlan,
    NoRegionError,
    apply_insertion,
    find_region_for,
    plan_insertion,
    reorder_file,
)
from .learn import EmptyCorpus, LearnConfig, LearnResult, learn_model
from .model import OrderModel, RegionSpec, read_model, write_model
from .props import NamePatterns, default_patterns, load_patterns
from .regions import Category, RegionGraph, RegionTable, significant

__version__ = "0.1.0"

__all__ = [
    "CallFacts",
    "Category",
    "CommentSpec",
    "Component",
    "Dataset",
    "DecisionTree",
    "EmptyCorpus",
    "InsertionPlan",
    "LearnConfig",
    "LearnResult",
    "NamePatterns",
    "NoRegionError",
    "OrderModel",
    "ParseError",
    "RegionGraph",
    "RegionSpec",
    "RegionTable",
    "Sample",
    "SourceFile",
    "apply_insertion",
    "classify",
    "cleanup_consistency",
    "cleanup_significance",
    "collect_corpus",
    "compute_call_facts",
    "default_patterns",
    "find_region_for",
    "infer_comment",
    "learn_model",
    "load_patterns",
    "parse_file",
    "plan_insertion",
    "read_model",
    "reorder_file",
    "significant",
    "specialize",
    "split_boundary_text",
    "train",
    "used_attributes",
    "write_model",
]
