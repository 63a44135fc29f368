"""Allocation procedures: fat-rectangle representatives, knife-based rectangle allocators and the pipeline."""
from .core import Allocation, NormalizedAgent, allocation_problems, v_req
from .fat import allocate_fat, nfat_parts, select_disjoint_representatives
from .pipeline import allocate_pipeline, parts_for
from .rectangles import allocate_four, allocate_recursive, allocate_three, allocate_two

__all__ = [
    "Allocation", "NormalizedAgent", "allocation_problems", "v_req",
    "allocate_fat", "nfat_parts", "select_disjoint_representatives",
    "allocate_pipeline", "parts_for",
    "allocate_two", "allocate_three", "allocate_four", "allocate_recursive",
]
