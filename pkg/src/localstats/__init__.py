"""Local and global K-function estimation."""
from .kfunction import (
    RadiusGrid,
    LocalKFunction,
    GlobalKFunction,
    k_pois,
    translation_weight,
    local_k,
    local_k_matrix,
    local_k_all,
    global_k,
)

__all__ = [
    'RadiusGrid',
    'LocalKFunction',
    'GlobalKFunction',
    'k_pois',
    'translation_weight',
    'local_k',
    'local_k_matrix',
    'local_k_all',
    'global_k',
]
