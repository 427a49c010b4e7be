from .helpers import group_indices, derive_seed
from .serialize import prepare_for_json, to_json_line
from . import errors

__all__ = ["group_indices", "derive_seed", "prepare_for_json", "to_json_line", "errors"]
