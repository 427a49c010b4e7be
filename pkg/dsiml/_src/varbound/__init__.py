from .jj import pi, jj_bound, jj_offset
from .state import VariationalState, update_phi, update_eta, bound_objective


__all__ = [
    "pi",
    "jj_bound",
    "jj_offset",
    "VariationalState",
    "update_phi",
    "update_eta",
    "bound_objective",
]
