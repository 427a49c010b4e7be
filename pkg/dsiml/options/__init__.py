from .._src.display.print_options import print_options
from .._src.display.plot_options import plot_options
from .._src.display.compute_options import compute_options

__all__ = [
    "print_options",
    "plot_options",
    "compute_options",
]
