"""Figure rendering for bankmfg CSV outputs.

Strictly downstream of the solver CLI: reads the master manifest written by
``bankmfg figure <tag>`` runs, loads the referenced CSV files, and draws
one image per experiment tag.  No numerical computation happens here beyond
plotting transforms.
"""

__version__ = "0.1.0"

from .render import render
from .spec import FigureSpec, specs_from_manifest

__all__ = ["FigureSpec", "render", "specs_from_manifest", "__version__"]
