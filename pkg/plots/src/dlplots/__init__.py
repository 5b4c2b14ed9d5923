"""Rendering for dlgibbs CSV outputs: QQ panel grids and study tables.

Purely a consumer of the documented CSV contracts; no statistical
computation happens here, and rendered numbers are never altered (table
cells are reproduced verbatim from the CSV text).
"""

__version__ = "0.1.0"

from .qq import QqPanels, render_qq
from .tables import render_table

__all__ = ["__version__", "QqPanels", "render_qq", "render_table"]
