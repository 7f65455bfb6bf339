from .render import FigureSpec, SchemaError, heatmap_matrix, render

__all__ = ["FigureSpec", "SchemaError", "heatmap_matrix", "render"]
