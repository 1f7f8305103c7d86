"""Static charts over spanlab bench CSVs."""

__version__ = "0.1.0"

from .charts import ChartError, ChartSpec, render
