# Views Package
# Output formatting layer

from .csv_view import CsvView
from .json_view import JsonView

__all__ = ["CsvView", "JsonView"]
