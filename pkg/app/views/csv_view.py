"""
CSV View
Writes result tables; every table carries the configuration hash
"""

from pathlib import Path
from typing import Optional, Union

import pandas as pd

from ..utils.helpers import format_float


class CsvView:
    """Table writer for command outputs"""

    @staticmethod
    def write(frame: pd.DataFrame, path: Union[str, Path], config_hash: Optional[str] = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        table = frame.copy()
        if config_hash is not None:
            table["config_hash"] = config_hash
        table.to_csv(path, index=False, float_format="%.17g")
        return path

    @staticmethod
    def preview(frame: pd.DataFrame, rows: int = 10) -> list:
        """First rows as records with round-trip exact floats"""
        head = frame.head(rows)
        return [
            {k: (format_float(v) if isinstance(v, float) else v) for k, v in record.items()}
            for record in head.to_dict("records")
        ]
