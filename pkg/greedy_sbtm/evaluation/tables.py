"""Summary table writers.

CSV tables carry a header row and render undefined values as ``NA``; Parquet
tables keep them as nulls.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Literal

import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq
import structlog

from greedy_sbtm.ingestion.exceptions import ArgumentError

logger = structlog.get_logger(__name__)

TableFormat = Literal["csv", "parquet"]
MISSING = "NA"


def format_value(value: object) -> str:
    """Render one cell; NaN and None become ``NA``."""
    if value is None:
        return MISSING
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return MISSING
        return format(float(value), ".10g")
    if isinstance(value, (np.integer, np.bool_)):
        return str(value.item())
    return str(value)


def _arrow_column(values: Sequence[object]) -> pa.Array:
    array = np.asarray(values)
    if array.dtype.kind == "f":
        return pa.array(array, mask=np.isnan(array))
    return pa.array(array.tolist())


def write_table(
    path: str | Path, columns: Mapping[str, Sequence[object]], table_format: TableFormat = "csv"
) -> Path:
    """
    Write equal-length named columns as a table.

    Returns:
        The written path; ``.csv`` or ``.parquet`` replaces any suffix.
    """
    lengths = {len(v) for v in columns.values()}
    if len(lengths) > 1:
        raise ArgumentError(f"columns have different lengths: {sorted(lengths)}")
    path = Path(path).with_suffix(f".{table_format}")
    path.parent.mkdir(parents=True, exist_ok=True)

    if table_format == "parquet":
        table = pa.table({name: _arrow_column(values) for name, values in columns.items()})
        pq.write_table(table, path)
    elif table_format == "csv":
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(list(columns))
            for row in zip(*columns.values(), strict=True):
                writer.writerow([format_value(v) for v in row])
    else:
        raise ArgumentError(f"unknown table format {table_format!r}")
    logger.debug("table_written", path=str(path), rows=lengths.pop() if lengths else 0)
    return path


def write_matrix(
    path: str | Path,
    matrix: np.ndarray,
    row_labels: Sequence[object] | None = None,
    column_labels: Sequence[object] | None = None,
    table_format: TableFormat = "csv",
    index_name: str = "row",
) -> Path:
    """Write a dense matrix with a leading label column; NaN entries become ``NA``."""
    matrix = np.atleast_2d(matrix)
    rows = list(row_labels) if row_labels is not None else list(range(matrix.shape[0]))
    cols = list(column_labels) if column_labels is not None else list(range(matrix.shape[1]))
    columns: dict[str, Sequence[object]] = {index_name: rows}
    for j, label in enumerate(cols):
        columns[str(label)] = matrix[:, j]
    return write_table(path, columns, table_format)
