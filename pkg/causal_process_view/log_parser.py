"""
Parser for delimited-text event logs.
"""

import io
import logging
import os
import re
from typing import BinaryIO, Optional, Union

import numpy as np
import pandas as pd

from .config import DEFAULT_START_COLUMN, CsvDescriptor
from .eventlog import (
    EmptyLogError,
    Event,
    EventLog,
    MalformedRowError,
    MissingColumnError,
)

logger = logging.getLogger(__name__)

# Data rows start on line 2; line 1 is the header.
_FIRST_DATA_LINE = 2


def parse_log(
    source: Union[str, bytes, BinaryIO],
    descriptor: Optional[CsvDescriptor] = None
) -> EventLog:
    """
    Parse a CSV event log.

    Args:
        source: Path, raw bytes or binary stream of the CSV text
        descriptor: Column mapping and timestamp format

    Returns:
        EventLog with one event per data row, in input order

    Raises:
        MissingColumnError: A mandatory column is not in the header
        MalformedRowError: A row has a bad field count, empty activity or
            case id, unparseable timestamp or non-numeric attribute
        EmptyLogError: The file has no data rows
    """
    descriptor = descriptor or CsvDescriptor()

    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    elif isinstance(source, str) and not os.path.exists(source):
        raise FileNotFoundError(f"Event log not found: {source}")

    try:
        frame = pd.read_csv(
            source,
            sep=descriptor.delimiter,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except pd.errors.EmptyDataError:
        raise EmptyLogError("Event log is empty") from None
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line_number = int(match.group(1)) if match else -1
        raise MalformedRowError(line_number, str(e)) from None

    # Short rows leave NaN in the missing trailing fields.
    frame = frame.fillna("")

    start_column = descriptor.start_timestamp_column
    if start_column is None and DEFAULT_START_COLUMN in frame.columns:
        logger.info("Using column '%s' as activity start", DEFAULT_START_COLUMN)
        start_column = DEFAULT_START_COLUMN

    mandatory = [descriptor.case_column, descriptor.activity_column, descriptor.timestamp_column]
    optional = list(descriptor.attribute_columns)
    if descriptor.start_timestamp_column:
        optional.append(descriptor.start_timestamp_column)
    missing = [column for column in mandatory + optional if column not in frame.columns]
    if missing:
        raise MissingColumnError(f"Missing column(s) in event log: {', '.join(missing)}")

    if frame.empty:
        raise EmptyLogError("Event log has a header but no events")

    case_ids = frame[descriptor.case_column].str.strip()
    activities = frame[descriptor.activity_column].str.strip()
    for column, values in ((descriptor.case_column, case_ids), (descriptor.activity_column, activities)):
        empty = np.flatnonzero((values == "").to_numpy())
        if len(empty):
            raise MalformedRowError(int(empty[0]) + _FIRST_DATA_LINE, f"empty '{column}' value")

    timestamps = _parse_timestamps(frame[descriptor.timestamp_column], descriptor)
    starts = None
    if start_column:
        starts = _parse_timestamps(frame[start_column], descriptor, allow_empty=True)

    attributes = {}
    for column in descriptor.attribute_columns:
        values = pd.to_numeric(frame[column].replace("", np.nan), errors="coerce")
        bad = np.flatnonzero((values.isna() & (frame[column] != "")).to_numpy())
        if len(bad):
            raise MalformedRowError(
                int(bad[0]) + _FIRST_DATA_LINE,
                f"attribute '{column}' is not a number: '{frame[column].iloc[bad[0]]}'"
            )
        attributes[column] = values.to_numpy()

    events = []
    for position in range(len(frame)):
        attrs = tuple(
            (column, float(values[position]))
            for column, values in attributes.items()
            if not np.isnan(values[position])
        )
        start = None
        if starts is not None and not np.isnan(starts[position]):
            start = float(starts[position])
        try:
            events.append(Event(
                case_id=case_ids.iloc[position],
                activity=activities.iloc[position],
                timestamp=float(timestamps[position]),
                attributes=attrs,
                start_timestamp=start,
            ))
        except ValueError as e:
            raise MalformedRowError(position + _FIRST_DATA_LINE, str(e)) from None

    log = EventLog(tuple(events))
    logger.info("Parsed %d events of %d cases", len(log), len(log.case_ids))
    return log


def _parse_timestamps(
    values: pd.Series,
    descriptor: CsvDescriptor,
    allow_empty: bool = False
) -> np.ndarray:
    """Parse a timestamp column into seconds since the Unix epoch."""
    text = values.str.strip()
    parsed = pd.to_datetime(text, format=descriptor.timestamp_format, errors="coerce", utc=True)

    failed = parsed.isna().to_numpy()
    if allow_empty:
        failed &= (text != "").to_numpy()
    bad = np.flatnonzero(failed)
    if len(bad):
        raise MalformedRowError(
            int(bad[0]) + _FIRST_DATA_LINE,
            f"cannot parse timestamp '{text.iloc[bad[0]]}' in column '{values.name}' "
            f"with format '{descriptor.timestamp_format}'"
        )

    epoch = pd.Timestamp("1970-01-01", tz="UTC")
    return ((parsed - epoch) / pd.Timedelta(seconds=1)).to_numpy(dtype=float, na_value=np.nan)
