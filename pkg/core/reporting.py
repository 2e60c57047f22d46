"""
JSON and CSV report writers.

Reports are JSON objects with sorted keys. Each one embeds the tool name,
its version and the resolved RunConfig. Non-finite floats, which JSON
cannot carry, are written as the strings 'inf', '-inf' and 'nan'.
"""

import csv
import json
import logging
import math
from pathlib import Path

import numpy as np

from config import __version__

logger = logging.getLogger(__name__)

TOOL = 'gbcmass'


def sanitize(value):
    """Plain JSON types from numpy scalars/arrays, tuples and non-finite floats."""
    if isinstance(value, dict):
        return {str(k): sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize(v) for v in value]
    if isinstance(value, np.ndarray):
        return sanitize(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        if math.isnan(value):
            return 'nan'
        return 'inf' if value > 0 else '-inf'
    return value


def envelope(config, body):
    """Attach tool, version and config to a report body."""
    return {
        'tool': TOOL,
        'version': __version__,
        'config': config.to_dict(),
        **body,
    }


def dumps(payload):
    return json.dumps(sanitize(payload), sort_keys=True, indent=2)


def write_json(payload, path=None, stream=None):
    """Write to path when given, otherwise to stream."""
    text = dumps(payload)
    if path:
        Path(path).write_text(text + '\n', encoding='utf-8')
        logger.info(f"Wrote report to {path}")
    elif stream is not None:
        stream.write(text)
    return text


def write_csv(rows, path, header):
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([sanitize(v) for v in row])
    logger.info(f"Wrote {len(rows)} CSV rows to {path}")
