import json
import numpy as np
import pandas as pd


def prepare_for_json(data):
    """
    Convert a dictionary containing pandas/numpy data types into JSON-serializable
    format. Non-finite floats become None.

    Parameters
    ----------
    data
        Dictionary, DataFrame, or other data structure to convert.

    Returns
    -------
    JSON-serializable version of the data.
    """
    if isinstance(data, dict):
        return {str(k): prepare_for_json(v) for k, v in data.items()}
    elif isinstance(data, (list, tuple)):
        return [prepare_for_json(x) for x in data]
    elif isinstance(data, pd.DataFrame):
        return [prepare_for_json(row) for row in data.to_dict(orient="records")]
    elif isinstance(data, pd.Series):
        return prepare_for_json(data.to_dict())
    elif isinstance(data, np.ndarray):
        return prepare_for_json(data.tolist())
    elif isinstance(data, (bool, np.bool_)):
        return bool(data)
    elif isinstance(data, np.integer):
        return int(data)
    elif isinstance(data, (float, np.floating)):
        return float(data) if np.isfinite(data) else None
    elif data is None or isinstance(data, (int, str)):
        return data
    elif pd.isna(data):
        return None
    return data


def to_json_line(record: dict) -> str:
    """Serializes one record as a single compact JSON line."""
    return json.dumps(prepare_for_json(record), separators=(", ", ": "))
