"""Minimal writer for the PFV1 feature-file interchange format.

Layout: magic bytes ``PFV1``, u32 version (1), u32 feature length L,
u64 record count N, then N records of u32 class id followed by L
little-endian float32 values.  A JSON sidecar at ``<path>.json`` names
the classes and records any per-image warnings from the producing job.
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"PFV1"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


def write_pfv1(
    path: str,
    features,
    class_ids,
    class_names: dict[int, str],
    split_tag: str = "train",
    provenance: str = "",
    warnings=(),
) -> None:
    features = np.ascontiguousarray(features, dtype=np.float32)
    if features.ndim != 2:
        raise ValueError("features must be a 2-d array")
    n, dim = features.shape
    record = np.dtype([("cls", "<u4"), ("vec", "<f4", (dim,))])
    records = np.empty(n, dtype=record)
    records["cls"] = np.asarray(class_ids, dtype=np.int64)
    records["vec"] = features
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, dim, n))
        fh.write(records.tobytes())
    side = {
        "format": MAGIC.decode("ascii"),
        "version": FORMAT_VERSION,
        "class_names": {str(k): v for k, v in sorted(class_names.items())},
        "split_tag": split_tag,
        "provenance": provenance,
        "warnings": list(warnings),
    }
    with open(f"{path}.json", "w", encoding="utf-8") as fh:
        json.dump(side, fh, indent=2, sort_keys=True)
        fh.write("\n")
