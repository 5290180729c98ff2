"""
Versioned binary fixture for toy model weights.

Layout (all integers little-endian):

    magic        4 bytes   b"SPTW"
    version      uint32    1
    config_len   uint32    length of the JSON-encoded ToyConfig
    config       bytes     UTF-8 JSON
    n_arrays     uint32
    per array, in sorted name order:
        name_len uint16, name (UTF-8)
        ndim     uint8,  dims (uint32 each)
        data     float64 little-endian, C order
"""

import json
import struct
from dataclasses import asdict

import numpy as np

from slowpath.errors import InvalidArgumentError
from slowpath.Model.toy import ToyAudioLM, ToyConfig

MAGIC = b"SPTW"
FORMAT_VERSION = 1


def dump_weights(model):
    """Serialize a ToyAudioLM to bytes."""
    config = json.dumps(asdict(model.config), sort_keys=True).encode("utf-8")
    chunks = [MAGIC, struct.pack("<II", FORMAT_VERSION, len(config)), config]
    chunks.append(struct.pack("<I", len(model.params)))
    for name in sorted(model.params):
        array = np.ascontiguousarray(model.params[name], dtype="<f8")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)) + encoded)
        chunks.append(struct.pack("<B", array.ndim) + struct.pack(f"<{array.ndim}I", *array.shape))
        chunks.append(array.tobytes())
    return b"".join(chunks)


def parse_weights(blob):
    """Rebuild a ToyAudioLM from bytes produced by ``dump_weights``."""
    if blob[:4] != MAGIC:
        raise InvalidArgumentError("not a toy weight fixture (bad magic)")
    offset = 4
    version, config_len = struct.unpack_from("<II", blob, offset)
    offset += 8
    if version != FORMAT_VERSION:
        raise InvalidArgumentError(f"unsupported weight fixture version {version}")
    config = ToyConfig(**json.loads(blob[offset : offset + config_len].decode("utf-8")))
    offset += config_len
    (n_arrays,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    params = {}
    for _ in range(n_arrays):
        (name_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        name = blob[offset : offset + name_len].decode("utf-8")
        offset += name_len
        (ndim,) = struct.unpack_from("<B", blob, offset)
        offset += 1
        shape = struct.unpack_from(f"<{ndim}I", blob, offset)
        offset += 4 * ndim
        count = int(np.prod(shape)) if shape else 1
        data = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
        offset += 8 * count
        params[name] = data.reshape(shape).astype(np.float64)
    if offset != len(blob):
        raise InvalidArgumentError("trailing bytes after weight fixture")
    return ToyAudioLM(config, params)


def save_weights(model, path):
    with open(path, "wb") as f:
        f.write(dump_weights(model))


def load_weights(path):
    with open(path, "rb") as f:
        return parse_weights(f.read())
