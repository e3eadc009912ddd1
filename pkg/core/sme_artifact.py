"""
SME model artifact

Single self-describing binary file, all integers and floats little-endian:

    offset  size  content
    0       4     magic b"SMEM"
    4       1     format version (2)
    5       4     u32 Dt (term dimension)
    9       4     u32 relation dimension (always 10)
    13      4     u32 n_terms
    17      4     u32 n_relations
    21      ...   training fingerprint string (empty when unknown)
    ...     ...   n_terms strings, then n_relations strings;
                  each string is u32 byte length + UTF-8 bytes
    ...     ...   float64 arrays in C order:
                  term embeddings   (n_terms, Dt)
                  relation embeddings (n_relations, 10)
                  interaction tensor (Dt, Dt, 10)
                  relation bias     (n_relations,)

The fingerprint identifies the settings and inputs the model was trained
from, so a stale model in the output directory can be told apart from a
current one without decoding the parameters.

The same model and fingerprint always serialise to the same bytes.
"""

import struct
from pathlib import Path
from typing import List, Tuple

import numpy as np

from core.errors import DataError
from core.sme import RELATION_DIM, SmeModel
from utils.logger import logger


MAGIC = b"SMEM"
FORMAT_VERSION = 2

_HEADER = struct.Struct("<4sBIIII")
_U32 = struct.Struct("<I")
_FLOAT = np.dtype("<f8")


class SmeArtifactError(DataError):
    """Model file is truncated, has the wrong magic or an unknown version."""


def _pack_string(value: str) -> bytes:
    encoded = value.encode("utf-8")
    return _U32.pack(len(encoded)) + encoded


def _unpack_string(data: bytes, offset: int, source: str, what: str) -> Tuple[str, int]:
    if offset + _U32.size > len(data):
        raise SmeArtifactError(f"{source}: truncated {what}")
    (length,) = _U32.unpack_from(data, offset)
    offset += _U32.size
    if offset + length > len(data):
        raise SmeArtifactError(f"{source}: truncated {what}")
    try:
        value = data[offset:offset + length].decode("utf-8")
    except UnicodeDecodeError:
        raise SmeArtifactError(f"{source}: {what} is not valid UTF-8")
    return value, offset + length


def encode_sme_model(model: SmeModel, fingerprint: str = "") -> bytes:
    """Serialise a model to the artifact byte layout."""
    parts: List[bytes] = [
        _HEADER.pack(
            MAGIC, FORMAT_VERSION, model.term_dim, RELATION_DIM,
            len(model.terms), len(model.relations)
        ),
        _pack_string(fingerprint),
    ]
    for name in model.terms + model.relations:
        parts.append(_pack_string(name))

    for array in (
            model.term_embeddings,
            model.relation_embeddings,
            model.interaction_tensor,
            model.relation_bias,
    ):
        parts.append(np.ascontiguousarray(array, dtype=_FLOAT).tobytes(order="C"))

    return b"".join(parts)


def _read_header(data: bytes, source: str) -> Tuple[int, int, int, str, int]:
    """(Dt, n_terms, n_relations, fingerprint, offset past the fingerprint)"""
    if len(data) < _HEADER.size:
        raise SmeArtifactError(f"{source}: file too short for header")

    magic, version, dt, rel_dim, n_terms, n_relations = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise SmeArtifactError(f"{source}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise SmeArtifactError(f"{source}: unsupported format version {version}")
    if rel_dim != RELATION_DIM:
        raise SmeArtifactError(f"{source}: relation dimension {rel_dim}, expected {RELATION_DIM}")

    fingerprint, offset = _unpack_string(data, _HEADER.size, source, "fingerprint")
    return dt, n_terms, n_relations, fingerprint, offset


def decode_sme_artifact(data: bytes, source: str = "<bytes>") -> Tuple[SmeModel, str]:
    """Parse artifact bytes into (model, training fingerprint)."""
    dt, n_terms, n_relations, fingerprint, offset = _read_header(data, source)

    names: List[str] = []
    for _ in range(n_terms + n_relations):
        name, offset = _unpack_string(data, offset, source, "vocabulary")
        names.append(name)

    def take(shape: Tuple[int, ...]) -> np.ndarray:
        nonlocal offset
        count = int(np.prod(shape))
        end = offset + count * _FLOAT.itemsize
        if end > len(data):
            raise SmeArtifactError(f"{source}: truncated parameters")
        array = np.frombuffer(data, dtype=_FLOAT, count=count, offset=offset).reshape(shape)
        offset = end
        return array.astype(np.float64)

    term_embeddings = take((n_terms, dt))
    relation_embeddings = take((n_relations, RELATION_DIM))
    tensor = take((dt, dt, RELATION_DIM))
    bias = take((n_relations,))

    if offset != len(data):
        raise SmeArtifactError(f"{source}: {len(data) - offset} trailing bytes")

    model = SmeModel(
        terms=tuple(names[:n_terms]),
        relations=tuple(names[n_terms:]),
        term_embeddings=term_embeddings,
        relation_embeddings=relation_embeddings,
        interaction_tensor=tensor,
        relation_bias=bias,
    )
    return model, fingerprint


def decode_sme_model(data: bytes, source: str = "<bytes>") -> SmeModel:
    """Parse artifact bytes back into a model."""
    return decode_sme_artifact(data, source)[0]


def save_sme_model(model: SmeModel, path: Path, fingerprint: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = encode_sme_model(model, fingerprint)
    path.write_bytes(data)
    logger.info(f"Saved SME model ({len(data)} bytes) to {path}", source="SmeArtifact")
    return path


def load_sme_model(path: Path) -> SmeModel:
    path = Path(path)
    model = decode_sme_model(path.read_bytes(), source=str(path))
    logger.info(
        f"Loaded SME model: {len(model.terms)} terms, {len(model.relations)} relations, Dt={model.term_dim}",
        source="SmeArtifact"
    )
    return model


def read_sme_fingerprint(path: Path) -> str:
    """Training fingerprint stored in an artifact, without decoding the parameters."""
    path = Path(path)
    return _read_header(path.read_bytes(), str(path))[3]
