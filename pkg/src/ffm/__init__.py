"""Frequency Filtering Metadescriptor for chunked data streams."""

__version__ = "0.1.0"

from .clustering import ClusteringResult, ConceptCountReport, identify_concept_count, kmeans, normalize, normalize_minmax
from .ingest import ChunkedStream, read_chunked_csv, read_raw_f32, write_raw_f32
from .metadescriptor import (
    FrequencySignature,
    Metadescription,
    chunk_frequency_signature,
    metadescribe,
    render_chunk_image,
    select_frequencies,
)
from .signal import RealSpectrum, dft_real_half, idft_single_component
from .streamgen import DriftType, StreamConfig, SyntheticStream, concept_weight, make_stream

__all__ = [
    "ChunkedStream",
    "ClusteringResult",
    "ConceptCountReport",
    "DriftType",
    "FrequencySignature",
    "Metadescription",
    "RealSpectrum",
    "StreamConfig",
    "SyntheticStream",
    "chunk_frequency_signature",
    "concept_weight",
    "dft_real_half",
    "identify_concept_count",
    "idft_single_component",
    "kmeans",
    "make_stream",
    "metadescribe",
    "normalize",
    "normalize_minmax",
    "read_chunked_csv",
    "read_raw_f32",
    "render_chunk_image",
    "select_frequencies",
    "write_raw_f32",
]
